//! Numeric policy for the intersection kernels and their reference oracle.
//!
//! All thresholds are fixed project-wide. The intersection code treats the
//! strict interval test `c_low < c_up` as the authority on whether a unit is
//! hit; everything below only decides routing and filters out floating-point
//! residue, so a borderline misclassification costs at most a ~1e-12 length,
//! which the emission threshold removes again.

/// Classification threshold on |sin| / |cos| of a ray angle. Below this the
/// general formulas would divide by a near-zero direction component and the
/// ray is indistinguishable from an exactly axis-parallel one in f64, so it
/// is routed to the dedicated axis-parallel / plane-parallel paths.
pub const AXIS_EPS: f64 = 1e-12;

/// Nudge used when extracting integer candidates from an open interval
/// (lo, hi): candidates are ceil(lo + RANGE_EPS) ..= floor(hi - RANGE_EPS).
/// The range is a filter; each candidate is confirmed by the strict interval
/// test, so the nudge cannot admit false positives.
pub const RANGE_EPS: f64 = 1e-12;

/// Records with length <= LENGTH_EPS are dropped. Such lengths only arise
/// from floating-point residue at tangential contact, which the exact
/// geometry excludes.
pub const LENGTH_EPS: f64 = 1e-12;

/// Detection tolerance for a ray lying exactly on a grid line or plane. When
/// an axis-parallel ray's constant coordinate sits within TIE_EPS of a unit
/// boundary, two units share the intersection and the tie-break picks the
/// one with the larger flat index.
pub const TIE_EPS: f64 = 1e-12;

/// Tie-break winner for a closed unit band [u-1, u]: when u is within
/// TIE_EPS of an integer both band endpoints are admissible indices and the
/// larger one (round(u)) wins; otherwise the band interior selects floor(u).
/// Returns a possibly out-of-bounds index; callers bounds-check.
pub fn tie_break_floor(u: f64) -> i64 {
    let r = u.round();
    if (u - r).abs() <= TIE_EPS {
        r as i64
    } else {
        u.floor() as i64
    }
}
