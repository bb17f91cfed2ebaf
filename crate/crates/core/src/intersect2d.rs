//! 2D intersection kernel.
//!
//! Computes the boxes a canonical 2D ray crosses and the segment length in
//! each, by sweeping the grid columns the ray can touch. Per column the ray
//! occupies a parameter interval [tx_lo, tx_hi]; that interval bounds the
//! rows the ray can cross there, so only one to a handful of rows are
//! examined per column and the total work is O(max(nx, ny)) regardless of
//! the ray's angle. The candidate window is clamped to the grid, which also
//! empties it for columns whose parameter interval lies outside the grid's
//! vertical extent (this is what keeps nearly vertical rays linear).
//!
//! Rays within [`AXIS_EPS`] of an axis are handled separately: the
//! orthogonal coordinate is constant, so a single row or column wins with
//! unit lengths per box. A constant coordinate that falls exactly on a box
//! boundary is resolved toward the larger index ([`tie_break_floor`]), so
//! every ray has one well defined row.
//!
//! Lengths below [`LENGTH_EPS`] are treated as grazing contact and not
//! emitted.

use crate::geometry::ParallelRay2D;
use crate::sparse::{IntersectionRecord, SparseRow};
use crate::tally::{CandidateTally, NoTally};
use crate::tolerance::{tie_break_floor, AXIS_EPS, LENGTH_EPS, RANGE_EPS};

/// Intersection row of `ray` on an nx-by-ny unit grid centered at the
/// origin. Records are sorted by flat index j * nx + i.
pub fn intersection_row_2d(ray: &ParallelRay2D, nx: usize, ny: usize) -> SparseRow {
    intersection_row_2d_counted(ray, nx, ny, &mut NoTally)
}

/// As [`intersection_row_2d`], reporting every examined candidate box to
/// `tally` (the work-bound instrumentation for scaling tests).
pub fn intersection_row_2d_counted(
    ray: &ParallelRay2D,
    nx: usize,
    ny: usize,
    tally: &mut impl CandidateTally,
) -> SparseRow {
    debug_assert!(nx >= 1 && ny >= 1 && nx.checked_mul(ny).is_some());
    let (sin_phi, cos_phi) = ray.phi().sin_cos();
    let s = ray.s();
    let half_x = nx as f64 / 2.0;
    let half_y = ny as f64 / 2.0;
    let mut records = Vec::new();

    if sin_phi.abs() < AXIS_EPS {
        // horizontal: y = s * cos phi is constant, one row takes the ray
        let y0 = s * cos_phi;
        let j = tie_break_floor(half_y - y0);
        if j >= 0 && (j as usize) < ny {
            tally.record(nx);
            let base = j as usize * nx;
            records.extend((0..nx).map(|i| IntersectionRecord { index: base + i, length: 1.0 }));
        }
    } else if cos_phi.abs() < AXIS_EPS {
        // vertical: x = -s * sin phi is constant, one column takes the ray
        let x0 = -s * sin_phi;
        let i = tie_break_floor(half_x + x0);
        if i >= 0 && (i as usize) < nx {
            tally.record(ny);
            records.extend(
                (0..ny).map(|j| IntersectionRecord { index: j * nx + i as usize, length: 1.0 }),
            );
        }
    } else {
        // canonical phi in (0, pi) away from both axes: sin phi > 0
        let s_sin = s * sin_phi;
        let s_cos = s * cos_phi;
        let inv_sin = 1.0 / sin_phi;
        for i in 0..nx {
            let xa = i as f64 - half_x + s_sin;
            let t1 = xa / cos_phi;
            let t2 = (xa + 1.0) / cos_phi;
            let (tx_lo, tx_hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            // rows whose y-interval can meet [tx_lo, tx_hi]: lower < j < upper
            let upper = half_y - s_cos - tx_lo * sin_phi;
            let lower = half_y - 1.0 - s_cos - tx_hi * sin_phi;
            let j_first = ((lower + RANGE_EPS).ceil() as i64).max(0);
            let j_last = ((upper - RANGE_EPS).floor() as i64).min(ny as i64 - 1);
            if j_first > j_last {
                continue;
            }
            tally.record((j_last - j_first + 1) as usize);
            for j in j_first..=j_last {
                let ty_hi = (half_y - j as f64 - s_cos) * inv_sin;
                let ty_lo = ty_hi - inv_sin;
                let enter = if tx_lo > ty_lo { tx_lo } else { ty_lo };
                let exit = if tx_hi < ty_hi { tx_hi } else { ty_hi };
                let length = exit - enter;
                if length > LENGTH_EPS {
                    records.push(IntersectionRecord { index: j as usize * nx + i, length });
                }
            }
        }
    }

    SparseRow::from_unsorted(records).expect("kernel emits unique positive records")
}
