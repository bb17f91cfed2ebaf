//! 3D intersection kernel.
//!
//! The canonical ray's direction is classified per axis with [`AXIS_EPS`]:
//! an axis is free when the ray's coordinate along it actually varies
//! (both trigonometric factors of that direction component are away from
//! zero). The kernel then dispatches on the number of free axes:
//!
//! * three free: sweep columns i; the time interval in each column bounds
//!   the rows j worth examining, and the joint (i, j) interval bounds the
//!   slices k. Windows are clamped to the grid, so columns whose interval
//!   misses the grid cost nothing and total work is O(max(nx, ny, nz)).
//! * two free: the remaining coordinate is constant, so one slab of boxes
//!   wins (ties resolve to the larger index) and a 2D-style sweep runs over
//!   the free pair.
//! * one free: two coordinates are constant; the winning line of boxes is
//!   crossed at unit length each.
//!
//! Segments no longer than [`LENGTH_EPS`] are grazing contact and dropped.

use crate::geometry::ParallelRay3D;
use crate::sparse::{IntersectionRecord, SparseRow};
use crate::tally::{CandidateTally, NoTally};
use crate::tolerance::{tie_break_floor, AXIS_EPS, LENGTH_EPS, RANGE_EPS};

/// Whether the box index rises with the coordinate (x) or falls (y, z).
#[derive(Debug, Clone, Copy)]
enum Orient {
    Ascending,
    Descending,
}

/// One grid axis as seen by a ray: coordinate = base + t * slope, index
/// windows per the axis orientation.
#[derive(Debug, Clone, Copy)]
struct AxisSweep {
    count: usize,
    half: f64,
    base: f64,
    slope: f64,
    inv: f64,
    orient: Orient,
}

impl AxisSweep {
    fn new(count: usize, base: f64, slope: f64, orient: Orient) -> Self {
        Self { count, half: count as f64 / 2.0, base, slope, inv: 1.0 / slope, orient }
    }

    /// Coordinate range attained over [t_lo, t_hi].
    fn coord_range(&self, t_lo: f64, t_hi: f64) -> (f64, f64) {
        let a = self.base + t_lo * self.slope;
        let b = self.base + t_hi * self.slope;
        if a <= b { (a, b) } else { (b, a) }
    }

    /// Indices whose box overlaps the open coordinate range (c_lo, c_hi),
    /// shrunk by [`RANGE_EPS`] and clamped to the grid. None when empty.
    fn window(&self, c_lo: f64, c_hi: f64) -> Option<(i64, i64)> {
        let (lower, upper) = match self.orient {
            Orient::Ascending => (c_lo + self.half - 1.0, c_hi + self.half),
            Orient::Descending => (self.half - 1.0 - c_hi, self.half - c_lo),
        };
        let first = ((lower + RANGE_EPS).ceil() as i64).max(0);
        let last = ((upper - RANGE_EPS).floor() as i64).min(self.count as i64 - 1);
        (first <= last).then_some((first, last))
    }

    /// Time interval during which the coordinate lies inside box m.
    fn t_range(&self, m: i64) -> (f64, f64) {
        let c = match self.orient {
            Orient::Ascending => m as f64 - self.half,
            Orient::Descending => self.half - m as f64 - 1.0,
        };
        let t_a = (c - self.base) * self.inv;
        let t_b = (c + 1.0 - self.base) * self.inv;
        if t_a <= t_b { (t_a, t_b) } else { (t_b, t_a) }
    }

    /// Index of the box containing the constant coordinate `base`, for a
    /// non-free axis. Boundary values go to the larger index; None when the
    /// winner falls outside the grid.
    fn winner(&self) -> Option<usize> {
        let m = match self.orient {
            Orient::Ascending => tie_break_floor(self.half + self.base),
            Orient::Descending => tie_break_floor(self.half - self.base),
        };
        (m >= 0 && m < self.count as i64).then(|| m as usize)
    }
}

/// Intersection row of `ray` on an nx-by-ny-by-nz unit grid centered at the
/// origin. Records are sorted by flat index (k * ny + j) * nx + i.
pub fn intersection_row_3d(ray: &ParallelRay3D, nx: usize, ny: usize, nz: usize) -> SparseRow {
    intersection_row_3d_counted(ray, nx, ny, nz, &mut NoTally)
}

/// As [`intersection_row_3d`], reporting every examined candidate box to
/// `tally`.
pub fn intersection_row_3d_counted(
    ray: &ParallelRay3D,
    nx: usize,
    ny: usize,
    nz: usize,
    tally: &mut impl CandidateTally,
) -> SparseRow {
    debug_assert!(
        nx >= 1
            && ny >= 1
            && nz >= 1
            && nx.checked_mul(ny).and_then(|p| p.checked_mul(nz)).is_some()
    );
    let (sin1, cos1) = ray.phi1().sin_cos();
    let (sin2, cos2) = ray.phi2().sin_cos();
    // canonical phi2 in [0, pi/2] keeps sin2 and cos2 nonnegative
    let x_free = cos1.abs() >= AXIS_EPS && cos2 >= AXIS_EPS;
    let y_free = sin1.abs() >= AXIS_EPS && cos2 >= AXIS_EPS;
    let z_free = sin2 >= AXIS_EPS;

    let (s1, s2) = (ray.s1(), ray.s2());
    let x0 = -s1 * sin1 - s2 * sin2 * cos1;
    let y0 = s1 * cos1 - s2 * sin2 * sin1;
    let z0 = s2 * cos2;

    let x = AxisSweep::new(nx, x0, cos2 * cos1, Orient::Ascending);
    let y = AxisSweep::new(ny, y0, cos2 * sin1, Orient::Descending);
    let z = AxisSweep::new(nz, z0, sin2, Orient::Descending);

    let mut records = Vec::new();
    let mut emit = |i: usize, j: usize, k: usize, length: f64| {
        records.push(IntersectionRecord { index: (k * ny + j) * nx + i, length });
    };

    match (x_free, y_free, z_free) {
        (true, true, true) => {
            for i in 0..nx {
                let (tx_lo, tx_hi) = x.t_range(i as i64);
                let (cy_lo, cy_hi) = y.coord_range(tx_lo, tx_hi);
                let Some((j_first, j_last)) = y.window(cy_lo, cy_hi) else { continue };
                for j in j_first..=j_last {
                    let (ty_lo, ty_hi) = y.t_range(j);
                    let m_lo = tx_lo.max(ty_lo);
                    let m_hi = tx_hi.min(ty_hi);
                    if !(m_hi - m_lo > LENGTH_EPS) {
                        continue;
                    }
                    let (cz_lo, cz_hi) = z.coord_range(m_lo, m_hi);
                    let Some((k_first, k_last)) = z.window(cz_lo, cz_hi) else { continue };
                    tally.record((k_last - k_first + 1) as usize);
                    for k in k_first..=k_last {
                        let (tz_lo, tz_hi) = z.t_range(k);
                        let enter = m_lo.max(tz_lo);
                        let exit = m_hi.min(tz_hi);
                        let length = exit - enter;
                        if length > LENGTH_EPS {
                            emit(i, j as usize, k as usize, length);
                        }
                    }
                }
            }
        }
        (true, true, false) => {
            if let Some(k) = z.winner() {
                for (i, j, length) in plane_sweep(&x, &y, tally) {
                    emit(i, j, k, length);
                }
            }
        }
        (true, false, true) => {
            if let Some(j) = y.winner() {
                for (i, k, length) in plane_sweep(&x, &z, tally) {
                    emit(i, j, k, length);
                }
            }
        }
        (false, true, true) => {
            if let Some(i) = x.winner() {
                for (j, k, length) in plane_sweep(&y, &z, tally) {
                    emit(i, j, k, length);
                }
            }
        }
        (true, false, false) => {
            if let (Some(j), Some(k)) = (y.winner(), z.winner()) {
                tally.record(nx);
                for i in 0..nx {
                    emit(i, j, k, 1.0);
                }
            }
        }
        (false, true, false) => {
            if let (Some(i), Some(k)) = (x.winner(), z.winner()) {
                tally.record(ny);
                for j in 0..ny {
                    emit(i, j, k, 1.0);
                }
            }
        }
        (false, false, true) => {
            if let (Some(i), Some(j)) = (x.winner(), y.winner()) {
                tally.record(nz);
                for k in 0..nz {
                    emit(i, j, k, 1.0);
                }
            }
        }
        (false, false, false) => {
            unreachable!("a unit direction cannot be epsilon-close to all three axis planes")
        }
    }

    SparseRow::from_unsorted(records).expect("kernel emits unique positive records")
}

/// 2D-style sweep over a free axis pair: outer boxes mu, inner window from
/// the coordinate range of the outer time interval. Returns (mu, mv, length)
/// triples with length above [`LENGTH_EPS`].
fn plane_sweep(
    u: &AxisSweep,
    v: &AxisSweep,
    tally: &mut impl CandidateTally,
) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for mu in 0..u.count {
        let (tu_lo, tu_hi) = u.t_range(mu as i64);
        let (cv_lo, cv_hi) = v.coord_range(tu_lo, tu_hi);
        let Some((v_first, v_last)) = v.window(cv_lo, cv_hi) else { continue };
        tally.record((v_last - v_first + 1) as usize);
        for mv in v_first..=v_last {
            let (tv_lo, tv_hi) = v.t_range(mv);
            let enter = tu_lo.max(tv_lo);
            let exit = tu_hi.min(tv_hi);
            let length = exit - enter;
            if length > LENGTH_EPS {
                out.push((mu, mv as usize, length));
            }
        }
    }
    out
}
