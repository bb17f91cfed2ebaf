//! Reference intersection rows by exhaustive box clipping.
//!
//! Clips the ray against every box of the grid with the classic slab
//! method, in O(nx * ny) / O(nx * ny * nz) time. This is deliberately
//! independent of the fast kernels: it never windows candidates and shares
//! nothing with them except the tolerance constants, so agreement between
//! the two is meaningful evidence.
//!
//! Direction components whose trigonometric factors fall inside
//! [`AXIS_EPS`] are snapped to exactly zero before clipping (mirroring the
//! kernels' axis classification); otherwise sin(pi/2) style residue around
//! 1e-16 would split an axis-parallel ray across two adjacent slabs. A zero
//! component turns that axis into an inclusive membership test; the
//! constant coordinate along such an axis is likewise snapped onto the
//! boundary lattice when it lies within [`TIE_EPS`] of it (the same
//! residue puts it ~1e-17 off the boundary the tie rule considers it on),
//! which keeps BOTH slabs of an on-boundary ray. [`resolve_ties_2d`] /
//! [`resolve_ties_3d`] then filter such a row to the winning slab (larger
//! index, as the kernels do), dropping everything when the winner falls
//! outside the grid.

use crate::error::{Error, Result};
use crate::geometry::{ParallelRay2D, ParallelRay3D};
use crate::grid::ImageGrid;
use crate::sparse::{IntersectionRecord, SparseRow};
use crate::tolerance::{tie_break_floor, AXIS_EPS, LENGTH_EPS, TIE_EPS};

/// Slab clip of the line base + t * dir against one axis-aligned box.
/// Zero direction components become inclusive membership tests.
fn clip_box<const D: usize>(
    base: [f64; D],
    dir: [f64; D],
    lo: [f64; D],
    hi: [f64; D],
) -> Option<(f64, f64)> {
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for a in 0..D {
        if dir[a] == 0.0 {
            if !(lo[a] <= base[a] && base[a] <= hi[a]) {
                return None;
            }
        } else {
            let t1 = (lo[a] - base[a]) / dir[a];
            let t2 = (hi[a] - base[a]) / dir[a];
            let (t1, t2) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            t_lo = t_lo.max(t1);
            t_hi = t_hi.min(t2);
        }
    }
    (t_hi > t_lo).then_some((t_lo, t_hi))
}

/// Snapped direction and raw base point of a canonical 2D ray.
fn frame_2d(ray: &ParallelRay2D) -> ([f64; 2], [f64; 2]) {
    let (sin_phi, cos_phi) = ray.phi().sin_cos();
    let dir = if sin_phi.abs() < AXIS_EPS {
        [cos_phi, 0.0]
    } else if cos_phi.abs() < AXIS_EPS {
        [0.0, sin_phi]
    } else {
        [cos_phi, sin_phi]
    };
    (dir, [-ray.s() * sin_phi, ray.s() * cos_phi])
}

/// Snapped direction and raw base point of a canonical 3D ray.
fn frame_3d(ray: &ParallelRay3D) -> ([f64; 3], [f64; 3]) {
    let (sin1, cos1) = ray.phi1().sin_cos();
    let (sin2, cos2) = ray.phi2().sin_cos();
    let x_free = cos1.abs() >= AXIS_EPS && cos2 >= AXIS_EPS;
    let y_free = sin1.abs() >= AXIS_EPS && cos2 >= AXIS_EPS;
    let z_free = sin2 >= AXIS_EPS;
    let dir = [
        if x_free { cos2 * cos1 } else { 0.0 },
        if y_free { cos2 * sin1 } else { 0.0 },
        if z_free { sin2 } else { 0.0 },
    ];
    let (s1, s2) = (ray.s1(), ray.s2());
    let base = [
        -s1 * sin1 - s2 * sin2 * cos1,
        s1 * cos1 - s2 * sin2 * sin1,
        s2 * cos2,
    ];
    (dir, base)
}

/// Moves a constant-axis coordinate onto the unit boundary lattice
/// {m - half : m integer} when it lies within the tie tolerance of it.
/// half and the rounded value are both small multiples of 0.5, so the
/// snapped result is exact and compares equal to the box bounds.
fn snap_constant(base: f64, half: f64) -> f64 {
    let v = half + base;
    let r = v.round();
    if (v - r).abs() <= TIE_EPS { r - half } else { base }
}

/// Grid-aware frame: constant-axis base coordinates snapped per
/// [`snap_constant`].
fn grid_frame_2d(ray: &ParallelRay2D, nx: usize, ny: usize) -> ([f64; 2], [f64; 2]) {
    let (dir, mut base) = frame_2d(ray);
    let half = [nx as f64 / 2.0, ny as f64 / 2.0];
    for a in 0..2 {
        if dir[a] == 0.0 {
            base[a] = snap_constant(base[a], half[a]);
        }
    }
    (dir, base)
}

/// Grid-aware frame: constant-axis base coordinates snapped per
/// [`snap_constant`].
fn grid_frame_3d(ray: &ParallelRay3D, nx: usize, ny: usize, nz: usize) -> ([f64; 3], [f64; 3]) {
    let (dir, mut base) = frame_3d(ray);
    let half = [nx as f64 / 2.0, ny as f64 / 2.0, nz as f64 / 2.0];
    for a in 0..3 {
        if dir[a] == 0.0 {
            base[a] = snap_constant(base[a], half[a]);
        }
    }
    (dir, base)
}

/// Exhaustive intersection row on the unit grid, ties kept.
pub fn oracle_row_2d(ray: &ParallelRay2D, nx: usize, ny: usize) -> SparseRow {
    let (dir, base) = grid_frame_2d(ray, nx, ny);
    let half_x = nx as f64 / 2.0;
    let half_y = ny as f64 / 2.0;
    let mut records = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let lo = [i as f64 - half_x, half_y - j as f64 - 1.0];
            let hi = [i as f64 - half_x + 1.0, half_y - j as f64];
            if let Some((t_lo, t_hi)) = clip_box(base, dir, lo, hi) {
                let length = t_hi - t_lo;
                if length > LENGTH_EPS {
                    records.push(IntersectionRecord { index: j * nx + i, length });
                }
            }
        }
    }
    SparseRow::from_unsorted(records).expect("oracle emits unique positive records")
}

/// Exhaustive intersection row on the unit grid, ties kept.
pub fn oracle_row_3d(ray: &ParallelRay3D, nx: usize, ny: usize, nz: usize) -> SparseRow {
    let (dir, base) = grid_frame_3d(ray, nx, ny, nz);
    let half_x = nx as f64 / 2.0;
    let half_y = ny as f64 / 2.0;
    let half_z = nz as f64 / 2.0;
    let mut records = Vec::new();
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let lo = [
                    i as f64 - half_x,
                    half_y - j as f64 - 1.0,
                    half_z - k as f64 - 1.0,
                ];
                let hi = [
                    i as f64 - half_x + 1.0,
                    half_y - j as f64,
                    half_z - k as f64,
                ];
                if let Some((t_lo, t_hi)) = clip_box(base, dir, lo, hi) {
                    let length = t_hi - t_lo;
                    if length > LENGTH_EPS {
                        records.push(IntersectionRecord { index: (k * ny + j) * nx + i, length });
                    }
                }
            }
        }
    }
    SparseRow::from_unsorted(records).expect("oracle emits unique positive records")
}

/// Filters an oracle row to the winning slab along each constant axis:
/// the box with the larger index when the constant coordinate sits on a
/// boundary. Everything goes when a winner lies outside the grid.
pub fn resolve_ties_2d(row: &SparseRow, ray: &ParallelRay2D, nx: usize, ny: usize) -> SparseRow {
    let (dir, base) = grid_frame_2d(ray, nx, ny);
    let keep_i: Option<i64> = (dir[0] == 0.0).then(|| tie_break_floor(nx as f64 / 2.0 + base[0]));
    let keep_j: Option<i64> = (dir[1] == 0.0).then(|| tie_break_floor(ny as f64 / 2.0 - base[1]));
    let records = row
        .records()
        .iter()
        .filter(|r| {
            let i = (r.index % nx) as i64;
            let j = (r.index / nx) as i64;
            keep_i.map_or(true, |w| i == w) && keep_j.map_or(true, |w| j == w)
        })
        .copied()
        .collect();
    SparseRow::from_unsorted(records).expect("filtering preserves validity")
}

/// 3D analogue of [`resolve_ties_2d`].
pub fn resolve_ties_3d(
    row: &SparseRow,
    ray: &ParallelRay3D,
    nx: usize,
    ny: usize,
    nz: usize,
) -> SparseRow {
    let (dir, base) = grid_frame_3d(ray, nx, ny, nz);
    let keep_i: Option<i64> = (dir[0] == 0.0).then(|| tie_break_floor(nx as f64 / 2.0 + base[0]));
    let keep_j: Option<i64> = (dir[1] == 0.0).then(|| tie_break_floor(ny as f64 / 2.0 - base[1]));
    let keep_k: Option<i64> = (dir[2] == 0.0).then(|| tie_break_floor(nz as f64 / 2.0 - base[2]));
    let records = row
        .records()
        .iter()
        .filter(|r| {
            let i = (r.index % nx) as i64;
            let j = ((r.index / nx) % ny) as i64;
            let k = (r.index / (nx * ny)) as i64;
            keep_i.map_or(true, |w| i == w)
                && keep_j.map_or(true, |w| j == w)
                && keep_k.map_or(true, |w| k == w)
        })
        .copied()
        .collect();
    SparseRow::from_unsorted(records).expect("filtering preserves validity")
}

/// Physical-lattice analogue of [`snap_constant`]: boundaries sit at
/// (m - half) * scale + c, written exactly like the box-bound expressions
/// so a snapped coordinate compares equal to them.
fn snap_constant_physical(base: f64, half: f64, scale: f64, c: f64) -> f64 {
    let v = half + (base - c) / scale;
    let r = v.round();
    if (v - r).abs() <= TIE_EPS { (r - half) * scale + c } else { base }
}

/// Exhaustive row for a ray given in physical coordinates, clipping the
/// physical boxes (unit boxes scaled and shifted by the grid) directly.
/// Ties resolve to the larger index as everywhere else.
pub fn oracle_row_2d_physical(ray: &ParallelRay2D, grid: &ImageGrid) -> Result<SparseRow> {
    if grid.dim() != 2 {
        return Err(Error::Mismatch(format!("expected a 2D grid, got {}D", grid.dim())));
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let scale = grid.scale();
    let [cx, cy, _] = grid.center();
    let (dir, mut base) = frame_2d(ray);
    let half_x = nx as f64 / 2.0;
    let half_y = ny as f64 / 2.0;
    if dir[0] == 0.0 {
        base[0] = snap_constant_physical(base[0], half_x, scale, cx);
    }
    if dir[1] == 0.0 {
        base[1] = snap_constant_physical(base[1], half_y, scale, cy);
    }
    let keep_i: Option<i64> =
        (dir[0] == 0.0).then(|| tie_break_floor(half_x + (base[0] - cx) / scale));
    let keep_j: Option<i64> =
        (dir[1] == 0.0).then(|| tie_break_floor(half_y - (base[1] - cy) / scale));
    let mut records = Vec::new();
    for j in 0..ny {
        if let Some(w) = keep_j {
            if w != j as i64 {
                continue;
            }
        }
        for i in 0..nx {
            if let Some(w) = keep_i {
                if w != i as i64 {
                    continue;
                }
            }
            let lo = [
                (i as f64 - half_x) * scale + cx,
                (half_y - j as f64 - 1.0) * scale + cy,
            ];
            let hi = [
                (i as f64 - half_x + 1.0) * scale + cx,
                (half_y - j as f64) * scale + cy,
            ];
            if let Some((t_lo, t_hi)) = clip_box(base, dir, lo, hi) {
                let length = t_hi - t_lo;
                if length > LENGTH_EPS * scale {
                    records.push(IntersectionRecord { index: j * nx + i, length });
                }
            }
        }
    }
    SparseRow::from_unsorted(records).map_err(|e| Error::Bounds(e.to_string()))
}

/// 3D analogue of [`oracle_row_2d_physical`].
pub fn oracle_row_3d_physical(ray: &ParallelRay3D, grid: &ImageGrid) -> Result<SparseRow> {
    if grid.dim() != 3 {
        return Err(Error::Mismatch(format!("expected a 3D grid, got {}D", grid.dim())));
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let nz = grid.nz().unwrap();
    let scale = grid.scale();
    let [cx, cy, cz] = grid.center();
    let (dir, mut base) = frame_3d(ray);
    let half_x = nx as f64 / 2.0;
    let half_y = ny as f64 / 2.0;
    let half_z = nz as f64 / 2.0;
    if dir[0] == 0.0 {
        base[0] = snap_constant_physical(base[0], half_x, scale, cx);
    }
    if dir[1] == 0.0 {
        base[1] = snap_constant_physical(base[1], half_y, scale, cy);
    }
    if dir[2] == 0.0 {
        base[2] = snap_constant_physical(base[2], half_z, scale, cz);
    }
    let keep_i: Option<i64> =
        (dir[0] == 0.0).then(|| tie_break_floor(half_x + (base[0] - cx) / scale));
    let keep_j: Option<i64> =
        (dir[1] == 0.0).then(|| tie_break_floor(half_y - (base[1] - cy) / scale));
    let keep_k: Option<i64> =
        (dir[2] == 0.0).then(|| tie_break_floor(half_z - (base[2] - cz) / scale));
    let mut records = Vec::new();
    for k in 0..nz {
        if let Some(w) = keep_k {
            if w != k as i64 {
                continue;
            }
        }
        for j in 0..ny {
            if let Some(w) = keep_j {
                if w != j as i64 {
                    continue;
                }
            }
            for i in 0..nx {
                if let Some(w) = keep_i {
                    if w != i as i64 {
                        continue;
                    }
                }
                let lo = [
                    (i as f64 - half_x) * scale + cx,
                    (half_y - j as f64 - 1.0) * scale + cy,
                    (half_z - k as f64 - 1.0) * scale + cz,
                ];
                let hi = [
                    (i as f64 - half_x + 1.0) * scale + cx,
                    (half_y - j as f64) * scale + cy,
                    (half_z - k as f64) * scale + cz,
                ];
                if let Some((t_lo, t_hi)) = clip_box(base, dir, lo, hi) {
                    let length = t_hi - t_lo;
                    if length > LENGTH_EPS * scale {
                        records.push(IntersectionRecord { index: (k * ny + j) * nx + i, length });
                    }
                }
            }
        }
    }
    SparseRow::from_unsorted(records).map_err(|e| Error::Bounds(e.to_string()))
}

/// Chord length of the ray through the whole grid domain
/// [-nx/2, nx/2] x [-ny/2, ny/2].
pub fn domain_chord_2d(ray: &ParallelRay2D, nx: usize, ny: usize) -> f64 {
    let (dir, base) = frame_2d(ray);
    let half_x = nx as f64 / 2.0;
    let half_y = ny as f64 / 2.0;
    match clip_box(base, dir, [-half_x, -half_y], [half_x, half_y]) {
        Some((t_lo, t_hi)) => t_hi - t_lo,
        None => 0.0,
    }
}

/// Chord length of the ray through the whole 3D grid domain.
pub fn domain_chord_3d(ray: &ParallelRay3D, nx: usize, ny: usize, nz: usize) -> f64 {
    let (dir, base) = frame_3d(ray);
    let half_x = nx as f64 / 2.0;
    let half_y = ny as f64 / 2.0;
    let half_z = nz as f64 / 2.0;
    match clip_box(base, dir, [-half_x, -half_y, -half_z], [half_x, half_y, half_z]) {
        Some((t_lo, t_hi)) => t_hi - t_lo,
        None => 0.0,
    }
}
