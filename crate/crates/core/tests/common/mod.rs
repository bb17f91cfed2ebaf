//! Shared randomized generators for the integration suites.
//!
//! Every suite seeds its own ChaCha stream, so the cases are reproducible
//! while still covering unit and physical grids, all beam families, and
//! rows that hit, graze, or miss the domain.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use rand::Rng;
use xrt_core::geometry::BeamSpec;
use xrt_core::grid::ImageGrid;
use xrt_core::projector::{Image, ProjectionMatrix, RaySet};
use xrt_core::sparse::{IntersectionRecord, SparseRow};

/// Random 2D grid, biased toward the canonical unit layout.
pub fn random_grid_2d(rng: &mut impl Rng, max_n: usize) -> ImageGrid {
    let nx = rng.gen_range(1..=max_n);
    let ny = rng.gen_range(1..=max_n);
    if rng.gen_bool(0.5) {
        ImageGrid::unit_2d(nx, ny).unwrap()
    } else {
        let scale = rng.gen_range(0.25..4.0);
        let center = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        ImageGrid::new_2d(nx, ny, scale, center).unwrap()
    }
}

/// Random 3D grid, biased toward the canonical unit layout.
pub fn random_grid_3d(rng: &mut impl Rng, max_n: usize) -> ImageGrid {
    let nx = rng.gen_range(1..=max_n);
    let ny = rng.gen_range(1..=max_n);
    let nz = rng.gen_range(1..=max_n);
    if rng.gen_bool(0.5) {
        ImageGrid::unit_3d(nx, ny, nz).unwrap()
    } else {
        let scale = rng.gen_range(0.25..4.0);
        let center =
            [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        ImageGrid::new_3d(nx, ny, nz, scale, center).unwrap()
    }
}

/// Radius of a ball around the origin containing the whole grid domain.
pub fn grid_reach(grid: &ImageGrid) -> f64 {
    let c = grid.center();
    let nz = grid.nz().unwrap_or(1);
    let half = [
        grid.nx() as f64 / 2.0 * grid.scale(),
        grid.ny() as f64 / 2.0 * grid.scale(),
        nz as f64 / 2.0 * grid.scale(),
    ];
    let center_norm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let half_diag = (half[0] * half[0] + half[1] * half[1] + half[2] * half[2]).sqrt();
    center_norm + half_diag
}

/// Random 2D beam over any family; most rays cross the grid, some miss.
pub fn random_beam_2d(rng: &mut impl Rng, grid: &ImageGrid) -> BeamSpec {
    let reach = grid_reach(grid) * 1.2 + 0.5;
    match rng.gen_range(0..3) {
        0 => BeamSpec::Parallel2D {
            s: rng.gen_range(-reach..reach),
            phi: rng.gen_range(-TAU..TAU),
        },
        1 => {
            let d = rng.gen_range(1.5 * reach..5.0 * reach);
            let lim = (reach / d).asin();
            BeamSpec::FanEquiangular {
                d,
                alpha: rng.gen_range(0.0..TAU),
                gamma: rng.gen_range(-lim..lim),
                gamma_max: None,
            }
        }
        _ => {
            let d = rng.gen_range(1.5 * reach..5.0 * reach);
            let lim = reach * 1.2;
            BeamSpec::FanEquispaced {
                d,
                alpha: rng.gen_range(0.0..TAU),
                t: rng.gen_range(-lim..lim),
                t_max: None,
            }
        }
    }
}

/// Random 3D beam over any family; most rays cross the grid, some miss.
pub fn random_beam_3d(rng: &mut impl Rng, grid: &ImageGrid) -> BeamSpec {
    let reach = grid_reach(grid) * 1.2 + 0.5;
    match rng.gen_range(0..5) {
        0 => BeamSpec::Parallel3D {
            s1: rng.gen_range(-reach..reach),
            s2: rng.gen_range(-reach..reach),
            phi1: rng.gen_range(-TAU..TAU),
            phi2: rng.gen_range(-PI..PI),
        },
        1 => {
            let d = rng.gen_range(1.5 * reach..5.0 * reach);
            let lim = (reach / d).asin();
            BeamSpec::ConeEquiangular {
                d,
                phi1p: rng.gen_range(0.0..TAU),
                alpha: rng.gen_range(-lim..lim),
                beta: rng.gen_range(-lim..lim),
            }
        }
        2 => {
            let d = rng.gen_range(1.5 * reach..5.0 * reach);
            let lim = reach * 1.2;
            BeamSpec::ConeEquispaced {
                d,
                phi1p: rng.gen_range(0.0..TAU),
                t: rng.gen_range(-lim..lim),
                h: rng.gen_range(-lim..lim),
            }
        }
        3 => {
            let d = rng.gen_range(1.5 * reach..5.0 * reach);
            let lim = (reach / d).asin();
            BeamSpec::HelicalEquiangular {
                d,
                phi1p: rng.gen_range(0.0..TAU),
                alpha: rng.gen_range(-lim..lim),
                beta: rng.gen_range(-lim..lim),
                h_offset: rng.gen_range(-reach..reach),
            }
        }
        _ => {
            let d = rng.gen_range(1.5 * reach..5.0 * reach);
            let lim = reach * 1.2;
            BeamSpec::HelicalEquispaced {
                d,
                phi1p: rng.gen_range(0.0..TAU),
                t: rng.gen_range(-lim..lim),
                h: rng.gen_range(-lim..lim),
                h_offset: rng.gen_range(-reach..reach),
            }
        }
    }
}

/// Random ray set (1 to `max_rays` beams) over a random grid of either
/// dimensionality.
pub fn random_rayset(rng: &mut impl Rng, max_n: usize, max_rays: usize) -> RaySet {
    let three_d = rng.gen_bool(0.5);
    let grid =
        if three_d { random_grid_3d(rng, max_n.min(6)) } else { random_grid_2d(rng, max_n) };
    let count = rng.gen_range(1..=max_rays);
    let specs = (0..count)
        .map(|_| {
            if three_d { random_beam_3d(rng, &grid) } else { random_beam_2d(rng, &grid) }
        })
        .collect();
    RaySet::new(grid, specs).unwrap()
}

/// Random image on the grid with values in (-1, 1).
pub fn random_image(rng: &mut impl Rng, grid: &ImageGrid) -> Image {
    let data = (0..grid.unit_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Image::new(grid.clone(), data).unwrap()
}

/// Random vector with values in (-1, 1).
pub fn random_vector(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Synthetic sparse matrix: random row counts, random strictly increasing
/// column subsets, positive lengths. Exercises the serialization format
/// more broadly than projector output (empty rows, dense rows, tiny and
/// large values).
pub fn random_matrix(rng: &mut impl Rng) -> ProjectionMatrix {
    let n_cols = rng.gen_range(1..=40usize);
    let n_rows = rng.gen_range(0..=24usize);
    let rows = (0..n_rows)
        .map(|_| {
            let nnz = rng.gen_range(0..=n_cols.min(8));
            let mut cols: Vec<usize> = (0..n_cols).collect();
            for pick in 0..nnz {
                let other = rng.gen_range(pick..n_cols);
                cols.swap(pick, other);
            }
            let records = cols[..nnz]
                .iter()
                .map(|&index| IntersectionRecord {
                    index,
                    length: rng.gen_range(1e-6..2.0),
                })
                .collect();
            SparseRow::from_unsorted(records).unwrap()
        })
        .collect();
    ProjectionMatrix::new(n_cols, rows).unwrap()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
