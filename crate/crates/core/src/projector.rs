//! Forward projection, backprojection, and matrix assembly.
//!
//! A [`RaySet`] couples an [`ImageGrid`] with the beam specs of every ray
//! to measure. Each spec resolves to a canonical unit-grid ray plus the
//! physical length factor ([`resolve_ray`]); the kernels produce the unit
//! row and the factor rescales it, so all emitted lengths are in physical
//! units.
//!
//! Rows are computed in parallel with deterministic placement: forward
//! projection writes each ray's value into its own slot, and backprojection
//! computes rows in parallel but scatters them sequentially in ray order.
//! Results are therefore bit-identical for every thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    fan_equiangular_to_parallel, fan_equispaced_to_parallel, helical_equiangular_to_parallel,
    helical_equispaced_to_parallel, BeamSpec, ParallelRay2D, ParallelRay3D,
};
use crate::grid::ImageGrid;
use crate::intersect2d::intersection_row_2d_counted;
use crate::intersect3d::intersection_row_3d_counted;
use crate::sparse::SparseRow;
use crate::tally::{CandidateTally, NoTally};

/// A beam spec resolved onto the canonical unit grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CanonicalRay {
    D2(ParallelRay2D),
    D3(ParallelRay3D),
}

/// Resolves a beam spec against a grid: validates it, reparameterizes
/// divergent geometries to parallel form, canonicalizes, and normalizes to
/// the unit grid. Returns the unit ray and the factor that converts unit
/// intersection lengths back to physical ones.
pub fn resolve_ray(spec: &BeamSpec, grid: &ImageGrid) -> Result<(CanonicalRay, f64)> {
    spec.validate()?;
    if spec.dim() != grid.dim() {
        return Err(Error::Mismatch(format!(
            "{}D beam spec against a {}D grid",
            spec.dim(),
            grid.dim()
        )));
    }
    match *spec {
        BeamSpec::Parallel2D { s, phi } => resolve_2d(grid, s, phi),
        BeamSpec::FanEquiangular { d, alpha, gamma, .. } => {
            let (s, phi) = fan_equiangular_to_parallel(d, alpha, gamma)?;
            resolve_2d(grid, s, phi)
        }
        BeamSpec::FanEquispaced { d, alpha, t, .. } => {
            let (s, phi) = fan_equispaced_to_parallel(d, alpha, t)?;
            resolve_2d(grid, s, phi)
        }
        BeamSpec::Parallel3D { s1, s2, phi1, phi2 } => resolve_3d(grid, s1, s2, phi1, phi2),
        BeamSpec::ConeEquiangular { d, phi1p, alpha, beta } => {
            let (s1, s2, p1, p2) = helical_equiangular_to_parallel(d, phi1p, alpha, beta, 0.0)?;
            resolve_3d(grid, s1, s2, p1, p2)
        }
        BeamSpec::ConeEquispaced { d, phi1p, t, h } => {
            let (s1, s2, p1, p2) = helical_equispaced_to_parallel(d, phi1p, t, h, 0.0)?;
            resolve_3d(grid, s1, s2, p1, p2)
        }
        BeamSpec::HelicalEquiangular { d, phi1p, alpha, beta, h_offset } => {
            let (s1, s2, p1, p2) = helical_equiangular_to_parallel(d, phi1p, alpha, beta, h_offset)?;
            resolve_3d(grid, s1, s2, p1, p2)
        }
        BeamSpec::HelicalEquispaced { d, phi1p, t, h, h_offset } => {
            let (s1, s2, p1, p2) = helical_equispaced_to_parallel(d, phi1p, t, h, h_offset)?;
            resolve_3d(grid, s1, s2, p1, p2)
        }
    }
}

fn resolve_2d(grid: &ImageGrid, s: f64, phi: f64) -> Result<(CanonicalRay, f64)> {
    let physical = ParallelRay2D::new(s, phi)?;
    let (unit, factor) = grid.normalize_ray_2d(&physical)?;
    Ok((CanonicalRay::D2(unit), factor))
}

fn resolve_3d(grid: &ImageGrid, s1: f64, s2: f64, phi1: f64, phi2: f64) -> Result<(CanonicalRay, f64)> {
    let physical = ParallelRay3D::new(s1, s2, phi1, phi2)?;
    let (unit, factor) = grid.normalize_ray_3d(&physical)?;
    Ok((CanonicalRay::D3(unit), factor))
}

/// Intersection row of one beam spec, with physical lengths.
pub fn compute_row(spec: &BeamSpec, grid: &ImageGrid) -> Result<SparseRow> {
    compute_row_counted(spec, grid, &mut NoTally)
}

/// As [`compute_row`], reporting examined candidates to `tally`.
pub fn compute_row_counted(
    spec: &BeamSpec,
    grid: &ImageGrid,
    tally: &mut impl CandidateTally,
) -> Result<SparseRow> {
    let (ray, factor) = resolve_ray(spec, grid)?;
    let unit = match ray {
        CanonicalRay::D2(r) => intersection_row_2d_counted(&r, grid.nx(), grid.ny(), tally),
        CanonicalRay::D3(r) => {
            intersection_row_3d_counted(&r, grid.nx(), grid.ny(), grid.nz().unwrap(), tally)
        }
    };
    Ok(unit.scaled(factor))
}

/// A dense image on a grid, values in flat-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    grid: ImageGrid,
    data: Vec<f64>,
}

impl Image {
    /// Validates that `data` has one finite value per box.
    pub fn new(grid: ImageGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.unit_count() {
            return Err(Error::Mismatch(format!(
                "image has {} values but the grid has {} boxes",
                data.len(),
                grid.unit_count()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Mismatch(format!(
                "image value at flat index {pos} is not finite"
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: ImageGrid) -> Self {
        let n = grid.unit_count();
        Self { grid, data: vec![0.0; n] }
    }

    pub fn grid(&self) -> &ImageGrid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }
}

/// A grid plus the beam specs to project along, one matrix row per spec.
#[derive(Debug, Clone, PartialEq)]
pub struct RaySet {
    grid: ImageGrid,
    specs: Vec<BeamSpec>,
}

impl RaySet {
    /// Validates every spec and its dimensionality against the grid.
    pub fn new(grid: ImageGrid, specs: Vec<BeamSpec>) -> Result<Self> {
        for (pos, spec) in specs.iter().enumerate() {
            spec.validate()
                .map_err(|e| Error::Beam(format!("ray {pos}: {e}")))?;
            if spec.dim() != grid.dim() {
                return Err(Error::Mismatch(format!(
                    "ray {pos}: {}D beam spec against a {}D grid",
                    spec.dim(),
                    grid.dim()
                )));
            }
        }
        Ok(Self { grid, specs })
    }

    pub fn grid(&self) -> &ImageGrid {
        &self.grid
    }

    pub fn specs(&self) -> &[BeamSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    /// All intersection rows, computed in parallel, in ray order.
    pub fn rows(&self) -> Result<Vec<SparseRow>> {
        self.specs
            .par_iter()
            .map(|spec| compute_row(spec, &self.grid))
            .collect()
    }

    /// Line integrals of `image` along every ray.
    pub fn forward_project(&self, image: &Image) -> Result<Vec<f64>> {
        if image.grid() != &self.grid {
            return Err(Error::Mismatch(
                "image grid differs from the ray set's grid".into(),
            ));
        }
        self.specs
            .par_iter()
            .map(|spec| compute_row(spec, &self.grid).map(|row| row.dot(image.data())))
            .collect()
    }

    /// Adjoint of [`forward_project`]: accumulates `values[r] * length` into
    /// every box crossed by ray r. Rows are computed in parallel but applied
    /// in ray order, so the result does not depend on the thread count.
    pub fn back_project(&self, values: &[f64]) -> Result<Image> {
        if values.len() != self.specs.len() {
            return Err(Error::Mismatch(format!(
                "{} values for {} rays",
                values.len(),
                self.specs.len()
            )));
        }
        let rows = self.rows()?;
        let mut image = Image::zeros(self.grid.clone());
        let data = image.data_mut();
        for (row, &v) in rows.iter().zip(values) {
            for rec in row.records() {
                data[rec.index] += rec.length * v;
            }
        }
        Ok(image)
    }

    /// The explicit sparse matrix: row r is ray r, column c is flat box c.
    pub fn assemble_matrix(&self) -> Result<ProjectionMatrix> {
        ProjectionMatrix::new(self.grid.unit_count(), self.rows()?)
    }
}

/// Explicit sparse projection matrix in row-major sparse form.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    n_cols: usize,
    rows: Vec<SparseRow>,
}

impl ProjectionMatrix {
    /// Validates that every record's column index is inside the matrix.
    pub fn new(n_cols: usize, rows: Vec<SparseRow>) -> Result<Self> {
        for (r, row) in rows.iter().enumerate() {
            if let Some(rec) = row.records().iter().find(|rec| rec.index >= n_cols) {
                return Err(Error::Bounds(format!(
                    "row {r} references column {} of a {n_cols}-column matrix",
                    rec.index
                )));
            }
        }
        Ok(Self { n_cols, rows })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Total number of stored entries.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &SparseRow {
        &self.rows[r]
    }

    /// Matrix-vector product.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::Mismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.n_cols
            )));
        }
        Ok(self.rows.par_iter().map(|row| row.dot(x)).collect())
    }

    /// Transposed product, applied sequentially in row order.
    pub fn transpose_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows.len() {
            return Err(Error::Mismatch(format!(
                "vector of length {} against {} rows",
                y.len(),
                self.rows.len()
            )));
        }
        let mut out = vec![0.0; self.n_cols];
        for (row, &v) in self.rows.iter().zip(y) {
            for rec in row.records() {
                out[rec.index] += rec.length * v;
            }
        }
        Ok(out)
    }
}
