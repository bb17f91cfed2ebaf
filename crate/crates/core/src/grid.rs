//! Imaging coordinate system: pixel/voxel index conventions and the
//! scale/center normalization onto the canonical grid.
//!
//! The canonical grid is unit-scale and origin-centered. Pixel (j, i) covers
//! x in [i - nx/2, i - nx/2 + 1] and y in [ny/2 - j - 1, ny/2 - j]; voxel
//! (k, j, i) additionally covers z in [nz/2 - k - 1, nz/2 - k]. So i counts
//! columns left to right, j counts rows top (largest y) to bottom, k counts
//! slices top (largest z) to bottom. A physical grid places units of side
//! `scale` with the box's geometric center at `center`.

use crate::error::{Error, Result};
use crate::geometry::{ParallelRay2D, ParallelRay3D};

/// Largest per-axis unit count: keeps every index exactly representable in
/// f64 throughout the interval arithmetic.
const MAX_AXIS: usize = 1 << 52;

/// Pixel index: row j (top to bottom), column i (left to right).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitIndex2D {
    pub j: usize,
    pub i: usize,
}

/// Voxel index: slice k (top to bottom), row j, column i.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitIndex3D {
    pub k: usize,
    pub j: usize,
    pub i: usize,
}

/// Pixel or voxel grid with uniform unit side length `scale` and physical
/// box center `center` (z component unused in 2D).
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    nx: usize,
    ny: usize,
    nz: Option<usize>,
    scale: f64,
    center: [f64; 3],
}

impl ImageGrid {
    /// 2D grid with explicit scale and center.
    pub fn new_2d(nx: usize, ny: usize, scale: f64, center: [f64; 2]) -> Result<Self> {
        Self::build(nx, ny, None, scale, [center[0], center[1], 0.0])
    }

    /// 3D grid with explicit scale and center.
    pub fn new_3d(nx: usize, ny: usize, nz: usize, scale: f64, center: [f64; 3]) -> Result<Self> {
        Self::build(nx, ny, Some(nz), scale, center)
    }

    /// Canonical 2D grid: unit scale, centered at the origin.
    pub fn unit_2d(nx: usize, ny: usize) -> Result<Self> {
        Self::new_2d(nx, ny, 1.0, [0.0, 0.0])
    }

    /// Canonical 3D grid: unit scale, centered at the origin.
    pub fn unit_3d(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        Self::new_3d(nx, ny, nz, 1.0, [0.0, 0.0, 0.0])
    }

    fn build(
        nx: usize,
        ny: usize,
        nz: Option<usize>,
        scale: f64,
        center: [f64; 3],
    ) -> Result<Self> {
        let counts = [nx, ny, nz.unwrap_or(1)];
        if counts.iter().any(|&n| n == 0) {
            return Err(Error::Grid("axis counts must be at least 1".into()));
        }
        if counts.iter().any(|&n| n > MAX_AXIS) {
            return Err(Error::Grid(format!("axis count exceeds {MAX_AXIS}")));
        }
        nx.checked_mul(ny)
            .and_then(|p| p.checked_mul(nz.unwrap_or(1)))
            .ok_or_else(|| Error::Grid("total unit count overflows".into()))?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Grid(format!("scale must be finite and positive, got {scale}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Grid("center coordinates must be finite".into()));
        }
        Ok(Self { nx, ny, nz, scale, center })
    }

    /// 2 or 3.
    pub fn dim(&self) -> usize {
        if self.nz.is_some() {
            3
        } else {
            2
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// None for 2D grids.
    pub fn nz(&self) -> Option<usize> {
        self.nz
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Physical center of the grid box; z component is 0 for 2D grids.
    pub fn center(&self) -> [f64; 3] {
        self.center
    }

    /// Total number of pixels/voxels.
    pub fn unit_count(&self) -> usize {
        self.nx * self.ny * self.nz.unwrap_or(1)
    }

    fn check_2d(&self) -> Result<()> {
        if self.dim() != 2 {
            return Err(Error::Mismatch("expected a 2D grid".into()));
        }
        Ok(())
    }

    fn check_3d(&self) -> Result<usize> {
        self.nz
            .ok_or_else(|| Error::Mismatch("expected a 3D grid".into()))
    }

    /// Flat index I = j*nx + i.
    pub fn flat_index_2d(&self, idx: UnitIndex2D) -> Result<usize> {
        self.check_2d()?;
        if idx.j >= self.ny || idx.i >= self.nx {
            return Err(Error::Bounds(format!(
                "pixel (j={}, i={}) outside {}x{} grid",
                idx.j, idx.i, self.nx, self.ny
            )));
        }
        Ok(idx.j * self.nx + idx.i)
    }

    /// Inverse of [`flat_index_2d`](Self::flat_index_2d).
    pub fn unflat_index_2d(&self, flat: usize) -> Result<UnitIndex2D> {
        self.check_2d()?;
        if flat >= self.unit_count() {
            return Err(Error::Bounds(format!(
                "flat index {flat} outside {} units",
                self.unit_count()
            )));
        }
        Ok(UnitIndex2D { j: flat / self.nx, i: flat % self.nx })
    }

    /// Flat index I = k*nx*ny + j*nx + i.
    pub fn flat_index_3d(&self, idx: UnitIndex3D) -> Result<usize> {
        let nz = self.check_3d()?;
        if idx.k >= nz || idx.j >= self.ny || idx.i >= self.nx {
            return Err(Error::Bounds(format!(
                "voxel (k={}, j={}, i={}) outside {}x{}x{} grid",
                idx.k, idx.j, idx.i, self.nx, self.ny, nz
            )));
        }
        Ok((idx.k * self.ny + idx.j) * self.nx + idx.i)
    }

    /// Inverse of [`flat_index_3d`](Self::flat_index_3d).
    pub fn unflat_index_3d(&self, flat: usize) -> Result<UnitIndex3D> {
        self.check_3d()?;
        if flat >= self.unit_count() {
            return Err(Error::Bounds(format!(
                "flat index {flat} outside {} units",
                self.unit_count()
            )));
        }
        let plane = self.nx * self.ny;
        Ok(UnitIndex3D {
            k: flat / plane,
            j: (flat % plane) / self.nx,
            i: flat % self.nx,
        })
    }

    /// Center of a pixel in canonical coordinates:
    /// (i - (nx-1)/2, (ny-1)/2 - j).
    pub fn unit_center_2d(&self, idx: UnitIndex2D) -> Result<[f64; 2]> {
        self.flat_index_2d(idx)?;
        Ok([
            idx.i as f64 - (self.nx as f64 - 1.0) / 2.0,
            (self.ny as f64 - 1.0) / 2.0 - idx.j as f64,
        ])
    }

    /// Center of a voxel in canonical coordinates.
    pub fn unit_center_3d(&self, idx: UnitIndex3D) -> Result<[f64; 3]> {
        self.flat_index_3d(idx)?;
        Ok([
            idx.i as f64 - (self.nx as f64 - 1.0) / 2.0,
            (self.ny as f64 - 1.0) / 2.0 - idx.j as f64,
            (self.nz.unwrap() as f64 - 1.0) / 2.0 - idx.k as f64,
        ])
    }

    /// Pixel center in physical coordinates: canonical*scale + center.
    pub fn unit_center_physical_2d(&self, idx: UnitIndex2D) -> Result<[f64; 2]> {
        let c = self.unit_center_2d(idx)?;
        Ok([
            c[0] * self.scale + self.center[0],
            c[1] * self.scale + self.center[1],
        ])
    }

    /// Voxel center in physical coordinates.
    pub fn unit_center_physical_3d(&self, idx: UnitIndex3D) -> Result<[f64; 3]> {
        let c = self.unit_center_3d(idx)?;
        Ok([
            c[0] * self.scale + self.center[0],
            c[1] * self.scale + self.center[1],
            c[2] * self.scale + self.center[2],
        ])
    }

    /// Maps a physical-space ray onto the canonical grid. The angle is
    /// unchanged; the signed offset moves by the center's component along
    /// the ray normal and divides by the scale. The returned factor (the
    /// scale) multiplies canonical intersection lengths into physical ones.
    pub fn normalize_ray_2d(&self, ray: &ParallelRay2D) -> Result<(ParallelRay2D, f64)> {
        self.check_2d()?;
        let n = ray.normal();
        let shift = self.center[0] * n[0] + self.center[1] * n[1];
        let ray = ParallelRay2D::new((ray.s() - shift) / self.scale, ray.phi())?;
        Ok((ray, self.scale))
    }

    /// 3D analogue of [`normalize_ray_2d`](Self::normalize_ray_2d): both
    /// detector-plane offsets shift by the center's components along the
    /// plane basis.
    pub fn normalize_ray_3d(&self, ray: &ParallelRay3D) -> Result<(ParallelRay3D, f64)> {
        self.check_3d()?;
        let b = ray.basis();
        let c = self.center;
        let shift1 = c[0] * b.e1[0] + c[1] * b.e1[1] + c[2] * b.e1[2];
        let shift2 = c[0] * b.e2[0] + c[1] * b.e2[1] + c[2] * b.e2[2];
        let ray = ParallelRay3D::new(
            (ray.s1() - shift1) / self.scale,
            (ray.s2() - shift2) / self.scale,
            ray.phi1(),
            ray.phi2(),
        )?;
        Ok((ray, self.scale))
    }
}
