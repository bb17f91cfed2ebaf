//! Analytic X-ray transform of pixel and voxel images.
//!
//! The transform of an image is the set of line integrals of the piecewise
//! constant function the image defines: each ray picks up the intersection
//! length of every box it crosses, weighted by that box's value. This crate
//! computes those intersection rows exactly (up to floating point) with a
//! sweep that only ever examines boxes near the ray, so the work per ray is
//! linear in the grid side length instead of the grid size.
//!
//! Supported ray sources: 2D and 3D parallel beams natively, and fan,
//! circular cone, and helical cone beams via exact reparameterization to
//! parallel form. On top of the per-ray kernels sit a forward projector,
//! the matched adjoint (backprojection), and explicit sparse matrix
//! assembly, plus binary and text formats for matrices, images, and ray
//! sets.

pub mod error;
pub mod format;
pub mod geometry;
pub mod intersect2d;
pub mod intersect3d;
pub mod oracle;
pub mod projector;
pub mod grid;
pub mod io;
pub mod selftest;
pub mod sparse;
pub mod tally;
pub mod tolerance;

pub use error::{Error, Result};
pub use geometry::{BeamSpec, DirectionBasis, ParallelRay2D, ParallelRay3D};
pub use grid::{ImageGrid, UnitIndex2D, UnitIndex3D};
pub use projector::{compute_row, resolve_ray, CanonicalRay, Image, ProjectionMatrix, RaySet};
pub use sparse::{IntersectionRecord, SparseRow};
