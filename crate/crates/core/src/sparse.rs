//! Sparse intersection rows.
//!
//! One row of the projection matrix: the boxes a single ray crosses, as
//! (flat index, intersection length) pairs sorted by index. Rows are
//! immutable after construction; [`SparseRow::from_unsorted`] sorts and
//! validates once so every consumer can rely on strictly increasing indices
//! and positive finite lengths.

use crate::error::{Error, Result};

/// One box crossed by a ray: flat index into the grid and the length of the
/// ray segment inside the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectionRecord {
    pub index: usize,
    pub length: f64,
}

/// A finished intersection row: records sorted by flat index, no duplicates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow {
    records: Vec<IntersectionRecord>,
}

impl SparseRow {
    /// An empty row (ray misses the grid).
    pub fn empty() -> Self {
        Self { records: Vec::new() }
    }

    /// Sorts records by index and validates: indices unique, lengths
    /// positive and finite.
    pub fn from_unsorted(mut records: Vec<IntersectionRecord>) -> Result<Self> {
        records.sort_unstable_by_key(|r| r.index);
        for pair in records.windows(2) {
            if pair[0].index == pair[1].index {
                return Err(Error::Bounds(format!(
                    "duplicate flat index {} in intersection row",
                    pair[0].index
                )));
            }
        }
        for r in &records {
            if !(r.length.is_finite() && r.length > 0.0) {
                return Err(Error::Bounds(format!(
                    "intersection length must be positive and finite, got {} at index {}",
                    r.length, r.index
                )));
            }
        }
        Ok(Self { records })
    }

    /// Records in flat-index order.
    pub fn records(&self) -> &[IntersectionRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Sum of all intersection lengths: the chord length of the ray through
    /// the union of the boxes (for convex grids).
    pub fn total_length(&self) -> f64 {
        self.records.iter().map(|r| r.length).sum()
    }

    /// Length at a flat index, or 0 when the ray misses that box.
    pub fn get(&self, index: usize) -> f64 {
        match self.records.binary_search_by_key(&index, |r| r.index) {
            Ok(pos) => self.records[pos].length,
            Err(_) => 0.0,
        }
    }

    /// Dot product with a dense vector indexed by flat index.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.records.iter().map(|r| r.length * dense[r.index]).sum()
    }

    /// Row with every length multiplied by `factor` (physical rescaling).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            records: self
                .records
                .iter()
                .map(|r| IntersectionRecord { index: r.index, length: r.length * factor })
                .collect(),
        }
    }
}
