//! Candidate counting for work-bound verification.
//!
//! The intersection kernels examine a set of candidate boxes per ray; the
//! algorithm's efficiency claim is that this count grows linearly with the
//! grid side length. Kernels report each examined candidate to a
//! [`CandidateTally`]. The no-op sink compiles away, so production calls pay
//! nothing; benchmarks and scaling tests plug in a counter.

/// Sink for "the kernel examined one candidate box" events.
pub trait CandidateTally {
    fn record(&mut self, n: usize);
}

/// Discards all events; monomorphizes to nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoTally;

impl CandidateTally for NoTally {
    #[inline(always)]
    fn record(&mut self, _n: usize) {}
}

/// Counts examined candidates.
#[derive(Debug, Default, Clone, Copy)]
pub struct CountTally {
    pub candidates: usize,
}

impl CandidateTally for CountTally {
    #[inline(always)]
    fn record(&mut self, n: usize) {
        self.candidates += n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_tally_accumulates() {
        let mut t = CountTally::default();
        t.record(3);
        t.record(0);
        t.record(4);
        assert_eq!(t.candidates, 7);
    }
}
