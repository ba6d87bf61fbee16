//! Correctly rounded summation.

use fsum::FSum;

/// Sum of `values` rounded once, so the result does not depend on their
/// order. An empty or all-zero input gives `+0.0`.
pub(crate) fn exact_sum(values: &[f64]) -> f64 {
    positive_zero(FSum::with_all(values).value())
}

/// Incremental form of [`exact_sum`].
pub(crate) struct ExactSum(FSum);

impl ExactSum {
    pub(crate) fn new() -> Self {
        ExactSum(FSum::new())
    }

    pub(crate) fn add(&mut self, v: f64) {
        self.0.add(v);
    }

    pub(crate) fn value(self) -> f64 {
        positive_zero(self.0.value())
    }
}

fn positive_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}
