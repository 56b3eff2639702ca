//! Compensated floating-point accumulation.
//!
//! Aggregate flows are small shares of totals spanning up to ~1e8 cells;
//! plain summation loses the low-order bits those shares live in. All
//! aggregation in this crate goes through [`CompensatedSum`].

/// Running sum with Neumaier compensation.
///
/// Error is O(n·eps²) instead of O(n·eps) for naive summation, which in
/// practice makes totals independent of accumulation order at the 1e-9
/// relative level required of the aggregates built on top.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator of values.
pub fn sum<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn recovers_cancellation_naive_summation_loses() {
        // 1 + 1e100 - 1e100 + 1: naive gives 0, compensated gives 2.
        let vals = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum(vals), 2.0);
    }

    #[test]
    fn matches_exact_sum_of_representable_values() {
        let vals: Vec<f64> = (0..10_000).map(|i| (i % 7) as f64 * 0.25).collect();
        let exact: f64 = vals.iter().map(|&v| v * 4.0).sum::<f64>() / 4.0;
        assert_eq!(sum(vals.iter().copied()), exact);
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(sum(core::iter::empty()), 0.0);
    }
}
