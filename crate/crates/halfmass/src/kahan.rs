//! Compensated (Kahan) summation.
//!
//! Every integral in this crate accumulates node contributions in a fixed
//! index order through this accumulator, so results are bit-identical across
//! runs and thread counts.

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }

    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

#[cfg(test)]
mod tests {
    use super::KahanSum;

    #[test]
    fn compensates_cancellation() {
        // Tiny terms after a large one are lost in naive f64 order.
        let mut naive = 1.0;
        let mut kahan = KahanSum::new();
        kahan.add(1.0);
        for _ in 0..100_000 {
            naive += 1e-16;
            kahan.add(1e-16);
        }
        let exact = 1.0 + 1e-11;
        assert_eq!(naive, 1.0);
        assert!((kahan.value() - exact).abs() < 1e-16);
    }
}
