//! Binomial probability kernels evaluated in log space.
//!
//! Every higher layer reduces to products of two binomial pmfs, so the
//! routines here favour stability over raw speed: log-factorials come from
//! a process-wide table, and the degenerate success probabilities 0 and 1
//! are handled as explicit point masses.

use std::sync::OnceLock;

use crate::error::{domain, Result};

/// Largest `k` served straight from the log-factorial table.
const TABLE_MAX: usize = 1024;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(TABLE_MAX + 1);
        let mut acc = NeumaierSum::new();
        out.push(0.0);
        for k in 1..=TABLE_MAX {
            acc.add((k as f64).ln());
            out.push(acc.sum());
        }
        out
    })
}

/// `ln(k!)`, exact to table precision for `k <= 1024` and from a Stirling
/// series above that.
pub fn ln_factorial(k: usize) -> f64 {
    if k <= TABLE_MAX {
        return table()[k];
    }
    let x = k as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `ln C(n, k)`.
pub fn ln_choose(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Parameters of a binomial distribution `Bin(trials, success_prob)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomParams {
    trials: usize,
    success_prob: f64,
}

impl BinomParams {
    pub fn new(trials: usize, success_prob: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&success_prob) {
            return Err(domain(format!(
                "success probability {success_prob} outside [0, 1]"
            )));
        }
        Ok(Self {
            trials,
            success_prob,
        })
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn success_prob(&self) -> f64 {
        self.success_prob
    }

    /// Log-probability of exactly `k` successes; `-inf` off the support.
    pub fn log_pmf(&self, k: usize) -> Result<f64> {
        if k > self.trials {
            return Err(domain(format!(
                "count {k} outside 0..={}",
                self.trials
            )));
        }
        Ok(self.log_pmf_unchecked(k))
    }

    fn log_pmf_unchecked(&self, k: usize) -> f64 {
        let n = self.trials;
        let p = self.success_prob;
        if p == 0.0 {
            return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        if p == 1.0 {
            return if k == n { 0.0 } else { f64::NEG_INFINITY };
        }
        ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()
    }

    /// The full pmf `[P(K = 0), ..., P(K = trials)]`.
    pub fn pmf_vector(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.trials + 1];
        self.fill_pmf(&mut out);
        out
    }

    /// Writes the pmf into `out`, which must have length `trials + 1`.
    pub(crate) fn fill_pmf(&self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.trials + 1);
        let p = self.success_prob;
        if p == 0.0 || p == 1.0 {
            out.iter_mut().for_each(|v| *v = 0.0);
            let at = if p == 0.0 { 0 } else { self.trials };
            out[at] = 1.0;
            return;
        }
        let n = self.trials;
        let lp = p.ln();
        let lq = (-p).ln_1p();
        let ln_n = ln_factorial(n);
        for (k, slot) in out.iter_mut().enumerate() {
            let l = ln_n - ln_factorial(k) - ln_factorial(n - k)
                + k as f64 * lp
                + (n - k) as f64 * lq;
            *slot = l.exp();
        }
    }
}

/// Convenience wrapper around [`BinomParams::log_pmf`].
pub fn log_pmf(k: usize, params: BinomParams) -> Result<f64> {
    params.log_pmf(k)
}

/// Convenience wrapper around [`BinomParams::pmf_vector`].
pub fn pmf_vector(params: BinomParams) -> Vec<f64> {
    params.pmf_vector()
}

/// Neumaier's variant of Kahan compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn stable_sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<NeumaierSum>().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // term-by-term product C(n,k) p^k (1-p)^(n-k) with an integer binomial
    fn closed_form(n: u64, k: u64, p: f64) -> f64 {
        let mut c: u64 = 1;
        for i in 0..k {
            c = c * (n - i) / (i + 1);
        }
        c as f64 * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
    }

    #[test]
    fn fair_coin() {
        let p = BinomParams::new(1, 0.5).unwrap();
        assert!((p.log_pmf(0).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(p.pmf_vector(), vec![0.5, 0.5]);
    }

    #[test]
    fn degenerate_masses() {
        let p = BinomParams::new(10, 0.0).unwrap();
        assert_eq!(p.log_pmf(0).unwrap(), 0.0);
        assert_eq!(p.log_pmf(1).unwrap(), f64::NEG_INFINITY);
        let q = BinomParams::new(2, 1.0).unwrap();
        assert_eq!(q.pmf_vector(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn known_value() {
        // 210 * 0.4^4 * 0.6^6 = 0.250822656, ln = -1.3830091393750957
        let p = BinomParams::new(10, 0.4).unwrap();
        let l = p.log_pmf(4).unwrap();
        assert!((l - (-1.383_009_139_375_095_7)).abs() < 1e-13, "{l}");
        assert!((l.exp() - 0.250_822_656).abs() < 1e-14);
    }

    #[test]
    fn vector_matches_closed_form() {
        let p = BinomParams::new(10, 0.4).unwrap();
        for (k, v) in p.pmf_vector().iter().enumerate() {
            let want = closed_form(10, k as u64, 0.4);
            assert!(((v - want) / want).abs() < 1e-14, "k={k} {v} {want}");
        }
    }

    #[test]
    fn out_of_range_count() {
        let p = BinomParams::new(3, 0.2).unwrap();
        assert!(p.log_pmf(4).is_err());
        assert!(BinomParams::new(3, 1.5).is_err());
        assert!(BinomParams::new(3, -0.1).is_err());
    }

    #[test]
    fn stirling_tail_agrees_with_table() {
        // ln(1025!) - ln(1024!) = ln 1025
        let d = ln_factorial(1025) - ln_factorial(1024);
        assert!((d - 1025f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn compensated_sum() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(stable_sum(&xs), 2.0);
    }

    proptest! {
        #[test]
        fn normalised(n in 0usize..200, p in 0.0f64..=1.0) {
            let v = BinomParams::new(n, p).unwrap().pmf_vector();
            prop_assert!(v.iter().all(|x| *x >= 0.0));
            prop_assert!((stable_sum(&v) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn reflection(n in 0usize..40, j in 0u32..=64) {
            // multiples of 1/64 so that 1 - p is exact
            let p = j as f64 / 64.0;
            let a = BinomParams::new(n, p).unwrap().pmf_vector();
            let b = BinomParams::new(n, 1.0 - p).unwrap().pmf_vector();
            for k in 0..=n {
                let (x, y) = (a[k], b[n - k]);
                if x == y {
                    continue;
                }
                // relative error of exp(log-sum) scales with the magnitudes summed
                let terms = ln_choose(n, k) + k as f64 * p.ln().abs() + (n - k) as f64 * (1.0 - p).ln().abs();
                let tol = (4e-16 * terms).max(1e-14);
                prop_assert!((x - y).abs() <= tol * x.max(y), "k={} {} {}", k, x, y);
            }
        }

        #[test]
        fn finite_exactly_on_support(n in 0usize..40, p in prop_oneof![Just(0.0), Just(1.0), 1e-3f64..0.999]) {
            let b = BinomParams::new(n, p).unwrap();
            let v = b.pmf_vector();
            for (k, pk) in v.iter().enumerate() {
                prop_assert_eq!(b.log_pmf(k).unwrap().is_finite(), *pk > 0.0);
            }
        }
    }
}
