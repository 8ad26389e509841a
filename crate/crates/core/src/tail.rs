//! Exact tail probability of the difference-of-proportions statistic.
//!
//! For arms `X ~ Bin(m, ω)` and `Y ~ Bin(n, ω + θ)` the statistic is
//! `|Y/n − X/m − θ|`. Multiplying through by `m·n` turns it into
//! `|d(u, v) − τ|` with the integer `d(u, v) = m·v − n·u` and `τ = θ·m·n`,
//! and membership of `(u, v)` in the rejection set `C` reduces to the sign
//! test `(d − d_obs)·(d + d_obs − 2τ) ≥ 0`. Both factors are computed with at
//! most one rounding, and rounding never flips a sign, so ties are resolved
//! exactly with respect to the floating-point `τ`.

use serde::{Deserialize, Serialize};

use crate::binom::{BinomParams, NeumaierSum};
use crate::error::{domain, Result};

/// Observed counts and sizes of the two binomial arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSampleData {
    pub x: usize,
    pub m: usize,
    pub y: usize,
    pub n: usize,
}

impl TwoSampleData {
    pub fn new(x: usize, m: usize, y: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(domain("arm sizes must be at least 1"));
        }
        if x > m || y > n {
            return Err(domain(format!(
                "counts out of range: x = {x} of m = {m}, y = {y} of n = {n}"
            )));
        }
        Ok(Self { x, m, y, n })
    }

    /// `θ̂ = y/n − x/m`, the point where the observed statistic vanishes.
    pub fn theta_hat(&self) -> f64 {
        self.y as f64 / self.n as f64 - self.x as f64 / self.m as f64
    }

    /// `m·v − n·u`.
    #[inline]
    pub fn scaled_diff(&self, u: usize, v: usize) -> i64 {
        self.m as i64 * v as i64 - self.n as i64 * u as i64
    }

    pub fn observed_diff(&self) -> i64 {
        self.scaled_diff(self.x, self.y)
    }

    /// The same arm sizes with a different observation.
    pub fn with_outcome(&self, x: usize, y: usize) -> Result<Self> {
        Self::new(x, self.m, y, self.n)
    }

    pub fn outcomes(&self) -> usize {
        (self.m + 1) * (self.n + 1)
    }
}

/// A hypothesised difference of success probabilities, `−1 < θ < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ThetaPoint(f64);

impl ThetaPoint {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > -1.0 && theta < 1.0) {
            return Err(domain(format!("theta = {theta} outside (-1, 1)")));
        }
        Ok(Self(theta))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Closure of the admissible nuisance range, `[max{0, −θ}, min{1, 1 − θ}]`.
    pub fn omega_range(&self) -> (f64, f64) {
        ((-self.0).max(0.0), (1.0 - self.0).min(1.0))
    }
}

/// `m·n·|v/n − u/m − θ|`, evaluated as `|d(u, v) − θ·m·n|`.
pub fn scaled_score(u: usize, v: usize, data: &TwoSampleData, theta: ThetaPoint) -> f64 {
    let tau = theta.value() * (data.m * data.n) as f64;
    (data.scaled_diff(u, v) as f64 - tau).abs()
}

/// A one-parameter family of tail probabilities indexed by the nuisance
/// parameter. The two-binomial rejection set is the only implementation.
pub trait TailFamily {
    /// Closed interval of admissible nuisance values.
    fn omega_range(&self) -> (f64, f64);

    /// Tail probability at nuisance value `omega`.
    fn tail(&self, omega: f64) -> Result<f64>;
}

/// The rejection set `C` for one `(data, θ)`, cached for repeated
/// evaluation across nuisance values.
#[derive(Debug, Clone)]
pub struct RejectionSet {
    data: TwoSampleData,
    theta: ThetaPoint,
    twice_tau: f64,
    /// `rows[u]` lists every `v` with `(u, v) ∈ C`.
    rows: Vec<Vec<u32>>,
    size: usize,
}

impl RejectionSet {
    pub fn new(data: &TwoSampleData, theta: ThetaPoint) -> Self {
        let twice_tau = 2.0 * theta.value() * (data.m * data.n) as f64;
        Self::build(data, theta, twice_tau)
    }

    /// Rejection set at the tie point `θ = k / (2·m·n)`, where `2τ = k` is
    /// carried exactly rather than recomputed from a rounded `θ`.
    pub fn at_tie(data: &TwoSampleData, k: i64) -> Result<Self> {
        let theta = ThetaPoint::new(k as f64 / (2 * data.m * data.n) as f64)?;
        Ok(Self::build(data, theta, k as f64))
    }

    fn build(data: &TwoSampleData, theta: ThetaPoint, twice_tau: f64) -> Self {
        let d_obs = data.observed_diff() as f64;
        let mut size = 0;
        let rows = (0..=data.m)
            .map(|u| {
                let row: Vec<u32> = (0..=data.n)
                    .filter(|&v| {
                        let d = data.scaled_diff(u, v) as f64;
                        let a = d - d_obs;
                        let b = d + d_obs - twice_tau;
                        a == 0.0 || b == 0.0 || (a > 0.0) == (b > 0.0)
                    })
                    .map(|v| v as u32)
                    .collect();
                size += row.len();
                row
            })
            .collect();
        Self {
            data: *data,
            theta,
            twice_tau,
            rows,
            size,
        }
    }

    pub fn data(&self) -> &TwoSampleData {
        &self.data
    }

    pub fn theta(&self) -> ThetaPoint {
        self.theta
    }

    /// `2·θ·m·n` as used for the membership test.
    pub fn twice_tau(&self) -> f64 {
        self.twice_tau
    }

    /// Number of outcome pairs in `C`.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.rows
            .get(u)
            .map(|row| row.binary_search(&(v as u32)).is_ok())
            .unwrap_or(false)
    }

    /// Iterator over all `(u, v) ∈ C` in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&v| (u, v as usize)))
    }

    /// `P_{θ,ω}((X, Y) ∈ C)`.
    pub fn joint_tail(&self, omega: f64) -> Result<f64> {
        let (lo, hi) = self.theta.omega_range();
        if !(omega >= lo && omega <= hi) {
            return Err(domain(format!(
                "omega = {omega} outside [{lo}, {hi}] for theta = {}",
                self.theta.value()
            )));
        }
        let second = (omega + self.theta.value()).clamp(0.0, 1.0);
        let px = BinomParams::new(self.data.m, omega)?.pmf_vector();
        let py = BinomParams::new(self.data.n, second)?.pmf_vector();
        let mut total = NeumaierSum::new();
        for (row, &pu) in self.rows.iter().zip(&px) {
            if pu == 0.0 || row.is_empty() {
                continue;
            }
            let inner: NeumaierSum = row.iter().map(|&v| py[v as usize]).collect();
            total.add(pu * inner.sum());
        }
        Ok(total.sum().clamp(0.0, 1.0))
    }
}

impl TailFamily for RejectionSet {
    fn omega_range(&self) -> (f64, f64) {
        self.theta.omega_range()
    }

    fn tail(&self, omega: f64) -> Result<f64> {
        self.joint_tail(omega)
    }
}

/// `P_{θ,ω}(|Y/n − X/m − θ| ≥ |y/n − x/m − θ|)`.
pub fn joint_tail(data: &TwoSampleData, theta: ThetaPoint, omega: f64) -> Result<f64> {
    RejectionSet::new(data, theta).joint_tail(omega)
}

/// Every `θ` in `(−1, 1)` at which the rejection set changes, as the exact
/// numerators `k` of `θ = k / (2·m·n)`, sorted and deduplicated.
pub fn tie_points(data: &TwoSampleData) -> Vec<i64> {
    let d_obs = data.observed_diff();
    let denom = 2 * (data.m * data.n) as i64;
    let mut ks: Vec<i64> = (0..=data.m)
        .flat_map(|u| (0..=data.n).map(move |v| (u, v)))
        .map(|(u, v)| data.scaled_diff(u, v) + d_obs)
        .filter(|&k| k > -denom && k < denom)
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}
