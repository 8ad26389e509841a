//! Exact validity and coverage checks by enumerating the sample space.
//!
//! With `m` and `n` small, every outcome `(u, v)` can be treated as the
//! observation in turn, giving the full table of p-values at a hypothesised
//! `θ`. The rejection probability `P_{θ,ω}[p ≤ α]` and the coverage
//! `P_{θ,ω}[p > α]` are then finite sums of joint pmf values, with no
//! sampling error. Numerical suprema can only under-estimate p-values, so
//! every bound is checked with a slack of [`VALIDITY_SLACK`].

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::binom::{BinomParams, NeumaierSum};
use crate::error::{domain, Error, Result};
use crate::format::{nums, Num};
use crate::inference::{membership, InferenceConfig, Variant};
use crate::nuisance::linspace;
use crate::tail::{ThetaPoint, TwoSampleData};

pub const VALIDITY_SLACK: f64 = 1e-6;
pub const DEFAULT_OUTCOME_GUARD: usize = 400;

/// p-values of `H₀: θ = θ₀` for every outcome of a `(m, n)` experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueTable {
    pub m: usize,
    pub n: usize,
    pub theta: f64,
    /// Row-major by `u`: entry `u·(n + 1) + v`.
    pub values: Vec<f64>,
}

impl PValueTable {
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.values[u * (self.n + 1) + v]
    }

    /// Joint pmf of all outcomes at `(θ, ω)`, in table order.
    pub fn joint_pmf(&self, omega: f64) -> Result<Vec<f64>> {
        joint_pmf(self.m, self.n, self.theta, omega)
    }

    /// `P_{θ,ω}[p ≤ α] − α`.
    pub fn validity_excess(&self, omega: f64, alpha: f64) -> Result<f64> {
        let w = self.joint_pmf(omega)?;
        Ok(mass_where(&w, &self.values, |p| p <= alpha) - alpha)
    }

    /// `P_{θ,ω}[p > α]`, the coverage of the strong α-cut at the true `θ`.
    pub fn coverage(&self, omega: f64, alpha: f64) -> Result<f64> {
        let w = self.joint_pmf(omega)?;
        Ok(mass_where(&w, &self.values, |p| p > alpha))
    }
}

fn mass_where<P: Fn(f64) -> bool>(weights: &[f64], pvalues: &[f64], pred: P) -> f64 {
    weights
        .iter()
        .zip(pvalues)
        .filter(|(_, &p)| pred(p))
        .map(|(&w, _)| w)
        .collect::<NeumaierSum>()
        .sum()
}

/// `P_{θ,ω}(X = u, Y = v)` for all outcomes, row-major by `u`.
pub fn joint_pmf(m: usize, n: usize, theta: f64, omega: f64) -> Result<Vec<f64>> {
    let t = ThetaPoint::new(theta)?;
    let (lo, hi) = t.omega_range();
    if !(omega >= lo && omega <= hi) {
        return Err(domain(format!("omega = {omega} outside [{lo}, {hi}]")));
    }
    let px = BinomParams::new(m, omega)?.pmf_vector();
    let py = BinomParams::new(n, (omega + theta).clamp(0.0, 1.0))?.pmf_vector();
    Ok(px.iter().flat_map(|a| py.iter().map(move |b| a * b)).collect())
}

fn guard(m: usize, n: usize, limit: Option<usize>) -> Result<()> {
    let outcomes = (m + 1) * (n + 1);
    match limit {
        Some(limit) if outcomes > limit => Err(Error::SizeGuard { outcomes, limit }),
        _ => Ok(()),
    }
}

/// The p-value table at `theta`. `limit` caps `(m + 1)(n + 1)`; `None`
/// disables the guard.
pub fn enumerate_pvalues(
    m: usize,
    n: usize,
    theta: ThetaPoint,
    cfg: &InferenceConfig,
    variant: &Variant,
    limit: Option<usize>,
) -> Result<PValueTable> {
    guard(m, n, limit)?;
    TwoSampleData::new(0, m, 0, n)?;
    let outcomes: Vec<(usize, usize)> = (0..=m).flat_map(|u| (0..=n).map(move |v| (u, v))).collect();
    let values = outcomes
        .par_iter()
        .map(|&(u, v)| membership(&TwoSampleData::new(u, m, v, n)?, theta, variant, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(PValueTable { m, n, theta: theta.value(), values })
}

/// Convenience form of [`PValueTable::validity_excess`].
pub fn validity_excess(table: &PValueTable, omega: f64, alpha: f64) -> Result<f64> {
    table.validity_excess(omega, alpha)
}

/// Coverage of the level `1 − α` cut at the true `(θ, ω)`.
#[allow(clippy::too_many_arguments)]
pub fn coverage_probability(
    m: usize,
    n: usize,
    theta: ThetaPoint,
    omega: f64,
    alpha: f64,
    cfg: &InferenceConfig,
    variant: &Variant,
    limit: Option<usize>,
) -> Result<f64> {
    enumerate_pvalues(m, n, theta, cfg, variant, limit)?.coverage(omega, alpha)
}

/// Grids scanned by [`verify`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyGrids {
    pub thetas: Vec<f64>,
    /// Number of equispaced interior ω points per θ.
    pub omegas: usize,
    pub alphas: Vec<f64>,
}

impl Default for VerifyGrids {
    fn default() -> Self {
        Self {
            thetas: (0..21).map(|i| -0.9 + 0.09 * i as f64).collect(),
            omegas: 21,
            alphas: (1..20).map(|k| 0.05 * k as f64).collect(),
        }
    }
}

/// `count` equispaced points strictly inside `[lo, hi]`.
pub fn interior_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / (count + 1) as f64;
    (1..=count).map(|k| lo + step * k as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub theta: Num,
    pub omega: Num,
    pub alpha: Num,
    pub reject_prob: Num,
    pub excess: Num,
    pub coverage: Num,
}

/// Results of an exhaustive validity run.
#[derive(Debug, Clone, Serialize)]
pub struct ValidityReport {
    pub schema_version: u32,
    pub m: usize,
    pub n: usize,
    pub variant: String,
    pub gamma: Option<Num>,
    pub theta_grid: Vec<Num>,
    pub omega_points: usize,
    pub alpha_grid: Vec<Num>,
    pub slack: Num,
    /// `max (P[p ≤ α] − α)` over all cells.
    pub worst_excess: Num,
    /// `max ((1 − α) − P[p > α])` over all cells.
    pub worst_coverage_deficit: Num,
    /// `max (P[p(Θ₀) ≤ α] − α)` for three-point hypotheses around each θ.
    pub worst_extended_excess: Num,
    /// Largest violation of `P[p(Θ₀) ≤ α] ≤ P[p(θ) ≤ α]`.
    pub worst_extended_monotonicity: Num,
    pub passed: bool,
    pub cells: Vec<Cell>,
}

impl ValidityReport {
    /// One line per θ with its worst cells, followed by a verdict.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "validity check  m = {}  n = {}  variant = {}", self.m, self.n, self.variant);
        let _ = writeln!(s, "{:>8}  {:>14}  {:>14}", "theta", "max excess", "max deficit");
        let per_theta = self.cells.len() / self.theta_grid.len().max(1);
        for chunk in self.cells.chunks(per_theta.max(1)) {
            let ex = chunk.iter().map(|c| c.excess.0).fold(f64::NEG_INFINITY, f64::max);
            let def = chunk
                .iter()
                .map(|c| 1.0 - c.alpha.0 - c.coverage.0)
                .fold(f64::NEG_INFINITY, f64::max);
            let _ = writeln!(s, "{:>8.3}  {:>14.6e}  {:>14.6e}", chunk[0].theta.0, ex, def);
        }
        let _ = writeln!(
            s,
            "worst excess {:.6e}, worst coverage deficit {:.6e}, worst extended excess {:.6e}: {}",
            self.worst_excess.0,
            self.worst_coverage_deficit.0,
            self.worst_extended_excess.0,
            if self.passed { "PASS" } else { "FAIL" }
        );
        s
    }
}

/// Runs the validity and coverage checks over `grids`.
pub fn verify(
    m: usize,
    n: usize,
    variant: &Variant,
    cfg: &InferenceConfig,
    grids: &VerifyGrids,
    limit: Option<usize>,
) -> Result<ValidityReport> {
    guard(m, n, limit)?;
    if grids.thetas.is_empty() || grids.alphas.is_empty() || grids.omegas == 0 {
        return Err(domain("verification grids must be nonempty"));
    }
    if let Some(a) = grids.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(domain(format!("alpha = {a} outside (0, 1)")));
    }
    let tables = grids
        .thetas
        .iter()
        .map(|&t| enumerate_pvalues(m, n, ThetaPoint::new(t)?, cfg, variant, None))
        .collect::<Result<Vec<_>>>()?;

    // per θ: the ω points and the joint pmf at each
    let weights = tables
        .par_iter()
        .map(|tab| {
            let (lo, hi) = ThetaPoint::new(tab.theta)?.omega_range();
            interior_points(lo, hi, grids.omegas)
                .into_iter()
                .map(|w| Ok((w, tab.joint_pmf(w)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::new();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_deficit = f64::NEG_INFINITY;
    for (tab, ws) in tables.iter().zip(&weights) {
        for (omega, w) in ws {
            let total: f64 = w.iter().copied().collect::<NeumaierSum>().sum();
            debug_assert!((total - 1.0).abs() < 1e-12);
            for &alpha in &grids.alphas {
                let reject = mass_where(w, &tab.values, |p| p <= alpha);
                let coverage = mass_where(w, &tab.values, |p| p > alpha);
                worst_excess = worst_excess.max(reject - alpha);
                worst_deficit = worst_deficit.max(1.0 - alpha - coverage);
                cells.push(Cell {
                    theta: Num(tab.theta),
                    omega: Num(*omega),
                    alpha: Num(alpha),
                    reject_prob: Num(reject),
                    excess: Num(reject - alpha),
                    coverage: Num(coverage),
                });
            }
        }
    }

    // Θ₀ = {θ_{i-1}, θ_i, θ_{i+1}}: p(Θ₀) is the pointwise max of the tables
    let mut worst_ext = f64::NEG_INFINITY;
    let mut worst_mono = f64::NEG_INFINITY;
    let k = tables.len();
    for i in 0..k {
        let window = i.saturating_sub(1)..(i + 2).min(k);
        let ext: Vec<f64> = (0..tables[i].values.len())
            .map(|j| window.clone().map(|t| tables[t].values[j]).fold(0.0, f64::max))
            .collect();
        for t in window {
            for (_, w) in &weights[t] {
                for &alpha in &grids.alphas {
                    let pe = mass_where(w, &ext, |p| p <= alpha);
                    let pt = mass_where(w, &tables[t].values, |p| p <= alpha);
                    worst_ext = worst_ext.max(pe - alpha);
                    worst_mono = worst_mono.max(pe - pt);
                }
            }
        }
    }

    let passed = worst_excess <= VALIDITY_SLACK
        && worst_deficit <= VALIDITY_SLACK
        && worst_ext <= VALIDITY_SLACK
        && worst_mono <= 1e-12;
    Ok(ValidityReport {
        schema_version: 1,
        m,
        n,
        variant: variant.name().to_string(),
        gamma: match variant {
            Variant::BergerBoos(bb) => Some(Num(bb.gamma())),
            Variant::Plain => None,
        },
        theta_grid: nums(&grids.thetas),
        omega_points: grids.omegas,
        alpha_grid: nums(&grids.alphas),
        slack: Num(VALIDITY_SLACK),
        worst_excess: Num(worst_excess),
        worst_coverage_deficit: Num(worst_deficit),
        worst_extended_excess: Num(worst_ext),
        worst_extended_monotonicity: Num(worst_mono),
        passed,
        cells,
    })
}

/// Uniform θ grid helper for callers building their own [`VerifyGrids`].
pub fn theta_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    linspace(lo, hi, count)
}
