//! Membership functions induced by exact unconditional p-values.
//!
//! For observed data the p-value of `H₀: θ = θ₀`, read as a function of
//! `θ₀`, is a membership function over `(−1, 1)`. Its strong α-cut is a
//! level `1 − α` confidence set, its height restricted to `Θ₀` is the
//! p-value of `H₀: θ ∈ Θ₀`, and pointwise dominance between two such curves
//! ranks the tests that produced them. The Berger-Boos variant restricts the
//! nuisance supremum to a Wald confidence set for `ω` and adds its
//! miss probability `γ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fuzzy::{self, AlphaCut, GridSpec, MembershipCurve};
use crate::normal::normal_quantile;
use crate::nuisance::{linspace, refine_candidates, sup_rejection, NuisanceSet, SupConfig};
use crate::tail::{tie_points, RejectionSet, ThetaPoint, TwoSampleData};

pub const DEFAULT_THETA_GRID: usize = 401;
pub const DEFAULT_THETA_LO: f64 = -0.999;
pub const DEFAULT_THETA_HI: f64 = 0.999;
pub const DEFAULT_HYPOTHESIS_GRID: usize = 201;
pub const DEFAULT_THETA_TOL: f64 = 1e-6;
pub const DEFAULT_GAMMA: f64 = 1e-4;

/// What to do when the Wald set for `ω` is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EmptySetPolicy {
    /// Fall back to the full nuisance range, giving `γ + p(θ)`.
    #[default]
    FullRange,
    /// Treat the supremum over the empty set as 0, giving exactly `γ`.
    GammaOnly,
}

/// Level `γ` of the nuisance confidence set and the matching normal quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BergerBoosConfig {
    gamma: f64,
    z: f64,
    pub empty_set: EmptySetPolicy,
}

impl BergerBoosConfig {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(domain(format!("gamma = {gamma} outside (0, 1)")));
        }
        let z = normal_quantile(1.0 - gamma / 2.0)?;
        Ok(Self { gamma, z, empty_set: EmptySetPolicy::default() })
    }

    pub fn with_empty_set(mut self, policy: EmptySetPolicy) -> Self {
        self.empty_set = policy;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `Φ⁻¹(1 − γ/2)`.
    pub fn z(&self) -> f64 {
        self.z
    }
}

/// Which p-value the membership function is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Variant {
    Plain,
    BergerBoos(BergerBoosConfig),
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::BergerBoos(_) => "berger-boos",
        }
    }
}

/// Numerical settings for the θ-level computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    pub sup: SupConfig,
    /// Grid points used on a hypothesis interval before refinement.
    pub hypothesis_grid: usize,
    /// θ-resolution of golden-section refinement and cut boundaries.
    pub theta_tol: f64,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self {
            sup: SupConfig::default(),
            hypothesis_grid: DEFAULT_HYPOTHESIS_GRID,
            theta_tol: DEFAULT_THETA_TOL,
        }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<()> {
        self.sup.validate()?;
        if self.hypothesis_grid < 3 {
            return Err(domain("hypothesis grid needs at least 3 points"));
        }
        if !(self.theta_tol > 0.0) {
            return Err(domain("theta tolerance must be positive"));
        }
        Ok(())
    }
}

/// The null hypothesis `θ ∈ Θ₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HypothesisSet {
    Interval { lo: f64, hi: f64 },
    Points(Vec<f64>),
}

impl HypothesisSet {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        let h = HypothesisSet::Interval { lo, hi };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        let inside = |t: f64| t > -1.0 && t < 1.0;
        match self {
            HypothesisSet::Interval { lo, hi } => {
                if !(lo <= hi) {
                    return Err(domain(format!("empty hypothesis interval [{lo}, {hi}]")));
                }
                if !inside(*lo) || !inside(*hi) {
                    return Err(domain(format!("hypothesis [{lo}, {hi}] not inside (-1, 1)")));
                }
            }
            HypothesisSet::Points(ps) => {
                if ps.is_empty() {
                    return Err(domain("empty hypothesis point list"));
                }
                if let Some(p) = ps.iter().find(|p| !inside(**p)) {
                    return Err(domain(format!("hypothesis point {p} not inside (-1, 1)")));
                }
            }
        }
        Ok(())
    }

    pub fn bounds(&self) -> (f64, f64) {
        match self {
            HypothesisSet::Interval { lo, hi } => (*lo, *hi),
            HypothesisSet::Points(ps) => ps
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &p| (a.min(p), b.max(p))),
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        match self {
            HypothesisSet::Interval { lo, hi } => theta >= *lo && theta <= *hi,
            HypothesisSet::Points(ps) => ps.contains(&theta),
        }
    }
}

/// p-value of `H₀: θ ∈ Θ₀` together with where the supremum was attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendedPValue {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub p_value: f64,
    pub argmax_theta: f64,
    /// Whether golden-section refinement improved on the sampled candidates.
    pub refined_argmax: bool,
}

/// Wald interval `x/m ± z·√(x(m − x)/m³)` intersected with the closed
/// nuisance range for `θ`. A zero-width interval (`x = 0` or `x = m`) sits
/// on the boundary of the open range and yields `None`.
pub fn wald_set(data: &TwoSampleData, theta: ThetaPoint, bb: &BergerBoosConfig) -> Option<NuisanceSet> {
    let m = data.m as f64;
    let x = data.x as f64;
    let half = bb.z() * (x * (m - x) / (m * m * m)).sqrt();
    if half == 0.0 {
        return None;
    }
    let centre = x / m;
    let (lo, hi) = theta.omega_range();
    NuisanceSet::new(centre - half, centre + half).ok()?.clip(lo, hi)
}

fn plain_at(c: &RejectionSet, cfg: &InferenceConfig) -> Result<f64> {
    let set = NuisanceSet::full(c.theta());
    Ok(sup_rejection(c, set, &cfg.sup)?.sup_value)
}

fn bb_at(c: &RejectionSet, bb: &BergerBoosConfig, cfg: &InferenceConfig) -> Result<f64> {
    let sup = match wald_set(c.data(), c.theta(), bb) {
        Some(set) => sup_rejection(c, set, &cfg.sup)?.sup_value,
        None => match bb.empty_set {
            EmptySetPolicy::GammaOnly => 0.0,
            EmptySetPolicy::FullRange => plain_at(c, cfg)?,
        },
    };
    Ok((bb.gamma() + sup).min(1.0))
}

fn grade(c: &RejectionSet, variant: &Variant, cfg: &InferenceConfig) -> Result<f64> {
    match variant {
        Variant::Plain => plain_at(c, cfg),
        Variant::BergerBoos(bb) => bb_at(c, bb, cfg),
    }
}

/// Membership grade of `theta` under `variant`.
pub fn membership(data: &TwoSampleData, theta: ThetaPoint, variant: &Variant, cfg: &InferenceConfig) -> Result<f64> {
    grade(&RejectionSet::new(data, theta), variant, cfg)
}

/// `μ(θ) = sup_ω P_{θ,ω}(|Y/n − X/m − θ| ≥ |y/n − x/m − θ|)`.
pub fn mu_at(data: &TwoSampleData, theta: ThetaPoint, cfg: &InferenceConfig) -> Result<f64> {
    membership(data, theta, &Variant::Plain, cfg)
}

/// `μ^S(θ) = γ + sup_{ω ∈ S} P_{θ,ω}(…)`, clamped to 1.
pub fn mu_bb_at(data: &TwoSampleData, theta: ThetaPoint, bb: &BergerBoosConfig, cfg: &InferenceConfig) -> Result<f64> {
    membership(data, theta, &Variant::BergerBoos(*bb), cfg)
}

/// Membership at each θ of `grid`, evaluated in parallel, in grid order.
pub fn membership_values(data: &TwoSampleData, grid: &[f64], variant: &Variant, cfg: &InferenceConfig) -> Result<Vec<f64>> {
    grid.par_iter()
        .map(|&t| membership(data, ThetaPoint::new(t)?, variant, cfg))
        .collect()
}

/// The membership curve sampled on a uniform θ grid inside `(−1, 1)`.
pub fn membership_curve(data: &TwoSampleData, spec: GridSpec, variant: &Variant, cfg: &InferenceConfig) -> Result<MembershipCurve> {
    cfg.validate()?;
    if !(spec.lo > -1.0 && spec.hi < 1.0) {
        return Err(domain(format!("theta grid [{}, {}] not inside (-1, 1)", spec.lo, spec.hi)));
    }
    let grid = spec.points();
    let values = membership_values(data, &grid, variant, cfg)?;
    Ok(MembershipCurve::new(grid, values)?.with_meta(spec))
}

/// Plain membership curve.
pub fn mu_curve(data: &TwoSampleData, spec: GridSpec, cfg: &InferenceConfig) -> Result<MembershipCurve> {
    membership_curve(data, spec, &Variant::Plain, cfg)
}

/// Default θ grid, 401 points on `[−0.999, 0.999]`.
pub fn default_theta_grid() -> GridSpec {
    GridSpec { lo: DEFAULT_THETA_LO, hi: DEFAULT_THETA_HI, count: DEFAULT_THETA_GRID }
}

/// `sup_{θ ∈ Θ₀}` of the membership function.
///
/// On an interval the supremum is taken over a uniform grid, every tie
/// point of the rejection set inside the interval (evaluated with the
/// exact tie), and golden-section refinements around grid-local maxima.
/// Between tie points the grade is continuous, and at a tie point it is at
/// least its one-sided limits, so these candidates capture the supremum.
pub fn extended_membership(data: &TwoSampleData, h: &HypothesisSet, variant: &Variant, cfg: &InferenceConfig) -> Result<ExtendedPValue> {
    cfg.validate()?;
    h.validate()?;
    let (theta_lo, theta_hi) = h.bounds();
    let at = |t: f64| membership(data, ThetaPoint::new(t)?, variant, cfg);

    let (lo, hi) = match h {
        HypothesisSet::Points(ps) => {
            let values = membership_values(data, ps, variant, cfg)?;
            let (i, p) = argmax(&values);
            return Ok(ExtendedPValue { theta_lo, theta_hi, p_value: p, argmax_theta: ps[i], refined_argmax: false });
        }
        HypothesisSet::Interval { lo, hi } => (*lo, *hi),
    };
    if lo == hi {
        return Ok(ExtendedPValue { theta_lo, theta_hi, p_value: at(lo)?, argmax_theta: lo, refined_argmax: false });
    }

    let grid = linspace(lo, hi, cfg.hypothesis_grid);
    let values = membership_values(data, &grid, variant, cfg)?;
    let smooth = refine_candidates(&at, &grid, &values, cfg.theta_tol)?;
    let mut best = (smooth.arg, smooth.value, smooth.refined);

    let denom = (2 * data.m * data.n) as f64;
    let ties: Vec<i64> = tie_points(data)
        .into_iter()
        .filter(|&k| {
            let t = k as f64 / denom;
            t >= lo && t <= hi
        })
        .collect();
    let tie_values = ties
        .par_iter()
        .map(|&k| grade(&RejectionSet::at_tie(data, k)?, variant, cfg))
        .collect::<Result<Vec<_>>>()?;
    for (&k, &v) in ties.iter().zip(&tie_values) {
        if v > best.1 {
            best = (k as f64 / denom, v, false);
        }
    }
    Ok(ExtendedPValue { theta_lo, theta_hi, p_value: best.1, argmax_theta: best.0, refined_argmax: best.2 })
}

fn argmax(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc })
}

/// `p(Θ₀) = sup_{θ ∈ Θ₀} μ(θ)`.
pub fn extended_pvalue(data: &TwoSampleData, h: &HypothesisSet, cfg: &InferenceConfig) -> Result<ExtendedPValue> {
    extended_membership(data, h, &Variant::Plain, cfg)
}

/// `b(Θ₀) = sup_{θ ∈ Θ₀} μ^S(θ)`.
pub fn bb_extended_pvalue(data: &TwoSampleData, h: &HypothesisSet, bb: &BergerBoosConfig, cfg: &InferenceConfig) -> Result<ExtendedPValue> {
    extended_membership(data, h, &Variant::BergerBoos(*bb), cfg)
}

/// Strong α-cut of a membership curve, read as a level `1 − α` confidence
/// set; the hull is the reported interval.
pub fn confidence_cut(curve: &MembershipCurve, alpha: f64) -> Result<AlphaCut> {
    fuzzy::strong_cut(curve, alpha)
}

/// Like [`confidence_cut`], but boundaries are located by bisection on the
/// membership function itself rather than on the interpolated curve.
pub fn confidence_cut_refined(
    data: &TwoSampleData,
    curve: &MembershipCurve,
    alpha: f64,
    variant: &Variant,
    cfg: &InferenceConfig,
) -> Result<AlphaCut> {
    fuzzy::strong_cut_refined(
        curve,
        alpha,
        |t| membership(data, ThetaPoint::new(t)?, variant, cfg),
        cfg.theta_tol,
    )
}

/// Outcome of comparing two tests through their membership curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestPreference {
    /// The first curve is included in the second but not conversely.
    FirstPreferred,
    SecondPreferred,
    Equal,
    Incomparable,
}

/// Prefers the test whose membership curve is included in the other's,
/// since its α-cuts are then nested inside the other's at every level.
pub fn prefer_test(a: &MembershipCurve, b: &MembershipCurve) -> Result<TestPreference> {
    let ab = fuzzy::included_in(a, b)?;
    let ba = fuzzy::included_in(b, a)?;
    Ok(match (ab, ba) {
        (true, true) => TestPreference::Equal,
        (true, false) => TestPreference::FirstPreferred,
        (false, true) => TestPreference::SecondPreferred,
        (false, false) => TestPreference::Incomparable,
    })
}
