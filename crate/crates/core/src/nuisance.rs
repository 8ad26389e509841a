//! Supremum of the tail probability over the nuisance parameter.
//!
//! The objective is a polynomial of degree at most `m + n` in `ω`, frequently
//! multimodal. It is scanned on a uniform grid, every grid-local maximum
//! (plus both endpoints) is polished by golden-section search, and the best
//! value seen anywhere is returned. This resolves all modes at desk-scale
//! sample sizes but is not a certified global optimum; any residual error
//! can only under-estimate the supremum.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::tail::{RejectionSet, TailFamily, ThetaPoint, TwoSampleData};

pub const DEFAULT_OMEGA_GRID: usize = 1001;
pub const DEFAULT_OMEGA_TOL: f64 = 1e-8;

/// Closed interval of nuisance values over which the supremum is taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuisanceSet {
    lower: f64,
    upper: f64,
}

impl NuisanceSet {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower <= upper) {
            return Err(domain(format!("nuisance interval [{lower}, {upper}] is empty")));
        }
        Ok(Self { lower, upper })
    }

    /// The whole admissible range for `theta`.
    pub fn full(theta: ThetaPoint) -> Self {
        let (lower, upper) = theta.omega_range();
        Self { lower, upper }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.lower && omega <= self.upper
    }

    /// Intersection with `[lo, hi]`, or `None` if it is empty.
    pub fn clip(&self, lo: f64, hi: f64) -> Option<Self> {
        let lower = self.lower.max(lo);
        let upper = self.upper.min(hi);
        (lower <= upper).then_some(Self { lower, upper })
    }
}

/// Accuracy contract of the nuisance maximisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupConfig {
    pub grid_points: usize,
    pub omega_tol: f64,
}

impl Default for SupConfig {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_OMEGA_GRID,
            omega_tol: DEFAULT_OMEGA_TOL,
        }
    }
}

impl SupConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 3 {
            return Err(domain("omega grid needs at least 3 points"));
        }
        if !(self.omega_tol > 0.0) {
            return Err(domain("omega tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    pub sup_value: f64,
    pub arg_omega: f64,
    pub grid_points: usize,
    /// Whether golden-section refinement beat the best grid value.
    pub refined: bool,
}

/// Best point found by [`grid_maximize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
    pub refined: bool,
}

/// `points` equally spaced values on `[lo, hi]`, with both ends exact.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|i| if i == points - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Indices of grid-local maxima; a plateau contributes only its first point.
pub(crate) fn local_maxima(values: &[f64]) -> Vec<usize> {
    let last = values.len().saturating_sub(1);
    (0..values.len())
        .filter(|&i| {
            (i == 0 || values[i] > values[i - 1]) && (i == last || values[i] >= values[i + 1])
        })
        .collect()
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[a, b]`, stopping when the
/// bracket is narrower than `tol`. Returns the best probe.
pub fn golden_section_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
            if fd > best.1 {
                best = (d, fd);
            }
        }
    }
    Ok(best)
}

/// Grid scan over `[lo, hi]` followed by golden-section refinement around
/// every grid-local maximum. Ties keep the lowest argument.
pub fn grid_maximize<F>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> Result<Maximum>
where
    F: Fn(f64) -> Result<f64>,
{
    if lo == hi {
        return Ok(Maximum { arg: lo, value: f(lo)?, refined: false });
    }
    let grid = linspace(lo, hi, points);
    let values = grid.iter().map(|&w| f(w)).collect::<Result<Vec<_>>>()?;
    refine_candidates(&f, &grid, &values, tol)
}

/// Refinement stage of [`grid_maximize`] over already evaluated samples.
pub(crate) fn refine_candidates<F>(f: &F, grid: &[f64], values: &[f64], tol: f64) -> Result<Maximum>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut best = Maximum { arg: grid[0], value: values[0], refined: false };
    for (&w, &v) in grid.iter().zip(values) {
        if v > best.value {
            best = Maximum { arg: w, value: v, refined: false };
        }
    }
    let last = grid.len() - 1;
    for i in local_maxima(values) {
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(last)];
        let (arg, value) = golden_section_max(f, a, b, tol)?;
        if value > best.value {
            best = Maximum { arg, value, refined: true };
        }
    }
    Ok(best)
}

/// Supremum of any [`TailFamily`] over `set` (clipped to the family's range).
pub fn sup_family<T: TailFamily>(family: &T, set: NuisanceSet, cfg: &SupConfig) -> Result<SupResult> {
    cfg.validate()?;
    let (lo, hi) = family.omega_range();
    let set = set.clip(lo, hi).ok_or(Error::EmptyNuisanceSet { theta: f64::NAN })?;
    let best = grid_maximize(
        |w| family.tail(w),
        set.lower(),
        set.upper(),
        cfg.grid_points,
        cfg.omega_tol,
    )?;
    Ok(SupResult {
        sup_value: best.value,
        arg_omega: best.arg,
        grid_points: cfg.grid_points,
        refined: best.refined,
    })
}

/// `sup_{ω ∈ set} P_{θ,ω}((X, Y) ∈ C)`.
pub fn sup_tail(
    data: &TwoSampleData,
    theta: ThetaPoint,
    set: NuisanceSet,
    cfg: &SupConfig,
) -> Result<SupResult> {
    sup_rejection(&RejectionSet::new(data, theta), set, cfg)
}

pub(crate) fn sup_rejection(c: &RejectionSet, set: NuisanceSet, cfg: &SupConfig) -> Result<SupResult> {
    sup_family(c, set, cfg).map_err(|e| match e {
        Error::EmptyNuisanceSet { .. } => Error::EmptyNuisanceSet { theta: c.theta().value() },
        e => e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tail::joint_tail;
    use proptest::prelude::*;

    fn data(x: usize, m: usize, y: usize, n: usize) -> TwoSampleData {
        TwoSampleData::new(x, m, y, n).unwrap()
    }

    fn th(t: f64) -> ThetaPoint {
        ThetaPoint::new(t).unwrap()
    }

    fn full(t: f64) -> NuisanceSet {
        NuisanceSet::full(th(t))
    }

    #[test]
    fn hand_maximum() {
        let r = sup_tail(&data(0, 1, 1, 1), th(0.0), full(0.0), &SupConfig::default()).unwrap();
        assert!((r.sup_value - 0.5).abs() < 1e-15);
        assert!((r.arg_omega - 0.5).abs() < 1e-7);
    }

    #[test]
    fn flat_at_observed_theta() {
        let d = data(4, 10, 17, 20);
        let t = d.theta_hat();
        let r = sup_tail(&d, th(t), full(t), &SupConfig::default()).unwrap();
        assert!((r.sup_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn case_study_dense_grid() {
        // 1e5-point grid oracle: 0.23870188492310682 at ω ≈ 0.43508
        let r = sup_tail(&data(4, 10, 17, 20), th(0.2), full(0.2), &SupConfig::default()).unwrap();
        assert!((r.sup_value - 0.238_701_884_923_106_8).abs() < 1e-6, "{}", r.sup_value);
        assert!(r.sup_value >= 0.238_701_884_923_106_8 - 1e-15);
        assert!((r.arg_omega - 0.435_08).abs() < 1e-4);
    }

    #[test]
    fn rust_side_dense_grid_agrees() {
        let d = data(4, 10, 17, 20);
        let c = RejectionSet::new(&d, th(0.2));
        let dense = linspace(0.0, 0.8, 100_001)
            .into_iter()
            .map(|w| c.joint_tail(w).unwrap())
            .fold(0.0, f64::max);
        let r = sup_tail(&d, th(0.2), full(0.2), &SupConfig::default()).unwrap();
        assert!(r.sup_value >= dense - 1e-12 && r.sup_value - dense < 1e-6);
    }

    #[test]
    fn empty_and_degenerate_sets() {
        let d = data(4, 10, 17, 20);
        let out = NuisanceSet::new(0.9, 0.95).unwrap();
        assert!(matches!(
            sup_tail(&d, th(0.2), out, &SupConfig::default()),
            Err(Error::EmptyNuisanceSet { .. })
        ));
        let point = NuisanceSet::new(0.3, 0.3).unwrap();
        let r = sup_tail(&d, th(0.2), point, &SupConfig::default()).unwrap();
        assert_eq!(r.sup_value, joint_tail(&d, th(0.2), 0.3).unwrap());
        assert!(NuisanceSet::new(0.5, 0.4).is_err());
    }

    #[test]
    fn config_checks() {
        let d = data(1, 2, 1, 2);
        let bad = SupConfig { grid_points: 2, omega_tol: 1e-8 };
        assert!(sup_tail(&d, th(0.0), full(0.0), &bad).is_err());
        let bad = SupConfig { grid_points: 11, omega_tol: 0.0 };
        assert!(sup_tail(&d, th(0.0), full(0.0), &bad).is_err());
    }

    #[test]
    fn plateau_yields_single_candidate() {
        assert_eq!(local_maxima(&[1.0; 7]), vec![0]);
        assert_eq!(local_maxima(&[0.0, 1.0, 0.5, 0.7, 0.7, 0.1]), vec![1, 3]);
    }

    #[test]
    fn grid_convergence_on_case_study() {
        let d = data(4, 10, 17, 20);
        let coarse = SupConfig::default();
        let fine = SupConfig { grid_points: 2001, ..coarse };
        for t in linspace(-0.9, 0.9, 37) {
            let a = sup_tail(&d, th(t), full(t), &coarse).unwrap().sup_value;
            let b = sup_tail(&d, th(t), full(t), &fine).unwrap().sup_value;
            assert!((a - b).abs() < 1e-6, "theta={t} {a} {b}");
        }
    }

    #[test]
    fn deterministic() {
        let d = data(3, 7, 5, 9);
        let a = sup_tail(&d, th(0.1), full(0.1), &SupConfig::default()).unwrap();
        let b = sup_tail(&d, th(0.1), full(0.1), &SupConfig::default()).unwrap();
        assert_eq!(a.sup_value.to_bits(), b.sup_value.to_bits());
        assert_eq!(a.arg_omega.to_bits(), b.arg_omega.to_bits());
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn dominates_random_probes(x in 0usize..=8, m in 1usize..=8, y in 0usize..=8, n in 1usize..=8,
                                   t in -0.95f64..0.95, seed in 0u64..1000) {
            let d = data(x.min(m), m, y.min(n), n);
            let r = sup_tail(&d, th(t), full(t), &SupConfig::default()).unwrap();
            let (lo, hi) = th(t).omega_range();
            prop_assert!(r.arg_omega >= lo && r.arg_omega <= hi);
            let c = RejectionSet::new(&d, th(t));
            for k in 0..64u64 {
                let f = ((seed * 64 + k) as f64 * 0.618_033_988_749_895).fract();
                let w = lo + f * (hi - lo);
                prop_assert!(r.sup_value >= c.joint_tail(w).unwrap() - 1e-12);
            }
        }

        #[test]
        fn monotone_in_the_set(x in 0usize..=6, y in 0usize..=6, t in -0.9f64..0.9,
                               a in 0.0f64..1.0, b in 0.0f64..1.0, grow in 0.0f64..1.0) {
            let d = data(x, 6, y, 6);
            let (lo, hi) = th(t).omega_range();
            let (p, q) = if a <= b { (a, b) } else { (b, a) };
            let inner = NuisanceSet::new(lo + p * (hi - lo), lo + q * (hi - lo)).unwrap();
            let outer = NuisanceSet::new(inner.lower() - grow * (inner.lower() - lo),
                                         inner.upper() + grow * (hi - inner.upper())).unwrap();
            let cfg = SupConfig::default();
            let si = sup_tail(&d, th(t), inner, &cfg).unwrap().sup_value;
            let so = sup_tail(&d, th(t), outer, &cfg).unwrap().sup_value;
            prop_assert!(so >= si - 1e-9, "{} < {}", so, si);
        }
    }
}
