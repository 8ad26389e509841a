//! Fuzzy sets over a sampled real universe: height, strong α-cuts and
//! inclusion, plus CSV/JSON persistence of membership curves.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::format::{fmt17, nums, Num};
use crate::nuisance::linspace;

/// Default resolution for refined cut endpoints.
pub const CUT_TOL: f64 = 1e-6;

/// Slack used by [`included_in`].
pub const INCLUSION_TOL: f64 = 1e-12;

/// Uniform grid description `(lo, hi, count)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo < hi) || count < 2 {
            return Err(domain(format!("bad grid [{lo}, {hi}] x {count}")));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.count)
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.count - 1) as f64
    }
}

/// A membership function sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipCurve {
    grid: Vec<f64>,
    values: Vec<f64>,
    meta: GridSpec,
}

impl MembershipCurve {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(domain("grid and values differ in length"));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(domain("grid must be strictly increasing"));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(domain(format!("membership grade {v} outside [0, 1]")));
        }
        let meta = GridSpec {
            lo: grid.first().copied().unwrap_or(0.0),
            hi: grid.last().copied().unwrap_or(0.0),
            count: grid.len(),
        };
        Ok(Self { grid, values, meta })
    }

    /// Samples `f` on a uniform grid.
    pub fn sample<F: Fn(f64) -> f64>(spec: GridSpec, f: F) -> Result<Self> {
        let grid = spec.points();
        let values = grid.iter().map(|&u| f(u)).collect();
        let mut curve = Self::new(grid, values)?;
        curve.meta = spec;
        Ok(curve)
    }

    pub(crate) fn with_meta(mut self, meta: GridSpec) -> Self {
        self.meta = meta;
        self
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> GridSpec {
        self.meta
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index of the largest grade (first one on ties).
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, &v) in self.values.iter().enumerate() {
            if best.is_none_or(|b| v > self.values[b]) {
                best = Some(i);
            }
        }
        best
    }

    /// Piecewise-linear interpolation, constant outside the grid.
    pub fn interpolate(&self, u: f64) -> f64 {
        let g = &self.grid;
        match g.partition_point(|&p| p <= u) {
            0 => self.values[0],
            i if i == g.len() => self.values[g.len() - 1],
            i => {
                let (a, b) = (g[i - 1], g[i]);
                let t = (u - a) / (b - a);
                self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
            }
        }
    }

    /// Writes `u,mu` rows (header named by `labels`) with 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W, labels: (&str, &str)) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([labels.0, labels.1])?;
        for (u, v) in self.grid.iter().zip(&self.values) {
            out.write_record([fmt17(*u), fmt17(*v)])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a two-column CSV written by [`MembershipCurve::write_csv`].
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| domain("short CSV row"))?
                    .trim()
                    .parse()
                    .map_err(|e| domain(format!("bad number in CSV: {e}")))
            };
            grid.push(parse(0)?);
            values.push(parse(1)?);
        }
        Self::new(grid, values)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&CurveJson {
            schema_version: 1,
            grid: self.meta,
            u: nums(&self.grid),
            mu: nums(&self.values),
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: CurveJson = serde_json::from_str(s)?;
        if c.schema_version != 1 {
            return Err(domain(format!("unsupported schema_version {}", c.schema_version)));
        }
        let grid = c.u.iter().map(|n| n.0).collect();
        let values = c.mu.iter().map(|n| n.0).collect();
        Ok(Self::new(grid, values)?.with_meta(c.grid))
    }
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    schema_version: u32,
    grid: GridSpec,
    u: Vec<Num>,
    mu: Vec<Num>,
}

/// An open interval of the universe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, u: f64) -> bool {
        u >= self.lo && u <= self.hi
    }

    pub fn covers(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// `{u : μ(u) > α}` as disjoint ordered intervals, plus their convex hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaCut {
    pub alpha: f64,
    pub intervals: Vec<Interval>,
    pub hull: Option<Interval>,
}

impl AlphaCut {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, u: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(u))
    }

    /// Every interval of `other` lies inside some interval of `self`.
    pub fn covers(&self, other: &AlphaCut) -> bool {
        other
            .intervals
            .iter()
            .all(|o| self.intervals.iter().any(|s| s.covers(o)))
    }
}

/// Largest membership grade on the sampled grid.
pub fn height(curve: &MembershipCurve) -> Result<f64> {
    curve
        .argmax()
        .map(|i| curve.values[i])
        .ok_or_else(|| domain("height of an empty curve"))
}

/// Shrinks `[inside, outside]` (in either order) around the point where
/// `pred` switches from true to false.
pub fn bisect_boundary<P: FnMut(f64) -> bool>(mut inside: f64, mut outside: f64, mut pred: P, tol: f64) -> f64 {
    while (outside - inside).abs() > tol {
        let mid = 0.5 * (inside + outside);
        if pred(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (inside + outside)
}

fn runs(values: &[f64], alpha: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &v) in values.iter().enumerate() {
        match (v > alpha, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, values.len() - 1));
    }
    out
}

fn cut_with<P: FnMut(f64) -> bool>(curve: &MembershipCurve, alpha: f64, mut above: P, tol: f64) -> Result<AlphaCut> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha = {alpha} outside (0, 1)")));
    }
    let g = &curve.grid;
    let last = g.len().saturating_sub(1);
    let intervals: Vec<Interval> = runs(&curve.values, alpha)
        .into_iter()
        .map(|(s, e)| {
            let lo = if s == 0 { g[0] } else { bisect_boundary(g[s], g[s - 1], &mut above, tol) };
            let hi = if e == last { g[last] } else { bisect_boundary(g[e], g[e + 1], &mut above, tol) };
            Interval { lo, hi }
        })
        .collect();
    let hull = match (intervals.first(), intervals.last()) {
        (Some(a), Some(b)) => Some(Interval { lo: a.lo, hi: b.hi }),
        _ => None,
    };
    Ok(AlphaCut { alpha, intervals, hull })
}

/// Strong α-cut of a sampled curve. Boundaries between a grid point inside
/// the cut and its neighbour outside are located by bisection on the
/// linear interpolant to [`CUT_TOL`].
pub fn strong_cut(curve: &MembershipCurve, alpha: f64) -> Result<AlphaCut> {
    cut_with(curve, alpha, |u| curve.interpolate(u) > alpha, CUT_TOL)
}

/// Strong α-cut whose boundaries are located by bisection on the
/// underlying membership function `f` instead of the interpolant.
pub fn strong_cut_refined<F>(curve: &MembershipCurve, alpha: f64, f: F, tol: f64) -> Result<AlphaCut>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut failure = None;
    let cut = cut_with(
        curve,
        alpha,
        |u| match f(u) {
            Ok(v) => v > alpha,
            Err(e) => {
                failure.get_or_insert(e);
                false
            }
        },
        tol,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(cut),
    }
}

/// `μ_a(u) ≤ μ_b(u)` at every grid point, up to [`INCLUSION_TOL`].
pub fn included_in(a: &MembershipCurve, b: &MembershipCurve) -> Result<bool> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok(a.values.iter().zip(&b.values).all(|(x, y)| *x <= *y + INCLUSION_TOL))
}

/// Symmetric triangular membership `max(0, 1 − |u − center| / spread)`.
pub fn triangular(center: f64, spread: f64) -> impl Fn(f64) -> f64 {
    move |u| (1.0 - (u - center).abs() / spread).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve_a(lo: f64, hi: f64, count: usize) -> MembershipCurve {
        MembershipCurve::sample(GridSpec::new(lo, hi, count).unwrap(), triangular(10.0, 1.0)).unwrap()
    }

    fn curve_b(lo: f64, hi: f64, count: usize) -> MembershipCurve {
        MembershipCurve::sample(GridSpec::new(lo, hi, count).unwrap(), triangular(10.0, 2.0)).unwrap()
    }

    #[test]
    fn heights() {
        assert_eq!(height(&curve_a(8.0, 12.0, 401)).unwrap(), 1.0);
        assert_eq!(height(&curve_b(7.0, 13.0, 601)).unwrap(), 1.0);
        let zero = MembershipCurve::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(height(&zero).unwrap(), 0.0);
        let empty = MembershipCurve::new(vec![], vec![]).unwrap();
        assert!(height(&empty).is_err());
    }

    #[test]
    fn triangle_cuts() {
        let a = strong_cut(&curve_a(8.0, 12.0, 401), 0.5).unwrap();
        assert_eq!(a.intervals.len(), 1);
        let h = a.hull.unwrap();
        assert!((h.lo - 9.5).abs() < 1e-6 && (h.hi - 10.5).abs() < 1e-6, "{h:?}");

        let b = strong_cut(&curve_b(7.0, 13.0, 601), 0.5).unwrap();
        let h = b.hull.unwrap();
        assert!((h.lo - 9.0).abs() < 1e-6 && (h.hi - 11.0).abs() < 1e-6, "{h:?}");
    }

    #[test]
    fn cut_just_below_peak() {
        let c = strong_cut(&curve_a(8.0, 12.0, 401), 0.999).unwrap();
        let h = c.hull.unwrap();
        assert!(h.contains(10.0) && h.width() < 0.003);
    }

    #[test]
    fn cut_of_multimodal_curve() {
        let c = MembershipCurve::new(
            vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            vec![0.9, 0.1, 0.8, 0.8, 0.2, 0.6],
        )
        .unwrap();
        let cut = strong_cut(&c, 0.5).unwrap();
        assert_eq!(cut.intervals.len(), 3);
        assert_eq!(cut.intervals[0].lo, 0.0);
        assert!((cut.intervals[0].hi - 0.5).abs() < 1e-6);
        assert_eq!(cut.intervals[2].hi, 5.0);
        assert_eq!(cut.hull, Some(Interval { lo: 0.0, hi: 5.0 }));
        assert!(strong_cut(&c, 0.95).unwrap().is_empty());
        assert!(strong_cut(&c, 0.0).is_err());
        assert!(strong_cut(&c, 1.0).is_err());
    }

    #[test]
    fn inclusion_of_triangles() {
        let a = curve_a(7.0, 13.0, 601);
        let b = curve_b(7.0, 13.0, 601);
        assert!(included_in(&a, &b).unwrap());
        assert!(included_in(&a, &a).unwrap());
        assert!(!included_in(&b, &a).unwrap());
        // μ_B(8.5) = 0.25 > μ_A(8.5) = 0
        assert_eq!(triangular(10.0, 2.0)(8.5), 0.25);
        assert_eq!(triangular(10.0, 1.0)(8.5), 0.0);
        assert!(matches!(included_in(&a, &curve_b(7.0, 13.0, 301)), Err(Error::GridMismatch)));
    }

    #[test]
    fn constructor_checks() {
        assert!(MembershipCurve::new(vec![0.0, 1.0], vec![0.5]).is_err());
        assert!(MembershipCurve::new(vec![1.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(MembershipCurve::new(vec![0.0, 1.0], vec![0.5, 1.5]).is_err());
        assert!(MembershipCurve::new(vec![0.0, 1.0], vec![f64::NAN, 0.5]).is_err());
        assert!(GridSpec::new(1.0, 0.0, 5).is_err());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let c = curve_b(7.0, 13.0, 61);
        let mut buf = Vec::new();
        c.write_csv(&mut buf, ("u", "mu")).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("u,mu\n"));
        assert_eq!(MembershipCurve::read_csv(&buf[..]).unwrap(), c);
        let back = MembershipCurve::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    fn arb_curve() -> impl Strategy<Value = MembershipCurve> {
        prop::collection::vec(0.0f64..=1.0, 2..60).prop_map(|vals| {
            let grid = (0..vals.len()).map(|i| i as f64 * 0.1).collect();
            MembershipCurve::new(grid, vals).unwrap()
        })
    }

    proptest! {
        #[test]
        fn cuts_nest(c in arb_curve(), a in 0.01f64..0.99, b in 0.01f64..0.99) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let wide = strong_cut(&c, lo).unwrap();
            let narrow = strong_cut(&c, hi).unwrap();
            prop_assert!(wide.covers(&narrow));
        }

        #[test]
        fn nonempty_iff_height_exceeds(c in arb_curve(), a in 0.01f64..0.99) {
            let cut = strong_cut(&c, a).unwrap();
            prop_assert_eq!(!cut.is_empty(), height(&c).unwrap() > a);
        }

        #[test]
        fn cut_is_faithful_on_grid(c in arb_curve(), a in 0.01f64..0.99) {
            let cut = strong_cut(&c, a).unwrap();
            for (&u, &v) in c.grid().iter().zip(c.values()) {
                // boundaries sit strictly between grid points, so membership
                // of grid points is decided by the grade alone
                prop_assert_eq!(cut.contains(u), v > a);
            }
            if let Some(h) = cut.hull {
                prop_assert!(cut.intervals.iter().all(|i| h.covers(i)));
            }
        }

        #[test]
        fn inclusion_is_a_partial_order(a in arb_curve(), shift1 in 0.0f64..0.3, shift2 in 0.0f64..0.3) {
            let b = MembershipCurve::new(a.grid().to_vec(),
                a.values().iter().map(|v| (v + shift1).min(1.0)).collect()).unwrap();
            let c = MembershipCurve::new(a.grid().to_vec(),
                b.values().iter().map(|v| (v + shift2).min(1.0)).collect()).unwrap();
            prop_assert!(included_in(&a, &a).unwrap());
            prop_assert!(included_in(&a, &b).unwrap() && included_in(&b, &c).unwrap());
            prop_assert!(included_in(&a, &c).unwrap());
            if included_in(&b, &a).unwrap() {
                prop_assert!(a.values().iter().zip(b.values()).all(|(x, y)| (x - y).abs() <= 1e-12));
            }
        }
    }
}
