//! Command-line front end.
//!
//! Precedence for every setting is flag > config file > built-in default.
//! Exit codes: 0 success, 1 usage error, 2 computation error,
//! 3 verification failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::format::{fmt17, nums, Num};
use crate::fuzzy::{triangular, AlphaCut, GridSpec, Interval, MembershipCurve};
use crate::inference::{
    self, BergerBoosConfig, EmptySetPolicy, HypothesisSet, InferenceConfig, Variant,
};
use crate::nuisance::{SupConfig, DEFAULT_OMEGA_GRID, DEFAULT_OMEGA_TOL};
use crate::svg::{Plot, Series};
use crate::tail::TwoSampleData;
use crate::verify::{self, VerifyGrids, DEFAULT_OUTCOME_GUARD};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "fuzzy-pvalue",
    version,
    about = "Membership functions, p-values and confidence sets from exact unconditional tests of two binomial proportions"
)]
pub struct Cli {
    /// key=value settings file; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for curve evaluation [default: available cores]
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the membership curve mu(theta) (and mu^S with --berger-boos)
    Curve(CurveArgs),
    /// Extended p-value of H0: theta in [lo, hi]
    Pvalue(PvalueArgs),
    /// Strong alpha-cut of the membership curve as a level 1 - alpha confidence set
    Ci(CiArgs),
    /// Exhaustive validity and coverage check for small m, n
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct DataArgs {
    /// Successes in arm 1
    #[arg(short = 'x', long = "x")]
    pub x: Option<usize>,
    /// Size of arm 1
    #[arg(short = 'm', long = "m")]
    pub m: Option<usize>,
    /// Successes in arm 2
    #[arg(short = 'y', long = "y")]
    pub y: Option<usize>,
    /// Size of arm 2
    #[arg(short = 'n', long = "n")]
    pub n: Option<usize>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct NumericArgs {
    /// Nuisance grid points per supremum [default: 1001]
    #[arg(long)]
    pub omega_grid: Option<usize>,
    /// Nuisance refinement resolution [default: 1e-8]
    #[arg(long)]
    pub omega_tol: Option<f64>,
    /// Grid points on a hypothesis interval [default: 201]
    #[arg(long)]
    pub hyp_grid: Option<usize>,
    /// Theta refinement resolution [default: 1e-6]
    #[arg(long)]
    pub theta_tol: Option<f64>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct VariantArgs {
    /// Use the Berger-Boos refinement with a Wald confidence set for omega
    #[arg(long)]
    pub berger_boos: bool,
    /// Level of the nuisance confidence set [default: 1e-4]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Rule when the Wald set is empty [default: full-range]
    #[arg(long, value_enum)]
    pub empty_set: Option<EmptySetArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmptySetArg {
    FullRange,
    GammaOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ThetaGridArgs {
    /// Theta grid points [default: 401]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Lower end of the theta grid [default: -0.999]
    #[arg(long, allow_hyphen_values = true)]
    pub theta_lo: Option<f64>,
    /// Upper end of the theta grid [default: 0.999]
    #[arg(long, allow_hyphen_values = true)]
    pub theta_hi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: ThetaGridArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub variant: VariantArgs,
    /// Output format: csv or json [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Output file [default: standard output]
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Also draw the curve(s) to this SVG file
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Dashed horizontal line at this level in the SVG
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Shade H0 = lo:hi in the SVG and mark its p-value
    #[arg(long, allow_hyphen_values = true)]
    pub h0: Option<String>,
    /// Emit the two triangular "about 10" membership functions instead
    #[arg(long)]
    pub demo_fuzzy: bool,
}

#[derive(Debug, Args)]
pub struct PvalueArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub variant: VariantArgs,
    /// Null hypothesis interval lo:hi
    #[arg(long, allow_hyphen_values = true)]
    pub h0: Option<String>,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CiArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: ThetaGridArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub variant: VariantArgs,
    /// Cut level; the interval has confidence 1 - alpha [default: 0.05]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Report the union of intervals rather than the hull
    #[arg(long)]
    pub union: bool,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Size of arm 1
    #[arg(short = 'm', long = "m")]
    pub m: Option<usize>,
    /// Size of arm 2
    #[arg(short = 'n', long = "n")]
    pub n: Option<usize>,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub variant: VariantArgs,
    /// Run even when (m+1)(n+1) exceeds 400
    #[arg(long)]
    pub allow_large: bool,
    /// Write the full JSON report here
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Standard output format: text or json [default: text]
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

/// Settings loaded from a `key = value` file.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| domain(format!("config line {}: expected key = value", i + 1)))?;
            entries.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.entries
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| domain(format!("config key {key}: {e}"))))
            .transpose()
    }
}

struct Resolver<'a> {
    file: &'a ConfigFile,
}

impl Resolver<'_> {
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(match flag {
            Some(v) => v,
            None => self.file.get(key)?.unwrap_or(default),
        })
    }

    fn need<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => self.file.get(key)?.ok_or_else(|| domain(format!("missing required setting --{key}"))),
        }
    }

    fn flag(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.file.get::<bool>(key)?.unwrap_or(false))
    }

    fn data(&self, a: &DataArgs) -> Result<TwoSampleData> {
        TwoSampleData::new(
            self.need(a.x, "x")?,
            self.need(a.m, "m")?,
            self.need(a.y, "y")?,
            self.need(a.n, "n")?,
        )
    }

    fn inference(&self, a: &NumericArgs) -> Result<InferenceConfig> {
        let cfg = InferenceConfig {
            sup: SupConfig {
                grid_points: self.pick(a.omega_grid, "omega-grid", DEFAULT_OMEGA_GRID)?,
                omega_tol: self.pick(a.omega_tol, "omega-tol", DEFAULT_OMEGA_TOL)?,
            },
            hypothesis_grid: self.pick(a.hyp_grid, "hyp-grid", inference::DEFAULT_HYPOTHESIS_GRID)?,
            theta_tol: self.pick(a.theta_tol, "theta-tol", inference::DEFAULT_THETA_TOL)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn variant(&self, a: &VariantArgs) -> Result<Variant> {
        if !self.flag(a.berger_boos, "berger-boos")? {
            return Ok(Variant::Plain);
        }
        let gamma = self.pick(a.gamma, "gamma", inference::DEFAULT_GAMMA)?;
        let policy = match a.empty_set {
            Some(EmptySetArg::FullRange) => EmptySetPolicy::FullRange,
            Some(EmptySetArg::GammaOnly) => EmptySetPolicy::GammaOnly,
            None => match self.file.get::<String>("empty-set")?.as_deref() {
                None | Some("full-range") => EmptySetPolicy::FullRange,
                Some("gamma-only") => EmptySetPolicy::GammaOnly,
                Some(other) => return Err(domain(format!("unknown empty-set rule {other}"))),
            },
        };
        Ok(Variant::BergerBoos(BergerBoosConfig::new(gamma)?.with_empty_set(policy)))
    }

    fn theta_grid(&self, a: &ThetaGridArgs) -> Result<GridSpec> {
        let spec = GridSpec::new(
            self.pick(a.theta_lo, "theta-lo", inference::DEFAULT_THETA_LO)?,
            self.pick(a.theta_hi, "theta-hi", inference::DEFAULT_THETA_HI)?,
            self.pick(a.grid, "grid", inference::DEFAULT_THETA_GRID)?,
        )?;
        if !(spec.lo > -1.0 && spec.hi < 1.0) {
            return Err(domain("theta grid must lie inside (-1, 1)"));
        }
        Ok(spec)
    }

    fn hypothesis(&self, flag: Option<String>) -> Result<Option<HypothesisSet>> {
        let raw = match flag {
            Some(v) => Some(v),
            None => self.file.get::<String>("h0")?,
        };
        raw.map(|s| parse_interval(&s)).transpose()
    }

    fn format(&self, flag: Option<OutputFormat>, default: OutputFormat) -> Result<OutputFormat> {
        match flag {
            Some(f) => Ok(f),
            None => match self.file.get::<String>("format")? {
                None => Ok(default),
                Some(s) => OutputFormat::from_str(&s, true).map_err(|e| domain(format!("config key format: {e}"))),
            },
        }
    }
}

/// Parses `lo:hi` into a closed hypothesis interval.
pub fn parse_interval(s: &str) -> Result<HypothesisSet> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| domain(format!("expected lo:hi, got {s:?}")))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| domain(format!("bad bound {t:?}: {e}")));
    HypothesisSet::interval(parse(a)?, parse(b)?)
}

enum Fail {
    /// Bad settings, detected before any computation.
    Usage(Error),
    Compute(Error),
}

type Outcome = std::result::Result<i32, Fail>;

fn finish(r: Result<()>) -> Outcome {
    r.map(|()| EXIT_OK).map_err(Fail::Compute)
}

fn write_output(path: Option<&Path>, stdout: &mut dyn Write, body: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body)?,
        None => stdout.write_all(body)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct DataJson {
    x: usize,
    m: usize,
    y: usize,
    n: usize,
}

impl From<&TwoSampleData> for DataJson {
    fn from(d: &TwoSampleData) -> Self {
        Self { x: d.x, m: d.m, y: d.y, n: d.n }
    }
}

#[derive(Serialize)]
struct CurveJson {
    schema_version: u32,
    kind: &'static str,
    data: DataJson,
    grid: GridSpec,
    theta: Vec<Num>,
    mu: Vec<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu_bb: Option<Vec<Num>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<Num>,
}

#[derive(Serialize)]
struct PValueJson {
    schema_version: u32,
    variant: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<Num>,
    theta_lo: Num,
    theta_hi: Num,
    p_value: Num,
    argmax_theta: Num,
    refined_argmax: bool,
}

#[derive(Serialize)]
struct IntervalJson {
    lo: Num,
    hi: Num,
}

impl From<&Interval> for IntervalJson {
    fn from(i: &Interval) -> Self {
        Self { lo: Num(i.lo), hi: Num(i.hi) }
    }
}

#[derive(Serialize)]
struct CiJson {
    schema_version: u32,
    variant: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<Num>,
    alpha: Num,
    level: Num,
    reported: &'static str,
    interval: Vec<IntervalJson>,
    hull: Option<IntervalJson>,
    intervals: Vec<IntervalJson>,
}

fn gamma_of(v: &Variant) -> Option<Num> {
    match v {
        Variant::BergerBoos(bb) => Some(Num(bb.gamma())),
        Variant::Plain => None,
    }
}

fn run_curve(a: CurveArgs, r: &Resolver<'_>, stdout: &mut dyn Write) -> Outcome {
    let format = r.format(a.format, OutputFormat::Csv).map_err(Fail::Usage)?;
    if format == OutputFormat::Text {
        return Err(Fail::Usage(domain("curve supports csv or json output")));
    }
    if let Some(alpha) = a.alpha {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Fail::Usage(domain("alpha must lie in (0, 1)")));
        }
    }
    if a.demo_fuzzy {
        return finish(demo_fuzzy(&a, format, stdout));
    }
    let data = r.data(&a.data).map_err(Fail::Usage)?;
    let cfg = r.inference(&a.numeric).map_err(Fail::Usage)?;
    let variant = r.variant(&a.variant).map_err(Fail::Usage)?;
    let spec = r.theta_grid(&a.grid).map_err(Fail::Usage)?;
    let h0 = r.hypothesis(a.h0.clone()).map_err(Fail::Usage)?;

    finish((|| {
        let plain = inference::mu_curve(&data, spec, &cfg)?;
        let bb = match variant {
            Variant::BergerBoos(_) => Some(inference::membership_curve(&data, spec, &variant, &cfg)?),
            Variant::Plain => None,
        };
        let body = match format {
            OutputFormat::Json => {
                let doc = CurveJson {
                    schema_version: 1,
                    kind: "membership-curve",
                    data: (&data).into(),
                    grid: spec,
                    theta: nums(plain.grid()),
                    mu: nums(plain.values()),
                    mu_bb: bb.as_ref().map(|c| nums(c.values())),
                    gamma: gamma_of(&variant),
                };
                let mut s = serde_json::to_string_pretty(&doc)?;
                s.push('\n');
                s.into_bytes()
            }
            _ => curve_csv(&plain, bb.as_ref())?,
        };
        write_output(a.out.as_deref(), stdout, &body)?;

        if let Some(path) = &a.svg {
            let mut series = vec![Series { label: "mu".into(), xs: plain.grid().to_vec(), ys: plain.values().to_vec() }];
            if let Some(c) = &bb {
                series.push(Series { label: "mu^S".into(), xs: c.grid().to_vec(), ys: c.values().to_vec() });
            }
            let marker = match &h0 {
                Some(h) => {
                    let p = inference::extended_pvalue(&data, h, &cfg)?;
                    Some((p.argmax_theta, p.p_value))
                }
                None => None,
            };
            let plot = Plot {
                title: format!("Membership function, x = {}/{}, y = {}/{}", data.x, data.m, data.y, data.n),
                x_label: "theta".into(),
                x_range: (-1.0, 1.0),
                series,
                level: a.alpha,
                band: h0.as_ref().map(|h| h.bounds()),
                marker,
            };
            fs::write(path, plot.render())?;
        }
        Ok(())
    })())
}

fn curve_csv(plain: &MembershipCurve, bb: Option<&MembershipCurve>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if bb.is_some() {
        w.write_record(["theta", "mu", "mu_bb"])?;
    } else {
        w.write_record(["theta", "mu"])?;
    }
    for (i, (t, v)) in plain.grid().iter().zip(plain.values()).enumerate() {
        match bb {
            Some(c) => w.write_record([fmt17(*t), fmt17(*v), fmt17(c.values()[i])])?,
            None => w.write_record([fmt17(*t), fmt17(*v)])?,
        }
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn demo_fuzzy(a: &CurveArgs, format: OutputFormat, stdout: &mut dyn Write) -> Result<()> {
    let spec = GridSpec::new(7.0, 13.0, 601)?;
    let ca = MembershipCurve::sample(spec, triangular(10.0, 1.0))?;
    let cb = MembershipCurve::sample(spec, triangular(10.0, 2.0))?;
    let body = match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Demo {
                schema_version: u32,
                kind: &'static str,
                grid: GridSpec,
                u: Vec<Num>,
                mu_a: Vec<Num>,
                mu_b: Vec<Num>,
                a_included_in_b: bool,
            }
            let doc = Demo {
                schema_version: 1,
                kind: "fuzzy-demo",
                grid: spec,
                u: nums(ca.grid()),
                mu_a: nums(ca.values()),
                mu_b: nums(cb.values()),
                a_included_in_b: crate::fuzzy::included_in(&ca, &cb)?,
            };
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s.into_bytes()
        }
        _ => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["u", "mu_a", "mu_b"])?;
            for i in 0..ca.len() {
                w.write_record([fmt17(ca.grid()[i]), fmt17(ca.values()[i]), fmt17(cb.values()[i])])?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))?
        }
    };
    write_output(a.out.as_deref(), stdout, &body)?;
    if let Some(path) = &a.svg {
        let plot = Plot {
            title: "Two membership functions for \"about 10\"".into(),
            x_label: "u".into(),
            x_range: (7.0, 13.0),
            series: vec![
                Series { label: "A".into(), xs: ca.grid().to_vec(), ys: ca.values().to_vec() },
                Series { label: "B".into(), xs: cb.grid().to_vec(), ys: cb.values().to_vec() },
            ],
            level: a.alpha,
            ..Plot::default()
        };
        fs::write(path, plot.render())?;
    }
    Ok(())
}

fn run_pvalue(a: PvalueArgs, r: &Resolver<'_>, stdout: &mut dyn Write) -> Outcome {
    let data = r.data(&a.data).map_err(Fail::Usage)?;
    let cfg = r.inference(&a.numeric).map_err(Fail::Usage)?;
    let variant = r.variant(&a.variant).map_err(Fail::Usage)?;
    let h = r
        .hypothesis(a.h0.clone())
        .map_err(Fail::Usage)?
        .ok_or_else(|| Fail::Usage(domain("missing required setting --h0 lo:hi")))?;
    finish((|| {
        let p = inference::extended_membership(&data, &h, &variant, &cfg)?;
        let doc = PValueJson {
            schema_version: 1,
            variant: variant.name(),
            gamma: gamma_of(&variant),
            theta_lo: Num(p.theta_lo),
            theta_hi: Num(p.theta_hi),
            p_value: Num(p.p_value),
            argmax_theta: Num(p.argmax_theta),
            refined_argmax: p.refined_argmax,
        };
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        write_output(a.out.as_deref(), stdout, s.as_bytes())
    })())
}

fn run_ci(a: CiArgs, r: &Resolver<'_>, stdout: &mut dyn Write) -> Outcome {
    let data = r.data(&a.data).map_err(Fail::Usage)?;
    let cfg = r.inference(&a.numeric).map_err(Fail::Usage)?;
    let variant = r.variant(&a.variant).map_err(Fail::Usage)?;
    let spec = r.theta_grid(&a.grid).map_err(Fail::Usage)?;
    let alpha = r.pick(a.alpha, "alpha", 0.05).map_err(Fail::Usage)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Fail::Usage(domain("alpha must lie in (0, 1)")));
    }
    let union = r.flag(a.union, "union").map_err(Fail::Usage)?;
    finish((|| {
        let curve = inference::membership_curve(&data, spec, &variant, &cfg)?;
        let cut: AlphaCut = inference::confidence_cut_refined(&data, &curve, alpha, &variant, &cfg)?;
        let intervals: Vec<IntervalJson> = cut.intervals.iter().map(Into::into).collect();
        let doc = CiJson {
            schema_version: 1,
            variant: variant.name(),
            gamma: gamma_of(&variant),
            alpha: Num(alpha),
            level: Num(1.0 - alpha),
            reported: if union { "union" } else { "hull" },
            interval: if union {
                cut.intervals.iter().map(Into::into).collect()
            } else {
                cut.hull.iter().map(Into::into).collect()
            },
            hull: cut.hull.as_ref().map(Into::into),
            intervals,
        };
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        write_output(a.out.as_deref(), stdout, s.as_bytes())
    })())
}

fn run_verify(a: VerifyArgs, r: &Resolver<'_>, stdout: &mut dyn Write) -> Outcome {
    let m: usize = r.need(a.m, "m").map_err(Fail::Usage)?;
    let n: usize = r.need(a.n, "n").map_err(Fail::Usage)?;
    TwoSampleData::new(0, m, 0, n).map_err(Fail::Usage)?;
    let cfg = r.inference(&a.numeric).map_err(Fail::Usage)?;
    let variant = r.variant(&a.variant).map_err(Fail::Usage)?;
    let format = r.format(a.format, OutputFormat::Text).map_err(Fail::Usage)?;
    let allow_large = r.flag(a.allow_large, "allow-large").map_err(Fail::Usage)?;
    let limit = (!allow_large).then_some(DEFAULT_OUTCOME_GUARD);
    let report = match verify::verify(m, n, &variant, &cfg, &VerifyGrids::default(), limit) {
        Ok(rep) => rep,
        Err(e @ Error::SizeGuard { .. }) => return Err(Fail::Usage(e)),
        Err(e) => return Err(Fail::Compute(e)),
    };
    let io = (|| -> Result<()> {
        let json = serde_json::to_string(&report)? + "\n";
        if let Some(p) = &a.out {
            fs::write(p, &json)?;
        }
        match format {
            OutputFormat::Json => stdout.write_all(json.as_bytes())?,
            _ => stdout.write_all(report.render_text().as_bytes())?,
        }
        Ok(())
    })();
    match io {
        Err(e) => Err(Fail::Compute(e)),
        Ok(()) if report.passed => Ok(EXIT_OK),
        Ok(()) => Ok(EXIT_VERIFY),
    }
}

/// Runs the CLI on `args`, writing results to `stdout` and diagnostics to
/// `stderr`, and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let file = match cli.config.as_deref().map(ConfigFile::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let resolver = Resolver { file: &file };
    let workers = match resolver.pick(cli.workers, "workers", 0) {
        Ok(w) => w,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_COMPUTE;
        }
    };
    // Results are buffered so the worker pool never touches the caller's writer.
    let mut buf = Vec::new();
    let outcome = pool.install(|| match cli.command {
        Command::Curve(a) => run_curve(a, &resolver, &mut buf),
        Command::Pvalue(a) => run_pvalue(a, &resolver, &mut buf),
        Command::Ci(a) => run_ci(a, &resolver, &mut buf),
        Command::Verify(a) => run_verify(a, &resolver, &mut buf),
    });
    if let Err(e) = stdout.write_all(&buf).and_then(|()| stdout.flush()) {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_COMPUTE;
    }
    match outcome {
        Ok(code) => {
            if code == EXIT_VERIFY {
                let _ = writeln!(stderr, "verification failed: a validity or coverage bound was violated");
            }
            code
        }
        Err(Fail::Usage(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
        Err(Fail::Compute(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_COMPUTE
        }
    }
}
