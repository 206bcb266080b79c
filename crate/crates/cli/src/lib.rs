//! Command-line front end: runs a sweep, assembles a report, writes it as
//! JSON or CSV.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use hypmt_core::functionals;
use hypmt_core::profiles::{self, ProfileDocument, RadialProfile};
use hypmt_core::sequences::{self, Outcome};
use hypmt_core::verify::{self, LemmaGrid, Spacing};
use hypmt_core::{make_context, DimensionContext, Precision};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "HMT_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid --{field}: {message}")]
    Usage { field: &'static str, message: String },
    #[error("{context}: {source}")]
    Numeric {
        context: String,
        source: hypmt_core::Error,
    },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn usage(field: &'static str, message: impl Into<String>) -> CliError {
    CliError::Usage {
        field,
        message: message.into(),
    }
}

trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T> Context<T> for hypmt_core::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|source| CliError::Numeric {
            context: what(),
            source,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Subcommand)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Sweep the lemma functions F, G, H over a radius grid.
    VerifyLemma,
    /// Check the energy comparison on a seeded corpus or one profile.
    VerifyComparison,
    /// Closed forms and limits of the psi_k family.
    PsiK,
    /// Moser-sequence normalization and blow-up ratios.
    Moser,
    /// Lower bound for the Moser-Trudinger supremum.
    LowerBound,
    /// All functionals of one profile.
    ProfileReport,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyLemma => "verify-lemma",
            Command::VerifyComparison => "verify-comparison",
            Command::PsiK => "psi-k",
            Command::Moser => "moser",
            Command::LowerBound => "lower-bound",
            Command::ProfileReport => "profile-report",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionArg {
    #[default]
    Double,
    Extended,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "hypmt", version, about = "Hyperbolic rearrangement and Moser-Trudinger checks")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Dimension.
    #[arg(long, global = true, default_value_t = 2)]
    pub n: u32,
    /// Hardy shift lambda (psi-k, lower-bound).
    #[arg(long, global = true, default_value_t = 0.0)]
    pub lambda: f64,
    /// Exponent as a multiple of the sharp alpha_n (moser, profile-report).
    #[arg(long, global = true, default_value_t = 1.0)]
    pub alpha_factor: f64,
    /// Denominator power; defaults to n/(n-1).
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub t_min: f64,
    #[arg(long, global = true, default_value_t = 20.0)]
    pub t_max: f64,
    /// Grid points for verify-lemma.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub points: usize,
    /// Comma-separated k values (psi-k, moser).
    #[arg(long = "k", global = true, value_delimiter = ',')]
    pub k: Vec<f64>,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Number of random profiles for verify-comparison.
    #[arg(long, global = true, default_value_t = 100)]
    pub count: usize,
    /// `double` escalates to extended precision where needed; `extended`
    /// forces it everywhere.
    #[arg(long, global = true, value_enum, default_value_t = PrecisionArg::Double)]
    pub precision: PrecisionArg,
    /// Output file; without it the report goes to $HMT_OUTPUT_DIR/<command>.<ext>
    /// or, failing that, stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Profile document (JSON with n, knots, values).
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
}

impl RunConfig {
    /// Parses arguments as the binary would, without exiting on error.
    pub fn from_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        RunConfig::try_parse_from(args)
    }

    fn context(&self) -> Result<DimensionContext, CliError> {
        make_context(self.n).map_err(|e| usage("n", e.to_string()))
    }

    fn ks(&self, default: &[f64]) -> Vec<f64> {
        if self.k.is_empty() {
            default.to_vec()
        } else {
            self.k.clone()
        }
    }

    /// Range checks for the selected command, before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let ctx = self.context()?;
        match self.command {
            Command::VerifyLemma => {
                LemmaGrid::new(self.t_min, self.t_max, self.points, Spacing::Log)
                    .map_err(|e| usage("t-min/t-max/points", e.to_string()))?;
            }
            Command::PsiK | Command::LowerBound => {
                if !(self.lambda >= 0.0 && self.lambda < ctx.hardy()) {
                    return Err(usage(
                        "lambda",
                        format!("{} is outside [0, {})", self.lambda, ctx.hardy()),
                    ));
                }
                if self.command == Command::PsiK {
                    if let Some(k) = self.k.iter().find(|&&k| !(k >= 1.0 && k.is_finite())) {
                        return Err(usage("k", format!("{k} is not >= 1")));
                    }
                }
            }
            Command::Moser => {
                if let Some(k) = self.k.iter().find(|&&k| !(k >= 2.0 && k.is_finite())) {
                    return Err(usage("k", format!("{k} is not >= 2")));
                }
            }
            Command::VerifyComparison | Command::ProfileReport => {}
        }
        if matches!(self.command, Command::Moser | Command::ProfileReport) {
            if !(self.alpha_factor > 0.0 && self.alpha_factor.is_finite()) {
                return Err(usage("alpha-factor", format!("{} is not > 0", self.alpha_factor)));
            }
            if let Some(p) = self.p {
                if !(p >= 0.0 && p.is_finite()) {
                    return Err(usage("p", format!("{p} is not >= 0")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub items: usize,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    /// Smallest slack over all checks (normalized where the check is).
    pub min_slack: Option<f64>,
    /// Derived numbers: fitted exponents, extremes over the sweep.
    pub trends: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub columns: Vec<String>,
    pub items: Vec<Value>,
    pub summary: Summary,
    pub all_pass: bool,
    pub timings: Timings,
}

impl RunReport {
    /// The report as a JSON value with the timing field removed, for
    /// comparisons across runs.
    pub fn without_timings(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        v.as_object_mut().expect("report is an object").remove("timings");
        v
    }
}

/// Accumulates check outcomes while rows are produced.
#[derive(Default)]
struct Tally {
    checks: usize,
    passed: usize,
    min_slack: Option<f64>,
}

impl Tally {
    fn record(&mut self, pass: bool, slack: f64) {
        self.checks += 1;
        if pass {
            self.passed += 1;
        }
        self.min_slack = Some(self.min_slack.map_or(slack, |m| m.min(slack)));
    }
}

struct Output {
    columns: &'static [&'static str],
    items: Vec<Value>,
    tally: Tally,
    trends: BTreeMap<String, f64>,
}

fn row(columns: &[&str], values: Vec<Value>) -> Value {
    debug_assert_eq!(columns.len(), values.len());
    let map: Map<String, Value> = columns.iter().map(|c| c.to_string()).zip(values).collect();
    Value::Object(map)
}

fn precision_name(p: Precision) -> &'static str {
    match p {
        Precision::Double => "double",
        Precision::Extended => "extended",
    }
}

const LEMMA_COLUMNS: &[&str] = &["t", "f_hat", "g_hat", "h_hat", "f_over_phi_n", "precision"];

fn run_lemma(cfg: &RunConfig, ctx: &DimensionContext) -> Result<Output, CliError> {
    let grid = LemmaGrid::log(cfg.t_min, cfg.t_max, cfg.points).map_err(|e| usage("t-min/t-max/points", e.to_string()))?;
    let forced = match cfg.precision {
        PrecisionArg::Double => None,
        PrecisionArg::Extended => Some(Precision::Extended),
    };
    let (report, values) = verify::sweep_lemma_values(ctx, &grid, forced).context(|| format!("lemma sweep n={}", cfg.n))?;
    let items = values
        .iter()
        .map(|v| {
            row(
                LEMMA_COLUMNS,
                vec![
                    json!(v.t),
                    json!(v.f_hat),
                    json!(v.g_hat),
                    json!(v.h_hat),
                    json!(v.f_over_phi_n),
                    json!(precision_name(v.precision)),
                ],
            )
        })
        .collect();
    let mut tally = Tally::default();
    let slack = match report.equality_deviation {
        Some(d) => report.tolerance - d,
        None => [Some(report.min_f), report.min_g, report.min_h]
            .into_iter()
            .flatten()
            .fold(f64::INFINITY, f64::min),
    };
    tally.record(report.pass, slack);
    let mut trends = BTreeMap::new();
    trends.insert("min_f".into(), report.min_f);
    trends.insert("argmin_f".into(), report.argmin_f);
    if let Some(g) = report.min_g {
        trends.insert("min_g".into(), g);
    }
    if let Some(h) = report.min_h {
        trends.insert("min_h".into(), h);
    }
    if let Some(d) = report.equality_deviation {
        trends.insert("equality_deviation".into(), d);
    }
    trends.insert("f_over_phi_n_at_t_min".into(), report.f_over_phi_n_at_t_min);
    trends.insert("extended_points".into(), report.extended_points as f64);
    Ok(Output {
        columns: LEMMA_COLUMNS,
        items,
        tally,
        trends,
    })
}

const COMPARISON_COLUMNS: &[&str] = &[
    "profile_id",
    "knots",
    "support",
    "lhs",
    "euclidean_energy",
    "extra_term",
    "weak_slack",
    "strong_slack",
    "hardy_slack",
    "tolerance",
    "pass",
];

fn load_profile(path: &Path) -> Result<(u32, RadialProfile), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let doc = ProfileDocument::from_json(&text).context(|| path.display().to_string())?;
    let n = doc.n;
    let (_, v) = doc.into_parts().context(|| path.display().to_string())?;
    Ok((n, v))
}

fn profiles_for(cfg: &RunConfig) -> Result<Vec<RadialProfile>, CliError> {
    match &cfg.profile {
        Some(path) => {
            let (n, v) = load_profile(path)?;
            if n != cfg.n {
                return Err(usage("n", format!("{} differs from the profile's n = {n}", cfg.n)));
            }
            Ok(vec![v])
        }
        None => profiles::random_corpus(cfg.seed, cfg.count, 1.0).context(|| format!("corpus seed={}", cfg.seed)),
    }
}

fn run_comparison(cfg: &RunConfig, ctx: &DimensionContext) -> Result<Output, CliError> {
    let corpus = profiles_for(cfg)?;
    let mut tally = Tally::default();
    let mut items = Vec::with_capacity(corpus.len());
    for (i, v) in corpus.iter().enumerate() {
        let weak = verify::check_comparison(ctx, v, false).context(|| format!("profile {i}"))?;
        let strong = verify::check_comparison(ctx, v, true).context(|| format!("profile {i}"))?;
        let hardy = verify::check_hardy(ctx, v, Default::default()).context(|| format!("profile {i}"))?;
        for c in [&weak, &strong, &hardy] {
            tally.record(c.pass, c.slack / (1.0 + c.lhs.abs()));
        }
        items.push(row(
            COMPARISON_COLUMNS,
            vec![
                json!(i),
                json!(v.knots().len()),
                json!(v.support()),
                json!(weak.lhs),
                json!(weak.rhs),
                json!(strong.rhs - weak.rhs),
                json!(weak.slack),
                json!(strong.slack),
                json!(hardy.slack),
                json!(strong.tolerance),
                json!(weak.pass && strong.pass && hardy.pass),
            ],
        ));
    }
    Ok(Output {
        columns: COMPARISON_COLUMNS,
        items,
        tally,
        trends: BTreeMap::new(),
    })
}

const PSI_COLUMNS: &[&str] = &[
    "k",
    "lambda",
    "ln_norm_closed",
    "energy_closed",
    "ln_norm_quadrature",
    "energy_quadrature",
    "a_k_n",
    "product",
    "limit_target",
    "relative_gap",
];

/// Largest k whose quadrature cross-check is attempted.
const PSI_QUADRATURE_MAX_K: f64 = 1e4;
const PSI_QUADRATURE_TOL: f64 = 1e-8;

fn run_psi_k(cfg: &RunConfig, ctx: &DimensionContext) -> Result<Output, CliError> {
    let ks = cfg.ks(&[2.0, 5.0, 20.0, 100.0, 1e3, 1e4, 1e5, 1e6]);
    let records = sequences::psi_k_sweep(ctx, &ks, cfg.lambda).context(|| "psi_k closed forms".into())?;
    let mut tally = Tally::default();
    let mut items = Vec::new();
    let mut gaps = Vec::new();
    for r in &records {
        let (qn, qe) = if r.k <= PSI_QUADRATURE_MAX_K {
            let (qn, qe) = sequences::psi_k_norms_quadrature(ctx, r.k).context(|| format!("psi_k quadrature k={}", r.k))?;
            let dev = ((qn - r.ln_norm_closed) / r.ln_norm_closed)
                .abs()
                .max(((qe - r.energy_closed) / r.energy_closed).abs());
            tally.record(dev <= PSI_QUADRATURE_TOL, PSI_QUADRATURE_TOL - dev);
            (Some(qn), Some(qe))
        } else {
            (None, None)
        };
        let gap = (r.product - r.limit_target).abs() / r.limit_target;
        gaps.push((r.k, gap));
        items.push(row(
            PSI_COLUMNS,
            vec![
                json!(r.k),
                json!(r.lambda),
                json!(r.ln_norm_closed),
                json!(r.energy_closed),
                json!(qn),
                json!(qe),
                json!(r.a_k_n),
                json!(r.product),
                json!(r.limit_target),
                json!(gap),
            ],
        ));
    }
    let mut trends = BTreeMap::new();
    let fit: Vec<(f64, f64)> = gaps.iter().copied().filter(|&(k, g)| k >= 100.0 && g > 0.0).collect();
    if fit.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = fit.into_iter().unzip();
        if let Ok((e, _)) = sequences::fit_power_law(&xs, &ys) {
            trends.insert("gap_decay_exponent".into(), -e);
        }
    }
    Ok(Output {
        columns: PSI_COLUMNS,
        items,
        tally,
        trends,
    })
}

const MOSER_COLUMNS: &[&str] = &[
    "k",
    "c_k",
    "c_k_pow_k_minus_k",
    "k_ln_norm",
    "constraint",
    "alpha",
    "p",
    "ratio",
    "ln_ratio",
    "outcome",
];
const MOSER_CONSTRAINT_TOL: f64 = 1e-6;

fn run_moser(cfg: &RunConfig, ctx: &DimensionContext) -> Result<Output, CliError> {
    let ks = cfg.ks(&[5.0, 10.0, 20.0, 40.0]);
    let alpha = cfg.alpha_factor * ctx.alpha();
    let p = cfg.p.unwrap_or(ctx.conjugate());
    let records = sequences::blowup_sweep(ctx, &ks, alpha, p).context(|| "blow-up ratio".into())?;
    let mut tally = Tally::default();
    let mut items = Vec::new();
    for r in &records {
        let m = sequences::moser_function(ctx, r.k).context(|| format!("moser k={}", r.k))?;
        let constraint = sequences::moser_constraint_direct(ctx, &m).context(|| format!("moser constraint k={}", r.k))?;
        let dev = (constraint - 1.0).abs();
        tally.record(dev <= MOSER_CONSTRAINT_TOL, MOSER_CONSTRAINT_TOL - dev);
        items.push(row(
            MOSER_COLUMNS,
            vec![
                json!(r.k),
                json!(r.c_k),
                json!(r.c_k.powf(ctx.conjugate()) * r.k - r.k),
                json!(r.k * r.ln_norm),
                json!(constraint),
                json!(r.alpha),
                json!(r.p),
                json!(r.ratio),
                json!(r.ln_ratio),
                json!(match r.outcome {
                    Outcome::Finite => "finite",
                    Outcome::Diverged => "diverged",
                }),
            ],
        ));
    }
    let mut trends = BTreeMap::new();
    if !records.is_empty() {
        let max = records.iter().map(|r| r.ln_ratio).fold(f64::MIN, f64::max);
        let min = records.iter().map(|r| r.ln_ratio).fold(f64::MAX, f64::min);
        trends.insert("ratio_max_over_min".into(), (max - min).exp());
        trends.insert("ln_ratio_max".into(), max);
    }
    Ok(Output {
        columns: MOSER_COLUMNS,
        items,
        tally,
        trends,
    })
}

const LOWER_BOUND_COLUMNS: &[&str] = &["n", "lambda", "alpha_n", "hardy", "lower_bound"];

fn run_lower_bound(cfg: &RunConfig, ctx: &DimensionContext) -> Result<Output, CliError> {
    let value = sequences::lower_bound(ctx, cfg.lambda).context(|| "lower bound".into())?;
    Ok(Output {
        columns: LOWER_BOUND_COLUMNS,
        items: vec![row(
            LOWER_BOUND_COLUMNS,
            vec![json!(cfg.n), json!(cfg.lambda), json!(ctx.alpha()), json!(ctx.hardy()), json!(value)],
        )],
        tally: Tally::default(),
        trends: BTreeMap::new(),
    })
}

const PROFILE_COLUMNS: &[&str] = &[
    "profile_id",
    "hyperbolic_energy",
    "euclidean_energy",
    "ln_norm",
    "extra_term",
    "quad_error_estimate",
    "mt_functional",
    "exact_growth_ratio",
    "weak_slack",
    "strong_slack",
    "pass",
];

fn run_profile_report(cfg: &RunConfig, ctx: &DimensionContext) -> Result<Output, CliError> {
    let corpus = match &cfg.profile {
        Some(_) => profiles_for(cfg)?,
        None => profiles::random_corpus(cfg.seed, 1, 1.0).context(|| "random profile".into())?,
    };
    let alpha = cfg.alpha_factor * ctx.alpha();
    let p = cfg.p.unwrap_or(ctx.conjugate());
    let mut tally = Tally::default();
    let mut items = Vec::new();
    for (i, v) in corpus.iter().enumerate() {
        let e = functionals::energy_report(ctx, v).context(|| format!("profile {i}"))?;
        // the exponential functionals are informational; overflow is reported as null
        let mt = functionals::mt_functional(ctx, v, alpha).ok().map(|x| x.value);
        let growth = if v.is_zero() {
            None
        } else {
            functionals::exact_growth_ratio_with(ctx, v, alpha, p).ok().map(|x| x.value)
        };
        let weak = verify::check_comparison(ctx, v, false).context(|| format!("profile {i}"))?;
        let strong = verify::check_comparison(ctx, v, true).context(|| format!("profile {i}"))?;
        for c in [&weak, &strong] {
            tally.record(c.pass, c.slack / (1.0 + c.lhs.abs()));
        }
        items.push(row(
            PROFILE_COLUMNS,
            vec![
                json!(i),
                json!(e.hyperbolic_energy),
                json!(e.euclidean_energy),
                json!(e.ln_norm),
                json!(e.extra_term),
                json!(e.quad_error_estimate),
                json!(mt),
                json!(growth),
                json!(weak.slack),
                json!(strong.slack),
                json!(weak.pass && strong.pass),
            ],
        ));
    }
    Ok(Output {
        columns: PROFILE_COLUMNS,
        items,
        tally,
        trends: BTreeMap::new(),
    })
}

/// Runs the configured command and assembles its report.
pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let ctx = cfg.context()?;
    let start = Instant::now();
    let out = match cfg.command {
        Command::VerifyLemma => run_lemma(cfg, &ctx)?,
        Command::VerifyComparison => run_comparison(cfg, &ctx)?,
        Command::PsiK => run_psi_k(cfg, &ctx)?,
        Command::Moser => run_moser(cfg, &ctx)?,
        Command::LowerBound => run_lower_bound(cfg, &ctx)?,
        Command::ProfileReport => run_profile_report(cfg, &ctx)?,
    };
    let wall_seconds = start.elapsed().as_secs_f64();
    let failed = out.tally.checks - out.tally.passed;
    let mut config = serde_json::to_value(cfg).expect("config serializes");
    // the resolved denominator power is part of the run's parameters
    config["p"] = json!(cfg.p.unwrap_or(ctx.conjugate()));
    Ok(RunReport {
        tool: "hypmt".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cfg.command.name().into(),
        config,
        columns: out.columns.iter().map(|c| c.to_string()).collect(),
        summary: Summary {
            items: out.items.len(),
            checks: out.tally.checks,
            passed: out.tally.passed,
            failed,
            min_slack: out.tally.min_slack,
            trends: out.trends,
        },
        items: out.items,
        all_pass: failed == 0,
        timings: Timings { wall_seconds },
    })
}

/// Writes floats with 17 significant digits.
struct FixedFloats;

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{}", format_real(value))
    }
}

/// `{:.16e}` for finite values; non-finite values never reach the writer
/// because `serde_json::Value` stores them as null.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (None, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => format_real(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Serializes the report: one JSON document with sorted keys, or a CSV
/// table of the items with the command's fixed header.
pub fn emit_report(report: &RunReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            // Value maps are ordered, so keys come out sorted
            let value = serde_json::to_value(report).expect("reports serialize");
            let mut buf = Vec::new();
            let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats);
            value.serialize(&mut ser).expect("writing to memory");
            buf.push(b'\n');
            buf
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.columns).expect("writing to memory");
            for item in &report.items {
                let cells = report.columns.iter().map(|c| csv_cell(item.get(c).unwrap_or(&Value::Null)));
                w.write_record(cells).expect("writing to memory");
            }
            w.into_inner().expect("flushing to memory")
        }
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Where the report goes: `--output`, else `$HMT_OUTPUT_DIR/<command>.<ext>`,
/// else stdout (`None`).
pub fn output_path(cfg: &RunConfig, env_dir: Option<&Path>) -> Option<PathBuf> {
    cfg.output
        .clone()
        .or_else(|| env_dir.map(|d| d.join(format!("{}.{}", cfg.command.name(), cfg.format.extension()))))
}
