//! Command-line front end: reads a channel-spec file, runs one verb and
//! writes a JSON or CSV report.
//!
//! Exit codes: 0 pass, 1 checked and failed, 2 usage or input error,
//! 3 numeric failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::measures::MeasureError;
use crate::model::{
    Channel, ChannelSpec, DiscreteBroadcastChannel, DiscreteTwoOutputChannel, GaussianIC, ModelError,
    RateVector, StochasticMatrix, TwoOutputSystem,
};
use crate::regimes::{
    degraded_equivalent, gaussian_3user_check, gaussian_kuser_check, gaussian_variant46_check,
    generate_3user_variant, generate_kuser_regime, RegimeError, ThreeUserVariant,
};
use crate::regions::{
    membership, redundancy_check, region_full, region_simplified, slice, sum_capacity, support, vertices,
    RegionError, RegionSpec, MEMBERSHIP_TOL,
};
use crate::verifier::{
    bc_more_capable_order, bc_sum_capacity, channel_digest, corollary1_gap, degradation_feasibility,
    grid_min_gap, sample_lemma1_gap, sample_lemma3_gap_n2, sample_lemma4_gap, GapResult, GridSpec,
    SampleSpec, VerificationReport, VerifierError, DEFAULT_MAX_POINTS, GAP_TOL,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Environment variable overriding the grid-point cap.
pub const MAX_GRID_ENV: &str = "ICREGIME_MAX_GRID";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "icregime", version, about = "Strong-interference regimes, rate regions and lemma verification")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Decimal places for every printed number.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(0..=15))]
    pub precision: u8,
    /// Leave `elapsed_ms` out of reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance override `key=value`; keys: gap, membership.
    #[arg(long = "tol", global = true, value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gaussian sufficient condition for the cyclic K-user regime.
    CheckGaussian {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        shift: usize,
    },
    /// Three-user regime in free-parameter form.
    Check3user { input: PathBuf },
    /// Four-inequality three-user variant.
    CheckVariant46 { input: PathBuf },
    /// List the condition sets available for K users.
    RegimeList {
        #[arg(long)]
        k: usize,
    },
    /// Joint-decoding rate region.
    Region {
        input: PathBuf,
        #[arg(long)]
        simplified: bool,
    },
    /// Is a rate vector inside the region?.
    Membership {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        rates: Vec<f64>,
        #[arg(long)]
        simplified: bool,
    },
    /// Largest achievable total rate.
    SumCapacity { input: PathBuf },
    /// Corner points of the region for up to three users.
    Vertices {
        input: PathBuf,
        #[arg(long)]
        simplified: bool,
    },
    /// Two-dimensional cross-section; `--fix 3=0.2` pins `R3`.
    Slice {
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        fix: Vec<String>,
        #[arg(long)]
        simplified: bool,
        /// Also write a self-contained gnuplot script here.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
    /// Largest inner product of the region with a direction.
    Support {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Vec<f64>,
        #[arg(long)]
        simplified: bool,
    },
    /// Compare the full and simplified regions of an in-regime channel.
    Redundancy {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        shift: usize,
    },
    /// Exhaustive product-law search over the composition grid.
    GridGap {
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        resolution: usize,
    },
    /// Sampled gap of the single-letter inequality with auxiliary D.
    Lemma1 {
        input: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Sampled gap on the two-letter memoryless extension.
    Lemma3 {
        input: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Sampled gap with auxiliaries U and D.
    Lemma4 {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        u_size: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Sampled gap with a subset of the joint block moved into the condition.
    Corollary1 {
        input: PathBuf,
        /// 1-based joint-block inputs moved into the conditioning set.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Grid gap plus every sampled gap on one channel.
    VerifyLemmas {
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        resolution: usize,
        #[arg(long, default_value_t = 2)]
        u_size: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Is the second channel a garbling of the first?
    DegradeTest {
        input: PathBuf,
        #[arg(long)]
        second: Option<PathBuf>,
    },
    /// Order broadcast receivers by the more-capable relation.
    BcOrder {
        input: PathBuf,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Sum capacity at the strongest broadcast receiver.
    BcSumcap {
        input: PathBuf,
        /// 1-based receiver index.
        #[arg(long)]
        strongest: usize,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Degraded construction of the weaker output.
    DegradedEquivalent { input: PathBuf },
}

#[derive(Debug, Clone, clap::Args)]
pub struct Sampling {
    #[arg(long, default_value_t = 3)]
    pub d_size: usize,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 1.0)]
    pub concentration: f64,
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    if !matches!(key, "gap" | "membership") {
        return Err(format!("unknown tolerance key {key:?}; expected gap or membership"));
    }
    let v: f64 = value.parse().map_err(|e| format!("{value:?}: {e}"))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(format!("tolerance must be finite and nonnegative, got {v}"));
    }
    Ok((key.to_string(), v))
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Checked(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Checked(_) => EXIT_FAIL,
            Failure::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Checked(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<MeasureError> for Failure {
    fn from(e: MeasureError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<RegimeError> for Failure {
    fn from(e: RegimeError) -> Self {
        match e {
            RegimeError::NotRatioDegraded(_) => Failure::Checked(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<RegionError> for Failure {
    fn from(e: RegionError) -> Self {
        match e {
            RegionError::NotInRegime(_) => Failure::Checked(e.to_string()),
            RegionError::Solver(_) | RegionError::Invalid(_) => Failure::Numeric(e.to_string()),
            RegionError::Regime(r) => r.into(),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<VerifierError> for Failure {
    fn from(e: VerifierError) -> Self {
        match e {
            VerifierError::NonConvergence { .. } | VerifierError::NonMonotone { .. } => {
                Failure::Numeric(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

enum Cell {
    Num(f64),
    Text(String),
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

/// What a verb produced: a JSON report, an optional CSV view and a verdict.
struct Emission {
    report: Value,
    table: Option<Table>,
    pass: bool,
}

impl Emission {
    fn new(report: Value, pass: bool) -> Self {
        Self {
            report,
            table: None,
            pass,
        }
    }

    fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

/// Parse arguments and run; the return value is the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            code
        }
    }
}

/// Run one verb and write its report.
pub fn run(config: &RunConfig) -> i32 {
    let outcome = dispatch(config).and_then(|em| {
        let text = render(config, &em)?;
        write_output(config.output.as_deref(), &text)?;
        Ok(em.pass)
    });
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(f) => {
            eprintln!("icregime: {}", f.message());
            f.code()
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(config: &RunConfig, em: &Emission) -> Result<String, Failure> {
    let p = config.precision as usize;
    match config.format {
        Format::Json => {
            let mut out = String::new();
            write_json(&em.report, p, 0, &mut out);
            out.push('\n');
            Ok(out)
        }
        Format::Csv => em
            .table
            .as_ref()
            .map(|t| render_csv(t, p))
            .ok_or_else(|| Failure::Usage("csv output is not available for this command".into())),
    }
}

fn render_csv(t: &Table, precision: usize) -> String {
    let mut out = t.header.join(",");
    out.push('\n');
    for row in &t.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(v) => format!("{v:.precision$}"),
                Cell::Text(s) => s.clone(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Pretty JSON with every floating-point number printed to `precision`
/// decimal places.
pub fn render_json(value: &Value, precision: usize) -> String {
    let mut out = String::new();
    write_json(value, precision, 0, &mut out);
    out
}

fn write_json(value: &Value, precision: usize, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match value {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&value.to_string()),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => {
                let _ = write!(out, "{u}");
            }
            (_, Some(i), _) if !n.is_f64() => {
                let _ = write!(out, "{i}");
            }
            (_, _, Some(f)) => {
                let text = format!("{f:.precision$}");
                // avoid a signed zero in fixed-precision output
                if text.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
                    out.push_str(text.trim_start_matches('-'));
                } else {
                    out.push_str(&text);
                }
            }
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            if items.iter().all(|v| !v.is_array() && !v.is_object()) {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_json(v, precision, indent, out);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, v) in items.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    write_json(v, precision, indent + 1, out);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push(']');
            }
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, v)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_json(v, precision, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports always serialize")
}

fn load(path: &Path) -> Result<(ChannelSpec, Channel), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let spec = ChannelSpec::from_json(&text)?;
    let channel = spec.clone().into_channel()?;
    Ok((spec, channel))
}

fn wrong_kind(want: &str, got: &Channel) -> Failure {
    Failure::Usage(format!("this command needs a {want} channel, got {}", got.kind()))
}

fn load_gaussian(path: &Path) -> Result<GaussianIC, Failure> {
    match load(path)?.1 {
        Channel::Gaussian(ic) => Ok(ic),
        other => Err(wrong_kind("gaussian_ic", &other)),
    }
}

fn load_discrete(path: &Path) -> Result<(ChannelSpec, DiscreteTwoOutputChannel), Failure> {
    match load(path)? {
        (spec, Channel::Discrete(ch)) => Ok((spec, ch)),
        (_, other) => Err(wrong_kind("discrete_two_output", &other)),
    }
}

fn load_broadcast(path: &Path) -> Result<DiscreteBroadcastChannel, Failure> {
    match load(path)?.1 {
        Channel::Broadcast(bc) => Ok(bc),
        other => Err(wrong_kind("broadcast", &other)),
    }
}

fn load_two_output(path: &Path) -> Result<TwoOutputSystem, Failure> {
    match load(path)?.1 {
        Channel::TwoOutput(sys) => Ok(sys),
        other => Err(wrong_kind("two_output_system", &other)),
    }
}

fn tolerance(config: &RunConfig, key: &str, default: f64) -> f64 {
    config
        .tolerances
        .iter()
        .rev()
        .find(|(k, _)| k == key)
        .map_or(default, |(_, v)| *v)
}

fn max_grid() -> Result<usize, Failure> {
    match std::env::var(MAX_GRID_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| Failure::Usage(format!("{MAX_GRID_ENV}={v:?}: {e}"))),
        Err(_) => Ok(DEFAULT_MAX_POINTS),
    }
}

fn grid(config: &RunConfig, resolution: usize) -> Result<GridSpec, Failure> {
    let fallback = SampleSpec::new(1000, config.seed)?;
    Ok(GridSpec::new(resolution)?
        .with_max_points(max_grid()?)
        .with_fallback(fallback))
}

fn sample_spec(config: &RunConfig, s: &Sampling) -> Result<SampleSpec, Failure> {
    Ok(SampleSpec::with_concentration(s.samples, config.seed, s.concentration)?)
}

fn region_of(ic: &GaussianIC, simplified: bool) -> Result<RegionSpec, Failure> {
    Ok(if simplified {
        region_simplified(ic)?
    } else {
        region_full(ic)?
    })
}

fn gap_report(
    config: &RunConfig,
    operation: &str,
    spec: &ChannelSpec,
    started: Instant,
    result: &GapResult,
    seed: Option<u64>,
) -> VerificationReport {
    let report = VerificationReport::new(operation, spec, result, seed);
    if config.no_timestamp {
        report
    } else {
        report.with_elapsed_ms(started.elapsed().as_millis() as u64)
    }
}

fn gap_emission(config: &RunConfig, report: VerificationReport) -> Emission {
    let pass = report.min_gap >= -tolerance(config, "gap", GAP_TOL);
    Emission::new(to_value(&report), pass)
}

fn dispatch(config: &RunConfig) -> Result<Emission, Failure> {
    match &config.command {
        Command::CheckGaussian { input, shift } => {
            let ic = load_gaussian(input)?;
            let check = gaussian_kuser_check(&ic, *shift)?;
            let set = generate_kuser_regime(ic.k(), *shift)?;
            let conditions: Vec<String> = set.inequalities.iter().map(ToString::to_string).collect();
            let mut report = to_value(&check);
            report["operation"] = json!("check-gaussian");
            report["conditions"] = json!(conditions);
            Ok(Emission::new(report, check.pass))
        }
        Command::Check3user { input } => {
            let check = gaussian_3user_check(&load_gaussian(input)?)?;
            let mut report = to_value(&check);
            report["operation"] = json!("check-3user");
            report["alphas"] = json!(check.alphas());
            Ok(Emission::new(report, check.pass))
        }
        Command::CheckVariant46 { input } => {
            let check = gaussian_variant46_check(&load_gaussian(input)?)?;
            let mut report = to_value(&check);
            report["operation"] = json!("check-variant46");
            Ok(Emission::new(report, check.pass))
        }
        Command::RegimeList { k } => {
            let mut sets = (0..*k)
                .map(|s| generate_kuser_regime(*k, s))
                .collect::<Result<Vec<_>, _>>()?;
            if *k == 3 {
                sets.push(generate_3user_variant(ThreeUserVariant::Regime41));
                sets.push(generate_3user_variant(ThreeUserVariant::Regime46));
            }
            let listed: Vec<Value> = sets
                .iter()
                .map(|set| {
                    let mut v = to_value(set);
                    v["display"] = json!(set.inequalities.iter().map(ToString::to_string).collect::<Vec<_>>());
                    v
                })
                .collect();
            let table = Table {
                header: vec!["label".into(), "inequality".into()],
                rows: sets
                    .iter()
                    .flat_map(|set| {
                        set.inequalities
                            .iter()
                            .map(|q| vec![Cell::Text(set.label.clone()), Cell::Text(format!("\"{q}\""))])
                    })
                    .collect(),
            };
            Ok(Emission::new(json!({"operation": "regime-list", "K": k, "condition_sets": listed}), true)
                .with_table(table))
        }
        Command::Region { input, simplified } => {
            let region = region_of(&load_gaussian(input)?, *simplified)?;
            let mut report = to_value(&region);
            report["operation"] = json!("region");
            report["simplified"] = json!(simplified);
            let table = Table {
                header: vec!["subset".into(), "bound".into(), "argmin_receivers".into()],
                rows: region
                    .subsets()
                    .map(|s| {
                        vec![
                            Cell::Text(format!("\"{s}\"")),
                            Cell::Num(region.bound(s)),
                            Cell::Text(format!("\"{}\"", region.argmin_receivers(s))),
                        ]
                    })
                    .collect(),
            };
            Ok(Emission::new(report, true).with_table(table))
        }
        Command::Membership {
            input,
            rates,
            simplified,
        } => {
            let region = region_of(&load_gaussian(input)?, *simplified)?;
            let r = RateVector::new(rates.clone())?;
            let mut m = membership(&region, &r)?;
            let tol = tolerance(config, "membership", MEMBERSHIP_TOL);
            if tol != MEMBERSHIP_TOL {
                m.violated = region
                    .subsets()
                    .filter(|s| r.subset_sum(*s) > region.bound(*s) + tol)
                    .collect();
                m.inside = m.violated.is_empty();
            }
            let report = json!({
                "operation": "membership",
                "rates": rates,
                "inside": m.inside,
                "violated": m.violated,
            });
            Ok(Emission::new(report, m.inside))
        }
        Command::SumCapacity { input } => {
            let c = sum_capacity(&load_gaussian(input)?)?;
            let table = Table {
                header: vec!["sum_capacity".into()],
                rows: vec![vec![Cell::Num(c)]],
            };
            Ok(Emission::new(json!({"operation": "sum-capacity", "sum_capacity": c}), true).with_table(table))
        }
        Command::Vertices { input, simplified } => {
            let region = region_of(&load_gaussian(input)?, *simplified)?;
            let vs = vertices(&region)?;
            let k = region.k();
            let points: Vec<&[f64]> = vs.iter().map(RateVector::rates).collect();
            let table = Table {
                header: (1..=k).map(|i| format!("r{i}")).collect(),
                rows: points.iter().map(|p| p.iter().map(|v| Cell::Num(*v)).collect()).collect(),
            };
            Ok(
                Emission::new(json!({"operation": "vertices", "K": k, "vertices": points}), true)
                    .with_table(table),
            )
        }
        Command::Slice {
            input,
            fix,
            simplified,
            gnuplot,
        } => {
            let region = region_of(&load_gaussian(input)?, *simplified)?;
            let fixed = fix
                .iter()
                .map(|s| parse_fixed(s))
                .collect::<Result<Vec<_>, _>>()?;
            let polygon = slice(&region, &fixed)?;
            let free: Vec<usize> = (0..region.k())
                .filter(|i| !fixed.iter().any(|(f, _)| f == i))
                .map(|i| i + 1)
                .collect();
            let header: Vec<String> = free.iter().map(|i| format!("r{i}")).collect();
            if let Some(path) = gnuplot {
                let script = gnuplot_script(&header, &polygon, config.precision as usize);
                std::fs::write(path, script).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
            let fixed_labels: Vec<Value> = fixed.iter().map(|(i, v)| json!({"user": i + 1, "rate": v})).collect();
            let table = Table {
                header,
                rows: polygon.iter().map(|p| vec![Cell::Num(p[0]), Cell::Num(p[1])]).collect(),
            };
            let report = json!({
                "operation": "slice",
                "fixed": fixed_labels,
                "free": free,
                "polygon": polygon,
            });
            Ok(Emission::new(report, true).with_table(table))
        }
        Command::Support {
            input,
            direction,
            simplified,
        } => {
            let region = region_of(&load_gaussian(input)?, *simplified)?;
            let value = support(&region, direction)?;
            let table = Table {
                header: vec!["support".into()],
                rows: vec![vec![Cell::Num(value)]],
            };
            Ok(
                Emission::new(json!({"operation": "support", "direction": direction, "value": value}), true)
                    .with_table(table),
            )
        }
        Command::Redundancy { input, shift } => {
            let r = redundancy_check(&load_gaussian(input)?, *shift)?;
            let mut report = to_value(&r);
            report["operation"] = json!("redundancy");
            report["shift"] = json!(shift);
            Ok(Emission::new(report, r.equivalent))
        }
        Command::GridGap { input, resolution } => {
            let (spec, ch) = load_discrete(input)?;
            let started = Instant::now();
            let r = grid_min_gap(&ch, &grid(config, *resolution)?)?;
            let seed = (r.mode == crate::verifier::Mode::Sampled).then_some(config.seed);
            Ok(gap_emission(config, gap_report(config, "grid-gap", &spec, started, &r, seed)))
        }
        Command::Lemma1 { input, sampling } => {
            let (spec, ch) = load_discrete(input)?;
            let started = Instant::now();
            let r = sample_lemma1_gap(&ch, sampling.d_size, &sample_spec(config, sampling)?)?;
            Ok(gap_emission(config, gap_report(config, "lemma1", &spec, started, &r, Some(config.seed))))
        }
        Command::Lemma3 { input, sampling } => {
            let (spec, ch) = load_discrete(input)?;
            let started = Instant::now();
            let r = sample_lemma3_gap_n2(&ch, sampling.d_size, &sample_spec(config, sampling)?)?;
            Ok(gap_emission(config, gap_report(config, "lemma3", &spec, started, &r, Some(config.seed))))
        }
        Command::Lemma4 {
            input,
            u_size,
            sampling,
        } => {
            let (spec, ch) = load_discrete(input)?;
            let started = Instant::now();
            let r = sample_lemma4_gap(&ch, *u_size, sampling.d_size, &sample_spec(config, sampling)?)?;
            Ok(gap_emission(config, gap_report(config, "lemma4", &spec, started, &r, Some(config.seed))))
        }
        Command::Corollary1 {
            input,
            subset,
            sampling,
        } => {
            let (spec, ch) = load_discrete(input)?;
            let moved = joint_indices(subset, ch.mu1())?;
            let started = Instant::now();
            let r = corollary1_gap(&ch, &moved, sampling.d_size, &sample_spec(config, sampling)?)?;
            Ok(gap_emission(config, gap_report(config, "corollary1", &spec, started, &r, Some(config.seed))))
        }
        Command::VerifyLemmas {
            input,
            resolution,
            u_size,
            sampling,
        } => verify_lemmas(config, input, *resolution, *u_size, sampling),
        Command::DegradeTest { input, second } => {
            let (p1, p2) = match second {
                Some(other) => (single_marginal(input)?, single_marginal(other)?),
                None => {
                    let bc = load_broadcast(input)?;
                    if bc.receivers() < 2 {
                        return Err(Failure::Usage(
                            "degrade-test needs --second or a broadcast file with two marginals".into(),
                        ));
                    }
                    (bc.marginal(0).clone(), bc.marginal(1).clone())
                }
            };
            let d = degradation_feasibility(&p1, &p2)?;
            let mut report = to_value(&d);
            report["operation"] = json!("degrade-test");
            Ok(Emission::new(report, d.degraded))
        }
        Command::BcOrder { input, resolution } => {
            let bc = load_broadcast(input)?;
            let order = bc_more_capable_order(&bc, &grid(config, *resolution)?)?;
            let labels = order.order.as_ref().map(|o| o.iter().map(|i| i + 1).collect::<Vec<_>>());
            let report = json!({
                "operation": "bc-order",
                "resolution": resolution,
                "n_points": order.n_points,
                "order": labels,
                "min_margins": order.min_margins,
                "ties": order.ties,
                "pairwise": order.pairwise,
            });
            Ok(Emission::new(report, order.order.is_some()))
        }
        Command::BcSumcap {
            input,
            strongest,
            resolution,
        } => {
            let bc = load_broadcast(input)?;
            if *strongest == 0 || *strongest > bc.receivers() {
                return Err(Failure::Usage(format!(
                    "--strongest must be in 1..={}, got {strongest}",
                    bc.receivers()
                )));
            }
            let order = bc_more_capable_order(&bc, &grid(config, *resolution)?)?;
            let verified = order.pairwise[strongest - 1].iter().all(|m| *m >= -GAP_TOL);
            let c = bc_sum_capacity(&bc, strongest - 1)?;
            let report = json!({
                "operation": "bc-sumcap",
                "strongest": strongest,
                "strongest_verified": verified,
                "capacity": c.capacity,
                "argmax": c.argmax.probs(),
                "iterations": c.iterations,
            });
            Ok(Emission::new(report, verified))
        }
        Command::DegradedEquivalent { input } => {
            let sys = load_two_output(input)?;
            let d = degraded_equivalent(&sys)?;
            let mut report = to_value(&d);
            report["operation"] = json!("degraded-equivalent");
            report["conditional_mean_coeffs"] = json!(d.conditional_mean_coeffs(&sys));
            report["conditional_variance"] = json!(d.conditional_variance());
            Ok(Emission::new(report, true))
        }
    }
}

fn verify_lemmas(
    config: &RunConfig,
    input: &Path,
    resolution: usize,
    u_size: usize,
    sampling: &Sampling,
) -> Result<Emission, Failure> {
    let (spec, ch) = load_discrete(input)?;
    let samples = sample_spec(config, sampling)?;
    let d = sampling.d_size;
    let mut reports = Vec::new();
    let mut skipped = Vec::new();

    let started = Instant::now();
    let r = grid_min_gap(&ch, &grid(config, resolution)?)?;
    let seed = (r.mode == crate::verifier::Mode::Sampled).then_some(config.seed);
    reports.push(gap_report(config, "grid-gap", &spec, started, &r, seed));

    let started = Instant::now();
    let r = sample_lemma1_gap(&ch, d, &samples)?;
    reports.push(gap_report(config, "lemma1", &spec, started, &r, Some(config.seed)));

    let started = Instant::now();
    match sample_lemma3_gap_n2(&ch, d, &samples) {
        Ok(r) => reports.push(gap_report(config, "lemma3", &spec, started, &r, Some(config.seed))),
        Err(e) => skipped.push(json!({"operation": "lemma3", "reason": e.to_string()})),
    }

    let started = Instant::now();
    let r = sample_lemma4_gap(&ch, u_size, d, &samples)?;
    reports.push(gap_report(config, "lemma4", &spec, started, &r, Some(config.seed)));

    if ch.mu1() >= 2 {
        let started = Instant::now();
        let r = corollary1_gap(&ch, &[0], d, &samples)?;
        reports.push(gap_report(config, "corollary1", &spec, started, &r, Some(config.seed)));
    } else {
        skipped.push(json!({"operation": "corollary1", "reason": "joint block has a single input"}));
    }

    let tol = tolerance(config, "gap", GAP_TOL);
    let min_gap = reports.iter().map(|r| r.min_gap).fold(f64::INFINITY, f64::min);
    let pass = min_gap >= -tol;
    let report = json!({
        "operation": "verify-lemmas",
        "channel_digest": channel_digest(&spec),
        "pass": pass,
        "min_gap": min_gap,
        "results": reports,
        "skipped": skipped,
    });
    Ok(Emission::new(report, pass))
}

fn single_marginal(path: &Path) -> Result<StochasticMatrix, Failure> {
    let bc = load_broadcast(path)?;
    if bc.receivers() != 1 {
        return Err(Failure::Usage(format!(
            "{}: expected a broadcast file with one marginal, got {}",
            path.display(),
            bc.receivers()
        )));
    }
    Ok(bc.marginal(0).clone())
}

fn joint_indices(labels: &[usize], mu1: usize) -> Result<Vec<usize>, Failure> {
    labels
        .iter()
        .map(|&l| {
            if l == 0 || l > mu1 {
                Err(Failure::Usage(format!("--subset entry {l} is outside the joint block 1..={mu1}")))
            } else {
                Ok(l - 1)
            }
        })
        .collect()
}

/// `i=v` with a 1-based user label.
fn parse_fixed(s: &str) -> Result<(usize, f64), Failure> {
    let bad = || Failure::Usage(format!("--fix expects i=v with a 1-based user, got {s:?}"));
    let (i, v) = s.split_once('=').ok_or_else(bad)?;
    let i: usize = i.trim().parse().map_err(|_| bad())?;
    let v: f64 = v.trim().parse().map_err(|_| bad())?;
    if i == 0 {
        return Err(bad());
    }
    Ok((i - 1, v))
}

fn gnuplot_script(header: &[String], polygon: &[[f64; 2]], precision: usize) -> String {
    let mut s = String::from("$slice << EOD\n");
    for p in polygon.iter().chain(polygon.first()) {
        let _ = writeln!(s, "{:.precision$} {:.precision$}", p[0], p[1]);
    }
    s.push_str("EOD\n");
    let _ = writeln!(s, "set xlabel '{}'", header[0]);
    let _ = writeln!(s, "set ylabel '{}'", header.get(1).map_or("", String::as_str));
    s.push_str("set size ratio -1\n");
    s.push_str("plot $slice using 1:2 with filledcurves closed fs transparent solid 0.3 title 'region', \\\n");
    s.push_str("     $slice using 1:2 with linespoints lw 2 notitle\n");
    s
}
