//! `flan` — finite-length LT-code reliability analysis over the binary
//! erasure channel.
//!
//! Subcommands: `analyze` (analytical curves), `simulate` (Monte Carlo
//! and exhaustive oracles), `enumerate` (stopping/uncorrectable sets of a
//! concrete code), `compare` (analytical vs empirical side by side).
//!
//! Exit codes: 0 success, 2 usage error, 3 guard violation, 4
//! input-format error.

mod manifest;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use flan_core::analysis::{
    avg_bit_erasure, edge_distribution, integrated_error, stopping_set_probability_with_base,
    AnalysisRequest, BinomialBase,
};
use flan_core::decoder::{enumerate_stopping_sets, maximal_uncorrectable_set, ErasurePattern};
use flan_core::ensemble::{CodeInstance, DegreeSpec};
use flan_core::error::Error as CoreError;
use flan_core::rational::{format_rational, parse_rational, Rational};
use flan_core::simulate::{
    compare_report, run as run_simulation, Metric, Mode, SimConfig, SimResult,
};

use manifest::RunManifest;
use output::{f64_cell, optional_f64_cell, rational_cell, write_json_data, write_table, Format};

const THREADS_ENV: &str = "FOUNTAIN_FLAN_THREADS";

#[derive(Parser)]
#[command(
    name = "flan",
    version,
    about = "Finite-length LT-code reliability analysis over the binary erasure channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate analytical curves (edge distribution, bit erasure
    /// probability, stopping-set probabilities, integrated estimate)
    Analyze(AnalyzeArgs),
    /// Estimate failure probabilities empirically (Monte Carlo or
    /// exhaustive enumeration)
    Simulate(SimulateArgs),
    /// List stopping sets or the maximal uncorrectable set of a concrete
    /// code
    Enumerate(EnumerateArgs),
    /// Analytical and empirical values side by side, with verdicts
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AnalyzeWhat {
    /// Distribution of the erased-edge count at a fixed erasure size
    #[value(name = "theorem1")]
    Theorem1,
    /// Ensemble-average bit erasure probability
    #[value(name = "pb")]
    Pb,
    /// Stopping-set probability per size s
    #[value(name = "stopping")]
    Stopping,
    /// Bit erasure plus stopping-set term
    #[value(name = "integrated")]
    Integrated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    #[value(name = "bit")]
    Bit,
    #[value(name = "trivial_bit")]
    TrivialBit,
    #[value(name = "block")]
    Block,
}

impl From<MetricArg> for Metric {
    fn from(value: MetricArg) -> Self {
        match value {
            MetricArg::Bit => Metric::Bit,
            MetricArg::TrivialBit => Metric::TrivialBit,
            MetricArg::Block => Metric::Block,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    #[value(name = "mc")]
    Mc,
    #[value(name = "exhaustive")]
    Exhaustive,
    #[value(name = "tiny-ensemble")]
    TinyEnsemble,
}

impl From<ModeArg> for Mode {
    fn from(value: ModeArg) -> Self {
        match value {
            ModeArg::Mc => Mode::MonteCarlo,
            ModeArg::Exhaustive => Mode::ExhaustivePatterns,
            ModeArg::TinyEnsemble => Mode::ExhaustiveTinyEnsemble,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BaseArg {
    #[value(name = "n")]
    N,
    #[value(name = "k")]
    K,
}

impl From<BaseArg> for BinomialBase {
    fn from(value: BaseArg) -> Self {
        match value {
            BaseArg::N => BinomialBase::OutputLength,
            BaseArg::K => BinomialBase::InputLength,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Degree distribution JSON file
    #[arg(long)]
    dist: PathBuf,
    /// Epsilon grid: comma list ("0,0.25,0.5") or range ("0:0.5:0.05")
    #[arg(long, required_if_eq_any([("what", "pb"), ("what", "integrated")]))]
    epsilon: Option<String>,
    #[arg(long, value_enum)]
    what: AnalyzeWhat,
    /// Erasure-set size |e| for the edge distribution
    #[arg(long, required_if_eq("what", "theorem1"))]
    e_size: Option<usize>,
    /// Truncate the stopping-size sum (default: k)
    #[arg(long)]
    smax: Option<usize>,
    /// Truncate the degree-zero-check sum (default: n)
    #[arg(long)]
    zmax: Option<usize>,
    /// Base length of the stopping-formula binomial ratios
    #[arg(long, value_enum, default_value_t = BaseArg::N)]
    binomial_base: BaseArg,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Render exact rationals as doubles
    #[arg(long)]
    float: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, required_unless_present = "code")]
    k: Option<usize>,
    #[arg(long, required_unless_present = "code")]
    n: Option<usize>,
    /// Degree distribution JSON file
    #[arg(long)]
    dist: PathBuf,
    /// Epsilon grid: comma list or range
    #[arg(long)]
    epsilon: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = MetricArg::Bit)]
    metric: MetricArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Mc)]
    mode: ModeArg,
    /// Fixed code JSON file (otherwise codes come from the spec/seed)
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    float: bool,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Code JSON file
    #[arg(long)]
    code: PathBuf,
    #[arg(long, value_enum)]
    what: EnumerateWhat,
    /// Largest subset size to test (default: k)
    #[arg(long)]
    max_size: Option<usize>,
    /// Erased output indices for the uncorrectable query, comma
    /// separated; empty for the empty pattern
    #[arg(long, default_value = "")]
    erasure: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EnumerateWhat {
    #[value(name = "stopping")]
    Stopping,
    #[value(name = "uncorrectable")]
    Uncorrectable,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    dist: PathBuf,
    #[arg(long)]
    epsilon: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = MetricArg::Bit)]
    metric: MetricArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Mc)]
    mode: ModeArg,
    #[arg(long)]
    code: Option<PathBuf>,
    /// Stopping truncation for the integrated column (default 0, which
    /// makes integrated equal pb)
    #[arg(long, default_value_t = 0)]
    smax: usize,
    #[arg(long)]
    zmax: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    float: bool,
}

enum CliError {
    Core(CoreError),
    Write(std::io::Error),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Write(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Write(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Core(CoreError::Guard(_)) => 3,
        CliError::Core(_) => 4,
        CliError::Write(_) => 1,
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, CoreError> {
    fs::read(path).map_err(|e| CoreError::Malformed(format!("cannot read {}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<(DegreeSpec, Vec<u8>), CoreError> {
    let bytes = read_input(path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| CoreError::Malformed(format!("{} is not UTF-8", path.display())))?;
    Ok((DegreeSpec::from_json_str(text)?, bytes))
}

fn load_code(path: &Path) -> Result<(CodeInstance, Vec<u8>), CoreError> {
    let bytes = read_input(path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| CoreError::Malformed(format!("{} is not UTF-8", path.display())))?;
    Ok((CodeInstance::from_json_str(text)?, bytes))
}

/// Expand an epsilon argument: either a comma list of exact values or an
/// inclusive `start:stop:step` range over decimals.
fn parse_epsilon_grid(text: &str) -> Result<Vec<Rational>, CoreError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(CoreError::Malformed("empty epsilon grid".into()));
    }
    if trimmed.contains(':') {
        let parts: Vec<&str> = trimmed.split(':').collect();
        if parts.len() != 3 {
            return Err(CoreError::Malformed(format!(
                "epsilon range must be start:stop:step, got {trimmed:?}"
            )));
        }
        let start = parse_rational(parts[0])?;
        let stop = parse_rational(parts[1])?;
        let step = parse_rational(parts[2])?;
        if step <= Rational::from_integer(0.into()) {
            return Err(CoreError::Malformed("epsilon range step must be positive".into()));
        }
        if start > stop {
            return Err(CoreError::Malformed("epsilon range start exceeds stop".into()));
        }
        let mut grid = Vec::new();
        let mut value = start;
        while value <= stop {
            grid.push(value.clone());
            value += &step;
        }
        Ok(grid)
    } else {
        trimmed.split(',').map(|s| parse_rational(s)).collect()
    }
}

fn grid_param(grid: &[Rational]) -> String {
    grid.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

fn worker_cap() -> Result<Option<usize>, CoreError> {
    match std::env::var(THREADS_ENV) {
        Ok(value) => {
            let parsed: usize = value.trim().parse().map_err(|_| {
                CoreError::Malformed(format!("{THREADS_ENV} must be a positive integer, got {value:?}"))
            })?;
            if parsed == 0 {
                return Err(CoreError::Malformed(format!(
                    "{THREADS_ENV} must be a positive integer, got 0"
                )));
            }
            Ok(Some(parsed))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(std::env::VarError::NotUnicode(_)) => Err(CoreError::Malformed(format!(
            "{THREADS_ENV} is not valid unicode"
        ))),
    }
}

fn flags_cell(flags: &[String]) -> String {
    flags.join(";").replace(',', " ")
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let (spec, dist_bytes) = load_spec(&args.dist)?;
    let smax = args.smax.unwrap_or(args.k);
    let zmax = args.zmax.unwrap_or(args.n);

    let mut manifest = RunManifest::new("analyze");
    manifest
        .param("k", args.k)
        .param("n", args.n)
        .param("dist", args.dist.display())
        .param("what", format!("{:?}", args.what).to_lowercase())
        .param("smax", smax)
        .param("zmax", zmax)
        .param(
            "binomial_base",
            match args.binomial_base {
                BaseArg::N => "n",
                BaseArg::K => "k",
            },
        )
        .param("float", args.float)
        .input("dist", &dist_bytes);
    manifest.param("schema", schema_name(args.what));

    let grid = match &args.epsilon {
        Some(text) => {
            let grid = parse_epsilon_grid(text)?;
            manifest.param("epsilon", grid_param(&grid));
            grid
        }
        None => Vec::new(),
    };

    match args.what {
        AnalyzeWhat::Theorem1 => {
            let e_size = args.e_size.expect("required by clap");
            manifest.param("e_size", e_size);
            let distribution = edge_distribution(&spec, args.n, e_size)?;
            let rows: Vec<Vec<String>> = distribution
                .iter()
                .map(|(l, p)| vec![l.to_string(), rational_cell(p, args.float)])
                .collect();
            write_table(
                args.out.as_deref(),
                args.format,
                &manifest,
                &["L", "probability"],
                &rows,
            )?;
        }
        AnalyzeWhat::Pb => {
            let mut rows = Vec::new();
            for epsilon in &grid {
                let request =
                    AnalysisRequest::new(args.k, args.n, spec.clone(), epsilon.clone())?;
                let report = avg_bit_erasure(&request)?;
                rows.push(vec![
                    rational_cell(epsilon, args.float),
                    rational_cell(&report.pb_uncorrectable, args.float),
                    report.clamp_events.to_string(),
                    flags_cell(&report.flags),
                ]);
            }
            write_table(
                args.out.as_deref(),
                args.format,
                &manifest,
                &["epsilon", "pb_uncorrectable", "clamp_events", "flags"],
                &rows,
            )?;
        }
        AnalyzeWhat::Stopping => {
            let mut rows = Vec::new();
            for s in 1..=smax {
                let value = stopping_set_probability_with_base(
                    args.k,
                    args.n,
                    &spec,
                    s,
                    zmax,
                    args.binomial_base.into(),
                )?;
                rows.push(vec![s.to_string(), rational_cell(&value, args.float)]);
            }
            write_table(
                args.out.as_deref(),
                args.format,
                &manifest,
                &["s", "stopping_probability"],
                &rows,
            )?;
        }
        AnalyzeWhat::Integrated => {
            let mut rows = Vec::new();
            for epsilon in &grid {
                let request = AnalysisRequest::new(args.k, args.n, spec.clone(), epsilon.clone())?
                    .with_truncations(smax, zmax)?
                    .with_binomial_base(args.binomial_base.into());
                let report = integrated_error(&request)?;
                rows.push(vec![
                    rational_cell(epsilon, args.float),
                    rational_cell(&report.pb_uncorrectable, args.float),
                    rational_cell(&report.stopping_term, args.float),
                    rational_cell(&report.stopping_term_per_bit, args.float),
                    rational_cell(&report.integrated, args.float),
                    flags_cell(&report.flags),
                ]);
            }
            write_table(
                args.out.as_deref(),
                args.format,
                &manifest,
                &[
                    "epsilon",
                    "pb_uncorrectable",
                    "stopping_term",
                    "stopping_term_per_bit",
                    "integrated",
                    "flags",
                ],
                &rows,
            )?;
        }
    }
    Ok(())
}

fn schema_name(what: AnalyzeWhat) -> &'static str {
    match what {
        AnalyzeWhat::Theorem1 => "edge-distribution-v1",
        AnalyzeWhat::Pb => "pb-v1",
        AnalyzeWhat::Stopping => "stopping-v1",
        AnalyzeWhat::Integrated => "integrated-v1",
    }
}

fn simulation_rows(result: &SimResult, float: bool) -> Vec<Vec<String>> {
    result
        .points
        .iter()
        .map(|point| {
            let estimate = match &point.exact {
                Some(exact) => rational_cell(exact, float),
                None => f64_cell(point.estimate),
            };
            vec![
                rational_cell(&point.epsilon, float),
                estimate,
                optional_f64_cell(point.stderr),
                point.trials.to_string(),
                result.mode.label().to_string(),
                result.metric.label().to_string(),
            ]
        })
        .collect()
}

const SIMULATE_HEADER: [&str; 6] = ["epsilon", "estimate", "stderr", "trials", "mode", "metric"];

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let (spec, dist_bytes) = load_spec(&args.dist)?;
    let grid = parse_epsilon_grid(&args.epsilon)?;
    let mode: Mode = args.mode.into();

    let mut fixed_code = None;
    let mut code_bytes = None;
    if let Some(path) = &args.code {
        if mode == Mode::ExhaustiveTinyEnsemble {
            return Err(CoreError::InvalidArgument(
                "tiny-ensemble averages over all codes; --code is not applicable".into(),
            )
            .into());
        }
        let (code, bytes) = load_code(path)?;
        if let Some(k) = args.k {
            if k != code.k() {
                return Err(CoreError::Mismatch(format!(
                    "--k {k} but code file has k={}",
                    code.k()
                ))
                .into());
            }
        }
        if let Some(n) = args.n {
            if n != code.n() {
                return Err(CoreError::Mismatch(format!(
                    "--n {n} but code file has n={}",
                    code.n()
                ))
                .into());
            }
        }
        fixed_code = Some(code);
        code_bytes = Some(bytes);
    }
    let k = args.k.or(fixed_code.as_ref().map(CodeInstance::k)).expect("clap requires");
    let n = args.n.or(fixed_code.as_ref().map(CodeInstance::n)).expect("clap requires");

    let mut cfg = SimConfig::new(k, n, spec, grid.clone());
    cfg.trials = args.trials;
    cfg.master_seed = args.seed;
    cfg.mode = mode;
    cfg.metric = args.metric.into();
    cfg.fixed_code = fixed_code;
    cfg.max_workers = worker_cap()?;

    let result = run_simulation(&cfg)?;

    let mut manifest = RunManifest::new("simulate");
    manifest
        .param("schema", "simulate-v1")
        .param("k", k)
        .param("n", n)
        .param("dist", args.dist.display())
        .param("epsilon", grid_param(&grid))
        .param("trials", args.trials)
        .param("seed", args.seed)
        .param("metric", cfg.metric.label())
        .param("mode", cfg.mode.label())
        .param("float", args.float)
        .input("dist", &dist_bytes);
    if let Some(bytes) = &code_bytes {
        manifest.param("code", args.code.as_ref().expect("set together").display());
        manifest.input("code", bytes);
    }
    if let Some(hash) = &result.code_hash {
        manifest.param("code_hash", hash);
    }

    let rows = simulation_rows(&result, args.float);
    write_table(args.out.as_deref(), args.format, &manifest, &SIMULATE_HEADER, &rows)?;
    Ok(())
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<(), CliError> {
    let (code, code_bytes) = load_code(&args.code)?;
    let mut manifest = RunManifest::new("enumerate");
    manifest
        .param("schema", "enumerate-v1")
        .param("code", args.code.display())
        .param("k", code.k())
        .param("n", code.n())
        .input("code", &code_bytes);

    let data = match args.what {
        EnumerateWhat::Stopping => {
            let max_size = args.max_size.unwrap_or(code.k());
            manifest.param("what", "stopping").param("max_size", max_size);
            let report = enumerate_stopping_sets(&code, max_size)?;
            let sets: Vec<Vec<usize>> = report
                .sets
                .iter()
                .map(|s| s.iter().copied().collect())
                .collect();
            serde_json::json!({
                "sets": sets,
                "max_size": report.max_size,
            })
        }
        EnumerateWhat::Uncorrectable => {
            let erased = parse_index_list(&args.erasure)?;
            manifest
                .param("what", "uncorrectable")
                .param("erasure", args.erasure.trim());
            let pattern = ErasurePattern::new(erased, code.n())?;
            let maximal = maximal_uncorrectable_set(&code, &pattern)?;
            let maximal_vec: Vec<usize> = maximal.iter().copied().collect();
            // every uncorrectable set of the pattern is a subset of the
            // maximal one, so the maximal set is the whole listing
            let sets: Vec<Vec<usize>> = if maximal_vec.is_empty() {
                Vec::new()
            } else {
                vec![maximal_vec.clone()]
            };
            serde_json::json!({
                "sets": sets,
                "max_size": maximal_vec.len(),
                "maximal_set": maximal_vec,
            })
        }
    };
    write_json_data(args.out.as_deref(), &manifest, data)?;
    Ok(())
}

fn parse_index_list(text: &str) -> Result<Vec<usize>, CoreError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CoreError::Malformed(format!("bad index {part:?} in erasure list")))
        })
        .collect()
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let (spec, dist_bytes) = load_spec(&args.dist)?;
    let grid = parse_epsilon_grid(&args.epsilon)?;
    let zmax = args.zmax.unwrap_or(args.n);
    let mode: Mode = args.mode.into();

    let mut fixed_code = None;
    let mut code_bytes = None;
    if let Some(path) = &args.code {
        if mode == Mode::ExhaustiveTinyEnsemble {
            return Err(CoreError::InvalidArgument(
                "tiny-ensemble averages over all codes; --code is not applicable".into(),
            )
            .into());
        }
        let (code, bytes) = load_code(path)?;
        fixed_code = Some(code);
        code_bytes = Some(bytes);
    }

    // analytical side
    let mut analytical = Vec::with_capacity(grid.len());
    for epsilon in &grid {
        let request = AnalysisRequest::new(args.k, args.n, spec.clone(), epsilon.clone())?
            .with_truncations(args.smax, zmax)?;
        let report = integrated_error(&request)?;
        analytical.push((epsilon.clone(), report));
    }

    // empirical side
    let mut cfg = SimConfig::new(args.k, args.n, spec, grid.clone());
    cfg.trials = args.trials;
    cfg.master_seed = args.seed;
    cfg.mode = mode;
    cfg.metric = args.metric.into();
    cfg.fixed_code = fixed_code;
    cfg.max_workers = worker_cap()?;
    let empirical = run_simulation(&cfg)?;

    let records = compare_report(&analytical, &empirical)?;

    let mut manifest = RunManifest::new("compare");
    manifest
        .param("schema", "compare-v1")
        .param("k", args.k)
        .param("n", args.n)
        .param("dist", args.dist.display())
        .param("epsilon", grid_param(&grid))
        .param("trials", args.trials)
        .param("seed", args.seed)
        .param("metric", cfg.metric.label())
        .param("mode", cfg.mode.label())
        .param("smax", args.smax)
        .param("zmax", zmax)
        .param("float", args.float)
        .input("dist", &dist_bytes);
    if let Some(bytes) = &code_bytes {
        manifest.param("code", args.code.as_ref().expect("set together").display());
        manifest.input("code", bytes);
    }
    if let Some(hash) = &empirical.code_hash {
        manifest.param("code_hash", hash);
    }

    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|record| {
            let empirical_cell = match &record.empirical_exact {
                Some(exact) => rational_cell(exact, args.float),
                None => f64_cell(record.empirical_estimate),
            };
            vec![
                rational_cell(&record.epsilon, args.float),
                rational_cell(&record.analytical_pb, args.float),
                rational_cell(&record.analytical_integrated, args.float),
                empirical_cell,
                optional_f64_cell(record.stderr),
                f64_cell(record.abs_gap),
                optional_f64_cell(record.rel_gap),
                record.verdict.label().to_string(),
                record.clamp_events.to_string(),
            ]
        })
        .collect();
    write_table(
        args.out.as_deref(),
        args.format,
        &manifest,
        &[
            "epsilon",
            "analytical_pb",
            "analytical_integrated",
            "empirical",
            "stderr",
            "abs_gap",
            "rel_gap",
            "verdict",
            "clamp_events",
        ],
        &rows,
    )?;
    Ok(())
}
