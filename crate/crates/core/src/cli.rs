//! The `gms` command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numeric or
//! runtime failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::GmsError;
use crate::excursion::{sample_shortcut_batch, tau_pmf_table};
use crate::fitness_law::{cdf, mean, mean_half, pdf, ModelParams};
use crate::gms_sim::{run_full_simulation, strongest_fitnesses, SimConfig, SimTarget};
use crate::hypergeom::{hyp2f1, HypParams, SeriesControl};
use crate::stats::{histogram, ks_one_sample, ks_two_sample, EmpiricalDistribution, KsReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "gms",
    version,
    about = "Strongest-individual fitness law of the subcritical GMS(m) model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (standard output when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Significant digits for CSV numbers (at least 6)
    #[arg(long, default_value_t = 12)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long, default_value_t = 1e-14)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 2_000_000)]
    pub max_terms: usize,
    #[arg(long, default_value_t = 0.75)]
    pub boundary_switch: f64,
}

impl SeriesArgs {
    fn control(&self) -> Result<SeriesControl, CliError> {
        Ok(SeriesControl::new(
            self.rel_tol,
            self.max_terms,
            self.boundary_switch,
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    Records,
    Histogram,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CDF and PDF of the strongest fitness on an equispaced grid over [0, 1]
    #[command(alias = "pdf")]
    Exact {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: u32,
        /// Number of grid points, including t = 0 and t = 1
        #[arg(long = "grid", default_value_t = 101)]
        grid: usize,
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact mean for one or more batch sizes
    Mean {
        #[arg(long)]
        p: f64,
        /// Comma-separated batch sizes
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u32>,
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Excursion-length probabilities up to k_max
    Tau {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: u32,
        #[arg(long = "kmax")]
        k_max: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Event-by-event simulation
    #[command(group(ArgGroup::new("target").required(true).args(["excursions", "steps"])))]
    Simulate {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        excursions: Option<u64>,
        /// Birth and death steps to spend (idle steps excluded)
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = SimMode::Records)]
        mode: SimMode,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        /// Population size that triggers block descent (0 disables)
        #[arg(long, default_value_t = crate::gms_sim::DEFAULT_FAST_FORWARD)]
        fast_forward: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cross-check both simulators against the exact CDF with KS tests
    Validate {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        excursions: u64,
        #[arg(long)]
        seed: u64,
        /// Minimum p-value for a test to pass
        #[arg(long, default_value_t = 0.001)]
        threshold: f64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = crate::gms_sim::DEFAULT_FAST_FORWARD)]
        fast_forward: usize,
        /// Negative control: compare against a uniform CDF instead
        #[arg(long, hide = true)]
        corrupt_cdf: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate 2F1(a, b; c; z)
    Hyp {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(io::Error),
    ValidationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::ValidationFailed => EXIT_VALIDATION_FAILED,
            CliError::Numeric(_) | CliError::Io(_) => EXIT_NUMERIC,
        }
    }
}

impl From<GmsError> for CliError {
    fn from(e: GmsError) -> Self {
        match e {
            GmsError::Domain(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Numeric(msg) => f.write_str(msg),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::ValidationFailed => f.write_str("validation failed"),
        }
    }
}

/// Formats `x` with `digits` significant digits in positional notation,
/// switching to scientific notation outside `1e-5 ≤ |x| < 1e15`.
///
/// Parsing the output and formatting it again yields the same string.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    if !(-5..15).contains(&exp) {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

struct Output {
    writer: Box<dyn Write>,
    format: Format,
    precision: usize,
}

impl Output {
    fn open(args: &OutputArgs) -> Result<Self, CliError> {
        if args.precision < 6 {
            return Err(CliError::Usage(format!(
                "--precision must be at least 6, got {}",
                args.precision
            )));
        }
        let writer: Box<dyn Write> = match &args.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Output {
            writer,
            format: args.format,
            precision: args.precision,
        })
    }

    fn num(&self, x: f64) -> String {
        format_significant(x, self.precision)
    }

    fn opt(&self, x: Option<f64>) -> String {
        x.map(|v| self.num(v)).unwrap_or_default()
    }

    fn line(&mut self, fields: &[String]) -> io::Result<()> {
        writeln!(self.writer, "{}", fields.join(","))
    }

    fn json<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut self.writer, value)
            .map_err(|e| CliError::Io(io::Error::other(e)))?;
        writeln!(self.writer)?;
        Ok(())
    }

    fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush()?;
        Ok(())
    }
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            if !matches!(e, CliError::ValidationFailed) {
                eprintln!("error: {e}");
            }
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Exact {
            p,
            m,
            grid,
            series,
            output,
        } => cmd_exact(p, m, grid, &series, &output),
        Command::Mean {
            p,
            m,
            series,
            output,
        } => cmd_mean(p, &m, &series, &output),
        Command::Tau { p, m, k_max, output } => cmd_tau(p, m, k_max, &output),
        Command::Simulate {
            p,
            m,
            excursions,
            steps,
            seed,
            workers,
            mode,
            bins,
            fast_forward,
            output,
        } => {
            let target = match (excursions, steps) {
                (Some(n), None) => SimTarget::Excursions(n),
                (None, Some(n)) => SimTarget::Steps(n),
                _ => {
                    return Err(CliError::Usage(
                        "exactly one of --excursions and --steps is required".into(),
                    ))
                }
            };
            let config = SimConfig::new(ModelParams::new(p, m)?, target, seed)
                .with_workers(workers)
                .with_fast_forward((fast_forward > 0).then_some(fast_forward));
            cmd_simulate(&config, mode, bins, &output)
        }
        Command::Validate {
            p,
            m,
            excursions,
            seed,
            threshold,
            workers,
            fast_forward,
            corrupt_cdf,
            output,
        } => {
            let config = SimConfig::new(
                ModelParams::new(p, m)?,
                SimTarget::Excursions(excursions),
                seed,
            )
            .with_workers(workers)
            .with_fast_forward((fast_forward > 0).then_some(fast_forward));
            cmd_validate(&config, threshold, corrupt_cdf, &output)
        }
        Command::Hyp {
            a,
            b,
            c,
            z,
            series,
            output,
        } => cmd_hyp(a, b, c, z, &series, &output),
    }
}

#[derive(Serialize)]
struct ExactRow {
    t: f64,
    cdf: f64,
    pdf: Option<f64>,
}

pub fn cmd_exact(
    p: f64,
    m: u32,
    grid: usize,
    series: &SeriesArgs,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let params = ModelParams::new(p, m)?;
    if grid < 2 {
        return Err(CliError::Usage(format!(
            "--grid must be at least 2, got {grid}"
        )));
    }
    let ctrl = series.control()?;
    let rows = (0..grid)
        .map(|i| {
            let t = if i + 1 == grid {
                1.0
            } else {
                i as f64 / (grid - 1) as f64
            };
            // The density is unbounded at t = 1 when p = 1/2.
            let density = if t == 1.0 && 4.0 * p * (1.0 - p) >= 1.0 {
                None
            } else {
                Some(pdf(&params, t, &ctrl)?)
            };
            Ok(ExactRow {
                t,
                cdf: cdf(&params, t, &ctrl)?,
                pdf: density,
            })
        })
        .collect::<Result<Vec<_>, GmsError>>()?;

    let mut out = Output::open(output)?;
    match out.format {
        Format::Json => out.json(&rows)?,
        Format::Csv => {
            out.line(&["t".into(), "cdf".into(), "pdf".into()])?;
            for r in &rows {
                let fields = [out.num(r.t), out.num(r.cdf), out.opt(r.pdf)];
                out.line(&fields)?;
            }
        }
    }
    out.finish()
}

#[derive(Serialize)]
struct MeanRow {
    m: u32,
    mean_exact: f64,
    mean_half_closed_form_if_p_half: Option<f64>,
}

pub fn cmd_mean(p: f64, ms: &[u32], series: &SeriesArgs, output: &OutputArgs) -> Result<(), CliError> {
    let ctrl = series.control()?;
    let rows = ms
        .iter()
        .map(|&m| {
            let params = ModelParams::new(p, m)?;
            Ok(MeanRow {
                m,
                mean_exact: mean(&params, &ctrl)?,
                mean_half_closed_form_if_p_half: (p == 0.5).then(|| mean_half(m)),
            })
        })
        .collect::<Result<Vec<_>, GmsError>>()?;
    let mut out = Output::open(output)?;
    match out.format {
        Format::Json => out.json(&rows)?,
        Format::Csv => {
            out.line(&[
                "m".into(),
                "mean_exact".into(),
                "mean_half_closed_form_if_p_half".into(),
            ])?;
            for r in &rows {
                let fields = [
                    r.m.to_string(),
                    out.num(r.mean_exact),
                    out.opt(r.mean_half_closed_form_if_p_half),
                ];
                out.line(&fields)?;
            }
        }
    }
    out.finish()
}

#[derive(Serialize)]
struct TauRow {
    length: u64,
    probability: f64,
    cumulative: f64,
}

pub fn cmd_tau(p: f64, m: u32, k_max: u64, output: &OutputArgs) -> Result<(), CliError> {
    let params = ModelParams::new(p, m)?;
    let table = tau_pmf_table(&params, k_max)?;
    let mut cumulative = 0.0;
    let rows: Vec<TauRow> = table
        .entries
        .iter()
        .map(|e| {
            cumulative += e.probability;
            TauRow {
                length: e.length,
                probability: e.probability,
                cumulative,
            }
        })
        .collect();
    let mut out = Output::open(output)?;
    match out.format {
        Format::Json => out.json(&rows)?,
        Format::Csv => {
            out.line(&["length".into(), "probability".into(), "cumulative".into()])?;
            for r in &rows {
                let fields = [r.length.to_string(), out.num(r.probability), out.num(r.cumulative)];
                out.line(&fields)?;
            }
        }
    }
    out.finish()
}

#[derive(Serialize)]
struct RecordRow {
    excursion_ordinal: usize,
    length: u64,
    births: u64,
    deaths: u64,
    strongest_fitness: f64,
}

#[derive(Serialize)]
struct BinRow {
    bin_left: f64,
    bin_right: f64,
    count: u64,
    frequency: f64,
}

pub fn cmd_simulate(
    config: &SimConfig,
    mode: SimMode,
    bins: usize,
    output: &OutputArgs,
) -> Result<(), CliError> {
    config.validate()?;
    if mode == SimMode::Histogram && bins == 0 {
        return Err(CliError::Usage("--bins must be at least 1".into()));
    }
    let records = run_full_simulation(config)?;
    if records.is_empty() {
        return Err(CliError::Numeric(
            "step budget ended before the first excursion completed".into(),
        ));
    }
    let dist = EmpiricalDistribution::new(strongest_fitnesses(&records))?;
    let analytic = mean(&config.params, &SeriesControl::default())?;
    eprintln!(
        "excursions={} sample_mean={:.6} analytic_mean={:.6} abs_gap={:.6}",
        records.len(),
        dist.mean(),
        analytic,
        (dist.mean() - analytic).abs()
    );

    let mut out = Output::open(output)?;
    match mode {
        SimMode::Records => {
            let rows: Vec<RecordRow> = records
                .iter()
                .enumerate()
                .map(|(i, r)| RecordRow {
                    excursion_ordinal: i,
                    length: r.length,
                    births: r.births,
                    deaths: r.deaths,
                    strongest_fitness: r.strongest_fitness,
                })
                .collect();
            match out.format {
                Format::Json => out.json(&rows)?,
                Format::Csv => {
                    out.line(&[
                        "excursion_ordinal".into(),
                        "length".into(),
                        "births".into(),
                        "deaths".into(),
                        "strongest_fitness".into(),
                    ])?;
                    for r in &rows {
                        let fields = [
                            r.excursion_ordinal.to_string(),
                            r.length.to_string(),
                            r.births.to_string(),
                            r.deaths.to_string(),
                            out.num(r.strongest_fitness),
                        ];
                        out.line(&fields)?;
                    }
                }
            }
        }
        SimMode::Histogram => {
            let h = histogram(&dist, bins, 0.0, 1.0)?;
            let freq = h.frequencies();
            let rows: Vec<BinRow> = (0..h.bins())
                .map(|i| {
                    let (bin_left, bin_right) = h.bin_edges(i);
                    BinRow {
                        bin_left,
                        bin_right,
                        count: h.counts[i],
                        frequency: freq[i],
                    }
                })
                .collect();
            match out.format {
                Format::Json => out.json(&rows)?,
                Format::Csv => {
                    out.line(&[
                        "bin_left".into(),
                        "bin_right".into(),
                        "count".into(),
                        "frequency".into(),
                    ])?;
                    for r in &rows {
                        let fields = [
                            out.num(r.bin_left),
                            out.num(r.bin_right),
                            r.count.to_string(),
                            out.num(r.frequency),
                        ];
                        out.line(&fields)?;
                    }
                }
            }
        }
    }
    out.finish()
}

/// Runs the three KS comparisons behind `validate`.
pub fn validation_reports(
    config: &SimConfig,
    threshold: f64,
    corrupt_cdf: bool,
) -> Result<Vec<KsReport>, GmsError> {
    let SimTarget::Excursions(n) = config.target else {
        return Err(GmsError::domain("validation needs an excursion count"));
    };
    let full = EmpiricalDistribution::new(strongest_fitnesses(&run_full_simulation(config)?))?;
    let shortcut = EmpiricalDistribution::new(strongest_fitnesses(&sample_shortcut_batch(
        &config.params,
        n,
        config.seed,
    )?))?;

    let ctrl = SeriesControl::default();
    // Surface the first evaluation failure instead of panicking inside the closure.
    let analytic = |t: f64| -> Result<f64, GmsError> {
        if corrupt_cdf {
            Ok(t)
        } else {
            cdf(&config.params, t.clamp(0.0, 1.0), &ctrl)
        }
    };
    let mut failure = None;
    let mut checked = |t: f64| match analytic(t) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let full_report = ks_one_sample(&full, &mut checked, threshold).named("full-vs-analytic");
    let shortcut_report =
        ks_one_sample(&shortcut, &mut checked, threshold).named("shortcut-vs-analytic");
    if let Some(e) = failure {
        return Err(e);
    }
    let pair = ks_two_sample(&full, &shortcut, threshold).named("full-vs-shortcut");
    Ok(vec![full_report, shortcut_report, pair])
}

pub fn cmd_validate(
    config: &SimConfig,
    threshold: f64,
    corrupt_cdf: bool,
    output: &OutputArgs,
) -> Result<(), CliError> {
    config.validate()?;
    if !(0.0..1.0).contains(&threshold) {
        return Err(CliError::Usage(format!(
            "--threshold must lie in [0, 1), got {threshold}"
        )));
    }
    let reports = validation_reports(config, threshold, corrupt_cdf)?;
    let mut out = Output::open(output)?;
    match out.format {
        Format::Json => out.json(&reports)?,
        Format::Csv => {
            out.line(&[
                "test".into(),
                "statistic".into(),
                "n".into(),
                "p_value_bound".into(),
                "passed".into(),
            ])?;
            for r in &reports {
                let fields = [
                    r.test.clone(),
                    out.num(r.statistic),
                    out.num(r.n),
                    out.num(r.p_value_bound),
                    r.passed.to_string(),
                ];
                out.line(&fields)?;
            }
        }
    }
    out.finish()?;
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(CliError::ValidationFailed)
    }
}

#[derive(Serialize)]
struct HypRow {
    a: f64,
    b: f64,
    c: f64,
    z: f64,
    value: f64,
}

pub fn cmd_hyp(
    a: f64,
    b: f64,
    c: f64,
    z: f64,
    series: &SeriesArgs,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let ctrl = series.control()?;
    let value = hyp2f1(&HypParams::new(a, b, c, z)?, &ctrl)?;
    let row = HypRow { a, b, c, z, value };
    let mut out = Output::open(output)?;
    match out.format {
        Format::Json => out.json(&row)?,
        Format::Csv => {
            out.line(&["a".into(), "b".into(), "c".into(), "z".into(), "value".into()])?;
            let fields = [out.num(a), out.num(b), out.num(c), out.num(z), out.num(value)];
            out.line(&fields)?;
        }
    }
    out.finish()
}
