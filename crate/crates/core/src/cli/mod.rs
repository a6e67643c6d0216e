//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification suite or a table
//! self-check fails, 2 on usage errors (bad flags, out-of-range parameters,
//! points outside a convergence domain).

mod format;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::amplitudes::{bs_amplitude_convolution, bs_amplitude_direct, tms_amplitude, tms_amplitude_convolution};
use crate::asymptotics::bs_diag_asymptotic;
use crate::error::Error;
use crate::genfun::{diagonal_gf_bs, eval_f, eval_g_bs, eval_g_tms, GenFunPoint};
use crate::numerics::{ExactRational, Scalar};
use crate::parallel::{self, Execution};
use crate::params::{BeamSplitterParam, Device, DeviceParam, PhotonConfig, SqueezerParam};
use crate::probabilities::{bs_prob_direct, bs_prob_exact, tms_prob, tms_prob_exact};
use crate::recurrences::{
    bs_diagonal_recurrence, bs_table_convolution, bs_table_direct, bs_table_exact, bs_table_recurrence,
    tms_table_direct, tms_table_exact, tms_table_recurrence, ClassicalTable, ProbabilityTable,
};

pub use format::format_float;
pub use verify::{run_suite, run_suite_with, Failure, Scale, Suite, VerificationResult};

/// Caps the worker pool when set to a positive integer.
pub const THREADS_ENV: &str = "MULTIPHOTON_THREADS";

/// Largest number of stored values a `table` command may build.
const TABLE_BUDGET: usize = 50_000_000;

#[derive(Parser, Debug)]
#[command(name = "multiphoton", version, about = "Fock-basis transition amplitudes and probabilities of beam splitters and two-mode squeezers")]
pub struct Cli {
    /// Print timings to stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// One transition amplitude <n,m|U|i,k>.
    Amp(PointArgs),
    /// One transition probability.
    Prob(PointArgs),
    /// A table of probabilities over (i, k, n).
    Table(TableArgs),
    /// A generating function value.
    Genfun(GenfunArgs),
    /// Run an identity suite and print a JSON report.
    Verify(VerifyArgs),
    /// CSV data for plots.
    Plotdata(PlotArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DeviceArg {
    Bs,
    Tms,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Float,
    Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    Convolution,
    Recurrence,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[arg(long, value_enum, default_value = "bs")]
    pub device: DeviceArg,
    /// Beam splitter transmittance, decimal or p/q. Defaults to 1/2.
    #[arg(long)]
    pub eta: Option<String>,
    /// Squeezing parameter tanh^2(r), decimal or p/q. Defaults to 1/2.
    #[arg(long)]
    pub lambda: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long)]
    pub i: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "float")]
    pub precision: PrecisionArg,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct TableArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long)]
    pub imax: usize,
    #[arg(long)]
    pub kmax: usize,
    /// Largest output photon number; required for the squeezer.
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long, value_enum, default_value = "float")]
    pub precision: PrecisionArg,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    G,
    F,
    Diag,
}

#[derive(Args, Debug, Clone)]
pub struct GenfunArgs {
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long, value_enum, default_value = "f")]
    pub which: Which,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub y: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub w: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, value_enum, default_value = "quick")]
    pub scale: Scale,
    /// Multiplies every floating-point tolerance; exact checks stay exact.
    #[arg(long, default_value_t = 1.0)]
    pub tolerance_scale: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// eta, quantum and classical probability of one photon per output for (1,1) inputs.
    HomSweep,
    /// lambda, A^{(1,1)}_1.
    TmsSweep,
    /// n, B^{(i,i)}_n at eta = 1/2, and the large-i law.
    DiagAsymptotic,
    /// n, quantum and classical output distribution for inputs (i, k).
    Distribution,
}

#[derive(Args, Debug, Clone)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    #[arg(long, default_value_t = 100)]
    pub i: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Coverage { .. } | Error::NotConverged { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads_from_env();
    let started = Instant::now();
    let outcome = dispatch(&cli);
    if cli.verbose > 0 {
        eprintln!("finished in {:.3} s", started.elapsed().as_secs_f64());
    }
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Failure(msg) => eprintln!("failure: {msg}"),
            }
            e.exit_code()
        }
    }
}

fn configure_threads_from_env() {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                parallel::configure_threads(n);
            }
            _ => eprintln!("warning: ignoring {THREADS_ENV}={v:?}; expected a positive integer"),
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Amp(a) => write_line(&a.out, &cmd_amp(a)?),
        Command::Prob(a) => write_line(&a.out, &cmd_prob(a)?),
        Command::Table(a) => cmd_table(a),
        Command::Genfun(a) => write_line(&a.out, &cmd_genfun(a)?),
        Command::Verify(a) => cmd_verify(a),
        Command::Plotdata(a) => cmd_plotdata(a),
    }
}

fn sink(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            CliError::Usage(format!("cannot write {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_line(out: &Option<PathBuf>, line: &str) -> CliResult<()> {
    let mut w = sink(out)?;
    writeln!(w, "{line}")?;
    w.flush()?;
    Ok(())
}

const DEFAULT_PARAM: &str = "1/2";

fn bs_param(args: &ParamArgs) -> CliResult<BeamSplitterParam> {
    if args.lambda.is_some() {
        return Err(CliError::Usage("--lambda applies to --device tms; use --eta".into()));
    }
    Ok(args.eta.as_deref().unwrap_or(DEFAULT_PARAM).parse()?)
}

fn tms_param(args: &ParamArgs) -> CliResult<SqueezerParam> {
    if args.eta.is_some() {
        return Err(CliError::Usage("--eta applies to --device bs; use --lambda".into()));
    }
    Ok(args.lambda.as_deref().unwrap_or(DEFAULT_PARAM).parse()?)
}

fn device_param(args: &ParamArgs) -> CliResult<DeviceParam> {
    Ok(match args.device {
        DeviceArg::Bs => bs_param(args)?.into(),
        DeviceArg::Tms => tms_param(args)?.into(),
    })
}

/// Resolve method and precision together: `exact` implies rational, and
/// rational needs a `p/q` (or integer) parameter literal.
fn resolve(precision: PrecisionArg, method: Option<MethodArg>, default: MethodArg, p: &DeviceParam) -> CliResult<(PrecisionArg, MethodArg)> {
    let method = method.unwrap_or(if precision == PrecisionArg::Rational { MethodArg::Exact } else { default });
    let precision = if method == MethodArg::Exact { PrecisionArg::Rational } else { precision };
    if precision == PrecisionArg::Rational && p.exact().is_none() {
        return Err(CliError::Usage(format!(
            "rational precision needs a p/q parameter literal, got {p}"
        )));
    }
    Ok((precision, method))
}

/// Float copy of a parameter, so float routes never take the exact path.
fn float_bs(p: &BeamSplitterParam) -> CliResult<BeamSplitterParam> {
    Ok(BeamSplitterParam::new(p.eta())?)
}

fn float_tms(p: &SqueezerParam) -> CliResult<SqueezerParam> {
    Ok(SqueezerParam::new(p.lambda())?)
}

pub fn cmd_amp(a: &PointArgs) -> CliResult<String> {
    if a.precision == PrecisionArg::Rational {
        return Err(CliError::Usage("amplitudes are irrational in general; use --precision float".into()));
    }
    let method = a.method.unwrap_or(MethodArg::Direct);
    let amp = match (a.param.device, method) {
        (DeviceArg::Bs, MethodArg::Direct) => bs_amplitude_direct(&PhotonConfig::bs(a.i, a.k, a.n), &bs_param(&a.param)?)?,
        (DeviceArg::Bs, MethodArg::Convolution) => {
            bs_amplitude_convolution(&PhotonConfig::bs(a.i, a.k, a.n), &bs_param(&a.param)?)?
        }
        (DeviceArg::Tms, MethodArg::Direct) => tms_amplitude(&PhotonConfig::tms(a.i, a.k, a.n), &tms_param(&a.param)?)?,
        (DeviceArg::Tms, MethodArg::Convolution) => {
            tms_amplitude_convolution(&PhotonConfig::tms(a.i, a.k, a.n), &tms_param(&a.param)?)?
        }
        (_, m) => return Err(CliError::Usage(format!("amp supports --method direct or convolution, not {m:?}"))),
    };
    Ok(format_float(amp.value()))
}

pub fn cmd_prob(a: &PointArgs) -> CliResult<String> {
    let p = device_param(&a.param)?;
    let (precision, method) = resolve(a.precision, a.method, MethodArg::Direct, &p)?;
    let (i, k, n) = (a.i, a.k, a.n);
    let rational = precision == PrecisionArg::Rational;
    match p {
        DeviceParam::Bs(p) => {
            let c = PhotonConfig::bs(i, k, n);
            match (method, rational) {
                (MethodArg::Exact | MethodArg::Direct, true) => Ok(bs_prob_exact(&c, p.exact_eta().expect("resolved"))?.to_string()),
                (MethodArg::Direct, false) => Ok(format_float(bs_prob_direct(&c, &float_bs(&p)?)?.value)),
                (MethodArg::Convolution, false) => Ok(format_float(bs_amplitude_convolution(&c, &p)?.probability())),
                (MethodArg::Recurrence, false) => Ok(format_float(bs_table_recurrence::<f64>(i, k, &p)?.get(i as i64, k as i64, n as i64)?)),
                (MethodArg::Recurrence, true) => {
                    Ok(bs_table_recurrence::<ExactRational>(i, k, &p)?.get(i as i64, k as i64, n as i64)?.to_string())
                }
                (m, _) => Err(CliError::Usage(format!("method {m:?} is float only"))),
            }
        }
        DeviceParam::Tms(p) => {
            let c = PhotonConfig::tms(i, k, n);
            match (method, rational) {
                (MethodArg::Exact | MethodArg::Direct, true) => {
                    Ok(tms_prob_exact(&c, p.exact_lambda().expect("resolved"))?.to_string())
                }
                (MethodArg::Direct, false) => Ok(format_float(tms_prob(&c, &float_tms(&p)?)?.value)),
                (MethodArg::Convolution, false) => Ok(format_float(tms_amplitude_convolution(&c, &p)?.probability())),
                (MethodArg::Recurrence, false) => {
                    Ok(format_float(tms_table_recurrence::<f64>(i, k, n, &p)?.get(i as i64, k as i64, n as i64)?))
                }
                (MethodArg::Recurrence, true) => Ok(tms_table_recurrence::<ExactRational>(i, k, n, &p)?
                    .get(i as i64, k as i64, n as i64)?
                    .to_string()),
                (m, _) => Err(CliError::Usage(format!("method {m:?} is float only"))),
            }
        }
    }
}

pub fn cmd_table(a: &TableArgs) -> CliResult<()> {
    let p = device_param(&a.param)?;
    let (precision, method) = resolve(a.precision, a.method, MethodArg::Recurrence, &p)?;
    let (imax, kmax) = (a.imax, a.kmax);
    let nmax = match p.device() {
        Device::Bs => {
            if a.nmax.is_some() {
                return Err(CliError::Usage("--nmax applies to --device tms only".into()));
            }
            imax + kmax
        }
        Device::Tms => a.nmax.ok_or_else(|| CliError::Usage("--device tms needs --nmax".into()))?,
    };
    let size = (imax + 1).saturating_mul(kmax + 1).saturating_mul(nmax + 1);
    if size > TABLE_BUDGET {
        return Err(CliError::Usage(format!("table of {size} values exceeds the budget of {TABLE_BUDGET}")));
    }
    let rational = precision == PrecisionArg::Rational;
    match (p, method, rational) {
        (DeviceParam::Bs(p), MethodArg::Recurrence, false) => emit(&bs_table_recurrence::<f64>(imax, kmax, &p)?, a),
        (DeviceParam::Bs(p), MethodArg::Recurrence, true) => emit(&bs_table_recurrence::<ExactRational>(imax, kmax, &p)?, a),
        (DeviceParam::Bs(p), MethodArg::Direct, false) => emit(&bs_table_direct(imax, kmax, &p)?, a),
        (DeviceParam::Bs(p), MethodArg::Convolution, false) => emit(&bs_table_convolution(imax, kmax, &p)?, a),
        (DeviceParam::Bs(p), MethodArg::Direct | MethodArg::Exact, true) => {
            emit(&bs_table_exact(imax, kmax, p.exact_eta().expect("resolved"))?, a)
        }
        (DeviceParam::Tms(p), MethodArg::Recurrence, false) => emit(&tms_table_recurrence::<f64>(imax, kmax, nmax, &p)?, a),
        (DeviceParam::Tms(p), MethodArg::Recurrence, true) => {
            emit(&tms_table_recurrence::<ExactRational>(imax, kmax, nmax, &p)?, a)
        }
        (DeviceParam::Tms(p), MethodArg::Direct, false) => emit(&tms_table_direct(imax, kmax, nmax, &p)?, a),
        (DeviceParam::Tms(p), MethodArg::Direct | MethodArg::Exact, true) => {
            emit(&tms_table_exact(imax, kmax, nmax, p.exact_lambda().expect("resolved"))?, a)
        }
        (p, m, _) => Err(CliError::Usage(format!(
            "method {m:?} is not available for {} tables at this precision",
            p.device()
        ))),
    }
}

/// Write the table, then fail with exit code 1 if it does not pass its
/// own normalization and range checks.
fn emit<T: Scalar + format::CellValue>(t: &ProbabilityTable<T>, a: &TableArgs) -> CliResult<()> {
    let mut w = sink(&a.out)?;
    match a.format {
        FormatArg::Csv => format::write_csv(t, &mut w)?,
        FormatArg::Json => format::write_json(t, &mut w)?,
    }
    w.flush()?;
    let tolerance = if T::EXACT { 0.0 } else { 1e-10 };
    if let Some(r) = t.max_row_residual() {
        if r > tolerance {
            return Err(CliError::Failure(format!("row normalization off by {r:e} (tolerance {tolerance:e})")));
        }
    }
    if !t.values_in_unit_interval(if T::EXACT { 0.0 } else { 1e-12 }) {
        return Err(CliError::Failure("table holds values outside [0, 1]".into()));
    }
    Ok(())
}

pub fn cmd_genfun(a: &GenfunArgs) -> CliResult<String> {
    let pt = GenFunPoint::new(a.x, a.y, a.z, a.w);
    let p = device_param(&a.param)?;
    let v = match (a.which, &p) {
        (Which::G, DeviceParam::Bs(p)) => eval_g_bs(&pt, p),
        (Which::G, DeviceParam::Tms(p)) => eval_g_tms(&pt, p),
        (Which::F, p) => eval_f(&pt, p)?,
        (Which::Diag, DeviceParam::Bs(p)) => {
            if a.y != 0.0 || a.w != 0.0 {
                return Err(CliError::Usage("the diagonal generating function takes --x and --z only".into()));
            }
            diagonal_gf_bs(a.x, a.z, p)?
        }
        (Which::Diag, DeviceParam::Tms(_)) => {
            return Err(CliError::Usage("the diagonal generating function is beam splitter only".into()))
        }
    };
    Ok(format_float(v))
}

pub fn cmd_verify(a: &VerifyArgs) -> CliResult<()> {
    if !(a.tolerance_scale.is_finite() && a.tolerance_scale >= 0.0) {
        return Err(CliError::Usage(format!("--tolerance-scale must be finite and nonnegative, got {}", a.tolerance_scale)));
    }
    let result = run_suite_with(a.suite, a.scale, a.tolerance_scale);
    let mut w = sink(&a.out)?;
    serde_json::to_writer_pretty(&mut w, &result).map_err(|e| CliError::Failure(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    if result.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(format!("{} of {} cases failed in suite {}", result.failures.len(), result.cases, result.suite)))
    }
}

fn grid(steps: usize) -> CliResult<Vec<f64>> {
    if steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    Ok((0..steps).map(|s| s as f64 / (steps - 1) as f64).collect())
}

pub fn cmd_plotdata(a: &PlotArgs) -> CliResult<()> {
    let mut lines: Vec<String> = Vec::new();
    match a.kind {
        PlotKind::HomSweep => {
            lines.push("eta,quantum,classical".into());
            for eta in grid(a.steps)? {
                let p = BeamSplitterParam::new(eta)?;
                let q = bs_prob_direct(&PhotonConfig::bs(1, 1, 1), &p)?.value;
                let c = ClassicalTable::<f64>::new(&p)?.prob(1, 1, 1);
                lines.push(format!("{},{},{}", format_float(eta), format_float(q), format_float(c)));
            }
        }
        PlotKind::TmsSweep => {
            lines.push("lambda,probability".into());
            // lambda = 1 is not a valid squeezer
            for lambda in grid(a.steps)?.into_iter().filter(|&l| l < 1.0) {
                let p = SqueezerParam::new(lambda)?;
                let v = tms_prob(&PhotonConfig::tms(1, 1, 1), &p)?.value;
                lines.push(format!("{},{}", format_float(lambda), format_float(v)));
            }
        }
        PlotKind::DiagAsymptotic => {
            if a.i == 0 {
                return Err(CliError::Usage("--i must be positive".into()));
            }
            lines.push("n,exact,predicted".into());
            let half = BeamSplitterParam::new(0.5)?;
            let rows: Vec<Vec<f64>> = bs_diagonal_recurrence(a.i, &half, Execution::default())?;
            for (n, exact) in rows[a.i].iter().enumerate().take(2 * a.i).skip(1) {
                let predicted = bs_diag_asymptotic(a.i, n)?;
                lines.push(format!("{n},{},{}", format_float(*exact), format_float(predicted)));
            }
        }
        PlotKind::Distribution => {
            let p: BeamSplitterParam = a.eta.as_deref().unwrap_or(DEFAULT_PARAM).parse()?;
            let p = float_bs(&p)?;
            lines.push("n,quantum,classical".into());
            let t: ProbabilityTable<f64> = bs_table_recurrence(a.i, a.k, &p)?;
            let classical = ClassicalTable::<f64>::new(&p)?;
            let row = classical.row(a.i, a.k);
            for (n, q) in t.row(a.i as i64, a.k as i64)?.iter().enumerate() {
                lines.push(format!("{n},{},{}", format_float(*q), format_float(row[n])));
            }
        }
    }
    let mut w = sink(&a.out)?;
    for l in lines {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}

