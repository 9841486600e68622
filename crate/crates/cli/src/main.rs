//! `hmf`: synthesis, analysis and verification from the command line.
//!
//! Exit codes: 0 pass, 1 analytic failure, 2 usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod out;
mod verify;

#[derive(Debug)]
pub enum Fail {
    Usage(String),
    Analytic(String),
}

impl From<hmf_core::Error> for Fail {
    fn from(e: hmf_core::Error) -> Self {
        match e {
            hmf_core::Error::InsufficientData(_) => Fail::Analytic(e.to_string()),
            _ => Fail::Usage(e.to_string()),
        }
    }
}

/// Ok(true) passes, Ok(false) is an analytic failure already reported.
pub type Outcome = Result<bool, Fail>;

#[derive(Parser, Debug)]
#[command(name = "hmf", version, about = "Multifractal analysis on the Heisenberg group")]
struct Cli {
    /// worker threads for parallel scans (0 = all cores); never changes results
    #[arg(long, global = true, env = "HMF_THREADS", default_value_t = 0)]
    threads: usize,
    /// seed for Monte Carlo checks
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run an oracle suite and print a pass/fail table
    Verify(VerifyArgs),
    /// Write a coefficient field file
    Synth(SynthArgs),
    /// Pointwise exponent estimates as CSV
    Exponent(ExponentArgs),
    /// Counting spectrum as CSV
    Spectrum(SpectrumArgs),
    /// Coefficient counts as CSV
    Counting(CountingArgs),
    /// Dyadic approximation rates as CSV
    Rate(RateArgs),
    /// Taylor polynomial and remainder slope of a built-in function
    Taylor(TaylorArgs),
    /// Stratified groups from structure constants
    Carnot {
        #[command(subcommand)]
        cmd: CarnotCmd,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lattice,
    Group,
    Carnot,
    Besov,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub suite: Suite,
    /// extra stratification file for the carnot suite
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Monte Carlo sample count
    #[arg(long, default_value_t = 2_000_000)]
    pub samples: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    BesovSaturating,
    MonofractalRound,
    Zero,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    pub kind: SynthKind,
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    /// input field for monofractal-round
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// rounding depth for monofractal-round
    #[arg(long = "N")]
    pub n: Option<u32>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// min over the upper half of the window of −log₂ D_j / j
    Raw,
    /// lower-envelope slope with the j^{−β} correction
    Fit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LeaderArg {
    Exact,
    Windowed,
}

#[derive(Args, Debug)]
pub struct ExponentArgs {
    pub field: PathBuf,
    /// probe points, one `p q r` per line
    #[arg(long, conflicts_with = "rate")]
    pub points: Option<PathBuf>,
    /// construct a probe with this approximation rate (repeatable, `inf` allowed)
    #[arg(long, value_delimiter = ',')]
    pub rate: Vec<f64>,
    /// terms kept in the rate construction
    #[arg(long, default_value_t = 30)]
    pub depth: usize,
    #[arg(long, default_value_t = 4)]
    pub jmin: i64,
    #[arg(long, default_value_t = 16)]
    pub jmax: i64,
    #[arg(long, value_enum, default_value_t = ModeArg::Fit)]
    pub mode: ModeArg,
    /// log-correction exponent; defaults to the field's own β
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_enum, default_value_t = LeaderArg::Exact)]
    pub leaders: LeaderArg,
    /// extra scales for windowed leaders
    #[arg(long, default_value_t = 4)]
    pub delta: i64,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ParamOverride {
    /// Besov parameters (default: taken from the field file)
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    pub field: PathBuf,
    /// explicit h grid
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub h: Vec<f64>,
    /// points in the default grid inside (s − Q/p, s)
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub jmin: i64,
    #[arg(long, default_value_t = 14)]
    pub jmax: i64,
    #[arg(long, default_value_t = 1.0)]
    pub c0: f64,
    /// threshold correction exponent; defaults to the field's own β
    #[arg(long)]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub params: ParamOverride,
    /// also write a gnuplot script plotting the CSV
    #[arg(long)]
    pub plot_script: Option<PathBuf>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CountingArgs {
    pub field: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub j: Vec<i64>,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub h: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub c0: f64,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RateArgs {
    /// point as p,q,r
    #[arg(long, value_parser = triple, allow_hyphen_values = true, conflicts_with = "xi")]
    pub point: Option<[f64; 3]>,
    /// use the constructed point of this rate
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, default_value_t = 30)]
    pub depth: usize,
    #[arg(long, default_value_t = 1)]
    pub jmin: i64,
    #[arg(long, default_value_t = 20)]
    pub jmax: i64,
    /// search half-width in index units
    #[arg(long, default_value_t = 2)]
    pub window: i64,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TaylorArgs {
    /// built-in function id
    pub function: String,
    /// base point p,q,r
    #[arg(long, value_parser = triple, allow_hyphen_values = true)]
    pub x0: Option<[f64; 3]>,
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    /// largest radius, smallest radius, count
    #[arg(long, value_parser = triple, default_value = "0.5,0.004,8")]
    pub radii: [f64; 3],
}

/// `a,b,c` with finite entries.
fn triple(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<&str> = s.split(',').map(str::trim).collect();
    if v.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0f64; 3];
    for (o, t) in out.iter_mut().zip(v) {
        *o = t.parse().map_err(|_| format!("bad number `{t}`"))?;
        if !o.is_finite() {
            return Err(format!("`{t}` is not finite"));
        }
    }
    Ok(out)
}

#[derive(Subcommand, Debug)]
enum CarnotCmd {
    /// Validate a stratification file and print Q_G
    Check { spec: PathBuf },
}

fn run(cli: Cli) -> Outcome {
    match cli.cmd {
        Cmd::Verify(a) => verify::run(&a, cli.seed),
        Cmd::Synth(a) => commands::synth(&a),
        Cmd::Exponent(a) => commands::exponent(&a),
        Cmd::Spectrum(a) => commands::spectrum(&a),
        Cmd::Counting(a) => commands::counting(&a),
        Cmd::Rate(a) => commands::rate(&a),
        Cmd::Taylor(a) => commands::taylor(&a),
        Cmd::Carnot { cmd: CarnotCmd::Check { spec } } => commands::carnot_check(&spec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    match hmf_core::par::with_threads(threads, move || run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Analytic(m)) => {
            eprintln!("hmf: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(m)) => {
            eprintln!("hmf: {m}");
            ExitCode::from(2)
        }
    }
}
