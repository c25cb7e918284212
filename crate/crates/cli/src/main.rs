//! `rootdyn`: render parameter and dynamical planes, report on single
//! parameters, trace stability curves and run the self-checks.

mod commands;
mod config;
mod parse;
mod report;
mod verify;

use clap::{Args, FromArgMatches, Parser, Subcommand, ValueEnum};
use rootdyn::C64;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rootdyn", version, about = "Dynamics of the O_{a,n,k} and Behl root-finding operators")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Color each parameter by the fate of its free critical orbit.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    ParamPlane(PlaneArgs),
    /// Color each starting point by the attractor its orbit reaches.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    DynPlane(DynArgs),
    /// Fixed points, critical points and stability facts for one parameter.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Report(ReportArgs),
    /// Run the built-in consistency checks; exit code 2 on any failure.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Trace a curve on which a strange fixed point is indifferent.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Curves(CurvesArgs),
    /// Real parameters whose free critical points lie on the unit circle.
    #[command(args_override_self = true)]
    Antenna(AntennaArgs),
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct Common {
    /// INI file of `flag = value` defaults; command-line flags win.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "ROOTDYN_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Behl,
    General,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Ppm,
    Png,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct EscapeArgs {
    /// Iteration budget per orbit.
    #[arg(long, default_value_t = 100)]
    pub max_iter: u32,
    /// An orbit counts as reaching 0 once |z| drops below this.
    #[arg(long, default_value_t = 1e-8)]
    pub eps_zero: f64,
    /// An orbit counts as reaching ∞ once |z| exceeds this.
    #[arg(long, default_value_t = 1e8)]
    pub eps_inf: f64,
    /// Do not renormalize orbits that start on the unit circle.
    #[arg(long)]
    pub no_circle_projection: bool,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct OutputArgs {
    /// Image file; `.png` selects PNG, anything else PPM.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Override the image format chosen from the extension.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Also write the raw classification grid here.
    #[arg(long, value_name = "FILE")]
    pub grid: Option<PathBuf>,
    /// Also write outcome counts as CSV here.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
    /// Color scheme: default or grayscale.
    #[arg(long, default_value = "default")]
    pub palette: String,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct PlaneArgs {
    /// Named layout; its values sit below config and flags.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, value_enum, default_value = "general")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// x_min,x_max,y_min,y_max [default: family dependent]
    #[arg(long, value_parser = parse::window, allow_hyphen_values = true)]
    pub window: Option<[f64; 4]>,
    /// WIDTHxHEIGHT
    #[arg(long, value_parser = parse::resolution, default_value = "1501x1501")]
    pub res: (usize, usize),
    #[command(flatten)]
    pub escape: EscapeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct DynArgs {
    #[arg(long)]
    pub preset: Option<String>,
    /// Parameter of O_{a,n,k}.
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    pub a: Option<C64>,
    /// Behl parameter (instead of --a).
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    pub b: Option<C64>,
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// x_min,x_max,y_min,y_max
    #[arg(long, value_parser = parse::window, allow_hyphen_values = true, default_value = "-2,2,-2,2")]
    pub window: [f64; 4],
    /// WIDTHxHEIGHT
    #[arg(long, value_parser = parse::resolution, default_value = "1501x1501")]
    pub res: (usize, usize),
    #[command(flatten)]
    pub escape: EscapeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct ReportArgs {
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    pub a: Option<C64>,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    pub b: Option<C64>,
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Write the report to this file instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// ||λ| − 1| below this counts as indifferent.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed of the polynomial root solver's starting points.
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[command(flatten)]
    pub escape: EscapeArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckGroup {
    Reparam,
    Conjugacy,
    Symmetry,
    Circle,
    Predicates,
    FixedPoints,
    Antenna,
    Order,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Perturb the coefficients of a(b) used by the checks.
    Reparam,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct VerifyArgs {
    /// Run a single group of checks.
    #[arg(long, value_enum)]
    pub only: Option<CheckGroup>,
    /// Deliberately break one formula to show that the checks notice.
    #[arg(long, value_enum)]
    pub inject_fault: Option<Fault>,
    /// Seed of the sampled parameters and points.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointArg {
    Z1,
    Zm1,
    Zpm,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct CurvesArgs {
    #[arg(long, value_enum)]
    pub point: PointArg,
    #[arg(long, value_enum, default_value = "general")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Points per curve component (rays or scan lines).
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    /// `.json` selects JSON, anything else CSV [default: <point>-<family>.csv]
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct AntennaArgs {
    #[arg(long, value_enum, default_value = "general")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Parameters sampled per interval to check |c±| = 1 and that the
    /// critical orbit stays undecided; 0 skips the check.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub escape: EscapeArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verify(usize),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verify(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<rootdyn::Error> for CliError {
    fn from(e: rootdyn::Error) -> Self {
        match e {
            rootdyn::Error::Io { .. } | rootdyn::Error::Format { .. } => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn run(raw: Vec<String>) -> Result<(), CliError> {
    let argv = config::expand_args(raw)?;
    let cmd = <Cli as clap::CommandFactory>::command();
    let matches = match cmd.try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return Ok(());
            }
            let _ = e.print();
            return Err(CliError::Usage(String::new()));
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Usage(e.to_string()))?;
    match cli.command {
        Command::ParamPlane(a) => commands::param_plane(&a),
        Command::DynPlane(a) => commands::dyn_plane(&a),
        Command::Report(a) => report::run(&a),
        Command::Verify(a) => verify::run(&a),
        Command::Curves(a) => commands::curves(&a),
        Command::Antenna(a) => commands::antenna(&a),
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args_os().map(|a| a.to_string_lossy().into_owned()).collect();
    match run(raw) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) if m.is_empty() => {}
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Io(m) => eprintln!("error: {m}"),
                CliError::Verify(n) => eprintln!("verification failed: {n} check(s)"),
            }
            ExitCode::from(e.code())
        }
    }
}
