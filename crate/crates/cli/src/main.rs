mod groups;
mod rank;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use report::{CliError, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "gplab", version, about = "Runs gplab verifications and emits CSV or JSON reports")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one verification suite.
    Verify(verify::VerifyArgs),
    /// Tabulate n -> D(n) = max{k : l_S(f^k) <= n}.
    Distortion(groups::DistortionArgs),
    /// Cantor-Bendixson rank of a set or of a map's break set.
    Rank(rank::RankArgs),
    /// Sphere sizes of a Cayley ball.
    Ball(groups::BallArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Distortion(_) => "distortion",
            Command::Rank(_) => "rank",
            Command::Ball(_) => "ball",
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GPLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("GPLAB_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(report::config_err)
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    init_threads()?;
    match &cli.command {
        Command::Verify(a) => verify::run(a),
        Command::Distortion(a) => groups::distortion(a),
        Command::Rank(a) => rank::run(a),
        Command::Ball(a) => groups::ball(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    let (report, code) = match outcome {
        Ok(r) => {
            let code = if r.passed { 0 } else { 1 };
            (r, code)
        }
        Err(e @ CliError::Config(_)) => {
            eprintln!("gplab: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("gplab: {e}");
            let mut r = Report::new(cli.command.name(), &[]);
            r.fail(e.to_string());
            (r, e.exit_code())
        }
    };
    if let Some(msg) = &report.error {
        eprintln!("gplab: {msg}");
    }
    match report.write(cli.format, cli.out.as_deref()) {
        Ok(()) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("gplab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
