use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use seqcorr_cli::run::DEFAULT_SEED;
use seqcorr_cli::scenario::DumpKind;
use seqcorr_cli::{dump_instrument, run_scenario, run_suite, validate_scenario};
use seqcorr_cli::{CliError, CliResult, Report, RunOptions, ToleranceProfile};

#[derive(Parser, Debug)]
#[command(name = "seqcorr", version, about = "Sequential measurement correlations: scenarios and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = ToleranceProfile::Default)]
    tolerance_profile: ToleranceProfile,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall time in the report (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario file.
    Run { file: PathBuf },
    /// Print the closed-form instrument of a chain.
    DumpInstrument {
        #[arg(value_enum)]
        kind: Kind,
        /// Angle in radians; forms like `pi/2`, `-pi/4`, `2pi/3` are accepted.
        #[arg(allow_hyphen_values = true)]
        theta: String,
        #[arg(allow_hyphen_values = true)]
        phi: String,
    },
    /// Parse and validate a scenario file without running it.
    Validate { file: PathBuf },
    /// Run the acceptance battery.
    Suite,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Ghz,
    Cluster,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Parses `x`, `pi`, `pi/k`, `a pi`, `a pi/k`, with an optional sign.
fn parse_angle(s: &str) -> CliResult<f64> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || CliError::Parse(format!("cannot read angle {s:?}"));
    let Some(at) = t.find("pi") else {
        return t.parse().map_err(|_| bad());
    };
    let coef = match t[..at].trim().trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = t[at + 2..].trim();
    let div = match rest.strip_prefix('/') {
        Some(d) => d.trim().parse::<f64>().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    Ok(coef * std::f64::consts::PI / div)
}

fn read(path: &PathBuf) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn execute(cli: &Cli) -> CliResult<Report> {
    let opts = RunOptions {
        seed: cli.seed,
        profile: cli.tolerance_profile,
        timing: cli.timing,
    };
    match &cli.command {
        Command::Run { file } => run_scenario(&read(file)?, &opts),
        Command::Validate { file } => validate_scenario(&read(file)?, &opts),
        Command::DumpInstrument { kind, theta, phi } => {
            let kind = match kind {
                Kind::Ghz => DumpKind::Ghz,
                Kind::Cluster => DumpKind::Cluster,
            };
            dump_instrument(kind, parse_angle(theta)?, parse_angle(phi)?, &opts)
        }
        Command::Suite => run_suite(cli.seed.unwrap_or(DEFAULT_SEED), cli.tolerance_profile, cli.timing),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("seqcorr: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                let e = CliError::Io(format!("{}: {e}", path.display()));
                eprintln!("seqcorr: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
        }
        None => print!("{text}"),
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
