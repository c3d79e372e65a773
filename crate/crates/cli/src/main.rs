mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::{CliError, Outcome};
use crate::config::{RunConfig, N_CAP_ENV};

pub const EXIT_SEPARABLE: u8 = 2;
pub const EXIT_NOT_DETECTED: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "mqwitness", version, about = "Entanglement witnesses for multiqubit pure states")]
struct Cli {
    /// TOML run configuration (seed, tolerances, restarts, n_cap).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Genuine-entanglement and SMQ-form checks for a state file.
    Classify { state: PathBuf },
    /// Builds a witness for a state file, or one of the named witnesses.
    Build {
        #[arg(required_unless_present = "named", conflicts_with = "named")]
        state: Option<PathBuf>,
        #[arg(long, value_enum)]
        named: Option<NamedWitness>,
        /// Qubit count for --named w_n / w_prime.
        #[arg(long)]
        n: Option<usize>,
        /// `auto` or a positive value.
        #[arg(long, default_value = "auto")]
        b: String,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Splits a witness into local measurement settings.
    Decompose {
        witness: PathBuf,
        #[arg(long, value_enum, default_value = "universal")]
        scheme: SchemeArg,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// White-noise tolerance of a witness on a state.
    Tolerance {
        witness: PathBuf,
        state: PathBuf,
        /// Re-optimize b for the witness chain instead of using the file as is.
        #[arg(long)]
        optimize_b: bool,
    },
    /// Entangled/separable dichotomy for permutation-symmetric SMQ coefficients.
    Symmetric { psmq: PathBuf },
    /// Quick internal consistency checks.
    Selftest,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum NamedWitness {
    Dicke24,
    WN,
    WPrime,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "lower")]
pub enum SchemeArg {
    Universal,
    W3opt,
    W4improved,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let cfg = RunConfig::load(cli.config.as_deref(), cli.seed, std::env::var(N_CAP_ENV).ok()).map_err(CliError::Usage)?;
    match cli.command {
        Command::Classify { state } => commands::classify(&cfg, &state),
        Command::Build { state, named, n, b, out } => {
            let b = commands::parse_b(&b)?;
            match (state, named) {
                (Some(path), _) => {
                    if n.is_some() {
                        return Err(CliError::Usage("--n only applies to --named witnesses".into()));
                    }
                    commands::build_from_state(&cfg, &path, b, out.as_deref())
                }
                (None, Some(named)) => commands::build_named(&cfg, named, n, b, out.as_deref()),
                (None, None) => Err(CliError::Usage("build needs a state file or --named".into())),
            }
        }
        Command::Decompose { witness, scheme, out } => commands::decompose(&cfg, &witness, scheme, out.as_deref()),
        Command::Tolerance { witness, state, optimize_b } => commands::tolerance(&cfg, &witness, &state, optimize_b),
        Command::Symmetric { psmq } => commands::symmetric(&cfg, &psmq),
        Command::Selftest => commands::selftest(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let json = cli.json;
    let (outcome, code) = match run(cli) {
        Ok(outcome) => (Some(outcome), 0),
        Err(err) => {
            eprintln!("error: {err}");
            let code = err.exit_code();
            (err.into_outcome(), code)
        }
    };
    if let Some(outcome) = outcome {
        let mut stdout = std::io::stdout().lock();
        let text = if json { outcome.json } else { outcome.text };
        if writeln!(stdout, "{text}").is_err() {
            return ExitCode::FAILURE;
        }
    }
    ExitCode::from(code)
}
