use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use locstat::harness::{emit_report, parse_formats, run_command, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "locstat", version, about = "Local eigenvalue statistics of random operators")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Density of states from eigenvalue counts in a bin around E.
    Dos,
    /// Linearity of sub-cube counts in the window length.
    Wegner,
    /// Probability of two eigenvalues in a sub-cube window along the ladder.
    Minami,
    /// Count and gap statistics against the Poisson process.
    Poisson,
    /// Independence of counts at E and E' from the same realization.
    Independence,
    /// Joint occupation of disjoint windows along the ladder.
    Decorrelate,
    /// Decay of fractional moments of the Green function.
    Green,
    /// Random comparison of eigenvalue counting against dense diagonalization.
    OracleCheck,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Dos => Command::Dos,
            Cmd::Wegner => Command::Wegner,
            Cmd::Minami => Command::Minami,
            Cmd::Poisson => Command::Poisson,
            Cmd::Independence => Command::Independence,
            Cmd::Decorrelate => Command::Decorrelate,
            Cmd::Green => Command::Green,
            Cmd::OracleCheck => Command::OracleCheck,
        }
    }
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials per side (overrides the config).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads; 1 runs serially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long, global = true, default_value = "csv,json")]
    format: String,
}

fn run(cli: Cli) -> locstat::Result<bool> {
    let mut config = match &cli.common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.common.seed {
        config.seed = s;
    }
    if let Some(t) = cli.common.trials {
        config.trials = t;
    }
    let formats = parse_formats(&cli.common.format)?;
    let run = run_command(cli.command.into(), &config, cli.common.threads)?;
    for t in &run.report.tests {
        let stat = t.statistic.map_or("-".to_string(), |v| format!("{v:.6}"));
        let p = t.p_value.map_or("-".to_string(), |v| format!("{v:.4}"));
        println!("{:<28} {:?}  statistic={stat}  p={p}  n={}", t.name, t.verdict, t.sample_size);
        for note in &t.notes {
            println!("    note: {note}");
        }
    }
    for path in emit_report(&run, &formats, &cli.common.out)? {
        println!("wrote {}", path.display());
    }
    Ok(run.report.all_passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
