use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use afc::{CliError, Outcome, OUTPUT_DIR_ENV};

/// Weak-signal propagation through atomic frequency combs.
#[derive(Parser)]
#[command(name = "afc", version, about)]
struct Cli {
    /// Worker threads for parallel evaluation (all cores by default).
    /// Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario of a config and write its CSV files.
    Run { config: PathBuf },
    /// Re-run the scenarios once per value of a numeric config field.
    Sweep {
        config: PathBuf,
        /// Dotted field path inside each scenario, e.g. `comb.gamma_t`.
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        values: Vec<f64>,
    },
    /// Check a config without computing or writing anything.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", serde_json::json!({ "error": { "kind": "usage", "message": e.to_string() } }));
            return ExitCode::from(2);
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    let override_dir = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let outcome = match command {
        Command::Validate { config } => {
            let (count, warnings) = afc::validate(&config)?;
            warn(&warnings);
            println!("{}: {count} scenario(s) valid", config.display());
            return Ok(());
        }
        Command::Run { config } => afc::run(&config, override_dir.as_deref())?,
        Command::Sweep { config, axis, values } => afc::sweep(&config, &axis, &values, override_dir.as_deref())?,
    };
    finish(&outcome)
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("{}", serde_json::json!({ "warning": w }));
    }
}

fn finish(outcome: &Outcome) -> Result<(), CliError> {
    warn(&outcome.warnings);
    for path in outcome.write()? {
        println!("{}", path.display());
    }
    Ok(())
}
