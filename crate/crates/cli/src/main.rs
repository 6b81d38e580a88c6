use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sievelab_cli::config::{Command, ExperimentConfig};
use sievelab_cli::suite::{render_table, SuiteRow};
use sievelab_cli::{config_from_json, run, run_experiment, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "sievelab", version, about = "Experiments on sets cut out by residue constraints at large primes")]
struct Cli {
    /// Worker threads (default: every core).
    #[arg(long, global = true, env = "SIEVELAB_WORKERS")]
    workers: Option<usize>,
    /// Seed for sampled quantities; recorded in the report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Top,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Top {
    #[command(flatten)]
    Exp(Command),
    /// Replay a config file, or the config embedded in a report.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match go(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}

fn go(cli: Cli) -> anyhow::Result<i32> {
    let config = match cli.cmd {
        Top::Exp(cmd) => ExperimentConfig::new(cmd, cli.workers, cli.seed),
        Top::Run { config } => {
            let text = run::read_text(&config)?;
            let mut cfg = config_from_json(&text).map_err(|e| anyhow::anyhow!("{}: {e:#}", config.display()))?;
            if cli.workers.is_some() {
                cfg.workers = cli.workers;
            }
            cfg
        }
    };
    let report = run_experiment(&config)?;
    let text = report.to_json() + "\n";
    match &cli.out {
        Some(path) => run::write_text(path, &text)?,
        None => print!("{text}"),
    }
    if let Command::Suite(_) = config.command {
        if let Ok(rows) = serde_json::from_value::<Vec<SuiteRow>>(report.result["rows"].clone()) {
            eprint!("{}", render_table(&rows));
        }
    }
    eprintln!("{}: exit {} in {:.1} ms", config.command.name(), report.exit_code, report.timing.elapsed_ms);
    Ok(report.exit_code)
}
