use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rvas_design::{run_experiment, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "rvas-design",
    version,
    about = "Rare-variant study design: prediction, simulation and power"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output_path` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 uses every core.
        #[arg(long, env = "RVAS_THREADS", default_value_t = 0)]
        threads: usize,
        /// Print the normalized config and exit without running.
        #[arg(long)]
        print_config: bool,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let Command::Run {
        config,
        out,
        threads,
        print_config,
    } = cli.command;
    let text = std::fs::read_to_string(&config).map_err(|e| CliError::Io {
        path: config.clone(),
        source: e,
    })?;
    let cfg = ExperimentConfig::from_json(&text)?;
    if print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return Ok(());
    }
    let out = out
        .or_else(|| cfg.output_path.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let report = run_experiment(&cfg, &out, threads)?;
    for w in &report.manifest.warnings {
        eprintln!("warning: {w}");
    }
    for f in &report.manifest.files {
        println!("{}", report.out_dir.join(&f.path).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
