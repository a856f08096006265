use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mdrate::config::ExperimentConfig;
use mdrate::exec::RayonExecutor;
use mdrate::presets::{model_presets, scale_presets};
use mdrate::run::{resolve_out_dir, run};
use mdrate::verify::{verify, Suite};
use mdrate::RunError;

#[derive(Parser)]
#[command(
    name = "mdrate",
    version,
    about = "Moderate-deviation tail experiments and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        /// Config file.
        config: PathBuf,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Output directory; defaults to the config's `output`, then $MDRATE_OUT_DIR.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite: inequalities, exponents, envelopes, rates or all.
    Verify {
        suite: String,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// List model and scale presets.
    ListPresets,
}

fn pool(workers: usize) -> Result<RayonExecutor, RunError> {
    RayonExecutor::new(workers).map_err(|e| RunError::Validation(format!("thread pool: {e}")))
}

fn execute(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Run {
            config,
            workers,
            out,
        } => {
            let text = std::fs::read_to_string(&config).map_err(|e| {
                RunError::Validation(format!("cannot read {}: {e}", config.display()))
            })?;
            let config = ExperimentConfig::from_toml(&text)?;
            let dir = resolve_out_dir(out.as_deref(), &config);
            let result = run(&config, &dir, workers)?;
            println!("wrote {} rows to {}", result.rows, dir.display());
            Ok(())
        }
        Command::Verify { suite, workers } => {
            let suite: Suite = suite.parse()?;
            let report = verify(suite, &pool(workers)?)?;
            print!("{}", report.table());
            if report.passed() {
                Ok(())
            } else {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.name.as_str())
                    .collect();
                Err(RunError::Verification(failed.join(", ")))
            }
        }
        Command::ListPresets => {
            println!("models:");
            for p in model_presets() {
                println!(
                    "  {:<20} {} on g = {}",
                    p.name,
                    p.model.label(),
                    p.scale.label()
                );
            }
            println!("scales:");
            for (name, g) in scale_presets() {
                println!("  {:<20} {}", name, g.label());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
