use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fnls_cli::presets::{load_preset, PRESETS};
use fnls_cli::run::{output_root, run};
use fnls_cli::sweep::{sweep, SweepFile};
use fnls_cli::{CliError, RunConfig};
use fnls_core::dynamics::StopReason;

/// Semiclassical fractional NLS laboratory.
///
/// Output goes below $FNLS_OUTPUT_ROOT (default: ./runs).
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration.
    Run {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Dotted `key=value` replacing a configuration entry; repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run every entry of a sweep file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the built-in presets.
    ListPresets,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}

fn execute(cmd: Command) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Run {
            config,
            preset,
            overrides,
        } => {
            let cfg = match (config, preset) {
                (Some(path), _) => RunConfig::from_path(&path, &overrides)?,
                (None, Some(name)) => load_preset(&name, &overrides)?,
                (None, None) => unreachable!("clap requires one of --config and --preset"),
            };
            let (sim, dir) = run(&cfg, &output_root())?;
            let s = &sim.summary;
            println!(
                "{}: {:?} at t = {} ({} steps), t_f = {}, mu = {}, max delta_E = {:e}, output {}",
                s.name,
                s.stop_reason,
                s.t_final,
                s.steps,
                opt(s.t_f),
                opt(s.mu_at_tf),
                s.max_delta_e,
                dir.display()
            );
            Ok(if s.stop_reason == StopReason::Overflow {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Sweep { config } => {
            let file = SweepFile::from_path(&config)?;
            let base = config.parent().map(PathBuf::from).unwrap_or_default();
            let name = file.name.clone().unwrap_or_else(|| {
                config
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "sweep".into())
            });
            let dir = output_root().join(name);
            let rows = sweep(&file.runs, &base, &dir)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!(
                "{} runs, {failed} failed, table {}",
                rows.len(),
                dir.join("sweep.csv").display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::ListPresets => {
            for (name, _) in PRESETS {
                let c = load_preset(name, &[])?;
                let tag = if c.long { " [long]" } else { "" };
                println!("{name:32} {}{tag}", c.description);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}
