use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dmd_sysid::dmd::dmd_matrix;
use dmd_sysid::experiments::{
    ensure_passed, run_convergence_study, run_reachable_experiment, run_recovery_study,
    write_reachable_outputs, write_recovery_csv, ExperimentConfig,
};
use dmd_sysid::io::{read_matrix_csv, read_trajectory_csv, write_trajectory_csv, DmdSummary};
use dmd_sysid::linalg::Vector;
use dmd_sysid::rk::{builtin_tableau, integrate, DEFAULT_LADDER};
use dmd_sysid::Result;

#[derive(Parser)]
#[command(
    name = "dmd-sysid",
    version,
    about = "DMD-based identification of linear time-invariant systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reachable-space experiment on the block test system.
    #[command(name = "paper-example")]
    ReachableExample {
        #[arg(long = "n", default_value_t = 5)]
        blocks: usize,
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value = "reachable-space")]
        out: PathBuf,
    },
    /// Convergence of DMD predictions on Runge-Kutta data.
    Convergence {
        #[arg(long)]
        tableau: String,
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<f64>>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Recovery of the continuous system matrix.
    Recovery {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Fits a DMD model to a snapshot CSV.
    Dmd {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        rank_tol: Option<f64>,
    },
    /// Integrates x' = F x with a built-in Runge-Kutta method.
    Integrate {
        #[arg(long)]
        tableau: String,
        /// CSV file holding F, one row per matrix row.
        #[arg(long)]
        system: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Vec<f64>,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ReachableExample {
            blocks,
            h,
            steps,
            out,
        } => {
            let config = ExperimentConfig {
                blocks,
                h,
                steps,
                out_dir: Some(out.clone()),
                ..ExperimentConfig::default()
            };
            let report = run_reachable_experiment(&config)?;
            write_reachable_outputs(&report, &out)?;
            for c in &report.summary.checks {
                println!(
                    "{} {}: {:e} (bound {:e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.bound
                );
            }
            println!(
                "snapshot rank {}, outputs in {}",
                report.summary.snapshot_rank,
                out.display()
            );
            ensure_passed(&report.summary)
        }
        Command::Convergence {
            tableau,
            ladder,
            seed,
        } => {
            let config = ExperimentConfig {
                seed,
                ..ExperimentConfig::default()
            };
            let ladder = ladder.unwrap_or_else(|| DEFAULT_LADDER.to_vec());
            let table = run_convergence_study(&config, &tableau, &ladder)?;
            table.write_csv(io::stdout().lock())?;
            for w in &table.warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Command::Recovery { seed } => {
            let config = ExperimentConfig {
                seed,
                ..ExperimentConfig::default()
            };
            write_recovery_csv(io::stdout().lock(), &run_recovery_study(&config))
        }
        Command::Dmd {
            input,
            out,
            rank_tol,
        } => {
            let data = read_trajectory_csv(File::open(&input)?)?;
            let summary = DmdSummary::from_model(&dmd_matrix(&data, rank_tol)?)?;
            let mut w = output(&out)?;
            serde_json::to_writer_pretty(&mut w, &summary)?;
            writeln!(w)?;
            Ok(())
        }
        Command::Integrate {
            tableau,
            system,
            x0,
            h,
            steps,
            out,
        } => {
            let f = read_matrix_csv(File::open(&system)?)?;
            let tableau = builtin_tableau(&tableau)?;
            let traj = integrate(&tableau, &f, h, &Vector::from_vec(x0), steps)?;
            write_trajectory_csv(output(&out)?, &traj)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
