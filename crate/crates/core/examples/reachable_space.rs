//! The block test system: 100 steps from `x0 = [1, ..., 10]` only explore a
//! five-dimensional subspace. DMD reproduces trajectories inside it, sends
//! the orthogonal complement to zero, and a sheared fit disagrees there.
//!
//! Usage: `cargo run --example reachable_space -- [OUT_DIR]`

use std::path::PathBuf;

use dmd_sysid::experiments::{run_reachable_experiment, write_reachable_outputs, ExperimentConfig};

fn main() -> dmd_sysid::Result<()> {
    let config = ExperimentConfig::default();
    let report = run_reachable_experiment(&config)?;
    let s = &report.summary;
    println!(
        "state dimension {}, snapshot rank {}",
        s.dim, s.snapshot_rank
    );
    let sv: Vec<String> = s
        .singular_values
        .iter()
        .map(|v| format!("{v:.3e}"))
        .collect();
    println!("singular values [{}]", sv.join(", "));
    for c in &s.checks {
        println!(
            "{} {}: {:.2e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value
        );
    }
    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        write_reachable_outputs(&report, &dir)?;
        println!("trajectories written to {}", dir.display());
    }
    Ok(())
}
