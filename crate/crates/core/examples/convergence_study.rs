//! DMD fitted to Runge-Kutta data converges to the exact flow at the order
//! of the method.

use dmd_sysid::experiments::{run_convergence_study, ExperimentConfig};
use dmd_sysid::rk::{BUILTIN_TABLEAUS, DEFAULT_LADDER};

fn main() -> dmd_sysid::Result<()> {
    let config = ExperimentConfig::default();
    for name in BUILTIN_TABLEAUS {
        let table = run_convergence_study(&config, name, &DEFAULT_LADDER)?;
        let errors: Vec<String> = table
            .rows
            .iter()
            .map(|r| r.error.map_or("-".into(), |e| format!("{e:.2e}")))
            .collect();
        println!(
            "{name:>18} [{}]: slope {:.3?}",
            errors.join(", "),
            table.slope
        );
    }
    Ok(())
}
