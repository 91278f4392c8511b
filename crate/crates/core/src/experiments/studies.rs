use std::io::Write;

use serde::Serialize;

use crate::dmd::{dmd_matrix, TrajectoryData};
use crate::error::Result;
use crate::linalg::{matrix_exponential, Matrix, Vector};
use crate::rk::{
    builtin_tableau, check_step_admissible, fit_order, integrate, roundoff_floor, steps_to,
};
use crate::sysident::{
    demonstrate_heun_ambiguity, dmd_error_vs_flow, exact_sampling_round_trip,
    recover_continuous_exact_sampling, recover_one_stage, OneStageMethod,
};

use super::config::ExperimentConfig;
use super::system::seeded_dense_system;

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub error: Option<f64>,
    pub used_in_fit: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub tableau: String,
    pub declared_order: u32,
    pub rows: Vec<ConvergenceRow>,
    pub slope: Option<f64>,
    pub warnings: Vec<String>,
}

impl ConvergenceTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["tableau", "h", "error", "used_in_fit", "slope"])?;
        let slope = self.slope.map(|s| s.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                self.tableau.clone(),
                r.h.to_string(),
                r.error.map(|e| e.to_string()).unwrap_or_default(),
                r.used_in_fit.to_string(),
                slope.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Error of DMD predictions fitted to Runge-Kutta data against the exact
/// flow, as a function of the step size.
///
/// For every `h` the method is run long enough to cover both `t_end` and the
/// training horizon, DMD is fitted to the whole trajectory and the maximum
/// error of `A_dmd^i x0` over `i h <= t_end` is recorded. Inadmissible step
/// sizes are skipped with a warning.
pub fn run_convergence_study(
    config: &ExperimentConfig,
    tableau_name: &str,
    ladder: &[f64],
) -> Result<ConvergenceTable> {
    let tableau = builtin_tableau(tableau_name)?;
    let (f, x0) = seeded_dense_system(config.dense_dim, config.seed);
    let mut rows = Vec::with_capacity(ladder.len());
    let mut warnings = Vec::new();

    for &h in ladder {
        let verdict = check_step_admissible(&tableau, &f, h)?;
        if !verdict.admissible {
            let msg = format!(
                "h = {h}: stage system singular (pivot {:e})",
                verdict.smallest_pivot
            );
            warnings.push(msg.clone());
            rows.push(ConvergenceRow {
                h,
                error: None,
                used_in_fit: false,
                note: Some(msg),
            });
            continue;
        }
        let horizon = steps_to(config.t_end, h)?;
        let train = horizon.max((config.train_horizon / h).ceil() as usize);
        let data = integrate(&tableau, &f, h, &x0, train)?;
        let model = dmd_matrix(&data, config.rank_tol)?;
        let error = dmd_error_vs_flow(&model, &f, &x0, horizon, h)?;
        rows.push(ConvergenceRow {
            h,
            error: Some(error),
            used_in_fit: false,
            note: None,
        });
    }

    let scale = (matrix_exponential(&(&f * config.t_end))? * &x0).norm();
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.error.map(|e| (r.h, e)))
        .collect();
    let slope = match fit_order(&points, roundoff_floor(scale)) {
        Ok(est) => {
            let mut used = est.used.into_iter();
            for r in rows.iter_mut().filter(|r| r.error.is_some()) {
                r.used_in_fit = used.next().unwrap_or(false);
            }
            Some(est.slope)
        }
        Err(e) => {
            warnings.push(e.to_string());
            None
        }
    };
    Ok(ConvergenceTable {
        tableau: tableau.name,
        declared_order: tableau.declared_order,
        rows,
        slope,
        warnings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryRow {
    pub method: String,
    /// `||F - F_rec||_F / ||F||_F`, or the discrepancy for the Heun row.
    pub relative_error: Option<f64>,
    pub identifiable: bool,
    pub note: String,
}

fn sample_flow(f: &Matrix, x0: &Vector, h: f64, steps: usize) -> Result<TrajectoryData> {
    let flow = matrix_exponential(&(f * h))?;
    let mut xs = vec![x0.clone()];
    for i in 0..steps {
        let next = &flow * &xs[i];
        xs.push(next);
    }
    TrajectoryData::new(xs, h, "exact")
}

/// Recovery of `F` from DMD fits to one-stage Runge-Kutta data, from exactly
/// sampled data via the matrix logarithm, and the Heun ambiguity witness.
/// Failures are recorded per row.
pub fn run_recovery_study(config: &ExperimentConfig) -> Vec<RecoveryRow> {
    let (f, x0) = seeded_dense_system(config.dense_dim, config.seed);
    let h = config.recovery_h;
    let f_norm = f.norm();
    let mut rows = Vec::new();

    for method in OneStageMethod::ALL {
        let result = (|| -> Result<RecoveryRow> {
            let data = integrate(
                &builtin_tableau(method.name())?,
                &f,
                h,
                &x0,
                config.recovery_steps,
            )?;
            let model = dmd_matrix(&data, config.rank_tol)?;
            let rep = recover_one_stage(method, &model, h)?;
            if !rep.inverse_existed {
                return Ok(RecoveryRow {
                    method: method.name().into(),
                    relative_error: None,
                    identifiable: false,
                    note: format!(
                        "inverse does not exist (pivot {:e})",
                        rep.pivot.unwrap_or(0.0)
                    ),
                });
            }
            Ok(RecoveryRow {
                method: method.name().into(),
                relative_error: Some((&rep.recovered - &f).norm() / f_norm),
                identifiable: true,
                note: format!("rank {}", rep.rank),
            })
        })();
        rows.push(result.unwrap_or_else(|e| failed_row(method.name(), e)));
    }

    let exact = (|| -> Result<RecoveryRow> {
        let model = dmd_matrix(
            &sample_flow(&f, &x0, h, config.recovery_steps)?,
            config.rank_tol,
        )?;
        let rep = recover_continuous_exact_sampling(&model, h)?;
        Ok(RecoveryRow {
            method: "exact-sampling".into(),
            relative_error: Some((&rep.recovered - &f).norm() / f_norm),
            identifiable: true,
            note: format!("round trip {:e}", exact_sampling_round_trip(&rep, &model)?),
        })
    })();
    rows.push(exact.unwrap_or_else(|e| failed_row("exact-sampling", e)));

    rows.push(match demonstrate_heun_ambiguity(h) {
        Ok(w) => RecoveryRow {
            method: "heun".into(),
            relative_error: Some(w.discrepancy),
            identifiable: false,
            note: format!(
                "not identifiable: F = {} and F = {} give A_h = {} and {}",
                w.f1, w.f2, w.a_h1, w.a_h2
            ),
        },
        Err(e) => failed_row("heun", e),
    });
    rows
}

fn failed_row(method: &str, e: crate::error::Error) -> RecoveryRow {
    RecoveryRow {
        method: method.into(),
        relative_error: None,
        identifiable: false,
        note: format!("failed: {e}"),
    }
}

pub fn write_recovery_csv<W: Write>(out: W, rows: &[RecoveryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "relative_error", "identifiable", "note"])?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            r.relative_error.map(|e| e.to_string()).unwrap_or_default(),
            r.identifiable.to_string(),
            r.note.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
