use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::transform::Transformation;

/// Transformation applied to the snapshots before fitting the
/// transformed-data model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformChoice {
    /// Ones on the diagonal and the superdiagonal.
    UpperBidiagonal,
    Identity,
}

impl TransformChoice {
    pub fn build(self, n: usize) -> Transformation {
        match self {
            TransformChoice::UpperBidiagonal => Transformation::upper_bidiagonal_ones(n),
            TransformChoice::Identity => Transformation::identity(n),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Block size `N` of the test system (state dimension `2N`).
    pub blocks: usize,
    /// Initial value; `None` means `[1, 2, ..., 2N]`.
    pub x0: Option<Vec<f64>>,
    pub h: f64,
    /// Number of steps `m`; the data has `m + 1` snapshots.
    pub steps: usize,
    pub tableau: String,
    pub transform: TransformChoice,
    pub rank_tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
    /// Seed of the dense system used by the convergence and recovery studies.
    pub seed: u64,
    /// State dimension of the dense system.
    pub dense_dim: usize,
    /// Horizon over which the convergence error is measured.
    pub t_end: f64,
    /// Length of the training trajectory in the convergence study.
    pub train_horizon: f64,
    /// Step size of the recovery study.
    pub recovery_h: f64,
    /// Steps of the recovery study's training trajectory.
    pub recovery_steps: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            blocks: 5,
            x0: None,
            h: 0.1,
            steps: 100,
            tableau: "exact".into(),
            transform: TransformChoice::UpperBidiagonal,
            rank_tol: None,
            out_dir: None,
            seed: 42,
            dense_dim: 8,
            t_end: 1.0,
            train_horizon: 10.0,
            recovery_h: 0.05,
            recovery_steps: 200,
        }
    }
}

impl ExperimentConfig {
    pub fn initial_value(&self) -> Result<Vector> {
        let n = 2 * self.blocks;
        match &self.x0 {
            None => Ok(Vector::from_fn(n, |i, _| i as f64 + 1.0)),
            Some(v) if v.len() == n => Ok(Vector::from_column_slice(v)),
            Some(v) => Err(Error::DimensionMismatch(format!(
                "x0 has length {}, state dimension is {n}",
                v.len()
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks == 0 {
            return Err(Error::InvalidArgument(
                "block size must be at least 1".into(),
            ));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step size must be positive, got {}",
                self.h
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidArgument("need at least one step".into()));
        }
        self.initial_value().map(|_| ())
    }
}
