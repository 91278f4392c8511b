//! Runge-Kutta discretization of linear time-invariant systems `x' = F x`.
//!
//! For an `s`-stage method with coefficient pair `(A, b)` the one-step map is
//! the matrix
//!
//! ```text
//! A_h = I + h (b^T ⊗ I) (I - h A ⊗ F)^{-1} (e ⊗ F)
//! ```
//!
//! which is assembled by solving the Kronecker-structured stage system for
//! all `n` columns of `e ⊗ F` at once.

use serde::Serialize;

use crate::dmd::TrajectoryData;
use crate::error::{Error, Result};
use crate::linalg::{
    kronecker_product, matrix_exponential, pivot_report, Matrix, PivotedLu, Vector,
};

/// Names accepted by [`builtin_tableau`].
pub const BUILTIN_TABLEAUS: [&str; 5] = [
    "explicit-euler",
    "implicit-euler",
    "implicit-midpoint",
    "heun",
    "rk4",
];

/// Stage coefficients and weights of a Runge-Kutta method. Nodes are not
/// needed for autonomous linear systems.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub name: String,
    pub coefficients: Matrix,
    pub weights: Vector,
    pub declared_order: u32,
}

impl ButcherTableau {
    pub fn new(
        name: impl Into<String>,
        coefficients: Matrix,
        weights: Vector,
        declared_order: u32,
    ) -> Result<Self> {
        let s = weights.len();
        if s == 0 {
            return Err(Error::Empty("tableau has no stages".into()));
        }
        if coefficients.shape() != (s, s) {
            return Err(Error::DimensionMismatch(format!(
                "coefficient matrix is {}x{}, expected {s}x{s}",
                coefficients.nrows(),
                coefficients.ncols()
            )));
        }
        if declared_order == 0 {
            return Err(Error::InvalidArgument(
                "declared order must be positive".into(),
            ));
        }
        Ok(ButcherTableau {
            name: name.into(),
            coefficients,
            weights,
            declared_order,
        })
    }

    pub fn stages(&self) -> usize {
        self.weights.len()
    }

    /// `(alpha, beta)` of a one-stage method.
    pub fn one_stage(&self) -> Option<(f64, f64)> {
        (self.stages() == 1).then(|| (self.coefficients[(0, 0)], self.weights[0]))
    }
}

pub fn builtin_tableau(name: &str) -> Result<ButcherTableau> {
    let m = |s: usize, v: &[f64]| Matrix::from_row_slice(s, s, v);
    let w = |v: &[f64]| Vector::from_column_slice(v);
    match name {
        "explicit-euler" => ButcherTableau::new(name, m(1, &[0.0]), w(&[1.0]), 1),
        "implicit-euler" => ButcherTableau::new(name, m(1, &[1.0]), w(&[1.0]), 1),
        "implicit-midpoint" => ButcherTableau::new(name, m(1, &[0.5]), w(&[1.0]), 2),
        "heun" => ButcherTableau::new(name, m(2, &[0.0, 0.0, 1.0, 0.0]), w(&[0.5, 0.5]), 2),
        "rk4" => ButcherTableau::new(
            name,
            m(
                4,
                &[
                    0.0, 0.0, 0.0, 0.0, //
                    0.5, 0.0, 0.0, 0.0, //
                    0.0, 0.5, 0.0, 0.0, //
                    0.0, 0.0, 1.0, 0.0,
                ],
            ),
            w(&[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0]),
            4,
        ),
        _ => Err(Error::UnknownTableau {
            name: name.to_string(),
            options: BUILTIN_TABLEAUS.join(", "),
        }),
    }
}

/// Whether `I - h A ⊗ F` is numerically nonsingular for a step size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub smallest_pivot: f64,
    pub threshold: f64,
}

fn stage_matrix(tableau: &ButcherTableau, f: &Matrix, h: f64) -> Result<Matrix> {
    if !f.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "system matrix must be square, got {}x{}",
            f.nrows(),
            f.ncols()
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step size must be positive, got {h}"
        )));
    }
    let sn = tableau.stages() * f.nrows();
    Ok(Matrix::identity(sn, sn) - kronecker_product(&tableau.coefficients, f) * h)
}

pub fn check_step_admissible(
    tableau: &ButcherTableau,
    f: &Matrix,
    h: f64,
) -> Result<Admissibility> {
    let report = pivot_report(&stage_matrix(tableau, f, h)?)?;
    Ok(Admissibility {
        admissible: report.is_nonsingular(),
        smallest_pivot: report.smallest_pivot,
        threshold: report.threshold,
    })
}

/// One-step propagation matrix of a Runge-Kutta method on `x' = F x`.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub a_h: Matrix,
    pub h: f64,
    pub tableau: String,
}

impl DiscreteSystem {
    pub fn dim(&self) -> usize {
        self.a_h.nrows()
    }
}

pub fn discretization_matrix(
    tableau: &ButcherTableau,
    f: &Matrix,
    h: f64,
) -> Result<DiscreteSystem> {
    let n = f.nrows();
    let s = tableau.stages();
    let lu = PivotedLu::new(&stage_matrix(tableau, f, h)?)?;
    let ones = Matrix::from_element(s, 1, 1.0);
    let stages = lu.solve(&kronecker_product(&ones, f))?;

    let mut a_h = Matrix::identity(n, n);
    for (j, beta) in tableau.weights.iter().enumerate() {
        if *beta != 0.0 {
            a_h += stages.rows(j * n, n) * (h * beta);
        }
    }
    Ok(DiscreteSystem {
        a_h,
        h,
        tableau: tableau.name.clone(),
    })
}

/// Integrates `m` steps from `x0` with the method's propagation matrix.
pub fn integrate(
    tableau: &ButcherTableau,
    f: &Matrix,
    h: f64,
    x0: &Vector,
    m: usize,
) -> Result<TrajectoryData> {
    if x0.len() != f.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "initial value has length {}, system has dimension {}",
            x0.len(),
            f.nrows()
        )));
    }
    let system = discretization_matrix(tableau, f, h)?;
    Ok(propagate(&system, x0, m, &tableau.name))
}

/// `x_0, A_h x_0, ..., A_h^m x_0`.
pub fn propagate(system: &DiscreteSystem, x0: &Vector, m: usize, origin: &str) -> TrajectoryData {
    let mut snapshots = Vec::with_capacity(m + 1);
    snapshots.push(x0.clone());
    for i in 0..m {
        let next = &system.a_h * &snapshots[i];
        snapshots.push(next);
    }
    TrajectoryData::from_parts(snapshots, system.h, origin)
}

/// Default step ladder for order studies.
pub const DEFAULT_LADDER: [f64; 5] = [0.2, 0.1, 0.05, 0.025, 0.0125];

/// Result of a log-log regression of error against step size.
#[derive(Debug, Clone, Serialize)]
pub struct OrderEstimate {
    pub slope: f64,
    /// `(h, error)` for every ladder point.
    pub points: Vec<(f64, f64)>,
    /// Whether each point entered the fit (false below the round-off floor).
    pub used: Vec<bool>,
}

/// Least-squares slope of `log(error)` against `log(h)` over the points
/// above the round-off floor `floor`.
pub fn fit_order(points: &[(f64, f64)], floor: f64) -> Result<OrderEstimate> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "order estimation needs at least 3 ladder points, got {}",
            points.len()
        )));
    }
    let used: Vec<bool> = points.iter().map(|&(_, e)| e >= floor && e > 0.0).collect();
    let fit: Vec<(f64, f64)> = points
        .iter()
        .zip(&used)
        .filter(|(_, &u)| u)
        .map(|(&(h, e), _)| (h.ln(), e.ln()))
        .collect();
    if fit.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} ladder points lie above the round-off floor {floor:e}",
            fit.len()
        )));
    }
    let k = fit.len() as f64;
    let mx = fit.iter().map(|p| p.0).sum::<f64>() / k;
    let my = fit.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = fit.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(OrderEstimate {
        slope: sxy / sxx,
        points: points.to_vec(),
        used,
    })
}

/// Number of whole steps of size `h` in `[0, t_end]`.
pub fn steps_to(t_end: f64, h: f64) -> Result<usize> {
    let steps = (t_end / h).round();
    if steps < 1.0 || ((steps * h) - t_end).abs() > 1e-9 * t_end.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "step size {h} does not divide the horizon {t_end}"
        )));
    }
    Ok(steps as usize)
}

/// Estimates the global order of a method from the error at `t_end`
/// against the exact flow `exp(t_end F) x0`.
pub fn empirical_order(
    tableau: &ButcherTableau,
    f: &Matrix,
    x0: &Vector,
    t_end: f64,
    ladder: &[f64],
) -> Result<OrderEstimate> {
    if ladder.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "order estimation needs at least 3 ladder points, got {}",
            ladder.len()
        )));
    }
    let exact = matrix_exponential(&(f * t_end))? * x0;
    let points = ladder
        .iter()
        .map(|&h| {
            let steps = steps_to(t_end, h)?;
            let traj = integrate(tableau, f, h, x0, steps)?;
            Ok((h, (traj.last() - &exact).norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_order(&points, roundoff_floor(exact.norm()))
}

/// Errors below `1e3 * eps * scale` are treated as round-off.
pub fn roundoff_floor(scale: f64) -> f64 {
    1e3 * f64::EPSILON * scale
}
