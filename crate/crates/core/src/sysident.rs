//! Recovery of discrete and continuous system matrices from DMD models.

use serde::Serialize;

use crate::dmd::{dmd_matrix, DmdModel, TrajectoryData};
use crate::error::{Error, Result};
use crate::linalg::{
    matrix_exponential, pivot_report, principal_matrix_logarithm, solve_right, Matrix, Vector,
};
use crate::rk::{builtin_tableau, discretization_matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryMethod {
    /// `A_dmd` itself as the discrete system matrix.
    Discrete,
    /// `(1/h) log(A_dmd)` under exact sampling of the flow.
    LogExact,
    /// Inversion of a one-stage Runge-Kutta map.
    ReverseRk1,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentificationReport {
    #[serde(skip)]
    pub recovered: Matrix,
    pub method: RecoveryMethod,
    /// `||truth - recovered||_F` when a ground truth was supplied and the
    /// rank condition holds.
    pub residual: Option<f64>,
    /// `||A_dmd - A U U^T||_F` for discrete identification with a known `A`.
    pub projected_residual: Option<f64>,
    pub rank: usize,
    pub rank_condition_met: bool,
    pub inverse_existed: bool,
    /// Smallest pivot of the matrix that had to be inverted, if any.
    pub pivot: Option<f64>,
    pub h: f64,
}

/// Discrete identification: `A_dmd = A U U^T`, equal to `A` under full rank.
pub fn identify_discrete(
    data: &TrajectoryData,
    truth: Option<&Matrix>,
    rank_tol: Option<f64>,
) -> Result<IdentificationReport> {
    let model = dmd_matrix(data, rank_tol)?;
    let rank_condition_met = model.full_rank();
    let (residual, projected_residual) = match truth {
        Some(a) => {
            if a.shape() != model.a_dmd.shape() {
                return Err(Error::DimensionMismatch(format!(
                    "truth is {}x{}, model dimension is {}",
                    a.nrows(),
                    a.ncols(),
                    model.dim()
                )));
            }
            let u = model.reachable_basis();
            let projected = (&model.a_dmd - a * u * u.transpose()).norm();
            let full = rank_condition_met.then(|| (&model.a_dmd - a).norm());
            (full, Some(projected))
        }
        None => (None, None),
    };
    Ok(IdentificationReport {
        recovered: model.a_dmd.clone(),
        method: RecoveryMethod::Discrete,
        residual,
        projected_residual,
        rank: model.rank,
        rank_condition_met,
        inverse_existed: true,
        pivot: None,
        h: model.step,
    })
}

fn require_full_rank(model: &DmdModel) -> Result<()> {
    if !model.full_rank() {
        return Err(Error::RankDeficient {
            rank: model.rank,
            n: model.dim(),
        });
    }
    Ok(())
}

/// `F = (1/h) log(A_dmd)` for data sampled exactly from the flow.
pub fn recover_continuous_exact_sampling(model: &DmdModel, h: f64) -> Result<IdentificationReport> {
    require_full_rank(model)?;
    check_step(h)?;
    let recovered = principal_matrix_logarithm(&model.a_dmd)? / h;
    Ok(IdentificationReport {
        recovered,
        method: RecoveryMethod::LogExact,
        residual: None,
        projected_residual: None,
        rank: model.rank,
        rank_condition_met: true,
        inverse_existed: true,
        pivot: None,
        h,
    })
}

/// `||exp(h F_rec) - A_dmd||_F / ||A_dmd||_F`.
pub fn exact_sampling_round_trip(report: &IdentificationReport, model: &DmdModel) -> Result<f64> {
    let back = matrix_exponential(&(&report.recovered * report.h))?;
    Ok((back - &model.a_dmd).norm() / model.a_dmd.norm().max(f64::MIN_POSITIVE))
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step size must be positive, got {h}"
        )));
    }
    Ok(())
}

/// Inverts the one-stage map `A_h = I + h β (I - h α F)^{-1} F`:
///
/// ```text
/// F = -(1/h) (I - A_dmd) (α A_dmd + (β - α) I)^{-1}
/// ```
///
/// The inverse is applied as a right division. When the bracket is
/// numerically singular the report carries `inverse_existed = false`, the
/// offending pivot and a NaN-filled `recovered`.
pub fn recover_continuous_onestage(
    model: &DmdModel,
    alpha: f64,
    beta: f64,
    h: f64,
) -> Result<IdentificationReport> {
    require_full_rank(model)?;
    check_step(h)?;
    let n = model.dim();
    let id = Matrix::identity(n, n);
    let bracket = &model.a_dmd * alpha + &id * (beta - alpha);
    let pivots = pivot_report(&bracket)?;
    let mut report = IdentificationReport {
        recovered: Matrix::from_element(n, n, f64::NAN),
        method: RecoveryMethod::ReverseRk1,
        residual: None,
        projected_residual: None,
        rank: model.rank,
        rank_condition_met: true,
        inverse_existed: pivots.is_nonsingular(),
        pivot: Some(pivots.smallest_pivot),
        h,
    };
    if report.inverse_existed {
        report.recovered = solve_right(&(&model.a_dmd - &id), &bracket)? / h;
    }
    Ok(report)
}

/// The one-stage methods with a closed-form inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OneStageMethod {
    ExplicitEuler,
    ImplicitEuler,
    ImplicitMidpoint,
}

impl OneStageMethod {
    pub const ALL: [OneStageMethod; 3] = [
        OneStageMethod::ExplicitEuler,
        OneStageMethod::ImplicitEuler,
        OneStageMethod::ImplicitMidpoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OneStageMethod::ExplicitEuler => "explicit-euler",
            OneStageMethod::ImplicitEuler => "implicit-euler",
            OneStageMethod::ImplicitMidpoint => "implicit-midpoint",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::UnknownTableau {
                name: name.to_string(),
                options: Self::ALL.map(|m| m.name()).join(", "),
            })
    }

    /// `(α, β)`.
    pub fn coefficients(self) -> (f64, f64) {
        match self {
            OneStageMethod::ExplicitEuler => (0.0, 1.0),
            OneStageMethod::ImplicitEuler => (1.0, 1.0),
            OneStageMethod::ImplicitMidpoint => (0.5, 1.0),
        }
    }
}

/// Named one-stage recovery. Explicit Euler gives `F = (A - I)/h`, implicit
/// Euler `F = (I - A^{-1})/h` and the implicit midpoint rule
/// `F = (2/h)(A - I)(A + I)^{-1}`.
pub fn recover_one_stage(
    method: OneStageMethod,
    model: &DmdModel,
    h: f64,
) -> Result<IdentificationReport> {
    let (alpha, beta) = method.coefficients();
    recover_continuous_onestage(model, alpha, beta, h)
}

/// Two scalar systems that Heun's method maps to the same discrete system.
#[derive(Debug, Clone, Serialize)]
pub struct HeunAmbiguity {
    pub h: f64,
    pub f1: f64,
    pub f2: f64,
    pub a_h1: f64,
    pub a_h2: f64,
    pub discrepancy: f64,
}

/// `F1 = 0` and `F2 = -2/h` both give `A_h = 1` under Heun's method.
pub fn demonstrate_heun_ambiguity(h: f64) -> Result<HeunAmbiguity> {
    check_step(h)?;
    let heun = builtin_tableau("heun")?;
    let (f1, f2) = (0.0, -2.0 / h);
    let a_h1 = discretization_matrix(&heun, &Matrix::from_element(1, 1, f1), h)?.a_h[(0, 0)];
    let a_h2 = discretization_matrix(&heun, &Matrix::from_element(1, 1, f2), h)?.a_h[(0, 0)];
    Ok(HeunAmbiguity {
        h,
        f1,
        f2,
        a_h1,
        a_h2,
        discrepancy: (a_h1 - a_h2).abs(),
    })
}

/// Relative tolerance on the perpendicular component of an initial value
/// that is required to lie in the data span.
pub const SPAN_TOL: f64 = 1e-10;

/// `max_{i <= steps} ||exp(ih F) x0 - A_dmd^i x0||` for `x0` in the data span.
pub fn dmd_error_vs_flow(
    model: &DmdModel,
    f_true: &Matrix,
    x0: &Vector,
    steps: usize,
    h: f64,
) -> Result<f64> {
    check_step(h)?;
    let (_, perp) = model.project_onto_data_span(x0)?;
    let perp_norm = perp.norm();
    if perp_norm > SPAN_TOL * x0.norm() {
        return Err(Error::OutsideDataSpan { perp_norm });
    }
    if f_true.shape() != model.a_dmd.shape() {
        return Err(Error::DimensionMismatch(
            "system matrix does not match model".into(),
        ));
    }
    let flow = matrix_exponential(&(f_true * h))?;
    let prediction = model.predict(x0, steps)?;
    let mut exact = x0.clone();
    let mut worst: f64 = 0.0;
    for p in prediction.snapshots() {
        worst = worst.max((p - &exact).norm());
        exact = &flow * exact;
    }
    Ok(worst)
}
