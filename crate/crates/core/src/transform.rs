//! Invertible state-space transformations of snapshot data and the
//! invariance checks for DMD under them.
//!
//! For `T` invertible, `(TX)^+ (TX) = X^+ X`, hence the DMD matrix of the
//! transformed data satisfies `A_dmd X = T^{-1} Ã_dmd T X`. Equality of the
//! full matrices is only guaranteed when `T` is orthogonal or `X` has full
//! row rank.

use serde::Serialize;

use crate::dmd::{dmd_matrix, TrajectoryData};
use crate::error::{Error, Result};
use crate::linalg::{pseudoinverse, solve_linear, Matrix};

/// An invertible `n x n` matrix stored together with its inverse.
#[derive(Debug, Clone)]
pub struct Transformation {
    pub t: Matrix,
    pub t_inv: Matrix,
    pub unitary: bool,
}

impl Transformation {
    pub fn new(t: Matrix) -> Result<Self> {
        if !t.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "transformation must be square, got {}x{}",
                t.nrows(),
                t.ncols()
            )));
        }
        let n = t.nrows();
        let id = Matrix::identity(n, n);
        let t_inv = solve_linear(&t, &id)?;
        let scale = t.norm() * t_inv.norm();
        if (&t * &t_inv - &id).norm() > 1e-10 * scale.max(1.0) {
            return Err(Error::Singular {
                pivot: 0.0,
                threshold: 0.0,
            });
        }
        let unitary = (t.transpose() * &t - &id).norm() <= 1e-10;
        Ok(Transformation { t, t_inv, unitary })
    }

    pub fn identity(n: usize) -> Self {
        Transformation {
            t: Matrix::identity(n, n),
            t_inv: Matrix::identity(n, n),
            unitary: true,
        }
    }

    /// Upper bidiagonal matrix with ones on the diagonal and superdiagonal.
    pub fn upper_bidiagonal_ones(n: usize) -> Self {
        let t = Matrix::from_fn(n, n, |i, j| if j == i || j == i + 1 { 1.0 } else { 0.0 });
        // The inverse is upper triangular with entries (-1)^(j-i).
        let t_inv = Matrix::from_fn(n, n, |i, j| {
            if j >= i {
                if (j - i) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        });
        Transformation {
            t,
            t_inv,
            unitary: n <= 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "transformation is {}x{}, data dimension is {n}",
                self.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// `T^{-1} M T`.
    pub fn conjugate_back(&self, m: &Matrix) -> Matrix {
        &self.t_inv * m * &self.t
    }
}

/// Maps every snapshot `x -> T x`.
pub fn transform_trajectory(t: &Transformation, data: &TrajectoryData) -> Result<TrajectoryData> {
    t.check(data.dim())?;
    Ok(data.map_snapshots(|x| &t.t * x, format!("{}-transformed", data.origin())))
}

/// `||(TX)^+ (TX) - X^+ X||_F`.
pub fn verify_pseudoinverse_identity(
    x: &Matrix,
    t: &Transformation,
    rank_tol: Option<f64>,
) -> Result<f64> {
    t.check(x.nrows())?;
    let tx = &t.t * x;
    let lhs = pseudoinverse(&tx, rank_tol)? * &tx;
    let rhs = pseudoinverse(x, rank_tol)? * x;
    Ok((lhs - rhs).norm())
}

/// `T^{-1} Ã_dmd T`, where `Ã_dmd` is fitted to the transformed data.
pub fn conjugated_dmd(
    t: &Transformation,
    data: &TrajectoryData,
    rank_tol: Option<f64>,
) -> Result<Matrix> {
    let transformed = transform_trajectory(t, data)?;
    let model = dmd_matrix(&transformed, rank_tol)?;
    Ok(t.conjugate_back(&model.a_dmd))
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    /// `||A_dmd X - T^{-1} Ã_dmd T X||_F`.
    pub residual_on_image: f64,
    /// `||A_dmd - T^{-1} Ã_dmd T||_F`.
    pub full_equality_residual: f64,
    /// True when `T` is orthogonal or `rank(X) = n`.
    pub full_equality_expected: bool,
}

pub fn verify_image_invariance(
    data: &TrajectoryData,
    t: &Transformation,
    rank_tol: Option<f64>,
) -> Result<InvarianceReport> {
    let model = dmd_matrix(data, rank_tol)?;
    let conjugated = conjugated_dmd(t, data, rank_tol)?;
    let (x, _) = crate::dmd::build_data_matrices(data)?;
    Ok(InvarianceReport {
        residual_on_image: (&model.a_dmd * &x - &conjugated * &x).norm(),
        full_equality_residual: (&model.a_dmd - &conjugated).norm(),
        full_equality_expected: t.unitary || model.full_rank(),
    })
}
