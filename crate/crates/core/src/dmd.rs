//! Dynamic mode decomposition of snapshot sequences.
//!
//! The DMD matrix is the minimum-Frobenius-norm solution of
//! `min_M ||Z - M X||_F`, i.e. `A_dmd = Z X^+`, assembled from the trimmed
//! SVD `X = U Σ V^T` as `Z V Σ^{-1} U^T`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{to_faer, trimmed_svd, Matrix, TrimmedSvd, Vector};

/// Snapshots `x_0, ..., x_m` sampled with a uniform step.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryData {
    snapshots: Vec<Vector>,
    step: f64,
    origin: String,
}

impl TrajectoryData {
    /// Validated constructor: equal lengths, finite entries, positive step.
    pub fn new(snapshots: Vec<Vector>, step: f64, origin: impl Into<String>) -> Result<Self> {
        let first = snapshots
            .first()
            .ok_or_else(|| Error::Empty("trajectory has no snapshots".into()))?;
        let n = first.len();
        if n == 0 {
            return Err(Error::Empty("snapshots have zero length".into()));
        }
        for (i, x) in snapshots.iter().enumerate() {
            if x.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "snapshot {i} has length {}, expected {n}",
                    x.len()
                )));
            }
            if let Some(j) = x.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: j, col: i });
            }
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step must be positive, got {step}"
            )));
        }
        Ok(Self::from_parts(snapshots, step, origin))
    }

    pub(crate) fn from_parts(snapshots: Vec<Vector>, step: f64, origin: impl Into<String>) -> Self {
        TrajectoryData {
            snapshots,
            step,
            origin: origin.into(),
        }
    }

    /// Columns of `m` as snapshots.
    pub fn from_matrix(m: &Matrix, step: f64, origin: impl Into<String>) -> Result<Self> {
        Self::new(
            m.column_iter().map(|c| c.into_owned()).collect(),
            step,
            origin,
        )
    }

    pub fn snapshots(&self) -> &[Vector] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// State dimension `n`.
    pub fn dim(&self) -> usize {
        self.snapshots[0].len()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn last(&self) -> &Vector {
        self.snapshots.last().expect("trajectory is never empty")
    }

    /// `[x_0 ... x_m]`, one column per snapshot.
    pub fn snapshot_matrix(&self) -> Matrix {
        Matrix::from_columns(&self.snapshots)
    }

    /// Applies `map` to every snapshot.
    pub fn map_snapshots(
        &self,
        map: impl Fn(&Vector) -> Vector,
        origin: impl Into<String>,
    ) -> Self {
        Self::from_parts(self.snapshots.iter().map(map).collect(), self.step, origin)
    }
}

/// `X = [x_0 ... x_{m-1}]` and `Z = [x_1 ... x_m]`.
pub fn build_data_matrices(data: &TrajectoryData) -> Result<(Matrix, Matrix)> {
    let k = data.len();
    if k < 2 {
        return Err(Error::InsufficientData(format!(
            "DMD needs at least 2 snapshots, got {k}"
        )));
    }
    let s = data.snapshots();
    Ok((
        Matrix::from_columns(&s[..k - 1]),
        Matrix::from_columns(&s[1..]),
    ))
}

/// Fitted DMD model.
#[derive(Debug, Clone)]
pub struct DmdModel {
    pub a_dmd: Matrix,
    /// Trimmed SVD of `X`.
    pub svd: TrimmedSvd,
    pub rank: usize,
    /// `(n, m)`: state dimension and number of snapshot pairs.
    pub data_dims: (usize, usize),
    pub step: f64,
    /// `rank [x_0 ... x_{m-1}] == rank [x_0 ... x_m]`: the data span is
    /// invariant under the generating dynamics.
    pub span_invariant: bool,
    pub rank_tol: Option<f64>,
}

impl DmdModel {
    pub fn dim(&self) -> usize {
        self.data_dims.0
    }

    /// `U`, the orthonormal basis of the column space of `X`.
    pub fn reachable_basis(&self) -> &Matrix {
        &self.svd.u
    }

    /// Whether the numerical rank of `X` equals the state dimension.
    pub fn full_rank(&self) -> bool {
        self.rank == self.dim()
    }

    /// `(U U^T x, x - U U^T x)`.
    pub fn project_onto_data_span(&self, x: &Vector) -> Result<(Vector, Vector)> {
        self.check_dim(x)?;
        let u = &self.svd.u;
        let x_u = u * (u.transpose() * x);
        let x_perp = x - &x_u;
        Ok((x_u, x_perp))
    }

    /// `x0, A x0, ..., A^steps x0` by repeated matrix-vector products.
    pub fn predict(&self, x0: &Vector, steps: usize) -> Result<TrajectoryData> {
        self.check_dim(x0)?;
        let mut snapshots = Vec::with_capacity(steps + 1);
        snapshots.push(x0.clone());
        for i in 0..steps {
            let next = &self.a_dmd * &snapshots[i];
            snapshots.push(next);
        }
        Ok(TrajectoryData::from_parts(
            snapshots,
            self.step,
            "dmd-prediction",
        ))
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector has length {}, model dimension is {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Fits the DMD matrix `Z X^+` to a trajectory.
pub fn dmd_matrix(data: &TrajectoryData, rank_tol: Option<f64>) -> Result<DmdModel> {
    let (x, z) = build_data_matrices(data)?;
    let full_rank = trimmed_svd(&data.snapshot_matrix(), rank_tol)?.rank;
    let mut model = dmd_from_matrices(&x, &z, rank_tol)?;
    model.step = data.step();
    model.span_invariant = model.rank == full_rank;
    Ok(model)
}

/// DMD of explicit data matrices. The step is set to 1 and the span
/// invariance flag is computed from `[X z_last]`.
pub fn dmd_from_matrices(x: &Matrix, z: &Matrix, rank_tol: Option<f64>) -> Result<DmdModel> {
    if x.shape() != z.shape() {
        return Err(Error::DimensionMismatch(format!(
            "X is {}x{} but Z is {}x{}",
            x.nrows(),
            x.ncols(),
            z.nrows(),
            z.ncols()
        )));
    }
    let (n, m) = x.shape();
    let svd = trimmed_svd(x, rank_tol)?;
    let a_dmd = if svd.rank == 0 {
        Matrix::zeros(n, n)
    } else {
        let mut zv = z * &svd.v;
        for (j, s) in svd.singular_values.iter().enumerate() {
            zv.column_mut(j).scale_mut(1.0 / *s);
        }
        zv * svd.u.transpose()
    };
    let mut extended = x.clone().insert_column(m, 0.0);
    extended.set_column(m, &z.column(m - 1));
    let span_invariant = trimmed_svd(&extended, rank_tol)?.rank == svd.rank;
    Ok(DmdModel {
        rank: svd.rank,
        a_dmd,
        svd,
        data_dims: (n, m),
        step: 1.0,
        span_invariant,
        rank_tol,
    })
}

/// Complex eigendecomposition of a DMD matrix.
#[derive(Debug, Clone)]
pub struct DmdModes {
    pub eigenvalues: Vec<Complex<f64>>,
    /// Unit-norm columns, one per eigenvalue.
    pub modes: DMatrix<Complex<f64>>,
    pub diagonalizable: bool,
}

/// Condition number of the eigenvector matrix above which the matrix is
/// reported as not diagonalizable.
pub const MODE_CONDITION_LIMIT: f64 = 1e12;

/// Eigenvalues and eigenvectors (DMD modes) of `A_dmd`.
///
/// Eigenvalues that agree to
/// `1e-6 * ||A||` are grouped and their modes are taken from the right
/// singular vectors of `A - λI` belonging to the smallest singular values,
/// so semisimple repeated eigenvalues get independent modes while defective
/// ones show up as an ill-conditioned mode matrix.
pub fn dmd_modes(model: &DmdModel) -> Result<DmdModes> {
    eigendecomposition(&model.a_dmd)
}

pub fn eigendecomposition(a: &Matrix) -> Result<DmdModes> {
    let n = a.nrows();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let mut eigenvalues = to_faer(a)
        .eigenvalues()
        .map_err(|_| Error::EigenNonConvergence)?;
    eigenvalues.sort_by(|x, y| y.norm().total_cmp(&x.norm()).then(y.im.total_cmp(&x.im)));

    let mut modes = DMatrix::<Complex<f64>>::zeros(n, n);
    let mut defective = false;
    let mut assigned = vec![false; n];
    let cluster_tol = 1e-6 * scale;
    let null_tol = 1e-10 * scale;

    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let members: Vec<usize> = (i..n)
            .filter(|&j| !assigned[j] && (eigenvalues[j] - eigenvalues[i]).norm() <= cluster_tol)
            .collect();
        let center = members
            .iter()
            .map(|&j| eigenvalues[j])
            .sum::<Complex<f64>>()
            / members.len() as f64;
        let shifted = faer::Mat::from_fn(n, n, |p, q| {
            let diag = if p == q {
                center
            } else {
                Complex::new(0.0, 0.0)
            };
            Complex::new(a[(p, q)], 0.0) - diag
        });
        let svd = shifted.svd().map_err(|_| Error::SvdNonConvergence)?;
        let sv = svd.S().column_vector();
        let v_full = svd.V();
        // Singular values are non-increasing, so the null space sits at the end.
        let nullity = (0..n).filter(|&k| sv[k].re <= null_tol).count();
        if nullity < members.len() {
            defective = true;
        }
        for (slot, &j) in members.iter().enumerate() {
            let col = n - 1 - slot;
            let v = DVector::from_fn(n, |p, _| v_full[(p, col)]);
            modes.set_column(j, &normalize_phase(v));
            eigenvalues[j] = center;
            assigned[j] = true;
        }
    }

    let diagonalizable = !defective && mode_condition(&modes)? <= MODE_CONDITION_LIMIT;
    Ok(DmdModes {
        eigenvalues,
        modes,
        diagonalizable,
    })
}

// Unit norm with the largest-magnitude entry real and positive.
fn normalize_phase(v: DVector<Complex<f64>>) -> DVector<Complex<f64>> {
    let pivot = v.iter().copied().fold(Complex::new(0.0, 0.0), |b, x| {
        if x.norm() > b.norm() {
            x
        } else {
            b
        }
    });
    let phase = if pivot.norm() > 0.0 {
        pivot.conj() / pivot.norm()
    } else {
        Complex::new(1.0, 0.0)
    };
    let v = v * phase;
    let norm = v.norm();
    if norm > 0.0 {
        v / Complex::new(norm, 0.0)
    } else {
        v
    }
}

fn mode_condition(modes: &DMatrix<Complex<f64>>) -> Result<f64> {
    if modes.is_empty() {
        return Ok(1.0);
    }
    let sv = faer::Mat::from_fn(modes.nrows(), modes.ncols(), |i, j| modes[(i, j)])
        .singular_values()
        .map_err(|_| Error::SvdNonConvergence)?;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if min > 0.0 { max / min } else { f64::INFINITY })
}
