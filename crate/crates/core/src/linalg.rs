//! Dense real linear-algebra kernels.
//!
//! Everything is expressed on [`Matrix`], a plain `nalgebra::DMatrix<f64>`.
//! The only convention specific to this crate is the *trimmed* SVD, which
//! keeps the singular triplets above a relative rank threshold and fixes the
//! sign of each singular vector pair so factor comparisons are deterministic.

use nalgebra::{DMatrix, DVector, LU};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Builds a matrix from row vectors, rejecting ragged rows and non-finite
/// entries.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::Empty("matrix has no rows".into()));
    }
    let ncols = rows[0].len();
    if ncols == 0 {
        return Err(Error::Empty("matrix has no columns".into()));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {ncols}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: j });
        }
    }
    Ok(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

/// Default relative rank threshold: `max(rows, cols) * eps`.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

/// Rank-`r` factorization `M = U * diag(sigma) * V^T` keeping only the
/// singular values above the rank threshold.
#[derive(Debug, Clone)]
pub struct TrimmedSvd {
    /// `n x r`, orthonormal columns.
    pub u: Matrix,
    /// Strictly positive, non-increasing.
    pub singular_values: Vector,
    /// `m x r`, orthonormal columns.
    pub v: Matrix,
    pub rank: usize,
}

impl TrimmedSvd {
    pub fn sigma(&self) -> Matrix {
        Matrix::from_diagonal(&self.singular_values)
    }

    /// `U * Sigma * V^T`.
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v.transpose()
    }

    /// `V * Sigma^{-1} * U^T`.
    pub fn pseudoinverse(&self) -> Matrix {
        let mut vs = self.v.clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            vs.column_mut(j).scale_mut(1.0 / *s);
        }
        vs * self.u.transpose()
    }
}

pub(crate) fn to_faer(m: &Matrix) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Trimmed SVD of `m`. The numerical rank counts singular values strictly
/// greater than `rank_tol * sigma_max`; `None` selects
/// [`default_rank_tol`].
pub fn trimmed_svd(m: &Matrix, rank_tol: Option<f64>) -> Result<TrimmedSvd> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::Empty(
            "cannot take the SVD of an empty matrix".into(),
        ));
    }
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(rows, cols));
    let svd = to_faer(m)
        .thin_svd()
        .map_err(|_| Error::SvdNonConvergence)?;
    let (u_full, v_full) = (svd.U(), svd.V());
    let sv = svd.S().column_vector();
    let sigma_max = if sv.nrows() > 0 { sv[0] } else { 0.0 };
    if !sigma_max.is_finite() {
        return Err(Error::SvdNonConvergence);
    }
    let rank = (0..sv.nrows())
        .take_while(|&i| sigma_max > 0.0 && sv[i] > tol * sigma_max)
        .count();

    let mut u = Matrix::zeros(rows, rank);
    let mut v = Matrix::zeros(cols, rank);
    let mut singular_values = Vector::zeros(rank);
    for k in 0..rank {
        let mut uc = Vector::from_fn(rows, |i, _| u_full[(i, k)]);
        let mut vc = Vector::from_fn(cols, |i, _| v_full[(i, k)]);
        // Sign convention: largest-magnitude entry of each U column positive.
        let pivot = uc.iter().copied().fold(
            0.0_f64,
            |best, x| {
                if x.abs() > best.abs() {
                    x
                } else {
                    best
                }
            },
        );
        if pivot < 0.0 {
            uc.neg_mut();
            vc.neg_mut();
        }
        u.set_column(k, &uc);
        v.set_column(k, &vc);
        singular_values[k] = sv[k];
    }
    Ok(TrimmedSvd {
        u,
        singular_values,
        v,
        rank,
    })
}

/// Moore-Penrose pseudoinverse through the trimmed SVD.
pub fn pseudoinverse(m: &Matrix, rank_tol: Option<f64>) -> Result<Matrix> {
    let svd = trimmed_svd(m, rank_tol)?;
    if svd.rank == 0 {
        return Ok(Matrix::zeros(m.ncols(), m.nrows()));
    }
    Ok(svd.pseudoinverse())
}

/// Numerical rank with the given (or default) relative threshold.
pub fn numerical_rank(m: &Matrix, rank_tol: Option<f64>) -> Result<usize> {
    Ok(trimmed_svd(m, rank_tol)?.rank)
}

/// Block matrix `[a_ij * B]`.
pub fn kronecker_product(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

fn inf_norm(a: &Matrix) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn one_norm(a: &Matrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU factorization with partial pivoting that refuses to hand out a
/// factorization of a numerically singular matrix.
#[derive(Debug, Clone)]
pub struct PivotedLu {
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    smallest_pivot: f64,
    threshold: f64,
}

/// Outcome of the pivot inspection of a square matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotReport {
    pub smallest_pivot: f64,
    /// `dim * eps * ||A||_inf`.
    pub threshold: f64,
}

impl PivotReport {
    pub fn is_nonsingular(&self) -> bool {
        self.smallest_pivot > self.threshold
    }
}

impl PivotedLu {
    /// Factorizes without judging singularity.
    fn factor_unchecked(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        let threshold = n as f64 * f64::EPSILON * inf_norm(a);
        let lu = LU::new(a.clone());
        let smallest_pivot = if n == 0 {
            f64::INFINITY
        } else {
            lu.u()
                .diagonal()
                .iter()
                .map(|p| p.abs())
                .fold(f64::INFINITY, f64::min)
        };
        Ok(PivotedLu {
            lu,
            smallest_pivot,
            threshold,
        })
    }

    pub fn new(a: &Matrix) -> Result<Self> {
        let f = Self::factor_unchecked(a)?;
        if !f.report().is_nonsingular() {
            return Err(Error::Singular {
                pivot: f.smallest_pivot,
                threshold: f.threshold,
            });
        }
        Ok(f)
    }

    pub fn report(&self) -> PivotReport {
        PivotReport {
            smallest_pivot: self.smallest_pivot,
            threshold: self.threshold,
        }
    }

    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        if b.nrows() != self.lu.l().nrows() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} rows, system has {}",
                b.nrows(),
                self.lu.l().nrows()
            )));
        }
        self.lu.solve(b).ok_or(Error::Singular {
            pivot: self.smallest_pivot,
            threshold: self.threshold,
        })
    }
}

/// Smallest LU pivot of `a` and the singularity threshold it is judged by.
pub fn pivot_report(a: &Matrix) -> Result<PivotReport> {
    Ok(PivotedLu::factor_unchecked(a)?.report())
}

/// Solves `A X = B` with a pivoted LU factorization.
pub fn solve_linear(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    PivotedLu::new(a)?.solve(b)
}

/// Right division `B A^{-1}`, computed as the solution of `A^T X^T = B^T`.
pub fn solve_right(b: &Matrix, a: &Matrix) -> Result<Matrix> {
    Ok(solve_linear(&a.transpose(), &b.transpose())?.transpose())
}

// Padé coefficients for the [m/m] approximants of exp, m = 3, 5, 7, 9, 13,
// and the 1-norm bounds below which each one is accurate to unit roundoff.
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [f64; 5] = [
    1.495585217958292e-2,
    2.539_398_330_063_23e-1,
    9.504178996162932e-1,
    2.097847961257068e0,
    5.371920351148152e0,
];

fn pade_low(a: &Matrix, coeffs: &[f64]) -> (Matrix, Matrix) {
    let n = a.nrows();
    let id = Matrix::identity(n, n);
    let a2 = a * a;
    let mut even = id.clone() * coeffs[0];
    let mut odd = id * coeffs[1];
    let mut power = a2.clone();
    let mut k = 2;
    while k < coeffs.len() {
        even += &power * coeffs[k];
        odd += &power * coeffs[k + 1];
        power = &power * &a2;
        k += 2;
    }
    (even, a * odd)
}

fn pade13(a: &Matrix) -> (Matrix, Matrix) {
    let n = a.nrows();
    let b = &PADE13;
    let id = Matrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    (v, u)
}

/// Matrix exponential by scaling and squaring with a Padé approximant of
/// degree 3 to 13 selected from the 1-norm.
pub fn matrix_exponential(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let norm = one_norm(m);
    if !norm.is_finite() {
        return Err(Error::Overflow(norm));
    }
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }

    let low: [&[f64]; 4] = [&PADE3, &PADE5, &PADE7, &PADE9];
    for (theta, coeffs) in THETA.iter().zip(low) {
        if norm <= *theta {
            let (v, u) = pade_low(m, coeffs);
            return pade_ratio(&v, &u, norm);
        }
    }

    let squarings = if norm > THETA[4] {
        (norm / THETA[4]).log2().ceil() as i32
    } else {
        0
    };
    if squarings > 1000 {
        return Err(Error::Overflow(norm));
    }
    let scaled = m / 2f64.powi(squarings);
    let (v, u) = pade13(&scaled);
    let mut result = pade_ratio(&v, &u, norm)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    if result.iter().any(|x| !x.is_finite()) {
        return Err(Error::Overflow(norm));
    }
    Ok(result)
}

fn pade_ratio(v: &Matrix, u: &Matrix, norm: f64) -> Result<Matrix> {
    let q = v - u;
    let p = v + u;
    solve_linear(&q, &p).map_err(|_| Error::Overflow(norm))
}

// 8-point Gauss-Legendre rule on [-1, 1]: (node, weight) for the positive
// half; the rule is symmetric.
const GAUSS_LEGENDRE_8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// Principal matrix logarithm by inverse scaling and squaring.
///
/// Square roots are taken with the product-form Denman-Beavers iteration
/// until `||A^{1/2^k} - I||_1 <= 1/4`; the remaining `log(I + X)` is
/// evaluated with an 8-point Gauss-Legendre rule applied to
/// `int_0^1 X (I + tX)^{-1} dt`, which coincides with the [8/8] Padé
/// approximant.
pub fn principal_matrix_logarithm(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "matrix logarithm needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { row: 0, col: 0 });
    }
    reject_negative_real_spectrum(m)?;

    let id = Matrix::identity(n, n);
    let mut a = m.clone();
    let mut roots = 0;
    while one_norm(&(&a - &id)) > 0.25 {
        if roots >= 64 {
            return Err(Error::EigenNonConvergence);
        }
        a = sqrt_denman_beavers(&a)?;
        roots += 1;
    }

    let x = &a - &id;
    let mut log = Matrix::zeros(n, n);
    for (node, weight) in GAUSS_LEGENDRE_8 {
        for t in [0.5 * (1.0 - node), 0.5 * (1.0 + node)] {
            let shifted = &id + &x * t;
            log += solve_right(&x, &shifted)? * (0.5 * weight);
        }
    }
    Ok(log * 2f64.powi(roots))
}

fn reject_negative_real_spectrum(m: &Matrix) -> Result<()> {
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let eigenvalues = to_faer(m)
        .eigenvalues()
        .map_err(|_| Error::EigenNonConvergence)?;
    for lambda in eigenvalues {
        let on_axis = lambda.im.abs() <= 1e-12 * lambda.norm().max(scale * f64::EPSILON);
        if (on_axis && lambda.re <= 0.0) || lambda.norm() <= scale * f64::EPSILON {
            return Err(Error::NoPrincipalLog {
                re: lambda.re,
                im: lambda.im,
            });
        }
    }
    Ok(())
}

/// Principal square root via the product form of the Denman-Beavers
/// iteration.
fn sqrt_denman_beavers(a: &Matrix) -> Result<Matrix> {
    let n = a.nrows();
    let id = Matrix::identity(n, n);
    let mut x = a.clone();
    let mut prod = a.clone();
    for _ in 0..100 {
        let prod_inv = solve_linear(&prod, &id)?;
        x = &x * (&id + &prod_inv) * 0.5;
        prod = (&id + (&prod + &prod_inv) * 0.5) * 0.5;
        if one_norm(&(&prod - &id)) <= 10.0 * n as f64 * f64::EPSILON {
            return Ok(x);
        }
    }
    Err(Error::EigenNonConvergence)
}

/// Frobenius norm of `a - b` divided by `max(||b||_F, 1)`.
pub fn relative_difference(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use proptest::prelude::*;

    fn assert_close(a: &Matrix, b: &Matrix, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        let d = (a - b).abs().max();
        assert!(d <= tol, "max abs difference {d:e} > {tol:e}\n{a}\n{b}");
    }

    // Taylor series summed until terms vanish; only used for small norms.
    fn exp_taylor(m: &Matrix) -> Matrix {
        let n = m.nrows();
        let mut term = Matrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * m / k as f64;
            sum += &term;
        }
        sum
    }

    #[test]
    fn matrix_from_rows_rejects_bad_input() {
        assert!(matches!(
            matrix_from_rows(&[vec![1.0, f64::NAN]]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(matches!(
            matrix_from_rows(&[vec![1.0, 2.0], vec![1.0]]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matrix_from_rows(&[]).is_err());
    }

    #[test]
    fn svd_identity() {
        let svd = trimmed_svd(&Matrix::identity(3, 3), Some(1e-12)).unwrap();
        assert_eq!(svd.rank, 3);
        assert_close(&svd.u, &Matrix::identity(3, 3), 1e-15);
        assert_close(&svd.v, &Matrix::identity(3, 3), 1e-15);
        assert_close(&svd.sigma(), &Matrix::identity(3, 3), 1e-15);
    }

    #[test]
    fn svd_rank_one() {
        let m = dmatrix![1.0, 2.0; 0.0, 0.0];
        let svd = trimmed_svd(&m, None).unwrap();
        assert_eq!(svd.rank, 1);
        assert!((svd.singular_values[0] - 5f64.sqrt()).abs() < 1e-14);
        assert_close(&svd.u, &dmatrix![1.0; 0.0], 1e-15);
        let s5 = 5f64.sqrt();
        assert_close(&svd.v, &dmatrix![1.0 / s5; 2.0 / s5], 1e-15);
        assert_close(&svd.reconstruct(), &m, 1e-14);
    }

    #[test]
    fn svd_zero_matrix_has_rank_zero() {
        let svd = trimmed_svd(&Matrix::zeros(3, 4), None).unwrap();
        assert_eq!(svd.rank, 0);
        assert_eq!(svd.u.shape(), (3, 0));
        assert_eq!(svd.v.shape(), (4, 0));
        assert_eq!(
            pseudoinverse(&Matrix::zeros(3, 4), None).unwrap(),
            Matrix::zeros(4, 3)
        );
    }

    #[test]
    fn svd_factor_invariants_on_random_matrix() {
        let m = Matrix::from_fn(7, 5, |i, j| ((i * 5 + j) as f64 * 0.77).sin());
        let svd = trimmed_svd(&m, None).unwrap();
        let r = svd.rank;
        assert_close(
            &(svd.u.transpose() * &svd.u),
            &Matrix::identity(r, r),
            1e-12,
        );
        assert_close(
            &(svd.v.transpose() * &svd.v),
            &Matrix::identity(r, r),
            1e-12,
        );
        for w in svd.singular_values.as_slice().windows(2) {
            assert!(w[0] >= w[1] && w[1] > 0.0);
        }
        assert!((svd.reconstruct() - &m).norm() <= 1e-12 * m.norm());
        for j in 0..r {
            let col = svd.u.column(j);
            let big = col
                .iter()
                .copied()
                .fold(0.0_f64, |b, x| if x.abs() > b.abs() { x } else { b });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn pseudoinverse_worked_example() {
        let x = dmatrix![1.0, 2.0; 0.0, 0.0];
        assert_close(
            &pseudoinverse(&x, None).unwrap(),
            &(dmatrix![1.0, 0.0; 2.0, 0.0] / 5.0),
            1e-15,
        );
    }

    #[test]
    fn pseudoinverse_of_transformed_example_follows_penrose() {
        // The orientation forced by the Penrose identities is [[1,1],[2,2]]/10.
        let tx = dmatrix![1.0, 2.0; 1.0, 2.0];
        let p = pseudoinverse(&tx, None).unwrap();
        assert_close(&p, &(dmatrix![1.0, 1.0; 2.0, 2.0] / 10.0), 1e-15);
        let printed = dmatrix![1.0, 2.0; 1.0, 2.0] / 10.0;
        assert!((&tx * &printed * &tx - &tx).norm() > 0.1);
    }

    #[test]
    fn pseudoinverse_of_identity() {
        let id = Matrix::identity(4, 4);
        assert_close(&pseudoinverse(&id, None).unwrap(), &id, 1e-15);
    }

    #[test]
    fn exponential_trivial_cases() {
        assert_close(
            &matrix_exponential(&Matrix::zeros(3, 3)).unwrap(),
            &Matrix::identity(3, 3),
            0.0,
        );
        let d = Vector::from_vec(vec![-3.0, 0.5, 2.0, 7.0]);
        let e = matrix_exponential(&Matrix::from_diagonal(&d)).unwrap();
        for i in 0..4 {
            assert!((e[(i, i)] - d[i].exp()).abs() <= 1e-13 * d[i].exp());
        }
    }

    #[test]
    fn exponential_matches_taylor_across_pade_branches() {
        for scale in [1e-3, 0.1, 0.5, 1.5, 4.0] {
            let m = Matrix::from_fn(5, 5, |i, j| ((i * 3 + j * 7) as f64).cos()) * scale / 5.0;
            let e = matrix_exponential(&m).unwrap();
            let t = exp_taylor(&m);
            assert!((&e - &t).norm() <= 1e-13 * t.norm(), "scale {scale}");
        }
    }

    #[test]
    fn exponential_large_norm_uses_squaring() {
        // exp of a rotation generator: exact cos/sin.
        let theta: f64 = 40.0;
        let m = dmatrix![0.0, -theta; theta, 0.0];
        let e = matrix_exponential(&m).unwrap();
        let want = dmatrix![theta.cos(), -theta.sin(); theta.sin(), theta.cos()];
        assert_close(&e, &want, 1e-12);
    }

    #[test]
    fn exponential_overflow_is_reported() {
        let m = Matrix::from_element(2, 2, 1e300);
        assert!(matches!(matrix_exponential(&m), Err(Error::Overflow(_))));
        assert!(matrix_exponential(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn logarithm_trivial_cases() {
        assert_close(
            &principal_matrix_logarithm(&Matrix::identity(3, 3)).unwrap(),
            &Matrix::zeros(3, 3),
            1e-15,
        );
        let e = std::f64::consts::E;
        let l = principal_matrix_logarithm(&dmatrix![e, 0.0; 0.0, e * e]).unwrap();
        assert_close(&l, &dmatrix![1.0, 0.0; 0.0, 2.0], 1e-13);
    }

    #[test]
    fn logarithm_rejects_negative_real_spectrum() {
        let m = dmatrix![-1.0, 0.0; 0.0, 2.0];
        assert!(matches!(
            principal_matrix_logarithm(&m),
            Err(Error::NoPrincipalLog { .. })
        ));
        let singular = dmatrix![1.0, 1.0; 1.0, 1.0];
        assert!(matches!(
            principal_matrix_logarithm(&singular),
            Err(Error::NoPrincipalLog { .. })
        ));
    }

    #[test]
    fn logarithm_of_rotation_is_principal() {
        let theta: f64 = 2.5;
        let m = dmatrix![theta.cos(), -theta.sin(); theta.sin(), theta.cos()];
        let l = principal_matrix_logarithm(&m).unwrap();
        assert_close(&l, &dmatrix![0.0, -theta; theta, 0.0], 1e-12);
    }

    #[test]
    fn kronecker_small_cases() {
        let b = dmatrix![1.0, 2.0; 3.0, 4.0];
        let k = kronecker_product(&Matrix::identity(2, 2), &b);
        let want = dmatrix![
            1.0, 2.0, 0.0, 0.0;
            3.0, 4.0, 0.0, 0.0;
            0.0, 0.0, 1.0, 2.0;
            0.0, 0.0, 3.0, 4.0
        ];
        assert_eq!(k, want);
        assert_eq!(kronecker_product(&dmatrix![0.0], &b), Matrix::zeros(2, 2));
    }

    #[test]
    fn kronecker_matches_block_definition() {
        let a = Matrix::from_fn(3, 2, |i, j| (i + 2 * j) as f64 - 1.5);
        let b = Matrix::from_fn(2, 4, |i, j| (i as f64 + 1.0) * (j as f64 - 0.5));
        let k = kronecker_product(&a, &b);
        assert_eq!(k.shape(), (6, 8));
        for i in 0..3 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..4 {
                        assert_eq!(k[(i * 2 + p, j * 4 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn kronecker_stacks_copies() {
        // (e ⊗ F) x is s stacked copies of F x.
        let f = dmatrix![1.0, -2.0; 0.5, 3.0];
        let x = dmatrix![0.3; -1.1];
        let e = Matrix::from_element(3, 1, 1.0);
        let lhs = kronecker_product(&e, &f) * &x;
        let fx = &f * &x;
        for s in 0..3 {
            assert_eq!(lhs.rows(2 * s, 2).into_owned(), fx);
        }
    }

    #[test]
    fn solve_trivial_cases() {
        let b = dmatrix![1.0, 2.0; 3.0, 4.0];
        assert_close(&solve_linear(&Matrix::identity(2, 2), &b).unwrap(), &b, 0.0);
        let half = solve_linear(&(Matrix::identity(3, 3) * 2.0), &Matrix::identity(3, 3)).unwrap();
        assert_close(&half, &(Matrix::identity(3, 3) * 0.5), 0.0);
        let x = solve_linear(&dmatrix![1.1], &dmatrix![1.0]).unwrap();
        assert!((x[(0, 0)] - 1.0 / 1.1).abs() < 1e-16);
    }

    #[test]
    fn solve_reports_singularity_with_pivot() {
        match solve_linear(&dmatrix![1.0, 2.0; 2.0, 4.0], &Matrix::identity(2, 2)) {
            Err(Error::Singular { pivot, .. }) => assert!(pivot < 1e-15),
            other => panic!("expected singular failure, got {other:?}"),
        }
        assert!(solve_linear(&Matrix::zeros(2, 3), &Matrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn solve_residual_is_small() {
        let a = Matrix::from_fn(
            6,
            6,
            |i, j| if i == j { 4.0 } else { ((i + j) as f64).sin() },
        );
        let b = Matrix::from_fn(6, 3, |i, j| (i * j) as f64 - 2.0);
        let x = solve_linear(&a, &b).unwrap();
        assert!((&a * &x - &b).norm() <= 1e-10 * b.norm());
        let y = solve_right(&b.transpose(), &a.transpose()).unwrap();
        assert_close(&y, &x.transpose(), 1e-12);
    }

    fn matrix_strategy(max: usize) -> impl Strategy<Value = Matrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-1.0f64..1.0, r * c)
                .prop_map(move |v| Matrix::from_row_slice(r, c, &v))
        })
    }

    proptest! {
        #[test]
        fn kronecker_mixed_product(
            (a, c) in (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(p, q, r)| (
                proptest::collection::vec(-1.0f64..1.0, p * q).prop_map(move |v| Matrix::from_row_slice(p, q, &v)),
                proptest::collection::vec(-1.0f64..1.0, q * r).prop_map(move |v| Matrix::from_row_slice(q, r, &v)),
            )),
            (b, d) in (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(p, q, r)| (
                proptest::collection::vec(-1.0f64..1.0, p * q).prop_map(move |v| Matrix::from_row_slice(p, q, &v)),
                proptest::collection::vec(-1.0f64..1.0, q * r).prop_map(move |v| Matrix::from_row_slice(q, r, &v)),
            )),
        ) {
            let lhs = kronecker_product(&a, &b) * kronecker_product(&c, &d);
            let rhs = kronecker_product(&(&a * &c), &(&b * &d));
            prop_assert!((lhs - rhs).abs().max() <= 1e-12);
        }

        #[test]
        fn penrose_identities(m in matrix_strategy(8), rank_cut in 0usize..8) {
            // Zero out trailing singular values to produce rank-deficient inputs.
            let svd = m.clone().svd(true, true);
            let mut s = svd.singular_values.clone();
            for i in rank_cut.max(1)..s.len() { s[i] = 0.0; }
            let m = svd.u.unwrap() * Matrix::from_diagonal(&s) * svd.v_t.unwrap();
            let p = pseudoinverse(&m, Some(1e-10)).unwrap();
            let scale = m.norm() * p.norm();
            prop_assert!((&m * &p * &m - &m).norm() <= 1e-10 * m.norm().max(1.0));
            prop_assert!((&p * &m * &p - &p).norm() <= 1e-10 * p.norm().max(1.0));
            let mp = &m * &p;
            let pm = &p * &m;
            prop_assert!((&mp - mp.transpose()).norm() <= 1e-10 * scale.max(1.0));
            prop_assert!((&pm - pm.transpose()).norm() <= 1e-10 * scale.max(1.0));
        }

        #[test]
        fn exp_log_round_trip(v in proptest::collection::vec(-1.0f64..1.0, 16)) {
            let m = Matrix::from_row_slice(4, 4, &v);
            let m = &m / m.norm().max(1.0);
            let l = principal_matrix_logarithm(&matrix_exponential(&m).unwrap()).unwrap();
            prop_assert!((l - &m).norm() <= 1e-8);
        }
    }
}
