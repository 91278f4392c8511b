use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, Matrix, Vector};

/// Block test system
///
/// ```text
/// F = [ 0   2Δ  ]        exp(tF) = [ I   4(I - exp(-tΔ/2)) ]
///     [ 0  -Δ/2 ]                  [ 0   exp(-tΔ/2)        ]
/// ```
///
/// with `Δ = diag(0, 1, ..., N-1)`. Its reachable space from any initial
/// value has dimension at most `N`, half the state dimension.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub blocks: usize,
    pub f: Matrix,
}

pub fn build_block_system(blocks: usize) -> Result<BlockSystem> {
    if blocks == 0 {
        return Err(Error::InvalidArgument(
            "block size must be at least 1".into(),
        ));
    }
    let n = 2 * blocks;
    let mut f = Matrix::zeros(n, n);
    for k in 0..blocks {
        let d = k as f64;
        f[(k, blocks + k)] = 2.0 * d;
        f[(blocks + k, blocks + k)] = -0.5 * d;
    }
    Ok(BlockSystem { blocks, f })
}

impl BlockSystem {
    pub fn dim(&self) -> usize {
        2 * self.blocks
    }

    /// Closed-form `exp(tF)`.
    pub fn flow(&self, t: f64) -> Matrix {
        let nb = self.blocks;
        let mut m = Matrix::identity(2 * nb, 2 * nb);
        for k in 0..nb {
            let decay = (-0.5 * t * k as f64).exp();
            m[(k, nb + k)] = 4.0 * (1.0 - decay);
            m[(nb + k, nb + k)] = decay;
        }
        m
    }

    /// `[1, 2, ..., 2N]`.
    pub fn default_initial_value(&self) -> Vector {
        Vector::from_fn(self.dim(), |i, _| i as f64 + 1.0)
    }

    /// Krylov matrix `[x0, F x0, ..., F^{2N-1} x0]`.
    pub fn krylov_matrix(&self, x0: &Vector) -> Result<Matrix> {
        if x0.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "initial value has length {}, system dimension is {}",
                x0.len(),
                self.dim()
            )));
        }
        let mut cols = vec![x0.clone()];
        for i in 1..self.dim() {
            let next = &self.f * &cols[i - 1];
            cols.push(next);
        }
        Ok(Matrix::from_columns(&cols))
    }

    /// Dimension of the reachable space, as the numerical rank of the
    /// column-normalized Krylov matrix.
    pub fn controllability_dimension(&self, x0: &Vector, rank_tol: Option<f64>) -> Result<usize> {
        let mut k = self.krylov_matrix(x0)?;
        for mut c in k.column_iter_mut() {
            let norm = c.norm();
            if norm > 0.0 {
                c /= norm;
            }
        }
        numerical_rank(&k, rank_tol)
    }
}

/// Dense random test system: a skew-symmetric oscillatory part, light
/// damping and a small random perturbation, plus a random initial value.
/// The pair is controllable with probability one.
pub fn seeded_dense_system(n: usize, seed: u64) -> (Matrix, Vector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let noise = Matrix::from_fn(n, n, |_, _| rng.random_range(-0.1..0.1));
    let f = (&g - g.transpose()) * 0.8 - Matrix::identity(n, n) * 0.1 + noise;
    let x0 = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    (f, x0)
}
