//! Dynamic mode decomposition as a system-identification tool for linear
//! time-invariant dynamics `x' = F x`.
//!
//! - [`linalg`]: trimmed SVD, pseudoinverse, matrix exponential and
//!   logarithm, Kronecker products, pivoted solves.
//! - [`rk`]: exact propagation matrices of Runge-Kutta methods, trajectory
//!   generation and empirical order estimation.
//! - [`dmd`]: data matrices, the DMD matrix `Z X^+`, modes, prediction.
//! - [`transform`]: behaviour of DMD under invertible changes of coordinates.
//! - [`sysident`]: recovery of discrete and continuous system matrices.
//! - [`experiments`]: the block test system and reproduction studies.
//!
//! ```
//! use dmd_sysid::dmd::dmd_matrix;
//! use dmd_sysid::linalg::Vector;
//! use dmd_sysid::rk::{builtin_tableau, integrate};
//! use dmd_sysid::sysident::{recover_one_stage, OneStageMethod};
//! use nalgebra::dmatrix;
//!
//! let f = dmatrix![0.0, 1.0; -1.0, -0.1];
//! let data = integrate(&builtin_tableau("implicit-midpoint")?, &f, 0.1, &Vector::from_vec(vec![1.0, 0.0]), 20)?;
//! let model = dmd_matrix(&data, None)?;
//! let rep = recover_one_stage(OneStageMethod::ImplicitMidpoint, &model, 0.1)?;
//! assert!((rep.recovered - f).norm() < 1e-10);
//! # Ok::<(), dmd_sysid::Error>(())
//! ```

pub mod dmd;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod rk;
pub mod sysident;
pub mod transform;

pub use error::{Error, Result};
