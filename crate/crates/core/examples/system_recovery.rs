//! Identification of `F` in `x' = F x` from DMD fits: inverting one-stage
//! Runge-Kutta maps, taking the matrix logarithm of exactly sampled data,
//! and a case where Heun's method makes `F` unidentifiable.

use dmd_sysid::dmd::{dmd_matrix, TrajectoryData};
use dmd_sysid::experiments::seeded_dense_system;
use dmd_sysid::linalg::matrix_exponential;
use dmd_sysid::rk::{builtin_tableau, integrate};
use dmd_sysid::sysident::{
    demonstrate_heun_ambiguity, identify_discrete, recover_continuous_exact_sampling,
    recover_one_stage, OneStageMethod,
};

fn main() -> dmd_sysid::Result<()> {
    let (f, x0) = seeded_dense_system(8, 42);
    let h = 0.05;

    for method in OneStageMethod::ALL {
        let data = integrate(&builtin_tableau(method.name())?, &f, h, &x0, 200)?;
        let rep = recover_one_stage(method, &dmd_matrix(&data, None)?, h)?;
        println!(
            "{:>18}: relative error {:.1e}",
            method.name(),
            (&rep.recovered - &f).norm() / f.norm()
        );
    }

    let flow = matrix_exponential(&(&f * h))?;
    let mut xs = vec![x0.clone()];
    for i in 0..200 {
        let next = &flow * &xs[i];
        xs.push(next);
    }
    let data = TrajectoryData::new(xs, h, "exact")?;
    let discrete = identify_discrete(&data, Some(&flow), None)?;
    println!(
        "discrete map: residual {:.1e}, rank {}",
        discrete.residual.unwrap_or(f64::NAN),
        discrete.rank
    );
    let rep = recover_continuous_exact_sampling(&dmd_matrix(&data, None)?, h)?;
    println!(
        "matrix log: relative error {:.1e}",
        (&rep.recovered - &f).norm() / f.norm()
    );

    for h in [0.1, 0.5, 1.0] {
        let w = demonstrate_heun_ambiguity(h)?;
        println!(
            "heun h = {h}: F = {} and F = {} both give A_h = {}",
            w.f1, w.f2, w.a_h1
        );
    }
    Ok(())
}
