//! Fits a DMD model to a trajectory of a damped oscillator, inspects its
//! eigenvalues and modes and uses it for prediction.

use dmd_sysid::dmd::{dmd_matrix, dmd_modes};
use dmd_sysid::linalg::Vector;
use dmd_sysid::rk::{builtin_tableau, integrate};
use nalgebra::dmatrix;

fn main() -> dmd_sysid::Result<()> {
    let f = dmatrix![0.0, 1.0, 0.0; -1.0, -0.1, 0.0; 0.0, 0.0, -0.5];
    let x0 = Vector::from_vec(vec![1.0, 0.0, 1.0]);
    let data = integrate(&builtin_tableau("rk4")?, &f, 0.1, &x0, 50)?;

    let model = dmd_matrix(&data, None)?;
    println!(
        "rank {} of {}, span invariant: {}",
        model.rank,
        model.dim(),
        model.span_invariant
    );

    let modes = dmd_modes(&model)?;
    for (lambda, mode) in modes.eigenvalues.iter().zip(modes.modes.column_iter()) {
        let growth = lambda.ln() / model.step;
        println!(
            "λ = {lambda:.5}, continuous {growth:.5}, mode {:.3}",
            mode.transpose()
        );
    }

    let pred = model.predict(&x0, 100)?;
    let truth = integrate(&builtin_tableau("rk4")?, &f, 0.1, &x0, 100)?;
    println!(
        "extrapolation error at t = 10: {:.2e}",
        (pred.last() - truth.last()).norm()
    );

    // A state outside the data span has its orthogonal part dropped.
    let (inside, outside) =
        model.project_onto_data_span(&Vector::from_vec(vec![0.0, 1.0, -1.0]))?;
    println!(
        "projection {:.3}, remainder {:.3}",
        inside.transpose(),
        outside.transpose()
    );
    Ok(())
}
