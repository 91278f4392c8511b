//! Runge-Kutta methods applied to `x' = F x` are linear maps `x -> A_h x`.
//! This prints `A_h` for every built-in tableau and estimates the global
//! order of each method from a step-size ladder.

use dmd_sysid::experiments::seeded_dense_system;
use dmd_sysid::linalg::{matrix_exponential, Matrix};
use dmd_sysid::rk::{
    builtin_tableau, check_step_admissible, discretization_matrix, empirical_order,
    BUILTIN_TABLEAUS, DEFAULT_LADDER,
};
use nalgebra::dmatrix;

fn main() -> dmd_sysid::Result<()> {
    let f: Matrix = dmatrix![0.0, 1.0; -4.0, -0.2];
    let h = 0.1;
    println!("exp(hF) = {:.6}", matrix_exponential(&(&f * h))?);
    for name in BUILTIN_TABLEAUS {
        let a_h = discretization_matrix(&builtin_tableau(name)?, &f, h)?.a_h;
        println!("{name}: {:.6}", a_h);
    }

    // Implicit Euler needs I - hF to be invertible.
    let stiff = Matrix::from_element(1, 1, 10.0);
    let verdict = check_step_admissible(&builtin_tableau("implicit-euler")?, &stiff, 0.1)?;
    println!(
        "implicit-euler on F = 10, h = 0.1 admissible: {}",
        verdict.admissible
    );

    let (f, x0) = seeded_dense_system(8, 42);
    for name in BUILTIN_TABLEAUS {
        let tableau = builtin_tableau(name)?;
        let est = empirical_order(&tableau, &f, &x0, 1.0, &DEFAULT_LADDER)?;
        println!(
            "{name:>18}: slope {:.3} (order {})",
            est.slope, tableau.declared_order
        );
    }
    Ok(())
}
