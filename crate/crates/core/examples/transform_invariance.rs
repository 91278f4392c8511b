//! Changing coordinates with an invertible `T` leaves the DMD projector
//! `X^+ X` unchanged, so the conjugated model agrees with the plain one on
//! the data span. Off the span it agrees only for orthogonal `T`.

use dmd_sysid::dmd::TrajectoryData;
use dmd_sysid::linalg::Matrix;
use dmd_sysid::transform::{
    verify_image_invariance, verify_pseudoinverse_identity, Transformation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

fn main() -> dmd_sysid::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (n, m, r) = (6, 9, 3);
    let x = random(&mut rng, n, r) * random(&mut rng, r, m);
    let data = TrajectoryData::from_matrix(&x, 1.0, "random")?;

    let shear = Transformation::upper_bidiagonal_ones(n);
    let rotation = Transformation::new(random(&mut rng, n, n).qr().q())?;
    for (name, t) in [("upper bidiagonal", &shear), ("orthogonal", &rotation)] {
        let projector = verify_pseudoinverse_identity(&x, t, Some(1e-10))?;
        let report = verify_image_invariance(&data, t, Some(1e-10))?;
        println!(
            "{name:>16}: projector {:.1e}, on span {:.1e}, everywhere {:.1e} (expected equal: {})",
            projector,
            report.residual_on_image,
            report.full_equality_residual,
            report.full_equality_expected
        );
    }
    Ok(())
}
