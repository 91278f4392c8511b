//! DMD of a two-dimensional trajectory that only moves along the first axis,
//! before and after the shear `T = [[1, 0], [1, 1]]`.

use dmd_sysid::dmd::{dmd_matrix, TrajectoryData};
use dmd_sysid::linalg::{pseudoinverse, Vector};
use dmd_sysid::transform::{conjugated_dmd, verify_image_invariance, Transformation};
use nalgebra::dmatrix;

fn main() -> dmd_sysid::Result<()> {
    let data = TrajectoryData::new(
        vec![
            Vector::from_vec(vec![1.0, 0.0]),
            Vector::from_vec(vec![2.0, 0.0]),
            Vector::from_vec(vec![3.0, 0.0]),
        ],
        1.0,
        "worked-example",
    )?;
    let t = Transformation::new(dmatrix![1.0, 0.0; 1.0, 1.0])?;

    let model = dmd_matrix(&data, None)?;
    println!("A_dmd = {:.4}", model.a_dmd);
    println!(
        "X^+ = {:.4}",
        pseudoinverse(&data.snapshot_matrix().columns(0, 2).into_owned(), None)?
    );

    let back = conjugated_dmd(&t, &data, None)?;
    println!("T^-1 Ã T = {:.4}", back);

    let report = verify_image_invariance(&data, &t, None)?;
    println!("on the data span: {:.1e}", report.residual_on_image);
    println!("everywhere:       {:.4}", report.full_equality_residual);
    Ok(())
}
