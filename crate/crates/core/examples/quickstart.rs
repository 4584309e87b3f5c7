use conewise::{canonicalize, catalog};
use conewise::operators::is_local;
use conewise::order::is_disjoint;
use conewise::semigroups::thm_bounded_local;
use conewise::LinOp;
use nalgebra::{dmatrix, dvector};

fn main() -> conewise::Result<()> {
    let space = canonicalize(&catalog::standard(3))?.into_space();
    let x = dvector![1.0, 0.0, 0.0];
    let y = dvector![0.0, -2.0, 0.0];
    println!("disjoint: {}", is_disjoint(&space, &x, &y)?);

    let swap = LinOp::on(&space, dmatrix![0.0, 1.0, 0.0; 1.0, 0.0, 0.0; 0.0, 0.0, 1.0])?;
    let verdict = is_local(&space, &swap)?;
    println!("swap local: {:?}", verdict.value);

    let a = LinOp::on(&space, dmatrix![-1.0, 0.0, 0.0; 0.0, -2.0, 0.0; 0.0, 0.0, 0.5])?;
    let report = thm_bounded_local(&space, &a, &[0.1, 1.0, -1.0])?;
    println!("bounded local generator: {:?}", report.status);
    Ok(())
}
