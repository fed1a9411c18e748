//! Dirichlet problem: the set is prescribed outside a window and free inside.

use perivar::exhaustive::DEFAULT_CAP;
use perivar::grid::{CellSet, GridDomain, Region};
use perivar::io::pgm::write_mask;
use perivar::measure::SignedPair;
use perivar::solve::solve_dirichlet;

fn main() -> perivar::error::Result<()> {
    let g = GridDomain::new(&[7, 5])?;
    // left half filled outside the window
    let a0 = CellSet::rect(&g, &[0, 0], &[3, 5])?;
    let omega = Region::new(CellSet::rect(&g, &[2, 1], &[5, 4])?);
    let r = solve_dirichlet(&a0, &omega, &SignedPair::zero(&g), DEFAULT_CAP)?;
    println!("least relative perimeter {} ({:?})", r.value, r.method);
    print!("{}", write_mask(&r.minimizer));
    Ok(())
}
