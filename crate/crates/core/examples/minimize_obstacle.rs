//! Minimize between an inner and an outer obstacle by a single min-cut.

use perivar::exhaustive::DEFAULT_CAP;
use perivar::grid::{CellSet, GridDomain};
use perivar::io::pgm::write_mask;
use perivar::measure::{boundary_measure, SignedPair};
use perivar::rat;
use perivar::solve::solve_obstacle;

fn main() -> perivar::error::Result<()> {
    let g = GridDomain::new(&[8, 6])?;
    let inner = CellSet::rect(&g, &[1, 1], &[3, 3])?;
    let outer = CellSet::rect(&g, &[0, 0], &[7, 5])?;
    // weight 3/2 on the boundary of a wider box pulls the set out to it,
    // but the outer obstacle clips its last column
    let target = CellSet::rect(&g, &[1, 1], &[8, 5])?;
    let pair = SignedPair::minus_only(boundary_measure(&target, rat(3, 2))?);

    let r = solve_obstacle(&inner, &outer, &pair, DEFAULT_CAP)?;
    println!("value {} ({:?}, {:?})", r.value, r.method, r.exactness);
    print!("{}", write_mask(&r.minimizer));
    Ok(())
}
