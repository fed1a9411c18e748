//! Evaluate the functional on a hand-built set and print its terms.

use perivar::energy::{functional, EnergyMode};
use perivar::grid::{CellSet, GridDomain};
use perivar::measure::{boundary_measure, SignedPair};
use perivar::rat;

fn main() -> perivar::error::Result<()> {
    let g = GridDomain::new(&[6, 6])?;
    let square = CellSet::rect(&g, &[1, 1], &[4, 4])?;
    // weight 3/2 on every boundary face of the square
    let pair = SignedPair::minus_only(boundary_measure(&square, rat(3, 2))?);

    for (name, a) in [
        ("square", square.clone()),
        ("empty", CellSet::empty(&g)),
        ("inner 1x1", CellSet::rect(&g, &[2, 2], &[3, 3])?),
    ] {
        let f = functional(&pair, &EnergyMode::FullSpace, &a)?;
        println!(
            "{name:>10}: value {} = perimeter {} + mu_plus {} - mu_minus {}",
            f.value, f.perimeter, f.mu_plus, f.mu_minus
        );
    }
    Ok(())
}
