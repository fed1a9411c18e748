//! Breakpoints of the volume-penalized family and the nested minimizers.

use perivar::energy::{assemble, EnergyMode};
use perivar::grid::{CellSet, GridDomain};
use perivar::maxflow::full_sweep;
use perivar::measure::{boundary_measure, SignedPair};
use perivar::rat;

fn main() -> perivar::error::Result<()> {
    let g = GridDomain::new(&[6, 6])?;
    let big = CellSet::rect(&g, &[0, 0], &[4, 4])?;
    let small = CellSet::rect(&g, &[1, 1], &[3, 3])?;
    let mu = boundary_measure(&big, rat(3, 2))?.sum(&boundary_measure(&small, rat(1, 1))?)?;
    let energy = assemble(&SignedPair::minus_only(mu), &EnergyMode::FullSpace)?;

    for p in full_sweep(&energy)? {
        println!(
            "lambda {:>6}  g {:>6}  volumes {}..{}{}",
            p.lambda.to_string(),
            p.value.to_string(),
            p.minimal.volume(),
            p.maximal.volume(),
            if p.breakpoint { "  breakpoint" } else { "" }
        );
    }
    Ok(())
}
