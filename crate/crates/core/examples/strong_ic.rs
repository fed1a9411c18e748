//! Strong isoperimetric test of a line measure at several weights.

use perivar::exhaustive::DEFAULT_CAP;
use perivar::grid::GridDomain;
use perivar::ic::{strong_excess, ICVariant};
use perivar::measure::hyperplane_measure;
use perivar::rat;

fn main() -> perivar::error::Result<()> {
    let g = GridDomain::new(&[6, 6])?;
    let c = rat(1, 1);
    for w in [rat(1, 1), rat(2, 1), rat(9, 4), rat(3, 1)] {
        let mu = hyperplane_measure(&g, 1, 3, w.clone())?;
        let r = strong_excess(&mu, &c, &ICVariant::Plain, DEFAULT_CAP)?;
        println!(
            "w={w}: max excess {} via {:?}, witness of {} cells, holds: {}",
            r.excess,
            r.method,
            r.witness.volume(),
            r.holds()
        );
    }
    Ok(())
}
