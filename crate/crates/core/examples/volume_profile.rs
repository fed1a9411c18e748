//! Small-volume excess profile of a heavy line on a strip.

use perivar::exhaustive::DEFAULT_CAP;
use perivar::grid::GridDomain;
use perivar::ic::{small_volume_profile, ICVariant};
use perivar::measure::hyperplane_measure;
use perivar::rat;

fn main() -> perivar::error::Result<()> {
    let g = GridDomain::new(&[10, 2])?;
    let mu = hyperplane_measure(&g, 1, 1, rat(9, 4))?;
    let p = small_volume_profile(&mu, &rat(1, 1), &ICVariant::Plain, 12, DEFAULT_CAP)?;
    for e in &p.entries {
        println!("v={:>2}  phi={:>5}  {:?}", e.v, e.phi.to_string(), e.method);
    }
    match p.first_positive() {
        Some(v) => println!("first positive at v = {v}"),
        None => println!("no positive entry"),
    }
    Ok(())
}
