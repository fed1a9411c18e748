//! Minimize at fixed volume, exactly by enumeration and by the sweep envelope.

use perivar::energy::{assemble, EnergyMode};
use perivar::grid::{CellSet, GridDomain, Region};
use perivar::measure::{boundary_measure, SignedPair};
use perivar::rat;
use perivar::solve::{solve_volume, volume_envelope};

fn main() -> perivar::error::Result<()> {
    let g = GridDomain::new(&[4, 4])?;
    let k = CellSet::rect(&g, &[1, 1], &[3, 3])?;
    let pair = SignedPair::minus_only(boundary_measure(&k, rat(3, 2))?);
    let region = Region::all(&g);
    let energy = assemble(&pair, &EnergyMode::FullSpace)?;

    for v in [1, 2, 4, 6, 9] {
        let exact = solve_volume(v, &pair, &region, 16)?;
        let env = volume_envelope(v, &energy)?;
        let bracket = env
            .certificate
            .map(|c| format!("[{}, {}]", c.lower_bound, c.upper_bound))
            .unwrap_or_else(|| "hull vertex".into());
        println!("v={v}: exact {}, envelope {} {:?} {bracket}", exact.value, env.value, env.exactness);
    }
    Ok(())
}
