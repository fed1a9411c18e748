//! Divergence certificates: a bounded flux field, or a set violating the bound.

use perivar::grid::{CellSet, GridDomain};
use perivar::ic::{divergence_certificate, verify_certificate, DivergenceOutcome};
use perivar::measure::boundary_measure;
use perivar::rat;

fn main() -> perivar::error::Result<()> {
    let g = GridDomain::new(&[5, 5])?;
    let k = CellSet::rect(&g, &[1, 1], &[4, 4])?;
    let c = rat(1, 1);
    for theta in [rat(1, 2), rat(1, 1), rat(3, 2)] {
        let mu = boundary_measure(&k, theta.clone())?;
        match divergence_certificate(&mu, &c)? {
            DivergenceOutcome::Feasible(cert) => {
                let nonzero = cert.sigma.iter().filter(|s| s.lower != s.upper || s.lower != rat(0, 1)).count();
                println!(
                    "theta={theta}: feasible, {nonzero} faces carry flux, verified: {}",
                    verify_certificate(&mu, &cert)
                );
            }
            DivergenceOutcome::Infeasible(inf) => println!(
                "theta={theta}: infeasible, witness of {} cells with excess {} (routed {} of {})",
                inf.witness.volume(),
                inf.excess,
                inf.routed,
                inf.supply
            ),
        }
    }
    Ok(())
}
