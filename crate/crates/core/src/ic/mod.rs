//! Isoperimetric conditions: excess maxima, volume profiles, divergence
//! certificates and the discrete 1-capacity.
//!
//! The excess of a nonempty set `A` is `μ(rep A) − C·P(A)`. Its maximum is the
//! negated minimum of `E(A) = C·P(A) − μ(rep A)`, an energy of the same pairwise
//! form as the functional, submodular whenever every face weight is at most `2C`
//! (always, for the interior representative).

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::energy::{BinaryEnergy, FaceParams};
use crate::error::{Error, Result};
use crate::exhaustive::exhaustive_minimize;
use crate::grid::{CellSet, FaceSet, GridDomain, Region};
use crate::maxflow::{branches, canonical_before, minimize, violation_cover};
use crate::measure::MeasureData;
use crate::Rational;

mod capacity;
mod divergence;
mod profile;

pub use capacity::{capacity, CapacityResult, CapacityTarget};
pub use divergence::{
    divergence_certificate, verify_certificate, DivergenceCertificate, DivergenceOutcome,
    FaceFlux, Infeasibility,
};
pub use profile::{singular_sum_check, small_volume_profile, ICProfile, ProfileEntry, ProfileMethod, SingularSumReport};

/// Test-set class and representative of an isoperimetric condition.
#[derive(Clone, Debug)]
pub enum ICVariant {
    /// `μ(A⁺) ≤ C·P(A)` for all `A`.
    Plain,
    /// `μ(A¹)` in place of `μ(A⁺)`.
    InteriorRep,
    /// Perimeter counted on faces interior to `Ω` only; `A` anywhere.
    Relative(Region),
    /// Test sets disjoint from the centered ℓ∞ box of radius `R` (in cells).
    AvoidBall(usize),
    /// Test sets inside `Ω`, full perimeter including `∂Ω`.
    RelativePerimeterToBoundary(Region),
}

impl ICVariant {
    pub fn name(&self) -> &'static str {
        match self {
            ICVariant::Plain => "plain",
            ICVariant::InteriorRep => "interior_rep",
            ICVariant::Relative(_) => "relative",
            ICVariant::AvoidBall(_) => "avoid_ball",
            ICVariant::RelativePerimeterToBoundary(_) => "relative_to_boundary",
        }
    }
}

/// Cells excluded from the test class of `variant`.
pub fn excluded_cells(domain: &GridDomain, variant: &ICVariant) -> CellSet {
    let mut out = CellSet::empty(domain);
    match variant {
        ICVariant::AvoidBall(r) => {
            let dims = domain.dims();
            for c in 0..domain.cell_count() {
                let x = domain.cell_coords(c);
                let inside = (0..dims.len())
                    .all(|a| (2 * x[a] as i64 + 1 - dims[a] as i64).abs() < 2 * *r as i64);
                out.set(c, inside);
            }
        }
        ICVariant::RelativePerimeterToBoundary(omega) => {
            for c in 0..domain.cell_count() {
                out.set(c, !omega.contains(c));
            }
        }
        _ => {}
    }
    out
}

/// `E(A) = C·P(A, variant) − μ(rep A)` with excluded cells frozen to 0.
pub fn excess_energy(mu: &MeasureData, c: &Rational, variant: &ICVariant) -> Result<BinaryEnergy> {
    if c.is_negative() {
        return Err(Error::NegativeWeight(format!("constant C = {c}")));
    }
    let domain = mu.domain();
    let counted = match variant {
        ICVariant::Relative(omega) => {
            if omega.domain().dims() != domain.dims() {
                return Err(Error::DomainMismatch);
            }
            omega.interior_faces()
        }
        ICVariant::RelativePerimeterToBoundary(omega) => {
            if omega.domain().dims() != domain.dims() {
                return Err(Error::DomainMismatch);
            }
            FaceSet::all(domain)
        }
        _ => FaceSet::all(domain),
    };
    let interior = matches!(variant, ICVariant::InteriorRep);
    let unit = c * domain.perimeter_weight();
    let cells: Vec<(usize, Rational)> = mu.cell_weights().map(|(c, w)| (c, -w.clone())).collect();
    let faces = domain
        .faces()
        .filter_map(|f| {
            let perimeter = if counted.contains(f) {
                unit.clone()
            } else {
                Rational::zero()
            };
            let w = mu.face_weight(f);
            let (w_plus, w_minus) = if interior {
                (-w, Rational::zero())
            } else {
                (Rational::zero(), w)
            };
            let trivial = perimeter.is_zero() && w_plus.is_zero() && w_minus.is_zero();
            (!trivial).then_some(FaceParams {
                face: f,
                perimeter,
                w_plus,
                w_minus,
            })
        })
        .collect();
    let excluded = excluded_cells(domain, variant);
    let frozen = (0..domain.cell_count())
        .map(|c| excluded.contains(c).then_some(false))
        .collect();
    BinaryEnergy::from_terms(domain, &cells, faces, frozen)
}

/// `μ(rep A) − C·P(A, variant)` evaluated directly.
pub fn excess_of(mu: &MeasureData, c: &Rational, variant: &ICVariant, a: &CellSet) -> Result<Rational> {
    use crate::grid::{perimeter, PerimeterMode};
    let domain = mu.domain();
    let p = match variant {
        ICVariant::Relative(omega) => perimeter(a, omega, PerimeterMode::Interior)?,
        _ => perimeter(a, &Region::all(domain), PerimeterMode::Closure)?,
    };
    let mass = match variant {
        ICVariant::InteriorRep => mu.mass_on_interior(a)?,
        _ => mu.mass_on_closure(a)?,
    };
    Ok(mass - c * p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcessMethod {
    MinCut,
    Exhaustive,
    /// One min-cut per assignment of a cover of the non-submodular faces.
    ConditionedCut,
}

#[derive(Clone, Debug)]
pub struct StrongExcess {
    /// Maximum of `μ(rep A) − C·P(A)` over nonempty admissible `A`.
    pub excess: Rational,
    pub witness: CellSet,
    pub method: ExcessMethod,
}

impl StrongExcess {
    /// The strong condition holds with constant `C`.
    pub fn holds(&self) -> bool {
        !self.excess.is_positive()
    }
}

/// Minimum of a submodular energy over nonempty sets, by partitioning on the
/// smallest member: for each free cell `c`, cells before `c` are frozen out and
/// `c` in. The first `c` wins ties.
pub fn minimize_nonempty(energy: &BinaryEnergy) -> Result<Option<(CellSet, Rational)>> {
    let (set, value) = minimize(energy)?;
    if value.is_negative() {
        return Ok(Some((set, value)));
    }
    let free = energy.free_cells();
    let mut best: Option<(CellSet, Rational)> = None;
    let mut current = energy.clone();
    for &c in &free {
        let (set, value) = minimize(&current.freeze(&[(c, true)])?)?;
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((set, value));
        }
        current = current.freeze(&[(c, false)])?;
    }
    Ok(best)
}

/// Maximum excess over nonempty test sets of `variant`, with a witness.
///
/// Uses min-cut when the excess energy is submodular. Otherwise exhaustive
/// search over at most `cap` free cells, then one cut per assignment of a cover
/// of the violating faces when that cover has at most `cap` cells.
pub fn strong_excess(
    mu: &MeasureData,
    c: &Rational,
    variant: &ICVariant,
    cap: usize,
) -> Result<StrongExcess> {
    let energy = excess_energy(mu, c, variant)?;
    if energy.free_cells().is_empty() {
        return Err(Error::EmptyClass("no admissible test cell".into()));
    }
    if energy.check_submodular().submodular {
        let (witness, value) = minimize_nonempty(&energy)?.expect("a free cell exists");
        return Ok(StrongExcess {
            excess: -value,
            witness,
            method: ExcessMethod::MinCut,
        });
    }
    if energy.free_cells().len() <= cap {
        let r = exhaustive_minimize(&energy, cap)?;
        let best = r.best_nonempty().expect("a free cell exists");
        return Ok(StrongExcess {
            excess: -best.value.clone(),
            witness: best.set.clone(),
            method: ExcessMethod::Exhaustive,
        });
    }
    let cover = violation_cover(&energy);
    if cover.len() > cap {
        return Err(Error::ExhaustiveCapacityExceeded {
            cells: energy.free_cells().len(),
            cap,
        });
    }
    let mut best: Option<(CellSet, Rational)> = None;
    for branch in branches(&energy, &cover)? {
        let found = if branch.frozen_ones().is_empty() {
            minimize_nonempty(&branch)?
        } else {
            Some(minimize(&branch)?)
        };
        if let Some((set, value)) = found {
            let better = best
                .as_ref()
                .is_none_or(|(bs, bv)| value < *bv || (value == *bv && canonical_before(&set, bs)));
            if better {
                best = Some((set, value));
            }
        }
    }
    let (witness, value) = best.expect("a free cell exists");
    Ok(StrongExcess {
        excess: -value,
        witness,
        method: ExcessMethod::ConditionedCut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{boundary_measure, hyperplane_measure};
    use crate::rat;

    #[test]
    fn single_line_excess() {
        let g = GridDomain::new(&[4, 4]).unwrap();
        let mu = hyperplane_measure(&g, 1, 2, rat(2, 1)).unwrap();
        let r = strong_excess(&mu, &rat(1, 1), &ICVariant::Plain, 22).unwrap();
        assert_eq!(r.excess, rat(-2, 1));
        assert_eq!(r.witness.volume(), 1);
        let cell = r.witness.indices()[0];
        let y = g.cell_coords(cell)[1];
        assert!(y == 1 || y == 2);
        assert_eq!(r.method, ExcessMethod::MinCut);
        let ex = exhaustive_minimize(&excess_energy(&mu, &rat(1, 1), &ICVariant::Plain).unwrap(), 16)
            .unwrap();
        assert_eq!(ex.best_nonempty().unwrap().value, rat(2, 1));
    }

    #[test]
    fn u_shape_violates() {
        for (dims, off) in [([4usize, 3usize], [0usize, 0usize]), ([6, 5], [1, 1])] {
            let g = GridDomain::new(&dims).unwrap();
            let bx = CellSet::rect(&g, &off, &[off[0] + 4, off[1] + 3]).unwrap();
            let notch = CellSet::rect(&g, &[off[0] + 1, off[1] + 1], &[off[0] + 2, off[1] + 3]).unwrap();
            let u = bx.difference(&notch).unwrap();
            assert_eq!(u.perimeter(), rat(18, 1));
            let mu = boundary_measure(&u, rat(1, 1)).unwrap();
            let r = strong_excess(&mu, &rat(1, 1), &ICVariant::Plain, 22).unwrap();
            assert_eq!(r.excess, rat(4, 1));
            assert_eq!(r.witness, bx);
            assert_eq!(excess_of(&mu, &rat(1, 1), &ICVariant::Plain, &bx).unwrap(), rat(4, 1));
        }
    }

    #[test]
    fn zero_measure() {
        let g = GridDomain::new(&[3, 3]).unwrap();
        let mu = MeasureData::zero(&g);
        let r = strong_excess(&mu, &rat(1, 1), &ICVariant::Plain, 22).unwrap();
        assert_eq!(r.excess, rat(-4, 1));
    }

    #[test]
    fn heavy_face_falls_back_to_enumeration() {
        let g = GridDomain::new(&[3, 2]).unwrap();
        let mu = hyperplane_measure(&g, 1, 1, rat(3, 1)).unwrap();
        let r = strong_excess(&mu, &rat(1, 1), &ICVariant::Plain, 22).unwrap();
        assert_eq!(r.method, ExcessMethod::Exhaustive);
        // a row covers the whole line: 9 − 8
        assert_eq!(r.excess, rat(1, 1));
        assert_eq!(r.witness.indices(), vec![0, 1, 2]);
        let r = strong_excess(&mu, &rat(1, 1), &ICVariant::InteriorRep, 22).unwrap();
        assert_eq!(r.method, ExcessMethod::MinCut);
        assert_eq!(r.excess, rat(-1, 1));
        // three violating faces: cap 3 conditions on them, cap 2 cannot
        let r = strong_excess(&mu, &rat(1, 1), &ICVariant::Plain, 3).unwrap();
        assert_eq!(r.method, ExcessMethod::ConditionedCut);
        assert_eq!(r.excess, rat(1, 1));
        assert_eq!(r.witness.indices(), vec![0, 1, 2]);
        assert!(matches!(
            strong_excess(&mu, &rat(1, 1), &ICVariant::Plain, 2),
            Err(Error::ExhaustiveCapacityExceeded { cells: 6, cap: 2 })
        ));
    }

    #[test]
    fn avoid_ball_freezes_center() {
        let g = GridDomain::new(&[4, 4]).unwrap();
        let ex = excluded_cells(&g, &ICVariant::AvoidBall(1));
        assert_eq!(ex, CellSet::rect(&g, &[1, 1], &[3, 3]).unwrap());
        assert!(excluded_cells(&g, &ICVariant::AvoidBall(0)).is_empty());
        let g5 = GridDomain::new(&[5]).unwrap();
        assert_eq!(excluded_cells(&g5, &ICVariant::AvoidBall(1)).indices(), vec![2]);
    }

    #[test]
    fn energy_matches_direct_excess() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = GridDomain::new(&[4, 3]).unwrap();
        let omega = Region::new(CellSet::rect(&g, &[1, 0], &[4, 2]).unwrap());
        let variants = [
            ICVariant::Plain,
            ICVariant::InteriorRep,
            ICVariant::Relative(omega.clone()),
            ICVariant::AvoidBall(1),
            ICVariant::RelativePerimeterToBoundary(omega.clone()),
        ];
        for _ in 0..100 {
            let mut mu = MeasureData::zero(&g);
            for f in g.faces() {
                if rng.gen_bool(0.3) {
                    mu.add_face(f, rat(rng.gen_range(0..9), 4)).unwrap();
                }
            }
            for c in 0..g.cell_count() {
                if rng.gen_bool(0.2) {
                    mu.add_cell(c, rat(rng.gen_range(0..5), 2)).unwrap();
                }
            }
            let c = rat(rng.gen_range(1..5), 2);
            for v in &variants {
                let e = excess_energy(&mu, &c, v).unwrap();
                let excluded = excluded_cells(&g, v);
                let bits = (0..g.cell_count())
                    .map(|k| !excluded.contains(k) && rng.gen_bool(0.5))
                    .collect();
                let a = CellSet::from_bits(&g, bits).unwrap();
                assert_eq!(e.evaluate(&a).unwrap(), -excess_of(&mu, &c, v, &a).unwrap());
            }
        }
    }
}
