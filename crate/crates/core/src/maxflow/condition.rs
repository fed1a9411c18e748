//! Minimization of energies with a few non-submodular faces.
//!
//! Freezing one cell of every violating pair folds that pair into unary terms,
//! so each assignment of such a cover leaves a submodular energy. The cost is
//! `2^cover` cuts instead of `2^free` evaluations.

use num_traits::Signed;

use crate::energy::BinaryEnergy;
use crate::error::{Error, Result};
use crate::grid::CellSet;
use crate::Rational;

use super::minimize;

/// Free cells meeting every non-submodular pair, chosen greedily by how many
/// violating pairs a cell touches.
pub fn violation_cover(energy: &BinaryEnergy) -> Vec<usize> {
    let mut open: Vec<(usize, usize)> = energy
        .pairs()
        .iter()
        .filter(|t| t.margin().is_negative())
        .map(|t| t.cells)
        .collect();
    let mut cover = Vec::new();
    while !open.is_empty() {
        let mut degree = std::collections::BTreeMap::new();
        for &(i, j) in &open {
            *degree.entry(i).or_insert(0usize) += 1;
            *degree.entry(j).or_insert(0usize) += 1;
        }
        let (&pick, _) = degree
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .expect("open pairs have endpoints");
        cover.push(pick);
        open.retain(|&(i, j)| i != pick && j != pick);
    }
    cover.sort_unstable();
    cover
}

/// Every assignment of `cover`, in binary counting order. Each branch is submodular
/// when `cover` comes from [`violation_cover`].
pub fn branches(energy: &BinaryEnergy, cover: &[usize]) -> Result<Vec<BinaryEnergy>> {
    if cover.len() >= usize::BITS as usize - 1 {
        return Err(Error::ExhaustiveCapacityExceeded {
            cells: cover.len(),
            cap: usize::BITS as usize - 2,
        });
    }
    (0usize..1 << cover.len())
        .map(|mask| {
            let assign: Vec<(usize, bool)> = cover
                .iter()
                .enumerate()
                .map(|(k, &c)| (c, mask >> k & 1 == 1))
                .collect();
            energy.freeze(&assign)
        })
        .collect()
}

/// `a` precedes `b` among sets of equal value: smaller volume, then the lowest
/// cell where they differ belongs to `a`.
pub fn canonical_before(a: &CellSet, b: &CellSet) -> bool {
    match a.volume().cmp(&b.volume()) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => a
            .bits()
            .iter()
            .zip(b.bits())
            .find(|(x, y)| x != y)
            .is_some_and(|(x, _)| *x),
    }
}

/// Exact minimum through cover branches; errors when the cover exceeds `max_cover`.
/// Returns the canonical minimizer: least volume, then lexicographically first.
pub fn minimize_conditioned(energy: &BinaryEnergy, max_cover: usize) -> Result<(CellSet, Rational)> {
    let cover = violation_cover(energy);
    if cover.len() > max_cover {
        return Err(Error::NonSubmodular(Box::new(energy.check_submodular())));
    }
    let mut best: Option<(CellSet, Rational)> = None;
    for branch in branches(energy, &cover)? {
        debug_assert!(branch.check_submodular().submodular);
        let (set, value) = minimize(&branch)?;
        let better = match &best {
            None => true,
            Some((bs, bv)) => value < *bv || (value == *bv && canonical_before(&set, bs)),
        };
        if better {
            best = Some((set, value));
        }
    }
    Ok(best.expect("at least one branch"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{assemble, EnergyMode};
    use crate::exhaustive::exhaustive_minimize;
    use crate::grid::GridDomain;
    use crate::measure::{hyperplane_measure, SignedPair};
    use crate::rat;

    #[test]
    fn heavy_line_matches_exhaustive() {
        let g = GridDomain::new(&[5, 4]).unwrap();
        let mu = hyperplane_measure(&g, 1, 2, rat(5, 2)).unwrap();
        let e = assemble(&SignedPair::minus_only(mu), &EnergyMode::FullSpace).unwrap();
        assert!(!e.check_submodular().submodular);
        let cover = violation_cover(&e);
        assert_eq!(cover.len(), 5);
        let (set, value) = minimize_conditioned(&e, 8).unwrap();
        let ex = exhaustive_minimize(&e, 22).unwrap();
        assert_eq!(value, ex.value);
        assert_eq!(set, ex.best);
        assert!(matches!(minimize_conditioned(&e, 4), Err(Error::NonSubmodular(_))));
    }

    #[test]
    fn submodular_energy_has_empty_cover() {
        let g = GridDomain::new(&[3, 3]).unwrap();
        let mu = hyperplane_measure(&g, 0, 1, rat(2, 1)).unwrap();
        let e = assemble(&SignedPair::minus_only(mu), &EnergyMode::FullSpace).unwrap();
        assert!(violation_cover(&e).is_empty());
        assert_eq!(branches(&e, &[]).unwrap().len(), 1);
    }

    #[test]
    fn canonical_order() {
        let g = GridDomain::new(&[4]).unwrap();
        let s = |v: &[usize]| CellSet::from_indices(&g, v.iter().copied()).unwrap();
        assert!(canonical_before(&s(&[3]), &s(&[0, 1])));
        assert!(canonical_before(&s(&[0, 3]), &s(&[1, 2])));
        assert!(!canonical_before(&s(&[1, 2]), &s(&[0, 3])));
        assert!(!canonical_before(&s(&[1]), &s(&[1])));
    }
}
