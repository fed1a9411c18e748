//! Discrete 1-capacity: `min P(A)` over `A` containing the target cells and
//! covering every target face (some incident cell in `A`).
//!
//! Covering a face is an OR of two cells, which no single cut expresses. The
//! minimum is found by branch and bound. The relaxation charges `2p` for each
//! uncovered interior target face; that table is still submodular (margin 0),
//! so every node is one min-cut, and it never exceeds `P(A)` on feasible sets.

use num_traits::Zero;

use crate::energy::{assemble, BinaryEnergy, EnergyMode};
use crate::error::{Error, Result};
use crate::grid::{CellSet, FaceId, FaceSet};
use crate::maxflow::minimize;
use crate::measure::{MeasureData, SignedPair};
use crate::Rational;

#[derive(Clone, Debug)]
pub struct CapacityTarget {
    pub cells: CellSet,
    pub faces: FaceSet,
}

impl CapacityTarget {
    pub fn faces(faces: FaceSet) -> Self {
        CapacityTarget {
            cells: CellSet::empty(faces.domain()),
            faces,
        }
    }

    pub fn cells(cells: CellSet) -> Self {
        CapacityTarget {
            faces: FaceSet::empty(cells.domain()),
            cells,
        }
    }

    /// `A` contains the target cells and covers the target faces.
    pub fn is_covered_by(&self, a: &CellSet) -> bool {
        self.cells.is_subset(a) && self.faces.is_subset(&a.closure_faces())
    }
}

#[derive(Clone, Debug)]
pub struct CapacityResult {
    pub value: Rational,
    pub witness: CellSet,
    /// Branch-and-bound nodes solved.
    pub nodes: usize,
}

pub fn capacity(target: &CapacityTarget) -> Result<CapacityResult> {
    let domain = target.cells.domain().clone();
    if target.faces.domain().dims() != domain.dims() {
        return Err(Error::DomainMismatch);
    }
    if target.cells.is_empty() && target.faces.is_empty() {
        return Err(Error::EmptyClass("capacity target is empty".into()));
    }
    let mut forced: Vec<(usize, bool)> = target.cells.iter().map(|c| (c, true)).collect();
    let mut pairs: Vec<(FaceId, usize, usize)> = Vec::new();
    for f in target.faces.iter() {
        match domain.face_cells(f) {
            (Some(i), Some(j)) => pairs.push((f, i, j)),
            (Some(i), None) | (None, Some(i)) => forced.push((i, true)),
            (None, None) => unreachable!("every face has an incident cell"),
        }
    }
    let two_p = domain.perimeter_weight() * Rational::from_integer(2.into());
    let mut penalty = MeasureData::zero(&domain);
    for &(f, _, _) in &pairs {
        penalty.add_face(f, two_p.clone())?;
    }
    let offset = &two_p * Rational::from_integer(pairs.len().into());
    let relaxed = assemble(&SignedPair::minus_only(penalty), &EnergyMode::FullSpace)?;

    let mut incumbent = {
        let mut a = target.cells.clone();
        for &(c, _) in &forced {
            a.set(c, true);
        }
        for &(_, i, j) in &pairs {
            if !a.contains(i) && !a.contains(j) {
                a.set(i, true);
            }
        }
        (a.perimeter(), a)
    };
    let mut nodes = 0;
    let mut stack: Vec<Vec<(usize, bool)>> = vec![forced];
    while let Some(assign) = stack.pop() {
        let Some(energy) = propagate(&relaxed, &assign, &pairs)? else {
            continue;
        };
        nodes += 1;
        let (a, value) = minimize(&energy)?;
        let bound = value + &offset;
        if bound >= incumbent.0 {
            continue;
        }
        let uncovered = pairs
            .iter()
            .find(|&&(_, i, j)| !a.contains(i) && !a.contains(j));
        match uncovered {
            None => {
                debug_assert_eq!(bound, a.perimeter());
                incumbent = (bound, a);
            }
            Some(&(_, i, j)) => {
                let frozen = energy.frozen();
                if frozen[i].is_none() && frozen[j].is_none() {
                    let mut second = assign.clone();
                    second.extend([(i, false), (j, true)]);
                    stack.push(second);
                }
                let mut first = assign;
                first.push(if frozen[i].is_none() { (i, true) } else { (j, true) });
                stack.push(first);
            }
        }
    }
    debug_assert!(target.is_covered_by(&incumbent.1));
    debug_assert!(!incumbent.0.is_zero());
    Ok(CapacityResult {
        value: incumbent.0,
        witness: incumbent.1,
        nodes,
    })
}

/// Freezes `assign`, then forces the partner of every target face whose other
/// cell is frozen out. `None` when the assignment is contradictory.
fn propagate(
    relaxed: &BinaryEnergy,
    assign: &[(usize, bool)],
    pairs: &[(FaceId, usize, usize)],
) -> Result<Option<BinaryEnergy>> {
    let mut energy = match relaxed.freeze(assign) {
        Ok(e) => e,
        Err(Error::FrozenDisagreement { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    loop {
        let frozen = energy.frozen();
        let mut extra = Vec::new();
        for &(_, i, j) in pairs {
            match (frozen[i], frozen[j]) {
                (Some(false), Some(false)) => return Ok(None),
                (Some(false), None) => extra.push((j, true)),
                (None, Some(false)) => extra.push((i, true)),
                _ => {}
            }
        }
        if extra.is_empty() {
            return Ok(Some(energy));
        }
        energy = match energy.freeze(&extra) {
            Ok(e) => e,
            Err(Error::FrozenDisagreement { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
    }
}
