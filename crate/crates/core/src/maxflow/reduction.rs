use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::energy::BinaryEnergy;
use crate::error::{Error, Result};
use crate::grid::CellSet;
use crate::Rational;

use super::network::{max_flow, FlowNetwork};

pub(crate) const SOURCE: usize = 0;
pub(crate) const SINK: usize = 1;

/// Network whose minimum cuts are the minimizers of an energy, scaled to integers.
#[derive(Clone, Debug)]
pub struct CutNetwork {
    pub network: FlowNetwork,
    /// Node of each free cell; `None` for frozen cells.
    pub node_of: Vec<Option<usize>>,
    /// `scale · E(A) = cut(A) + offset`.
    pub scale: BigInt,
    pub offset: BigInt,
}

fn scaled(r: &Rational, scale: &BigInt) -> BigInt {
    let v = r * Rational::from_integer(scale.clone());
    debug_assert!(v.is_integer());
    v.to_integer()
}

/// Builds the min-cut network of a submodular energy. A cell with `x = 1` sits on the source side.
pub fn build_network(energy: &BinaryEnergy) -> Result<CutNetwork> {
    let report = energy.check_submodular();
    if !report.submodular {
        return Err(Error::NonSubmodular(Box::new(report)));
    }
    let scale = energy.common_denominator();
    let n = energy.domain().cell_count();
    let mut node_of = vec![None; n];
    let mut next = 2;
    for c in energy.free_cells() {
        node_of[c] = Some(next);
        next += 1;
    }
    let mut net = FlowNetwork::new(next, SOURCE, SINK)?;
    let mut offset = scaled(energy.constant(), &scale);

    // linear coefficient on x per free cell, after pair decomposition
    let mut lin: Vec<BigInt> = vec![BigInt::zero(); n];
    for c in energy.free_cells() {
        let [e0, e1] = &energy.unary()[c];
        offset += scaled(e0, &scale);
        lin[c] += scaled(&(e1 - e0), &scale);
    }
    let mut pair_arcs = Vec::new();
    for term in energy.pairs() {
        let (i, j) = term.cells;
        let [[a, b], [c, d]] = &term.table;
        // E = A + (C−A)·xi + (D−C)·xj + (B+C−A−D)·(1−xi)·xj
        offset += scaled(a, &scale);
        lin[i] += scaled(&(c - a), &scale);
        lin[j] += scaled(&(d - c), &scale);
        let w = scaled(&(b + c - a - d), &scale);
        if !w.is_zero() {
            pair_arcs.push((j, i, w));
        }
    }
    for c in energy.free_cells() {
        let v = node_of[c].expect("free");
        let k = &lin[c];
        if k.is_positive() {
            net.add_arc(v, SINK, k.clone())?;
        } else if k.is_negative() {
            offset += k;
            net.add_arc(SOURCE, v, -k)?;
        }
    }
    for (j, i, w) in pair_arcs {
        net.add_arc(node_of[j].expect("free"), node_of[i].expect("free"), w)?;
    }
    Ok(CutNetwork {
        network: net,
        node_of,
        scale,
        offset,
    })
}

/// Minimum of an energy with its inclusion-minimal and inclusion-maximal minimizers.
#[derive(Clone, Debug)]
pub struct MinCut {
    pub minimal: CellSet,
    pub maximal: CellSet,
    pub value: Rational,
}

pub fn minimize_both(energy: &BinaryEnergy) -> Result<MinCut> {
    let cn = build_network(energy)?;
    let cut = max_flow(&cn.network)?;
    let read = |side: &[bool]| {
        let mut set = energy.frozen_ones();
        for (c, node) in cn.node_of.iter().enumerate() {
            if let Some(v) = node {
                set.set(c, side[*v]);
            }
        }
        set
    };
    let minimal = read(&cut.source_side);
    let maximal = read(&cut.maximal_source_side);
    let value = Rational::new(&cut.value + &cn.offset, cn.scale.clone());
    assert_eq!(energy.evaluate(&minimal)?, value, "cut value disagrees with energy");
    debug_assert_eq!(energy.evaluate(&maximal)?, value);
    Ok(MinCut {
        minimal,
        maximal,
        value,
    })
}

/// Global minimizer of a submodular energy: the canonical inclusion-minimal one.
pub fn minimize(energy: &BinaryEnergy) -> Result<(CellSet, Rational)> {
    let r = minimize_both(energy)?;
    Ok((r.minimal, r.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{assemble, EnergyMode};
    use crate::grid::GridDomain;
    use crate::measure::{boundary_measure, MeasureData, SignedPair};
    use crate::rat;

    fn convex(theta: Rational) -> (CellSet, BinaryEnergy) {
        let g = GridDomain::new(&[4, 4]).unwrap();
        let k = CellSet::rect(&g, &[1, 1], &[3, 3]).unwrap();
        let pair = SignedPair::minus_only(boundary_measure(&k, theta).unwrap());
        (k, assemble(&pair, &EnergyMode::FullSpace).unwrap())
    }

    #[test]
    fn zero_measure_gives_empty() {
        let g = GridDomain::new(&[3, 3]).unwrap();
        let e = assemble(&SignedPair::zero(&g), &EnergyMode::FullSpace).unwrap();
        let (a, v) = minimize(&e).unwrap();
        assert!(a.is_empty());
        assert_eq!(v, rat(0, 1));
    }

    #[test]
    fn convex_block_thresholds() {
        let (k, e) = convex(rat(2, 1));
        assert_eq!(minimize(&e).unwrap(), (k.clone(), rat(-8, 1)));
        let (k, e) = convex(rat(1, 1));
        let r = minimize_both(&e).unwrap();
        assert!(r.minimal.is_empty());
        assert_eq!(r.maximal, k);
        assert_eq!(r.value, rat(0, 1));
        let (_, e) = convex(rat(1, 2));
        let (a, v) = minimize(&e).unwrap();
        assert!(a.is_empty());
        assert_eq!(v, rat(0, 1));
    }

    #[test]
    fn rejects_non_submodular() {
        let g = GridDomain::new(&[2, 1]).unwrap();
        let mut mu = MeasureData::zero(&g);
        mu.add_face(g.face_at(0, 1, &[0]).unwrap(), rat(9, 4)).unwrap();
        let e = assemble(&SignedPair::minus_only(mu), &EnergyMode::FullSpace).unwrap();
        match minimize(&e) {
            Err(Error::NonSubmodular(r)) => assert_eq!(r.violations[0].margin, rat(-1, 4)),
            other => panic!("expected NonSubmodular, got {other:?}"),
        }
    }
}
