//! Obstacle, Dirichlet and prescribed-volume problems.
//!
//! Hard constraints are frozen cells. Submodular energies go through min-cut;
//! otherwise exhaustive search is used up to the cell cap. The volume problem is
//! exact by enumeration within the cap and bracketed by the Lagrangian sweep
//! above it.

use serde::Serialize;

use crate::energy::{assemble, BinaryEnergy, EnergyMode};
use crate::error::{Error, Result};
use crate::exhaustive::exhaustive_minimize;
use crate::grid::{CellSet, Region};
use crate::maxflow::{full_sweep, minimize, sweep_sets};
use crate::measure::SignedPair;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    EnvelopeBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    MinCut,
    Exhaustive,
    Envelope,
}

/// Bracketing data for a prescribed volume off the sweep's hull vertices.
#[derive(Clone, Debug, Serialize)]
pub struct VolumeCertificate {
    /// Multiplier at which the two bracketing minimizers tie.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub lambda: Rational,
    pub below_volume: usize,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub below_value: Rational,
    pub above_volume: usize,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub above_value: Rational,
    /// `g(λ) − λ·v`; no set of volume `v` does better.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub lower_bound: Rational,
    /// Value of the repaired set.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub upper_bound: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    #[serde(skip)]
    pub minimizer: CellSet,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub value: Rational,
    pub exactness: Exactness,
    pub method: SolveMethod,
    pub certificate: Option<VolumeCertificate>,
}

fn exact(minimizer: CellSet, value: Rational, method: SolveMethod) -> SolveResult {
    SolveResult {
        minimizer,
        value,
        exactness: Exactness::Exact,
        method,
        certificate: None,
    }
}

/// Min-cut when submodular, enumeration within `cap` otherwise.
pub fn solve_energy(energy: &BinaryEnergy, cap: usize) -> Result<SolveResult> {
    let report = energy.check_submodular();
    if report.submodular {
        let (a, v) = minimize(energy)?;
        return Ok(exact(a, v, SolveMethod::MinCut));
    }
    if energy.free_cells().len() > cap {
        return Err(Error::NonSubmodular(Box::new(report)));
    }
    let r = exhaustive_minimize(energy, cap)?;
    Ok(exact(r.best, r.value, SolveMethod::Exhaustive))
}

/// `min 𝒫[A]` over `I ⊆ A ⊆ O`.
pub fn solve_obstacle(
    inner: &CellSet,
    outer: &CellSet,
    pair: &SignedPair,
    cap: usize,
) -> Result<SolveResult> {
    let dims = pair.domain().dims();
    if inner.domain().dims() != dims || outer.domain().dims() != dims {
        return Err(Error::DomainMismatch);
    }
    if !inner.is_subset(outer) {
        return Err(Error::EmptyClass("inner obstacle is not contained in the outer one".into()));
    }
    let energy = assemble(pair, &EnergyMode::FullSpace)?;
    let assign: Vec<(usize, bool)> = (0..inner.domain().cell_count())
        .filter_map(|c| {
            if inner.contains(c) {
                Some((c, true))
            } else if !outer.contains(c) {
                Some((c, false))
            } else {
                None
            }
        })
        .collect();
    solve_energy(&energy.freeze(&assign)?, cap)
}

/// `min P(A, Ω̄) + μ₊(A¹) − μ₋(A⁺)` over `A` agreeing with `A₀` outside `Ω`.
pub fn solve_dirichlet(
    a0: &CellSet,
    omega: &Region,
    pair: &SignedPair,
    cap: usize,
) -> Result<SolveResult> {
    let mode = EnergyMode::Dirichlet {
        a0: a0.clone(),
        omega: omega.clone(),
    };
    solve_energy(&assemble(pair, &mode)?, cap)
}

/// `min P(A) − μ₋(A⁺)` over `A ⊆ Ω` with `|A| = v`.
pub fn solve_volume(v: usize, pair: &SignedPair, region: &Region, cap: usize) -> Result<SolveResult> {
    if !pair.plus.is_zero() {
        return Err(Error::Validation("the volume problem takes mu_plus = 0".into()));
    }
    let domain = pair.domain();
    if region.domain().dims() != domain.dims() {
        return Err(Error::DomainMismatch);
    }
    let assign: Vec<(usize, bool)> = (0..domain.cell_count())
        .filter(|&c| !region.contains(c))
        .map(|c| (c, false))
        .collect();
    let energy = assemble(pair, &EnergyMode::FullSpace)?.freeze(&assign)?;
    let max = energy.free_cells().len();
    if v > max {
        return Err(Error::VolumeOutOfRange { v, max });
    }
    if max <= cap {
        let r = exhaustive_minimize(&energy, cap)?;
        let best = r.per_volume[v].clone().expect("every volume up to the free count occurs");
        return Ok(exact(best.set, best.value, SolveMethod::Exhaustive));
    }
    volume_envelope(v, &energy)
}

/// Sweep-based bounds for the volume problem; exact when `v` is a hull vertex.
pub fn volume_envelope(v: usize, energy: &BinaryEnergy) -> Result<SolveResult> {
    let report = energy.check_submodular();
    if !report.submodular {
        return Err(Error::NonSubmodular(Box::new(report)));
    }
    let sets = sweep_sets(&full_sweep(energy)?);
    if let Some(s) = sets.iter().find(|s| s.volume() == v) {
        let value = energy.evaluate(s)?;
        return Ok(SolveResult {
            minimizer: s.clone(),
            value,
            exactness: Exactness::Exact,
            method: SolveMethod::Envelope,
            certificate: None,
        });
    }
    let k = sets.partition_point(|s| s.volume() < v);
    let (below, above) = (&sets[k - 1], &sets[k]);
    let (eb, ea) = (energy.evaluate(below)?, energy.evaluate(above)?);
    let (vb, va) = (below.volume(), above.volume());
    let lambda = (&eb - &ea) / Rational::from_integer(((va - vb) as i64).into());
    let g = &eb + &lambda * Rational::from_integer((vb as i64).into());
    let lower_bound = &g - &lambda * Rational::from_integer((v as i64).into());
    let start = if v - vb <= va - v { below } else { above };
    let (repaired, upper_bound) = repair(energy, start, v)?;
    let exactness = if upper_bound == lower_bound {
        Exactness::Exact
    } else {
        Exactness::EnvelopeBound
    };
    Ok(SolveResult {
        minimizer: repaired,
        value: upper_bound.clone(),
        exactness,
        method: SolveMethod::Envelope,
        certificate: Some(VolumeCertificate {
            lambda,
            below_volume: vb,
            below_value: eb,
            above_volume: va,
            above_value: ea,
            lower_bound,
            upper_bound,
        }),
    })
}

/// Greedy single-cell changes towards volume `v`: add the best free cell
/// touching the set, or drop the best free member. Ties go to the lower index.
fn repair(energy: &BinaryEnergy, start: &CellSet, v: usize) -> Result<(CellSet, Rational)> {
    let domain = energy.domain();
    let n = domain.cell_count();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, t) in energy.pairs().iter().enumerate() {
        incident[t.cells.0].push(k);
        incident[t.cells.1].push(k);
    }
    let frozen = energy.frozen();
    let bits_of = |a: &CellSet, c: usize| a.contains(c) as usize;
    let delta = |a: &CellSet, c: usize| -> Rational {
        let (old, new) = (bits_of(a, c), 1 - bits_of(a, c));
        let mut d = &energy.unary()[c][new] - &energy.unary()[c][old];
        for &k in &incident[c] {
            let t = &energy.pairs()[k];
            let (i, j) = t.cells;
            let (xi, xj) = (bits_of(a, i), bits_of(a, j));
            let (ni, nj) = if i == c { (new, xj) } else { (xi, new) };
            d += &t.table[ni][nj] - &t.table[xi][xj];
        }
        d
    };
    let mut a = start.clone();
    let mut value = energy.evaluate(&a)?;
    while a.volume() != v {
        let growing = a.volume() < v;
        let mut candidates: Vec<usize> = (0..n)
            .filter(|&c| frozen[c].is_none() && a.contains(c) != growing)
            .collect();
        if growing && !a.is_empty() {
            let touching: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|&c| domain.neighbors(c).iter().any(|&u| a.contains(u)))
                .collect();
            if !touching.is_empty() {
                candidates = touching;
            }
        }
        let mut best: Option<(usize, Rational)> = None;
        for c in candidates {
            let d = delta(&a, c);
            if best.as_ref().is_none_or(|(_, b)| d < *b) {
                best = Some((c, d));
            }
        }
        let (c, d) = best.ok_or_else(|| Error::VolumeOutOfRange { v, max: a.volume() })?;
        a.set(c, growing);
        value += d;
    }
    debug_assert_eq!(energy.evaluate(&a)?, value);
    Ok((a, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDomain;
    use crate::measure::{boundary_measure, hyperplane_measure, MeasureData};
    use crate::rat;

    fn convex(theta: Rational) -> (CellSet, SignedPair) {
        let g = GridDomain::new(&[4, 4]).unwrap();
        let k = CellSet::rect(&g, &[1, 1], &[3, 3]).unwrap();
        let pair = SignedPair::minus_only(boundary_measure(&k, theta).unwrap());
        (k, pair)
    }

    #[test]
    fn obstacle_examples() {
        let (k, pair) = convex(rat(2, 1));
        let g = k.domain().clone();
        let full = CellSet::full(&g);
        let empty = CellSet::empty(&g);
        let r = solve_obstacle(&k, &k, &pair, 22).unwrap();
        assert_eq!(r.minimizer, k);
        let r = solve_obstacle(&empty, &full, &pair, 22).unwrap();
        assert_eq!((r.minimizer, r.value), (k.clone(), rat(-8, 1)));
        let (_, half) = convex(rat(1, 2));
        let r = solve_obstacle(&empty, &full, &half, 22).unwrap();
        assert_eq!((r.minimizer.is_empty(), r.value), (true, rat(0, 1)));
        let cell = CellSet::from_indices(&g, [g.cell_index(&[1, 1]).unwrap()]).unwrap();
        let r = solve_obstacle(&cell, &full, &half, 22).unwrap();
        assert!(r.value > rat(0, 1));
        assert!(cell.is_subset(&r.minimizer));
        let ex = exhaustive_minimize(
            &assemble(&half, &EnergyMode::FullSpace)
                .unwrap()
                .freeze(&[(cell.indices()[0], true)])
                .unwrap(),
            16,
        )
        .unwrap();
        assert_eq!(ex.value, r.value);
        assert!(matches!(
            solve_obstacle(&full, &k, &pair, 22),
            Err(Error::EmptyClass(_))
        ));
    }

    #[test]
    fn dirichlet_flat_interface() {
        let g = GridDomain::new(&[4, 4]).unwrap();
        let a0 = CellSet::rect(&g, &[0, 0], &[2, 4]).unwrap();
        let omega = Region::new(CellSet::rect(&g, &[1, 0], &[3, 4]).unwrap());
        let r = solve_dirichlet(&a0, &omega, &SignedPair::zero(&g), 22).unwrap();
        assert_eq!(r.value, rat(4, 1));
        let ex = exhaustive_minimize(
            &assemble(
                &SignedPair::zero(&g),
                &EnergyMode::Dirichlet {
                    a0: a0.clone(),
                    omega: omega.clone(),
                },
            )
            .unwrap(),
            22,
        )
        .unwrap();
        assert_eq!(ex.value, r.value);
        let none = Region::new(CellSet::empty(&g));
        let r = solve_dirichlet(&a0, &none, &SignedPair::zero(&g), 22).unwrap();
        assert_eq!((r.minimizer, r.value), (a0, rat(0, 1)));
    }

    #[test]
    fn volume_examples() {
        let g = GridDomain::new(&[4, 4]).unwrap();
        let all = Region::all(&g);
        let r = solve_volume(1, &SignedPair::zero(&g), &all, 22).unwrap();
        assert_eq!((r.minimizer.indices(), r.value), (vec![0], rat(4, 1)));

        let line = GridDomain::new(&[8]).unwrap();
        let mut mu = MeasureData::zero(&line);
        mu.add_cell(5, rat(3, 1)).unwrap();
        let r = solve_volume(1, &SignedPair::minus_only(mu), &Region::all(&line), 22).unwrap();
        assert_eq!((r.minimizer.indices(), r.value), (vec![5], rat(-1, 1)));

        let mu = hyperplane_measure(&g, 1, 2, rat(2, 1)).unwrap();
        let r = solve_volume(4, &SignedPair::minus_only(mu), &all, 22).unwrap();
        assert_eq!(r.value, rat(2, 1));
        let rows: Vec<usize> = r.minimizer.iter().map(|c| g.cell_coords(c)[1]).collect();
        assert!(rows.iter().all(|&y| y == rows[0] && (y == 1 || y == 2)));
        assert!(matches!(
            solve_volume(17, &SignedPair::zero(&g), &all, 22),
            Err(Error::VolumeOutOfRange { v: 17, max: 16 })
        ));
    }

    #[test]
    fn envelope_sandwich() {
        let g = GridDomain::new(&[5, 4]).unwrap();
        let mut mu = hyperplane_measure(&g, 1, 2, rat(3, 2)).unwrap();
        mu.add_cell(7, rat(4, 1)).unwrap();
        let pair = SignedPair::minus_only(mu);
        let all = Region::all(&g);
        let energy = assemble(&pair, &EnergyMode::FullSpace).unwrap();
        let ex = exhaustive_minimize(&energy, 22).unwrap();
        for v in 0..=20 {
            let env = solve_volume(v, &pair, &all, 0).unwrap();
            let opt = ex.per_volume[v].as_ref().unwrap().value.clone();
            match &env.certificate {
                None => assert_eq!(env.value, opt),
                Some(c) => {
                    assert!(c.lower_bound <= opt && opt <= c.upper_bound, "v = {v}");
                    assert_eq!(env.minimizer.volume(), v);
                }
            }
        }
    }
}
