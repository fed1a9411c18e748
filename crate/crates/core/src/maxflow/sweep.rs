//! Breakpoints of `g(λ) = min_A E(A) + λ·|A|`.
//!
//! `g` is concave and piecewise linear with slopes equal to minimizer volumes.
//! Breakpoints are found by intersecting the lines of the minimizers at the two
//! ends of an interval and testing the intersection with one more cut.

use num_traits::One;

use crate::energy::BinaryEnergy;
use crate::error::{Error, Result};
use crate::grid::CellSet;
use crate::Rational;

use super::reduction::{minimize_both, MinCut};

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub lambda: Rational,
    /// Inclusion-minimal minimizer at `lambda`; optimal just above it.
    pub minimal: CellSet,
    /// Inclusion-maximal minimizer at `lambda`; optimal just below it.
    pub maximal: CellSet,
    /// `g(lambda)`.
    pub value: Rational,
    pub breakpoint: bool,
}

impl SweepPoint {
    /// `E` at the minimal minimizer, without the volume term.
    pub fn base_value_minimal(&self) -> Rational {
        &self.value - &self.lambda * Rational::from_integer(self.minimal.volume().into())
    }

    pub fn base_value_maximal(&self) -> Rational {
        &self.value - &self.lambda * Rational::from_integer(self.maximal.volume().into())
    }
}

fn cut_at(energy: &BinaryEnergy, lambda: &Rational) -> Result<MinCut> {
    minimize_both(&energy.add_volume_term(lambda))
}

fn point(lambda: Rational, cut: MinCut) -> SweepPoint {
    SweepPoint {
        breakpoint: cut.minimal.volume() != cut.maximal.volume(),
        lambda,
        minimal: cut.minimal,
        maximal: cut.maximal,
        value: cut.value,
    }
}

fn vol(set: &CellSet) -> Rational {
    Rational::from_integer(set.volume().into())
}

/// All breakpoints in `(lo, hi)` plus the two end points, sorted by `λ`.
///
/// Minimizers are asserted to be nested: they shrink as `λ` grows.
pub fn parametric_sweep(
    energy: &BinaryEnergy,
    lo: &Rational,
    hi: &Rational,
) -> Result<Vec<SweepPoint>> {
    if lo > hi {
        return Err(Error::Validation(format!("empty λ range [{lo}, {hi}]")));
    }
    let start = point(lo.clone(), cut_at(energy, lo)?);
    if lo == hi {
        return Ok(vec![start]);
    }
    let end = point(hi.clone(), cut_at(energy, hi)?);
    let mut inner = Vec::new();
    let mut stack = vec![(lo.clone(), start.minimal.clone(), hi.clone(), end.maximal.clone())];
    while let Some((a, left, b, right)) = stack.pop() {
        if left.volume() == right.volume() {
            continue;
        }
        let e_left = energy.evaluate(&left)?;
        let e_right = energy.evaluate(&right)?;
        let lambda = (&e_right - &e_left) / (vol(&left) - vol(&right));
        debug_assert!(lambda > a && lambda < b);
        let cut = cut_at(energy, &lambda)?;
        let line = &e_left + &lambda * vol(&left);
        if cut.value == line {
            inner.push(point(lambda, cut));
        } else {
            let p = point(lambda.clone(), cut);
            stack.push((a, left, lambda.clone(), p.maximal.clone()));
            stack.push((lambda, p.minimal.clone(), b, right));
            inner.push(p);
        }
    }
    let mut points = vec![start];
    points.extend(inner);
    points.push(end);
    points.sort_by(|x, y| x.lambda.cmp(&y.lambda));
    points.dedup_by(|x, y| x.lambda == y.lambda);
    for w in points.windows(2) {
        assert!(w[0].minimal.is_subset(&w[0].maximal));
        assert!(
            w[1].maximal.is_subset(&w[0].minimal),
            "minimizers not nested across λ"
        );
    }
    Ok(points)
}

/// Range `±(2·mass + 1)` outside of which the minimizer no longer changes.
pub fn default_range(energy: &BinaryEnergy) -> (Rational, Rational) {
    let r = Rational::from_integer(2.into()) * energy.coefficient_mass() + Rational::one();
    (-r.clone(), r)
}

/// Sweep over [`default_range`]; the first point minimizes with every free cell in,
/// the last with every free cell out.
pub fn full_sweep(energy: &BinaryEnergy) -> Result<Vec<SweepPoint>> {
    let (lo, hi) = default_range(energy);
    parametric_sweep(energy, &lo, &hi)
}

/// Minimizers of distinct volume met along a sweep, in increasing volume.
pub fn sweep_sets(points: &[SweepPoint]) -> Vec<CellSet> {
    let mut sets: Vec<CellSet> = Vec::new();
    for p in points.iter().rev() {
        for s in [&p.minimal, &p.maximal] {
            if sets.last().is_none_or(|l| l.volume() < s.volume()) {
                sets.push(s.clone());
            }
        }
    }
    sets
}
