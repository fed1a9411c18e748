use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exhaustive::exhaustive_minimize;
use crate::grid::CellSet;
use crate::maxflow::{branches, full_sweep, sweep_sets, violation_cover};
use crate::measure::MeasureData;
use crate::Rational;

use super::{excess_energy, ICVariant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMethod {
    /// Exact by enumeration.
    Exhaustive,
    /// Lagrangian envelope; lower and upper bounds coincide.
    EnvelopeExact,
    /// Lagrangian envelope; `phi` is an upper bound, `lower` a certified lower bound.
    EnvelopeUpperBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileEntry {
    pub v: usize,
    /// `max { μ(rep A) − C·P(A) : A ≠ ∅, |A| ≤ v }`, or an upper bound (see `method`).
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub phi: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub lower: Rational,
    pub method: ProfileMethod,
    /// Set attaining `lower`.
    #[serde(skip)]
    pub witness: CellSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct ICProfile {
    pub variant: &'static str,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub c: Rational,
    pub entries: Vec<ProfileEntry>,
}

impl ICProfile {
    pub fn max_phi(&self) -> Option<&Rational> {
        self.entries.iter().map(|e| &e.phi).max()
    }

    /// First budget with a positive (upper-bound) excess.
    pub fn first_positive(&self) -> Option<usize> {
        self.entries.iter().find(|e| e.phi.is_positive()).map(|e| e.v)
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.method != ProfileMethod::EnvelopeUpperBound)
    }
}

/// Lower convex hull of a branch at volume `k`; `None` outside its volume range.
fn interpolate(hull: &[(usize, Rational, CellSet)], k: usize) -> Option<Rational> {
    let (first, last) = (hull.first()?.0, hull.last()?.0);
    if k < first || k > last {
        return None;
    }
    let i = hull.partition_point(|(v, _, _)| *v < k);
    let (v1, e1, _) = &hull[i];
    if *v1 == k {
        return Some(e1.clone());
    }
    let (v0, e0, _) = &hull[i - 1];
    let t = Rational::new(((k - v0) as i64).into(), ((v1 - v0) as i64).into());
    Some(e0 + (e1 - e0) * t)
}

/// `φ(v)` for `v = 1..=v_max`.
///
/// Exact by enumeration when the free cells fit in `cap`. Otherwise the
/// profile comes from the lower convex hull of `(|A|, E(A))` over the
/// minimizers of `E + λ|A|`: exact at hull vertices, an upper bound elsewhere.
/// A non-submodular excess energy is split into submodular branches on a cover
/// of its violating faces (at most `cap` cells), one hull per branch.
pub fn small_volume_profile(
    mu: &MeasureData,
    c: &Rational,
    variant: &ICVariant,
    v_max: usize,
    cap: usize,
) -> Result<ICProfile> {
    let energy = excess_energy(mu, c, variant)?;
    let free = energy.free_cells();
    if free.is_empty() {
        return Err(Error::EmptyClass("no admissible test cell".into()));
    }
    let v_max = v_max.min(free.len());
    let mut entries = Vec::with_capacity(v_max);
    if free.len() <= cap {
        let r = exhaustive_minimize(&energy, cap)?;
        let mut best: Option<(Rational, CellSet)> = None;
        for v in 1..=v_max {
            if let Some(vb) = &r.per_volume[v] {
                let phi = -vb.value.clone();
                if best.as_ref().is_none_or(|(b, _)| phi > *b) {
                    best = Some((phi, vb.set.clone()));
                }
            }
            let (phi, witness) = best.clone().expect("volume 1 is admissible");
            entries.push(ProfileEntry {
                v,
                lower: phi.clone(),
                phi,
                method: ProfileMethod::Exhaustive,
                witness,
            });
        }
    } else {
        let cover = violation_cover(&energy);
        if cover.len() > cap {
            return Err(Error::ExhaustiveCapacityExceeded {
                cells: free.len(),
                cap,
            });
        }
        // one hull per cover branch; a submodular energy is its own single branch
        let mut hulls: Vec<Vec<(usize, Rational, CellSet)>> = Vec::new();
        for branch in branches(&energy, &cover)? {
            let points = full_sweep(&branch)?;
            hulls.push(
                sweep_sets(&points)
                    .into_iter()
                    .map(|s| {
                        let e = energy.evaluate(&s).expect("admissible");
                        (s.volume(), e, s)
                    })
                    .collect(),
            );
        }
        // exact singletons anchor the lower bound at small budgets
        let mut single: Option<(Rational, CellSet)> = None;
        for &cell in &free {
            let s = CellSet::from_indices(energy.domain(), [cell])?;
            let phi = -energy.evaluate(&s)?;
            if single.as_ref().is_none_or(|(b, _)| phi > *b) {
                single = Some((phi, s));
            }
        }
        let mut upper: Option<Rational> = None;
        let mut lower = single.expect("a free cell exists");
        for v in 1..=v_max {
            for hull in &hulls {
                if let Some(e) = interpolate(hull, v) {
                    let u = -e;
                    upper = Some(upper.map_or(u.clone(), |b| if u > b { u } else { b }));
                }
                if let Some((_, e, s)) = hull.iter().find(|(hv, _, _)| *hv == v) {
                    let phi = -e.clone();
                    if phi > lower.0 {
                        lower = (phi, s.clone());
                    }
                }
            }
            let phi = match &upper {
                Some(u) if *u > lower.0 => u.clone(),
                _ => lower.0.clone(),
            };
            let method = if phi == lower.0 {
                ProfileMethod::EnvelopeExact
            } else {
                ProfileMethod::EnvelopeUpperBound
            };
            entries.push(ProfileEntry {
                v,
                phi,
                lower: lower.0.clone(),
                method,
                witness: lower.1.clone(),
            });
        }
    }
    Ok(ICProfile {
        variant: variant.name(),
        c: c.clone(),
        entries,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularSumReport {
    pub first: ICProfile,
    pub second: ICProfile,
    pub sum: ICProfile,
    /// Budgets where `φ_sum > max(φ₁, φ₂) + max(min(φ₁, φ₂), 0)`.
    pub flagged: Vec<usize>,
    /// Budgets where both parts are nonpositive and the sum is positive.
    pub degraded: Vec<usize>,
}

/// Profiles of two mutually singular measures and of their sum, at the same constant.
pub fn singular_sum_check(
    mu1: &MeasureData,
    mu2: &MeasureData,
    c: &Rational,
    v_max: usize,
    cap: usize,
) -> Result<SingularSumReport> {
    if !mu1.are_mutually_singular(mu2)? {
        return Err(Error::NotMutuallySingular);
    }
    let first = small_volume_profile(mu1, c, &ICVariant::Plain, v_max, cap)?;
    let second = small_volume_profile(mu2, c, &ICVariant::Plain, v_max, cap)?;
    let sum = small_volume_profile(&mu1.sum(mu2)?, c, &ICVariant::Plain, v_max, cap)?;
    let mut flagged = Vec::new();
    let mut degraded = Vec::new();
    for ((a, b), s) in first.entries.iter().zip(&second.entries).zip(&sum.entries) {
        let (hi, lo) = if a.phi >= b.phi { (&a.phi, &b.phi) } else { (&b.phi, &a.phi) };
        let slack = if lo.is_positive() { lo.clone() } else { Rational::zero() };
        if s.phi > hi + slack {
            flagged.push(s.v);
        }
        if !hi.is_positive() && s.phi.is_positive() {
            degraded.push(s.v);
        }
    }
    Ok(SingularSumReport {
        first,
        second,
        sum,
        flagged,
        degraded,
    })
}
