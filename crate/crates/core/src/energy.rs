//! Pairwise pseudo-Boolean energies equal to the perimeter functional with measure data.
//!
//! A cell variable `x = 1` means the cell belongs to the set. Each two-sided face
//! contributes the table
//!
//! ```text
//! E(xᵢ, xⱼ) = p·[xᵢ ≠ xⱼ] + w₊·[xᵢ ∧ xⱼ] − w₋·[xᵢ ∨ xⱼ]
//! ```
//!
//! whose submodularity margin `E(0,1) + E(1,0) − E(0,0) − E(1,1)` equals
//! `2p − w₊ − w₋`. Grid-boundary faces and faces next to frozen cells fold into
//! unary terms or the constant.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{perimeter, CellSet, FaceId, FaceSet, GridDomain, PerimeterMode, Region};
use crate::measure::SignedPair;
use crate::Rational;

/// Coefficients attached to one face before folding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceParams {
    pub face: FaceId,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub perimeter: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub w_plus: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub w_minus: Rational,
}

impl FaceParams {
    pub fn margin(&self) -> Rational {
        Rational::from_integer(2.into()) * &self.perimeter - &self.w_plus - &self.w_minus
    }
}

#[derive(Clone, Debug)]
pub struct PairTerm {
    pub face: FaceId,
    pub cells: (usize, usize),
    /// `table[xᵢ][xⱼ]`.
    pub table: [[Rational; 2]; 2],
    pub params: FaceParams,
}

impl PairTerm {
    pub fn margin(&self) -> Rational {
        &self.table[0][1] + &self.table[1][0] - &self.table[0][0] - &self.table[1][1]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceViolation {
    pub face: FaceId,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub w_plus: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub w_minus: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub perimeter: Rational,
    /// Negative for a violation.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub margin: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubmodularityReport {
    pub submodular: bool,
    pub violations: Vec<FaceViolation>,
}

/// Which form of the functional an energy encodes.
#[derive(Clone, Debug)]
pub enum EnergyMode {
    /// `P(A) + μ₊(A¹) − μ₋(A⁺)` over the whole grid; every cell free.
    FullSpace,
    /// `P(A, Ω̄) + μ₊(A¹) − μ₋(A⁺)` with cells outside `Ω` frozen to `a0`.
    Dirichlet { a0: CellSet, omega: Region },
    /// `P(A, Ω) + μ₊(A¹) − μ₋(A⁺)`, perimeter counted on faces interior to `Ω` only.
    Relative { omega: Region },
}

#[derive(Clone, Debug)]
pub struct BinaryEnergy {
    domain: GridDomain,
    frozen: Vec<Option<bool>>,
    unary: Vec<[Rational; 2]>,
    pairs: Vec<PairTerm>,
    constant: Rational,
}

impl BinaryEnergy {
    /// Builds an energy from per-cell linear coefficients (`coef·x_c`) and per-face
    /// parameters, then folds in the frozen assignment.
    pub fn from_terms(
        domain: &GridDomain,
        cell_coefs: &[(usize, Rational)],
        faces: Vec<FaceParams>,
        frozen: Vec<Option<bool>>,
    ) -> Result<Self> {
        let n = domain.cell_count();
        if frozen.len() != n {
            return Err(Error::DomainMismatch);
        }
        let zero = Rational::zero;
        let mut unary = vec![[zero(), zero()]; n];
        for (c, coef) in cell_coefs {
            if *c >= n {
                return Err(Error::OutOfBounds(format!("cell index {c}")));
            }
            unary[*c][1] += coef;
        }
        let mut pairs = Vec::new();
        for params in faces {
            match domain.face_cells(params.face) {
                (Some(i), Some(j)) => {
                    let cut = params.perimeter.clone() - &params.w_minus;
                    let table = [
                        [zero(), cut.clone()],
                        [cut, params.w_plus.clone() - &params.w_minus],
                    ];
                    pairs.push(PairTerm {
                        face: params.face,
                        cells: (i, j),
                        table,
                        params,
                    });
                }
                (Some(i), None) | (None, Some(i)) => {
                    unary[i][1] += &params.perimeter - &params.w_minus;
                }
                (None, None) => unreachable!("every face has an incident cell"),
            }
        }
        let energy = BinaryEnergy {
            domain: domain.clone(),
            frozen: vec![None; n],
            unary,
            pairs,
            constant: Rational::zero(),
        };
        let assignments: Vec<(usize, bool)> = frozen
            .iter()
            .enumerate()
            .filter_map(|(c, v)| v.map(|b| (c, b)))
            .collect();
        energy.freeze(&assignments)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn frozen(&self) -> &[Option<bool>] {
        &self.frozen
    }

    pub fn unary(&self) -> &[[Rational; 2]] {
        &self.unary
    }

    pub fn pairs(&self) -> &[PairTerm] {
        &self.pairs
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn free_cells(&self) -> Vec<usize> {
        (0..self.frozen.len())
            .filter(|&c| self.frozen[c].is_none())
            .collect()
    }

    /// Cells frozen to 1.
    pub fn frozen_ones(&self) -> CellSet {
        let bits = self.frozen.iter().map(|v| *v == Some(true)).collect();
        CellSet::from_bits(&self.domain, bits).expect("sized to domain")
    }

    /// Fixes the given cells and folds their terms into unary terms and the constant.
    pub fn freeze(&self, assignments: &[(usize, bool)]) -> Result<BinaryEnergy> {
        let mut out = self.clone();
        for &(c, value) in assignments {
            if c >= out.frozen.len() {
                return Err(Error::OutOfBounds(format!("cell index {c}")));
            }
            match out.frozen[c] {
                Some(v) if v == value => continue,
                Some(_) => return Err(Error::FrozenDisagreement { cell: c }),
                None => {}
            }
            out.frozen[c] = Some(value);
            let u = std::mem::replace(&mut out.unary[c], [Rational::zero(), Rational::zero()]);
            out.constant += &u[value as usize];
        }
        let frozen = &out.frozen;
        let mut kept = Vec::with_capacity(out.pairs.len());
        for term in out.pairs.drain(..) {
            let (i, j) = term.cells;
            match (frozen[i], frozen[j]) {
                (None, None) => kept.push(term),
                (Some(a), Some(b)) => out.constant += &term.table[a as usize][b as usize],
                (Some(a), None) => {
                    for x in 0..2 {
                        out.unary[j][x] += &term.table[a as usize][x];
                    }
                }
                (None, Some(b)) => {
                    for x in 0..2 {
                        out.unary[i][x] += &term.table[x][b as usize];
                    }
                }
            }
        }
        out.pairs = kept;
        Ok(out)
    }

    /// Adds `λ·|A|`.
    pub fn add_volume_term(&self, lambda: &Rational) -> BinaryEnergy {
        let mut out = self.clone();
        for c in 0..out.frozen.len() {
            match out.frozen[c] {
                None => out.unary[c][1] += lambda,
                Some(true) => out.constant += lambda,
                Some(false) => {}
            }
        }
        out
    }

    pub fn evaluate(&self, a: &CellSet) -> Result<Rational> {
        if a.domain().dims() != self.domain.dims() {
            return Err(Error::DomainMismatch);
        }
        let bits = a.bits();
        let mut total = self.constant.clone();
        for (c, v) in self.frozen.iter().enumerate() {
            match v {
                Some(b) if *b != bits[c] => return Err(Error::FrozenDisagreement { cell: c }),
                Some(_) => {}
                None => total += &self.unary[c][bits[c] as usize],
            }
        }
        for term in &self.pairs {
            let (i, j) = term.cells;
            total += &term.table[bits[i] as usize][bits[j] as usize];
        }
        Ok(total)
    }

    pub fn check_submodular(&self) -> SubmodularityReport {
        let violations: Vec<FaceViolation> = self
            .pairs
            .iter()
            .filter_map(|t| {
                let margin = t.margin();
                margin.is_negative().then(|| FaceViolation {
                    face: t.face,
                    w_plus: t.params.w_plus.clone(),
                    w_minus: t.params.w_minus.clone(),
                    perimeter: t.params.perimeter.clone(),
                    margin,
                })
            })
            .collect();
        SubmodularityReport {
            submodular: violations.is_empty(),
            violations,
        }
    }

    /// Margin of every remaining pairwise face term.
    pub fn face_margins(&self) -> Vec<(FaceId, Rational)> {
        self.pairs.iter().map(|t| (t.face, t.margin())).collect()
    }

    /// Least common denominator of every coefficient.
    pub fn common_denominator(&self) -> BigInt {
        let mut l = BigInt::one();
        let mut absorb = |r: &Rational| l = l.lcm(r.denom());
        absorb(&self.constant);
        for c in self.free_cells() {
            self.unary[c].iter().for_each(&mut absorb);
        }
        for t in &self.pairs {
            t.table.iter().flatten().for_each(&mut absorb);
        }
        l
    }

    /// Sum of absolute values of all coefficients; bounds `|E(A) − E(B)|`.
    pub(crate) fn coefficient_mass(&self) -> Rational {
        let mut total = Rational::zero();
        for c in self.free_cells() {
            total += self.unary[c][0].abs() + self.unary[c][1].abs();
        }
        for t in &self.pairs {
            for v in t.table.iter().flatten() {
                total += v.abs();
            }
        }
        total
    }
}

/// Faces whose perimeter is counted in `mode`.
fn counted_faces(domain: &GridDomain, mode: &EnergyMode) -> FaceSet {
    match mode {
        EnergyMode::FullSpace => FaceSet::all(domain),
        EnergyMode::Dirichlet { omega, .. } => omega.closure_faces(),
        EnergyMode::Relative { omega } => omega.interior_faces(),
    }
}

fn check_mode(pair: &SignedPair, mode: &EnergyMode) -> Result<()> {
    let dims = pair.domain().dims();
    match mode {
        EnergyMode::FullSpace => Ok(()),
        EnergyMode::Relative { omega } => {
            if omega.domain().dims() != dims {
                return Err(Error::DomainMismatch);
            }
            Ok(())
        }
        EnergyMode::Dirichlet { a0, omega } => {
            if omega.domain().dims() != dims || a0.domain().dims() != dims {
                return Err(Error::DomainMismatch);
            }
            let closure = omega.closure_faces();
            for (name, mu) in [("mu_plus", &pair.plus), ("mu_minus", &pair.minus)] {
                if let Some((c, _)) = mu.cell_weights().find(|(c, _)| !omega.contains(*c)) {
                    return Err(Error::SupportViolation(format!(
                        "{name} has mass on cell {c} outside the region"
                    )));
                }
                if let Some((f, _)) = mu.face_weights().find(|(f, _)| !closure.contains(*f)) {
                    return Err(Error::SupportViolation(format!(
                        "{name} has mass on face {} outside the region closure",
                        f.0
                    )));
                }
            }
            Ok(())
        }
    }
}

/// Translates the functional in `mode` into a [`BinaryEnergy`].
pub fn assemble(pair: &SignedPair, mode: &EnergyMode) -> Result<BinaryEnergy> {
    check_mode(pair, mode)?;
    let domain = pair.domain();
    let counted = counted_faces(domain, mode);
    let unit = domain.perimeter_weight();

    let mut cells: Vec<(usize, Rational)> = pair
        .plus
        .cell_weights()
        .map(|(c, w)| (c, w.clone()))
        .collect();
    cells.extend(pair.minus.cell_weights().map(|(c, w)| (c, -w.clone())));

    let faces: Vec<FaceParams> = domain
        .faces()
        .filter_map(|f| {
            let perimeter = if counted.contains(f) {
                unit.clone()
            } else {
                Rational::zero()
            };
            let w_plus = pair.plus.face_weight(f);
            let w_minus = pair.minus.face_weight(f);
            let trivial = perimeter.is_zero() && w_plus.is_zero() && w_minus.is_zero();
            (!trivial).then_some(FaceParams {
                face: f,
                perimeter,
                w_plus,
                w_minus,
            })
        })
        .collect();

    let frozen = match mode {
        EnergyMode::Dirichlet { a0, omega } => (0..domain.cell_count())
            .map(|c| (!omega.contains(c)).then(|| a0.contains(c)))
            .collect(),
        _ => vec![None; domain.cell_count()],
    };
    BinaryEnergy::from_terms(domain, &cells, faces, frozen)
}

/// The three terms of the functional evaluated directly from their definitions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctionalValue {
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub value: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub perimeter: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub mu_plus: Rational,
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub mu_minus: Rational,
}

/// `P(A, ·) + μ₊(A¹) − μ₋(A⁺)` in the given mode, without going through an energy.
pub fn functional(pair: &SignedPair, mode: &EnergyMode, a: &CellSet) -> Result<FunctionalValue> {
    check_mode(pair, mode)?;
    let domain = pair.domain();
    let perimeter = match mode {
        EnergyMode::FullSpace => perimeter(a, &Region::all(domain), PerimeterMode::Closure)?,
        EnergyMode::Dirichlet { a0, omega } => {
            if let Some(c) = (0..domain.cell_count())
                .find(|&c| !omega.contains(c) && a.contains(c) != a0.contains(c))
            {
                return Err(Error::FrozenDisagreement { cell: c });
            }
            crate::grid::perimeter(a, omega, PerimeterMode::Closure)?
        }
        EnergyMode::Relative { omega } => crate::grid::perimeter(a, omega, PerimeterMode::Interior)?,
    };
    let mu_plus = pair.plus.mass_on_interior(a)?;
    let mu_minus = pair.minus.mass_on_closure(a)?;
    Ok(FunctionalValue {
        value: &perimeter + &mu_plus - &mu_minus,
        perimeter,
        mu_plus,
        mu_minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{boundary_measure, MeasureData};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn zero_measure_is_perimeter() {
        let g = GridDomain::new(&[3, 3]).unwrap();
        let e = assemble(&SignedPair::zero(&g), &EnergyMode::FullSpace).unwrap();
        for mask in 0u32..512 {
            let a = CellSet::from_indices(&g, (0..9).filter(|i| mask >> i & 1 == 1)).unwrap();
            assert_eq!(e.evaluate(&a).unwrap(), a.perimeter());
        }
        assert!(e.check_submodular().submodular);
    }

    #[test]
    fn single_face_table() {
        let g = GridDomain::new(&[2, 1]).unwrap();
        let f = g.face_at(0, 1, &[0]).unwrap();
        let mut minus = MeasureData::zero(&g);
        minus.add_face(f, r(2)).unwrap();
        let e = assemble(&SignedPair::minus_only(minus), &EnergyMode::FullSpace).unwrap();
        let t = &e.pairs()[0].table;
        assert_eq!(t[0][0], r(0));
        assert_eq!(t[1][1], r(-2));
        assert_eq!(t[0][1], r(-1));
        assert_eq!(t[1][0], r(-1));
        assert_eq!(e.pairs()[0].margin(), r(0));
        assert!(e.check_submodular().submodular);
    }

    #[test]
    fn violation_margin() {
        let g = GridDomain::new(&[4, 4]).unwrap();
        let f = g.face_at(1, 2, &[1]).unwrap();
        let mut minus = MeasureData::zero(&g);
        minus.add_face(f, q(9, 4)).unwrap();
        let e = assemble(&SignedPair::minus_only(minus), &EnergyMode::FullSpace).unwrap();
        let report = e.check_submodular();
        assert!(!report.submodular);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].face, f);
        assert_eq!(report.violations[0].margin, q(-1, 4));
    }

    #[test]
    fn overlapping_weights_use_combined_condition() {
        let g = GridDomain::new(&[2, 2]).unwrap();
        let f = g.face_at(0, 1, &[0]).unwrap();
        let mut plus = MeasureData::zero(&g);
        let mut minus = MeasureData::zero(&g);
        plus.add_face(f, r(1)).unwrap();
        minus.add_face(f, r(1)).unwrap();
        let pair = SignedPair::new(plus.clone(), minus).unwrap();
        assert!(assemble(&pair, &EnergyMode::FullSpace).unwrap().check_submodular().submodular);
        let mut minus2 = MeasureData::zero(&g);
        minus2.add_face(f, q(3, 2)).unwrap();
        let pair = SignedPair::new(plus, minus2).unwrap();
        let report = assemble(&pair, &EnergyMode::FullSpace).unwrap().check_submodular();
        assert_eq!(report.violations[0].margin, q(-1, 2));
    }

    #[test]
    fn convex_block_values() {
        let g = GridDomain::new(&[4, 4]).unwrap();
        let k = CellSet::rect(&g, &[1, 1], &[3, 3]).unwrap();
        for (theta, expected) in [(r(2), r(-8)), (q(1, 2), r(4))] {
            let pair = SignedPair::minus_only(boundary_measure(&k, theta).unwrap());
            let e = assemble(&pair, &EnergyMode::FullSpace).unwrap();
            assert_eq!(e.evaluate(&k).unwrap(), expected);
            assert_eq!(e.evaluate(&CellSet::empty(&g)).unwrap(), r(0));
        }
    }

    #[test]
    fn dirichlet_frozen_cells_become_unary() {
        // 3x3 grid, A₀ = left column, Ω = middle column.
        let g = GridDomain::new(&[3, 3]).unwrap();
        let a0 = CellSet::rect(&g, &[0, 0], &[1, 3]).unwrap();
        let omega = Region::new(CellSet::rect(&g, &[1, 0], &[2, 3]).unwrap());
        let mode = EnergyMode::Dirichlet {
            a0: a0.clone(),
            omega: omega.clone(),
        };
        let e = assemble(&SignedPair::zero(&g), &mode).unwrap();
        assert_eq!(e.free_cells(), vec![1, 4, 7]);
        // Middle cell: left neighbour frozen in (cost 1 when out), right frozen out (cost 1 when in).
        assert_eq!(e.unary()[4], [r(1), r(1)]);
        // Bottom middle cell also sees the grid boundary face below it.
        assert_eq!(e.unary()[1], [r(1), r(2)]);
        for mask in 0u32..8 {
            let mut a = a0.clone();
            for (k, &c) in [1usize, 4, 7].iter().enumerate() {
                a.set(c, mask >> k & 1 == 1);
            }
            let direct = functional(&SignedPair::zero(&g), &mode, &a).unwrap();
            assert_eq!(e.evaluate(&a).unwrap(), direct.value);
        }
        let bad = CellSet::full(&g);
        assert!(matches!(e.evaluate(&bad), Err(Error::FrozenDisagreement { .. })));
    }

    #[test]
    fn dirichlet_support_precondition() {
        let g = GridDomain::new(&[3, 3]).unwrap();
        let omega = Region::new(CellSet::rect(&g, &[1, 1], &[2, 2]).unwrap());
        let mut minus = MeasureData::zero(&g);
        minus.add_cell(0, r(1)).unwrap();
        let mode = EnergyMode::Dirichlet {
            a0: CellSet::empty(&g),
            omega,
        };
        assert!(matches!(
            assemble(&SignedPair::minus_only(minus), &mode),
            Err(Error::SupportViolation(_))
        ));
    }

    #[test]
    fn freezing_twice_conflicts() {
        let g = GridDomain::new(&[2, 2]).unwrap();
        let e = assemble(&SignedPair::zero(&g), &EnergyMode::FullSpace).unwrap();
        let e = e.freeze(&[(0, true)]).unwrap();
        assert!(e.freeze(&[(0, true)]).is_ok());
        assert!(matches!(e.freeze(&[(0, false)]), Err(Error::FrozenDisagreement { cell: 0 })));
        let full = CellSet::full(&g);
        assert_eq!(e.evaluate(&full).unwrap(), r(8));
        let v = e.add_volume_term(&r(3)).evaluate(&full).unwrap();
        assert_eq!(v, r(8 + 12));
    }

    #[test]
    fn margins_are_face_local() {
        let g = GridDomain::new(&[3, 3]).unwrap();
        let f = g.face_at(0, 1, &[1]).unwrap();
        let other = g.face_at(1, 2, &[2]).unwrap();
        let mut minus = MeasureData::zero(&g);
        minus.add_face(f, q(3, 2)).unwrap();
        let base = assemble(&SignedPair::minus_only(minus.clone()), &EnergyMode::FullSpace).unwrap();
        minus.add_face(other, r(5)).unwrap();
        let more = assemble(&SignedPair::minus_only(minus), &EnergyMode::FullSpace).unwrap();
        let m = |e: &BinaryEnergy| e.face_margins().into_iter().find(|(x, _)| *x == f).unwrap().1;
        assert_eq!(m(&base), m(&more));
        assert_eq!(m(&base), q(1, 2));
    }
}
