//! Finitely supported nonnegative measures on cells and faces.
//!
//! Cell weights model an absolutely continuous density; face weights model a
//! codimension-one singular part. Nothing lives on lower-dimensional features
//! (edges, vertices), so every representable measure vanishes on sets of zero
//! codimension-one size.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::grid::{CellSet, FaceId, FaceSet, GridDomain};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureData {
    domain: GridDomain,
    cells: BTreeMap<usize, Rational>,
    faces: BTreeMap<FaceId, Rational>,
}

impl MeasureData {
    pub fn zero(domain: &GridDomain) -> Self {
        MeasureData {
            domain: domain.clone(),
            cells: BTreeMap::new(),
            faces: BTreeMap::new(),
        }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    /// Adds `w` to the weight of `cell`.
    pub fn add_cell(&mut self, cell: usize, w: Rational) -> Result<()> {
        if cell >= self.domain.cell_count() {
            return Err(Error::OutOfBounds(format!("cell index {cell}")));
        }
        if w.is_negative() {
            return Err(Error::NegativeWeight(w.to_string()));
        }
        accumulate(&mut self.cells, cell, w);
        Ok(())
    }

    /// Adds `w` to the weight of `face`.
    pub fn add_face(&mut self, face: FaceId, w: Rational) -> Result<()> {
        if face.0 >= self.domain.face_count() {
            return Err(Error::OutOfBounds(format!("face index {}", face.0)));
        }
        if w.is_negative() {
            return Err(Error::NegativeWeight(w.to_string()));
        }
        accumulate(&mut self.faces, face, w);
        Ok(())
    }

    pub fn cell_weight(&self, cell: usize) -> Rational {
        self.cells.get(&cell).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn face_weight(&self, face: FaceId) -> Rational {
        self.faces.get(&face).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn cell_weights(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.cells.iter().map(|(&c, w)| (c, w))
    }

    pub fn face_weights(&self) -> impl Iterator<Item = (FaceId, &Rational)> {
        self.faces.iter().map(|(&f, w)| (f, w))
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_empty() && self.faces.is_empty()
    }

    pub fn total_mass(&self) -> Rational {
        self.cells.values().chain(self.faces.values()).sum()
    }

    pub fn max_face_weight(&self) -> Rational {
        self.faces.values().max().cloned().unwrap_or_else(Rational::zero)
    }

    fn check_set(&self, a: &CellSet) -> Result<()> {
        if a.domain().dims() != self.domain.dims() {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    fn check(&self, other: &MeasureData) -> Result<()> {
        if other.domain.dims() != self.domain.dims() {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    fn mass_with(&self, a: &CellSet, face_rule: impl Fn(usize) -> bool) -> Result<Rational> {
        self.check_set(a)?;
        let bits = a.bits();
        let mut total: Rational = self
            .cells
            .iter()
            .filter(|(&c, _)| bits[c])
            .map(|(_, w)| w)
            .sum();
        for (&f, w) in &self.faces {
            let (lo, hi) = self.domain.face_cells(f);
            let inside = [lo, hi].iter().flatten().filter(|&&c| bits[c]).count();
            if face_rule(inside) {
                total += w;
            }
        }
        Ok(total)
    }

    /// `μ(A⁺)`: cell mass of `A` plus face mass on faces with at least one incident cell in `A`.
    pub fn mass_on_closure(&self, a: &CellSet) -> Result<Rational> {
        self.mass_with(a, |inside| inside >= 1)
    }

    /// `μ(A¹)`: cell mass of `A` plus face mass on faces with both incident cells in `A`.
    pub fn mass_on_interior(&self, a: &CellSet) -> Result<Rational> {
        self.mass_with(a, |inside| inside == 2)
    }

    pub fn sum(&self, other: &MeasureData) -> Result<MeasureData> {
        self.check(other)?;
        let mut out = self.clone();
        for (&c, w) in &other.cells {
            accumulate(&mut out.cells, c, w.clone());
        }
        for (&f, w) in &other.faces {
            accumulate(&mut out.faces, f, w.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, lambda: &Rational) -> Result<MeasureData> {
        if lambda.is_negative() {
            return Err(Error::NegativeWeight(lambda.to_string()));
        }
        let mut out = MeasureData::zero(&self.domain);
        if lambda.is_zero() {
            return Ok(out);
        }
        out.cells = self.cells.iter().map(|(&c, w)| (c, w * lambda)).collect();
        out.faces = self.faces.iter().map(|(&f, w)| (f, w * lambda)).collect();
        Ok(out)
    }

    /// Keeps only the mass on `cells` and `faces`.
    pub fn restrict(&self, cells: &CellSet, faces: &FaceSet) -> Result<MeasureData> {
        self.check_set(cells)?;
        if faces.domain().dims() != self.domain.dims() {
            return Err(Error::DomainMismatch);
        }
        let mut out = MeasureData::zero(&self.domain);
        out.cells = self
            .cells
            .iter()
            .filter(|(&c, _)| cells.contains(c))
            .map(|(&c, w)| (c, w.clone()))
            .collect();
        out.faces = self
            .faces
            .iter()
            .filter(|(&f, _)| faces.contains(f))
            .map(|(&f, w)| (f, w.clone()))
            .collect();
        Ok(out)
    }

    /// Cells carrying positive weight.
    pub fn cell_support(&self) -> CellSet {
        CellSet::from_indices(&self.domain, self.cells.keys().copied())
            .expect("keys are valid cells")
    }

    /// Faces carrying positive weight.
    pub fn face_support(&self) -> FaceSet {
        FaceSet::from_ids(&self.domain, self.faces.keys().copied()).expect("keys are valid faces")
    }

    /// Disjoint supports: the measures are singular to each other.
    pub fn are_mutually_singular(&self, other: &MeasureData) -> Result<bool> {
        self.check(other)?;
        Ok(!self.cells.keys().any(|c| other.cells.contains_key(c))
            && !self.faces.keys().any(|f| other.faces.contains_key(f)))
    }
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, Rational>, key: K, w: Rational) {
    if w.is_zero() {
        return;
    }
    *map.entry(key).or_insert_with(Rational::zero) += w;
}

/// `weight` on every face of the given axis and slot.
pub fn hyperplane_measure(
    domain: &GridDomain,
    axis: usize,
    slot: usize,
    weight: Rational,
) -> Result<MeasureData> {
    if axis >= domain.ndim() {
        return Err(Error::OutOfBounds(format!("axis {axis}")));
    }
    if slot > domain.dims()[axis] {
        return Err(Error::OutOfBounds(format!(
            "slot {slot} on axis {axis} (max {})",
            domain.dims()[axis]
        )));
    }
    let mut mu = MeasureData::zero(domain);
    for f in domain.faces() {
        let face = domain.face(f);
        if face.axis == axis && face.slot() == slot {
            mu.add_face(f, weight.clone())?;
        }
    }
    Ok(mu)
}

/// `θ` on each boundary face of `set`.
pub fn boundary_measure(set: &CellSet, theta: Rational) -> Result<MeasureData> {
    let mut mu = MeasureData::zero(set.domain());
    for f in set.boundary_faces().iter() {
        mu.add_face(f, theta.clone())?;
    }
    Ok(mu)
}

/// The measure data `(μ₊, μ₋)` of a functional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPair {
    pub plus: MeasureData,
    pub minus: MeasureData,
}

impl SignedPair {
    pub fn new(plus: MeasureData, minus: MeasureData) -> Result<Self> {
        if plus.domain().dims() != minus.domain().dims() {
            return Err(Error::DomainMismatch);
        }
        Ok(SignedPair { plus, minus })
    }

    pub fn zero(domain: &GridDomain) -> Self {
        SignedPair {
            plus: MeasureData::zero(domain),
            minus: MeasureData::zero(domain),
        }
    }

    pub fn minus_only(minus: MeasureData) -> Self {
        SignedPair {
            plus: MeasureData::zero(minus.domain()),
            minus,
        }
    }

    pub fn plus_only(plus: MeasureData) -> Self {
        SignedPair {
            minus: MeasureData::zero(plus.domain()),
            plus,
        }
    }

    pub fn domain(&self) -> &GridDomain {
        self.plus.domain()
    }

    pub fn scale(&self, lambda: &Rational) -> Result<Self> {
        Ok(SignedPair {
            plus: self.plus.scale(lambda)?,
            minus: self.minus.scale(lambda)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn one_sided_coverage() {
        let g = GridDomain::new(&[4, 4]).unwrap();
        let c = g.cell_index(&[1, 1]).unwrap();
        let c2 = g.cell_index(&[2, 1]).unwrap();
        let f = g.face_at(0, 2, &[1]).unwrap();
        let mut mu = MeasureData::zero(&g);
        mu.add_face(f, r(2)).unwrap();
        let a = CellSet::from_indices(&g, [c]).unwrap();
        assert_eq!(mu.mass_on_closure(&a).unwrap(), r(2));
        assert_eq!(mu.mass_on_interior(&a).unwrap(), r(0));
        let ab = CellSet::from_indices(&g, [c, c2]).unwrap();
        assert_eq!(mu.mass_on_closure(&ab).unwrap(), r(2));
        assert_eq!(mu.mass_on_interior(&ab).unwrap(), r(2));

        let mut cell_mu = MeasureData::zero(&g);
        cell_mu.add_cell(c, r(3)).unwrap();
        assert_eq!(cell_mu.mass_on_closure(&a).unwrap(), r(3));
        assert_eq!(cell_mu.mass_on_interior(&a).unwrap(), r(3));
    }

    #[test]
    fn grid_boundary_faces_never_interior() {
        let g = GridDomain::new(&[3]).unwrap();
        let mu = hyperplane_measure(&g, 0, 0, r(1)).unwrap();
        let full = CellSet::full(&g);
        assert_eq!(mu.mass_on_closure(&full).unwrap(), r(1));
        assert_eq!(mu.mass_on_interior(&full).unwrap(), r(0));
    }

    #[test]
    fn hyperplane_mass() {
        let g = GridDomain::new(&[4, 4]).unwrap();
        let mu = hyperplane_measure(&g, 1, 2, r(2)).unwrap();
        assert_eq!(mu.face_support().len(), 4);
        assert_eq!(mu.total_mass(), r(8));
        assert!(hyperplane_measure(&g, 1, 2, r(0)).unwrap().is_zero());
        assert!(hyperplane_measure(&g, 1, 5, r(1)).is_err());
        assert!(hyperplane_measure(&g, 2, 0, r(1)).is_err());

        let two = hyperplane_measure(&g, 1, 1, r(2))
            .unwrap()
            .sum(&hyperplane_measure(&g, 1, 3, r(2)).unwrap())
            .unwrap();
        assert_eq!(two.total_mass(), r(16));
        let l1 = hyperplane_measure(&g, 1, 1, r(2)).unwrap();
        let l3 = hyperplane_measure(&g, 1, 3, r(2)).unwrap();
        assert!(l1.are_mutually_singular(&l3).unwrap());
        assert!(!l1.are_mutually_singular(&two).unwrap());
    }

    #[test]
    fn boundary_measure_mass() {
        let g = GridDomain::new(&[4, 4]).unwrap();
        let k = CellSet::rect(&g, &[1, 1], &[3, 3]).unwrap();
        let mu = boundary_measure(&k, r(2)).unwrap();
        assert_eq!(mu.face_support().len(), 8);
        assert_eq!(mu.total_mass(), r(16));
        assert!(boundary_measure(&k, r(0)).unwrap().is_zero());
        assert!(boundary_measure(&CellSet::empty(&g), r(2)).unwrap().is_zero());
    }

    #[test]
    fn pointwise_operations() {
        let g = GridDomain::new(&[3, 3]).unwrap();
        let k = CellSet::rect(&g, &[0, 0], &[2, 2]).unwrap();
        let mu = boundary_measure(&k, r(1)).unwrap();
        assert!(mu.scale(&r(0)).unwrap().is_zero());
        assert_eq!(mu.scale(&r(3)).unwrap().total_mass(), r(24));
        assert!(mu.scale(&r(-1)).is_err());
        let none = mu
            .restrict(&CellSet::empty(&g), &FaceSet::empty(&g))
            .unwrap();
        assert!(none.is_zero());
        let all = mu.restrict(&CellSet::full(&g), &FaceSet::all(&g)).unwrap();
        assert_eq!(all, mu);
        let mut m = MeasureData::zero(&g);
        assert!(m.add_cell(0, r(-1)).is_err());
        assert!(m.add_cell(9, r(1)).is_err());
        let other = MeasureData::zero(&GridDomain::new(&[3, 4]).unwrap());
        assert!(mu.sum(&other).is_err());
    }
}
