//! Lattice domains, cell sets, face sets and the discrete (crystalline) perimeter.
//!
//! A [`GridDomain`] is a box of `d` axis-aligned unit cells (`d` in 1..=3).
//! Faces are addressed by `(axis, slot, transverse coordinates)`: the face at
//! slot `s` along axis `a` separates the cell with `coord[a] == s - 1` from the
//! cell with `coord[a] == s`. Slots `0` and `dims[a]` are grid-boundary faces
//! whose outer side is the exterior. The exterior never belongs to any set, so
//! grid-boundary faces count towards the perimeter of every set touching them.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::Rational;

pub const MAX_DIM: usize = 3;

const NONE: u32 = u32::MAX;

/// Linear index of a face in its domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct FaceId(pub usize);

/// Geometric address of a face. `coords[axis]` holds the slot; unused
/// trailing coordinates (for `d < 3`) are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub axis: usize,
    pub coords: [usize; MAX_DIM],
}

impl Face {
    pub fn slot(&self) -> usize {
        self.coords[self.axis]
    }

    /// Coordinates along every axis except `axis`, in axis order.
    pub fn transverse(&self, ndim: usize) -> Vec<usize> {
        (0..ndim)
            .filter(|&b| b != self.axis)
            .map(|b| self.coords[b])
            .collect()
    }
}

struct DomainInner {
    dims: Vec<usize>,
    strides: Vec<usize>,
    n_cells: usize,
    face_offsets: Vec<usize>,
    // (lower, upper) incident cells, NONE for the exterior.
    face_cells: Vec<[u32; 2]>,
    unit: Rational,
}

/// A `d`-dimensional box of unit cells with a uniform perimeter weight per face.
#[derive(Clone)]
pub struct GridDomain(Arc<DomainInner>);

impl PartialEq for GridDomain {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.dims == other.0.dims && self.0.unit == other.0.unit)
    }
}

impl Eq for GridDomain {}

impl fmt::Debug for GridDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GridDomain({:?}", self.0.dims)?;
        if !self.0.unit.is_one() {
            write!(f, ", p={}", self.0.unit)?;
        }
        write!(f, ")")
    }
}

impl GridDomain {
    pub fn new(dims: &[usize]) -> Result<Self> {
        Self::with_weight(dims, Rational::one())
    }

    fn with_weight(dims: &[usize], unit: Rational) -> Result<Self> {
        if dims.is_empty() || dims.len() > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1..={MAX_DIM}, got {}",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidGrid("every extent must be positive".into()));
        }
        if unit.is_negative() {
            return Err(Error::NegativeWeight(unit.to_string()));
        }
        let d = dims.len();
        let mut strides = vec![1usize; d];
        for a in 1..d {
            strides[a] = strides[a - 1] * dims[a - 1];
        }
        let n_cells: usize = dims.iter().product();
        if n_cells >= NONE as usize {
            return Err(Error::InvalidGrid("too many cells".into()));
        }

        let mut face_offsets = vec![0usize; d + 1];
        for a in 0..d {
            let count: usize = (0..d)
                .map(|b| if b == a { dims[b] + 1 } else { dims[b] })
                .product();
            face_offsets[a + 1] = face_offsets[a] + count;
        }

        let mut inner = DomainInner {
            dims: dims.to_vec(),
            strides,
            n_cells,
            face_offsets,
            face_cells: Vec::new(),
            unit,
        };
        let total = inner.face_offsets[d];
        let mut face_cells = Vec::with_capacity(total);
        for id in 0..total {
            let face = inner.face(FaceId(id));
            let slot = face.slot();
            let mut below = face.coords;
            let lower = if slot == 0 {
                NONE
            } else {
                below[face.axis] = slot - 1;
                inner.linear(&below[..d]) as u32
            };
            let upper = if slot == dims[face.axis] {
                NONE
            } else {
                inner.linear(&face.coords[..d]) as u32
            };
            face_cells.push([lower, upper]);
        }
        inner.face_cells = face_cells;
        Ok(GridDomain(Arc::new(inner)))
    }

    /// Same lattice with every face carrying perimeter weight `weight`.
    pub fn with_perimeter_weight(&self, weight: Rational) -> Result<Self> {
        Self::with_weight(&self.0.dims, weight)
    }

    pub fn dims(&self) -> &[usize] {
        &self.0.dims
    }

    pub fn ndim(&self) -> usize {
        self.0.dims.len()
    }

    pub fn cell_count(&self) -> usize {
        self.0.n_cells
    }

    pub fn face_count(&self) -> usize {
        self.0.face_cells.len()
    }

    pub fn perimeter_weight(&self) -> &Rational {
        &self.0.unit
    }

    pub fn cell_index(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.ndim() || coords.iter().zip(self.dims()).any(|(c, n)| c >= n) {
            return None;
        }
        Some(self.0.linear(coords))
    }

    pub fn cell_coords(&self, cell: usize) -> Vec<usize> {
        let mut rest = cell;
        self.dims()
            .iter()
            .map(|&n| {
                let c = rest % n;
                rest /= n;
                c
            })
            .collect()
    }

    pub fn face_id(&self, face: &Face) -> Option<FaceId> {
        let d = self.ndim();
        if face.axis >= d {
            return None;
        }
        for b in 0..MAX_DIM {
            let limit = match b {
                b if b >= d => 1,
                b if b == face.axis => self.dims()[b] + 1,
                b => self.dims()[b],
            };
            if face.coords[b] >= limit {
                return None;
            }
        }
        Some(self.0.face_id_unchecked(face))
    }

    /// Face at `slot` along `axis`, located by its transverse coordinates
    /// (the `d - 1` coordinates along the other axes, in axis order).
    pub fn face_at(&self, axis: usize, slot: usize, transverse: &[usize]) -> Option<FaceId> {
        let d = self.ndim();
        if axis >= d || transverse.len() != d - 1 {
            return None;
        }
        let mut coords = [0usize; MAX_DIM];
        let mut it = transverse.iter();
        for (b, c) in coords.iter_mut().enumerate().take(d) {
            *c = if b == axis { slot } else { *it.next()? };
        }
        self.face_id(&Face { axis, coords })
    }

    pub fn face(&self, id: FaceId) -> Face {
        self.0.face(id)
    }

    /// Incident cells `(lower, upper)`; `None` marks the exterior.
    pub fn face_cells(&self, id: FaceId) -> (Option<usize>, Option<usize>) {
        let [lo, hi] = self.0.face_cells[id.0];
        let conv = |c: u32| (c != NONE).then_some(c as usize);
        (conv(lo), conv(hi))
    }

    pub fn is_grid_boundary(&self, id: FaceId) -> bool {
        let [lo, hi] = self.0.face_cells[id.0];
        lo == NONE || hi == NONE
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceId> {
        (0..self.face_count()).map(FaceId)
    }

    /// The `2d` faces of a cell.
    pub fn cell_faces(&self, cell: usize) -> Vec<FaceId> {
        let coords = self.cell_coords(cell);
        let mut out = Vec::with_capacity(2 * self.ndim());
        let mut fc = [0usize; MAX_DIM];
        fc[..coords.len()].copy_from_slice(&coords);
        for axis in 0..self.ndim() {
            for slot in [coords[axis], coords[axis] + 1] {
                let mut c = fc;
                c[axis] = slot;
                out.push(self.0.face_id_unchecked(&Face { axis, coords: c }));
            }
        }
        out
    }

    /// Face-adjacent cells inside the grid.
    pub fn neighbors(&self, cell: usize) -> Vec<usize> {
        self.cell_faces(cell)
            .into_iter()
            .filter_map(|f| match self.face_cells(f) {
                (Some(a), Some(b)) => Some(if a == cell { b } else { a }),
                _ => None,
            })
            .collect()
    }

    /// Short "WxH" style label.
    pub fn label(&self) -> String {
        self.dims()
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join("x")
    }
}

impl DomainInner {
    fn linear(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    fn face_extents(&self, axis: usize) -> [usize; MAX_DIM] {
        let mut ext = [1usize; MAX_DIM];
        for (b, e) in ext.iter_mut().enumerate().take(self.dims.len()) {
            *e = if b == axis { self.dims[b] + 1 } else { self.dims[b] };
        }
        ext
    }

    fn face_id_unchecked(&self, face: &Face) -> FaceId {
        let ext = self.face_extents(face.axis);
        let mut idx = 0;
        let mut stride = 1;
        for (c, e) in face.coords.iter().zip(&ext) {
            idx += c * stride;
            stride *= e;
        }
        FaceId(self.face_offsets[face.axis] + idx)
    }

    fn face(&self, id: FaceId) -> Face {
        let axis = (0..self.dims.len())
            .find(|&a| id.0 < self.face_offsets[a + 1])
            .expect("face id out of range");
        let ext = self.face_extents(axis);
        let mut rest = id.0 - self.face_offsets[axis];
        let mut coords = [0usize; MAX_DIM];
        for b in 0..self.dims.len() {
            coords[b] = rest % ext[b];
            rest /= ext[b];
        }
        Face { axis, coords }
    }
}

/// Indicator of a set of cells of one domain.
#[derive(Clone, PartialEq, Eq)]
pub struct CellSet {
    domain: GridDomain,
    bits: Vec<bool>,
}

impl Hash for CellSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.domain.dims().hash(state);
        self.bits.hash(state);
    }
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellSet({}, {:?})", self.domain.label(), self.indices())
    }
}

impl CellSet {
    pub fn empty(domain: &GridDomain) -> Self {
        CellSet {
            domain: domain.clone(),
            bits: vec![false; domain.cell_count()],
        }
    }

    pub fn full(domain: &GridDomain) -> Self {
        CellSet {
            domain: domain.clone(),
            bits: vec![true; domain.cell_count()],
        }
    }

    pub fn from_bits(domain: &GridDomain, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != domain.cell_count() {
            return Err(Error::DomainMismatch);
        }
        Ok(CellSet {
            domain: domain.clone(),
            bits,
        })
    }

    pub fn from_indices(domain: &GridDomain, cells: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = Self::empty(domain);
        for c in cells {
            if c >= domain.cell_count() {
                return Err(Error::OutOfBounds(format!("cell index {c}")));
            }
            set.bits[c] = true;
        }
        Ok(set)
    }

    pub fn from_coords<'a>(
        domain: &GridDomain,
        cells: impl IntoIterator<Item = &'a [usize]>,
    ) -> Result<Self> {
        let mut set = Self::empty(domain);
        for c in cells {
            let idx = domain
                .cell_index(c)
                .ok_or_else(|| Error::OutOfBounds(format!("cell {c:?}")))?;
            set.bits[idx] = true;
        }
        Ok(set)
    }

    /// Axis-aligned box `lo[a] <= coord[a] < hi[a]`.
    pub fn rect(domain: &GridDomain, lo: &[usize], hi: &[usize]) -> Result<Self> {
        let d = domain.ndim();
        if lo.len() != d || hi.len() != d {
            return Err(Error::OutOfBounds("box corner dimension".into()));
        }
        if (0..d).any(|a| lo[a] > hi[a] || hi[a] > domain.dims()[a]) {
            return Err(Error::OutOfBounds(format!("box {lo:?}..{hi:?}")));
        }
        let bits = (0..domain.cell_count())
            .map(|c| {
                domain
                    .cell_coords(c)
                    .iter()
                    .enumerate()
                    .all(|(a, &x)| lo[a] <= x && x < hi[a])
            })
            .collect();
        Ok(CellSet {
            domain: domain.clone(),
            bits,
        })
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.bits[cell]
    }

    pub fn set(&mut self, cell: usize, value: bool) {
        self.bits[cell] = value;
    }

    pub fn volume(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))
    }

    fn check(&self, other: &CellSet) -> Result<()> {
        if self.domain.dims() != other.domain.dims() {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    fn zip_with(&self, other: &CellSet, f: impl Fn(bool, bool) -> bool) -> Result<CellSet> {
        self.check(other)?;
        Ok(CellSet {
            domain: self.domain.clone(),
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn union(&self, other: &CellSet) -> Result<CellSet> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &CellSet) -> Result<CellSet> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &CellSet) -> Result<CellSet> {
        self.zip_with(other, |a, b| a && !b)
    }

    /// Complement within the grid (the exterior stays outside both).
    pub fn complement(&self) -> CellSet {
        CellSet {
            domain: self.domain.clone(),
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.bits.len() == other.bits.len() && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    fn incident_count(&self, f: FaceId) -> (usize, usize) {
        let (lo, hi) = self.domain.face_cells(f);
        let inside = [lo, hi].iter().flatten().filter(|&&c| self.bits[c]).count();
        let present = [lo, hi].iter().flatten().count();
        (inside, present)
    }

    /// Faces with at least one incident cell in the set (the discrete `A⁺`).
    pub fn closure_faces(&self) -> FaceSet {
        let bits = self
            .domain
            .faces()
            .map(|f| self.incident_count(f).0 >= 1)
            .collect();
        FaceSet {
            domain: self.domain.clone(),
            bits,
        }
    }

    /// Faces with two incident cells, both in the set (the discrete `A¹`).
    pub fn interior_faces(&self) -> FaceSet {
        let bits = self
            .domain
            .faces()
            .map(|f| self.incident_count(f) == (2, 2))
            .collect();
        FaceSet {
            domain: self.domain.clone(),
            bits,
        }
    }

    /// `closure_faces ∖ interior_faces`: the faces where the set meets its complement or the exterior.
    pub fn boundary_faces(&self) -> FaceSet {
        let bits = self
            .domain
            .faces()
            .map(|f| {
                let (lo, hi) = self.domain.face_cells(f);
                side(&self.bits, lo) != side(&self.bits, hi)
            })
            .collect();
        FaceSet {
            domain: self.domain.clone(),
            bits,
        }
    }

    /// Perimeter over the whole grid (closure mode, full region).
    pub fn perimeter(&self) -> Rational {
        Rational::from_integer(self.boundary_faces().len().into()) * self.domain.perimeter_weight()
    }

    /// Shift every cell by `offset`; fails if any cell leaves the grid.
    pub fn translate(&self, offset: &[isize]) -> Result<CellSet> {
        let d = self.domain.ndim();
        if offset.len() != d {
            return Err(Error::OutOfBounds("offset dimension".into()));
        }
        let mut out = CellSet::empty(&self.domain);
        for c in self.iter() {
            let coords = self.domain.cell_coords(c);
            let moved: Option<Vec<usize>> = coords
                .iter()
                .zip(offset)
                .map(|(&x, &o)| x.checked_add_signed(o))
                .collect();
            let idx = moved
                .and_then(|m| self.domain.cell_index(&m))
                .ok_or_else(|| Error::OutOfBounds(format!("cell {coords:?} shifted by {offset:?}")))?;
            out.bits[idx] = true;
        }
        Ok(out)
    }
}

fn side(bits: &[bool], cell: Option<usize>) -> bool {
    cell.is_some_and(|c| bits[c])
}

/// Indicator of a set of faces of one domain.
#[derive(Clone, PartialEq, Eq)]
pub struct FaceSet {
    domain: GridDomain,
    bits: Vec<bool>,
}

impl fmt::Debug for FaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FaceSet({}, {} faces)", self.domain.label(), self.len())
    }
}

impl FaceSet {
    pub fn empty(domain: &GridDomain) -> Self {
        FaceSet {
            domain: domain.clone(),
            bits: vec![false; domain.face_count()],
        }
    }

    pub fn all(domain: &GridDomain) -> Self {
        FaceSet {
            domain: domain.clone(),
            bits: vec![true; domain.face_count()],
        }
    }

    pub fn from_ids(domain: &GridDomain, ids: impl IntoIterator<Item = FaceId>) -> Result<Self> {
        let mut set = Self::empty(domain);
        for id in ids {
            if id.0 >= domain.face_count() {
                return Err(Error::OutOfBounds(format!("face index {}", id.0)));
            }
            set.bits[id.0] = true;
        }
        Ok(set)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn contains(&self, id: FaceId) -> bool {
        self.bits[id.0]
    }

    pub fn insert(&mut self, id: FaceId) {
        self.bits[id.0] = true;
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(FaceId(i)))
    }

    pub fn difference(&self, other: &FaceSet) -> Result<FaceSet> {
        if self.bits.len() != other.bits.len() {
            return Err(Error::DomainMismatch);
        }
        Ok(FaceSet {
            domain: self.domain.clone(),
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| a && !b).collect(),
        })
    }

    pub fn union(&self, other: &FaceSet) -> Result<FaceSet> {
        if self.bits.len() != other.bits.len() {
            return Err(Error::DomainMismatch);
        }
        Ok(FaceSet {
            domain: self.domain.clone(),
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| a || b).collect(),
        })
    }

    pub fn is_subset(&self, other: &FaceSet) -> bool {
        self.bits.len() == other.bits.len() && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

/// Which face set of a region the perimeter is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PerimeterMode {
    /// Faces with at least one incident cell in the region: `P(A, Ω̄)`.
    Closure,
    /// Faces with both incident cells in the region: `P(A, Ω)`.
    Interior,
}

/// A cell mask `Ω` together with its derived face sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    mask: CellSet,
}

impl Region {
    pub fn all(domain: &GridDomain) -> Self {
        Region {
            mask: CellSet::full(domain),
        }
    }

    pub fn new(mask: CellSet) -> Self {
        Region { mask }
    }

    pub fn mask(&self) -> &CellSet {
        &self.mask
    }

    pub fn domain(&self) -> &GridDomain {
        self.mask.domain()
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.mask.contains(cell)
    }

    pub fn closure_faces(&self) -> FaceSet {
        self.mask.closure_faces()
    }

    pub fn interior_faces(&self) -> FaceSet {
        self.mask.interior_faces()
    }

    pub fn faces(&self, mode: PerimeterMode) -> FaceSet {
        match mode {
            PerimeterMode::Closure => self.closure_faces(),
            PerimeterMode::Interior => self.interior_faces(),
        }
    }
}

/// Weighted count of faces in the region's face set whose two sides differ.
pub fn perimeter(a: &CellSet, region: &Region, mode: PerimeterMode) -> Result<Rational> {
    a.check(region.mask())?;
    let faces = region.faces(mode);
    let bits = a.bits();
    let count = faces
        .iter()
        .filter(|&f| {
            let (lo, hi) = a.domain().face_cells(f);
            side(bits, lo) != side(bits, hi)
        })
        .count();
    Ok(Rational::from_integer(count.into()) * a.domain().perimeter_weight())
}

/// Number of cells of `A ∩ Ω`.
pub fn volume(a: &CellSet, region: &Region) -> Result<usize> {
    Ok(a.intersection(region.mask())?.volume())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(d: &[usize]) -> GridDomain {
        GridDomain::new(d).unwrap()
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn counts_match_formulas() {
        for dims in [vec![5], vec![3, 4], vec![2, 3, 4]] {
            let g = grid(&dims);
            let cells: usize = dims.iter().product();
            let faces: usize = (0..dims.len())
                .map(|a| (dims[a] + 1) * cells / dims[a])
                .sum();
            assert_eq!(g.cell_count(), cells);
            assert_eq!(g.face_count(), faces);
            for f in g.faces() {
                let n = [g.face_cells(f).0, g.face_cells(f).1].iter().flatten().count();
                assert!(n == 1 || n == 2);
                assert_eq!(n == 1, g.is_grid_boundary(f));
                assert_eq!(g.face_id(&g.face(f)), Some(f));
            }
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridDomain::new(&[]).is_err());
        assert!(GridDomain::new(&[2, 0]).is_err());
        assert!(GridDomain::new(&[1, 1, 1, 1]).is_err());
    }

    #[test]
    fn single_cell_perimeter() {
        let g = grid(&[8, 8]);
        let a = CellSet::from_coords(&g, [&[3usize, 4][..]]).unwrap();
        assert_eq!(perimeter(&a, &Region::all(&g), PerimeterMode::Closure).unwrap(), r(4));
        assert_eq!(a.closure_faces().len(), 4);
        assert!(a.interior_faces().is_empty());
        let empty = CellSet::empty(&g);
        assert_eq!(perimeter(&empty, &Region::all(&g), PerimeterMode::Closure).unwrap(), r(0));
        assert_eq!(volume(&empty, &Region::all(&g)).unwrap(), 0);
    }

    #[test]
    fn slab_perimeter() {
        let g = grid(&[10, 5]);
        for k in 1..=8 {
            let a = CellSet::rect(&g, &[1, 2], &[1 + k, 3]).unwrap();
            assert_eq!(a.perimeter(), r(2 * k as i64 + 2));
        }
    }

    #[test]
    fn domino_faces() {
        let g = grid(&[4, 4]);
        let a = CellSet::rect(&g, &[1, 1], &[3, 2]).unwrap();
        assert_eq!(a.closure_faces().len(), 7);
        assert_eq!(a.interior_faces().len(), 1);
        let block = CellSet::rect(&g, &[1, 1], &[3, 3]).unwrap();
        assert_eq!(block.boundary_faces().len(), 8);
    }

    #[test]
    fn full_grid_faces() {
        let g = grid(&[3, 2]);
        let a = CellSet::full(&g);
        assert_eq!(a.closure_faces().len(), g.face_count());
        let two_sided = g.faces().filter(|&f| !g.is_grid_boundary(f)).count();
        assert_eq!(a.interior_faces().len(), two_sided);
    }

    #[test]
    fn boundary_faces_count_toward_perimeter() {
        let g = grid(&[3]);
        let a = CellSet::full(&g);
        assert_eq!(a.perimeter(), r(2));
        // Within-grid complements do not preserve perimeter.
        let b = CellSet::from_indices(&g, [0]).unwrap();
        assert_eq!(b.perimeter(), r(2));
        assert_eq!(b.complement().perimeter(), r(2));
        assert_eq!(CellSet::empty(&g).perimeter(), r(0));
    }

    #[test]
    fn interior_mode_ignores_region_boundary() {
        let g = grid(&[4, 4]);
        let omega = Region::new(CellSet::rect(&g, &[1, 0], &[3, 4]).unwrap());
        let a = CellSet::rect(&g, &[0, 0], &[2, 4]).unwrap();
        // Interface between columns 1 and 2 lies in the interior of Ω.
        assert_eq!(perimeter(&a, &omega, PerimeterMode::Interior).unwrap(), r(4));
        // Closure mode adds the top and bottom faces of column 1 and grid boundary faces of column 1.
        assert_eq!(perimeter(&a, &omega, PerimeterMode::Closure).unwrap(), r(6));
        assert!(omega.interior_faces().is_subset(&omega.closure_faces()));
    }

    #[test]
    fn face_addressing() {
        let g = grid(&[4, 3]);
        let f = g.face_at(1, 2, &[1]).unwrap();
        let face = g.face(f);
        assert_eq!((face.axis, face.slot(), face.transverse(2)), (1, 2, vec![1]));
        let (lo, hi) = g.face_cells(f);
        assert_eq!(lo, g.cell_index(&[1, 1]));
        assert_eq!(hi, g.cell_index(&[1, 2]));
        assert!(g.face_at(1, 4, &[0]).is_none());
        assert!(g.face_at(0, 4, &[2]).is_some());
        assert_eq!(g.cell_faces(5).len(), 4);
    }

    #[test]
    fn translation() {
        let g = grid(&[6, 6]);
        let a = CellSet::rect(&g, &[1, 1], &[3, 2]).unwrap();
        let b = a.translate(&[1, 0]).unwrap();
        assert_eq!(b.perimeter(), a.perimeter());
        assert_eq!(b.volume(), a.volume());
        assert!(a.translate(&[-2, 0]).is_err());
        assert!(a.translate(&[4, 0]).is_err());
    }

    #[test]
    fn weighted_perimeter() {
        let g = grid(&[4, 4])
            .with_perimeter_weight(Rational::new(3.into(), 2.into()))
            .unwrap();
        let a = CellSet::from_indices(&g, [5]).unwrap();
        assert_eq!(a.perimeter(), r(6));
        assert!(grid(&[2]).with_perimeter_weight(r(-1)).is_err());
    }

    #[test]
    fn mismatch_is_reported() {
        let a = CellSet::empty(&grid(&[3, 3]));
        let region = Region::all(&grid(&[3, 4]));
        assert!(matches!(
            perimeter(&a, &region, PerimeterMode::Closure),
            Err(Error::DomainMismatch)
        ));
    }
}
