//! JSON problem files.
//!
//! ```json
//! {"grid": {"dims": [4, 4]},
//!  "region": {"all": true},
//!  "mu_minus": {"faces": [{"axis": 1, "slot": 2, "at": [0], "w": "9/4"}]},
//!  "problem": {"kind": "obstacle", "inner": {"cells": [[1, 1]]}},
//!  "options": {"exhaustive_cap": 20}}
//! ```
//!
//! Face `at` lists the coordinates along the other axes, in axis order.
//! Rationals are `"p/q"` strings or JSON integers. Unknown fields are errors.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::energy::EnergyMode;
use crate::error::{Error, Result};
use crate::grid::{CellSet, FaceId, FaceSet, GridDomain, Region};
use crate::ic::{CapacityTarget, ICVariant};
use crate::measure::{MeasureData, SignedPair};
use crate::{parse_rational, Rational};

/// A rational read from `"p/q"` or an integer, written back as a string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalValue(pub Rational);

impl Serialize for RationalValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(RationalValue(Rational::from_integer(n.into()))),
            Raw::Str(s) => parse_rational(&s)
                .map(RationalValue)
                .map_err(serde::de::Error::custom),
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perimeter_weight: Option<RationalValue>,
}

/// `{"all": true}` or `{"cells": [[i, j], ...]}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    #[serde(default, skip_serializing_if = "is_false")]
    pub all: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cells: Vec<Vec<usize>>,
}

impl SetSpec {
    pub fn all() -> Self {
        SetSpec {
            all: true,
            cells: Vec::new(),
        }
    }

    pub fn from_set(set: &CellSet) -> Self {
        let g = set.domain();
        if set.volume() == g.cell_count() && !set.is_empty() {
            return SetSpec::all();
        }
        SetSpec {
            all: false,
            cells: set.iter().map(|c| g.cell_coords(c)).collect(),
        }
    }

    pub fn resolve(&self, g: &GridDomain) -> Result<CellSet> {
        if self.all {
            if !self.cells.is_empty() {
                return Err(Error::Validation("a set is either \"all\" or a cell list, not both".into()));
            }
            return Ok(CellSet::full(g));
        }
        cells_at(g, &self.cells)
    }
}

fn cells_at(g: &GridDomain, coords: &[Vec<usize>]) -> Result<CellSet> {
    let mut set = CellSet::empty(g);
    for at in coords {
        let c = g
            .cell_index(at)
            .ok_or_else(|| Error::OutOfBounds(format!("cell {at:?} on grid {}", g.label())))?;
        set.set(c, true);
    }
    Ok(set)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellWeight {
    pub at: Vec<usize>,
    pub w: RationalValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceRef {
    pub axis: usize,
    pub slot: usize,
    #[serde(default)]
    pub at: Vec<usize>,
}

impl FaceRef {
    pub fn of(g: &GridDomain, f: FaceId) -> Self {
        let face = g.face(f);
        FaceRef {
            axis: face.axis,
            slot: face.slot(),
            at: face.transverse(g.ndim()),
        }
    }

    pub fn resolve(&self, g: &GridDomain) -> Result<FaceId> {
        if self.at.len() + 1 != g.ndim() {
            return Err(Error::Validation(format!(
                "face \"at\" needs {} coordinate(s), got {}",
                g.ndim() - 1,
                self.at.len()
            )));
        }
        g.face_at(self.axis, self.slot, &self.at).ok_or_else(|| {
            Error::OutOfBounds(format!(
                "face axis {} slot {} at {:?} on grid {}",
                self.axis,
                self.slot,
                self.at,
                g.label()
            ))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceWeight {
    pub axis: usize,
    pub slot: usize,
    #[serde(default)]
    pub at: Vec<usize>,
    pub w: RationalValue,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cells: Vec<CellWeight>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub faces: Vec<FaceWeight>,
}

impl MeasureSpec {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty() && self.faces.is_empty()
    }

    pub fn from_measure(mu: &MeasureData) -> Self {
        let g = mu.domain();
        MeasureSpec {
            cells: mu
                .cell_weights()
                .map(|(c, w)| CellWeight {
                    at: g.cell_coords(c),
                    w: RationalValue(w.clone()),
                })
                .collect(),
            faces: mu
                .face_weights()
                .map(|(f, w)| {
                    let r = FaceRef::of(g, f);
                    FaceWeight {
                        axis: r.axis,
                        slot: r.slot,
                        at: r.at,
                        w: RationalValue(w.clone()),
                    }
                })
                .collect(),
        }
    }

    pub fn resolve(&self, g: &GridDomain) -> Result<MeasureData> {
        let mut mu = MeasureData::zero(g);
        for cw in &self.cells {
            let c = g
                .cell_index(&cw.at)
                .ok_or_else(|| Error::OutOfBounds(format!("cell {:?} on grid {}", cw.at, g.label())))?;
            mu.add_cell(c, cw.w.0.clone())?;
        }
        for fw in &self.faces {
            let f = FaceRef {
                axis: fw.axis,
                slot: fw.slot,
                at: fw.at.clone(),
            }
            .resolve(g)?;
            mu.add_face(f, fw.w.0.clone())?;
        }
        Ok(mu)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantName {
    Plain,
    InteriorRep,
    Relative,
    AvoidBall,
    RelativeToBoundary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// Unconstrained; perimeter relative to the region when it is not the whole grid.
    Free {},
    /// `inner ⊆ A ⊆ outer`; `inner` defaults to empty, `outer` to the region.
    Obstacle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inner: Option<SetSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outer: Option<SetSpec>,
    },
    /// `A = a0` outside `omega`.
    Dirichlet { a0: SetSpec, omega: SetSpec },
    /// `|A| = v` inside the region; `mu_plus` must be empty.
    Volume { v: usize },
    /// Isoperimetric tests of `mu_minus`.
    Ic {
        #[serde(default = "default_variant")]
        variant: VariantName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<SetSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<usize>,
    },
    /// Cover the given cells and faces.
    Capacity {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        cells: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        faces: Vec<FaceRef>,
    },
}

fn default_variant() -> VariantName {
    VariantName::Plain
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustive_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<RationalValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_max: Option<usize>,
}

impl OptionsSpec {
    fn is_empty(&self) -> bool {
        *self == OptionsSpec::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "MeasureSpec::is_empty")]
    pub mu_plus: MeasureSpec,
    #[serde(default, skip_serializing_if = "MeasureSpec::is_empty")]
    pub mu_minus: MeasureSpec,
    pub problem: ProblemSpec,
    #[serde(default, skip_serializing_if = "OptionsSpec::is_empty")]
    pub options: OptionsSpec,
}

/// Validated problem.
#[derive(Clone, Debug)]
pub enum ProblemKind {
    Free,
    Obstacle { inner: CellSet, outer: CellSet },
    Dirichlet { a0: CellSet, omega: Region },
    Volume { v: usize },
    Ic(ICVariant),
    Capacity(CapacityTarget),
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub domain: GridDomain,
    pub region: Region,
    pub pair: SignedPair,
    pub kind: ProblemKind,
    /// Cap from the file; the command line and environment take precedence.
    pub file_cap: Option<usize>,
    /// Isoperimetric constant, default 1.
    pub c: Rational,
    pub v_max: Option<usize>,
}

impl Problem {
    /// Energy mode under which sets of this problem are evaluated.
    pub fn mode(&self) -> EnergyMode {
        match &self.kind {
            ProblemKind::Dirichlet { a0, omega } => EnergyMode::Dirichlet {
                a0: a0.clone(),
                omega: omega.clone(),
            },
            ProblemKind::Free if self.region.mask().volume() < self.domain.cell_count() => {
                EnergyMode::Relative {
                    omega: self.region.clone(),
                }
            }
            _ => EnergyMode::FullSpace,
        }
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// A file with the given data and problem.
    pub fn new(pair: &SignedPair, region: Option<&Region>, problem: ProblemSpec) -> Self {
        let g = pair.domain();
        ProblemFile {
            grid: GridSpec {
                dims: g.dims().to_vec(),
                perimeter_weight: (!num_traits::One::is_one(g.perimeter_weight()))
                    .then(|| RationalValue(g.perimeter_weight().clone())),
            },
            region: region.map(|r| SetSpec::from_set(r.mask())),
            mu_plus: MeasureSpec::from_measure(&pair.plus),
            mu_minus: MeasureSpec::from_measure(&pair.minus),
            problem,
            options: OptionsSpec::default(),
        }
    }

    pub fn domain(&self) -> Result<GridDomain> {
        let g = GridDomain::new(&self.grid.dims)?;
        match &self.grid.perimeter_weight {
            Some(p) => g.with_perimeter_weight(p.0.clone()),
            None => Ok(g),
        }
    }

    pub fn to_problem(&self) -> Result<Problem> {
        let g = self.domain()?;
        let region = Region::new(match &self.region {
            Some(s) => s.resolve(&g)?,
            None => CellSet::full(&g),
        });
        let pair = SignedPair::new(self.mu_plus.resolve(&g)?, self.mu_minus.resolve(&g)?)?;
        let kind = match &self.problem {
            ProblemSpec::Free {} => ProblemKind::Free,
            ProblemSpec::Obstacle { inner, outer } => ProblemKind::Obstacle {
                inner: match inner {
                    Some(s) => s.resolve(&g)?,
                    None => CellSet::empty(&g),
                },
                outer: match outer {
                    Some(s) => s.resolve(&g)?,
                    None => region.mask().clone(),
                },
            },
            ProblemSpec::Dirichlet { a0, omega } => ProblemKind::Dirichlet {
                a0: a0.resolve(&g)?,
                omega: Region::new(omega.resolve(&g)?),
            },
            ProblemSpec::Volume { v } => ProblemKind::Volume { v: *v },
            ProblemSpec::Ic {
                variant,
                omega,
                radius,
            } => {
                let omega = omega.as_ref().map(|s| s.resolve(&g)).transpose()?;
                let need_omega = || {
                    omega.clone().map(Region::new).ok_or_else(|| {
                        Error::Validation(format!("ic variant {variant:?} needs \"omega\""))
                    })
                };
                ProblemKind::Ic(match variant {
                    VariantName::Plain => ICVariant::Plain,
                    VariantName::InteriorRep => ICVariant::InteriorRep,
                    VariantName::Relative => ICVariant::Relative(need_omega()?),
                    VariantName::RelativeToBoundary => {
                        ICVariant::RelativePerimeterToBoundary(need_omega()?)
                    }
                    VariantName::AvoidBall => ICVariant::AvoidBall(radius.ok_or_else(|| {
                        Error::Validation("ic variant avoid_ball needs \"radius\"".into())
                    })?),
                })
            }
            ProblemSpec::Capacity { cells, faces } => {
                let ids = faces.iter().map(|f| f.resolve(&g)).collect::<Result<Vec<_>>>()?;
                ProblemKind::Capacity(CapacityTarget {
                    cells: cells_at(&g, cells)?,
                    faces: FaceSet::from_ids(&g, ids)?,
                })
            }
        };
        let c = match &self.options.c {
            Some(c) => c.0.clone(),
            None => Rational::from_integer(1.into()),
        };
        if num_traits::Signed::is_negative(&c) {
            return Err(Error::NegativeWeight(format!("constant c = {c}")));
        }
        Ok(Problem {
            domain: g,
            region,
            pair,
            kind,
            file_cap: self.options.exhaustive_cap,
            c,
            v_max: self.options.v_max,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::hyperplane_measure;
    use crate::rat;

    const OBSTACLE: &str = r#"{
        "grid": {"dims": [4, 4]},
        "region": {"all": true},
        "mu_minus": {"faces": [{"axis": 1, "slot": 2, "at": [0], "w": "9/4"},
                               {"axis": 0, "slot": 1, "at": [3], "w": 2}],
                     "cells": [{"at": [1, 1], "w": "1/3"}]},
        "problem": {"kind": "obstacle", "inner": {"cells": [[1, 1]]}},
        "options": {"exhaustive_cap": 20, "c": "3/2"}
    }"#;

    #[test]
    fn parses_and_resolves() {
        let file = ProblemFile::parse(OBSTACLE).unwrap();
        let p = file.to_problem().unwrap();
        assert_eq!(p.pair.minus.total_mass(), rat(9, 4) + rat(2, 1) + rat(1, 3));
        assert_eq!(p.file_cap, Some(20));
        assert_eq!(p.c, rat(3, 2));
        let ProblemKind::Obstacle { inner, outer } = p.kind else { panic!() };
        assert_eq!(inner.indices(), vec![p.domain.cell_index(&[1, 1]).unwrap()]);
        assert_eq!(outer.volume(), 16);
    }

    #[test]
    fn round_trip() {
        let file = ProblemFile::parse(OBSTACLE).unwrap();
        let again = ProblemFile::parse(&file.to_json().unwrap()).unwrap();
        assert_eq!(file, again);
        let a = file.to_problem().unwrap();
        let b = again.to_problem().unwrap();
        assert_eq!(a.pair, b.pair);

        let g = GridDomain::new(&[3, 2, 2]).unwrap();
        let pair = SignedPair::minus_only(hyperplane_measure(&g, 2, 1, rat(5, 3)).unwrap());
        let written = ProblemFile::new(&pair, None, ProblemSpec::Volume { v: 3 });
        let back = ProblemFile::parse(&written.to_json().unwrap()).unwrap().to_problem().unwrap();
        assert_eq!(back.pair, pair);
    }

    #[test]
    fn rejects_bad_input() {
        let unknown = OBSTACLE.replace("\"region\"", "\"regoin\"");
        assert!(matches!(ProblemFile::parse(&unknown), Err(Error::Json(_))));
        let bad_kind = r#"{"grid":{"dims":[2]},"problem":{"kind":"free","extra":1}}"#;
        assert!(ProblemFile::parse(bad_kind).is_err());
        let negative = OBSTACLE.replace("\"9/4\"", "\"-1\"");
        let p = ProblemFile::parse(&negative).unwrap().to_problem();
        assert!(matches!(p, Err(Error::NegativeWeight(_))));
        let out = OBSTACLE.replace("[[1, 1]]", "[[4, 1]]");
        assert!(matches!(
            ProblemFile::parse(&out).unwrap().to_problem(),
            Err(Error::OutOfBounds(_))
        ));
        let both = r#"{"grid":{"dims":[2]},"region":{"all":true,"cells":[[0]]},"problem":{"kind":"free"}}"#;
        assert!(ProblemFile::parse(both).unwrap().to_problem().is_err());
        let no_omega = r#"{"grid":{"dims":[2]},"problem":{"kind":"ic","variant":"relative"}}"#;
        assert!(ProblemFile::parse(no_omega).unwrap().to_problem().is_err());
    }

    #[test]
    fn free_problem_on_subregion_is_relative() {
        let text = r#"{"grid":{"dims":[3]},"region":{"cells":[[0],[1]]},"problem":{"kind":"free"}}"#;
        let p = ProblemFile::parse(text).unwrap().to_problem().unwrap();
        assert!(matches!(p.mode(), EnergyMode::Relative { .. }));
    }
}
