//! Flux fields `σ` with `div σ = μ` and `|σ| ≤ C`, or a violating set.
//!
//! Network: the source feeds every face node with its face weight and every
//! cell node with its cell weight. Each face node is joined to each incident
//! cell by arcs of capacity `C` in both directions; a grid-boundary face also
//! drains to the sink (the exterior) with capacity `C`. A face carries two
//! one-sided flux values, lower and upper, both oriented along `+axis`; their
//! jump equals the face weight.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::grid::{CellSet, FaceId};
use crate::maxflow::{max_flow, FlowNetwork};
use crate::measure::MeasureData;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceFlux {
    pub face: FaceId,
    pub axis: usize,
    pub slot: usize,
    pub at: Vec<usize>,
    /// Flux along `+axis` on the lower side of the face.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub lower: Rational,
    /// Flux along `+axis` on the upper side.
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub upper: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceCertificate {
    #[serde(serialize_with = "crate::io::ser_rational")]
    pub c: Rational,
    pub sigma: Vec<FaceFlux>,
    /// `div σ − h` per cell; all zero for a valid certificate.
    #[serde(skip)]
    pub residual: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct Infeasibility {
    /// Cells on the source side of the minimum cut.
    pub witness: CellSet,
    /// `μ(witness⁺) − C·P(witness)`.
    pub excess: Rational,
    /// Faces heavier than `2C`; no field bounded by `C` can jump across them.
    pub heavy_faces: Vec<FaceId>,
    pub routed: Rational,
    pub supply: Rational,
}

#[derive(Clone, Debug)]
pub enum DivergenceOutcome {
    Feasible(DivergenceCertificate),
    Infeasible(Infeasibility),
}

impl DivergenceOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, DivergenceOutcome::Feasible(_))
    }
}

fn lcm_of<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    values.fold(BigInt::one(), |l, r| l.lcm(r.denom()))
}

/// Routes `μ` to the exterior through faces of capacity `C`.
pub fn divergence_certificate(mu: &MeasureData, c: &Rational) -> Result<DivergenceOutcome> {
    let domain = mu.domain();
    let n = domain.cell_count();
    let nf = domain.face_count();
    let weights: Vec<&Rational> = mu.cell_weights().map(|(_, w)| w).chain(mu.face_weights().map(|(_, w)| w)).collect();
    let scale = lcm_of(weights.into_iter().chain(std::iter::once(c)));
    let int = |r: &Rational| (r * Rational::from_integer(scale.clone())).to_integer();
    let cap_c = int(c);
    let (source, sink) = (0, 1);
    let cell_node = |k: usize| 2 + k;
    let face_node = |f: FaceId| 2 + n + f.0;
    let mut net = FlowNetwork::new(2 + n + nf, source, sink)?;
    let mut supply = BigInt::zero();
    for (k, w) in mu.cell_weights() {
        net.add_arc(source, cell_node(k), int(w))?;
        supply += int(w);
    }
    for (f, w) in mu.face_weights() {
        net.add_arc(source, face_node(f), int(w))?;
        supply += int(w);
    }
    // per face: arcs (lower→face, face→lower, upper→face, face→upper, face→sink)
    let mut arcs: Vec<[Option<usize>; 5]> = Vec::with_capacity(nf);
    for f in domain.faces() {
        let (lo, hi) = domain.face_cells(f);
        let fnode = face_node(f);
        let mut slots = [None; 5];
        if let Some(i) = lo {
            slots[0] = Some(net.add_arc(cell_node(i), fnode, cap_c.clone())?);
            slots[1] = Some(net.add_arc(fnode, cell_node(i), cap_c.clone())?);
        }
        if let Some(j) = hi {
            slots[2] = Some(net.add_arc(cell_node(j), fnode, cap_c.clone())?);
            slots[3] = Some(net.add_arc(fnode, cell_node(j), cap_c.clone())?);
        }
        if lo.is_none() || hi.is_none() {
            slots[4] = Some(net.add_arc(fnode, sink, cap_c.clone())?);
        }
        arcs.push(slots);
    }
    let cut = max_flow(&net)?;
    let to_rat = |v: &BigInt| Rational::new(v.clone(), scale.clone());
    if cut.value < supply {
        let bits = (0..n).map(|k| cut.source_side[cell_node(k)]).collect();
        let witness = CellSet::from_bits(domain, bits)?;
        let excess = mu.mass_on_closure(&witness)? - c * witness.perimeter();
        let two_c = c * Rational::from_integer(2.into());
        let heavy_faces = mu.face_weights().filter(|(_, w)| **w > two_c).map(|(f, _)| f).collect();
        return Ok(DivergenceOutcome::Infeasible(Infeasibility {
            witness,
            excess,
            heavy_faces,
            routed: to_rat(&cut.value),
            supply: to_rat(&supply),
        }));
    }
    let flow = |a: Option<usize>| a.map_or(BigInt::zero(), |k| cut.flows[k].clone());
    let sigma: Vec<FaceFlux> = domain
        .faces()
        .zip(&arcs)
        .map(|(f, s)| {
            let (lo, _) = domain.face_cells(f);
            let out = flow(s[4]);
            let (lower, upper) = if lo.is_none() {
                (-out, flow(s[3]) - flow(s[2]))
            } else if s[2].is_none() {
                (flow(s[0]) - flow(s[1]), out)
            } else {
                (flow(s[0]) - flow(s[1]), flow(s[3]) - flow(s[2]))
            };
            let face = domain.face(f);
            FaceFlux {
                face: f,
                axis: face.axis,
                slot: face.slot(),
                at: face.transverse(domain.ndim()),
                lower: to_rat(&lower),
                upper: to_rat(&upper),
            }
        })
        .collect();
    let mut cert = DivergenceCertificate {
        c: c.clone(),
        sigma,
        residual: Vec::new(),
    };
    cert.residual = residuals(mu, &cert);
    assert!(verify_certificate(mu, &cert), "flow does not certify the measure");
    Ok(DivergenceOutcome::Feasible(cert))
}

/// `div σ − h` at every cell.
fn residuals(mu: &MeasureData, cert: &DivergenceCertificate) -> Vec<Rational> {
    let domain = mu.domain();
    let mut div = vec![Rational::zero(); domain.cell_count()];
    for s in &cert.sigma {
        let (lo, hi) = domain.face_cells(s.face);
        if let Some(i) = lo {
            div[i] += &s.lower;
        }
        if let Some(j) = hi {
            div[j] -= &s.upper;
        }
    }
    for (k, w) in mu.cell_weights() {
        div[k] -= w;
    }
    div
}

/// Independent check: jumps equal face weights, cell divergence equals cell
/// weights, every value bounded by `C`.
pub fn verify_certificate(mu: &MeasureData, cert: &DivergenceCertificate) -> bool {
    let domain = mu.domain();
    if cert.sigma.len() != domain.face_count() {
        return false;
    }
    let bounded = cert
        .sigma
        .iter()
        .all(|s| s.lower.abs() <= cert.c && s.upper.abs() <= cert.c);
    let jumps = cert
        .sigma
        .iter()
        .all(|s| &s.upper - &s.lower == mu.face_weight(s.face));
    bounded && jumps && residuals(mu, cert).iter().all(|r| r.is_zero())
}
