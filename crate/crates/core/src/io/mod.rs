//! File formats: JSON problem files, PGM masks, SVG figures.

pub mod pgm;
pub mod problem;
pub mod svg;

use serde::Serializer;

use crate::Rational;

/// Serializes a rational as `"p/q"`, or `"p"` when integral.
pub fn ser_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn ser_opt_rational<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}
