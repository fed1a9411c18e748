//! Exact minimization and isoperimetric analysis of lattice perimeter
//! functionals with measure data,
//!
//! ```text
//! 𝒫[A] = P(A) + μ₊(A¹) − μ₋(A⁺)
//! ```
//!
//! on `d`-dimensional grids of unit cells (`d ≤ 3`). `A⁺` and `A¹` are the
//! closure and interior face representatives of a cell set `A`: faces with at
//! least one, respectively both, incident cells in `A`.
//!
//! The crate is organized as
//!
//! - [`grid`]: domains, cell and face sets, the crystalline perimeter;
//! - [`measure`]: nonnegative cell/face measures and their evaluation on representatives;
//! - [`energy`]: pairwise binary energies that reproduce the functional exactly;
//! - [`maxflow`]: exact max-flow/min-cut, graph-cut minimization and parametric sweeps;
//! - [`exhaustive`]: brute-force enumeration used where cuts do not apply;
//! - [`ic`]: isoperimetric excess, volume profiles, divergence certificates, capacities;
//! - [`solve`]: obstacle, Dirichlet and prescribed-volume problems;
//! - [`experiments`]: scripted scenarios producing report/series/figure artifacts;
//! - [`io`] and [`cli`]: file formats and the `perivar` command-line tool.
//!
//! All arithmetic is exact (`BigRational` weights, arbitrary-precision flows).
//!
//! ```
//! use perivar::grid::{CellSet, GridDomain};
//! use perivar::measure::{boundary_measure, SignedPair};
//! use perivar::{maxflow, rat};
//! use perivar::energy::{assemble, EnergyMode};
//!
//! let g = GridDomain::new(&[4, 4]).unwrap();
//! let k = CellSet::rect(&g, &[1, 1], &[3, 3]).unwrap();
//! let pair = SignedPair::minus_only(boundary_measure(&k, rat(2, 1)).unwrap());
//! let energy = assemble(&pair, &EnergyMode::FullSpace).unwrap();
//! let (minimizer, value) = maxflow::minimize(&energy).unwrap();
//! assert_eq!(minimizer, k);
//! assert_eq!(value, rat(-8, 1));
//! ```

pub mod cli;
pub mod energy;
pub mod error;
pub mod exhaustive;
pub mod experiments;
pub mod grid;
pub mod ic;
pub mod io;
pub mod maxflow;
pub mod measure;
pub mod solve;

pub use error::{Error, Result};

/// Exact rational weight.
pub type Rational = num_rational::BigRational;

/// `n/d` as a [`Rational`].
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Parses `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let r: Rational = s
        .parse()
        .map_err(|_| Error::Validation(format!("not a rational: {s:?}")))?;
    Ok(r)
}
