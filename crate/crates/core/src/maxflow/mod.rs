//! Exact max-flow/min-cut and graph-cut minimization of submodular energies.

mod condition;
mod network;
mod reduction;
mod sweep;

pub use condition::{branches, canonical_before, minimize_conditioned, violation_cover};
pub use network::{max_flow, Arc, CutResult, FlowNetwork};
pub use reduction::{build_network, minimize, minimize_both, CutNetwork, MinCut};
pub use sweep::{default_range, full_sweep, parametric_sweep, sweep_sets, SweepPoint};
