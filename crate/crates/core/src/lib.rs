//! Random walks on wedges of `Z^{d+1}`.
//!
//! A wedge is the subgraph of `Z^{d+1}` whose level-`n` cross-section is the
//! box `prod [0, f_i(n)]` for weakly increasing profiles `f_i`. This crate
//! decides recurrence from the profile staircases, partitions the wedge into
//! cutset layers, computes and brackets effective resistances between the
//! origin and those layers, and estimates Green functions and collision
//! counts of random walks by simulation.

pub mod classify;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod network;
mod solver;
pub mod walker;

pub mod profile;

pub use classify::{classify, partial_sums, SeriesReport, Thresholds, Verdict};
pub use error::{Result, WedgeError};
pub use flow::{FlowAssignment, FlowBound, GSequences};
pub use geometry::{LayerSet, Vertex};
pub use network::{GreenReport, RestrictedGraph, SolveReport, DEFAULT_TOL};
pub use profile::{HSequence, Profile, ProfileDoc, ProfileFn};
pub use walker::{CollisionStats, Estimate, WalkConfig};
