//! Kochen-Specker sets for a single qubit built from generalized
//! measurements.
//!
//! The crate constructs rank-one qubit POVMs from polytope direction sets,
//! checks them with exact arithmetic in `Q(√D)`, decides whether an
//! effect/context scenario admits a noncontextual yes/no assignment, and
//! simulates the measurements through their Neumark dilation.
//!
//! ```
//! use qubitks_core::contextuality::{parity_certificate, search_colorings, Outcome, SearchMode};
//! use qubitks_core::scenarios::dodecahedron_scenario;
//!
//! let s = dodecahedron_scenario();
//! assert!(parity_certificate(&s).is_some());
//! let verdict = search_colorings(&s, SearchMode::CountAll);
//! assert_eq!(verdict.outcome, Outcome::Uncolorable);
//! assert_eq!(verdict.coloring_count, Some(0));
//! ```
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod contextuality;
pub mod dilation;
pub mod effects;
pub mod exactnum;
pub mod geometry;
pub mod scenarios;

pub use contextuality::{Scenario, Verdict};
pub use effects::{Effect, Povm};
pub use exactnum::{QuadNum, Rational};
pub use geometry::{Label, Vec3Q, VertexSet};
