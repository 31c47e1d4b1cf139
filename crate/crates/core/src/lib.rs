//! Correlation polytopes of multipartite Bell scenarios with binary inputs and
//! outputs.
//!
//! The crate is `no_std` (with `alloc`). It covers:
//!
//! * [`behavior`] / [`correlators`]: conditional probability tables, their
//!   correlator coordinates, white-noise mixing and no-signaling checks;
//! * [`vertices`]: exact extreme points of local, biseparable (signaling,
//!   one-way signaling, non-signaling) and hull models;
//! * [`catalog`]: named inequalities (CHSH, Svetlichny, four-party families);
//! * [`lp`]: simplex-based membership, visibility and vertex maximization;
//! * [`polytope`]: symmetrization, double description and canonical forms of
//!   Bell-like inequalities under relabelings;
//! * [`quantum`]: qubit behaviors from explicit states and observables, and a
//!   see-saw maximizer.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod behavior;
pub mod catalog;
pub mod correlators;
pub mod error;
pub mod inequality;
pub mod lp;
pub mod model;
pub mod point;
pub mod polytope;
pub mod quantum;
pub mod scalar;
pub mod scenario;
pub mod vertices;

pub use behavior::{Behavior, NoiseModel};
pub use correlators::{CorrelatorVector, Pattern, Slot};
pub use error::{Error, Result};
pub use inequality::{BellInequality, Space};
pub use model::{ModelKind, ModelSpec, PairDirection};
pub use point::ExactPoint;
pub use scalar::{Rational, Scalar};
pub use scenario::Scenario;
pub use vertices::VertexSet;
