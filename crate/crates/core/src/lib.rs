//! Cellular-automaton pseudorandom generation workbench.
//!
//! Elementary CA simulation, toggle-rule inversion and seed recovery, GF(2)
//! analysis of affine CA, finite state cellular automata with a 3-SAT
//! compiler, the Chasm generator and a small statistical test harness.

pub mod bits;
pub mod ca;
pub mod chasm;
pub mod error;
pub mod fsca;
pub mod gf2;
pub mod invert;
pub mod linear;
pub mod recover;
pub mod sat;
pub mod stats;

pub use bits::{BitVector, StateVector};
pub use ca::{apply_rule, classify_rule, evolve, step, temporal_sequence, Boundary, Rule, RuleClass, RuleVector, TemporalSequence};
pub use error::{Error, Result};
