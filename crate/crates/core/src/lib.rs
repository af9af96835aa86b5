//! Metric Ehrenfeucht–Fraïssé games on finite metric structures.
//!
//! The crate is organized bottom-up:
//!
//! * [`lang`]: metric languages, moduli and finitary formulas;
//! * [`structure`]: finite structures, evaluation, homomorphisms and their
//!   distance-matrix encoding;
//! * [`clocks`]: game-clock linear orders (finite, ordinals below ω^ω, ω*);
//! * [`bnf`]: the back-and-forth pseudo-distance and its stabilization;
//! * [`game`]: the dynamic metric EF game, its solver, strategy
//!   certificates and their verification;
//! * [`proofs`]: a Hilbert-style checker for first-order theories of finite
//!   category presentations.

pub mod bnf;
pub mod clocks;
pub mod error;
pub mod game;
pub mod lang;
pub mod proofs;
pub mod rational;
pub mod report;
pub mod structure;

pub use error::{Error, Result};
pub use rational::Rational;
pub use report::ValidationReport;
pub use structure::FiniteStructure;
