//! Quantum-like representation of statistical data from two trichotomous
//! observables.
//!
//! Context data (priors, single and pair conditionals) determines nine real
//! coefficients of interference. When their magnitudes all stay within 1 the
//! data may admit a complex amplitude representation; when they all exceed 1,
//! a hyperbolic (split-complex) one. [`qlra::represent`] solves the nonlinear
//! phase constraints and checks unitarity of the induced transition matrix;
//! [`basis_family`] provides a constructive family of admissible instances
//! with closed-form probabilities, used both as a generator and as the oracle
//! cross-check for everything else.

#![allow(clippy::needless_range_loop)]

pub mod basis_family;
pub mod context_data;
pub mod interference;
pub mod qlra;
pub mod scalars;

pub use context_data::{validate, ContextData, QuantumSide, ValidationReport};
pub use interference::{table, InterferenceClass, InterferenceTable};
pub use qlra::{represent, AnyRepresentation, RepresentError, Tolerances};
pub use scalars::{ComplexNumber, Field, HyperbolicNumber, PhaseFactor, Sign};
