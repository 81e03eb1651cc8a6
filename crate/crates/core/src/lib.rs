//! Numerical laboratory for quantum-state transfer of `n`-qubit pure states
//! through parallel, independent U(1)-symmetric amplitude-damping channels.
//!
//! The crate pairs closed-form average fidelities (single-qubit, Haar, fixed
//! entanglement, three-qubit classes, named four-qubit states) with seeded
//! Monte-Carlo estimators that act as independent oracles for each formula.
//!
//! Module map:
//!
//! - [`qstate`]: dense pure states and density matrices, partial trace.
//! - [`channel`]: the single-qubit superoperator, its parallel composition and
//!   an XX-chain transition-amplitude provider.
//! - [`fidelity`]: closed-form fidelities and reduction factors.
//! - [`entanglement`]: concurrence, tangles, canonical three-qubit states and
//!   their invariant polynomials.
//! - [`classes`]: three-qubit class taxonomy, class samplers, named
//!   four-qubit states.
//! - [`montecarlo`]: Haar sampling and reproducible parallel estimators.
//! - [`cli`]: sweep, verify, classify and channel commands behind the binary.

pub mod channel;
pub mod classes;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod fidelity;
pub mod io;
pub mod montecarlo;
pub mod qstate;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
