//! Simulation toolkit for optimal quantum cloning, stimulated-emission
//! dynamics, no-signaling bounds, and single-particle contextuality tests.
//!
//! The crate is organized around a few small engines:
//!
//! - [`qubit`]: dense kets, density matrices, partial traces, and
//!   symmetric-subspace projectors for registers of a few qubits.
//! - [`cloning`]: the optimal universal cloning transformations on qubit
//!   registers and their fidelity formulas.
//! - [`fock`]: a sparse multimode bosonic Fock-space engine with monomial
//!   Hamiltonians, conserved-charge block decomposition, and time evolution.
//! - [`stimulated`]: the three-level-atom cloner in its exact ladder basis and
//!   the analytic pair-source cloner with post-selection.
//! - [`vatom`]: numerical study of V-configuration atoms as universal but
//!   suboptimal cloners.
//! - [`bounds`]: cloning bounds derived from linearity and positivity alone,
//!   remote preparation of arbitrary mixtures, and CP-map linearity checks.
//! - [`ks`]: the path/spin contextuality experiment, triad coloring search,
//!   and finite-precision hidden-variable inequalities.
//!
//! All state types are immutable values; operations are pure functions, so
//! parameter sweeps can run in parallel without shared mutable state.

pub mod bounds;
pub mod cloning;
pub mod fock;
pub mod ks;
pub mod linprog;
pub mod math;
pub mod qubit;
pub mod sampling;
pub mod stimulated;
pub mod vatom;

pub use qubit::{BlochVector, DensityMatrix, Ket, SymmetricProjector};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;
