//! Single-photon mechanical entanglement in a two-cavity optomechanical
//! system.
//!
//! Two Fabry-Perot cavities, each with one moving end mirror, exchange a
//! single photon through a hopping interaction. The radiation pressure of
//! that photon entangles the two mirrors. This crate provides:
//!
//! - [`fock`]: truncated-Fock-space linear algebra (ladder operators,
//!   tensor products, displacement operators, eigendecomposition-based
//!   propagation);
//! - [`model`]: the system Hamiltonian in the single-photon subspace, the
//!   unitary transformation chain that solves it, and an operating-regime
//!   checker;
//! - [`analytic`]: the closed-form evolved state, post-selected mechanical
//!   states, probabilities, and concurrence formulas;
//! - [`entanglement`]: partial trace, Wootters concurrence, logarithmic
//!   negativity, fidelity;
//! - [`oracle`]: brute-force numeric propagators (direct, transformation
//!   chain with and without the rotating-wave approximation) and
//!   cross-validation against the closed form.
//!
//! All public time arguments are the scaled time `tau = g_mag * t`; model
//! parameters are most conveniently built with
//! [`model::ModelParams::from_ratio`], which fixes `g_mag = 1`.
//!
//! The `parallel` feature (on by default) runs grid sweeps on a rayon
//! thread pool; without it the same entry points run sequentially.

pub mod analytic;
pub mod entanglement;
mod error;
pub mod fock;
pub mod model;
pub mod oracle;
mod par;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
