//! Numerical toolkit for block-structured non-Hermitian Hamiltonians.
//!
//! The model is a Hilbert space split into a decaying subspace `A` (diagonal
//! complex energies `omega_n - i*Gamma_n`), a non-decaying subspace `B`
//! (Hermitian block, internal coupling `g`), and an off-diagonal coupling
//! block `C`. The crate provides:
//!
//! * [`linalg`] — self-contained dense complex linear algebra (matrix
//!   exponential, eigendecomposition, composite quadrature),
//! * [`model`] — the block system, scenarios, and initial states,
//! * [`ewa`] — the evanescent-wave effective Hamiltonian in closed form and
//!   via its defining window integrals,
//! * [`dynamics`] — state propagation and the decaying-component norm bound,
//! * [`lindblad`] — the full master-equation cross-check on `A + B + G`,
//! * [`metrics`] — the three fidelity functionals comparing exact against
//!   effective and uncoupled dynamics,
//! * [`experiments`] — scenario presets, runners, and decay-rate sweeps,
//! * [`cli`] — scenario files, CSV/JSON emission, and subcommand dispatch.
//!
//! All quantities are dimensionless multiples of the reference energy
//! `epsilon` (times in units of `1/epsilon`).

pub mod cli;
pub mod dynamics;
pub mod ewa;
pub mod experiments;
pub mod lindblad;
pub mod linalg;
pub mod metrics;
pub mod model;
