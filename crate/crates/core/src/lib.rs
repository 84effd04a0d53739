//! Sparse recovery with penalties built from cumulative distribution
//! functions.
//!
//! A density `f` on `[0, ∞)` with CDF `F` induces the separable penalty
//! `J(x) = Σ_j F(|x_j|)`, a smooth stand-in for the ℓ₀ count. This crate
//! provides a catalog of such penalties ([`penalties`]), an iteratively
//! reweighted ℓ1 solver whose inner weighted lasso runs on ADMM
//! ([`solvers`]), recovery diagnostics ([`analysis`]) and a seeded
//! experiment harness ([`harness`]).

pub mod analysis;
pub mod cli;
pub mod harness;
pub mod penalties;
pub mod solvers;
