//! Exact-arithmetic toolkit for continued fractions of s-th roots and the
//! ABC equations they produce.
//!
//! The pipeline is: [`cf`] expands `k^(1/s)` with certified partial
//! quotients, [`equation`] turns each convergent `p/q` into the identity
//! `p^s = k q^s + d` and its coprime triple, [`metrics`] scores those
//! (quality, K_eps, approximation gain, power gain), [`roth`] evaluates the
//! explicit Roth / Ridout style bounds, and [`verify`] checks the
//! continued-fraction inequalities exactly over scan ranges.

pub mod arith;
pub mod cf;
pub mod equation;
mod error;
pub mod metrics;
pub mod record;
pub mod roth;
pub mod verify;

pub use error::{Error, Result};
