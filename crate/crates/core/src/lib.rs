//! Pseudospectral solver and null-form laboratory for the space-time monopole
//! equation in Lorenz gauge.
//!
//! The equation is written as the first-order system
//! `d_t u - alpha.grad u = N(u, v)`, `d_t v + alpha.grad v = N(v, u)` for the
//! pair-valued unknowns `u = (A0 + A1, phi + A2)`, `v = (A0 - A1, phi - A2)`,
//! diagonalized by the projections `M_+-` and integrated in the interaction
//! picture so the free half-wave flow is exact.

pub mod algebra;
pub mod error;
pub mod evolution;
pub mod monopole;
pub mod nullform;
pub mod projections;
pub mod spectral;

pub use error::{Error, Result};
