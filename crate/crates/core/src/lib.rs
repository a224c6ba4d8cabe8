//! Numerical Morse theory for closed strings.
//!
//! The crate integrates the Nambu-Goto geodesic-surface equation on a
//! discretized tube, solves the stringy Jacobi (geodesic-surface deviation)
//! equation, locates conjugate strings by tracking `det A`, and evaluates the
//! index form of piecewise-smooth variation fields with breaks.
//!
//! - [`manifold`]: charts, Christoffel symbols, Riemann tensor, parallel transport.
//! - [`worldsheet`]: area density, action, currents, residuals, deviation operator.
//! - [`evolution`]: leapfrog evolution of the gauge-fixed string equation.
//! - [`jacobi`]: tidal matrix, `A(τ)` trajectories, conjugate strings.
//! - [`indexform`]: index form, breaks, positivity certificate, negative mode.
//! - [`acceptance`]: the end-to-end check suite shared by tests and the CLI.

pub mod acceptance;
pub mod error;
pub mod evolution;
pub mod indexform;
pub mod jacobi;
pub mod manifold;
pub mod worldsheet;

pub use error::{Error, Result};
