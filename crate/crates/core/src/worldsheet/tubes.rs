//! Closed-form tubes used by tests, scenarios and the acceptance suite.

use std::f64::consts::{FRAC_PI_2, TAU};

use super::grid::WorldsheetGrid;
use crate::error::Result;
use crate::manifold::{ConstantCurvatureSpec, MetricChart};

/// Static circle `X = (τ, R cos σ, R sin σ, 0)` in 4D Minkowski space.
///
/// In orthonormal gauge only for `R = 1`, and not a geodesic surface for any
/// `R`: a static loop contracts under the string equation.
pub fn static_cylinder(radius: f64, t_end: f64, n_tau: usize, n_sigma: usize) -> Result<WorldsheetGrid> {
    WorldsheetGrid::from_fn(
        MetricChart::minkowski(4),
        t_end,
        n_tau,
        n_sigma,
        vec![0.0; 4],
        move |tau, s| vec![tau, radius * s.cos(), radius * s.sin(), 0.0],
    )
}

/// Straight string `X = (Lτ, Lσ, 0, 0)` wound once around an `x`-period of
/// length `2πL`. A flat geodesic surface in orthonormal gauge for `L = 1`.
pub fn straight_string(length: f64, t_end: f64, n_tau: usize, n_sigma: usize) -> Result<WorldsheetGrid> {
    WorldsheetGrid::from_fn(
        MetricChart::minkowski(4),
        t_end,
        n_tau,
        n_sigma,
        vec![0.0, TAU * length, 0.0, 0.0],
        move |tau, s| vec![length * tau, length * s, 0.0, 0.0],
    )
}

/// Flat oscillating ring `X = (Rτ, R cos τ cos σ, R cos τ sin σ, 0)`.
///
/// Exact solution in orthonormal gauge; the loop collapses to a point at
/// `τ = π/2`.
pub fn breathing_ring(radius: f64, t_end: f64, n_tau: usize, n_sigma: usize) -> Result<WorldsheetGrid> {
    WorldsheetGrid::from_fn(
        MetricChart::minkowski(4),
        t_end,
        n_tau,
        n_sigma,
        vec![0.0; 4],
        move |tau, s| {
            let rho = radius * tau.cos();
            vec![radius * tau, rho * s.cos(), rho * s.sin(), 0.0]
        },
    )
}

/// Static great circle `X = (rτ, π/2, σ)` on `ℝ × S²` of curvature `K`,
/// `r = 1/√K`. In orthonormal gauge and a geodesic surface.
pub fn equator_tube(curvature: f64, t_end: f64, n_tau: usize, n_sigma: usize) -> Result<WorldsheetGrid> {
    latitude_tube(curvature, FRAC_PI_2, t_end, n_tau, n_sigma)
}

/// Static circle at polar angle `θ₀` on `ℝ × S²`, `X = (r sin θ₀ τ, θ₀, σ)`.
/// In orthonormal gauge; a geodesic surface only at the equator.
pub fn latitude_tube(
    curvature: f64,
    theta0: f64,
    t_end: f64,
    n_tau: usize,
    n_sigma: usize,
) -> Result<WorldsheetGrid> {
    let chart = ConstantCurvatureSpec::product_time_sphere(3, curvature).build()?;
    let speed = theta0.sin() / curvature.sqrt();
    WorldsheetGrid::from_fn(chart, t_end, n_tau, n_sigma, vec![0.0, 0.0, TAU], move |tau, s| {
        vec![speed * tau, theta0, s]
    })
}
