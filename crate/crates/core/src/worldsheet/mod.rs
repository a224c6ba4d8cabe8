//! Nambu-Goto kinematics on a discretized closed-string tube.
//!
//! The tube is sampled on a uniform `(τ, σ)` lattice; σ is periodic. All
//! derivatives are second order.

mod deviation;
mod grid;
mod kinematics;
pub mod tubes;
mod variation;

pub use deviation::{deviation_operator, deviation_operator_with_tolerance, pairing_integral, DEVIATION_GAUGE_TOL};
pub use grid::{d2_sigma, d2_tau, d_sigma, d_tau, NodeField, WorldsheetGrid};
pub use kinematics::{
    action, area_density, constraint_residuals, currents, gauge_fixed_currents, gauge_residuals,
    geodesic_residual, geodesic_residual_full, geodesic_residual_gauge, ConstraintResiduals, CurrentField,
    GaugeResiduals, GAUGE_FAST_PATH_TOL,
};
pub use variation::{first_variation, first_variation_fd, second_variation_fd, DEFAULT_ALPHA};
