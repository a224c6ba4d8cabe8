use super::grid::{NodeField, WorldsheetGrid};
use super::kinematics::{action, geodesic_residual_full};
use super::deviation::pairing_integral;
use crate::error::{Error, Result};

/// Default displacement used by the finite-difference variations.
pub const DEFAULT_ALPHA: f64 = 1e-3;

fn perturbed(grid: &WorldsheetGrid, eta: &NodeField, alpha: f64) -> Result<WorldsheetGrid> {
    grid.with_points(grid.points().axpy(alpha, eta)?)
}

fn check_variation(grid: &WorldsheetGrid, eta: &NodeField) -> Result<()> {
    if !eta.same_shape(&grid.zero_field()) {
        return Err(Error::GridMismatch("eta does not match the worldsheet grid".into()));
    }
    let scale = eta.max_abs().max(1e-300);
    let ends = eta.row_max_norm(0).max(eta.row_max_norm(grid.n_tau() - 1));
    if ends > 1e-12 * scale {
        return Err(Error::EndpointNonzero { magnitude: ends });
    }
    Ok(())
}

/// Central-difference estimate `[S(α) − 2S(0) + S(−α)] / α²` of the second
/// variation along `X_α = X + α η` (chart coordinates). `η` must vanish at
/// both τ ends; σ-periodicity is built into the grid.
pub fn second_variation_fd(grid: &WorldsheetGrid, eta: &NodeField, alpha: f64) -> Result<f64> {
    check_variation(grid, eta)?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    if eta.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let s0 = action(grid)?;
    let sp = action(&perturbed(grid, eta, alpha)?)?;
    let sm = action(&perturbed(grid, eta, -alpha)?)?;
    Ok((sp - 2.0 * s0 + sm) / (alpha * alpha))
}

/// Central-difference estimate `[S(α) − S(−α)] / 2α` of the first variation.
pub fn first_variation_fd(grid: &WorldsheetGrid, eta: &NodeField, alpha: f64) -> Result<f64> {
    check_variation(grid, eta)?;
    let sp = action(&perturbed(grid, eta, alpha)?)?;
    let sm = action(&perturbed(grid, eta, -alpha)?)?;
    Ok((sp - sm) / (2.0 * alpha))
}

/// Bulk term of the first variation, `∫∫ η_b (ξ^a∇_a P_τ^b + ζ^a∇_a P_σ^b)`.
/// The boundary terms drop out for endpoint-vanishing, σ-periodic `η`.
pub fn first_variation(grid: &WorldsheetGrid, eta: &NodeField) -> Result<f64> {
    check_variation(grid, eta)?;
    let residual = geodesic_residual_full(grid)?;
    pairing_integral(grid, eta, &residual)
}
