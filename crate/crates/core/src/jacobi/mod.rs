//! Stringy Jacobi equation `Ä + M A = 0` and conjugate strings.
//!
//! Under the constant-shape ansatz the deviation field of a geodesic surface
//! is carried by the string center worldline. Expanding it in a parallel
//! transported transverse frame `e_i` reduces the deviation equation to an
//! ODE for `η^i(τ)` with the tidal matrix `M^i_j = R_τjτ^i − R_σjσ^i`.

mod conjugate;
mod integrate;
mod tidal;

pub use conjugate::{find_conjugate_strings, ConjugateSearch, ConjugateString, MULTIPLICITY_RTOL, ROOT_TOL};
pub use integrate::{integrate_jacobi, reconstruct_eta, wronskian_check, JacobiMatrixTrajectory, OVERFLOW_NORM};
pub use tidal::{contract_tidal, transverse_frame, TidalMatrix, TidalSource, FRAME_GRAM_DET_MIN};

use crate::error::{Error, Result};
use crate::worldsheet::{NodeField, WorldsheetGrid};

/// Chart components `η^a = η^i e_i^a` of a transverse field on every node of
/// `grid`, with `η^i(τ) = A(τ) η̇(0)` and the frame of `tidal`.
///
/// The center-column components are copied to every σ column, which is exact
/// for σ-homogeneous tubes such as the built-in equator tube.
pub fn lift_to_grid(
    grid: &WorldsheetGrid,
    traj: &JacobiMatrixTrajectory,
    eta_dot0: &[f64],
) -> Result<NodeField> {
    let frame = traj
        .tidal()
        .frame()
        .ok_or_else(|| Error::InvalidArgument("lifting needs a chart-derived tidal matrix".into()))?;
    if frame.len() != grid.n_tau() {
        return Err(Error::GridMismatch("frame and grid have different τ samples".into()));
    }
    let v = nalgebra::DVector::from_column_slice(eta_dot0);
    if v.len() != traj.transverse_dim() {
        return Err(Error::DimensionMismatch {
            expected: traj.transverse_dim(),
            found: v.len(),
        });
    }
    let mut out = grid.zero_field();
    for k in 0..grid.n_tau() {
        let eta_i = traj.state_at(grid.taus()[k]).0 * &v;
        let mut comps = vec![0.0; grid.dim()];
        for (i, leg) in frame.frames[k].iter().enumerate() {
            for (c, e) in comps.iter_mut().zip(leg) {
                *c += eta_i[i] * e;
            }
        }
        for j in 0..grid.n_sigma() {
            out.set(k, j, &comps);
        }
    }
    Ok(out)
}
