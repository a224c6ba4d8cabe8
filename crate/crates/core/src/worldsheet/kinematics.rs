use nalgebra::DMatrix;

use super::grid::{d2_sigma, d2_tau, d_sigma, d_tau, NodeField, WorldsheetGrid};
use crate::error::{Error, Result};
use crate::manifold::{christoffel_at, inner_with, metric_at};

/// Gauge residual below which [`geodesic_residual`] takes the gauge-fixed path.
pub const GAUGE_FAST_PATH_TOL: f64 = 1e-6;

pub(crate) struct NodeKinematics {
    pub g: DMatrix<f64>,
    pub xi: Vec<f64>,
    pub zeta: Vec<f64>,
    pub xx: f64,
    pub xz: f64,
    pub zz: f64,
}

impl NodeKinematics {
    /// `(ξ·ζ)² − (ξ·ξ)(ζ·ζ)`
    pub fn discriminant(&self) -> f64 {
        self.xz * self.xz - self.xx * self.zz
    }
}

pub(crate) fn node_kinematics(grid: &WorldsheetGrid, k: usize, j: usize) -> Result<NodeKinematics> {
    let g = metric_at(grid.chart(), grid.point(k, j))?;
    let xi = grid.xi(k, j);
    let zeta = grid.zeta(k, j);
    let xx = inner_with(&g, &xi, &xi);
    let xz = inner_with(&g, &xi, &zeta);
    let zz = inner_with(&g, &zeta, &zeta);
    Ok(NodeKinematics {
        g,
        xi,
        zeta,
        xx,
        xz,
        zz,
    })
}

fn positive_density(kin: &NodeKinematics, k: usize, j: usize) -> Result<f64> {
    let disc = kin.discriminant();
    if !(disc > 0.0) {
        return Err(Error::DegenerateTube {
            tau_index: k,
            sigma_index: j,
            discriminant: disc,
        });
    }
    Ok(disc.sqrt())
}

/// `f = [(ξ·ζ)² − (ξ·ξ)(ζ·ζ)]^{1/2}` at every node.
pub fn area_density(grid: &WorldsheetGrid) -> Result<NodeField> {
    let mut f = NodeField::zeros(grid.n_tau(), grid.n_sigma(), 1);
    for k in 0..grid.n_tau() {
        for j in 0..grid.n_sigma() {
            let kin = node_kinematics(grid, k, j)?;
            f.get_mut(k, j)[0] = positive_density(&kin, k, j)?;
        }
    }
    Ok(f)
}

/// Nambu-Goto action `S = −∫∫ f dτ dσ`.
pub fn action(grid: &WorldsheetGrid) -> Result<f64> {
    Ok(-grid.integrate(&area_density(grid)?))
}

/// World-sheet currents `P_τ`, `P_σ`.
#[derive(Debug, Clone)]
pub struct CurrentField {
    pub p_tau: NodeField,
    pub p_sigma: NodeField,
}

/// `P_τ = [(ξ·ζ)ζ − (ζ·ζ)ξ]/f`, `P_σ = [(ξ·ζ)ξ − (ξ·ξ)ζ]/f`.
pub fn currents(grid: &WorldsheetGrid) -> Result<CurrentField> {
    let n = grid.dim();
    let mut p_tau = grid.zero_field();
    let mut p_sigma = grid.zero_field();
    for k in 0..grid.n_tau() {
        for j in 0..grid.n_sigma() {
            let kin = node_kinematics(grid, k, j)?;
            let f = positive_density(&kin, k, j)?;
            let pt = p_tau.get_mut(k, j);
            for a in 0..n {
                pt[a] = (kin.xz * kin.zeta[a] - kin.zz * kin.xi[a]) / f;
            }
            let ps = p_sigma.get_mut(k, j);
            for a in 0..n {
                ps[a] = (kin.xz * kin.xi[a] - kin.xx * kin.zeta[a]) / f;
            }
        }
    }
    Ok(CurrentField { p_tau, p_sigma })
}

/// Orthonormal-gauge currents `P_τ = −ξ`, `P_σ = ζ`.
pub fn gauge_fixed_currents(grid: &WorldsheetGrid) -> CurrentField {
    let mut p_tau = grid.zero_field();
    let mut p_sigma = grid.zero_field();
    for k in 0..grid.n_tau() {
        for j in 0..grid.n_sigma() {
            let xi: Vec<f64> = grid.xi(k, j).into_iter().map(|v| -v).collect();
            p_tau.set(k, j, &xi);
            p_sigma.set(k, j, &grid.zeta(k, j));
        }
    }
    CurrentField { p_tau, p_sigma }
}

/// The four constraint identities evaluated nodewise.
#[derive(Debug, Clone)]
pub struct ConstraintResiduals {
    /// `P_τ·ζ`
    pub p_tau_zeta: NodeField,
    /// `P_τ·P_τ + ζ·ζ`
    pub p_tau_norm: NodeField,
    /// `P_σ·ξ`
    pub p_sigma_xi: NodeField,
    /// `P_σ·P_σ + ξ·ξ`
    pub p_sigma_norm: NodeField,
}

impl ConstraintResiduals {
    pub fn max_abs(&self) -> [f64; 4] {
        [
            self.p_tau_zeta.max_abs(),
            self.p_tau_norm.max_abs(),
            self.p_sigma_xi.max_abs(),
            self.p_sigma_norm.max_abs(),
        ]
    }

    pub fn max(&self) -> f64 {
        self.max_abs().into_iter().fold(0.0, f64::max)
    }
}

pub fn constraint_residuals(grid: &WorldsheetGrid, cur: &CurrentField) -> Result<ConstraintResiduals> {
    let shape = || NodeField::zeros(grid.n_tau(), grid.n_sigma(), 1);
    let (mut a, mut b, mut c, mut d) = (shape(), shape(), shape(), shape());
    for k in 0..grid.n_tau() {
        for j in 0..grid.n_sigma() {
            let kin = node_kinematics(grid, k, j)?;
            let pt = cur.p_tau.get(k, j);
            let ps = cur.p_sigma.get(k, j);
            a.get_mut(k, j)[0] = inner_with(&kin.g, pt, &kin.zeta);
            b.get_mut(k, j)[0] = inner_with(&kin.g, pt, pt) + kin.zz;
            c.get_mut(k, j)[0] = inner_with(&kin.g, ps, &kin.xi);
            d.get_mut(k, j)[0] = inner_with(&kin.g, ps, ps) + kin.xx;
        }
    }
    Ok(ConstraintResiduals {
        p_tau_zeta: a,
        p_tau_norm: b,
        p_sigma_xi: c,
        p_sigma_norm: d,
    })
}

/// Orthonormal-gauge conditions evaluated nodewise.
#[derive(Debug, Clone)]
pub struct GaugeResiduals {
    /// `ξ·ζ`
    pub xi_zeta: NodeField,
    /// `ξ·ξ + ζ·ζ`
    pub norm_sum: NodeField,
}

impl GaugeResiduals {
    pub fn max(&self) -> f64 {
        self.xi_zeta.max_abs().max(self.norm_sum.max_abs())
    }
}

pub fn gauge_residuals(grid: &WorldsheetGrid) -> Result<GaugeResiduals> {
    let mut xi_zeta = NodeField::zeros(grid.n_tau(), grid.n_sigma(), 1);
    let mut norm_sum = xi_zeta.clone();
    for k in 0..grid.n_tau() {
        for j in 0..grid.n_sigma() {
            let kin = node_kinematics(grid, k, j)?;
            xi_zeta.get_mut(k, j)[0] = kin.xz;
            norm_sum.get_mut(k, j)[0] = kin.xx + kin.zz;
        }
    }
    Ok(GaugeResiduals { xi_zeta, norm_sum })
}

/// Residual of the geodesic-surface equation. Uses the gauge-fixed form when
/// the grid is in orthonormal gauge to within [`GAUGE_FAST_PATH_TOL`],
/// otherwise the general form built from the currents.
pub fn geodesic_residual(grid: &WorldsheetGrid) -> Result<NodeField> {
    if gauge_residuals(grid)?.max() <= GAUGE_FAST_PATH_TOL {
        geodesic_residual_gauge(grid)
    } else {
        geodesic_residual_full(grid)
    }
}

/// `ξ^a ∇_a P_τ^b + ζ^a ∇_a P_σ^b` nodewise.
pub fn geodesic_residual_full(grid: &WorldsheetGrid) -> Result<NodeField> {
    let cur = currents(grid)?;
    let n = grid.dim();
    let mut out = grid.zero_field();
    for k in 0..grid.n_tau() {
        for j in 0..grid.n_sigma() {
            let gamma = christoffel_at(grid.chart(), grid.point(k, j))?;
            let xi = grid.xi(k, j);
            let zeta = grid.zeta(k, j);
            let dpt = d_tau(&cur.p_tau, grid.dtau(), k, j);
            let dps = d_sigma(&cur.p_sigma, grid.dsigma(), k, j, None);
            let gt = gamma.contract(&xi, cur.p_tau.get(k, j));
            let gs = gamma.contract(&zeta, cur.p_sigma.get(k, j));
            let r = out.get_mut(k, j);
            for b in 0..n {
                r[b] = dpt[b] + gt[b] + dps[b] + gs[b];
            }
        }
    }
    Ok(out)
}

/// `−ξ^a ∇_a ξ^b + ζ^a ∇_a ζ^b` nodewise.
pub fn geodesic_residual_gauge(grid: &WorldsheetGrid) -> Result<NodeField> {
    let n = grid.dim();
    let mut out = grid.zero_field();
    for k in 0..grid.n_tau() {
        for j in 0..grid.n_sigma() {
            let gamma = christoffel_at(grid.chart(), grid.point(k, j))?;
            let xi = grid.xi(k, j);
            let zeta = grid.zeta(k, j);
            let acc_tau = d2_tau(grid.points(), grid.dtau(), k, j);
            let acc_sigma = d2_sigma(grid.points(), grid.dsigma(), k, j, Some(grid.winding()));
            let gxx = gamma.contract(&xi, &xi);
            let gzz = gamma.contract(&zeta, &zeta);
            let r = out.get_mut(k, j);
            for b in 0..n {
                r[b] = -(acc_tau[b] + gxx[b]) + (acc_sigma[b] + gzz[b]);
            }
        }
    }
    Ok(out)
}
