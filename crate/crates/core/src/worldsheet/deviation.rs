use super::grid::{d2_sigma, d2_tau, d_sigma, d_tau, NodeField, WorldsheetGrid};
use super::kinematics::gauge_residuals;
use crate::error::{Error, Result};
use crate::manifold::{christoffel_at, inner_with, metric_at, riemann_at, Christoffel, CurvatureSample};

/// Gauge tolerance required by [`deviation_operator`].
pub const DEVIATION_GAUGE_TOL: f64 = 1e-6;

/// Gauge-fixed geodesic-surface deviation operator
///
/// ```text
/// (Λη)^a = −ξ^b∇_b(ξ^c∇_c η^a) + ζ^b∇_b(ζ^c∇_c η^a) − R_bcd^a (ξ^b ξ^d − ζ^b ζ^d) η^c
/// ```
///
/// evaluated nodewise with second-order stencils. The grid must be in
/// orthonormal gauge to within [`DEVIATION_GAUGE_TOL`].
pub fn deviation_operator(grid: &WorldsheetGrid, eta: &NodeField) -> Result<NodeField> {
    deviation_operator_with_tolerance(grid, eta, DEVIATION_GAUGE_TOL)
}

pub fn deviation_operator_with_tolerance(
    grid: &WorldsheetGrid,
    eta: &NodeField,
    gauge_tol: f64,
) -> Result<NodeField> {
    if !eta.same_shape(&grid.zero_field()) {
        return Err(Error::GridMismatch("eta does not match the worldsheet grid".into()));
    }
    let residual = gauge_residuals(grid)?.max();
    if residual > gauge_tol {
        return Err(Error::NotInGauge {
            residual,
            tolerance: gauge_tol,
        });
    }
    let (nt, ns, n) = (grid.n_tau(), grid.n_sigma(), grid.dim());
    let mut gammas: Vec<Christoffel> = Vec::with_capacity(nt * ns);
    let mut curvature: Vec<CurvatureSample> = Vec::with_capacity(nt * ns);
    let mut xis = Vec::with_capacity(nt * ns);
    let mut zetas = Vec::with_capacity(nt * ns);
    for k in 0..nt {
        for j in 0..ns {
            let x = grid.point(k, j);
            gammas.push(christoffel_at(grid.chart(), x)?);
            curvature.push(riemann_at(grid.chart(), x)?);
            xis.push(grid.xi(k, j));
            zetas.push(grid.zeta(k, j));
        }
    }
    let idx = |k: usize, j: usize| k * ns + j;
    let (h_tau, h_sigma) = (grid.dtau(), grid.dsigma());
    let x = grid.points();

    // ∇_ξ∇_ξη = η̈ + ∂_τ(Γ)ξη + Γ(Ẍ, η) + Γ(ξ, η̇) + Γ(ξ, η̇ + Γ(ξ, η)), and the
    // same along σ. Differentiating Γ through its own stencil keeps the
    // boundary rows second order.
    let mut out = grid.zero_field();
    for k in 0..nt {
        for j in 0..ns {
            let i = idx(k, j);
            let e = eta.get(k, j);
            let (xi, zeta) = (&xis[i], &zetas[i]);

            let tau_part = {
                let d1 = d_tau(eta, h_tau, k, j);
                let d2 = d2_tau(eta, h_tau, k, j);
                let acc = d2_tau(x, h_tau, k, j);
                let mut dgamma = vec![0.0; n];
                for (m, w) in tau_stencil(k, nt) {
                    let c = gammas[idx(m, j)].contract(xi, e);
                    for a in 0..n {
                        dgamma[a] += w / h_tau * c[a];
                    }
                }
                covariant_second(&gammas[i], xi, &acc, e, &d1, &d2, &dgamma)
            };
            let sigma_part = {
                let d1 = d_sigma(eta, h_sigma, k, j, None);
                let d2 = d2_sigma(eta, h_sigma, k, j, None);
                let acc = d2_sigma(x, h_sigma, k, j, Some(grid.winding()));
                let (jp, jm) = ((j + 1) % ns, (j + ns - 1) % ns);
                let cp = gammas[idx(k, jp)].contract(zeta, e);
                let cm = gammas[idx(k, jm)].contract(zeta, e);
                let dgamma: Vec<f64> = (0..n).map(|a| (cp[a] - cm[a]) / (2.0 * h_sigma)).collect();
                covariant_second(&gammas[i], zeta, &acc, e, &d1, &d2, &dgamma)
            };

            let r_xi = curvature[i].apply(xi, e, xi);
            let r_zeta = curvature[i].apply(zeta, e, zeta);
            let o = out.get_mut(k, j);
            for a in 0..n {
                o[a] = -tau_part[a] + sigma_part[a] - (r_xi[a] - r_zeta[a]);
            }
        }
    }
    Ok(out)
}

/// `∫∫ η_a (Λη)^a dτ dσ` with the index lowered at each node.
pub fn pairing_integral(grid: &WorldsheetGrid, eta: &NodeField, lambda_eta: &NodeField) -> Result<f64> {
    let mut s = NodeField::zeros(grid.n_tau(), grid.n_sigma(), 1);
    for k in 0..grid.n_tau() {
        for j in 0..grid.n_sigma() {
            let g = metric_at(grid.chart(), grid.point(k, j))?;
            s.get_mut(k, j)[0] = inner_with(&g, eta.get(k, j), lambda_eta.get(k, j));
        }
    }
    Ok(grid.integrate(&s))
}

/// Node offsets and weights (in units of `1/h`) of the first τ-derivative at row `k`.
fn tau_stencil(k: usize, nt: usize) -> [(usize, f64); 3] {
    let last = nt - 1;
    if k == 0 {
        [(0, -1.5), (1, 2.0), (2, -0.5)]
    } else if k == last {
        [(last, 1.5), (last - 1, -2.0), (last - 2, 0.5)]
    } else {
        [(k + 1, 0.5), (k - 1, -0.5), (k, 0.0)]
    }
}

/// `u^c∇_c(u^b∇_b η)` from the pieces `η̇`, `η̈`, `(∂Γ)(u, η)` and `∂u = acc`.
fn covariant_second(
    gamma: &Christoffel,
    u: &[f64],
    acc: &[f64],
    eta: &[f64],
    d1: &[f64],
    d2: &[f64],
    dgamma: &[f64],
) -> Vec<f64> {
    let n = u.len();
    let g_acc = gamma.contract(acc, eta);
    let g_d1 = gamma.contract(u, d1);
    let g_eta = gamma.contract(u, eta);
    let first: Vec<f64> = (0..n).map(|a| d1[a] + g_eta[a]).collect();
    let g_first = gamma.contract(u, &first);
    (0..n)
        .map(|a| d2[a] + dgamma[a] + g_acc[a] + g_d1[a] + g_first[a])
        .collect()
}
