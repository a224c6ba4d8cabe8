use std::f64::consts::TAU;

use nalgebra::DVector;
use serde::Serialize;

use super::field::{break_nodes, Jet, Side, VariationField};
use super::forms::{index_form, index_form_with_breaks};
use crate::error::{Error, Result};
use crate::jacobi::{integrate_jacobi, TidalMatrix, MULTIPLICITY_RTOL};

/// Default `ε` ladder for the negative-mode construction.
pub const DEFAULT_EPS: [f64; 4] = [0.3, 0.1, 0.03, 0.01];

/// Jacobi step used when building the broken Jacobi field.
const JACOBI_DT: f64 = 1e-3;

/// `I(η_ε, η_ε)` for one `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsSample {
    pub eps: f64,
    pub index: f64,
}

/// The negative direction `η_ε = ε k + J / ε` past a conjugate string.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeMode {
    /// Conjugate string location `r`.
    pub r: f64,
    /// Unit null vector `u` of `A(r)`, largest component positive.
    pub null_vector: Vec<f64>,
    /// `ΔJ'(r) = −Ȧ(r) u`.
    pub jump: Vec<f64>,
    /// `c = k(r)·ΔJ'(r)`.
    pub c: f64,
    pub i_kk: f64,
    pub i_kj: f64,
    pub i_jj: f64,
    pub samples: Vec<EpsSample>,
    /// Intercept of the least-squares fit `I = a + b ε²`.
    pub extrapolated: f64,
    /// Slope `b` of the fit, close to `I(k, k)`.
    pub eps2_coefficient: f64,
    /// `|I(η_ε, η_ε) − extrapolated|` shrinks as `ε` decreases.
    pub monotone: bool,
}

impl NegativeMode {
    /// Value predicted for `ε → 0`: `2 I(k, J) = −4π c`.
    pub fn predicted_limit(&self) -> f64 {
        -2.0 * TAU * self.c
    }
}

fn canonical(mut u: DVector<f64>) -> DVector<f64> {
    let k = u.iamax();
    if u[k] < 0.0 {
        u = -u;
    }
    u
}

/// Broken Jacobi field `J = A(τ) u` on `[0, r]`, zero on `[r, T]`, sampled on
/// the grid of `k`. Returns the field, `u` and `ΔJ'(r)`.
pub fn broken_jacobi_field(
    m: &TidalMatrix,
    r: f64,
    like: &VariationField,
) -> Result<(VariationField, DVector<f64>, DVector<f64>)> {
    if m.dim() != like.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: like.dim(),
        });
    }
    let node = break_nodes(like.taus(), &[r])?[0];
    let r_node = like.taus()[node];
    let traj = integrate_jacobi(m, r_node, like.step().min(JACOBI_DT))?;
    let (a_r, a_dot_r) = traj.state_at(r_node);
    let svd = a_r.clone().svd(false, true);
    let v_t = svd.v_t.expect("SVD with right vectors");
    let (imin, &smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let scale = traj.max_norm().max(1.0);
    if smin > MULTIPLICITY_RTOL * scale {
        return Err(Error::NoConjugateString {
            tau: r_node,
            sigma_min: smin,
        });
    }
    let u = canonical(v_t.row(imin).transpose());
    let jump = -(&a_dot_r * &u);
    let dim = m.dim();
    let field = VariationField::from_jets(like.t_end(), like.len() - 1, dim, &[r_node], |t, side| {
        let after = t > r_node || (t == r_node && side == Side::Right);
        if after {
            return Jet::zeros(dim);
        }
        let (a, a_dot) = traj.state_at(t);
        let value = if t == r_node { DVector::zeros(dim) } else { &a * &u };
        let d1 = &a_dot * &u;
        let d2 = -(m.eval(t) * (&a * &u));
        Jet { value, d1, d2 }
    })?;
    Ok((field, u, jump))
}

/// Least-squares fit `y = a + b x` returning `(a, b)`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    ((sy - b * sx) / n, b)
}

/// Builds `η_ε = ε k + J/ε` for each `ε` in `eps` and evaluates
/// `I(η_ε, η_ε)`. `k` must not vanish at `r`, which must be a grid node.
pub fn negative_mode(m: &TidalMatrix, r: f64, k: &VariationField, eps: &[f64]) -> Result<NegativeMode> {
    if eps.len() < 2 || eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument("need at least two positive eps values".into()));
    }
    if !(r < k.t_end()) {
        return Err(Error::InvalidArgument(format!(
            "the conjugate string r = {r} must lie before T = {}",
            k.t_end()
        )));
    }
    let (j, u, jump) = broken_jacobi_field(m, r, k)?;
    let node = j.break_indices()[0];
    let c = k.value(node).dot(&jump);
    if !(c > 1e-12 * jump.norm().max(1.0) * k.value(node).norm().max(1.0)) {
        return Err(Error::NonPositiveJump { c });
    }
    let i_kk = index_form(k, k, m)?;
    let i_kj = index_form(k, &j, m)?;
    let i_jj = index_form_with_breaks(&j, &j, m)?;
    let mut samples = Vec::with_capacity(eps.len());
    for &e in eps {
        let eta = k.linear_combination(e, &j, 1.0 / e)?;
        samples.push(EpsSample {
            eps: e,
            index: index_form_with_breaks(&eta, &eta, m)?,
        });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.eps * s.eps).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.index).collect();
    let (extrapolated, eps2_coefficient) = linear_fit(&xs, &ys);
    let mut ordered = samples.clone();
    ordered.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let gap = |s: &EpsSample| (s.index - extrapolated).abs();
    let monotone = ordered.windows(2).all(|w| gap(&w[1]) <= gap(&w[0]) + 1e-12 * extrapolated.abs().max(1.0));
    Ok(NegativeMode {
        r: j.taus()[node],
        null_vector: u.iter().copied().collect(),
        jump: jump.iter().copied().collect(),
        c,
        i_kk,
        i_kj,
        i_jj,
        samples,
        extrapolated,
        eps2_coefficient,
        monotone,
    })
}
