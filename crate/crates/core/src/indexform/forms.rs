use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};

use super::field::{Side, VariationField};
use super::quad::integrate_samples;
use crate::error::{Error, Result};
use crate::jacobi::{find_conjugate_strings, JacobiMatrixTrajectory, TidalMatrix};

fn check_tidal(v: &VariationField, m: &TidalMatrix) -> Result<()> {
    if m.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: v.dim(),
        });
    }
    Ok(())
}

/// Sums `∫ f` over the smooth segments of `v`, where `f(k, start)` is the
/// integrand at node `k` seen from the segment starting at `start`.
fn segment_integral<F>(v: &VariationField, f: F) -> f64
where
    F: Fn(usize, usize) -> f64,
{
    let h = v.step();
    v.segments()
        .into_iter()
        .map(|(a, b)| {
            let samples: Vec<f64> = (a..=b).map(|k| f(k, a)).collect();
            integrate_samples(&samples, h)
        })
        .sum()
}

/// `I(V, W) = 2π ∫ (V'·W' − V·M W) dτ`, integrated per smooth segment.
pub fn index_form(v: &VariationField, w: &VariationField, m: &TidalMatrix) -> Result<f64> {
    v.check_compatible(w)?;
    check_tidal(v, m)?;
    let ms: Vec<DMatrix<f64>> = v.taus().iter().map(|&t| m.eval(t)).collect();
    // segments of the union of both break sets
    let merged = v.linear_combination(1.0, w, 0.0)?;
    let body = segment_integral(&merged, |k, start| {
        let (jv, jw) = (v.segment_jet(k, start), w.segment_jet(k, start));
        jv.d1.dot(&jw.d1) - jv.value.dot(&(&ms[k] * &jw.value))
    });
    Ok(TAU * body)
}

/// `I(V, W) = −2π ∫ V·(W'' + M W) dτ − 2π Σ V(τ_i)·ΔW'(τ_i)`, the form
/// obtained by integrating by parts on each smooth segment of `W`.
pub fn index_form_with_breaks(v: &VariationField, w: &VariationField, m: &TidalMatrix) -> Result<f64> {
    v.check_compatible(w)?;
    check_tidal(v, m)?;
    let ms: Vec<DMatrix<f64>> = v.taus().iter().map(|&t| m.eval(t)).collect();
    let merged = w.linear_combination(1.0, v, 0.0)?;
    let body = segment_integral(&merged, |k, start| {
        let jw = w.segment_jet(k, start);
        v.value(k).dot(&(&jw.d2 + &ms[k] * &jw.value))
    });
    let jumps: f64 = w
        .break_indices()
        .iter()
        .map(|&k| v.value(k).dot(&w.derivative_jump(k)))
        .sum();
    Ok(-TAU * (body + jumps))
}

/// Outcome of [`positivity_certificate`].
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityCertificate {
    /// `2π ∫ |A Ẏ|² dτ` with `Y = A⁻¹ V`.
    pub value: f64,
    /// Smallest singular value of `A` over the interior nodes.
    pub min_sigma: f64,
}

fn certificate_integrand(v: &VariationField, traj: &JacobiMatrixTrajectory, k: usize, side: Side) -> f64 {
    let tau = v.taus()[k];
    let jet = v.jet(k, side);
    if k == 0 {
        // V ~ V'(0)τ and A ~ τI, so V' − ȦA⁻¹V → 0
        return 0.0;
    }
    let (a, a_dot) = traj.state_at(tau);
    let y = a.lu().solve(&jet.value).unwrap_or_else(|| DVector::zeros(jet.value.len()));
    (&jet.d1 - a_dot * y).norm_squared()
}

/// Evaluates `I(V, V) = 2π ∫ |V' − Ȧ A⁻¹ V|² dτ`, which is manifestly
/// non-negative. `traj` must solve the Jacobi equation of `M` over at least
/// `[0, T]`. Fails if a conjugate string lies in `(0, T]`.
pub fn positivity_certificate(
    m: &TidalMatrix,
    traj: &JacobiMatrixTrajectory,
    v: &VariationField,
) -> Result<PositivityCertificate> {
    check_tidal(v, m)?;
    if traj.transverse_dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: traj.transverse_dim(),
            found: v.dim(),
        });
    }
    let t_end = v.t_end();
    if traj.t_end() < t_end * (1.0 - 1e-12) {
        return Err(Error::GridMismatch(format!(
            "Jacobi trajectory ends at {} before the field at {t_end}",
            traj.t_end()
        )));
    }
    let search = find_conjugate_strings(traj);
    if let Some(s) = search.strings.iter().find(|s| s.tau_star <= t_end * (1.0 + 1e-9)) {
        return Err(Error::ConjugateStringPresent { tau: s.tau_star });
    }
    let mut min_sigma = f64::INFINITY;
    for &t in &v.taus()[1..v.len() - 1] {
        min_sigma = min_sigma.min(traj.state_at(t).0.singular_values().min());
    }
    let body = segment_integral(v, |k, start| {
        let side = if k == start { Side::Right } else { Side::Left };
        certificate_integrand(v, traj, k, side)
    });
    Ok(PositivityCertificate {
        value: TAU * body,
        min_sigma,
    })
}

/// Per-node integrand `V'·W' − V·M W` from the right (from the left at `T`),
/// for tracing.
pub fn index_form_integrand(v: &VariationField, w: &VariationField, m: &TidalMatrix) -> Result<Vec<(f64, f64)>> {
    v.check_compatible(w)?;
    check_tidal(v, m)?;
    let last = v.len() - 1;
    Ok(v.taus()
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let side = if k == last { Side::Left } else { Side::Right };
            let (jv, jw) = (v.jet(k, side), w.jet(k, side));
            (t, jv.d1.dot(&jw.d1) - jv.value.dot(&(m.eval(t) * &jw.value)))
        })
        .collect())
}
