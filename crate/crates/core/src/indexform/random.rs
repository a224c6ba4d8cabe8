use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{Jet, Side, VariationField};
use crate::error::{Error, Result};

/// Shape of the random fields drawn by [`random_field`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomFieldSpec {
    pub t_end: f64,
    pub n_intervals: usize,
    pub dim: usize,
    /// Number of sine modes `sin(mπτ/T)`.
    pub modes: usize,
    /// Upper bound on the number of kinks.
    pub max_breaks: usize,
}

struct Kink {
    at: f64,
    coeff: Vec<f64>,
    omega: f64,
    phase: f64,
}

/// A random endpoint-vanishing field: sine modes plus kinks (tents modulated
/// by a smooth factor) at random grid nodes away from the ends. Same seed,
/// same field.
pub fn random_field(spec: &RandomFieldSpec, seed: u64) -> Result<VariationField> {
    let RandomFieldSpec {
        t_end,
        n_intervals,
        dim,
        modes,
        max_breaks,
    } = *spec;
    if dim == 0 || n_intervals < 10 {
        return Err(Error::InvalidArgument("random field needs dim ≥ 1 and at least 10 intervals".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sines: Vec<Vec<f64>> = (0..dim)
        .map(|_| (1..=modes).map(|m| rng.random_range(-1.0..1.0) / m as f64).collect())
        .collect();
    let n_breaks = if max_breaks == 0 { 0 } else { rng.random_range(0..=max_breaks) };
    // kinks stay in the middle 80% and at least 4 nodes apart
    let (lo, hi) = (n_intervals / 10 + 1, n_intervals - n_intervals / 10);
    let mut nodes: Vec<usize> = Vec::with_capacity(n_breaks);
    for _ in 0..n_breaks {
        let k = rng.random_range(lo..hi);
        if nodes.iter().all(|&b: &usize| b.abs_diff(k) >= 4) {
            nodes.push(k);
        }
    }
    nodes.sort_unstable();
    let kinks: Vec<Kink> = nodes
        .iter()
        .map(|&k| Kink {
            at: t_end * k as f64 / n_intervals as f64,
            coeff: (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
            omega: rng.random_range(0.0..3.0),
            phase: rng.random_range(0.0..2.0 * PI),
        })
        .collect();
    let breaks: Vec<f64> = kinks.iter().map(|k| k.at).collect();

    VariationField::from_jets(t_end, n_intervals, dim, &breaks, |t, side| {
        let mut jet = Jet::zeros(dim);
        for (i, coeffs) in sines.iter().enumerate() {
            for (m, c) in coeffs.iter().enumerate() {
                let w = (m + 1) as f64 * PI / t_end;
                jet.value[i] += c * (w * t).sin();
                jet.d1[i] += c * w * (w * t).cos();
                jet.d2[i] -= c * w * w * (w * t).sin();
            }
        }
        for kink in &kinks {
            let at_kink = (t - kink.at).abs() <= 1e-12 * t_end;
            let rising = if at_kink { side == Side::Left } else { t < kink.at };
            let (tent, slope) = if rising {
                (t / kink.at, 1.0 / kink.at)
            } else {
                ((t_end - t) / (t_end - kink.at), -1.0 / (t_end - kink.at))
            };
            let arg = kink.omega * t + kink.phase;
            let (g, g1, g2) = (
                1.0 + 0.5 * arg.sin(),
                0.5 * kink.omega * arg.cos(),
                -0.5 * kink.omega * kink.omega * arg.sin(),
            );
            for (i, c) in kink.coeff.iter().enumerate() {
                jet.value[i] += c * tent * g;
                jet.d1[i] += c * (slope * g + tent * g1);
                jet.d2[i] += c * (2.0 * slope * g1 + tent * g2);
            }
        }
        jet
    })
}
