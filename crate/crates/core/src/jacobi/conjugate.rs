use nalgebra::DMatrix;
use serde::Serialize;

use super::integrate::JacobiMatrixTrajectory;

/// Singular values below this fraction of `max_k ‖A_k‖_F` count towards the multiplicity.
pub const MULTIPLICITY_RTOL: f64 = 1e-8;
/// Bracket width at which root refinement stops.
pub const ROOT_TOL: f64 = 1e-12;

/// A string conjugate to the initial string, located by `det A(τ*) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateString {
    pub tau_star: f64,
    /// Dimension of the null space of `A(τ*)`.
    pub multiplicity: usize,
    /// Sample interval the root was refined in.
    pub bracket: (f64, f64),
    /// `det A` touches zero without changing sign (even multiplicity).
    pub tangential: bool,
    pub det_a: f64,
}

/// Result of [`find_conjugate_strings`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConjugateSearch {
    pub strings: Vec<ConjugateString>,
    pub warnings: Vec<String>,
}

impl ConjugateSearch {
    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn taus(&self) -> Vec<f64> {
        self.strings.iter().map(|s| s.tau_star).collect()
    }

    /// Total count with multiplicity.
    pub fn total_multiplicity(&self) -> usize {
        self.strings.iter().map(|s| s.multiplicity).sum()
    }
}

fn sigma_min(a: &DMatrix<f64>) -> f64 {
    a.clone().singular_values().min()
}

fn bisect(traj: &JacobiMatrixTrajectory, mut lo: f64, mut hi: f64, det_lo: f64) -> f64 {
    let positive = det_lo > 0.0;
    for _ in 0..200 {
        if hi - lo <= ROOT_TOL * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let d = traj.det_at(mid);
        if d == 0.0 {
            return mid;
        }
        if (d > 0.0) == positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min(traj: &JacobiMatrixTrajectory, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let f = |t: f64| sigma_min(&traj.state_at(t).0);
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if hi - lo <= ROOT_TOL * hi.abs().max(1.0) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Roots of `det A` on `(0, T]`.
///
/// Sign changes between stored samples are refined by bisection. Roots where
/// `det A` only touches zero are found as local minima of the smallest
/// singular value of `A`, refined by golden-section search, and accepted when
/// that singular value drops below the multiplicity cutoff.
pub fn find_conjugate_strings(traj: &JacobiMatrixTrajectory) -> ConjugateSearch {
    let n = traj.len();
    let mut search = ConjugateSearch::default();
    if n < 3 {
        return search;
    }
    let scale = traj.max_norm().max(1e-300);
    let cutoff = MULTIPLICITY_RTOL * scale;
    let h = traj.step();
    let describe = |tau: f64, bracket: (f64, f64), tangential: bool| {
        let a = traj.state_at(tau).0;
        let multiplicity = a.clone().singular_values().iter().filter(|s| **s <= cutoff).count();
        ConjugateString {
            tau_star: tau,
            multiplicity,
            bracket,
            tangential,
            det_a: a.determinant(),
        }
    };

    let mut last_change: Option<usize> = None;
    for k in 1..n {
        let (d0, t0) = (traj.det_a[k], traj.taus[k]);
        if d0 == 0.0 {
            search.strings.push(describe(t0, (t0, t0), false));
            continue;
        }
        if k + 1 < n && d0 * traj.det_a[k + 1] < 0.0 {
            let t1 = traj.taus[k + 1];
            if last_change == Some(k - 1) {
                search.warnings.push(format!(
                    "det A changes sign in consecutive intervals near tau = {t0:.6}; sampling may be too coarse"
                ));
            }
            last_change = Some(k);
            let root = bisect(traj, t0, t1, d0);
            search.strings.push(describe(root, (t0, t1), false));
        }
    }

    let smin: Vec<f64> = traj.a.iter().map(sigma_min).collect();
    for k in 1..n {
        let left = smin[k - 1];
        let right = if k + 1 < n { smin[k + 1] } else { f64::INFINITY };
        if !(smin[k] <= left && smin[k] <= right) {
            continue;
        }
        let speed = traj.a_dot[k].norm();
        if smin[k] > 2.0 * h * speed {
            continue;
        }
        let t = traj.taus[k];
        if search.strings.iter().any(|s| (s.tau_star - t).abs() <= 2.0 * h) {
            continue;
        }
        let (lo, hi) = (traj.taus[k - 1], traj.taus[(k + 1).min(n - 1)]);
        let tau = golden_min(traj, lo, hi);
        if sigma_min(&traj.state_at(tau).0) <= cutoff {
            search.strings.push(describe(tau, (lo, hi), true));
        }
    }
    search.strings.sort_by(|a, b| a.tau_star.total_cmp(&b.tau_star));
    search
}
