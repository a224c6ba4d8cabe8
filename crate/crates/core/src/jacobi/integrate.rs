use nalgebra::{DMatrix, DVector};

use super::tidal::TidalMatrix;
use crate::error::{Error, Result};

/// `‖A‖_F` above which integration stops with an overflow error.
pub const OVERFLOW_NORM: f64 = 1e12;

/// Solution of `Ä + M A = 0`, `A(0) = 0`, `Ȧ(0) = I` on a uniform τ grid.
#[derive(Debug, Clone)]
pub struct JacobiMatrixTrajectory {
    pub taus: Vec<f64>,
    pub a: Vec<DMatrix<f64>>,
    pub a_dot: Vec<DMatrix<f64>>,
    pub det_a: Vec<f64>,
    /// `‖ȦᵀA − AᵀȦ‖_F`
    pub wronskian_norm: Vec<f64>,
    tidal: TidalMatrix,
    h: f64,
}

fn rk4_step(m: &TidalMatrix, tau: f64, a: &DMatrix<f64>, b: &DMatrix<f64>, h: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let m0 = m.eval(tau);
    let mh = m.eval(tau + 0.5 * h);
    let m1 = m.eval(tau + h);
    let k1a = b.clone();
    let k1b = -(&m0 * a);
    let a2 = a + &k1a * (0.5 * h);
    let b2 = b + &k1b * (0.5 * h);
    let k2a = b2.clone();
    let k2b = -(&mh * &a2);
    let a3 = a + &k2a * (0.5 * h);
    let b3 = b + &k2b * (0.5 * h);
    let k3a = b3.clone();
    let k3b = -(&mh * &a3);
    let a4 = a + &k3a * h;
    let b4 = b + &k3b * h;
    let k4a = b4;
    let k4b = -(&m1 * &a4);
    let a_next = a + (k1a + &k2a * 2.0 + &k3a * 2.0 + k4a) * (h / 6.0);
    let b_next = b + (k1b + &k2b * 2.0 + &k3b * 2.0 + k4b) * (h / 6.0);
    (a_next, b_next)
}

fn wronskian(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (b.transpose() * a - a.transpose() * b).norm()
}

/// Fixed-step RK4 over `[0, T]`. The step is `T / N` with the smallest `N`
/// such that it does not exceed `dt`.
pub fn integrate_jacobi(m: &TidalMatrix, t_end: f64, dt: f64) -> Result<JacobiMatrixTrajectory> {
    if !(t_end > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Jacobi integration needs T > 0 and dt > 0, got T = {t_end}, dt = {dt}"
        )));
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let n = m.dim();
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::identity(n, n);
    let mut traj = JacobiMatrixTrajectory {
        taus: Vec::with_capacity(steps + 1),
        a: Vec::with_capacity(steps + 1),
        a_dot: Vec::with_capacity(steps + 1),
        det_a: Vec::with_capacity(steps + 1),
        wronskian_norm: Vec::with_capacity(steps + 1),
        tidal: m.clone(),
        h,
    };
    traj.push(0.0, a.clone(), b.clone());
    for k in 0..steps {
        let tau = k as f64 * h;
        (a, b) = rk4_step(m, tau, &a, &b, h);
        let norm = a.norm();
        if !norm.is_finite() || norm > OVERFLOW_NORM {
            return Err(Error::Overflow { tau: tau + h, norm });
        }
        traj.push((k + 1) as f64 * h, a.clone(), b.clone());
    }
    Ok(traj)
}

impl JacobiMatrixTrajectory {
    fn push(&mut self, tau: f64, a: DMatrix<f64>, b: DMatrix<f64>) {
        self.taus.push(tau);
        self.det_a.push(a.determinant());
        self.wronskian_norm.push(wronskian(&a, &b));
        self.a.push(a);
        self.a_dot.push(b);
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn t_end(&self) -> f64 {
        self.taus[self.taus.len() - 1]
    }

    pub fn transverse_dim(&self) -> usize {
        self.tidal.dim()
    }

    pub fn tidal(&self) -> &TidalMatrix {
        &self.tidal
    }

    /// `(A(τ), Ȧ(τ))` at any `τ ∈ [0, T]`, by one RK4 step from the nearest
    /// stored sample at or below `τ`.
    pub fn state_at(&self, tau: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let tau = tau.clamp(0.0, self.t_end());
        let k = ((tau / self.h).floor() as usize).min(self.len() - 1);
        let delta = tau - self.taus[k];
        if delta <= 0.0 {
            return (self.a[k].clone(), self.a_dot[k].clone());
        }
        rk4_step(&self.tidal, self.taus[k], &self.a[k], &self.a_dot[k], delta)
    }

    pub fn det_at(&self, tau: f64) -> f64 {
        self.state_at(tau).0.determinant()
    }

    /// Largest `‖A_k‖_F` over the stored samples.
    pub fn max_norm(&self) -> f64 {
        self.a.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// `max_τ ‖ȦᵀA − AᵀȦ‖_F`.
pub fn wronskian_check(traj: &JacobiMatrixTrajectory) -> f64 {
    traj.wronskian_norm.iter().copied().fold(0.0, f64::max)
}

/// `η(τ_k) = A(τ_k) η̇(0)` at every stored sample.
pub fn reconstruct_eta(traj: &JacobiMatrixTrajectory, eta_dot0: &[f64]) -> Result<Vec<DVector<f64>>> {
    let n = traj.transverse_dim();
    if eta_dot0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: eta_dot0.len(),
        });
    }
    let v = DVector::from_column_slice(eta_dot0);
    Ok(traj.a.iter().map(|a| a * &v).collect())
}
