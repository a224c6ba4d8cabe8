use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::manifold::MetricChart;

/// Values on the `(τ, σ)` lattice with a fixed number of components per node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeField {
    n_tau: usize,
    n_sigma: usize,
    comps: usize,
    data: Vec<f64>,
}

impl NodeField {
    pub fn zeros(n_tau: usize, n_sigma: usize, comps: usize) -> Self {
        Self {
            n_tau,
            n_sigma,
            comps,
            data: vec![0.0; n_tau * n_sigma * comps],
        }
    }

    pub fn from_vec(n_tau: usize, n_sigma: usize, comps: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_tau * n_sigma * comps {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                n_tau * n_sigma * comps,
                data.len()
            )));
        }
        Ok(Self {
            n_tau,
            n_sigma,
            comps,
            data,
        })
    }

    /// Number of τ samples (intervals + 1).
    pub fn n_tau(&self) -> usize {
        self.n_tau
    }

    pub fn n_sigma(&self) -> usize {
        self.n_sigma
    }

    pub fn comps(&self) -> usize {
        self.comps
    }

    #[inline]
    fn offset(&self, k: usize, j: usize) -> usize {
        (k * self.n_sigma + j) * self.comps
    }

    #[inline]
    pub fn get(&self, k: usize, j: usize) -> &[f64] {
        let o = self.offset(k, j);
        &self.data[o..o + self.comps]
    }

    #[inline]
    pub fn get_mut(&mut self, k: usize, j: usize) -> &mut [f64] {
        let o = self.offset(k, j);
        &mut self.data[o..o + self.comps]
    }

    pub fn set(&mut self, k: usize, j: usize, value: &[f64]) {
        self.get_mut(k, j).copy_from_slice(value);
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.n_tau == other.n_tau && self.n_sigma == other.n_sigma && self.comps == other.comps
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &Self) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::GridMismatch("node fields have different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect();
        Ok(Self { data, ..*self })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * s).collect(),
            ..*self
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Largest Euclidean norm of a node's component vector.
    pub fn max_norm(&self) -> f64 {
        self.max_norm_in(0..self.n_tau)
    }

    /// Same as [`Self::max_norm`] restricted to `1..n_tau-1`.
    pub fn max_norm_interior(&self) -> f64 {
        self.max_norm_in(1..self.n_tau.saturating_sub(1))
    }

    fn max_norm_in(&self, rows: std::ops::Range<usize>) -> f64 {
        let mut worst: f64 = 0.0;
        for k in rows {
            for j in 0..self.n_sigma {
                let n2: f64 = self.get(k, j).iter().map(|v| v * v).sum();
                worst = worst.max(n2.sqrt());
            }
        }
        worst
    }

    /// Largest node norm in row `k`.
    pub fn row_max_norm(&self, k: usize) -> f64 {
        (0..self.n_sigma)
            .map(|j| self.get(k, j).iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// A discretized closed-string tube `X(τ, σ)`.
///
/// `τ` is sampled uniformly on `[0, T]` (`n_tau` samples, endpoints
/// included); `σ` uniformly on `[0, 2π)` without a duplicated seam column.
/// Coordinates that wind around the string (an angle advancing by `2π` per
/// revolution) are handled through `winding`: `X(τ, σ + 2π) = X(τ, σ) + winding`.
#[derive(Debug, Clone)]
pub struct WorldsheetGrid {
    chart: MetricChart,
    taus: Vec<f64>,
    winding: Vec<f64>,
    x: NodeField,
}

impl WorldsheetGrid {
    pub fn new(chart: MetricChart, taus: Vec<f64>, winding: Vec<f64>, x: NodeField) -> Result<Self> {
        let n = chart.dim();
        if x.comps() != n || winding.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if x.comps() != n { x.comps() } else { winding.len() },
            });
        }
        if taus.len() != x.n_tau() {
            return Err(Error::GridMismatch(format!(
                "{} tau samples for a field with {} rows",
                taus.len(),
                x.n_tau()
            )));
        }
        if taus.len() < 4 {
            return Err(Error::InvalidArgument("need at least 4 tau samples".into()));
        }
        if x.n_sigma() < 3 {
            return Err(Error::InvalidArgument("need at least 3 sigma samples".into()));
        }
        crate::manifold::check_uniform_grid(&taus)?;
        Ok(Self { chart, taus, winding, x })
    }

    /// Samples `embedding(τ, σ)` on `n_tau_intervals + 1` τ nodes over `[0, t_end]`
    /// and `n_sigma` σ nodes.
    pub fn from_fn<F>(
        chart: MetricChart,
        t_end: f64,
        n_tau_intervals: usize,
        n_sigma: usize,
        winding: Vec<f64>,
        embedding: F,
    ) -> Result<Self>
    where
        F: Fn(f64, f64) -> Vec<f64>,
    {
        if !(t_end > 0.0) || n_tau_intervals == 0 || n_sigma == 0 {
            return Err(Error::InvalidArgument("grid needs T > 0 and nonzero sizes".into()));
        }
        let n = chart.dim();
        let taus: Vec<f64> = (0..=n_tau_intervals)
            .map(|k| t_end * k as f64 / n_tau_intervals as f64)
            .collect();
        let mut x = NodeField::zeros(taus.len(), n_sigma, n);
        for (k, &tau) in taus.iter().enumerate() {
            for j in 0..n_sigma {
                let p = embedding(tau, sigma_at(j, n_sigma));
                if p.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: p.len(),
                    });
                }
                x.set(k, j, &p);
            }
        }
        Self::new(chart, taus, winding, x)
    }

    pub fn chart(&self) -> &MetricChart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn n_tau(&self) -> usize {
        self.taus.len()
    }

    pub fn n_sigma(&self) -> usize {
        self.x.n_sigma()
    }

    pub fn t_end(&self) -> f64 {
        self.taus[self.taus.len() - 1]
    }

    pub fn dtau(&self) -> f64 {
        self.taus[1] - self.taus[0]
    }

    pub fn dsigma(&self) -> f64 {
        TAU / self.n_sigma() as f64
    }

    pub fn sigma(&self, j: usize) -> f64 {
        sigma_at(j, self.n_sigma())
    }

    pub fn winding(&self) -> &[f64] {
        &self.winding
    }

    pub fn points(&self) -> &NodeField {
        &self.x
    }

    pub fn point(&self, k: usize, j: usize) -> &[f64] {
        self.x.get(k, j)
    }

    /// Same tube parameters with a different embedding.
    pub fn with_points(&self, x: NodeField) -> Result<Self> {
        if !x.same_shape(&self.x) {
            return Err(Error::GridMismatch("embedding has a different shape".into()));
        }
        Ok(Self {
            chart: self.chart.clone(),
            taus: self.taus.clone(),
            winding: self.winding.clone(),
            x,
        })
    }

    /// Zero-valued vector field with this grid's shape.
    pub fn zero_field(&self) -> NodeField {
        NodeField::zeros(self.n_tau(), self.n_sigma(), self.dim())
    }

    /// Samples a vector field `f(τ, σ)` on the grid nodes.
    pub fn sample_field<F>(&self, f: F) -> NodeField
    where
        F: Fn(f64, f64) -> Vec<f64>,
    {
        let mut out = self.zero_field();
        for k in 0..self.n_tau() {
            for j in 0..self.n_sigma() {
                out.set(k, j, &f(self.taus[k], self.sigma(j)));
            }
        }
        out
    }

    /// `ξ = ∂X/∂τ` at a node.
    pub fn xi(&self, k: usize, j: usize) -> Vec<f64> {
        d_tau(&self.x, self.dtau(), k, j)
    }

    /// `ζ = ∂X/∂σ` at a node.
    pub fn zeta(&self, k: usize, j: usize) -> Vec<f64> {
        d_sigma(&self.x, self.dsigma(), k, j, Some(&self.winding))
    }

    /// Trapezoid in τ times the periodic rectangle rule in σ of a scalar field.
    pub fn integrate(&self, scalar: &NodeField) -> f64 {
        integrate_scalar(scalar, self.dtau(), self.dsigma())
    }
}

#[inline]
pub(crate) fn sigma_at(j: usize, n_sigma: usize) -> f64 {
    TAU * j as f64 / n_sigma as f64
}

/// First τ-derivative: central inside, one-sided second order at the ends.
pub fn d_tau(f: &NodeField, h: f64, k: usize, j: usize) -> Vec<f64> {
    let last = f.n_tau() - 1;
    let c = f.comps();
    let mut out = vec![0.0; c];
    if k == 0 {
        let (f0, f1, f2) = (f.get(0, j), f.get(1, j), f.get(2, j));
        for i in 0..c {
            out[i] = (-3.0 * f0[i] + 4.0 * f1[i] - f2[i]) / (2.0 * h);
        }
    } else if k == last {
        let (f0, f1, f2) = (f.get(last, j), f.get(last - 1, j), f.get(last - 2, j));
        for i in 0..c {
            out[i] = (3.0 * f0[i] - 4.0 * f1[i] + f2[i]) / (2.0 * h);
        }
    } else {
        let (fp, fm) = (f.get(k + 1, j), f.get(k - 1, j));
        for i in 0..c {
            out[i] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    out
}

/// Second τ-derivative: central inside, one-sided second order at the ends.
pub fn d2_tau(f: &NodeField, h: f64, k: usize, j: usize) -> Vec<f64> {
    let last = f.n_tau() - 1;
    let c = f.comps();
    let mut out = vec![0.0; c];
    let h2 = h * h;
    if k == 0 || k == last {
        let s: [usize; 4] = if k == 0 { [0, 1, 2, 3] } else { [last, last - 1, last - 2, last - 3] };
        let (f0, f1, f2, f3) = (f.get(s[0], j), f.get(s[1], j), f.get(s[2], j), f.get(s[3], j));
        for i in 0..c {
            out[i] = (2.0 * f0[i] - 5.0 * f1[i] + 4.0 * f2[i] - f3[i]) / h2;
        }
    } else {
        let (fp, f0, fm) = (f.get(k + 1, j), f.get(k, j), f.get(k - 1, j));
        for i in 0..c {
            out[i] = (fp[i] - 2.0 * f0[i] + fm[i]) / h2;
        }
    }
    out
}

fn sigma_neighbours<'a>(f: &'a NodeField, k: usize, j: usize) -> (&'a [f64], &'a [f64], i32, i32) {
    let ns = f.n_sigma();
    let (jp, wrap_p) = if j + 1 == ns { (0, 1) } else { (j + 1, 0) };
    let (jm, wrap_m) = if j == 0 { (ns - 1, -1) } else { (j - 1, 0) };
    (f.get(k, jp), f.get(k, jm), wrap_p, wrap_m)
}

/// Periodic central first σ-derivative. `winding` is added across the seam.
pub fn d_sigma(f: &NodeField, h: f64, k: usize, j: usize, winding: Option<&[f64]>) -> Vec<f64> {
    let (fp, fm, wp, wm) = sigma_neighbours(f, k, j);
    (0..f.comps())
        .map(|i| {
            let w = winding.map_or(0.0, |w| w[i]);
            ((fp[i] + wp as f64 * w) - (fm[i] + wm as f64 * w)) / (2.0 * h)
        })
        .collect()
}

/// Periodic central second σ-derivative. `winding` is added across the seam.
pub fn d2_sigma(f: &NodeField, h: f64, k: usize, j: usize, winding: Option<&[f64]>) -> Vec<f64> {
    let (fp, fm, wp, wm) = sigma_neighbours(f, k, j);
    let f0 = f.get(k, j);
    (0..f.comps())
        .map(|i| {
            let w = winding.map_or(0.0, |w| w[i]);
            ((fp[i] + wp as f64 * w) - 2.0 * f0[i] + (fm[i] + wm as f64 * w)) / (h * h)
        })
        .collect()
}

pub(crate) fn integrate_scalar(s: &NodeField, dtau: f64, dsigma: f64) -> f64 {
    let last = s.n_tau() - 1;
    let mut total = 0.0;
    for k in 0..s.n_tau() {
        let w = if k == 0 || k == last { 0.5 } else { 1.0 };
        let row: f64 = (0..s.n_sigma()).map(|j| s.get(k, j)[0]).sum();
        total += w * row;
    }
    total * dtau * dsigma
}
