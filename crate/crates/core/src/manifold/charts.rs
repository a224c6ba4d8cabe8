use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Christoffel, MetricChart, Rank4};
use crate::error::{Error, Result};

/// Built-in families of constant-curvature charts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    /// Minkowski space, `diag(-1, 1, ..., 1)`.
    Flat,
    /// `S^n` of radius `1/√K` in hyperspherical angles `(θ_1, …, θ_{n-1}, φ)`.
    RoundSphere,
    /// Upper half-space model of `H^n`, `g = δ / (|K| y²)` with `y` the last coordinate.
    Hyperbolic,
    /// `ℝ × S^{n-1}` with `g = -dt² + (sphere of radius 1/√K)`.
    ProductTimeSphere,
}

impl ChartKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChartKind::Flat => "flat",
            ChartKind::RoundSphere => "round_sphere",
            ChartKind::Hyperbolic => "hyperbolic",
            ChartKind::ProductTimeSphere => "product_time_sphere",
        }
    }
}

impl fmt::Display for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChartKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(ChartKind::Flat),
            "round_sphere" => Ok(ChartKind::RoundSphere),
            "hyperbolic" => Ok(ChartKind::Hyperbolic),
            "product_time_sphere" => Ok(ChartKind::ProductTimeSphere),
            other => Err(Error::InvalidArgument(format!("unknown manifold kind '{other}'"))),
        }
    }
}

/// Parameters of a constant-curvature chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantCurvatureSpec {
    pub kind: ChartKind,
    /// Sectional curvature of the curved factor, in inverse length squared.
    pub curvature: f64,
    pub dim: usize,
}

impl ConstantCurvatureSpec {
    pub fn flat(dim: usize) -> Self {
        Self {
            kind: ChartKind::Flat,
            curvature: 0.0,
            dim,
        }
    }

    pub fn round_sphere(dim: usize, curvature: f64) -> Self {
        Self {
            kind: ChartKind::RoundSphere,
            curvature,
            dim,
        }
    }

    pub fn hyperbolic(dim: usize, curvature: f64) -> Self {
        Self {
            kind: ChartKind::Hyperbolic,
            curvature,
            dim,
        }
    }

    pub fn product_time_sphere(dim: usize, curvature: f64) -> Self {
        Self {
            kind: ChartKind::ProductTimeSphere,
            curvature,
            dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.curvature;
        if !k.is_finite() {
            return Err(Error::InvalidArgument("curvature must be finite".into()));
        }
        match self.kind {
            ChartKind::Flat => {
                if self.dim < 1 {
                    return Err(Error::InvalidArgument("flat chart needs dim >= 1".into()));
                }
                if k != 0.0 {
                    return Err(Error::InvalidArgument(format!("flat chart forces K = 0, got {k}")));
                }
            }
            ChartKind::RoundSphere => {
                if self.dim < 2 {
                    return Err(Error::InvalidArgument("round sphere needs dim >= 2".into()));
                }
                if k <= 0.0 {
                    return Err(Error::InvalidArgument(format!("round sphere requires K > 0, got {k}")));
                }
            }
            ChartKind::Hyperbolic => {
                if self.dim < 2 {
                    return Err(Error::InvalidArgument("hyperbolic chart needs dim >= 2".into()));
                }
                if k >= 0.0 {
                    return Err(Error::InvalidArgument(format!("hyperbolic chart requires K < 0, got {k}")));
                }
            }
            ChartKind::ProductTimeSphere => {
                if self.dim < 3 {
                    return Err(Error::InvalidArgument("product time-sphere chart needs dim >= 3".into()));
                }
                if k <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "product time-sphere requires K > 0 on the sphere factor, got {k}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Index of the first coordinate of the curved factor.
    fn offset(&self) -> usize {
        match self.kind {
            ChartKind::ProductTimeSphere => 1,
            _ => 0,
        }
    }

    /// Diagonal of the metric at `x`.
    fn diagonal(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let k = self.curvature;
        match self.kind {
            ChartKind::Flat => {
                let mut d = vec![1.0; n];
                d[0] = -1.0;
                d
            }
            ChartKind::RoundSphere | ChartKind::ProductTimeSphere => {
                let off = self.offset();
                let r2 = 1.0 / k;
                let mut d = vec![-1.0; n];
                let mut warp = r2;
                for i in off..n {
                    d[i] = warp;
                    let s = x[i].sin();
                    warp *= s * s;
                }
                d
            }
            ChartKind::Hyperbolic => {
                let y = x[n - 1];
                vec![1.0 / (k.abs() * y * y); n]
            }
        }
    }

    /// `∂_j g_kk` at `x`.
    fn diagonal_derivative(&self, x: &[f64], diag: &[f64], j: usize, k: usize) -> f64 {
        let n = self.dim;
        match self.kind {
            ChartKind::Flat => 0.0,
            ChartKind::RoundSphere | ChartKind::ProductTimeSphere => {
                let off = self.offset();
                if j >= off && j < k && k >= off {
                    2.0 * x[j].cos() / x[j].sin() * diag[k]
                } else {
                    0.0
                }
            }
            ChartKind::Hyperbolic => {
                if j == n - 1 {
                    -2.0 * diag[k] / x[n - 1]
                } else {
                    0.0
                }
            }
        }
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        let n = self.dim;
        match self.kind {
            ChartKind::Flat => true,
            ChartKind::RoundSphere | ChartKind::ProductTimeSphere => {
                (self.offset()..n - 1).all(|i| x[i] > 0.0 && x[i] < std::f64::consts::PI)
            }
            ChartKind::Hyperbolic => x[n - 1] > 0.0,
        }
    }

    fn christoffel(&self, x: &[f64]) -> Christoffel {
        let n = self.dim;
        let diag = self.diagonal(x);
        let mut gamma = Christoffel::zeros(n);
        if self.kind == ChartKind::Flat {
            return gamma;
        }
        // Γ^a_bc = ½ g^aa (δ_ac ∂_b g_aa + δ_ab ∂_c g_aa − δ_bc ∂_a g_bb)
        for a in 0..n {
            let half_inv = 0.5 / diag[a];
            for b in 0..n {
                for c in 0..n {
                    let mut acc = 0.0;
                    if a == c {
                        acc += self.diagonal_derivative(x, &diag, b, a);
                    }
                    if a == b {
                        acc += self.diagonal_derivative(x, &diag, c, a);
                    }
                    if b == c {
                        acc -= self.diagonal_derivative(x, &diag, a, b);
                    }
                    if acc != 0.0 {
                        gamma.set(a, b, c, half_inv * acc);
                    }
                }
            }
        }
        gamma
    }

    /// Closed-form `R_abcd = K (h_ac h_bd − h_ad h_bc)` where `h` is the
    /// metric of the curved factor (zero along the time axis for the product).
    pub fn expected_lowered(&self, x: &[f64]) -> Rank4 {
        let n = self.dim;
        let mut h = self.diagonal(x);
        for v in h.iter_mut().take(self.offset()) {
            *v = 0.0;
        }
        let k = self.curvature;
        let mut r = Rank4::zeros(n);
        if self.kind == ChartKind::Flat {
            return r;
        }
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                // only (a, b, a, b) and (a, b, b, a) survive for diagonal h
                r.set(a, b, a, b, k * h[a] * h[b]);
                r.set(a, b, b, a, -k * h[a] * h[b]);
            }
        }
        r
    }

    fn riemann(&self, x: &[f64]) -> Rank4 {
        let n = self.dim;
        let diag = self.diagonal(x);
        let lowered = self.expected_lowered(x);
        let mut r = Rank4::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v = lowered.get(a, b, c, d);
                        if v != 0.0 {
                            r.set(a, b, c, d, v / diag[d]);
                        }
                    }
                }
            }
        }
        r
    }

    /// Builds the chart with closed-form connection and curvature attached.
    pub fn build(&self) -> Result<MetricChart> {
        self.validate()?;
        let n = self.dim;
        let signature: Vec<i8> = match self.kind {
            ChartKind::Flat | ChartKind::ProductTimeSphere => {
                (0..n).map(|i| if i == 0 { -1 } else { 1 }).collect()
            }
            _ => vec![1; n],
        };
        let spec = *self;
        let metric = move |x: &[f64]| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(spec.diagonal(x)));
        let chart = MetricChart::new(self.kind.as_str(), n, signature, metric)?
            .with_christoffel(move |x| spec.christoffel(x))
            .with_riemann(move |x| spec.riemann(x))
            .with_domain(move |x| spec.in_domain(x));
        Ok(chart)
    }
}
