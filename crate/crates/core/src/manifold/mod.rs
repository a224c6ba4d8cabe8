//! Pseudo-Riemannian coordinate charts and their curvature.
//!
//! # Curvature convention
//!
//! The Riemann tensor is defined by the commutator of covariant derivatives
//! acting on a covector,
//!
//! ```text
//! (∇_a ∇_b − ∇_b ∇_a) ω_c = R_abc^d ω_d ,
//! ```
//!
//! which in components reads
//!
//! ```text
//! R_abc^d = ∂_b Γ^d_ac − ∂_a Γ^d_bc + Γ^e_ac Γ^d_be − Γ^e_bc Γ^d_ae .
//! ```
//!
//! With `R_abcd = R_abc^e g_ed` a space of constant sectional curvature `K`
//! has `R_abcd = +K (g_ac g_bd − g_ad g_bc)`; on the unit round 2-sphere
//! `R_θφθφ = +sin²θ`. The sign is pinned by a test that evaluates the
//! commutator directly on a covector field (see `tests/curvature.rs`).
//! Every other module consumes [`riemann_at`] and never re-derives signs.

mod charts;
mod curvature;
mod tensor;
mod transport;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use charts::{ChartKind, ConstantCurvatureSpec};
pub use curvature::{
    christoffel_at, christoffel_fd_at, riemann_at, riemann_fd_at, sectional_curvature,
    CurvatureSample,
};
pub use tensor::{Christoffel, Rank4};
pub(crate) use transport::{check_uniform_grid, gram};
pub use transport::{
    parallel_transport_frame, FnWorldline, HermiteWorldline, TransportedFrame, Worldline,
};

pub type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
pub type ChristoffelFn = Arc<dyn Fn(&[f64]) -> Christoffel + Send + Sync>;
pub type RiemannFn = Arc<dyn Fn(&[f64]) -> Rank4 + Send + Sync>;
pub type DomainFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Determinants below this magnitude are treated as singular.
pub const SINGULAR_METRIC_DET: f64 = 1e-14;
/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

const SYMMETRY_TOL: f64 = 1e-12;

/// A single coordinate patch carrying a metric and, optionally, closed-form
/// connection and curvature.
#[derive(Clone)]
pub struct MetricChart {
    name: String,
    dim: usize,
    signature: Vec<i8>,
    metric_fn: MetricFn,
    analytic_christoffel: Option<ChristoffelFn>,
    analytic_riemann: Option<RiemannFn>,
    domain: Option<DomainFn>,
    fd_step: f64,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricChart")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("signature", &self.signature)
            .field("analytic_christoffel", &self.analytic_christoffel.is_some())
            .field("analytic_riemann", &self.analytic_riemann.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl MetricChart {
    pub fn new<F>(name: impl Into<String>, dim: usize, signature: Vec<i8>, metric: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::InvalidArgument("chart dimension must be positive".into()));
        }
        if signature.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: signature.len(),
            });
        }
        if signature.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidArgument("signature entries must be ±1".into()));
        }
        Ok(Self {
            name: name.into(),
            dim,
            signature,
            metric_fn: Arc::new(metric),
            analytic_christoffel: None,
            analytic_riemann: None,
            domain: None,
            fd_step: DEFAULT_FD_STEP,
        })
    }

    /// Flat space with `g = diag(-1, 1, ..., 1)`.
    pub fn minkowski(dim: usize) -> Self {
        ConstantCurvatureSpec::flat(dim)
            .build()
            .expect("flat chart construction is infallible for dim > 0")
    }

    /// Flat space with `g = I`.
    pub fn euclidean(dim: usize) -> Self {
        Self::new("euclidean", dim, vec![1; dim], move |_| DMatrix::identity(dim, dim))
            .expect("euclidean chart")
            .with_christoffel(move |_| Christoffel::zeros(dim))
            .with_riemann(move |_| Rank4::zeros(dim))
    }

    pub fn with_christoffel<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> Christoffel + Send + Sync + 'static,
    {
        self.analytic_christoffel = Some(Arc::new(f));
        self
    }

    pub fn with_riemann<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> Rank4 + Send + Sync + 'static,
    {
        self.analytic_riemann = Some(Arc::new(f));
        self
    }

    pub fn with_domain<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        self.domain = Some(Arc::new(f));
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("fd_step must be positive, got {h}")));
        }
        self.fd_step = h;
        Ok(self)
    }

    /// Same chart with every closed-form shortcut removed, so all connection
    /// and curvature data come from finite differences of the metric.
    pub fn finite_difference_only(&self) -> Self {
        let mut out = self.clone();
        out.analytic_christoffel = None;
        out.analytic_riemann = None;
        out
    }

    /// Drops only the closed-form Riemann tensor; curvature is then
    /// differentiated from the (possibly analytic) connection.
    pub fn without_analytic_riemann(&self) -> Self {
        let mut out = self.clone();
        out.analytic_riemann = None;
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn signature(&self) -> &[i8] {
        &self.signature
    }

    /// Exactly one negative signature entry.
    pub fn is_lorentzian(&self) -> bool {
        self.signature.iter().filter(|s| **s < 0).count() == 1
    }

    pub fn is_riemannian(&self) -> bool {
        self.signature.iter().all(|s| *s > 0)
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn has_analytic_christoffel(&self) -> bool {
        self.analytic_christoffel.is_some()
    }

    pub fn has_analytic_riemann(&self) -> bool {
        self.analytic_riemann.is_some()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter().all(|v| v.is_finite())
            && self.domain.as_ref().is_none_or(|d| d(x))
    }

    pub(crate) fn analytic_christoffel(&self) -> Option<&ChristoffelFn> {
        self.analytic_christoffel.as_ref()
    }

    pub(crate) fn analytic_riemann(&self) -> Option<&RiemannFn> {
        self.analytic_riemann.as_ref()
    }

    /// Raw metric evaluation with no validation.
    pub(crate) fn raw_metric(&self, x: &[f64]) -> DMatrix<f64> {
        (self.metric_fn)(x)
    }

    /// `g_ab u^a v^b` at `x`.
    pub fn inner(&self, x: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        let g = metric_at(self, x)?;
        Ok(inner_with(&g, u, v))
    }
}

/// `g_ab u^a v^b` for an already evaluated metric.
#[inline]
pub fn inner_with(g: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    let n = g.nrows();
    let mut acc = 0.0;
    for a in 0..n {
        if u[a] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for b in 0..n {
            row += g[(a, b)] * v[b];
        }
        acc += u[a] * row;
    }
    acc
}

/// Evaluates `g_ab` at `x`, checking domain, symmetry and invertibility.
pub fn metric_at(chart: &MetricChart, x: &[f64]) -> Result<DMatrix<f64>> {
    if x.len() != chart.dim {
        return Err(Error::DimensionMismatch {
            expected: chart.dim,
            found: x.len(),
        });
    }
    if !chart.contains(x) {
        return Err(Error::OutOfDomain { point: x.to_vec() });
    }
    let g = chart.raw_metric(x);
    if g.nrows() != chart.dim || g.ncols() != chart.dim {
        return Err(Error::DimensionMismatch {
            expected: chart.dim,
            found: g.nrows(),
        });
    }
    let asymmetry = (&g - g.transpose()).amax();
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::AsymmetricMetric {
            point: x.to_vec(),
            asymmetry,
        });
    }
    let det = g.determinant();
    if !(det.abs() >= SINGULAR_METRIC_DET) {
        return Err(Error::SingularMetric {
            point: x.to_vec(),
            det,
        });
    }
    Ok((&g + g.transpose()) * 0.5)
}

/// Inverse metric `g^ab` at `x`.
pub fn inverse_metric_at(chart: &MetricChart, x: &[f64]) -> Result<DMatrix<f64>> {
    let g = metric_at(chart, x)?;
    g.clone().try_inverse().ok_or(Error::SingularMetric {
        point: x.to_vec(),
        det: g.determinant(),
    })
}

/// Lowers a vector index: `v_a = g_ab v^b`.
pub fn lower(g: &DMatrix<f64>, v: &[f64]) -> DVector<f64> {
    g * DVector::from_column_slice(v)
}
