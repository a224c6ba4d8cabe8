use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::{
    gram, inner_with, metric_at, parallel_transport_frame, riemann_at, HermiteWorldline, MetricChart,
    TransportedFrame, Worldline,
};
use crate::worldsheet::{gauge_residuals, WorldsheetGrid, DEVIATION_GAUGE_TOL};

/// Gram determinant below which a transverse frame is rejected.
pub const FRAME_GRAM_DET_MIN: f64 = 1e-8;

/// Where a tidal matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TidalSource {
    /// Contracted from a chart's curvature along a string.
    FromChart,
    /// A constant matrix supplied by the caller.
    ExplicitConstant,
    /// A τ-dependent matrix supplied by the caller.
    ExplicitFunction,
}

#[derive(Clone)]
enum TidalData {
    Constant(DMatrix<f64>),
    Function(Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>),
    /// Uniform samples, interpolated by cubic Hermite with central slopes.
    Sampled { t0: f64, h: f64, mats: Vec<DMatrix<f64>> },
}

/// `M^i_j(τ) = R_τjτ^i − R_σjσ^i` in a transported transverse frame.
#[derive(Clone)]
pub struct TidalMatrix {
    dim: usize,
    source: TidalSource,
    data: TidalData,
    frame: Option<TransportedFrame>,
}

impl std::fmt::Debug for TidalMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TidalMatrix")
            .field("dim", &self.dim)
            .field("source", &self.source)
            .finish_non_exhaustive()
    }
}

impl TidalMatrix {
    pub fn constant(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidArgument("tidal matrix must be square and nonempty".into()));
        }
        Ok(Self {
            dim: m.nrows(),
            source: TidalSource::ExplicitConstant,
            data: TidalData::Constant(m),
            frame: None,
        })
    }

    /// `λ I` of size `dim`.
    pub fn scalar(lambda: f64, dim: usize) -> Result<Self> {
        Self::constant(DMatrix::identity(dim, dim) * lambda)
    }

    pub fn diagonal(lambdas: &[f64]) -> Result<Self> {
        Self::constant(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(lambdas)))
    }

    pub fn function<F>(dim: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::InvalidArgument("tidal matrix must be nonempty".into()));
        }
        Ok(Self {
            dim,
            source: TidalSource::ExplicitFunction,
            data: TidalData::Function(Arc::new(f)),
            frame: None,
        })
    }

    /// Contracts the chart curvature along the `σ = 0` column of an
    /// orthonormal-gauge tube. `frame0` spans the transverse directions at
    /// `τ = 0`; see [`transverse_frame`] for a default.
    pub fn from_grid(chart: &MetricChart, grid: &WorldsheetGrid, frame0: &[Vec<f64>]) -> Result<Self> {
        let residual = gauge_residuals(grid)?.max();
        if residual > DEVIATION_GAUGE_TOL {
            return Err(Error::NotInGauge {
                residual,
                tolerance: DEVIATION_GAUGE_TOL,
            });
        }
        let taus = grid.taus().to_vec();
        let positions: Vec<Vec<f64>> = (0..grid.n_tau()).map(|k| grid.point(k, 0).to_vec()).collect();
        let xis: Vec<Vec<f64>> = (0..grid.n_tau()).map(|k| grid.xi(k, 0)).collect();
        let zetas: Vec<Vec<f64>> = (0..grid.n_tau()).map(|k| grid.zeta(k, 0)).collect();
        let worldline = HermiteWorldline::new(taus.clone(), positions, xis)?;
        Self::from_chart_along(chart, &worldline, &zetas, &taus, frame0)
    }

    /// Contracts the chart curvature along `worldline` with string tangent
    /// `zetas[k]` at `taus[k]`. The frame is parallel transported from `frame0`.
    pub fn from_chart_along(
        chart: &MetricChart,
        worldline: &dyn Worldline,
        zetas: &[Vec<f64>],
        taus: &[f64],
        frame0: &[Vec<f64>],
    ) -> Result<Self> {
        if zetas.len() != taus.len() {
            return Err(Error::GridMismatch("one ζ sample per τ sample is required".into()));
        }
        if frame0.is_empty() {
            return Err(Error::InvalidArgument("transverse frame needs at least one leg".into()));
        }
        let frame = parallel_transport_frame(chart, worldline, taus, frame0, &zetas[..1])?;
        let mut mats = Vec::with_capacity(taus.len());
        for k in 0..taus.len() {
            mats.push(contract_tidal(chart, &frame.points[k], &frame.tangents[k], &zetas[k], &frame.frames[k])?);
        }
        let h = taus[1] - taus[0];
        Ok(Self {
            dim: frame0.len(),
            source: TidalSource::FromChart,
            data: TidalData::Sampled { t0: taus[0], h, mats },
            frame: Some(frame),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> TidalSource {
        self.source
    }

    /// The transported frame for chart-derived matrices.
    pub fn frame(&self) -> Option<&TransportedFrame> {
        self.frame.as_ref()
    }

    /// `M(τ)`. Sampled matrices are clamped to their τ range.
    pub fn eval(&self, tau: f64) -> DMatrix<f64> {
        match &self.data {
            TidalData::Constant(m) => m.clone(),
            TidalData::Function(f) => f(tau),
            TidalData::Sampled { t0, h, mats } => hermite(mats, *t0, *h, tau),
        }
    }

    /// Whether `M` is known not to depend on τ.
    pub fn is_constant(&self) -> bool {
        matches!(self.data, TidalData::Constant(_))
    }

    /// `λ` if `M = λI` at every stored sample (relative tolerance `1e-10`).
    /// Function-backed matrices are probed at `τ = 0`.
    pub fn scalar_value(&self) -> Option<f64> {
        let probe = |m: &DMatrix<f64>| {
            let lambda = m[(0, 0)];
            let scale = m.amax().max(1e-300);
            let off = (m - DMatrix::identity(self.dim, self.dim) * lambda).amax();
            (off <= 1e-10 * scale || m.amax() == 0.0).then_some(lambda)
        };
        match &self.data {
            TidalData::Constant(m) => probe(m),
            TidalData::Function(f) => probe(&f(0.0)),
            TidalData::Sampled { mats, .. } => {
                let first = probe(&mats[0])?;
                mats.iter()
                    .all(|m| probe(m).is_some_and(|l| (l - first).abs() <= 1e-10 * first.abs().max(1e-300)))
                    .then_some(first)
            }
        }
    }

    /// Largest `|M − Mᵀ|` entry over the stored samples (or at `τ = 0`).
    pub fn symmetry_defect(&self) -> f64 {
        let defect = |m: &DMatrix<f64>| (m - m.transpose()).amax();
        match &self.data {
            TidalData::Constant(m) => defect(m),
            TidalData::Function(f) => defect(&f(0.0)),
            TidalData::Sampled { mats, .. } => mats.iter().map(defect).fold(0.0, f64::max),
        }
    }

    /// Largest entry over the stored samples, or `None` for function-backed matrices.
    pub fn max_abs(&self) -> Option<f64> {
        match &self.data {
            TidalData::Constant(m) => Some(m.amax()),
            TidalData::Function(_) => None,
            TidalData::Sampled { mats, .. } => Some(mats.iter().map(|m| m.amax()).fold(0.0, f64::max)),
        }
    }
}

fn hermite(mats: &[DMatrix<f64>], t0: f64, h: f64, tau: f64) -> DMatrix<f64> {
    let n = mats.len();
    if n == 1 {
        return mats[0].clone();
    }
    let u = ((tau - t0) / h).clamp(0.0, (n - 1) as f64);
    let k = (u.floor() as usize).min(n - 2);
    let s = u - k as f64;
    let slope = |i: usize| -> DMatrix<f64> {
        if i == 0 {
            &mats[1] - &mats[0]
        } else if i == n - 1 {
            &mats[n - 1] - &mats[n - 2]
        } else {
            (&mats[i + 1] - &mats[i - 1]) * 0.5
        }
    };
    let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
    let h10 = s.powi(3) - 2.0 * s * s + s;
    let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
    let h11 = s.powi(3) - s * s;
    &mats[k] * h00 + slope(k) * h10 + &mats[k + 1] * h01 + slope(k + 1) * h11
}

/// `M^i_j = e^i_a R_bcd^a (ξ^b ξ^d − ζ^b ζ^d) e_j^c` at one point, with the
/// dual legs `e^i` taken through the inverse Gram matrix of the frame.
pub fn contract_tidal(
    chart: &MetricChart,
    x: &[f64],
    xi: &[f64],
    zeta: &[f64],
    legs: &[Vec<f64>],
) -> Result<DMatrix<f64>> {
    let g = metric_at(chart, x)?;
    let gram_m = gram(&g, legs);
    let det = gram_m.determinant();
    if det.abs() < FRAME_GRAM_DET_MIN {
        return Err(Error::FrameDegenerate { gram_det: det });
    }
    let gram_inv = gram_m
        .try_inverse()
        .ok_or(Error::FrameDegenerate { gram_det: det })?;
    let riemann = riemann_at(chart, x)?;
    let m = legs.len();
    // raw[i][j] = ⟨e_i, R(ξ, e_j, ξ) − R(ζ, e_j, ζ)⟩
    let mut raw = DMatrix::zeros(m, m);
    for j in 0..m {
        let rx = riemann.apply(xi, &legs[j], xi);
        let rz = riemann.apply(zeta, &legs[j], zeta);
        let v: Vec<f64> = rx.iter().zip(&rz).map(|(a, b)| a - b).collect();
        for i in 0..m {
            raw[(i, j)] = inner_with(&g, &legs[i], &v);
        }
    }
    Ok(gram_inv * raw)
}

/// Orthonormal legs spanning the complement of `ξ`, `ζ` at `x`, built by
/// Gram-Schmidt on the coordinate basis. All legs must be spacelike or all
/// timelike with respect to the chart metric; they are normalized to `±1`.
pub fn transverse_frame(chart: &MetricChart, x: &[f64], xi: &[f64], zeta: &[f64]) -> Result<Vec<Vec<f64>>> {
    let g = metric_at(chart, x)?;
    let n = chart.dim();
    let mut basis: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n);
    for v in [xi, zeta] {
        let mut w = v.to_vec();
        for (b, nb) in &basis {
            let c = inner_with(&g, &w, b) / nb;
            w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
        }
        let nw = inner_with(&g, &w, &w);
        if nw.abs() < 1e-12 {
            return Err(Error::FrameDegenerate { gram_det: nw });
        }
        basis.push((w, nw));
    }
    let mut legs = Vec::with_capacity(n - 2);
    for a in 0..n {
        if legs.len() == n - 2 {
            break;
        }
        let mut w = vec![0.0; n];
        w[a] = 1.0;
        for (b, nb) in &basis {
            let c = inner_with(&g, &w, b) / nb;
            w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
        }
        let nw = inner_with(&g, &w, &w);
        if nw.abs() < 1e-10 {
            continue;
        }
        let scale = nw.abs().sqrt();
        let unit: Vec<f64> = w.iter().map(|v| v / scale).collect();
        basis.push((unit.clone(), nw.signum()));
        legs.push(unit);
    }
    if legs.len() != n - 2 {
        return Err(Error::FrameDegenerate { gram_det: 0.0 });
    }
    Ok(legs)
}
