use nalgebra::DMatrix;

use super::{christoffel_at, inner_with, metric_at, MetricChart};
use crate::error::{Error, Result};

/// A τ-parameterized curve in chart coordinates.
pub trait Worldline {
    fn position(&self, tau: f64) -> Vec<f64>;
    /// `ξ = dx/dτ`
    fn tangent(&self, tau: f64) -> Vec<f64>;
}

/// Worldline given by a closure returning `(position, tangent)`.
pub struct FnWorldline<F>(pub F);

impl<F> Worldline for FnWorldline<F>
where
    F: Fn(f64) -> (Vec<f64>, Vec<f64>),
{
    fn position(&self, tau: f64) -> Vec<f64> {
        (self.0)(tau).0
    }

    fn tangent(&self, tau: f64) -> Vec<f64> {
        (self.0)(tau).1
    }
}

/// Cubic Hermite interpolation through sampled positions and tangents.
#[derive(Debug, Clone)]
pub struct HermiteWorldline {
    taus: Vec<f64>,
    positions: Vec<Vec<f64>>,
    tangents: Vec<Vec<f64>>,
}

impl HermiteWorldline {
    pub fn new(taus: Vec<f64>, positions: Vec<Vec<f64>>, tangents: Vec<Vec<f64>>) -> Result<Self> {
        if taus.len() < 2 || positions.len() != taus.len() || tangents.len() != taus.len() {
            return Err(Error::InvalidArgument(
                "Hermite worldline needs at least two matching samples".into(),
            ));
        }
        Ok(Self {
            taus,
            positions,
            tangents,
        })
    }

    fn locate(&self, tau: f64) -> (usize, f64, f64) {
        let last = self.taus.len() - 2;
        let t0 = self.taus[0];
        let h = self.taus[1] - t0;
        let k = (((tau - t0) / h).floor().max(0.0) as usize).min(last);
        let h = self.taus[k + 1] - self.taus[k];
        (k, (tau - self.taus[k]) / h, h)
    }
}

impl Worldline for HermiteWorldline {
    fn position(&self, tau: f64) -> Vec<f64> {
        let (k, s, h) = self.locate(tau);
        let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
        let h10 = s.powi(3) - 2.0 * s * s + s;
        let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
        let h11 = s.powi(3) - s * s;
        let (p0, p1) = (&self.positions[k], &self.positions[k + 1]);
        let (m0, m1) = (&self.tangents[k], &self.tangents[k + 1]);
        (0..p0.len())
            .map(|i| h00 * p0[i] + h10 * h * m0[i] + h01 * p1[i] + h11 * h * m1[i])
            .collect()
    }

    fn tangent(&self, tau: f64) -> Vec<f64> {
        let (k, s, h) = self.locate(tau);
        let d00 = (6.0 * s * s - 6.0 * s) / h;
        let d10 = 3.0 * s * s - 4.0 * s + 1.0;
        let d01 = (-6.0 * s * s + 6.0 * s) / h;
        let d11 = 3.0 * s * s - 2.0 * s;
        let (p0, p1) = (&self.positions[k], &self.positions[k + 1]);
        let (m0, m1) = (&self.tangents[k], &self.tangents[k + 1]);
        (0..p0.len())
            .map(|i| d00 * p0[i] + d10 * m0[i] + d01 * p1[i] + d11 * m1[i])
            .collect()
    }
}

/// Orthonormal spatial frame carried along a worldline.
#[derive(Debug, Clone)]
pub struct TransportedFrame {
    pub taus: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub tangents: Vec<Vec<f64>>,
    /// `frames[k][i]` is `e_i` at `taus[k]`.
    pub frames: Vec<Vec<Vec<f64>>>,
    chart: MetricChart,
}

impl TransportedFrame {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Number of frame legs.
    pub fn legs(&self) -> usize {
        self.frames.first().map_or(0, Vec::len)
    }

    pub fn chart(&self) -> &MetricChart {
        &self.chart
    }

    /// `⟨e_i, e_j⟩` at sample `k`.
    pub fn gram_at(&self, k: usize) -> Result<DMatrix<f64>> {
        let g = metric_at(&self.chart, &self.points[k])?;
        Ok(gram(&g, &self.frames[k]))
    }

    /// Largest change of any pairwise inner product relative to the first sample.
    pub fn gram_drift(&self) -> Result<f64> {
        let g0 = self.gram_at(0)?;
        let mut worst: f64 = 0.0;
        for k in 1..self.len() {
            worst = worst.max((self.gram_at(k)? - &g0).amax());
        }
        Ok(worst)
    }
}

pub(crate) fn gram(g: &DMatrix<f64>, vectors: &[Vec<f64>]) -> DMatrix<f64> {
    let m = vectors.len();
    DMatrix::from_fn(m, m, |i, j| inner_with(g, &vectors[i], &vectors[j]))
}

pub(crate) fn check_uniform_grid(taus: &[f64]) -> Result<f64> {
    if taus.len() < 2 {
        return Err(Error::InvalidArgument("need at least two tau samples".into()));
    }
    let h = taus[1] - taus[0];
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("tau samples must increase".into()));
    }
    let scale = taus[0].abs().max(taus[taus.len() - 1].abs()).max(1.0);
    let deviation = taus
        .windows(2)
        .map(|w| ((w[1] - w[0]) - h).abs())
        .fold(0.0, f64::max);
    if deviation > 1e-12 * scale {
        return Err(Error::NonUniformGrid { deviation });
    }
    Ok(h)
}

fn transport_rhs(
    chart: &MetricChart,
    worldline: &dyn Worldline,
    tau: f64,
    frame: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    let x = worldline.position(tau);
    let xi = worldline.tangent(tau);
    let gamma = christoffel_at(chart, &x)?;
    Ok(frame
        .iter()
        .map(|e| gamma.contract(&xi, e).into_iter().map(|v| -v).collect())
        .collect())
}

fn axpy(frame: &[Vec<f64>], dir: &[Vec<f64>], s: f64) -> Vec<Vec<f64>> {
    frame
        .iter()
        .zip(dir)
        .map(|(e, d)| e.iter().zip(d).map(|(a, b)| a + s * b).collect())
        .collect()
}

/// Solves `de_i^b/dτ + Γ^b_cd ξ^c e_i^d = 0` along `worldline` with fixed-step
/// RK4 on the uniform grid `taus`.
///
/// `frame0` must be orthonormal, orthogonal to `ξ(taus[0])` and to every
/// vector in `also_orthogonal_to` (typically `ζ`).
pub fn parallel_transport_frame(
    chart: &MetricChart,
    worldline: &dyn Worldline,
    taus: &[f64],
    frame0: &[Vec<f64>],
    also_orthogonal_to: &[Vec<f64>],
) -> Result<TransportedFrame> {
    let h = check_uniform_grid(taus)?;
    let n = chart.dim();
    if frame0.iter().any(|e| e.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: frame0.iter().map(Vec::len).find(|l| *l != n).unwrap_or(0),
        });
    }
    let x0 = worldline.position(taus[0]);
    let g0 = metric_at(chart, &x0)?;
    let deviation = (gram(&g0, frame0) - DMatrix::identity(frame0.len(), frame0.len())).amax();
    if deviation > 1e-8 {
        return Err(Error::FrameNotOrthonormal { deviation });
    }
    let xi0 = worldline.tangent(taus[0]);
    for v in std::iter::once(&xi0).chain(also_orthogonal_to) {
        let scale = inner_with(&g0, v, v).abs().sqrt().max(1.0);
        for e in frame0 {
            let overlap = inner_with(&g0, v, e).abs();
            if overlap > 1e-8 * scale {
                return Err(Error::FrameNotOrthonormal { deviation: overlap });
            }
        }
    }

    let mut frames = Vec::with_capacity(taus.len());
    let mut points = Vec::with_capacity(taus.len());
    let mut tangents = Vec::with_capacity(taus.len());
    let mut e = frame0.to_vec();
    for (k, &tau) in taus.iter().enumerate() {
        if k > 0 {
            let t = taus[k - 1];
            let k1 = transport_rhs(chart, worldline, t, &e)?;
            let k2 = transport_rhs(chart, worldline, t + 0.5 * h, &axpy(&e, &k1, 0.5 * h))?;
            let k3 = transport_rhs(chart, worldline, t + 0.5 * h, &axpy(&e, &k2, 0.5 * h))?;
            let k4 = transport_rhs(chart, worldline, t + h, &axpy(&e, &k3, h))?;
            for (i, v) in e.iter_mut().enumerate() {
                for (b, c) in v.iter_mut().enumerate() {
                    *c += h / 6.0 * (k1[i][b] + 2.0 * k2[i][b] + 2.0 * k3[i][b] + k4[i][b]);
                }
            }
        }
        frames.push(e.clone());
        points.push(worldline.position(tau));
        tangents.push(worldline.tangent(tau));
    }
    Ok(TransportedFrame {
        taus: taus.to_vec(),
        points,
        tangents,
        frames,
        chart: chart.clone(),
    })
}
