//! Leapfrog evolution of the gauge-fixed string equation
//!
//! ```text
//! ∂²_τ X^b = ∂²_σ X^b + Γ^b_cd (ζ^c ζ^d − ξ^c ξ^d)
//! ```
//!
//! as a 1+1 wave system on a periodic σ lattice. Each step is a
//! drift-kick-drift (position Verlet) update. The kick is implicit in the
//! velocity because the Γ term is quadratic in `ξ`; it is solved by fixed-point
//! iteration, which terminates after one pass in flat charts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::{christoffel_at, inner_with, metric_at, MetricChart};
use crate::worldsheet::{d2_sigma, d_sigma, geodesic_residual_gauge, NodeField, WorldsheetGrid};

/// Default ceiling on the slice gauge residuals before a run is aborted.
pub const DEFAULT_GAUGE_CEILING: f64 = 1e-1;

const FIXED_POINT_TOL: f64 = 1e-14;
const FIXED_POINT_MAX_ITER: usize = 100;

/// One constant-τ slice of the string together with its velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState {
    /// Embedding, stored as a single-row node field (`1 × Nσ × n`).
    pub x: NodeField,
    /// `∂X/∂τ`, same shape as `x`.
    pub v: NodeField,
    pub tau: f64,
    pub dt: f64,
    /// `X(σ + 2π) − X(σ)`
    pub winding: Vec<f64>,
}

impl EvolutionState {
    pub fn new(x: NodeField, v: NodeField, tau: f64, dt: f64, winding: Vec<f64>) -> Result<Self> {
        if x.n_tau() != 1 || !x.same_shape(&v) {
            return Err(Error::GridMismatch("state needs single-row x and v of equal shape".into()));
        }
        if winding.len() != x.comps() {
            return Err(Error::DimensionMismatch {
                expected: x.comps(),
                found: winding.len(),
            });
        }
        if x.n_sigma() < 3 {
            return Err(Error::InvalidArgument("need at least 3 sigma samples".into()));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { x, v, tau, dt, winding })
    }

    /// Samples `initial(σ) = (X, V)` on `n_sigma` nodes.
    pub fn from_fn<F>(n_sigma: usize, dt: f64, winding: Vec<f64>, initial: F) -> Result<Self>
    where
        F: Fn(f64) -> (Vec<f64>, Vec<f64>),
    {
        let n = winding.len();
        let mut x = NodeField::zeros(1, n_sigma, n);
        let mut v = x.clone();
        for j in 0..n_sigma {
            let (p, q) = initial(std::f64::consts::TAU * j as f64 / n_sigma as f64);
            if p.len() != n || q.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if p.len() != n { p.len() } else { q.len() },
                });
            }
            x.set(0, j, &p);
            v.set(0, j, &q);
        }
        Self::new(x, v, 0.0, dt, winding)
    }

    /// Replaces the time component (index 0) of every velocity so that
    /// `ξ·ξ + ζ·ζ = 0` nodewise, keeping the spatial components.
    ///
    /// Requires a static chart (`g_00 < 0`, `g_0i = 0`). The condition
    /// `ξ·ζ = 0` is not enforced and should hold by construction.
    pub fn with_gauge_velocity(mut self, chart: &MetricChart) -> Result<Self> {
        let n = self.dim();
        for j in 0..self.n_sigma() {
            let x = self.x.get(0, j).to_vec();
            let g = metric_at(chart, &x)?;
            if !(g[(0, 0)] < 0.0) || (1..n).any(|i| g[(0, i)] != 0.0) {
                return Err(Error::InvalidArgument(
                    "gauge velocity needs a static chart with x⁰ as time".into(),
                ));
            }
            let zeta = self.zeta(j);
            let mut v = self.v.get(0, j).to_vec();
            v[0] = 0.0;
            let spatial = inner_with(&g, &v, &v) + inner_with(&g, &zeta, &zeta);
            v[0] = (spatial / -g[(0, 0)]).max(0.0).sqrt();
            self.v.set(0, j, &v);
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.x.comps()
    }

    pub fn n_sigma(&self) -> usize {
        self.x.n_sigma()
    }

    pub fn dsigma(&self) -> f64 {
        std::f64::consts::TAU / self.n_sigma() as f64
    }

    /// `ζ = ∂X/∂σ` at node `j`.
    pub fn zeta(&self, j: usize) -> Vec<f64> {
        d_sigma(&self.x, self.dsigma(), 0, j, Some(&self.winding))
    }

    /// Slice gauge residuals `(max |ξ·ζ|, max |ξ·ξ + ζ·ζ|)` with `ξ = V`.
    pub fn gauge_residuals(&self, chart: &MetricChart) -> Result<(f64, f64)> {
        let (mut r1, mut r2): (f64, f64) = (0.0, 0.0);
        for j in 0..self.n_sigma() {
            let g = metric_at(chart, self.x.get(0, j))?;
            let (v, z) = (self.v.get(0, j), self.zeta(j));
            r1 = r1.max(inner_with(&g, v, &z).abs());
            r2 = r2.max((inner_with(&g, v, v) + inner_with(&g, &z, &z)).abs());
        }
        Ok((r1, r2))
    }

    /// Discrete wave energy
    /// `½Δσ Σ_j [|V_j|² + |D⁺X_j|² − (dt²/4)|D⁺V_j|²]` in Euclidean component
    /// norms. Conserved to roundoff by the flat-chart scheme.
    pub fn energy(&self) -> f64 {
        let (ns, n, h) = (self.n_sigma(), self.dim(), self.dsigma());
        let mut total = 0.0;
        for j in 0..ns {
            let jp = (j + 1) % ns;
            let wrap = if jp == 0 { 1.0 } else { 0.0 };
            let (x0, x1) = (self.x.get(0, j), self.x.get(0, jp));
            let (v0, v1) = (self.v.get(0, j), self.v.get(0, jp));
            for a in 0..n {
                let dx = (x1[a] + wrap * self.winding[a] - x0[a]) / h;
                let dv = (v1[a] - v0[a]) / h;
                total += v0[a] * v0[a] + dx * dx - 0.25 * self.dt * self.dt * dv * dv;
            }
        }
        0.5 * h * total
    }

    fn check_timelike(&self, chart: &MetricChart, step: usize) -> Result<()> {
        for j in 0..self.n_sigma() {
            let g = metric_at(chart, self.x.get(0, j))?;
            let (v, z) = (self.v.get(0, j), self.zeta(j));
            let (vv, vz, zz) = (inner_with(&g, v, v), inner_with(&g, v, &z), inner_with(&g, &z, &z));
            let disc = vz * vz - vv * zz;
            if !(disc > 0.0) {
                return Err(Error::DegenerateTube {
                    tau_index: step,
                    sigma_index: j,
                    discriminant: disc,
                });
            }
        }
        Ok(())
    }
}

/// Knobs for [`step_with`] and [`evolve_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    /// Abort once either slice gauge residual exceeds this value.
    pub gauge_ceiling: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            gauge_ceiling: DEFAULT_GAUGE_CEILING,
        }
    }
}

/// `∂²_σX + Γ(ζ,ζ) − Γ(u,u)` at every node of the slice `x`.
fn acceleration(chart: &MetricChart, x: &NodeField, u: &NodeField, winding: &[f64]) -> Result<NodeField> {
    let ns = x.n_sigma();
    let h = std::f64::consts::TAU / ns as f64;
    let mut out = x.clone();
    for j in 0..ns {
        let gamma = christoffel_at(chart, x.get(0, j))?;
        let zeta = d_sigma(x, h, 0, j, Some(winding));
        let lap = d2_sigma(x, h, 0, j, Some(winding));
        let gz = gamma.contract(&zeta, &zeta);
        let gu = gamma.contract(u.get(0, j), u.get(0, j));
        let o = out.get_mut(0, j);
        for a in 0..o.len() {
            o[a] = lap[a] + gz[a] - gu[a];
        }
    }
    Ok(out)
}

fn check_cfl(state: &EvolutionState) -> Result<()> {
    let ds = state.dsigma();
    if state.dt > ds * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt: state.dt, dsigma: ds });
    }
    Ok(())
}

/// One drift-kick-drift step with default settings.
pub fn step(state: &EvolutionState, chart: &MetricChart) -> Result<EvolutionState> {
    step_with(state, chart, &EvolutionConfig::default())
}

pub fn step_with(state: &EvolutionState, chart: &MetricChart, config: &EvolutionConfig) -> Result<EvolutionState> {
    step_indexed(state, chart, config, 0)
}

fn step_indexed(
    state: &EvolutionState,
    chart: &MetricChart,
    config: &EvolutionConfig,
    index: usize,
) -> Result<EvolutionState> {
    check_cfl(state)?;
    if state.dim() != chart.dim() {
        return Err(Error::DimensionMismatch {
            expected: chart.dim(),
            found: state.dim(),
        });
    }
    state.check_timelike(chart, index)?;
    let dt = state.dt;
    let x_half = state.x.axpy(0.5 * dt, &state.v)?;

    let mut v_new = state.v.axpy(dt, &acceleration(chart, &x_half, &state.v, &state.winding)?)?;
    for _ in 0..FIXED_POINT_MAX_ITER {
        let mid = state.v.axpy(1.0, &v_new)?.scaled(0.5);
        let next = state.v.axpy(dt, &acceleration(chart, &x_half, &mid, &state.winding)?)?;
        let change = next.axpy(-1.0, &v_new)?.max_abs();
        v_new = next;
        if change <= FIXED_POINT_TOL * v_new.max_abs().max(1.0) {
            break;
        }
    }

    let next = EvolutionState {
        x: x_half.axpy(0.5 * dt, &v_new)?,
        v: v_new,
        tau: state.tau + dt,
        dt,
        winding: state.winding.clone(),
    };
    let (r1, r2) = next.gauge_residuals(chart)?;
    let residual = r1.max(r2);
    if residual > config.gauge_ceiling {
        return Err(Error::GaugeDrift {
            tau: next.tau,
            residual,
            ceiling: config.gauge_ceiling,
        });
    }
    Ok(next)
}

/// Per-step monitoring record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub tau: f64,
    /// `max |ξ·ζ|` on the slice
    pub gauge_res1: f64,
    /// `max |ξ·ξ + ζ·ζ|` on the slice
    pub gauge_res2: f64,
    /// Largest gauge-fixed geodesic residual on this row of the assembled tube.
    pub geodesic_res: f64,
    pub energy: f64,
}

/// Result of [`evolve`]: the tube and its per-row diagnostics.
#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub grid: WorldsheetGrid,
    pub diagnostics: Vec<StepDiagnostics>,
    pub final_state: EvolutionState,
}

impl EvolutionRun {
    /// Largest gauge-fixed geodesic residual over rows `1..n_tau-1`.
    pub fn interior_geodesic_residual(&self) -> f64 {
        let d = &self.diagnostics;
        d[1..d.len() - 1].iter().map(|s| s.geodesic_res).fold(0.0, f64::max)
    }

    pub fn max_gauge_residual(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|s| s.gauge_res1.max(s.gauge_res2))
            .fold(0.0, f64::max)
    }
}

/// Steps from `initial.tau` to `initial.tau + t_span`.
///
/// The step is shrunk to `t_span / N` with the smallest `N` for which it does
/// not exceed `initial.dt`, so the run ends exactly at the requested time.
pub fn evolve(initial: &EvolutionState, chart: &MetricChart, t_span: f64) -> Result<EvolutionRun> {
    evolve_with(initial, chart, t_span, &EvolutionConfig::default())
}

pub fn evolve_with(
    initial: &EvolutionState,
    chart: &MetricChart,
    t_span: f64,
    config: &EvolutionConfig,
) -> Result<EvolutionRun> {
    if !(t_span > 0.0) {
        return Err(Error::InvalidArgument(format!("evolution span must be positive, got {t_span}")));
    }
    check_cfl(initial)?;
    let steps = ((t_span / initial.dt) - 1e-9).ceil().max(3.0) as usize;
    let dt = t_span / steps as f64;
    let mut state = EvolutionState { dt, ..initial.clone() };
    let (ns, n) = (state.n_sigma(), state.dim());

    let mut rows = Vec::with_capacity((steps + 1) * ns * n);
    let mut partial = Vec::with_capacity(steps + 1);
    let mut record = |s: &EvolutionState| -> Result<()> {
        rows.extend_from_slice(s.x.as_slice());
        let (g1, g2) = s.gauge_residuals(chart)?;
        partial.push((s.tau, g1, g2, s.energy()));
        Ok(())
    };
    record(&state)?;
    for k in 0..steps {
        state = step_indexed(&state, chart, config, k)?;
        record(&state)?;
    }

    let taus: Vec<f64> = (0..=steps).map(|k| initial.tau + k as f64 * dt).collect();
    let x = NodeField::from_vec(steps + 1, ns, n, rows)?;
    let grid = WorldsheetGrid::new(chart.clone(), taus, state.winding.clone(), x)?;
    let residual = geodesic_residual_gauge(&grid)?;
    let diagnostics = partial
        .into_iter()
        .enumerate()
        .map(|(k, (tau, gauge_res1, gauge_res2, energy))| StepDiagnostics {
            tau,
            gauge_res1,
            gauge_res2,
            geodesic_res: residual.row_max_norm(k),
            energy,
        })
        .collect();
    Ok(EvolutionRun {
        grid,
        diagnostics,
        final_state: state,
    })
}

/// Initial data of the flat breathing ring: `X = (0, R cos σ, R sin σ, 0)`,
/// `V = (R, 0, 0, 0)`.
pub fn breathing_ring_state(radius: f64, n_sigma: usize, dt: f64) -> Result<EvolutionState> {
    EvolutionState::from_fn(n_sigma, dt, vec![0.0; 4], |s| {
        (vec![0.0, radius * s.cos(), radius * s.sin(), 0.0], vec![radius, 0.0, 0.0, 0.0])
    })
}

/// Static great circle on `ℝ × S²` of curvature `K`: `X = (0, π/2, σ)`, `V = (1/√K, 0, 0)`.
pub fn equator_state(curvature: f64, n_sigma: usize, dt: f64) -> Result<EvolutionState> {
    let r = 1.0 / curvature.sqrt();
    EvolutionState::from_fn(n_sigma, dt, vec![0.0, 0.0, std::f64::consts::TAU], |s| {
        (vec![0.0, std::f64::consts::FRAC_PI_2, s], vec![r, 0.0, 0.0])
    })
}

/// Great circle tilted out of the equator, `θ = π/2 + ε cos σ`, released from
/// rest with the time velocity set by the gauge condition.
pub fn perturbed_equator_state(
    chart: &MetricChart,
    amplitude: f64,
    n_sigma: usize,
    dt: f64,
) -> Result<EvolutionState> {
    EvolutionState::from_fn(n_sigma, dt, vec![0.0, 0.0, std::f64::consts::TAU], |s| {
        (
            vec![0.0, std::f64::consts::FRAC_PI_2 + amplitude * s.cos(), s],
            vec![0.0; 3],
        )
    })?
    .with_gauge_velocity(chart)
}
