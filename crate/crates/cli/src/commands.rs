use std::f64::consts::{PI, TAU};
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;
use wsmorse::acceptance::{run_criterion, suite_ids, AcceptanceReport};
use wsmorse::evolution::{
    breathing_ring_state, equator_state, evolve_with, perturbed_equator_state, EvolutionConfig, EvolutionState,
};
use wsmorse::indexform::{
    broken_jacobi_field, index_form, index_form_integrand, negative_mode, positivity_certificate, random_field,
    RandomFieldSpec, VariationField, DEFAULT_EPS,
};
use wsmorse::jacobi::{
    find_conjugate_strings, integrate_jacobi, transverse_frame, wronskian_check, ConjugateSearch, TidalMatrix,
};
use wsmorse::manifold::{ChartKind, ConstantCurvatureSpec, FnWorldline, MetricChart};

use crate::output::{csv, json, OutDir, Stamp, VERSION};
use crate::scenario::{Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] wsmorse::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("acceptance suite `{0}` failed")]
    AcceptanceFailed(String),
}

impl CliError {
    /// 1 for failed acceptance, 2 for invalid input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::AcceptanceFailed(_) => 1,
            CliError::Scenario(_) | CliError::Validation(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Scenario(_) => "scenario",
            CliError::Validation(_) => "validation",
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::AcceptanceFailed(_) => "acceptance_failed",
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Command-line overrides applied on top of the scenario.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub eps: Option<Vec<f64>>,
    pub dt: Option<f64>,
}

pub struct Context {
    pub scenario: Scenario,
    pub stamp: Stamp,
    pub out_root: PathBuf,
    pub seed: u64,
    pub eps: Option<Vec<f64>>,
    pub dt: Option<f64>,
}

impl Context {
    pub fn new(scenario: Scenario, overrides: Overrides) -> CliResult<Self> {
        if let Some(dt) = overrides.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(CliError::Validation(format!("--dt must be positive, got {dt}")));
            }
        }
        if let Some(eps) = &overrides.eps {
            validate_eps(eps)?;
        }
        let seed = match overrides.seed {
            Some(s) => s,
            None => scenario.seed()?,
        };
        let stamp = Stamp {
            scenario: scenario.name(),
            scenario_hash: scenario.hash(),
            version: VERSION,
        };
        Ok(Self {
            out_root: overrides.out.unwrap_or_else(|| scenario.output_dir()),
            stamp,
            seed,
            eps: overrides.eps,
            dt: overrides.dt,
            scenario,
        })
    }

    fn out_dir(&self) -> CliResult<OutDir> {
        Ok(OutDir::create(&self.out_root, &self.stamp.scenario)?)
    }
}

fn validate_eps(eps: &[f64]) -> CliResult<()> {
    if eps.len() < 2 || eps.iter().any(|e| !(*e > 0.0)) {
        return Err(CliError::Validation("eps needs at least two positive values".into()));
    }
    Ok(())
}

fn chart(s: &Scenario) -> CliResult<Option<(ConstantCurvatureSpec, MetricChart)>> {
    let Some(kind) = s.raw("manifold.kind") else {
        return Ok(None);
    };
    if kind == "custom" {
        return Err(CliError::Validation(
            "manifold.kind = custom is only available through the library API".into(),
        ));
    }
    let kind: ChartKind = kind.parse()?;
    let dim: usize = s.require("manifold.dim", "an unsigned integer")?;
    if dim < 3 {
        return Err(CliError::Validation(format!("manifold.dim must be at least 3, got {dim}")));
    }
    let k = match kind {
        ChartKind::Flat => s.real("manifold.K")?.unwrap_or(0.0),
        _ => s.real("manifold.K")?.ok_or_else(|| ScenarioError::Missing("manifold.K".into()))?,
    };
    let spec = ConstantCurvatureSpec { kind, curvature: k, dim };
    let mut chart = spec.build()?;
    if let Some(h) = s.positive("manifold.fd_step")? {
        chart = chart.with_fd_step(h)?;
    }
    Ok(Some((spec, chart)))
}

fn require_chart(s: &Scenario) -> CliResult<(ConstantCurvatureSpec, MetricChart)> {
    chart(s)?.ok_or_else(|| ScenarioError::Missing("manifold.kind".into()).into())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tube {
    BreathingRing { radius: f64 },
    Equator,
    TiltedEquator { amplitude: f64 },
}

fn tube(s: &Scenario, spec: &ConstantCurvatureSpec) -> CliResult<Tube> {
    let kind = s.require::<String>("tube.kind", "a tube kind")?;
    let tube = match kind.as_str() {
        "breathing_ring" => Tube::BreathingRing {
            radius: s.positive("tube.R")?.unwrap_or(1.0),
        },
        "equator" => Tube::Equator,
        "tilted_equator" => Tube::TiltedEquator {
            amplitude: s.real("tube.amplitude")?.unwrap_or(0.2),
        },
        other => {
            return Err(CliError::Validation(format!(
                "unknown tube.kind `{other}` (known: breathing_ring, equator, tilted_equator)"
            )))
        }
    };
    let ok = match tube {
        Tube::BreathingRing { .. } => spec.kind == ChartKind::Flat && spec.dim == 4,
        Tube::Equator | Tube::TiltedEquator { .. } => spec.kind == ChartKind::ProductTimeSphere && spec.dim == 3,
    };
    if !ok {
        return Err(CliError::Validation(format!(
            "tube.kind = {kind} does not fit manifold {} of dimension {}",
            spec.kind, spec.dim
        )));
    }
    Ok(tube)
}

#[derive(Serialize)]
struct SimulateSummary {
    tube: String,
    n_sigma: usize,
    dt: f64,
    t_end: f64,
    steps: usize,
    max_gauge_residual: f64,
    interior_geodesic_residual: f64,
    energy_drift: f64,
    files: Vec<String>,
}

pub fn simulate(ctx: &Context) -> CliResult<()> {
    let s = &ctx.scenario;
    let (spec, chart) = require_chart(s)?;
    let tube = tube(s, &spec)?;
    let t_end = s.positive("grid.T")?.ok_or_else(|| ScenarioError::Missing("grid.T".into()))?;
    let ns: usize = s.require("grid.Nsigma", "an unsigned integer")?;
    if ns < 4 {
        return Err(CliError::Validation(format!("grid.Nsigma must be at least 4, got {ns}")));
    }
    let dsigma = TAU / ns as f64;
    let dt = match (ctx.dt, s.positive("evolution.dt")?, s.get::<usize>("grid.Ntau", "an unsigned integer")?) {
        (Some(dt), _, _) | (None, Some(dt), _) => dt,
        (None, None, Some(0)) => return Err(CliError::Validation("grid.Ntau must be positive".into())),
        (None, None, Some(n)) => t_end / n as f64,
        (None, None, None) => 0.5 * dsigma,
    };
    if dt > dsigma * (1.0 + 1e-12) {
        return Err(CliError::Validation(format!(
            "CFL rule violated: dt = {dt} exceeds dsigma = 2π/Nsigma = {dsigma}"
        )));
    }
    let cfg = EvolutionConfig {
        gauge_ceiling: s.positive("evolution.gauge_ceiling")?.unwrap_or(EvolutionConfig::default().gauge_ceiling),
    };
    let state: EvolutionState = match tube {
        Tube::BreathingRing { radius } => breathing_ring_state(radius, ns, dt)?,
        Tube::Equator => equator_state(spec.curvature, ns, dt)?,
        Tube::TiltedEquator { amplitude } => perturbed_equator_state(&chart, amplitude, ns, dt)?,
    };
    let run = evolve_with(&state, &chart, t_end, &cfg)?;
    let out = ctx.out_dir()?;
    let rows: Vec<Vec<f64>> = run
        .diagnostics
        .iter()
        .map(|d| vec![d.tau, d.gauge_res1, d.gauge_res2, d.geodesic_res, d.energy])
        .collect();
    let mut files = vec!["simulate.csv".to_string()];
    out.write(
        "simulate.csv",
        &csv(&ctx.stamp, &["tau", "gauge_res1", "gauge_res2", "geodesic_res", "energy"], &rows),
    )?;
    let every: usize = s.get("output.every", "an unsigned integer")?.unwrap_or(0);
    if every > 0 {
        let grid = &run.grid;
        let comps: Vec<String> = (0..grid.dim()).map(|a| format!("x{a}")).collect();
        let mut header = vec!["tau", "sigma"];
        header.extend(comps.iter().map(String::as_str));
        for k in (0..grid.n_tau()).step_by(every) {
            let rows: Vec<Vec<f64>> = (0..grid.n_sigma())
                .map(|j| {
                    let mut r = vec![grid.taus()[k], grid.sigma(j)];
                    r.extend_from_slice(grid.point(k, j));
                    r
                })
                .collect();
            let name = format!("grid_{k:06}.csv");
            out.write(&name, &csv(&ctx.stamp, &header, &rows))?;
            files.push(name);
        }
    }
    let e0 = run.diagnostics[0].energy;
    let summary = SimulateSummary {
        tube: format!("{tube:?}"),
        n_sigma: ns,
        dt,
        t_end: run.grid.t_end(),
        steps: run.grid.n_tau() - 1,
        max_gauge_residual: run.max_gauge_residual(),
        interior_geodesic_residual: run.interior_geodesic_residual(),
        energy_drift: run
            .diagnostics
            .iter()
            .map(|d| ((d.energy - e0) / e0).abs())
            .fold(0.0, f64::max),
        files,
    };
    out.write("simulate.json", &json(&ctx.stamp, &summary))?;
    println!(
        "simulate: {} steps, max gauge residual {:.3e}, geodesic residual {:.3e}",
        summary.steps, summary.max_gauge_residual, summary.interior_geodesic_residual
    );
    Ok(())
}

/// Tidal matrix of the scenario: explicit `λ I` when `jacobi.lambda` is set,
/// otherwise contracted from the chart along the tube's `σ = 0` worldline.
fn tidal(s: &Scenario, t_end: f64, dt: f64) -> CliResult<(TidalMatrix, Option<f64>)> {
    if let Some(lambda) = s.real("jacobi.lambda")? {
        let default_dim = match s.get::<usize>("manifold.dim", "an unsigned integer")? {
            Some(n) if n >= 3 => n - 2,
            Some(n) => return Err(CliError::Validation(format!("manifold.dim must be at least 3, got {n}"))),
            None => 1,
        };
        let dim: usize = s.get("jacobi.transverse_dim", "an unsigned integer")?.unwrap_or(default_dim);
        if dim == 0 {
            return Err(CliError::Validation("jacobi.transverse_dim must be at least 1".into()));
        }
        return Ok((TidalMatrix::scalar(lambda, dim)?, Some(lambda)));
    }
    let (spec, chart) = require_chart(s)?;
    let tube = tube(s, &spec)?;
    let n = (t_end / dt).ceil().max(2.0) as usize;
    let taus: Vec<f64> = (0..=n).map(|k| t_end * k as f64 / n as f64).collect();
    let (worldline, zetas): (Box<dyn Fn(f64) -> (Vec<f64>, Vec<f64>)>, Vec<Vec<f64>>) = match tube {
        Tube::BreathingRing { radius } => (
            Box::new(move |t: f64| {
                (
                    vec![radius * t, radius * t.cos(), 0.0, 0.0],
                    vec![radius, -radius * t.sin(), 0.0, 0.0],
                )
            }),
            taus.iter().map(|t| vec![0.0, 0.0, radius * t.cos(), 0.0]).collect(),
        ),
        Tube::Equator => {
            let speed = 1.0 / spec.curvature.sqrt();
            (
                Box::new(move |t: f64| (vec![speed * t, PI / 2.0, 0.0], vec![speed, 0.0, 0.0])),
                taus.iter().map(|_| vec![0.0, 0.0, 1.0]).collect(),
            )
        }
        Tube::TiltedEquator { .. } => {
            return Err(CliError::Validation(
                "tilted_equator has no closed-form centre worldline; set jacobi.lambda".into(),
            ))
        }
    };
    let (x0, xi0) = worldline(0.0);
    let frame0 = transverse_frame(&chart, &x0, &xi0, &zetas[0])?;
    let m = TidalMatrix::from_chart_along(&chart, &FnWorldline(worldline), &zetas, &taus, &frame0)?;
    Ok((m, None))
}

#[derive(Serialize, Clone)]
struct StringRecord {
    tau_star: f64,
    multiplicity: usize,
    tangential: bool,
}

fn strings(search: &ConjugateSearch) -> Vec<StringRecord> {
    search
        .strings
        .iter()
        .map(|c| StringRecord {
            tau_star: c.tau_star,
            multiplicity: c.multiplicity,
            tangential: c.tangential,
        })
        .collect()
}

#[derive(Serialize)]
struct JacobiSummary {
    source: wsmorse::jacobi::TidalSource,
    lambda: Option<f64>,
    transverse_dim: usize,
    #[serde(rename = "T")]
    t_end: f64,
    dt: f64,
    conjugate_strings: Vec<StringRecord>,
    warnings: Vec<String>,
    max_wronskian_norm: f64,
}

fn jacobi_times(ctx: &Context, key_t: &str) -> CliResult<(f64, f64)> {
    let s = &ctx.scenario;
    let t_end = s
        .positive(key_t)?
        .or(s.positive("jacobi.T")?)
        .ok_or_else(|| ScenarioError::Missing(key_t.into()))?;
    let dt = match ctx.dt {
        Some(dt) => dt,
        None => s.positive("jacobi.dt")?.unwrap_or(1e-3),
    };
    Ok((t_end, dt))
}

pub fn jacobi(ctx: &Context) -> CliResult<()> {
    let (t_end, dt) = jacobi_times(ctx, "jacobi.T")?;
    let (m, lambda) = tidal(&ctx.scenario, t_end, dt)?;
    let traj = integrate_jacobi(&m, t_end, dt)?;
    let search = find_conjugate_strings(&traj);
    let out = ctx.out_dir()?;
    let rows: Vec<Vec<f64>> = (0..traj.len())
        .map(|k| vec![traj.taus[k], traj.det_a[k], traj.wronskian_norm[k]])
        .collect();
    out.write("jacobi.csv", &csv(&ctx.stamp, &["tau", "detA", "wronskian_norm"], &rows))?;
    let srows: Vec<Vec<f64>> = search
        .strings
        .iter()
        .map(|c| vec![c.tau_star, c.multiplicity as f64])
        .collect();
    out.write("conjugate.csv", &csv(&ctx.stamp, &["tau_star", "multiplicity"], &srows))?;
    let summary = JacobiSummary {
        source: m.source(),
        lambda,
        transverse_dim: m.dim(),
        t_end,
        dt: traj.step(),
        conjugate_strings: strings(&search),
        warnings: search.warnings.clone(),
        max_wronskian_norm: wronskian_check(&traj),
    };
    out.write("jacobi.json", &json(&ctx.stamp, &summary))?;
    println!("jacobi: {} conjugate string(s) on (0, {t_end}]", search.len());
    for c in &search.strings {
        println!("  tau* = {:.12} multiplicity {}", c.tau_star, c.multiplicity);
    }
    Ok(())
}

#[derive(Serialize)]
struct Certificate {
    value: f64,
    min_sigma: f64,
}

#[derive(Serialize)]
struct EpsRecord {
    eps: f64,
    #[serde(rename = "I_total")]
    i_total: f64,
}

#[derive(Serialize)]
struct NegativeModeRecord {
    r: f64,
    #[serde(rename = "T")]
    t_end: f64,
    c: f64,
    #[serde(rename = "I_kJ")]
    i_kj: f64,
    #[serde(rename = "I_kk")]
    i_kk: f64,
    #[serde(rename = "I_total_by_eps")]
    i_total_by_eps: Vec<EpsRecord>,
    #[serde(rename = "I_total_extrapolated")]
    extrapolated: f64,
    predicted_limit: f64,
}

#[derive(Serialize)]
struct IndexSummary {
    lambda: Option<f64>,
    #[serde(rename = "T")]
    t_end: f64,
    seed: u64,
    conjugate_strings: Vec<StringRecord>,
    #[serde(rename = "I_VV")]
    i_vv: Vec<f64>,
    certificate: Option<Vec<Certificate>>,
    negative_mode: Option<NegativeModeRecord>,
}

/// `η` from a test field `k ∝ sin(πτ/T) ΔJ'` normalized to `c = 1`, on a grid
/// that has `r` as a node.
fn negative_mode_record(m: &TidalMatrix, r: f64, t_req: f64, n_req: usize, eps: &[f64]) -> CliResult<NegativeModeRecord> {
    let m_r = ((r / t_req) * n_req as f64).round().max(2.0) as usize;
    let h = r / m_r as f64;
    let n = ((t_req / h).round() as usize).max(m_r + 2);
    let t_end = h * n as f64;
    let zero = VariationField::zero(t_end, n, m.dim())?;
    let (_, _, jump) = broken_jacobi_field(m, r, &zero)?;
    let dir = &jump / jump.norm_squared();
    let w = PI / t_end;
    let s = (w * r).sin();
    let k = VariationField::from_jets(t_end, n, m.dim(), &[], |t, _| wsmorse::indexform::Jet {
        value: &dir * ((w * t).sin() / s),
        d1: &dir * (w * (w * t).cos() / s),
        d2: &dir * (-w * w * (w * t).sin() / s),
    })?;
    let nm = negative_mode(m, r, &k, eps)?;
    Ok(NegativeModeRecord {
        r: nm.r,
        t_end,
        c: nm.c,
        i_kj: nm.i_kj,
        i_kk: nm.i_kk,
        i_total_by_eps: nm.samples.iter().map(|s| EpsRecord { eps: s.eps, i_total: s.index }).collect(),
        extrapolated: nm.extrapolated,
        predicted_limit: nm.predicted_limit(),
    })
}

pub fn index(ctx: &Context) -> CliResult<()> {
    let s = &ctx.scenario;
    let (t_end, dt) = jacobi_times(ctx, "index.T")?;
    let n: usize = s.get("index.N", "an unsigned integer")?.unwrap_or(600);
    if n < 10 {
        return Err(CliError::Validation(format!("index.N must be at least 10, got {n}")));
    }
    let n_fields: usize = s.get("index.fields", "an unsigned integer")?.unwrap_or(1);
    let breaks: usize = s.get("index.breaks", "an unsigned integer")?.unwrap_or(2);
    let eps = match &ctx.eps {
        Some(e) => e.clone(),
        None => s.real_list("index.eps")?.unwrap_or_else(|| DEFAULT_EPS.to_vec()),
    };
    validate_eps(&eps)?;
    let (m, lambda) = tidal(s, t_end, dt)?;
    let traj = integrate_jacobi(&m, t_end, dt)?;
    let search = find_conjugate_strings(&traj);

    let spec = RandomFieldSpec {
        t_end,
        n_intervals: n,
        dim: m.dim(),
        modes: 4,
        max_breaks: breaks,
    };
    let fields: Vec<VariationField> = (0..n_fields as u64)
        .map(|i| random_field(&spec, ctx.seed.wrapping_add(i)))
        .collect::<wsmorse::Result<_>>()?;
    let i_vv: Vec<f64> = fields
        .iter()
        .map(|v| index_form(v, v, &m))
        .collect::<wsmorse::Result<_>>()?;
    let certificate = if search.is_empty() {
        Some(
            fields
                .iter()
                .map(|v| {
                    positivity_certificate(&m, &traj, v).map(|c| Certificate {
                        value: c.value,
                        min_sigma: c.min_sigma,
                    })
                })
                .collect::<wsmorse::Result<_>>()?,
        )
    } else {
        None
    };
    let negative = match search.strings.first() {
        Some(c) if c.tau_star < t_end * (1.0 - 1e-6) => Some(negative_mode_record(&m, c.tau_star, t_end, n, &eps)?),
        _ => None,
    };
    let out = ctx.out_dir()?;
    if s.get::<bool>("index.trace", "true or false")?.unwrap_or(false) {
        if let Some(v) = fields.first() {
            let rows: Vec<Vec<f64>> = index_form_integrand(v, v, &m)?.into_iter().map(|(t, f)| vec![t, f]).collect();
            out.write("index_trace.csv", &csv(&ctx.stamp, &["tau", "integrand"], &rows))?;
        }
    }
    let summary = IndexSummary {
        lambda,
        t_end,
        seed: ctx.seed,
        conjugate_strings: strings(&search),
        i_vv,
        certificate,
        negative_mode: negative,
    };
    out.write("index.json", &json(&ctx.stamp, &summary))?;
    println!(
        "index: {} field(s), {} conjugate string(s){}",
        fields.len(),
        search.len(),
        summary
            .negative_mode
            .as_ref()
            .map(|nm| format!(", I_total -> {:.9} (c = {:.6})", nm.extrapolated, nm.c))
            .unwrap_or_default()
    );
    Ok(())
}

#[derive(Serialize, Clone)]
struct SweepRecord {
    lambda: f64,
    #[serde(rename = "T")]
    t_end: f64,
    conjugate_strings: Vec<StringRecord>,
}

#[derive(Serialize)]
struct SweepSummary {
    records: Vec<SweepRecord>,
}

/// Worker cap from `WSMORSE_THREADS`, else the available parallelism.
pub fn worker_count(jobs: usize) -> usize {
    let cap = std::env::var("WSMORSE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    cap.min(jobs).max(1)
}

/// Applies `f` to every item on up to `workers` threads, keeping input order.
fn fan_out<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    if workers <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    })
}

pub fn sweep(ctx: &Context) -> CliResult<()> {
    let s = &ctx.scenario;
    let lambdas = s
        .real_list("sweep.lambda")?
        .ok_or_else(|| ScenarioError::Missing("sweep.lambda".into()))?;
    let (t_end, dt) = jacobi_times(ctx, "jacobi.T")?;
    let dim = match s.get::<usize>("jacobi.transverse_dim", "an unsigned integer")? {
        Some(d) => d,
        None => match s.get::<usize>("manifold.dim", "an unsigned integer")? {
            Some(n) if n >= 3 => n - 2,
            Some(n) => return Err(CliError::Validation(format!("manifold.dim must be at least 3, got {n}"))),
            None => 1,
        },
    };
    if dim == 0 {
        return Err(CliError::Validation("jacobi.transverse_dim must be at least 1".into()));
    }
    let results = fan_out(&lambdas, worker_count(lambdas.len()), |&lambda| -> CliResult<SweepRecord> {
        let traj = integrate_jacobi(&TidalMatrix::scalar(lambda, dim)?, t_end, dt)?;
        Ok(SweepRecord {
            lambda,
            t_end,
            conjugate_strings: strings(&find_conjugate_strings(&traj)),
        })
    });
    let records = results.into_iter().collect::<CliResult<Vec<_>>>()?;
    let out = ctx.out_dir()?;
    let rows: Vec<Vec<f64>> = records
        .iter()
        .flat_map(|r| {
            r.conjugate_strings
                .iter()
                .map(move |c| vec![r.lambda, c.tau_star, c.multiplicity as f64])
        })
        .collect();
    out.write("sweep.csv", &csv(&ctx.stamp, &["lambda", "tau_star", "multiplicity"], &rows))?;
    out.write("sweep.json", &json(&ctx.stamp, &SweepSummary { records: records.clone() }))?;
    for r in &records {
        let taus: Vec<String> = r.conjugate_strings.iter().map(|c| format!("{:.9}", c.tau_star)).collect();
        println!("sweep: lambda = {} -> [{}]", r.lambda, taus.join(", "));
    }
    Ok(())
}

/// Runs an acceptance suite, prints one line per criterion with its wall
/// time and writes `acceptance_<suite>.json` (without timings).
pub fn acceptance(suite: &str, seed: u64, out_root: &std::path::Path) -> CliResult<bool> {
    let ids = suite_ids(suite).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut criteria = Vec::with_capacity(ids.len());
    for id in ids {
        let start = Instant::now();
        let result = run_criterion(id, seed);
        println!("{}  [{:.2}s]", result.summary_line(), start.elapsed().as_secs_f64());
        criteria.push(result);
    }
    let report = AcceptanceReport {
        suite: suite.to_string(),
        seed,
        version: env!("CARGO_PKG_VERSION"),
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    };
    std::fs::create_dir_all(out_root)?;
    let mut text = serde_json::to_string_pretty(&report).expect("serializable report");
    text.push('\n');
    std::fs::write(out_root.join(format!("acceptance_{suite}.json")), text)?;
    if report.passed {
        Ok(true)
    } else {
        Err(CliError::AcceptanceFailed(suite.to_string()))
    }
}
