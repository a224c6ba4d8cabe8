use nalgebra::DMatrix;

use super::{metric_at, Christoffel, MetricChart, Rank4};
use crate::error::{Error, Result};

/// Riemann tensor at a point, in both index placements.
#[derive(Debug, Clone)]
pub struct CurvatureSample {
    pub point: Vec<f64>,
    /// `R_abc^d`
    pub riemann: Rank4,
    /// `R_abcd = R_abc^e g_ed`
    pub riemann_lowered: Rank4,
    /// True when the tensor came from a closed-form expression.
    pub analytic: bool,
}

impl CurvatureSample {
    /// `max |R_abcd + R_bacd|`
    pub fn antisymmetry_ab(&self) -> f64 {
        self.max_over(|r, a, b, c, d| r.get(a, b, c, d) + r.get(b, a, c, d))
    }

    /// `max |R_abcd + R_abdc|`
    pub fn antisymmetry_cd(&self) -> f64 {
        self.max_over(|r, a, b, c, d| r.get(a, b, c, d) + r.get(a, b, d, c))
    }

    /// `max |R_abcd − R_cdab|`
    pub fn pair_symmetry(&self) -> f64 {
        self.max_over(|r, a, b, c, d| r.get(a, b, c, d) - r.get(c, d, a, b))
    }

    /// `max |R_abcd + R_bcad + R_cabd|`
    pub fn first_bianchi(&self) -> f64 {
        self.max_over(|r, a, b, c, d| r.get(a, b, c, d) + r.get(b, c, a, d) + r.get(c, a, b, d))
    }

    /// Worst of the four lowered-index symmetry residuals.
    pub fn max_symmetry_violation(&self) -> f64 {
        self.antisymmetry_ab()
            .max(self.antisymmetry_cd())
            .max(self.pair_symmetry())
            .max(self.first_bianchi())
    }

    fn max_over(&self, f: impl Fn(&Rank4, usize, usize, usize, usize) -> f64) -> f64 {
        let r = &self.riemann_lowered;
        let n = r.dim();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        worst = worst.max(f(r, a, b, c, d).abs());
                    }
                }
            }
        }
        worst
    }

    /// `R_bcd^a u^b v^c w^d` as a vector with upper index `a`.
    pub fn apply(&self, u: &[f64], v: &[f64], w: &[f64]) -> Vec<f64> {
        let n = self.riemann.dim();
        let mut out = vec![0.0; n];
        for b in 0..n {
            if u[b] == 0.0 {
                continue;
            }
            for c in 0..n {
                if v[c] == 0.0 {
                    continue;
                }
                for d in 0..n {
                    if w[d] == 0.0 {
                        continue;
                    }
                    let s = u[b] * v[c] * w[d];
                    for (a, o) in out.iter_mut().enumerate() {
                        *o += self.riemann.get(b, c, d, a) * s;
                    }
                }
            }
        }
        out
    }
}

fn stencil_metric(chart: &MetricChart, x: &[f64]) -> Result<DMatrix<f64>> {
    metric_at(chart, x).map_err(|e| match e {
        Error::OutOfDomain { point } => Error::StencilOutOfDomain { point },
        other => other,
    })
}

fn shifted(x: &[f64], axis: usize, delta: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[axis] += delta;
    y
}

/// Christoffel symbols `Γ^b_ac`, closed form when the chart has one,
/// otherwise central differences of the metric at the chart's `fd_step`.
pub fn christoffel_at(chart: &MetricChart, x: &[f64]) -> Result<Christoffel> {
    match chart.analytic_christoffel() {
        Some(f) => {
            metric_at(chart, x)?;
            Ok(f(x))
        }
        None => christoffel_fd_at(chart, x, chart.fd_step()),
    }
}

/// `Γ^b_ac = ½ g^bd (∂_a g_dc + ∂_c g_ad − ∂_d g_ac)` with central-difference
/// metric derivatives at step `h`, ignoring any closed form.
pub fn christoffel_fd_at(chart: &MetricChart, x: &[f64], h: f64) -> Result<Christoffel> {
    let n = chart.dim();
    let g = metric_at(chart, x)?;
    let ginv = g.clone().try_inverse().ok_or_else(|| Error::SingularMetric {
        point: x.to_vec(),
        det: g.determinant(),
    })?;
    // dg[e][(a, b)] = ∂_e g_ab
    let mut dg = Vec::with_capacity(n);
    for e in 0..n {
        let plus = stencil_metric(chart, &shifted(x, e, h))?;
        let minus = stencil_metric(chart, &shifted(x, e, -h))?;
        dg.push((plus - minus) / (2.0 * h));
    }
    let mut gamma = Christoffel::zeros(n);
    for b in 0..n {
        for a in 0..n {
            for c in a..n {
                let mut acc = 0.0;
                for d in 0..n {
                    let gbd = ginv[(b, d)];
                    if gbd == 0.0 {
                        continue;
                    }
                    acc += gbd * (dg[a][(d, c)] + dg[c][(a, d)] - dg[d][(a, c)]);
                }
                gamma.set(b, a, c, 0.5 * acc);
                gamma.set(b, c, a, 0.5 * acc);
            }
        }
    }
    Ok(gamma)
}

fn riemann_from_connection(chart: &MetricChart, x: &[f64]) -> Result<Rank4> {
    let n = chart.dim();
    let h = chart.fd_step();
    let gamma = christoffel_at(chart, x)?;
    let mut dgamma = Vec::with_capacity(n);
    for e in 0..n {
        let plus = christoffel_at(chart, &shifted(x, e, h)).map_err(stencil_error)?;
        let minus = christoffel_at(chart, &shifted(x, e, -h)).map_err(stencil_error)?;
        let mut d = Christoffel::zeros(n);
        for u in 0..n {
            for a in 0..n {
                for c in 0..n {
                    d.set(u, a, c, (plus.get(u, a, c) - minus.get(u, a, c)) / (2.0 * h));
                }
            }
        }
        dgamma.push(d);
    }
    let mut r = Rank4::zeros(n);
    for a in 0..n {
        for b in (a + 1)..n {
            for c in 0..n {
                for d in 0..n {
                    let deriv = dgamma[b].get(d, a, c) - dgamma[a].get(d, b, c);
                    let mut quad_ab = 0.0;
                    let mut quad_ba = 0.0;
                    for e in 0..n {
                        quad_ab += gamma.get(e, a, c) * gamma.get(d, b, e);
                        quad_ba += gamma.get(e, b, c) * gamma.get(d, a, e);
                    }
                    let value = deriv + (quad_ab - quad_ba);
                    r.set(a, b, c, d, value);
                    r.set(b, a, c, d, -value);
                }
            }
        }
    }
    Ok(r)
}

fn stencil_error(e: Error) -> Error {
    match e {
        Error::OutOfDomain { point } => Error::StencilOutOfDomain { point },
        other => other,
    }
}

fn lower_last(r: &Rank4, g: &DMatrix<f64>) -> Rank4 {
    let n = r.dim();
    let mut out = Rank4::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut acc = 0.0;
                    for e in 0..n {
                        acc += r.get(a, b, c, e) * g[(e, d)];
                    }
                    out.set(a, b, c, d, acc);
                }
            }
        }
    }
    out
}

/// Riemann tensor `R_abc^d` at `x` in the commutator convention documented
/// at the module root. Closed form if available; otherwise differentiated
/// from the connection with central differences.
pub fn riemann_at(chart: &MetricChart, x: &[f64]) -> Result<CurvatureSample> {
    let g = metric_at(chart, x)?;
    let (riemann, analytic) = match chart.analytic_riemann() {
        Some(f) => (f(x), true),
        None => (riemann_from_connection(chart, x)?, false),
    };
    if riemann.dim() != chart.dim() {
        return Err(Error::DimensionMismatch {
            expected: chart.dim(),
            found: riemann.dim(),
        });
    }
    let riemann_lowered = lower_last(&riemann, &g);
    Ok(CurvatureSample {
        point: x.to_vec(),
        riemann,
        riemann_lowered,
        analytic,
    })
}

/// Riemann tensor computed purely from finite differences of the metric.
pub fn riemann_fd_at(chart: &MetricChart, x: &[f64]) -> Result<CurvatureSample> {
    riemann_at(&chart.finite_difference_only(), x)
}

/// Sectional curvature of the plane spanned by `u`, `v`:
/// `R_abcd u^a v^b u^c v^d / ((u·u)(v·v) − (u·v)²)`.
pub fn sectional_curvature(chart: &MetricChart, x: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
    let g = metric_at(chart, x)?;
    let sample = riemann_at(chart, x)?;
    let n = chart.dim();
    let r = &sample.riemann_lowered;
    let mut num = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    num += r.get(a, b, c, d) * u[a] * v[b] * u[c] * v[d];
                }
            }
        }
    }
    let uu = super::inner_with(&g, u, u);
    let vv = super::inner_with(&g, v, v);
    let uv = super::inner_with(&g, u, v);
    let area = uu * vv - uv * uv;
    if area.abs() < 1e-300 {
        return Err(Error::InvalidArgument("u and v do not span a nondegenerate plane".into()));
    }
    Ok(num / area)
}
