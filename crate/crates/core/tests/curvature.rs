use std::f64::consts::PI;

use wsmorse::manifold::{
    christoffel_at, christoffel_fd_at, metric_at, riemann_at, riemann_fd_at, sectional_curvature,
    ConstantCurvatureSpec, MetricChart,
};
use wsmorse::Error;

fn sphere2(r: f64) -> MetricChart {
    ConstantCurvatureSpec::round_sphere(2, 1.0 / (r * r)).build().unwrap()
}

/// Hand-derived connection of the round 2-sphere of radius r (independent of the chart code).
fn sphere2_gamma(theta: f64) -> [[[f64; 2]; 2]; 2] {
    let mut g = [[[0.0; 2]; 2]; 2];
    g[0][1][1] = -theta.sin() * theta.cos();
    g[1][0][1] = theta.cos() / theta.sin();
    g[1][1][0] = theta.cos() / theta.sin();
    g
}

#[test]
fn metric_examples() {
    let flat = MetricChart::minkowski(4);
    let g = metric_at(&flat, &[0.3, -1.0, 2.0, 5.0]).unwrap();
    assert_eq!(g, nalgebra::DMatrix::from_diagonal(&nalgebra::dvector![-1.0, 1.0, 1.0, 1.0]));

    let r = 1.7;
    let g = metric_at(&sphere2(r), &[PI / 2.0, 0.0]).unwrap();
    assert!((g[(0, 0)] - r * r).abs() < 1e-14);
    assert!((g[(1, 1)] - r * r).abs() < 1e-14);
    assert_eq!(g[(0, 1)], 0.0);

    let prod = ConstantCurvatureSpec::product_time_sphere(3, 1.0 / (r * r)).build().unwrap();
    let g = metric_at(&prod, &[0.4, PI / 2.0, 0.0]).unwrap();
    assert!((g[(0, 0)] + 1.0).abs() < 1e-15);
    assert!((g[(1, 1)] - r * r).abs() < 1e-14);
    assert!((g[(2, 2)] - r * r).abs() < 1e-14);
}

#[test]
fn singular_metric_is_rejected() {
    let chart = MetricChart::new("degenerate", 2, vec![1, 1], |x: &[f64]| {
        nalgebra::DMatrix::from_diagonal(&nalgebra::dvector![1.0, x[0]])
    })
    .unwrap();
    assert!(metric_at(&chart, &[1.0, 0.0]).is_ok());
    assert!(matches!(metric_at(&chart, &[1e-16, 0.0]), Err(Error::SingularMetric { .. })));
}

#[test]
fn asymmetric_metric_is_rejected() {
    let chart = MetricChart::new("skew", 2, vec![1, 1], |_: &[f64]| {
        nalgebra::dmatrix![1.0, 0.1; 0.0, 1.0]
    })
    .unwrap();
    assert!(matches!(metric_at(&chart, &[0.0, 0.0]), Err(Error::AsymmetricMetric { .. })));
}

#[test]
fn out_of_domain_and_stencil_errors() {
    let s2 = sphere2(1.0);
    assert!(matches!(metric_at(&s2, &[-0.1, 0.0]), Err(Error::OutOfDomain { .. })));
    let fd = s2.finite_difference_only().with_fd_step(1e-2).unwrap();
    assert!(matches!(
        christoffel_at(&fd, &[0.005, 0.0]),
        Err(Error::StencilOutOfDomain { .. })
    ));
}

#[test]
fn flat_connection_and_curvature_vanish() {
    let flat = MetricChart::minkowski(4).finite_difference_only();
    let x = [0.1, 0.2, -0.3, 0.4];
    assert_eq!(christoffel_at(&flat, &x).unwrap().max_abs(), 0.0);
    assert_eq!(riemann_at(&flat, &x).unwrap().riemann.max_abs(), 0.0);
}

#[test]
fn sphere_christoffel_matches_symbolic_values() {
    for &theta in &[0.4, 1.0, PI / 2.0, 2.3] {
        let x = [theta, 0.7];
        let oracle = sphere2_gamma(theta);
        let analytic = christoffel_at(&sphere2(1.0), &x).unwrap();
        let fd = christoffel_fd_at(&sphere2(1.0), &x, 1e-4).unwrap();
        for b in 0..2 {
            for a in 0..2 {
                for c in 0..2 {
                    assert!((analytic.get(b, a, c) - oracle[b][a][c]).abs() < 1e-14);
                    assert!((fd.get(b, a, c) - oracle[b][a][c]).abs() < 1e-6);
                }
            }
        }
        assert_eq!(fd.max_asymmetry(), 0.0);
    }
}

#[test]
fn christoffel_fd_converges_at_second_order() {
    let chart = ConstantCurvatureSpec::round_sphere(3, 0.8).build().unwrap();
    let x = [1.0, 0.9, 0.3];
    let exact = christoffel_at(&chart, &x).unwrap();
    let hs = [1e-2, 1e-3, 1e-4];
    let errs: Vec<f64> = hs
        .iter()
        .map(|&h| christoffel_fd_at(&chart, &x, h).unwrap().max_abs_diff(&exact))
        .collect();
    let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = lx.iter().sum::<f64>() / 3.0;
    let my = ly.iter().sum::<f64>() / 3.0;
    let slope = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
        / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
    assert!((slope - 2.0).abs() <= 0.1, "slope {slope}, errors {errs:?}");
}

/// Evaluates `(∇_a∇_b − ∇_b∇_a) ω_c` on the unit 2-sphere by finite differences
/// of `T_bc = ∇_b ω_c`, using only the hand-derived connection.
fn commutator_on_covector(theta: f64, phi: f64) -> [[[f64; 2]; 2]; 2] {
    let omega = |t: f64, p: f64| [t.sin() * p.cos() + 0.3 * t, t * t * p + p.sin()];
    let h = 1e-4;
    let d_omega = |t: f64, p: f64| {
        // ∂_b ω_c
        let mut d = [[0.0; 2]; 2];
        let (tp, tm) = (omega(t + h, p), omega(t - h, p));
        let (pp, pm) = (omega(t, p + h), omega(t, p - h));
        for c in 0..2 {
            d[0][c] = (tp[c] - tm[c]) / (2.0 * h);
            d[1][c] = (pp[c] - pm[c]) / (2.0 * h);
        }
        d
    };
    let cov = |t: f64, p: f64| {
        let w = omega(t, p);
        let d = d_omega(t, p);
        let g = sphere2_gamma(t);
        let mut out = [[0.0; 2]; 2];
        for b in 0..2 {
            for c in 0..2 {
                out[b][c] = d[b][c] - (0..2).map(|e| g[e][b][c] * w[e]).sum::<f64>();
            }
        }
        out
    };
    let hh = 1e-3;
    let tb = cov(theta, phi);
    let dt = {
        let (p, m) = (cov(theta + hh, phi), cov(theta - hh, phi));
        let mut out = [[0.0; 2]; 2];
        for b in 0..2 {
            for c in 0..2 {
                out[b][c] = (p[b][c] - m[b][c]) / (2.0 * hh);
            }
        }
        out
    };
    let dp = {
        let (p, m) = (cov(theta, phi + hh), cov(theta, phi - hh));
        let mut out = [[0.0; 2]; 2];
        for b in 0..2 {
            for c in 0..2 {
                out[b][c] = (p[b][c] - m[b][c]) / (2.0 * hh);
            }
        }
        out
    };
    let dtb = [dt, dp];
    let g = sphere2_gamma(theta);
    let mut comm = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let mut v = dtb[a][b][c] - dtb[b][a][c];
                for e in 0..2 {
                    v += -g[e][a][c] * tb[b][e] + g[e][b][c] * tb[a][e];
                }
                comm[a][b][c] = v;
            }
        }
    }
    comm
}

#[test]
fn curvature_sign_pinned_by_covector_commutator() {
    let (theta, phi) = (1.1, 0.4);
    let comm = commutator_on_covector(theta, phi);
    let w = [theta.sin() * phi.cos() + 0.3 * theta, theta * theta * phi + phi.sin()];
    for chart in [sphere2(1.0), sphere2(1.0).finite_difference_only()] {
        let r = riemann_at(&chart, &[theta, phi]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let rw: f64 = (0..2).map(|d| r.riemann.get(a, b, c, d) * w[d]).sum();
                    assert!(
                        (rw - comm[a][b][c]).abs() < 1e-5,
                        "({a},{b},{c}): R·ω = {rw}, commutator = {}",
                        comm[a][b][c]
                    );
                }
            }
        }
    }
    // R_θφθφ = +r² sin²θ, i.e. positive sectional curvature on the sphere.
    let r = 2.0;
    let s = riemann_fd_at(&sphere2(r), &[theta, phi]).unwrap();
    let expect = r * r * theta.sin().powi(2);
    assert!((s.riemann_lowered.get(0, 1, 0, 1) - expect).abs() < 1e-6);
}

fn charts_with_points() -> Vec<(ConstantCurvatureSpec, Vec<f64>)> {
    vec![
        (ConstantCurvatureSpec::flat(4), vec![0.2, 0.1, -0.4, 1.0]),
        (ConstantCurvatureSpec::round_sphere(2, 0.5), vec![1.2, 0.3]),
        (ConstantCurvatureSpec::round_sphere(4, 2.0), vec![1.0, 1.3, 0.8, 2.0]),
        (ConstantCurvatureSpec::hyperbolic(3, -1.5), vec![0.3, -0.2, 1.1]),
        (ConstantCurvatureSpec::product_time_sphere(3, 1.0), vec![0.0, 1.4, 0.2]),
        (ConstantCurvatureSpec::product_time_sphere(4, 0.25), vec![3.0, 1.0, 2.0, 0.5]),
    ]
}

#[test]
fn riemann_symmetries_hold_in_both_modes() {
    for (spec, x) in charts_with_points() {
        let chart = spec.build().unwrap();
        let analytic = riemann_at(&chart, &x).unwrap();
        assert!(analytic.analytic);
        assert!(analytic.max_symmetry_violation() <= 1e-12, "{spec:?}");
        let fd = riemann_fd_at(&chart, &x).unwrap();
        assert!(!fd.analytic);
        assert_eq!(fd.antisymmetry_ab(), 0.0);
        assert!(fd.max_symmetry_violation() <= 1e-6, "{spec:?}: {}", fd.max_symmetry_violation());
    }
}

#[test]
fn constant_curvature_round_trip() {
    for (spec, x) in charts_with_points() {
        let chart = spec.build().unwrap();
        let expected = spec.expected_lowered(&x);
        let analytic = riemann_at(&chart, &x).unwrap();
        assert!(analytic.riemann_lowered.max_abs_diff(&expected) <= 1e-10);
        let via_connection = riemann_at(&chart.without_analytic_riemann(), &x).unwrap();
        assert!(via_connection.riemann_lowered.max_abs_diff(&expected) <= 1e-6);
        let fd = riemann_fd_at(&chart, &x).unwrap();
        assert!(
            fd.riemann_lowered.max_abs_diff(&expected) <= 1e-6,
            "{spec:?}: {}",
            fd.riemann_lowered.max_abs_diff(&expected)
        );
    }
}

#[test]
fn sectional_curvature_recovers_k() {
    let s = ConstantCurvatureSpec::round_sphere(3, 0.7).build().unwrap();
    let k = sectional_curvature(&s, &[1.0, 2.0, 0.5], &[1.0, 0.2, 0.0], &[0.0, 0.5, 1.0]).unwrap();
    assert!((k - 0.7).abs() < 1e-12);
    let h = ConstantCurvatureSpec::hyperbolic(3, -2.0).build().unwrap().finite_difference_only();
    let k = sectional_curvature(&h, &[0.1, 0.2, 0.9], &[1.0, 0.0, 0.3], &[0.0, 1.0, 0.0]).unwrap();
    assert!((k + 2.0).abs() < 1e-6);
}

#[test]
fn spec_validation() {
    assert!(ConstantCurvatureSpec::round_sphere(2, -1.0).build().is_err());
    assert!(ConstantCurvatureSpec::hyperbolic(2, 1.0).build().is_err());
    let mut flat = ConstantCurvatureSpec::flat(3);
    flat.curvature = 0.1;
    assert!(flat.build().is_err());
    assert!(ConstantCurvatureSpec::product_time_sphere(2, 1.0).build().is_err());
    let chart = ConstantCurvatureSpec::product_time_sphere(3, 1.0).build().unwrap();
    assert!(chart.is_lorentzian());
    assert!(ConstantCurvatureSpec::hyperbolic(3, -1.0).build().unwrap().is_riemannian());
}
