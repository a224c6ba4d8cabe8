use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{dmatrix, DMatrix};
use wsmorse::jacobi::{
    find_conjugate_strings, integrate_jacobi, lift_to_grid, reconstruct_eta, transverse_frame, wronskian_check,
    TidalMatrix, TidalSource,
};
use wsmorse::manifold::{metric_at, ConstantCurvatureSpec, FnWorldline, MetricChart};
use wsmorse::worldsheet::tubes::{equator_tube, straight_string};
use wsmorse::worldsheet::deviation_operator;
use wsmorse::Error;

fn s_lambda(lambda: f64, tau: f64) -> f64 {
    if lambda > 0.0 {
        (lambda.sqrt() * tau).sin() / lambda.sqrt()
    } else if lambda < 0.0 {
        (lambda.abs().sqrt() * tau).sinh() / lambda.abs().sqrt()
    } else {
        tau
    }
}

#[test]
fn flat_tidal_matrix_gives_linear_growth() {
    for dim in 1..=3 {
        let traj = integrate_jacobi(&TidalMatrix::scalar(0.0, dim).unwrap(), 5.0, 1e-3).unwrap();
        assert_eq!(traj.a[0], DMatrix::zeros(dim, dim));
        assert_eq!(traj.a_dot[0], DMatrix::identity(dim, dim));
        for (k, &t) in traj.taus.iter().enumerate() {
            assert!((&traj.a[k] - DMatrix::identity(dim, dim) * t).amax() < 1e-12);
            assert!((traj.det_a[k] - t.powi(dim as i32)).abs() < 1e-8);
        }
        assert!(find_conjugate_strings(&traj).is_empty());
        assert_eq!(wronskian_check(&traj), 0.0);
    }
}

#[test]
fn closed_form_oscillatory_and_hyperbolic() {
    for lambda in [0.25_f64, 1.0, 4.0, -1.0, -0.5] {
        let t_end = if lambda > 0.0 { 2.5 * PI / lambda.sqrt() } else { 5.0 };
        let traj = integrate_jacobi(&TidalMatrix::scalar(lambda, 2).unwrap(), t_end, 1e-3).unwrap();
        for (k, &t) in traj.taus.iter().enumerate() {
            let s = s_lambda(lambda, t);
            let err = (&traj.a[k] - DMatrix::identity(2, 2) * s).amax();
            let scale = if lambda < 0.0 { s.abs().max(1.0) } else { 1.0 };
            assert!(err < 1e-8 * scale, "lambda={lambda} tau={t} err={err}");
            if lambda < 0.0 && k > 0 {
                assert!(traj.det_a[k] > 0.0);
                assert!(((traj.det_a[k] - s * s) / (s * s)).abs() < 1e-7);
            }
        }
        if lambda < 0.0 {
            assert!(find_conjugate_strings(&traj).is_empty());
        }
        assert!(wronskian_check(&traj) < 1e-12);
    }
}

#[test]
fn rk4_converges_at_order_four() {
    let err = |dt: f64| {
        let traj = integrate_jacobi(&TidalMatrix::scalar(1.0, 1).unwrap(), 3.0, dt).unwrap();
        traj.taus
            .iter()
            .zip(&traj.a)
            .map(|(t, a)| (a[(0, 0)] - t.sin()).abs())
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(0.04), err(0.02));
    assert!(((e1 / e2).log2() - 4.0).abs() < 0.3, "{e1} {e2}");
}

#[test]
fn reconstruction_examples() {
    let flat = integrate_jacobi(&TidalMatrix::scalar(0.0, 3).unwrap(), 2.0, 1e-2).unwrap();
    for eta in reconstruct_eta(&flat, &[0.0; 3]).unwrap() {
        assert_eq!(eta.amax(), 0.0);
    }
    let etas = reconstruct_eta(&flat, &[1.0, 0.0, 0.0]).unwrap();
    for (eta, t) in etas.iter().zip(&flat.taus) {
        assert!((eta[0] - t).abs() < 1e-12 && eta[1] == 0.0 && eta[2] == 0.0);
    }
    assert_eq!(etas[0].amax(), 0.0);

    let lambda = 2.0;
    let traj = integrate_jacobi(&TidalMatrix::scalar(lambda, 2).unwrap(), 3.0, 1e-3).unwrap();
    let v = nalgebra::dvector![0.6, -0.8];
    let at_root = traj.state_at(PI / lambda.sqrt()).0 * v;
    assert!(at_root.amax() < 1e-8);
    assert!(matches!(reconstruct_eta(&traj, &[1.0]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn conjugate_strings_of_scalar_tidal_matrices() {
    for lambda in [0.25_f64, 1.0, 4.0] {
        for dim in 1..=3 {
            let t_end = 2.5 * PI / lambda.sqrt();
            let traj = integrate_jacobi(&TidalMatrix::scalar(lambda, dim).unwrap(), t_end, 1e-3).unwrap();
            let found = find_conjugate_strings(&traj);
            assert!(found.warnings.is_empty());
            assert_eq!(found.len(), 2, "lambda={lambda} dim={dim}");
            for (m, s) in found.strings.iter().enumerate() {
                let expected = (m + 1) as f64 * PI / lambda.sqrt();
                assert!((s.tau_star - expected).abs() < 1e-6, "{} vs {expected}", s.tau_star);
                assert_eq!(s.multiplicity, dim);
                assert!(s.det_a.abs() <= 1e-10);
                assert_eq!(s.tangential, dim % 2 == 0);
                assert!(s.bracket.0 <= s.tau_star && s.tau_star <= s.bracket.1);
            }
            // between conjugate strings A stays invertible
            let (r1, r2) = (found.strings[0].tau_star, found.strings[1].tau_star);
            for (t, d) in traj.taus.iter().zip(&traj.det_a) {
                let gap = (t - r1).abs().min((t - r2).abs());
                if *t > 0.0 && gap > 0.05 {
                    assert!(d.abs() > 1e-12);
                }
            }
        }
    }
}

#[test]
fn decoupled_tidal_eigenvalues() {
    let (l1, l2) = (1.0, 2.25);
    let traj = integrate_jacobi(&TidalMatrix::diagonal(&[l1, l2]).unwrap(), 1.2 * PI, 1e-3).unwrap();
    let found = find_conjugate_strings(&traj);
    assert_eq!(found.taus().len(), 2);
    assert!((found.strings[0].tau_star - PI / l2.sqrt()).abs() < 1e-9);
    assert!((found.strings[1].tau_star - PI / l1.sqrt()).abs() < 1e-9);
    assert!(found.strings.iter().all(|s| s.multiplicity == 1 && !s.tangential));
    assert_eq!(found.total_multiplicity(), 2);

    // a double eigenvalue next to a single one: det touches zero at the double root
    let traj = integrate_jacobi(&TidalMatrix::diagonal(&[1.0, 1.0, 2.25]).unwrap(), 1.2 * PI, 1e-3).unwrap();
    let found = find_conjugate_strings(&traj);
    let summary: Vec<(f64, usize, bool)> =
        found.strings.iter().map(|s| (s.tau_star, s.multiplicity, s.tangential)).collect();
    assert_eq!(summary.len(), 2, "{summary:?}");
    assert!((summary[0].0 - 2.0 * PI / 3.0).abs() < 1e-9 && summary[0].1 == 1 && !summary[0].2);
    assert!((summary[1].0 - PI).abs() < 1e-9 && summary[1].1 == 2 && summary[1].2);
}

#[test]
fn conjugate_strings_exist_iff_positive_and_long_enough() {
    for lambda in [-1.0_f64, 0.0, 0.5, 1.0, 3.0] {
        for factor in [0.99, 1.01] {
            let t_end = if lambda > 0.0 { factor * PI / lambda.sqrt() } else { 10.0 * factor };
            let traj = integrate_jacobi(&TidalMatrix::scalar(lambda, 2).unwrap(), t_end, 1e-3).unwrap();
            let expected = lambda > 0.0 && factor > 1.0;
            assert_eq!(!find_conjugate_strings(&traj).is_empty(), expected, "lambda={lambda} factor={factor}");
        }
    }
}

#[test]
fn wronskian_examples() {
    let sym = TidalMatrix::function(2, |t: f64| dmatrix![1.0 + t, 0.3; 0.3, 2.0 - 0.5 * t.sin()]).unwrap();
    let traj = integrate_jacobi(&sym, 4.0, 1e-3).unwrap();
    assert!(wronskian_check(&traj) < 1e-8, "{}", wronskian_check(&traj));

    let skew = TidalMatrix::constant(dmatrix![0.0, 1.0; 0.0, 0.0]).unwrap();
    let traj = integrate_jacobi(&skew, 1.0, 1e-3).unwrap();
    // ȦᵀA − AᵀȦ ≈ (M − Mᵀ)τ³/3 for small τ
    let w = wronskian_check(&traj);
    assert!(w >= 1e-3, "{w}");
    assert!((w - 2f64.sqrt() / 3.0).abs() < 0.05, "{w}");
}

#[test]
fn overflow_is_reported() {
    let r = integrate_jacobi(&TidalMatrix::scalar(-400.0, 1).unwrap(), 2.0, 1e-3);
    assert!(matches!(r, Err(Error::Overflow { .. })));
    assert!(integrate_jacobi(&TidalMatrix::scalar(1.0, 1).unwrap(), 0.0, 1e-3).is_err());
}

#[test]
fn tidal_matrix_modes() {
    let m = TidalMatrix::scalar(0.7, 3).unwrap();
    assert_eq!(m.source(), TidalSource::ExplicitConstant);
    assert_eq!(m.eval(12.0), DMatrix::identity(3, 3) * 0.7);
    assert_eq!(m.scalar_value(), Some(0.7));
    assert_eq!(TidalMatrix::diagonal(&[1.0, 2.0]).unwrap().scalar_value(), None);
    assert!(TidalMatrix::constant(DMatrix::zeros(2, 3)).is_err());

    let grid = straight_string(1.0, 2.0, 40, 16).unwrap();
    let chart = MetricChart::minkowski(4);
    let frame = transverse_frame(&chart, grid.point(0, 0), &grid.xi(0, 0), &grid.zeta(0, 0)).unwrap();
    assert_eq!(frame.len(), 2);
    let flat = TidalMatrix::from_grid(&chart, &grid, &frame).unwrap();
    assert_eq!(flat.source(), TidalSource::FromChart);
    assert_eq!(flat.max_abs(), Some(0.0));
    assert_eq!(flat.scalar_value(), Some(0.0));
}

/// `⟨e, R(ξ,e,ξ) − R(ζ,e,ζ)⟩` on ℝ×S²(K) from `R_abcd = K(g_ac g_bd − g_ad g_bc)` on the sphere block.
fn product_sphere_lambda(k: f64, g_zz: f64) -> f64 {
    // the time direction is flat and e is a unit vector orthogonal to ζ
    -k * g_zz
}

#[test]
fn equator_tidal_matrix_from_chart() {
    for k in [0.5, 1.0, 4.0] {
        let chart = ConstantCurvatureSpec::product_time_sphere(3, k).build().unwrap();
        let grid = equator_tube(k, 3.0, 60, 16).unwrap();
        let frame = transverse_frame(&chart, grid.point(0, 0), &grid.xi(0, 0), &grid.zeta(0, 0)).unwrap();
        let m = TidalMatrix::from_grid(&chart, &grid, &frame).unwrap();
        let g = metric_at(&chart, grid.point(0, 0)).unwrap();
        let oracle = product_sphere_lambda(k, g[(2, 2)]);
        let lambda = m.scalar_value().expect("equator tidal matrix is a multiple of the identity");
        assert!((lambda - oracle).abs() < 1e-8, "K={k}: {lambda} vs {oracle}");
        assert!(m.symmetry_defect() < 1e-8);

        let fd = TidalMatrix::from_grid(&chart.finite_difference_only(), &grid, &frame).unwrap();
        assert!((fd.eval(1.3)[(0, 0)] - oracle).abs() < 1e-6);

        // explicit and chart-derived paths agree
        let a = integrate_jacobi(&m, 3.0, 1e-3).unwrap();
        let b = integrate_jacobi(&TidalMatrix::scalar(lambda, 1).unwrap(), 3.0, 1e-3).unwrap();
        let diff = a.a.iter().zip(&b.a).map(|(x, y)| (x - y).amax()).fold(0.0, f64::max);
        assert!(diff < 1e-8);
    }
}

#[test]
fn riemannian_worldline_has_time_dependent_tidal_matrix() {
    // great circle of the unit 3-sphere in hyperspherical coordinates (χ, θ, φ),
    // string tangent ∂_φ; M = |ξ|² − |ζ|² = 1 − sin²χ
    let chart = ConstantCurvatureSpec::round_sphere(3, 1.0).build().unwrap();
    assert!(chart.is_riemannian());
    let chi0 = 1.0;
    let line = FnWorldline(move |t: f64| (vec![chi0 + t, FRAC_PI_2, 0.0], vec![1.0, 0.0, 0.0]));
    let taus: Vec<f64> = (0..=100).map(|k| k as f64 * 0.01).collect();
    let zetas: Vec<Vec<f64>> = taus.iter().map(|_| vec![0.0, 0.0, 1.0]).collect();
    let frame0 = vec![vec![0.0, 1.0 / chi0.sin(), 0.0]];
    let m = TidalMatrix::from_chart_along(&chart, &line, &zetas, &taus, &frame0).unwrap();
    for t in [0.0, 0.3, 0.555, 1.0] {
        let expected = (chi0 + t).cos().powi(2);
        assert!((m.eval(t)[(0, 0)] - expected).abs() < 1e-6, "{t}");
    }
    assert!(m.scalar_value().is_none());
}

#[test]
fn lifted_jacobi_field_is_in_the_kernel_of_the_deviation_operator() {
    let chart = ConstantCurvatureSpec::product_time_sphere(3, 1.0).build().unwrap();
    let err = |n: usize| {
        let grid = equator_tube(1.0, 1.5, n, 16).unwrap();
        let frame = transverse_frame(&chart, grid.point(0, 0), &grid.xi(0, 0), &grid.zeta(0, 0)).unwrap();
        let m = TidalMatrix::from_grid(&chart, &grid, &frame).unwrap();
        let traj = integrate_jacobi(&m, 1.5, grid.dtau() / 10.0).unwrap();
        let eta = lift_to_grid(&grid, &traj, &[1.0]).unwrap();
        deviation_operator(&grid, &eta).unwrap().max_norm()
    };
    let (e1, e2) = (err(50), err(100));
    assert!(e2 < 1e-3);
    assert!(((e1 / e2).log2() - 2.0).abs() < 0.2, "{e1} {e2}");
}
