use std::f64::consts::{PI, TAU};

use wsmorse::manifold::MetricChart;
use wsmorse::worldsheet::tubes::{breathing_ring, equator_tube, latitude_tube, static_cylinder, straight_string};
use wsmorse::worldsheet::{
    action, area_density, constraint_residuals, currents, deviation_operator, first_variation,
    first_variation_fd, gauge_fixed_currents, gauge_residuals, geodesic_residual, geodesic_residual_full,
    geodesic_residual_gauge, deviation_operator_with_tolerance, pairing_integral, second_variation_fd, NodeField, WorldsheetGrid,
};
use wsmorse::Error;

fn slope(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Smooth pseudo-random field vanishing at both τ ends.
fn wiggly_field(grid: &WorldsheetGrid, seed: f64) -> NodeField {
    let t_end = grid.t_end();
    let n = grid.dim();
    grid.sample_field(|tau, s| {
        let bump = (PI * tau / t_end).sin();
        (0..n)
            .map(|a| {
                let a = a as f64;
                bump * ((1.3 + a + seed) * s + seed).cos() * (1.0 + 0.5 * ((2.0 + a) * tau + seed).sin())
            })
            .collect()
    })
}

#[test]
fn area_density_examples() {
    let grid = static_cylinder(2.5, 1.0, 8, 32).unwrap();
    let f = area_density(&grid).unwrap();
    // the discrete ζ of a sampled circle is shortened by sin(Δσ)/Δσ
    let ds = grid.dsigma();
    let expected = 2.5 * ds.sin() / ds;
    for v in f.as_slice() {
        assert!((v - expected).abs() < 1e-12);
    }

    let gauge = straight_string(1.0, 1.0, 8, 16).unwrap();
    let f = area_density(&gauge).unwrap();
    assert!(f.as_slice().iter().all(|v| (v - 1.0).abs() < 1e-14));

    let null = WorldsheetGrid::from_fn(MetricChart::minkowski(4), 1.0, 8, 16, vec![0.0; 4], |t, _| {
        vec![t, 1.0, 0.0, 0.0]
    })
    .unwrap();
    assert!(matches!(area_density(&null), Err(Error::DegenerateTube { .. })));
}

#[test]
fn action_of_constant_density_tubes() {
    // straight strings have exactly constant density L²
    let s = action(&straight_string(1.0, 1.0, 10, 32).unwrap()).unwrap();
    assert!((s + TAU).abs() < 1e-10, "{s}");
    let s64 = action(&straight_string(1.0, 1.0, 10, 64).unwrap()).unwrap();
    assert!((s - s64).abs() < 1e-12);
    let s = action(&straight_string(2.0_f64.sqrt(), 3.0, 30, 48).unwrap()).unwrap();
    assert!((s + 12.0 * PI).abs() < 1e-10, "{s}");
}

#[test]
fn action_of_static_cylinder_converges() {
    // f ≡ R in the continuum; the sampled circle converges to S = −2πRT at order 2
    let err = |n: usize| (action(&static_cylinder(2.0, 3.0, 6, n).unwrap()).unwrap() + 12.0 * PI).abs();
    let (e1, e2) = (err(64), err(128));
    assert!(e2 < 2e-2);
    assert!((slope(e1, e2) - 2.0).abs() < 0.1);
}

#[test]
fn currents_in_gauge_and_on_the_cylinder() {
    let grid = straight_string(1.0, 1.0, 8, 16).unwrap();
    let cur = currents(&grid).unwrap();
    let fixed = gauge_fixed_currents(&grid);
    assert!(cur.p_tau.axpy(-1.0, &fixed.p_tau).unwrap().max_abs() < 1e-12);
    assert!(cur.p_sigma.axpy(-1.0, &fixed.p_sigma).unwrap().max_abs() < 1e-12);

    let r = 2.0;
    let grid = static_cylinder(r, 1.0, 8, 32).unwrap();
    let cur = currents(&grid).unwrap();
    let f = area_density(&grid).unwrap();
    for k in 0..grid.n_tau() {
        for j in 0..grid.n_sigma() {
            // ξ·ζ = 0 so P_τ = −(ζ·ζ/f)ξ = −f ξ
            let fk = f.get(k, j)[0];
            let xi = grid.xi(k, j);
            for (p, x) in cur.p_tau.get(k, j).iter().zip(&xi) {
                assert!((p + fk * x).abs() < 1e-12);
            }
        }
    }
    let res = constraint_residuals(&grid, &cur).unwrap();
    assert!(res.p_tau_zeta.max_abs() < 1e-10);
    assert!(res.p_sigma_xi.max_abs() < 1e-10);
}

#[test]
fn constraint_identities_with_full_currents_hold_to_roundoff() {
    for n in [16, 64] {
        let grid = breathing_ring(1.0, 1.0, n, n).unwrap();
        let res = constraint_residuals(&grid, &currents(&grid).unwrap()).unwrap();
        assert!(res.max() < 1e-10, "{:?}", res.max_abs());
    }
}

#[test]
fn gauge_fixed_constraints_converge_at_order_two() {
    let err = |n: usize| {
        let grid = breathing_ring(1.0, 1.0, n, 2 * n).unwrap();
        constraint_residuals(&grid, &gauge_fixed_currents(&grid)).unwrap().max()
    };
    let (e1, e2, e3) = (err(32), err(64), err(128));
    assert!((slope(e1, e2) - 2.0).abs() < 0.2, "{e1} {e2}");
    assert!((slope(e2, e3) - 2.0).abs() < 0.2, "{e2} {e3}");

    // negative control: noise on X dominates the discretization error
    let grid = breathing_ring(1.0, 1.0, 128, 256).unwrap();
    let noise = grid.sample_field(|t, s| {
        let v = ((t * 1e3).sin() * (s * 7e2).cos() * 43758.5453).fract();
        vec![0.0, 1e-3 * v, -1e-3 * v, 0.0]
    });
    let noisy = grid.with_points(grid.points().axpy(1.0, &noise).unwrap()).unwrap();
    let e_noisy = constraint_residuals(&noisy, &gauge_fixed_currents(&noisy)).unwrap().max();
    assert!(e_noisy > 100.0 * e3, "{e_noisy} vs {e3}");
}

#[test]
fn gauge_residual_examples() {
    let grid = straight_string(1.0, 1.0, 8, 16).unwrap();
    assert!(gauge_residuals(&grid).unwrap().max() < 1e-10);

    // the unit circle is in gauge up to the O(Δσ²) shortening of the discrete ζ
    let err = |n: usize| gauge_residuals(&static_cylinder(1.0, 1.0, 8, n).unwrap()).unwrap().max();
    assert!((slope(err(64), err(128)) - 2.0).abs() < 0.05);

    let (eps, r) = (0.1, 1.5);
    let sheared = WorldsheetGrid::from_fn(MetricChart::minkowski(4), 1.0, 8, 256, vec![0.0; 4], |t, s| {
        vec![t, r * (s + eps * t).cos(), r * (s + eps * t).sin(), 0.0]
    })
    .unwrap();
    let res = gauge_residuals(&sheared).unwrap();
    assert!((res.xi_zeta.max_abs() - eps * r * r).abs() < 1e-3);

    let scaled = WorldsheetGrid::from_fn(MetricChart::minkowski(4), 1.0, 8, 16, vec![0.0, 2.0 * TAU, 0.0, 0.0], |t, s| {
        vec![t, 2.0 * s, 0.0, 0.0]
    })
    .unwrap();
    let res = gauge_residuals(&scaled).unwrap();
    assert!((res.norm_sum.max_abs() - 3.0).abs() < 1e-12);
    assert!(res.xi_zeta.max_abs() < 1e-12);
}

#[test]
fn geodesic_residual_examples() {
    let grid = straight_string(1.0, 1.0, 8, 16).unwrap();
    assert!(geodesic_residual_gauge(&grid).unwrap().max_norm() < 1e-10);
    assert!(geodesic_residual_full(&grid).unwrap().max_norm() < 1e-10);

    let eq = equator_tube(1.0, 1.0, 8, 32).unwrap();
    assert!(geodesic_residual(&eq).unwrap().max_norm() < 1e-12);
    assert!(geodesic_residual_full(&eq).unwrap().max_norm() < 1e-12);
    let eq4 = equator_tube(4.0, 1.0, 8, 32).unwrap();
    assert!(geodesic_residual(&eq4).unwrap().max_norm() < 1e-12);

    // small circle: only Γ^θ_φφ ζ^φ ζ^φ = −sin θ cos θ survives
    let theta = PI / 3.0;
    let lat = latitude_tube(1.0, theta, 1.0, 8, 32).unwrap();
    let expected = theta.sin() * theta.cos();
    for res in [geodesic_residual(&lat).unwrap(), geodesic_residual_full(&lat).unwrap()] {
        assert!((res.max_norm() - expected).abs() < 1e-10, "{}", res.max_norm());
        assert!(res.get(3, 5)[0].abs() < 1e-12 && res.get(3, 5)[2].abs() < 1e-12);
    }

    // the static loop is not a solution: its residual is its centripetal term
    let cyl = static_cylinder(1.0, 1.0, 8, 128).unwrap();
    let r = geodesic_residual_full(&cyl).unwrap().max_norm();
    assert!((r - 1.0).abs() < 1e-3, "{r}");
}

#[test]
fn geodesic_residual_on_breathing_ring() {
    let ring = |n: usize| breathing_ring(1.0, 1.0, n, n).unwrap();
    let err = |n: usize| geodesic_residual_gauge(&ring(n)).unwrap().max_norm();
    let (e1, e2) = (err(64), err(128));
    assert!((slope(e1, e2) - 2.0).abs() < 0.2, "{e1} {e2}");

    // the full path differentiates the discrete currents a second time, which
    // costs one order in the two rows next to each τ end
    let err = |n: usize| {
        let res = geodesic_residual_full(&ring(n)).unwrap();
        let mut worst: f64 = 0.0;
        for k in 2..res.n_tau() - 2 {
            worst = worst.max(res.row_max_norm(k));
        }
        worst
    };
    let (e1, e2) = (err(64), err(128));
    assert!((slope(e1, e2) - 2.0).abs() < 0.2, "{e1} {e2}");
}

#[test]
fn deviation_operator_examples() {
    let grid = straight_string(1.0, 1.0, 16, 16).unwrap();
    let eta = grid.sample_field(|t, _| vec![0.3 * t, 1.0 - t, 0.0, 2.0 * t + 0.5]);
    assert!(deviation_operator(&grid, &eta).unwrap().max_norm() < 1e-10);

    let probe = wiggly_field(&grid, 0.7);
    assert!(deviation_operator(&grid, &probe).unwrap().max_norm() > 0.1);

    let off = static_cylinder(2.0, 1.0, 8, 16).unwrap();
    assert!(matches!(
        deviation_operator(&off, &off.zero_field()),
        Err(Error::NotInGauge { .. })
    ));
}

#[test]
fn deviation_operator_annihilates_equator_jacobi_field() {
    // Λ(h ∂_θ) = (−h'' + h) ∂_θ on the unit equator, so h = sinh τ is in the kernel
    let err = |n: usize| {
        let grid = equator_tube(1.0, 1.5, n, 16).unwrap();
        let eta = grid.sample_field(|t, _| vec![0.0, t.sinh(), 0.0]);
        deviation_operator(&grid, &eta).unwrap().max_norm()
    };
    let (e1, e2, e3) = (err(50), err(100), err(200));
    assert!(e3 < 1e-3);
    assert!((slope(e1, e2) - 2.0).abs() < 0.2);
    assert!((slope(e2, e3) - 2.0).abs() < 0.2);

    let grid = equator_tube(1.0, 1.5, 100, 16).unwrap();
    let eta = grid.sample_field(|t, _| vec![0.0, t.sin(), 0.0]);
    let lam = deviation_operator(&grid, &eta).unwrap();
    // (−h'' + h) = 2 sin τ for h = sin τ
    assert!((lam.get(60, 3)[1] - 2.0 * grid.taus()[60].sin()).abs() < 1e-3);
}

#[test]
fn second_variation_matches_pairing_on_flat_tubes() {
    let tubes = [
        (straight_string(1.0, 1.0, 400, 16).unwrap(), 1e-10),
        // the sampled ring is in gauge only up to O(Δσ²)
        (breathing_ring(1.0, 1.0, 400, 512).unwrap(), 1e-3),
    ];
    for (grid, gauge_tol) in tubes {
        let t_end = grid.t_end();
        let eta = grid.sample_field(|t, _| vec![0.0, 0.0, 0.0, (PI * t / t_end).sin()]);
        let fd = second_variation_fd(&grid, &eta, 1e-3).unwrap();
        let lam = deviation_operator_with_tolerance(&grid, &eta, gauge_tol).unwrap();
        let pair = pairing_integral(&grid, &eta, &lam).unwrap();
        // 2π ∫ h'² dτ with h = sin(πτ/T)
        let exact = TAU * PI * PI / (2.0 * t_end);
        assert!(((fd - pair) / exact).abs() < 1e-4, "{fd} {pair}");
        assert!(((fd - exact) / exact).abs() < 1e-4, "{fd} {exact}");
    }
}

/// Smooth transverse field on a flat tube, vanishing at both τ ends.
fn transverse_field(grid: &WorldsheetGrid, seed: f64) -> NodeField {
    let t_end = grid.t_end();
    grid.sample_field(|tau, s| {
        let bump = 0.1 * (PI * tau / t_end).sin();
        vec![
            0.0,
            0.0,
            0.0,
            bump * ((s + seed).cos() + 0.5 * (2.0 * s - seed).sin() + 0.3 * (seed * tau).cos()),
        ]
    })
}

#[test]
fn second_variation_is_quadratic_and_bilinear() {
    let grid = breathing_ring(1.0, 1.0, 64, 32).unwrap();
    let e1 = transverse_field(&grid, 0.3);
    let e2 = transverse_field(&grid, 1.9);
    let r = |e: &NodeField| second_variation_fd(&grid, e, 1e-3).unwrap();

    assert_eq!(r(&grid.zero_field()), 0.0);

    let (r1, r2) = (r(&e1), r(&e2));
    let r1x2 = r(&e1.scaled(2.0));
    assert!(((r1x2 - 4.0 * r1) / r1x2).abs() < 1e-6, "{r1x2} {r1}");

    let plus = r(&e1.axpy(1.0, &e2).unwrap());
    let minus = r(&e1.axpy(-1.0, &e2).unwrap());
    let lhs = plus + minus;
    let rhs = 2.0 * r1 + 2.0 * r2;
    assert!(((lhs - rhs) / rhs.abs()).abs() < 1e-5, "{lhs} {rhs}");
}

#[test]
fn first_variation_examples() {
    // on a geodesic surface the action is stationary
    let grid = straight_string(1.0, 1.0, 64, 32).unwrap();
    let eta = wiggly_field(&grid, 0.4);
    // the discrete action is stationary up to its O(h²) end corrections
    let fv = |n: usize| {
        let g = straight_string(1.0, 1.0, n, 32).unwrap();
        first_variation_fd(&g, &wiggly_field(&g, 0.4), 1e-4).unwrap().abs()
    };
    let (v1, v2) = (fv(64), fv(128));
    assert!(v2 < 1e-4);
    assert!((slope(v1, v2) - 2.0).abs() < 0.3, "{v1} {v2}");
    assert!(first_variation(&grid, &eta).unwrap().abs() < 1e-10);

    let ring = breathing_ring(1.0, 1.0, 128, 64).unwrap();
    let eta = wiggly_field(&ring, 0.4);
    let tol = geodesic_residual(&ring).unwrap().max_norm();
    assert!(first_variation_fd(&ring, &eta, 1e-3).unwrap().abs() < 100.0 * tol);

    // off-shell tube: the bulk expression reproduces the derivative of S
    let cyl = static_cylinder(1.0, 1.0, 128, 64).unwrap();
    let eta = cyl.sample_field(|t, s| {
        let b = (PI * t).sin();
        vec![0.0, b * s.cos(), b * s.sin(), 0.0]
    });
    let fd = first_variation_fd(&cyl, &eta, 1e-4).unwrap();
    let bulk = first_variation(&cyl, &eta).unwrap();
    assert!(fd.abs() > 1.0);
    assert!(((fd - bulk) / fd).abs() < 1e-3, "{fd} {bulk}");

    let bad = cyl.sample_field(|_, _| vec![0.0, 1.0, 0.0, 0.0]);
    assert!(matches!(second_variation_fd(&cyl, &bad, 1e-3), Err(Error::EndpointNonzero { .. })));
}
