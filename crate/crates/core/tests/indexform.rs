use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use wsmorse::indexform::{
    broken_jacobi_field, index_form, index_form_with_breaks, negative_mode, positivity_certificate, random_field,
    Jet, NodeData, RandomFieldSpec, Side, VariationField, DEFAULT_EPS,
};
use wsmorse::jacobi::{integrate_jacobi, TidalMatrix};
use wsmorse::worldsheet::second_variation_fd;
use wsmorse::worldsheet::tubes::straight_string;
use wsmorse::Error;

fn sine(t_end: f64, n: usize) -> VariationField {
    let w = PI / t_end;
    VariationField::scalar_from_fn(t_end, n, &[], |t, _| ((w * t).sin(), w * (w * t).cos(), -w * w * (w * t).sin()))
        .unwrap()
}

fn tent(t_end: f64, n: usize, peak: f64) -> VariationField {
    let mid = 0.5 * t_end;
    let s = peak / mid;
    VariationField::scalar_from_fn(t_end, n, &[mid], |t, side| {
        if t < mid || (t == mid && side == Side::Left) {
            (s * t, s, 0.0)
        } else {
            (s * (t_end - t), -s, 0.0)
        }
    })
    .unwrap()
}

fn spec(t_end: f64, n: usize, dim: usize, breaks: usize) -> RandomFieldSpec {
    RandomFieldSpec {
        t_end,
        n_intervals: n,
        dim,
        modes: 4,
        max_breaks: breaks,
    }
}

#[test]
fn flat_sine_gives_pi_cubed() {
    let v = sine(1.0, 200);
    let m = TidalMatrix::scalar(0.0, 1).unwrap();
    // 2π ∫₀¹ π² cos²(πτ) dτ
    let i = index_form(&v, &v, &m).unwrap();
    assert!((i - PI.powi(3)).abs() < 1e-6, "{i}");
    let j = index_form_with_breaks(&v, &v, &m).unwrap();
    assert!((j - PI.powi(3)).abs() < 1e-6, "{j}");
}

#[test]
fn zero_field_gives_zero() {
    let m = TidalMatrix::scalar(0.7, 2).unwrap();
    let zero = VariationField::zero(2.0, 50, 2).unwrap();
    let w = random_field(&spec(2.0, 50, 2, 2), 3).unwrap();
    assert_eq!(index_form(&zero, &w, &m).unwrap(), 0.0);
    assert_eq!(index_form(&w, &zero, &m).unwrap(), 0.0);
    assert_eq!(index_form_with_breaks(&zero, &w, &m).unwrap(), 0.0);
}

#[test]
fn jacobi_field_with_conjugate_ends_is_null() {
    let t_end = 2.0;
    let lambda = (PI / t_end).powi(2);
    let m = TidalMatrix::scalar(lambda, 1).unwrap();
    let v = sine(t_end, 400);
    assert!(index_form(&v, &v, &m).unwrap().abs() < 1e-8);
    assert!(index_form_with_breaks(&v, &v, &m).unwrap().abs() < 1e-12);
}

#[test]
fn tent_agrees_in_both_forms() {
    let (t_end, peak) = (2.0, 0.7);
    let v = tent(t_end, 100, peak);
    let m = TidalMatrix::scalar(0.0, 1).unwrap();
    // slope s = 2p/T: ∫V'² = s²T, and the jump term gives 2π·p·2s
    let exact = 8.0 * PI * peak * peak / t_end;
    let a = index_form(&v, &v, &m).unwrap();
    let b = index_form_with_breaks(&v, &v, &m).unwrap();
    assert!((a - exact).abs() < 1e-12, "{a} {exact}");
    assert!((b - exact).abs() < 1e-12, "{b} {exact}");
    assert_eq!(v.break_taus(), vec![1.0]);
    assert!((v.derivative_jump(50)[0] + 2.0 * peak).abs() < 1e-14);
}

#[test]
fn symmetry_and_integration_by_parts_on_random_fields() {
    let m = TidalMatrix::function(2, |t| {
        nalgebra::DMatrix::from_row_slice(2, 2, &[1.0 + 0.3 * t.sin(), 0.2, 0.2, -0.5 + 0.1 * t])
    })
    .unwrap();
    for seed in 0..20 {
        let v = random_field(&spec(3.0, 600, 2, 3), seed).unwrap();
        let w = random_field(&spec(3.0, 600, 2, 3), 1000 + seed).unwrap();
        let vw = index_form(&v, &w, &m).unwrap();
        let wv = index_form(&w, &v, &m).unwrap();
        assert!((vw - wv).abs() <= 1e-12 * vw.abs().max(1.0), "{vw} {wv}");
        let parts = index_form_with_breaks(&v, &w, &m).unwrap();
        assert!((vw - parts).abs() < 1e-6, "seed {seed}: {vw} {parts}");
    }
}

#[test]
fn broken_jacobi_pairing_is_the_jump_term() {
    // J = sin τ on [0, π], zero after; V supported near r = π
    let m = TidalMatrix::scalar(1.0, 1).unwrap();
    let (t_end, n) = (1.5 * PI, 900);
    let like = VariationField::zero(t_end, n, 1).unwrap();
    let (j, u, jump) = broken_jacobi_field(&m, PI, &like).unwrap();
    assert!((u[0] - 1.0).abs() < 1e-14);
    assert!((jump[0] - 1.0).abs() < 1e-9, "{}", jump[0]);
    // support edges on grid nodes that also bound quadrature panels
    let width = PI / 10.0;
    let bump = VariationField::scalar_from_fn(t_end, n, &[], |t, _| {
        let x = (t - PI) / width;
        if x.abs() >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        // cos⁴ keeps the integrands smooth enough for the quadrature
        let (c, sn) = ((0.5 * PI * x).cos(), (0.5 * PI * x).sin());
        let k = 0.5 * PI / width;
        (
            c.powi(4),
            -4.0 * k * c.powi(3) * sn,
            4.0 * k * k * (3.0 * c * c * sn * sn - c.powi(4)),
        )
    })
    .unwrap();
    // −2π V(r)·ΔJ' = 2π V(r) J'(r⁻), with J'(π⁻) = −1
    let expected = TAU * 1.0 * (-1.0);
    let got = index_form_with_breaks(&bump, &j, &m).unwrap();
    assert!((got - expected).abs() < 1e-8, "{got}");
    let direct = index_form(&bump, &j, &m).unwrap();
    assert!((direct - expected).abs() < 1e-6, "{direct}");
}

#[test]
fn certificate_matches_index_form() {
    let m = TidalMatrix::scalar(0.0, 1).unwrap();
    let v = sine(1.0, 400);
    let traj = integrate_jacobi(&m, 1.0, 1e-3).unwrap();
    let cert = positivity_certificate(&m, &traj, &v).unwrap();
    let i = index_form(&v, &v, &m).unwrap();
    assert!(cert.value > 0.0);
    assert!(((cert.value - i) / i).abs() < 1e-5, "{} {i}", cert.value);
}

#[test]
fn random_fields_are_positive_without_conjugate_strings() {
    for (lambda, t_end) in [(-1.0, 3.0), (1.0, 2.5)] {
        let m = TidalMatrix::scalar(lambda, 2).unwrap();
        let traj = integrate_jacobi(&m, t_end, 1e-3).unwrap();
        for seed in 0..100 {
            let v = random_field(&spec(t_end, 300, 2, 2), seed).unwrap();
            let i = index_form(&v, &v, &m).unwrap();
            let cert = positivity_certificate(&m, &traj, &v).unwrap();
            assert!(i >= -1e-8);
            if lambda < 0.0 {
                assert!(cert.value > 0.0);
            }
            assert!(((cert.value - i) / i).abs() < 1e-5, "λ {lambda} seed {seed}: {} {i}", cert.value);
        }
    }
}

#[test]
fn certificate_rejects_conjugate_strings() {
    let m = TidalMatrix::scalar(1.0, 1).unwrap();
    let traj = integrate_jacobi(&m, 4.0, 1e-3).unwrap();
    let v = sine(4.0, 200);
    match positivity_certificate(&m, &traj, &v) {
        Err(Error::ConjugateStringPresent { tau }) => assert!((tau - PI).abs() < 1e-8),
        other => panic!("{other:?}"),
    }
}

fn unit_jump_field(t_end: f64, n: usize, scale: f64) -> VariationField {
    // k(π) = 1 and k(0) = k(1.5π) = 0
    let a = scale / (3.0_f64.sqrt() / 2.0);
    let w = 2.0 / 3.0;
    VariationField::scalar_from_fn(t_end, n, &[], |t, _| {
        (a * (w * t).sin(), a * w * (w * t).cos(), -a * w * w * (w * t).sin())
    })
    .unwrap()
}

#[test]
fn negative_mode_reaches_minus_four_pi_c() {
    let m = TidalMatrix::scalar(1.0, 1).unwrap();
    let t_end = 1.5 * PI;
    let k = unit_jump_field(t_end, 900, 1.0);
    let nm = negative_mode(&m, PI, &k, &DEFAULT_EPS).unwrap();
    assert!((nm.c - 1.0).abs() < 1e-9);
    assert!(((nm.i_kj + TAU) / TAU).abs() < 1e-5, "{}", nm.i_kj);
    assert!(nm.i_jj.abs() < 1e-12);
    assert!(((nm.extrapolated + 2.0 * TAU) / (2.0 * TAU)).abs() < 1e-4, "{}", nm.extrapolated);
    assert!((nm.extrapolated - nm.predicted_limit()).abs() < 1e-4 * 2.0 * TAU);
    assert!(((nm.eps2_coefficient - nm.i_kk) / nm.i_kk).abs() < 1e-6);
    assert!(nm.monotone);
    for s in &nm.samples {
        let model = s.eps * s.eps * nm.i_kk + 2.0 * nm.i_kj;
        assert!((s.index - model).abs() < 1e-6, "{} {model}", s.index);
    }
    assert!(nm.samples.iter().all(|s| s.index < 0.0));

    // scaling k doubles c and the limit
    let k2 = unit_jump_field(t_end, 900, 2.0);
    let nm2 = negative_mode(&m, PI, &k2, &DEFAULT_EPS).unwrap();
    assert!((nm2.c - 2.0).abs() < 1e-9);
    assert!((nm2.i_kj - 2.0 * nm.i_kj).abs() < 1e-9);
    assert!((nm2.extrapolated - 2.0 * nm.extrapolated).abs() < 1e-6);
}

#[test]
fn negative_mode_errors() {
    let m = TidalMatrix::scalar(1.0, 1).unwrap();
    let t_end = 1.5 * PI;
    let k = unit_jump_field(t_end, 900, 1.0);
    assert!(matches!(
        negative_mode(&m, 2.0 * PI / 3.0, &k, &DEFAULT_EPS),
        Err(Error::NoConjugateString { .. })
    ));
    let flipped = unit_jump_field(t_end, 900, -1.0);
    assert!(matches!(
        negative_mode(&m, PI, &flipped, &DEFAULT_EPS),
        Err(Error::NonPositiveJump { .. })
    ));
    assert!(matches!(negative_mode(&m, 3.0, &k, &DEFAULT_EPS), Err(Error::BreakOffGrid { .. })));
    assert!(negative_mode(&m, PI, &k, &[0.1]).is_err());
}

#[test]
fn field_construction_errors() {
    let bad_end = VariationField::scalar_from_fn(1.0, 10, &[], |t, _| (t, 1.0, 0.0));
    assert!(matches!(bad_end, Err(Error::EndpointNonzero { .. })));
    let off = VariationField::scalar_from_fn(1.0, 10, &[0.55], |_, _| (0.0, 0.0, 0.0));
    assert!(matches!(off, Err(Error::BreakOffGrid { .. })));

    let taus: Vec<f64> = (0..=4).map(|k| k as f64 * 0.25).collect();
    let node = |v: f64, left: bool, right: bool| NodeData {
        value: vec![v],
        left: left.then(|| (vec![0.0], vec![0.0])),
        right: right.then(|| (vec![0.0], vec![0.0])),
    };
    let data = vec![node(0.0, false, true), node(1.0, true, true), node(2.0, false, true), node(1.0, true, true), node(0.0, true, false)];
    let missing = VariationField::from_node_data(taus.clone(), data, &[0.5]);
    assert!(matches!(missing, Err(Error::MissingBreakData { .. })));

    let a = sine(1.0, 10);
    let b = sine(1.0, 12);
    let m = TidalMatrix::scalar(0.0, 1).unwrap();
    assert!(matches!(index_form(&a, &b, &m), Err(Error::GridMismatch(_))));
    assert!(matches!(index_form_with_breaks(&a, &b, &m), Err(Error::GridMismatch(_))));
    let m2 = TidalMatrix::scalar(0.0, 2).unwrap();
    assert!(matches!(index_form(&a, &a, &m2), Err(Error::DimensionMismatch { .. })));
    let j = Jet::scalar(0.0, 0.0, 0.0);
    assert_eq!(j.value.len(), 1);
}

#[test]
fn matches_second_variation_on_straight_string() {
    // transverse y, z deformations of the flat straight string, where M = 0
    let (t_end, n) = (1.0, 800);
    let grid = straight_string(1.0, t_end, n, 16).unwrap();
    let m = TidalMatrix::scalar(0.0, 2).unwrap();
    for seed in 0..3 {
        let v = random_field(&RandomFieldSpec { modes: 2, ..spec(t_end, n, 2, 0) }, seed).unwrap();
        let mut eta = grid.zero_field();
        for k in 0..grid.n_tau() {
            let val = v.value(k);
            for j in 0..grid.n_sigma() {
                eta.set(k, j, &[0.0, 0.0, val[0], val[1]]);
            }
        }
        let fd = second_variation_fd(&grid, &eta, 1e-3).unwrap();
        let i = index_form(&v, &v, &m).unwrap();
        assert!(((fd - i) / i).abs() < 1e-4, "seed {seed}: {fd} {i}");
    }
}

#[test]
fn random_fields_are_reproducible() {
    let s = spec(2.0, 100, 3, 4);
    assert_eq!(random_field(&s, 42).unwrap(), random_field(&s, 42).unwrap());
    assert_ne!(random_field(&s, 42).unwrap(), random_field(&s, 43).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn both_forms_agree(seed_v in any::<u64>(), seed_w in any::<u64>(), lambda in -2.0..2.0f64) {
        let m = TidalMatrix::scalar(lambda, 2).unwrap();
        let v = random_field(&spec(2.0, 500, 2, 3), seed_v).unwrap();
        let w = random_field(&spec(2.0, 500, 2, 3), seed_w).unwrap();
        let a = index_form(&v, &w, &m).unwrap();
        let b = index_form_with_breaks(&v, &w, &m).unwrap();
        prop_assert!((a - b).abs() < 1e-6, "{} {}", a, b);
        let c = index_form(&w, &v, &m).unwrap();
        prop_assert!((a - c).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn bilinear_in_the_first_slot(seed in any::<u64>(), s in -3.0..3.0f64) {
        let m = TidalMatrix::scalar(0.5, 1).unwrap();
        // no breaks, so both sides use the same quadrature panels
        let v = random_field(&spec(2.0, 200, 1, 0), seed).unwrap();
        let w = random_field(&spec(2.0, 200, 1, 0), seed.wrapping_add(1)).unwrap();
        let sum = v.linear_combination(s, &w, 1.0).unwrap();
        let lhs = index_form(&sum, &w, &m).unwrap();
        let rhs = s * index_form(&v, &w, &m).unwrap() + index_form(&w, &w, &m).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
    }
}
