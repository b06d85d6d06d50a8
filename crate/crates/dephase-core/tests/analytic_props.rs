//! Property checks of the closed forms: derivative consistency between
//! `F`, `Gamma` and `S`, monotonicity, symmetry, ordering in the
//! nonstationarity parameter, and regime continuity.

use dephase_core::analytic::{
    self, ou_linear_f, ou_linear_gamma, ou_linear_shift, ou_quadratic_f, ou_quadratic_gamma,
    ou_quadratic_shift, rtn_linear_f, rtn_linear_gamma, rtn_linear_shift,
};
use dephase_core::noise::{trajectory_rng, Coupling, NoiseModel, OuParams, RtnParams};
use dephase_core::Complex;
use proptest::prelude::*;
use rand::Rng;

/// Central-difference rate/shift from `F` alone.
fn fd_rates<F: Fn(f64) -> Complex>(f: &F, t: f64, h: f64) -> (f64, f64) {
    let df = (f(t + h) - f(t - h)) / (2.0 * h);
    let ratio = df / f(t);
    (-ratio.re, -ratio.im)
}

fn assert_consistent(gamma: f64, shift: f64, fd_gamma: f64, fd_shift: f64, label: &str) {
    let scale = gamma.abs().max(shift.abs()).max(1.0);
    assert!(
        (gamma - fd_gamma).abs() < 1e-6 * scale,
        "{label}: Gamma {gamma} vs finite difference {fd_gamma}"
    );
    assert!(
        (shift - fd_shift).abs() < 1e-6 * scale,
        "{label}: S {shift} vs finite difference {fd_shift}"
    );
}

#[test]
fn ou_linear_rates_match_derivative() {
    let mut rng = trajectory_rng(101, 0);
    for draw in 0..100 {
        let p = OuParams::new(
            rng.random_range(0.5..2.0),
            rng.random_range(0.5..2.0),
            rng.random_range(-0.9..0.9),
            rng.random_range(-1.5..1.5),
        )
        .unwrap();
        let c = rng.random_range(0.2..1.5) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let t = rng.random_range(0.05..4.0);
        let (fd_g, fd_s) = fd_rates(&|t| ou_linear_f(t, &p, c), t, 1e-5);
        assert_consistent(
            ou_linear_gamma(t, &p, c),
            ou_linear_shift(t, &p, c),
            fd_g,
            fd_s,
            &format!("ou linear draw {draw}"),
        );
    }
}

#[test]
fn ou_quadratic_rates_match_derivative() {
    let mut rng = trajectory_rng(102, 0);
    for draw in 0..100 {
        let p = OuParams::new(
            rng.random_range(0.5..2.0),
            rng.random_range(0.5..2.0),
            rng.random_range(-0.9..0.9),
            rng.random_range(-1.5..1.5),
        )
        .unwrap();
        let c = rng.random_range(0.2..1.5) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let t = rng.random_range(0.05..4.0);
        let (fd_g, fd_s) = fd_rates(&|t| ou_quadratic_f(t, &p, c), t, 1e-5);
        assert_consistent(
            ou_quadratic_gamma(t, &p, c),
            ou_quadratic_shift(t, &p, c),
            fd_g,
            fd_s,
            &format!("ou quadratic draw {draw}"),
        );
    }
}

#[test]
fn rtn_linear_rates_match_derivative() {
    let mut rng = trajectory_rng(103, 0);
    let mut checked = 0;
    while checked < 100 {
        let p = RtnParams::new(
            rng.random_range(0.5..2.0),
            rng.random_range(0.5..2.0),
            rng.random_range(-1.0..1.0),
        )
        .unwrap();
        // Half the draws weak, half strong coupling.
        let factor = if checked % 2 == 0 { 0.8 } else { 3.0 };
        let c = factor * p.ratio() * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let t = rng.random_range(0.05..4.0);
        // Near a strong-coupling divergence the finite difference itself is
        // ill conditioned; skip such draws rather than loosening the bound.
        let g = rtn_linear_gamma(t, &p, c);
        if g.diverged || g.value.abs() > 25.0 || rtn_linear_f(t, &p, c).norm() < 0.05 {
            continue;
        }
        let (fd_g, fd_s) = fd_rates(&|t| rtn_linear_f(t, &p, c), t, 1e-6);
        assert_consistent(
            g.value,
            rtn_linear_shift(t, &p, c),
            fd_g,
            fd_s,
            &format!("rtn linear draw {checked}"),
        );
        checked += 1;
    }
}

#[test]
fn rtn_quadratic_rates_are_exact() {
    let p = RtnParams::new(1.0, 1.5, 0.6).unwrap();
    for c in [-2.0, 0.7, 3.0] {
        for t in [0.1, 1.0, 5.0] {
            let (fd_g, fd_s) = fd_rates(&|t| analytic::rtn_quadratic_f(t, &p, c), t, 1e-6);
            assert!(fd_g.abs() < 1e-6);
            assert!((fd_s - analytic::rtn_quadratic_shift(t, &p, c)).abs() < 1e-6);
        }
    }
}

#[test]
fn ou_modulus_decreases_in_time() {
    let p = OuParams::new(1.0, 2.0, 0.5, 1.0).unwrap();
    for c in [0.7, -1.3] {
        let mut prev_lin = f64::INFINITY;
        let mut prev_quad = f64::INFINITY;
        for i in 0..200 {
            let t = 0.025 * i as f64;
            let lin = ou_linear_f(t, &p, c).norm();
            let quad = ou_quadratic_f(t, &p, c).norm();
            assert!(lin <= prev_lin + 1e-14);
            assert!(quad <= prev_quad + 1e-14);
            prev_lin = lin;
            prev_quad = quad;
        }
    }
}

#[test]
fn ou_nonstationarity_ordering_at_unit_time() {
    // A larger |b| narrows the initial law, so dephasing is slower: |F| at
    // t = 1/gamma grows with |b| for both couplings, and the linear-case
    // rate falls with |b| while staying monotone in time.
    let t = 1.0;
    let c = 1.0;
    let mut prev_lin = 0.0;
    let mut prev_quad = 0.0;
    for (i, b) in [0.0, 0.3, 0.6, 0.9].into_iter().enumerate() {
        let p = OuParams::new(1.0, 2.0, b, 1.0).unwrap();
        let lin = ou_linear_f(t, &p, c).norm();
        let quad = ou_quadratic_f(t, &p, c).norm();
        if i > 0 {
            assert!(lin > prev_lin, "linear |F| must grow with |b|: {lin} vs {prev_lin}");
            assert!(quad > prev_quad, "quadratic |F| must grow with |b|: {quad} vs {prev_quad}");
        }
        prev_lin = lin;
        prev_quad = quad;
    }
    // d Gamma / d|b| < 0 at fixed t.
    let g0 = ou_linear_gamma(t, &OuParams::new(1.0, 2.0, 0.0, 1.0).unwrap(), c);
    let g9 = ou_linear_gamma(t, &OuParams::new(1.0, 2.0, 0.9, 1.0).unwrap(), c);
    assert!(g9 < g0);
}

#[test]
fn ou_linear_rate_is_monotone_in_time() {
    for b in [0.0, 0.5, 0.9] {
        let p = OuParams::new(1.0, 2.0, b, 1.0).unwrap();
        let mut prev = -1.0;
        for i in 0..400 {
            let t = 0.02 * i as f64;
            let g = ou_linear_gamma(t, &p, 1.0);
            assert!(g >= prev - 1e-12, "b={b}, t={t}: {g} < {prev}");
            prev = g;
        }
    }
}

#[test]
fn rtn_weak_rate_monotone_and_falling_in_a() {
    let p0 = RtnParams::new(1.0, 1.0, 0.0).unwrap();
    let c = 0.8 * p0.ratio();
    let mut prev = -1.0;
    for i in 0..400 {
        let t = 0.05 * i as f64;
        let g = rtn_linear_gamma(t, &p0, c);
        assert!(!g.diverged);
        assert!(g.value >= prev - 1e-12);
        prev = g.value;
    }
    // Larger |a| slows dephasing at every fixed t > 0.
    for t in [0.3, 1.0, 3.0] {
        let mut prev = f64::INFINITY;
        for a in [0.0, 0.4, 0.8, 1.0] {
            let p = RtnParams::new(1.0, 1.0, a).unwrap();
            let g = rtn_linear_gamma(t, &p, c);
            assert!(!g.diverged);
            assert!(g.value < prev, "t={t}, a={a}: {} not below {prev}", g.value);
            prev = g.value;
        }
    }
}

#[test]
fn shift_symmetries() {
    let t = 0.8;
    // OU linear: S is odd under c -> -c and under (b chi) -> -(b chi).
    let p = OuParams::new(1.0, 2.0, 0.5, 1.0).unwrap();
    let pm = OuParams::new(1.0, 2.0, -0.5, 1.0).unwrap();
    assert_eq!(ou_linear_shift(t, &p, 1.2), -ou_linear_shift(t, &p, -1.2));
    assert_eq!(ou_linear_shift(t, &p, 1.2), -ou_linear_shift(t, &pm, 1.2));
    // OU quadratic: Gamma even, S odd in c.
    assert!((ou_quadratic_gamma(t, &p, 1.2) - ou_quadratic_gamma(t, &p, -1.2)).abs() < 1e-14);
    assert!((ou_quadratic_shift(t, &p, 1.2) + ou_quadratic_shift(t, &p, -1.2)).abs() < 1e-14);
    // RTN linear: S odd in a and in c, Gamma even in both.
    let r = RtnParams::new(1.0, 1.0, 0.6).unwrap();
    let rm = RtnParams::new(1.0, 1.0, -0.6).unwrap();
    assert_eq!(rtn_linear_shift(t, &r, 0.7), -rtn_linear_shift(t, &r, -0.7));
    assert_eq!(rtn_linear_shift(t, &r, 0.7), -rtn_linear_shift(t, &rm, 0.7));
    assert_eq!(
        rtn_linear_gamma(t, &r, 0.7).value,
        rtn_linear_gamma(t, &rm, -0.7).value
    );
}

#[test]
fn rtn_continuity_across_critical_coupling() {
    let p = RtnParams::new(1.0, 1.0, 0.5).unwrap();
    let r = p.ratio();
    for i in 0..80 {
        let t = 0.1 * (i + 1) as f64;
        let below = rtn_linear_f(t, &p, r * (1.0 - 1e-9));
        let above = rtn_linear_f(t, &p, r * (1.0 + 1e-9));
        assert!(
            (below - above).norm() < 1e-6,
            "discontinuity at t={t}: {below} vs {above}"
        );
    }
}

#[test]
fn steady_values_are_long_time_limits() {
    let t = 25.0;
    let p = OuParams::new(1.0, 1.5, 0.4, 0.8).unwrap();
    for coupling in [Coupling::linear(0.9).unwrap(), Coupling::quadratic(0.9).unwrap()] {
        let model = NoiseModel::Ou(p);
        let steady = analytic::steady_values(&model, &coupling);
        let here = analytic::evaluate(&model, &coupling, t);
        assert!((here.gamma - steady.gamma_steady.unwrap()).abs() < 1e-6);
        assert!((here.shift - steady.shift_steady.unwrap()).abs() < 1e-6);
    }
    let r = RtnParams::new(1.0, 1.0, 0.5).unwrap();
    let weak = Coupling::linear(0.8 * r.ratio()).unwrap();
    let model = NoiseModel::Rtn(r);
    let steady = analytic::steady_values(&model, &weak);
    let here = analytic::evaluate(&model, &weak, t);
    assert!((here.gamma - steady.gamma_steady.unwrap()).abs() < 1e-6);
    assert!(here.shift.abs() < 1e-6);
    // Strong coupling has no steady rate.
    let strong = Coupling::linear(3.0 * r.ratio()).unwrap();
    assert_eq!(analytic::steady_values(&model, &strong).gamma_steady, None);
}

proptest! {
    #[test]
    fn modulus_bounded_and_normalized(
        gamma in 0.2f64..3.0,
        sigma in 0.2f64..3.0,
        b in -0.95f64..0.95,
        chi in -2.0f64..2.0,
        c in prop::sample::select(vec![-2.0, -0.7, 0.4, 1.6]),
        k in 1u8..3,
        t in 0.0f64..8.0,
    ) {
        let p = OuParams::new(gamma, sigma, b, chi).unwrap();
        let f = if k == 1 { ou_linear_f(t, &p, c) } else { ou_quadratic_f(t, &p, c) };
        prop_assert!(f.norm() <= 1.0 + 1e-12);
        let f0 = if k == 1 { ou_linear_f(0.0, &p, c) } else { ou_quadratic_f(0.0, &p, c) };
        prop_assert!((f0 - Complex::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rtn_modulus_bounded_and_normalized(
        lambda in 0.2f64..3.0,
        nu in 0.2f64..3.0,
        a in -1.0f64..1.0,
        c in prop::sample::select(vec![-3.0, -0.5, 0.8, 2.5]),
        k in 1u8..3,
        t in 0.0f64..8.0,
    ) {
        let p = RtnParams::new(lambda, nu, a).unwrap();
        let f = if k == 1 { rtn_linear_f(t, &p, c) } else { analytic::rtn_quadratic_f(t, &p, c) };
        prop_assert!(f.norm() <= 1.0 + 1e-12);
        let f0 = if k == 1 { rtn_linear_f(0.0, &p, c) } else { analytic::rtn_quadratic_f(0.0, &p, c) };
        prop_assert!((f0 - Complex::new(1.0, 0.0)).norm() < 1e-12);
    }
}
