use std::f64::consts::PI;

use approx::assert_relative_eq;
use haus_core::hardy::{h1_norm_estimate, riesz_derivative};
use haus_core::hausdorff::{apply_hausdorff, kernel_eval, multiplier_eval, partial_hausdorff_spectral};
use haus_core::quad::{integrate, Integrand};
use haus_core::signal::{
    forward_fourier, gaussian, gaussian_derivative, gaussian_derivative_power, inverse_fourier, lp_norm, make_atom,
    make_bandlimited,
};
use haus_core::weights::check_admissibility;
use haus_core::{AtomShape, AtomSpec, GridSpec, MaximalConfig, OperatorConfig, ScaleSpec, WeightSpec};
use statrs::function::beta::beta;

fn cfg(w: WeightSpec, eps: f64) -> OperatorConfig {
    OperatorConfig::new(w, ScaleSpec::Reciprocal, eps).unwrap()
}

#[test]
fn sqrt_scale_moments_match_beta_integrals() {
    // under a = 1/t every moment reduces to a Beta function
    let cases = [
        (WeightSpec::power_tail(1.5).unwrap(), (1.5 - 1.0) * beta(1.5 - 0.5, 1.0)),
        (WeightSpec::power_tail(2.0).unwrap(), (2.0 - 1.0) * beta(2.0 - 0.5, 1.0)),
        (WeightSpec::power_bump(0.0).unwrap(), beta(0.5, 1.0)),
        (WeightSpec::power_bump(0.25).unwrap(), 0.75 * beta(0.25, 1.0)),
        (WeightSpec::riemann_liouville(0.5).unwrap(), 1.5 * beta(0.5, 1.5)),
        (WeightSpec::riemann_liouville(1.0).unwrap(), 2.0 * beta(0.5, 2.0)),
    ];
    for (w, expected) in cases {
        let r = check_admissibility(&w, &ScaleSpec::Reciprocal).unwrap();
        assert!(r.passed, "{w}");
        assert!((r.integral_phi - 1.0).abs() <= 1e-8, "{w}: {}", r.integral_phi);
        let got = r.l1_phi_sqrt_a.expect("finite");
        assert_relative_eq!(got, expected, max_relative = 1e-7);
    }
}

#[test]
fn riemann_liouville_first_moment_diverges() {
    for alpha in [0.5, 1.0] {
        let r = check_admissibility(&WeightSpec::riemann_liouville(alpha).unwrap(), &ScaleSpec::Reciprocal).unwrap();
        assert!(r.passed);
        assert!(r.l1_phi_a.is_none());
        assert!(r.notes.iter().any(|n| n.contains("diverges")));
    }
}

#[test]
fn plancherel_oracle_for_power_tail() {
    // the multiplier has a kink at |eps xi| = 1, so the discrete Plancherel sum
    // only converges like dxi^2; a wide grid keeps that below 1e-6
    let f = gaussian_derivative(GridSpec::centered(1.0 / 8.0, 1 << 14).unwrap()).unwrap();
    for eps in [1.0, 0.25, 0.05] {
        let c = cfg(WeightSpec::power_tail(2.0).unwrap(), eps);
        let out = partial_hausdorff_spectral(&c, &f).unwrap();
        let got = lp_norm(&out.signal.sub(&f).unwrap(), 2.0).unwrap();
        let edge = 1.0 / eps;
        let gap = |xi: f64| (eps * xi).min(1.0).powi(2) * gaussian_derivative_power(xi);
        let g = Integrand::on(gap, 0.0, 60.0).with_singular_points([edge]);
        let half = integrate(&g, 1e-13, 1e-16).unwrap().value;
        let expected = (2.0 * half / (2.0 * PI)).sqrt();
        assert_relative_eq!(got, expected, max_relative = 1e-6);
    }
}

#[test]
fn fejer_kernel_and_its_dilations() {
    let c = cfg(WeightSpec::power_tail(2.0).unwrap(), 0.5);
    for s in [0.3, 1.0, 4.0, 17.5] {
        let fejer = (1.0 - f64::cos(s)) / (PI * s * s);
        assert_relative_eq!(kernel_eval(&c, s, false).unwrap(), fejer, max_relative = 1e-7);
        let scaled = 2.0 * (1.0 - f64::cos(2.0 * s)) / (PI * 4.0 * s * s);
        assert_relative_eq!(kernel_eval(&c, s, true).unwrap(), scaled, max_relative = 1e-7);
    }
    assert_relative_eq!(kernel_eval(&c, 0.0, false).unwrap(), 0.5 / PI, max_relative = 1e-9);
}

#[test]
fn multiplier_closed_forms() {
    let rl = cfg(WeightSpec::riemann_liouville(0.5).unwrap(), 1.0);
    let bump = cfg(WeightSpec::power_bump(0.25).unwrap(), 1.0);
    let hardy = cfg(WeightSpec::adjoint_hardy(), 1.0);
    for x in [-3.5, -1.0, -0.2, 0.0, 0.7, 1.0, 2.5, 40.0] {
        let ax = f64::abs(x);
        let rl_exact = if ax <= 1.0 { 1.0 } else { 1.0 - (1.0 - 1.0 / ax).powf(1.5) };
        let bump_exact = if ax <= 1.0 { 1.0 } else { ax.powf(-0.75) };
        assert_relative_eq!(multiplier_eval(&rl, x).unwrap(), rl_exact, epsilon = 1e-9);
        assert_relative_eq!(multiplier_eval(&bump, x).unwrap(), bump_exact, epsilon = 1e-9);
        assert_relative_eq!(multiplier_eval(&hardy, x).unwrap(), f64::min(1.0, 1.0 / ax), epsilon = 1e-9);
    }
}

#[test]
fn adjoint_hardy_identity() {
    // the odd part integrates to zero, the even part to exp(-x^2)
    let f = GridSpec::centered(1.0 / 64.0, 2048)
        .unwrap()
        .sample(|t: f64| (t * t - 0.3 * t * t * t) * (-t * t).exp())
        .unwrap();
    for x in [0.0, 0.4, -1.1, 1.9, -3.0] {
        let h = apply_hausdorff(&WeightSpec::adjoint_hardy(), &ScaleSpec::Reciprocal, &f, x).unwrap();
        assert!((h - 0.5 * f64::exp(-x * x)).abs() <= 2e-3, "x = {x}: {h}");
    }
}

#[test]
fn riesz_second_order_matches_finite_differences() {
    let grid = GridSpec::centered(1.0 / 32.0, 1 << 11).unwrap();
    let f = gaussian(grid).unwrap();
    let d2 = riesz_derivative(&f, 2.0).unwrap();
    let h = 1e-3;
    let g = |x: f64| f64::exp(-x * x / 2.0);
    let oracle = grid
        .sample(|x| -(g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h))
        .unwrap();
    let rel = lp_norm(&d2.sub(&oracle).unwrap(), 2.0).unwrap() / lp_norm(&oracle, 2.0).unwrap();
    assert!(rel <= 1e-3, "{rel}");
}

#[test]
fn h1_estimate_is_dilation_invariant() {
    let grid = GridSpec::centered(1.0 / 16.0, 1 << 13).unwrap();
    let narrow = make_atom(&AtomSpec::new(0.0, 4.0, AtomShape::SmoothOddBump).unwrap(), grid).unwrap();
    let wide = make_atom(&AtomSpec::new(0.0, 8.0, AtomShape::SmoothOddBump).unwrap(), grid).unwrap();
    let mcfg = MaximalConfig::for_signal(&narrow).unwrap();
    let a = h1_norm_estimate(&narrow, &mcfg).unwrap().value;
    // atoms carry the 1/|I| normalization, so `wide` is `narrow` dilated by 2
    let b = h1_norm_estimate(&wide, &mcfg).unwrap().value;
    assert!((a / b - 1.0).abs() <= 0.05, "{a} vs {b}");
}

#[test]
fn fourier_round_trip() {
    let grid = GridSpec::new(-7.3, 0.021, 1000).unwrap();
    let f = make_atom(&AtomSpec::new(0.4, 3.0, AtomShape::DifferenceOfBumps).unwrap(), grid).unwrap();
    let back = inverse_fourier(&forward_fourier(&f).unwrap()).unwrap();
    let err = back
        .values()
        .iter()
        .zip(f.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1e-10, "{err}");
}

#[test]
fn band_limited_input_is_reproduced() {
    let b = 4.0;
    let f = make_bandlimited(b, GridSpec::centered(1.0 / 16.0, 1 << 12).unwrap()).unwrap();
    let norm = lp_norm(&f, 2.0).unwrap();
    for w in [WeightSpec::riemann_liouville(1.0).unwrap(), WeightSpec::power_bump(0.25).unwrap()] {
        for (eps, exact) in [(0.1, true), (1.0 / b, true), (4.0 / b, false)] {
            let out = partial_hausdorff_spectral(&cfg(w.clone(), eps), &f).unwrap().signal;
            let rel = lp_norm(&out.sub(&f).unwrap(), 2.0).unwrap() / norm;
            if exact {
                assert!(rel <= 1e-6, "{w} eps={eps}: {rel}");
            } else {
                assert!(rel > 1e-3, "{w} eps={eps}: {rel}");
            }
        }
    }
}
