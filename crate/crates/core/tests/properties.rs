//! Property tests for the numerical invariants.

use coxnet::analytic::model::PowerLawSegment;
use coxnet::analytic::*;
use coxnet::quadrature::{integrate_finite, integrate_to_infinity};
use coxnet::special::{gauss_2f1_unit_a, powerlaw_integral_term, reg_upper_gamma, Limit};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn upper_gamma_monotone(l in 1u32..64, x in 0.0f64..200.0, dx in 0.0f64..5.0) {
        let q = reg_upper_gamma(l, x).unwrap();
        prop_assert!(reg_upper_gamma(l, x + dx).unwrap() <= q + 1e-15);
        prop_assert!(reg_upper_gamma(l + 1, x).unwrap() >= q - 1e-15);
        prop_assert!((0.0..=1.0).contains(&q));
    }

    #[test]
    fn hypergeometric_range_and_monotone(b in 0.01f64..20.0, z in -1e8f64..0.0, f in 1.0f64..10.0) {
        let v = gauss_2f1_unit_a(b, z).unwrap();
        prop_assert!(v > 0.0 && v <= 1.0);
        prop_assert!(gauss_2f1_unit_a(b, z * f).unwrap() <= v * (1.0 + 1e-13));
    }

    #[test]
    fn powerlaw_term_matches_quadrature(kappa in -1.9f64..1.5, alpha in 2.5f64..6.0, lg in -4.0f64..8.0, lr in -1.0f64..4.0) {
        let gamma = 10f64.powf(lg);
        let r = 10f64.powf(lr);
        let f = |x: f64| x.powf(kappa + 1.0) * gamma / (x.powf(alpha) + gamma);
        let q = coxnet::quadrature::integrate_finite_singular(f, 0.0, r, 1e-12, coxnet::quadrature::Singularity::Left).unwrap().value;
        let v = powerlaw_integral_term(kappa, alpha, gamma, Limit::Finite(r)).unwrap();
        prop_assert!(rel(v, q) < 1e-8, "{} vs {}", v, q);
    }

    #[test]
    fn quadrature_split_invariance(a in -3.0f64..0.0, w in 0.5f64..6.0, t in 0.05f64..0.95, c in 0.2f64..4.0) {
        let f = |x: f64| (c * x).sin().exp() + 1.0 / (1.0 + x * x);
        let b = a + w;
        let m = a + t * w;
        let whole = integrate_finite(f, a, b, 1e-12).unwrap().value;
        let parts = integrate_finite(f, a, m, 1e-12).unwrap().value + integrate_finite(f, m, b, 1e-12).unwrap().value;
        prop_assert!(rel(parts, whole) < 1e-9);
    }

    #[test]
    fn psi_monotone_in_gamma(rho in 1e-4f64..1.0, eps in -1.8f64..1.5, half in 1.0f64..50.0) {
        let models = [
            IntensityModel::power_law(rho, eps),
            IntensityModel::Strip { half_width: half, density: rho },
            IntensityModel::DiskCluster { center_distance: 2.0 * half, radius: half, density: rho },
            IntensityModel::GaussianCluster { center_distance: half, width: half / 3.0, mean_points: 100.0 * rho },
        ];
        for m in &models {
            let mut prev = 0.0;
            for k in 0..=16 {
                let g = 10f64.powf(-2.0 + k as f64 * 0.5);
                let v = psi(m, 4.0, g).unwrap();
                prop_assert!(v >= prev * (1.0 - 1e-12));
                prev = v;
            }
        }
    }

    #[test]
    fn cdf_bounded_monotone_and_antenna_ordered(rho in 1e-4f64..0.1, eps in -1.5f64..0.5, noise in 1e-14f64..1e-6) {
        let m = IntensityModel::power_law(rho, eps);
        let p = SystemParams { antennas: 4, alpha: 4.0, noise, link_distance: 10.0 };
        prop_assert_eq!(cdf(&p, &m, 0.0).unwrap(), 0.0);
        let mut prev = 0.0;
        for k in 0..=20 {
            let g = 10f64.powf(k as f64 * 0.5);
            let v = cdf(&p, &m, g).unwrap();
            prop_assert!((0.0..=1.0).contains(&v) && v >= prev - 1e-14);
            prev = v;
            let mut last = 1.0;
            for l in 1..=16 {
                let f = cdf(&SystemParams { antennas: l, ..p }, &m, g).unwrap();
                prop_assert!(f <= last + 1e-14);
                last = f;
            }
        }
    }

    #[test]
    fn superposition_is_additive(r1 in 1e-4f64..0.1, r2 in 1e-4f64..0.1, a in 1.0f64..30.0, lg in -2.0f64..8.0) {
        let x = IntensityModel::power_law(r1, -0.5);
        let y = IntensityModel::Strip { half_width: a, density: r2 };
        let s = IntensityModel::Superposition { members: vec![x.clone(), y.clone()] };
        let g = 10f64.powf(lg);
        let sum = psi(&x, 4.0, g).unwrap() + psi(&y, 4.0, g).unwrap();
        prop_assert!(rel(psi(&s, 4.0, g).unwrap(), sum) < 1e-12);
    }

    #[test]
    fn split_segment_is_consistent(rho in 1e-4f64..1.0, eps in -1.8f64..1.5, cut in 0.1f64..100.0, lg in -2.0f64..8.0) {
        let g = 10f64.powf(lg);
        let whole = IntensityModel::PiecewisePowerLaw { segments: vec![PowerLawSegment { inner: 0.0, outer: None, density: rho, exponent: eps }] };
        let split = IntensityModel::PiecewisePowerLaw { segments: vec![
            PowerLawSegment { inner: 0.0, outer: Some(cut), density: rho, exponent: eps },
            PowerLawSegment { inner: cut, outer: None, density: rho, exponent: eps },
        ] };
        prop_assert!(rel(psi(&split, 4.0, g).unwrap(), psi(&whole, 4.0, g).unwrap()) < 1e-10);
    }

    #[test]
    fn closed_form_matches_quadrature_cdf(rho in 1e-4f64..0.1, eps in -1.8f64..0.0, alpha in 2.5f64..6.0, lg in 0.0f64..8.0) {
        let p = SystemParams { antennas: 6, alpha, noise: 1e-10, link_distance: 10.0 };
        let g = 10f64.powf(lg);
        let m = IntensityModel::power_law(rho, eps);
        let psi_q = psi_by_quadrature(&m, alpha, g, 1e-12).unwrap();
        let generic = cdf_nonhomog(&p, psi_q, g).unwrap();
        let closed = cdf_power_law_closed_form(&p, rho, eps, g).unwrap();
        prop_assert!((generic - closed).abs() < 1e-9);
    }
}

#[test]
fn powerlaw_term_converges_to_infinite_limit() {
    let inf = powerlaw_integral_term(0.0, 4.0, 1.0, Limit::Infinite).unwrap();
    for r in [1e3, 1e4, 1e6] {
        assert!(rel(powerlaw_integral_term(0.0, 4.0, 1.0, Limit::Finite(r)).unwrap(), inf) < 1e-6);
    }
}

#[test]
fn error_estimates_bound_true_error() {
    type F = fn(f64) -> f64;
    let library: [(F, f64, f64, f64); 20] = [
        (|x| x * x, 0.0, 1.0, 1.0 / 3.0),
        (|x| x.exp(), 0.0, 2.0, 2f64.exp() - 1.0),
        (|x| x.sin(), 0.0, std::f64::consts::PI, 2.0),
        (|x| x.cos(), 0.0, 10.0, 10f64.sin()),
        (|x| 1.0 / (1.0 + x * x), 0.0, 100.0, 100f64.atan()),
        (|x| x.sqrt(), 0.0, 4.0, 16.0 / 3.0),
        (|x| 1.0 / x.sqrt(), 0.0, 1.0, 2.0),
        (|x| x.ln(), 1e-300, 1.0, -1.0),
        (|x| 1.0 / x, 1.0, 1e6, 1e6f64.ln()),
        (|x| (-x).exp(), 0.0, 50.0, 1.0 - (-50f64).exp()),
        (|x| x.powi(7), -1.0, 2.0, (256.0 - 1.0) / 8.0),
        (|x| x.sinh(), 0.0, 3.0, 3f64.cosh() - 1.0),
        (|x| 1.0 / (1.0 + x), 0.0, 1.0, std::f64::consts::LN_2),
        (|x| (20.0 * x).sin(), 0.0, 1.0, (1.0 - 20f64.cos()) / 20.0),
        (|x| x.abs(), -1.0, 2.0, 2.5),
        (|x| (-(x * x)).exp(), -6.0, 6.0, std::f64::consts::PI.sqrt()),
        (|x| x.powf(-0.9), 0.0, 1.0, 10.0),
        (|x| 1.0 / (x * x + 1e-4), -1.0, 1.0, 2.0 * 100.0 * 100f64.atan()),
        (|x| x * (-x).exp(), 0.0, 40.0, 1.0 - 41.0 * (-40f64).exp()),
        (|x| (x.sin()).powi(2), 0.0, 2.0 * std::f64::consts::PI, std::f64::consts::PI),
    ];
    for (i, (f, a, b, exact)) in library.iter().enumerate() {
        let r = integrate_finite(f, *a, *b, 1e-10).unwrap();
        let err = (r.value - exact).abs();
        assert!(err <= 10.0 * r.abs_error_estimate.max(1e-15 * exact.abs()), "integral {i}: error {err:e} estimate {:e}", r.abs_error_estimate);
    }
    let tail = integrate_to_infinity(|x: f64| 1.0 / (1.0 + x * x), &[0.0], 1.0, 1e-10).unwrap();
    assert!((tail.value - std::f64::consts::FRAC_PI_2).abs() <= 10.0 * tail.abs_error_estimate.max(1e-15));
}

#[test]
fn scaling_limit_is_a_step_for_many_antennas() {
    // κ = 3/8 converges slowly, so a large array is used
    let m = IntensityModel::power_law(1.0, -0.5);
    let (alpha, r_t, ell) = (4.0, 10.0, 0.0125);
    let sir = scaling_limit_sir(&m, ell, alpha, r_t).unwrap();
    let gamma_star = sir * r_t.powf(alpha);
    let l = 5000u32;
    let beta = ell * l as f64;
    let scaled = m.scaled(beta).unwrap();
    let p = SystemParams { antennas: l, alpha, noise: 0.0, link_distance: r_t };
    assert!(cdf(&p, &scaled, gamma_star * 0.9).unwrap() <= 0.1);
    assert!(cdf(&p, &scaled, gamma_star * 1.1).unwrap() >= 0.9);
}
