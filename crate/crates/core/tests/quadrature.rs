mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use pfaffkp::quadrature::*;
use pfaffkp::Error;
use proptest::prelude::*;

#[test]
fn rule_shape() {
    for order in [2, 5, 24, 48, 128, 512] {
        let r = gauss_legendre_rule(order).unwrap();
        assert_eq!(r.order(), order);
        let sum: f64 = r.weights().iter().sum();
        assert!((sum - 2.0).abs() < 1e-13, "order {order}");
        assert!(r.weights().iter().all(|&w| w > 0.0));
        let nodes = r.nodes();
        for (a, b) in nodes.iter().zip(nodes.iter().rev()) {
            assert!((a + b).abs() < 1e-14);
        }
    }
    assert!(gauss_legendre_rule(1).is_err());
    assert!(gauss_legendre_rule(MAX_RULE_ORDER + 1).is_err());
}

#[test]
fn fermionic_moments_match_adaptive_quadrature() {
    let rule = gauss_legendre_rule(48).unwrap();
    for &w in &[0.0, 0.4, 1.7, 6.0] {
        for k in 0..7 {
            let m = fermionic_moment(k, w, &rule);
            let re = common::integrate(|l| (1.0 - l * l) * l.powi(k as i32) * (PI * w * l).cos(), -1.0, 1.0, 1e-15);
            let im = -common::integrate(|l| (1.0 - l * l) * l.powi(k as i32) * (PI * w * l).sin(), -1.0, 1.0, 1e-15);
            assert!((m - Complex64::new(re, im)).norm() < 1e-14, "w={w} k={k}");
        }
    }
}

/// ∫_1^∞ λ^j e^{κλ} / √(λ²−1) dλ with λ = cosh u.
fn half_line_oracle(j: i32, kappa: Complex64, start_u: f64) -> Complex64 {
    let f = |u: f64, part: fn(Complex64) -> f64| {
        let l = u.cosh();
        part((kappa * l).exp() * l.powi(j))
    };
    let upper = start_u + 12.0;
    let re = common::integrate(|u| f(u, |z| z.re), start_u, upper, 1e-14);
    let im = common::integrate(|u| f(u, |z| z.im), start_u, upper, 1e-14);
    Complex64::new(re, im)
}

#[test]
fn damped_partials_match_hyperbolic_substitution() {
    let settings = PathSettings::default();
    for kappa in [Complex64::new(-1.0, 0.0), Complex64::new(-0.3, 0.8), Complex64::new(-2.0, -1.5)] {
        let weight = ExponentialWeight { kappa, poly: vec![] };
        for j in 0..4 {
            for start in [1.0f64, 1.5] {
                let got = bosonic_half_line_partial(j, &weight, start, &settings).unwrap();
                let want = half_line_oracle(j as i32, kappa, start.acosh());
                assert!((got - want).norm() < 1e-7 * (1.0 + want.norm()), "kappa={kappa} j={j} start={start}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn growing_weight_is_inadmissible() {
    // along the ray λ = 1 + i v², −0.1 λ² grows like 0.1 v⁴
    let weight = ExponentialWeight {
        kappa: Complex64::new(0.0, 1.0),
        poly: vec![Complex64::new(0.0, 0.0), Complex64::new(-0.1, 0.0)],
    };
    let r = HalfLineContour::for_weight(1.0, &weight, &PathSettings::default());
    assert!(matches!(r, Err(Error::Inadmissible(_))), "{r:?}");
    assert!(HalfLineContour::for_weight(0.5, &ExponentialWeight::bosonic(1.0), &PathSettings::default()).is_err());
}

#[test]
#[allow(clippy::needless_range_loop)]
fn bosonic_kernel_is_skew() {
    let (k, change) = bosonic_kernel_matrix(4, &ExponentialWeight::bosonic(0.8), &PathSettings::default()).unwrap();
    assert!(change < 1e-7);
    for i in 0..4 {
        for j in 0..4 {
            assert!((k[i][j] + k[j][i]).norm() < 1e-12 * (1.0 + k[i][j].norm()));
        }
    }
}

#[test]
fn kernel_entry_matches_damped_oracle() {
    let fast = bosonic_debruijn_kernel(1, 2, 1.0, &PathSettings::default()).unwrap();
    let oracle = eta_extrapolated_kernel(1, 2, 1.0, &[0.01, 0.005, 0.0025]).unwrap();
    assert!((fast - oracle.value).norm() <= 10.0 * oracle.error, "{fast} vs {oracle:?}");
}

#[test]
fn fermionic_oracle_matches_pfaffian() {
    let settings = PathSettings::default();
    let o = tensor_symmetric_oracle(OracleKind::Fermionic, 2, 1.0, &settings).unwrap();
    let f = pfaffkp::partition::z_plus(2, 1.0, &Default::default()).unwrap().to_complex();
    assert!((o.value - f).norm() <= 1e-8 * f.norm());
}

#[test]
fn eta_ladder_must_halve() {
    assert!(eta_extrapolated_partial(0, 1.0, 1.0, &[0.01, 0.004, 0.002]).is_err());
}

proptest! {
    #[test]
    fn gauss_legendre_is_exact_for_polynomials(
        order in 2usize..20,
        coeffs in prop::collection::vec(-3.0f64..3.0, 1..40),
        a in -1.0f64..0.0,
        len in 0.1f64..1.0,
    ) {
        let degree = coeffs.len().min(2 * order);
        let c = &coeffs[..degree];
        let b = a + len;
        let rule = gauss_legendre_rule(order).unwrap();
        let got: f64 = rule.integrate(a, b, |x| c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck));
        let anti = |x: f64| c.iter().enumerate().map(|(k, &ck)| ck * x.powi(k as i32 + 1) / (k + 1) as f64).sum::<f64>();
        let want = anti(b) - anti(a);
        let scale: f64 = c.iter().map(|v| v.abs()).sum();
        prop_assert!((got - want).abs() < 1e-13 * (1.0 + scale));
    }
}
