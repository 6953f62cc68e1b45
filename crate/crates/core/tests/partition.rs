mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use pfaffkp::partition::*;
use pfaffkp::Error;
use proptest::prelude::*;

fn sqrt_pi() -> f64 {
    PI.sqrt()
}

#[test]
fn fermionic_constants_from_gamma_products() {
    // Γ(1/2), Γ(3/2), …, Γ(9/2)
    let gh = [sqrt_pi(), sqrt_pi() / 2.0, 0.75 * sqrt_pi(), 1.875 * sqrt_pi(), 6.5625 * sqrt_pi()];
    // m = 1: 2π Γ(3/2) Γ(4) / (2^4 · 1! · Γ(1/2)Γ(3/2)Γ(5/2) · Γ(2)^3)
    let c1 = 2.0 * PI * gh[1] * 6.0 / (16.0 * gh[0] * gh[1] * gh[2]);
    // m = 2: (2π)^2 Γ(5/2) Γ(6)Γ(8) / (2^16 · 2! · Π_{j<5} Γ(j+1/2) · Γ(2)^3 Γ(4)^3)
    let c2 = (2.0 * PI).powi(2) * gh[2] * 120.0 * 5040.0 / (65536.0 * 2.0 * gh.iter().product::<f64>() * 216.0);
    assert!((constant_fermionic(1).unwrap() - c1).abs() < 1e-14);
    assert!((constant_fermionic(2).unwrap() - c2).abs() < 1e-15);
    assert!((c2 - 1.0 / 72.0).abs() < 1e-16);
    assert!((constant_fermionic(3).unwrap() - 1.0 / 3_110_400.0).abs() < 1e-19);
    assert!(constant_fermionic(0).is_err() && constant_fermionic(4).is_err());
}

#[test]
fn bosonic_constants_from_gamma_products() {
    // π^m / (2^{2m²} (2m)! Π_{j≤2m} Γ²(j/2))
    let c1 = PI / (4.0 * 2.0 * PI);
    let c2 = PI * PI / (256.0 * 24.0 * (PI * PI / 4.0));
    assert!((constant_bosonic(1).unwrap() - c1).abs() < 1e-15);
    assert!((constant_bosonic(2).unwrap() - c2).abs() < 1e-16);
    assert!((c2 - 1.0 / 1536.0).abs() < 1e-17);
    assert!(constant_bosonic(3).is_err());
}

#[test]
fn replica_range() {
    assert!(ReplicaIndex::new(3).is_ok() && ReplicaIndex::new(-3).is_ok());
    assert!(ReplicaIndex::new(4).is_err());
    let parsed: Result<ReplicaIndex, _> = serde_json::from_str("5");
    assert!(parsed.is_err());
    // bosonic m = 3 is out of reach
    assert!(z_super(ReplicaIndex::new(-3).unwrap(), 1.0, &PartitionSettings::default()).is_err());
}

#[test]
fn zero_replica_is_one() {
    let ps = PartitionSettings::default();
    for w in [0.1, 1.0, 5.0] {
        let z = z_super(ReplicaIndex::new(0).unwrap(), w, &ps).unwrap();
        assert_eq!(z.to_complex(), Complex64::new(1.0, 0.0));
    }
}

#[test]
fn one_flavor_matches_closed_forms() {
    let ps = PartitionSettings::default();
    for k in 0..25 {
        let w = 0.1 + 0.33 * k as f64;
        let (cp, cm) = z1_closed_forms(w).unwrap();
        assert!((z_plus(1, w, &ps).unwrap().to_complex() - cp).norm() < 1e-10, "w={w}");
        assert!((z_minus(1, w, &ps).unwrap().to_complex() - cm).norm() < 1e-6, "w={w}");
    }
}

#[test]
fn projection_constants_hold() {
    let ps = PartitionSettings::default();
    for (m, w) in [(1, 0.7), (2, 1.3), (-1, 0.9), (-2, 1.1)] {
        let ratio = projection_ratio(m, w, &ps).unwrap();
        let c = projection_constant(m).unwrap();
        assert!((ratio / c - 1.0).norm() < 1e-8, "m={m}: {ratio} vs {c}");
    }
}

#[test]
fn bosonic_tau_admissibility() {
    let ps = PartitionSettings::default();
    let base = DeformationPoint::new(Complex64::new(1.3, 0.0));
    assert!(matches!(
        tau(-1, &DeformationPoint::new(Complex64::new(-0.2, 0.0)), &ps),
        Err(Error::Inadmissible(_))
    ));
    // −t₄λ⁴ grows along the real ray when t₄ < 0
    assert!(tau(-1, &base.shifted(4, Complex64::new(-0.1, 0.0)), &ps).is_err());
    assert!(tau(-1, &base.shifted(4, Complex64::new(0.1, 0.0)), &ps).is_ok());
}

#[test]
fn fermionic_tau_first_time_is_s() {
    // ∂_{t₁} and ∂_s act identically on the fermionic weight
    let ps = PartitionSettings::default();
    let s = Complex64::new(0.0, -0.6);
    let d = Complex64::new(1e-4, 0.0);
    let at = |p: &DeformationPoint| tau(1, p, &ps).unwrap().to_complex();
    let base = DeformationPoint::new(s);
    let by_t = at(&base.shifted(1, d));
    let by_s = at(&DeformationPoint::new(s + d));
    assert!((by_t - by_s).norm() < 1e-14 * by_s.norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fermionic_values_are_real(w in 0.05f64..8.0, m in 1usize..=3) {
        let z = z_plus(m, w, &PartitionSettings::default()).unwrap();
        prop_assert_eq!(z.to_complex().im, 0.0);
        prop_assert!(z.error_estimate >= 0.0);
    }

    #[test]
    fn bosonic_one_flavor_tracks_closed_form(w in 0.1f64..8.0) {
        let (_, cm) = z1_closed_forms(w).unwrap();
        let z = z_minus(1, w, &PartitionSettings::default()).unwrap().to_complex();
        prop_assert!((z - cm).norm() < 1e-6);
    }
}

#[test]
fn fast_paths_match_tensor_oracles() {
    let settings = PartitionSettings::default();
    for w in [0.5, 1.0, 2.0, 4.0] {
        let fast = z_plus(2, w, &settings).unwrap().to_complex();
        let oracle = common::z2_plus_tensor(w);
        assert!((fast - oracle).norm() <= 1e-8 * oracle.norm(), "w = {w}: {fast} vs {oracle}");

        let fast = z_minus(1, w, &settings).unwrap().to_complex();
        let oracle = common::z1_minus_tensor(w);
        assert!((fast - oracle).norm() <= 1e-6 * oracle.norm(), "w = {w}: {fast} vs {oracle}");
    }
}
