use num_complex::Complex64;
use pfaffkp::hierarchy::*;
use pfaffkp::partition::{DeformationPoint, PartitionSettings, ReplicaIndex};
use pfaffkp::Error;
use proptest::prelude::*;

fn settings() -> (HierarchySettings, PartitionSettings) {
    (HierarchySettings::default(), PartitionSettings::default())
}

fn fermionic_s(omega: f64) -> Complex64 {
    Complex64::new(0.0, -0.5 * std::f64::consts::PI * omega)
}

#[test]
fn recursion_holds_for_one_replica() {
    let (hs, ps) = settings();
    let check = RecursionCheck::prepare(ReplicaIndex::new(1).unwrap(), (0.5, 0.9), 1.0, &hs, &ps).unwrap();
    for w in [0.55, 0.7, 0.85] {
        let r = check.residual(w).unwrap();
        assert!(r.pass && r.normalized_residual <= 1e-5, "{r:?}");
    }
    assert!(check.residual(1.0).is_err());
}

#[test]
fn recursion_holds_for_minus_one_replica() {
    let r = pfkp_residual(ReplicaIndex::new(-1).unwrap(), 1.0, &HierarchySettings::default(), &PartitionSettings::default()).unwrap();
    assert!(r.pass && r.normalized_residual <= 1e-5, "{r:?}");
}

#[test]
fn gauge_fault_inflates_right_side() {
    let (hs, ps) = settings();
    let check = RecursionCheck::prepare(ReplicaIndex::new(1).unwrap(), (0.5, 0.9), 1.1, &hs, &ps).unwrap();
    let r = check.residual(0.7).unwrap();
    assert!(!r.pass);
    assert!((r.rhs_over_lhs - Complex64::new(1.21, 0.0)).norm() < 1e-6, "{}", r.rhs_over_lhs);
}

#[test]
fn first_zero_of_one_flavor() {
    // zero of S′: tan x = x at x = 4.493409457909064
    let ps = PartitionSettings::default();
    let zeros = locate_zeros(ReplicaIndex::new(1).unwrap(), (1.2, 1.7), 100, &ps).unwrap();
    assert_eq!(zeros.len(), 1);
    assert!((zeros[0] - 4.493409457909064 / std::f64::consts::PI).abs() < 1e-8, "{zeros:?}");
    let (iv, _) = zero_free_interval(ReplicaIndex::new(1).unwrap(), (0.8, 1.7), 0.05, &ps).unwrap();
    assert!(iv.1 < zeros[0] - 0.04);
    let crossing = RecursionCheck::prepare(ReplicaIndex::new(1).unwrap(), (1.3, 1.6), 1.0, &HierarchySettings::default(), &ps);
    assert!(matches!(crossing, Err(Error::ZeroCrossing { .. })), "{:?}", crossing.err());
}

#[test]
fn tau_equations_for_two_flavors() {
    let (hs, ps) = settings();
    for w in [0.5, 1.0] {
        let r1 = pfkp1_residual(1, fermionic_s(w), &hs, &ps).unwrap();
        let r2 = pfkp2_residual(1, fermionic_s(w), &hs, &ps).unwrap();
        for r in [r1, r2] {
            assert!(r.pass && r.normalized_residual <= 1e-4, "{r:?}");
            assert!(r.convergence_order.is_some_and(|p| p > 1.8), "{r:?}");
        }
    }
}

#[test]
fn lowest_constraint_holds_as_printed() {
    let (hs, ps) = settings();
    for (m, s) in [(1, fermionic_s(0.5)), (1, fermionic_s(1.0)), (-1, Complex64::new(1.3, 0.0))] {
        let r = virasoro_residual(m, -1, s, VirasoroForm::AsPrinted, &hs, &ps).unwrap();
        assert!(r.pass && r.normalized_residual <= 1e-4, "{r:?}");
        assert!(r.convergence_order.is_some_and(|p| p >= 1.8), "{r:?}");
    }
}

#[test]
fn reparametrized_constraints_hold() {
    let (hs, ps) = settings();
    for (m, s) in [(1, fermionic_s(0.5)), (-1, Complex64::new(1.3, 0.0))] {
        for q in 0..=1 {
            let r = virasoro_residual(m, q, s, VirasoroForm::Reparametrization, &hs, &ps).unwrap();
            assert!(r.pass && r.normalized_residual <= 1e-4, "m={m} q={q} {r:?}");
            assert!(r.convergence_order.is_some_and(|p| p >= 1.8), "{r:?}");
        }
    }
}

#[test]
fn printed_operator_misses_a_first_order_term() {
    // Without the (q+1)∂_{t_q} term the q = 0 residual is O(1) and does not
    // shrink with the step.
    let (hs, ps) = settings();
    let r = virasoro_residual(1, 0, fermionic_s(0.5), VirasoroForm::AsPrinted, &hs, &ps).unwrap();
    assert!(!r.pass && r.normalized_residual > 0.1);
    assert!(r.convergence_order.is_some_and(|p| p.abs() < 0.5));
}

#[test]
fn oversized_step_is_rejected() {
    let ps = PartitionSettings::default();
    let hs = HierarchySettings {
        fd_step_virasoro: 0.2,
        ..HierarchySettings::default()
    };
    let r = virasoro_residual(-1, 1, Complex64::new(1.3, 0.0), VirasoroForm::Reparametrization, &hs, &ps);
    assert!(matches!(r, Err(Error::StepTooLarge { .. })), "{r:?}");
}

#[test]
fn chebyshev_log_fit_differentiates() {
    let ps = PartitionSettings::default();
    let fit = fit_log_z(ReplicaIndex::new(1).unwrap(), (0.4, 1.0), 30, &HierarchySettings::default(), &ps).unwrap();
    // log ẑ₁⁺ is real; compare its derivative against a difference quotient
    let (zp, _) = pfaffkp::partition::z1_closed_forms(0.7).unwrap();
    let (dp, _) = pfaffkp::partition::z1_closed_form_derivatives(0.7).unwrap();
    let d = fit.fine.derivative(1, 0.7);
    assert!((d - dp / zp).norm() < 1e-9, "{d} vs {}", dp / zp);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mixed_partials_commute(w in 0.3f64..1.5, i in 1usize..4, j in 1usize..4) {
        prop_assume!(i != j);
        let ps = PartitionSettings::default();
        let mut fd = FdSampler::new(1, DeformationPoint::new(fermionic_s(w)), 0.02, &ps).unwrap();
        let a = fd.derivative(&[(i, 1), (j, 1)], 0).unwrap();
        let b = fd.derivative(&[(j, 1), (i, 1)], 0).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
    }
}
