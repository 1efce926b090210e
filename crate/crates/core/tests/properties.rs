use proptest::prelude::*;

use sepint_core::dynamics::rational_approximant;
use sepint_core::integrals::{a_to_b, b_to_a, LeadingTermSpec, PolarLeadingSpec};
use sepint_core::observables::PhasePoint;

fn cartesian_spec(order: u32, values: &[f64]) -> LeadingTermSpec {
    let mut spec = LeadingTermSpec::new(order).unwrap();
    for (&(m, n), v) in LeadingTermSpec::slots(order).iter().zip(values) {
        spec.set(m, n, *v).unwrap();
    }
    spec
}

fn rotate(p: &PhasePoint, phi: f64) -> PhasePoint {
    let (s, c) = phi.sin_cos();
    PhasePoint::new(c * p.x - s * p.y, s * p.x + c * p.y, c * p.px - s * p.py, s * p.px + c * p.py)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_are_recovered(p in -40i64..40, q in 1u64..30) {
        let r = rational_approximant(p as f64 / q as f64, 32, 1e-9);
        prop_assert_eq!(r.p * q as i64, p * r.q as i64);
        prop_assert!(r.error < 1e-12);
    }

    #[test]
    fn polar_cartesian_roundtrip(order in 1u32..=6, values in prop::collection::vec(-1.0f64..1.0, 28)) {
        let a = cartesian_spec(order, &values);
        let back = b_to_a(&a_to_b(&a));
        for (m, n) in LeadingTermSpec::slots(order) {
            prop_assert!((a.get(m, n) - back.get(m, n)).abs() < 1e-10);
        }
    }

    #[test]
    fn both_forms_evaluate_alike(
        order in 1u32..=5,
        values in prop::collection::vec(-1.0f64..1.0, 21),
        pt in (0.3f64..2.0, -3.0f64..3.0, -1.0f64..1.0, -1.0f64..1.0),
    ) {
        let a = cartesian_spec(order, &values);
        let b = a_to_b(&a);
        let p = PhasePoint::from_polar(sepint_core::observables::PolarPoint { r: pt.0, theta: pt.1, pr: pt.2, lz: pt.3 });
        let (ya, yb) = (a.evaluate(&p), b.evaluate(&p));
        prop_assert!((ya - yb).abs() < 1e-10 * (1.0 + ya.abs()));
    }

    #[test]
    fn rotation_is_a_group_action(
        order in 2u32..=5,
        values in prop::collection::vec(-1.0f64..1.0, 21),
        phi in -3.0f64..3.0,
        psi in -3.0f64..3.0,
    ) {
        let b: PolarLeadingSpec = a_to_b(&cartesian_spec(order, &values));
        let composed = b.rotated(phi).rotated(psi);
        let direct = b.rotated(phi + psi);
        let undone = b.rotated(phi).rotated(-phi);
        for slot in PolarLeadingSpec::all_slots(order) {
            prop_assert!((composed.get(slot) - direct.get(slot)).abs() < 1e-10);
            prop_assert!((undone.get(slot) - b.get(slot)).abs() < 1e-10);
        }
        // Y(R_φ z) is what the rotated spec evaluates at z
        let z = PhasePoint::new(0.7, -0.4, 0.3, 0.9);
        let lhs = b.rotated(phi).evaluate(&z);
        let rhs = b.evaluate(&rotate(&z, phi));
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }
}
