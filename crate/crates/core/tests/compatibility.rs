use proptest::prelude::*;

use sepint_core::compat::{lcc_cartesian, lcc_polar};
use sepint_core::integrals::LeadingTermSpec;
use sepint_core::jetfield::FieldExpr;

fn spec(order: u32, values: &[f64]) -> LeadingTermSpec {
    let mut s = LeadingTermSpec::new(order).unwrap();
    for (&(m, n), v) in LeadingTermSpec::slots(order).iter().zip(values) {
        s.set(m, n, *v).unwrap();
    }
    s
}

fn v1() -> FieldExpr {
    let (x, y) = (FieldExpr::x(), FieldExpr::y());
    (&x * &y).sin() + (x.powi(2) * &y).scale(0.3)
}

fn v2() -> FieldExpr {
    let (x, y) = (FieldExpr::x(), FieldExpr::y());
    (x.powi(2) + y.powi(2) + 1.0).sqrt() + y.cos().scale(-0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lcc_is_linear_in_the_potential(
        order in 1u32..=5,
        values in prop::collection::vec(-1.0f64..1.0, 21),
        lambda in -3.0f64..3.0,
        x in 0.3f64..1.5,
        y in -1.5f64..1.5,
    ) {
        let s = spec(order, &values);
        let a = lcc_cartesian(&s, &v1(), [x, y]).unwrap();
        let b = lcc_cartesian(&s, &v2(), [x, y]).unwrap();
        let combo = v1() + v2().scale(lambda);
        let c = lcc_cartesian(&s, &combo, [x, y]).unwrap();
        let scale = a.scale.max(b.scale * lambda.abs()).max(c.scale).max(1e-300);
        prop_assert!((c.value - (a.value + lambda * b.value)).abs() <= 1e-10 * scale);
    }

    #[test]
    fn polar_and_cartesian_forms_agree_on_ttw(
        order in 1u32..=5,
        values in prop::collection::vec(-1.0f64..1.0, 21),
        r in 0.4f64..2.0,
        theta in 0.2f64..1.3,
    ) {
        // b r² + α/cos²θ / r² + β/sin²θ / r² written two ways
        let (b, alpha, beta) = (0.7, 0.2, -0.15);
        let s = spec(order, &values);
        let (x, y) = (FieldExpr::x(), FieldExpr::y());
        let cart = (x.powi(2) + y.powi(2)).scale(b) + x.powi(-2).scale(alpha) + y.powi(-2).scale(beta);
        let t = FieldExpr::var(0);
        let radial = t.powi(2).scale(b);
        let angular = t.cos().powi(-2).scale(alpha) + t.sin().powi(-2).scale(beta);
        let p = lcc_polar(&s, &radial, &angular, (r, theta)).unwrap();
        let c = lcc_cartesian(&s, &cart, [r * theta.cos(), r * theta.sin()]).unwrap();
        prop_assert!((p.value - c.value).abs() <= 1e-9 * p.scale.max(c.scale).max(1e-300),
            "{} vs {}", p.value, c.value);
    }
}
