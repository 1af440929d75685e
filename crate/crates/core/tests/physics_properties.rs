use proptest::prelude::*;
use qubitks_core::dilation::{
    neumark_isometry, outcome_distribution, QubitState, AGREEMENT_TOLERANCE, IDENTITY_TOLERANCE,
};
use qubitks_core::effects::{
    born_probability, check_completeness, check_psd, effect_from_direction, CompletenessStatus,
    Effect, Povm,
};
use qubitks_core::exactnum::{QuadNum, Rational};
use qubitks_core::geometry::{Label, Vec3Q};

fn direction() -> impl Strategy<Value = Vec3Q> {
    (-6i64..=6, -6i64..=6, -6i64..=6, -3i64..=3)
        .prop_filter("nonzero", |(x, y, z, _)| (*x, *y, *z) != (0, 0, 0))
        .prop_map(|(x, y, z, r)| {
            // mix in a √5 component on x so the golden field is exercised
            let sx = QuadNum::new(Rational::from(x), Rational::from(r), 5).unwrap();
            Vec3Q::new(sx, y.into(), z.into()).unwrap()
        })
        .prop_filter("nonzero", |v| !v.is_zero())
}

/// Antipodal pairs with positive pair weights summing to 1, so the POVM sums
/// to the identity exactly.
fn complete_povm() -> impl Strategy<Value = Povm> {
    prop::collection::vec((direction(), 1i64..=9), 1..=5).prop_map(|pairs| {
        let total: i64 = pairs.iter().map(|(_, w)| w).sum();
        let mut effects = Vec::new();
        for (i, (dir, w)) in pairs.into_iter().enumerate() {
            let weight = Rational::frac(w, total);
            let name = format!("P{i}");
            effects.push(
                effect_from_direction(Label::plus(&*name), dir.clone(), weight.clone()).unwrap(),
            );
            effects.push(effect_from_direction(Label::minus(&*name), -&dir, weight).unwrap());
        }
        Povm::new(effects).unwrap()
    })
}

fn bloch_ball() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.0f64..=1.0).prop_map(|(x, y, z, r)| {
        let len = (x * x + y * y + z * z).sqrt().max(1e-9);
        [x / len * r, y / len * r, z / len * r]
    })
}

/// Eigenvalues of a Hermitian 2×2 from trace and determinant.
fn eigenvalues(e: &Effect) -> (f64, f64) {
    let m = e.matrix();
    let tr = (m[0][0] + m[1][1]).re;
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).re;
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    ((tr - disc) / 2.0, (tr + disc) / 2.0)
}

proptest! {
    #[test]
    fn antipodal_bloch_parts_cancel(dir in direction(), w in 1i64..=8) {
        let w = Rational::frac(w, 8);
        let plus = effect_from_direction(Label::plus("N"), dir.clone(), w.clone()).unwrap();
        let minus = effect_from_direction(Label::minus("N"), -&dir, w.clone()).unwrap();
        let report = check_completeness(&[plus, minus]).unwrap();
        prop_assert_eq!(
            report.trace_residual,
            QuadNum::rational(w.mul(&Rational::from(2)).sub(&Rational::from(2)))
        );
        prop_assert!(report.bloch_residuals.iter().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn psd_matches_float_eigenvalues(dir in direction(), w in -8i64..=8) {
        let e = Effect::from_parts_unchecked(Label::plus("R"), Rational::frac(w, 8), dir);
        let (lo, _) = eigenvalues(&e);
        prop_assert_eq!(check_psd(&e), lo >= -1e-12);
    }

    #[test]
    fn antipodal_construction_is_exactly_complete(p in complete_povm()) {
        prop_assert_eq!(p.completeness().status, CompletenessStatus::Exact);
    }

    #[test]
    fn born_probabilities_form_a_distribution(p in complete_povm(), r in bloch_ball()) {
        let probs: Vec<f64> = p.effects().iter().map(|e| born_probability(r, e).unwrap()).collect();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(probs.iter().all(|&q| (-1e-15..=1.0 + 1e-15).contains(&q)));
    }

    #[test]
    fn isometry_and_distribution_agree(p in complete_povm(), r in bloch_ball()) {
        let iso = neumark_isometry(&p);
        prop_assert!(iso.residual() < IDENTITY_TOLERANCE);
        let dist = outcome_distribution(&p, &QubitState::Bloch(r)).unwrap();
        prop_assert!((dist.total() - 1.0).abs() < IDENTITY_TOLERANCE);
        for (e, q) in p.effects().iter().zip(&dist.probabilities) {
            prop_assert!(*q >= 0.0);
            prop_assert!((born_probability(r, e).unwrap() - q).abs() < AGREEMENT_TOLERANCE);
        }
    }
}
