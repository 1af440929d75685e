use proptest::prelude::*;
use qubitks_core::contextuality::{
    parity_certificate, search_colorings, verify_assignment, Assignment, Outcome, Scenario,
    SearchMode,
};
use qubitks_core::geometry::Label;

/// Counts valid assignments by enumerating all 2ⁿ answer vectors as
/// bitmasks; labels outside every context must be answered no.
fn brute_force_count(s: &Scenario) -> u64 {
    let n = s.labels().len();
    let masks: Vec<u64> = s
        .contexts()
        .iter()
        .map(|c| c.iter().fold(0u64, |m, &k| m | 1 << k))
        .collect();
    let covered = masks.iter().fold(0u64, |a, m| a | m);
    (0u64..1 << n)
        .filter(|yes| yes & !covered == 0)
        .filter(|yes| masks.iter().all(|m| (yes & m).count_ones() == 1))
        .count() as u64
}

/// Spot-checks `verify_assignment` against the mask oracle on one vector.
fn verify_matches_mask(s: &Scenario, yes: u64) -> bool {
    let a: Assignment = s
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), yes >> i & 1 == 1))
        .collect();
    let expected = s
        .contexts()
        .iter()
        .all(|c| c.iter().filter(|&&k| yes >> k & 1 == 1).count() == 1);
    verify_assignment(s, &a).unwrap() == expected
}

fn scenario_from(n: usize, contexts: Vec<Vec<usize>>) -> Scenario {
    let labels: Vec<Label> = (0..n).map(|i| Label::plus(format!("L{i}"))).collect();
    let ctx = contexts
        .into_iter()
        .map(|c| c.into_iter().map(|i| labels[i].clone()).collect())
        .collect();
    Scenario::combinatorial("random", labels, ctx).unwrap()
}

fn small_scenario(max_labels: usize, max_contexts: usize) -> impl Strategy<Value = Scenario> {
    (1..=max_labels).prop_flat_map(move |n| {
        prop::collection::vec(
            prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n),
            0..=max_contexts,
        )
        .prop_map(move |ctx| scenario_from(n, ctx))
    })
}

/// Three contexts `A`, `B` and their symmetric difference: every label lies
/// in zero or two of them.
fn parity_scenario() -> impl Strategy<Value = Scenario> {
    (2usize..=8).prop_flat_map(|n| {
        prop::collection::vec(
            prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n),
            1..=2,
        )
        .prop_map(move |base| {
            // A, B, A∆B: every label lies in 0 or 2 of them.
            let a = &base[0];
            let b = base
                .get(1)
                .cloned()
                .unwrap_or_else(|| (0..n).filter(|i| !a.contains(i)).collect());
            let sym: Vec<usize> = (0..n).filter(|i| a.contains(i) != b.contains(i)).collect();
            scenario_from(n, vec![a.clone(), b, sym])
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn search_matches_brute_force(s in small_scenario(16, 5)) {
        let counted = search_colorings(&s, SearchMode::CountAll);
        let expected = brute_force_count(&s);
        prop_assert_eq!(counted.coloring_count, Some(expected));
        let first = search_colorings(&s, SearchMode::FirstWitness);
        prop_assert_eq!(first.outcome == Outcome::Colorable, expected > 0);
        prop_assert_eq!(counted.outcome, first.outcome);
        if let Some(w) = &first.witness {
            prop_assert!(verify_assignment(&s, w).unwrap());
        }
    }

    #[test]
    fn verify_assignment_matches_mask_oracle(s in small_scenario(12, 4), yes in any::<u64>()) {
        let n = s.labels().len();
        prop_assert!(verify_matches_mask(&s, yes & ((1u64 << n) - 1)));
    }

    #[test]
    fn parity_certificates_are_sound(s in parity_scenario()) {
        if parity_certificate(&s).is_some() {
            let v = search_colorings(&s, SearchMode::CountAll);
            prop_assert_eq!(v.outcome, Outcome::Uncolorable);
            prop_assert_eq!(v.coloring_count, Some(0));
        }
    }

    #[test]
    fn verdicts_are_deterministic(s in small_scenario(10, 4)) {
        prop_assert_eq!(
            search_colorings(&s, SearchMode::CountAll),
            search_colorings(&s, SearchMode::CountAll)
        );
        prop_assert_eq!(
            search_colorings(&s, SearchMode::FirstWitness),
            search_colorings(&s, SearchMode::FirstWitness)
        );
    }
}
