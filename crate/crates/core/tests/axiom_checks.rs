//! Checker behavior against independent brute-force oracles and the
//! cross-checker equivalences.

mod common;

use balk_core::axioms::{
    check_balk, check_g_metric, check_increasing, check_k_increasing, check_k_weakly_decreasing,
    check_metric, check_symmetric_g, check_ultra_balk, CheckConfig,
};
use balk_core::construct::{
    diameter_balk, example_2_5, generalized_diameter, random_metric, tau_squared,
};
use balk_core::{parse_subset_key, GMetricTable, SetFunction, Universe, Verdict};
use common::*;
use proptest::prelude::*;

fn cfg() -> CheckConfig {
    CheckConfig::default()
}

#[test]
fn diameter_tables_pass_balk_small_universes() {
    for n in 2..=6u32 {
        for seed in 0..5u64 {
            let tau = diameter_balk(&random_metric(n, seed).unwrap(), &cfg()).unwrap();
            let report = check_balk(&tau, &cfg());
            assert_eq!(report.verdict, Verdict::Pass, "n={n} seed={seed}");
        }
    }
}

#[test]
fn level_table_k2_n5_passes_balk_exhaustively() {
    // Frozen against the independent oracle: the full triple enumeration
    // over the label-set table finds no violation.
    let tau = example_2_5(5, 2, None).unwrap();
    assert_eq!(naive_balk_violation(&label_table(&tau)), None);
    let report = check_balk(&tau, &cfg());
    assert_eq!(report.verdict, Verdict::Pass);
    assert_eq!(report.triples_examined, 31 + 31u64.pow(3));
}

#[test]
fn level_table_monotonicity_contract() {
    for (n, k) in [(4u32, 2u32), (5, 2), (5, 3), (6, 4)] {
        let tau = example_2_5(n, k, None).unwrap();
        assert!(
            check_k_increasing(&tau, k, &cfg()).unwrap().passed(),
            "k-increasing at k={k}"
        );
        let above = check_k_increasing(&tau, k + 1, &cfg()).unwrap();
        assert_eq!(above.verdict, Verdict::Fail, "not (k+1)-increasing");
        let w = above.witness.as_ref().unwrap();
        let u = tau.universe();
        let b = parse_subset_key(w.slot("B").unwrap(), u).unwrap();
        let a = parse_subset_key(w.slot("A").unwrap(), u).unwrap();
        assert_eq!(b.cardinality(), k + 1);
        assert_eq!(a.cardinality(), k + 2);
        assert!(b.is_subset_of(a));
        assert!(witness_reproduces(&tau, &above));
        assert_eq!(check_increasing(&tau, &cfg()).verdict, Verdict::Fail);
    }
}

#[test]
fn level_table_fails_weak_decrease_with_valid_witness() {
    // With k = 2 defaults, a 3-set is valued t3 = 1.5 while every proper
    // subset is at most t2 = 1.25.
    let tau = example_2_5(5, 2, None).unwrap();
    let report = check_k_weakly_decreasing(&tau, 2, &cfg()).unwrap();
    assert_eq!(report.verdict, Verdict::Fail);
    let w = report.witness.as_ref().unwrap();
    let a = parse_subset_key(w.slot("A").unwrap(), tau.universe()).unwrap();
    assert_eq!(a.cardinality(), 3);
    assert_eq!(w.lhs, 1.5);
    assert_eq!(w.rhs, 1.25);
    assert!(witness_reproduces(&tau, &report));
}

#[test]
fn diameter_tables_are_increasing_and_weakly_decreasing() {
    let tau = diameter_balk(&random_metric(6, 11).unwrap(), &cfg()).unwrap();
    assert!(check_increasing(&tau, &cfg()).passed());
    for k in 2..=4 {
        assert!(check_k_increasing(&tau, k, &cfg()).unwrap().passed());
        assert!(check_k_weakly_decreasing(&tau, k, &cfg()).unwrap().passed());
    }
}

#[test]
fn max_pairwise_g_passes_against_oracle() {
    for n in 2..=5u32 {
        for seed in 0..4u64 {
            let g = max_pairwise_g(&random_metric(n, seed).unwrap());
            assert_eq!(naive_g_violation(&g), None, "oracle at n={n} seed={seed}");
            assert!(check_g_metric(&g, &cfg()).passed());
            assert!(check_symmetric_g(&g, &cfg()).passed());
        }
    }
}

#[test]
fn valid_g_metric_with_broken_symmetry_is_caught() {
    // Two points, G(a,a,b) = 2, G(a,b,b) = 1: conditions (i)-(v) hold but
    // the pair values disagree.
    let u = Universe::lettered(2).unwrap();
    let g = GMetricTable::from_fn(u, |m| match m {
        (0, 0, 1) => 2.0,
        (0, 1, 1) => 1.0,
        _ => 0.0,
    })
    .unwrap();
    assert_eq!(naive_g_violation(&g), None);
    assert!(check_g_metric(&g, &cfg()).passed());
    let report = check_symmetric_g(&g, &cfg());
    assert_eq!(report.verdict, Verdict::Fail);
    let w = report.witness.unwrap();
    assert_eq!(w.relation, "G(x,y,y) = G(y,x,x)");
    assert_eq!((w.lhs, w.rhs), (1.0, 2.0));
}

#[test]
fn single_point_g_table_is_vacuously_symmetric() {
    let g = GMetricTable::from_fn(Universe::lettered(1).unwrap(), |_| 0.0).unwrap();
    assert!(check_symmetric_g(&g, &cfg()).passed());
}

#[test]
fn rejection_sampled_tables_really_are_symmetric_g() {
    for seed in 0..5u64 {
        let g = rejection_sampled_g(4, seed);
        assert_eq!(naive_g_violation(&g), None);
        assert!(check_symmetric_g(&g, &cfg()).passed());
    }
}

#[test]
fn ultra_check_matches_ultrametricity_of_the_generator() {
    // Hierarchical ultrametric: d(a,b) = 1, d(a,c) = d(b,c) = 2.
    let um = balk_core::FiniteMetric::new(
        Universe::lettered(3).unwrap(),
        vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 2.0],
            vec![2.0, 2.0, 0.0],
        ],
    )
    .unwrap();
    let tau = diameter_balk(&um, &cfg()).unwrap();
    assert!(check_ultra_balk(&tau, &cfg()).passed());

    let line = diameter_balk(&line_metric_013(), &cfg()).unwrap();
    let report = check_ultra_balk(&line, &cfg());
    assert_eq!(report.verdict, Verdict::Fail);
    assert!(witness_reproduces(&line, &report));
    // The shrunken witness is the singleton decomposition of the line.
    let w = report.witness.unwrap();
    assert_eq!((w.lhs, w.rhs), (3.0, 2.0));
}

#[test]
fn balk_pass_implies_nonnegativity_and_metric_projection() {
    for sample in generator_suite(false) {
        let report = check_balk(&sample.tau, &cfg());
        assert!(report.passed(), "{} fails balk", sample.name);
        let min = sample
            .tau
            .values()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-9, "{}: negative value {min}", sample.name);
        assert!(
            check_metric(&tau_squared(&sample.tau), &cfg()).passed(),
            "{}: binary projection is not a metric",
            sample.name
        );
    }
}

#[test]
fn monotonicity_checkers_match_their_diameter_forms() {
    // k-increasing <=> tau(A) >= diam_{tau^k}(A); k-weakly decreasing <=>
    // tau(A) <= diam_{tau^k}(A). Exhaustive over the small suite.
    for sample in generator_suite(false) {
        let tau = &sample.tau;
        let u = tau.universe();
        if u.len() > 6 {
            continue;
        }
        for k in 2..=4u32 {
            let inc = check_k_increasing(tau, k, &cfg()).unwrap().passed();
            let dec = check_k_weakly_decreasing(tau, k, &cfg()).unwrap().passed();
            let mut ge_diam = true;
            let mut le_diam = true;
            for s in u.subsets() {
                let v = tau.eval(s).unwrap();
                let diam = generalized_diameter(tau, k, s).unwrap();
                let margin = oracle_margin(v, diam);
                if v < diam - margin {
                    ge_diam = false;
                }
                if v > diam + margin {
                    le_diam = false;
                }
            }
            assert_eq!(inc, ge_diam, "{} k={k} increasing form", sample.name);
            assert_eq!(dec, le_diam, "{} k={k} decreasing form", sample.name);
        }
    }
}

#[test]
fn small_universe_collapses_k_increasing_to_increasing() {
    // For n <= k + 1 the two notions agree.
    for sample in generator_suite(false) {
        let n = sample.tau.universe().len() as u32;
        let k = (n.saturating_sub(1)).max(2); // smallest admissible k with n <= k + 1
        let kinc = check_k_increasing(&sample.tau, k, &cfg()).unwrap();
        let inc = check_increasing(&sample.tau, &cfg());
        assert_eq!(kinc.passed(), inc.passed(), "{} n={n} k={k}", sample.name);
    }
}

#[test]
fn weak_decrease_aligns_increasing_notions() {
    // When k-weak decrease holds, k-increasing and increasing agree.
    for sample in generator_suite(false) {
        for k in 2..=3u32 {
            if check_k_weakly_decreasing(&sample.tau, k, &cfg()).unwrap().passed() {
                assert_eq!(
                    check_k_increasing(&sample.tau, k, &cfg()).unwrap().passed(),
                    check_increasing(&sample.tau, &cfg()).passed(),
                    "{} k={k}",
                    sample.name
                );
            }
        }
    }
}

#[test]
fn sampled_mode_is_deterministic_and_labeled() {
    // Above the cap the checker samples; same seed, same outcome.
    let tau = diameter_balk(&random_metric(11, 5).unwrap(), &cfg()).unwrap();
    let mut config = cfg();
    config.budget = Some(20_000);
    let a = check_balk(&tau, &config);
    let b = check_balk(&tau, &config);
    assert_eq!(a.verdict, Verdict::SampledPass);
    assert_eq!(a, b);
    assert_eq!(a.triples_examined, (1u64 << 11) - 1 + 20_000);
}

#[test]
fn witnesses_reproduce_across_failing_generators() {
    let mut failing: Vec<(String, SetFunction)> = Vec::new();
    for (n, k) in [(4u32, 2u32), (5, 3), (6, 2)] {
        failing.push((format!("ex25({n},{k})"), example_2_5(n, k, None).unwrap()));
    }
    for (name, tau) in &failing {
        for report in [
            check_increasing(tau, &cfg()),
            check_k_increasing(tau, 5, &cfg()).unwrap(),
            check_k_weakly_decreasing(tau, 2, &cfg()).unwrap(),
            check_ultra_balk(tau, &cfg()),
        ] {
            if report.verdict == Verdict::Fail {
                assert!(witness_reproduces(tau, &report), "{name}: {report:?}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The checker agrees with the naive label-set oracle on random tables.
    #[test]
    fn balk_checker_matches_oracle(
        n in 2usize..=4,
        raw in prop::collection::vec(0.01f64..2.0, 15),
        zero_pair in prop::bool::ANY,
    ) {
        let u = Universe::lettered(n).unwrap();
        let count = u.subset_count() as usize;
        let mut values: Vec<f64> = (0..count).map(|i| raw[i % raw.len()]).collect();
        for s in u.subsets() {
            if s.cardinality() == 1 {
                values[(s.bits() - 1) as usize] = 0.0;
            }
        }
        if zero_pair {
            values[(0b11 - 1) as usize] = 0.0;
        }
        let tau = SetFunction::new(u, values).unwrap();
        let report = check_balk(&tau, &cfg());
        let oracle = naive_balk_violation(&label_table(&tau));
        prop_assert_eq!(report.passed(), oracle.is_none());
        if report.verdict == Verdict::Fail {
            prop_assert!(witness_reproduces(&tau, &report));
        }
    }

    /// Shrinking never invalidates a triangle witness.
    #[test]
    fn failing_triangle_witnesses_reproduce(seed in 0u64..200) {
        if let Some(tau) = perturbed_repaired(4, seed) {
            // Break it deliberately: raise the full set far above any bound.
            let mut values = tau.values().to_vec();
            let last = values.len() - 1;
            values[last] += 100.0;
            let broken = SetFunction::new(tau.universe().clone(), values).unwrap();
            let report = check_balk(&broken, &cfg());
            prop_assert_eq!(report.verdict, Verdict::Fail);
            prop_assert!(witness_reproduces(&broken, &report));
        }
    }
}

#[test]
fn zero_off_diagonal_metric_fails_positivity() {
    let u = Universe::lettered(3).unwrap();
    let d = balk_core::FiniteMetric::new(
        u,
        vec![
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ],
    )
    .unwrap();
    let report = check_metric(&d, &cfg());
    assert_eq!(report.verdict, Verdict::Fail);
    let w = report.witness.unwrap();
    assert_eq!(w.relation, "d(x,y) > 0 for x != y");
    assert!(!w.boundary);

    // A distance inside the tolerance band carries the boundary flag.
    let u = Universe::lettered(2).unwrap();
    let d = balk_core::FiniteMetric::new(u, vec![vec![0.0, 5e-10], vec![5e-10, 0.0]]).unwrap();
    let report = check_metric(&d, &cfg());
    assert_eq!(report.verdict, Verdict::Fail);
    assert!(report.witness.unwrap().boundary);
}
