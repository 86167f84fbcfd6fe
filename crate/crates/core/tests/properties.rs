mod common;

use mitest_core::measures::marginal_entropy;
use mitest_core::sim::{self, Marginal, SimConfig};
use mitest_core::{
    cdf, discretize, g2, mi_gradient, mi_hessian, multinomial_cov, mutual_information, pearson_chi2, quantile,
    t1_statistic, t2_statistic, BinRule, BinningSpec, ChiBarWeights, JointTable, NullMethod, ProbTable, Statistic,
    Strategy as BinStrategy,
};
use proptest::prelude::*;

fn table_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..=6, 2usize..=6).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(0.01f64..1.0, c), r).prop_map(|raw| {
            let s: f64 = raw.iter().flatten().sum();
            raw.into_iter().map(|row| row.into_iter().map(|v| v / s).collect()).collect()
        })
    })
}

fn counts_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (2usize..=6, 2usize..=6)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(1i64..60, c), r))
}

fn marginal_strategy(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, k).prop_map(|raw| {
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / s).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vec2_round_trips(rows in table_strategy()) {
        let p = ProbTable::from_rows(&rows).unwrap();
        let back = ProbTable::from_restricted(&p.vec2()).unwrap();
        for (a, b) in p.matrix().iter().zip(back.matrix().iter()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
        let v = p.vec2();
        prop_assert_eq!(v.values(), &common::vec2(&rows)[..]);
    }

    #[test]
    fn product_keeps_marginals_and_has_zero_mi(rows in table_strategy()) {
        let p = ProbTable::from_rows(&rows).unwrap();
        let q = p.product_of_marginals();
        for (a, b) in p.row_marginals().iter().zip(q.row_marginals()) {
            prop_assert!((a - b).abs() <= 1e-14);
        }
        for (a, b) in p.col_marginals().iter().zip(q.col_marginals()) {
            prop_assert!((a - b).abs() <= 1e-14);
        }
        prop_assert!(mutual_information(&q) <= 1e-15);
        prop_assert!(mi_gradient(&q).unwrap().g.max_abs() <= 1e-12);
    }

    #[test]
    fn mi_is_bounded_by_marginal_entropies(rows in table_strategy()) {
        let p = ProbTable::from_rows(&rows).unwrap();
        let mi = mutual_information(&p);
        let bound = marginal_entropy(p.row_marginals()).min(marginal_entropy(p.col_marginals()));
        prop_assert!(mi >= 0.0);
        prop_assert!(mi <= bound + 1e-12);
        prop_assert!((mi - common::mi(&rows)).abs() <= 1e-14);
    }

    #[test]
    fn statistics_match_classical_forms(rows in counts_strategy()) {
        let t = JointTable::from_counts(&rows).unwrap();
        let counts: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&v| v as u64).collect()).collect();
        let (t1, g) = (t1_statistic::<f64>(&t), common::g2(&counts));
        prop_assert!((t1 - g).abs() <= 1e-12 * g.max(1e-300));
        prop_assert!((g2::<f64>(&t) - g).abs() <= 1e-12 * g.max(1e-300));
        let (t2, x2) = (t2_statistic::<f64>(&t).unwrap(), common::pearson(&counts));
        prop_assert!((t2 - x2).abs() <= 1e-8 * x2.max(1e-300));
        prop_assert!((pearson_chi2::<f64>(&t).unwrap() - x2).abs() <= 1e-12 * x2.max(1e-300));
    }

    #[test]
    fn hessian_matches_pullback(rows in table_strategy()) {
        let p = ProbTable::from_rows(&rows).unwrap();
        let h = mi_hessian(&p).unwrap();
        let oracle = common::hessian_pullback(&rows);
        let scale = oracle.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in h.matrix().iter().zip(oracle.iter()) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
        let g = mi_gradient(&p).unwrap();
        for (a, b) in g.g.values().iter().zip(common::gradient_direct(&rows)) {
            prop_assert!((a - b).abs() <= 1e-13);
        }
    }

    #[test]
    fn weights_at_product_tables(r in marginal_strategy(4), c in marginal_strategy(3)) {
        let p0 = ProbTable::from_marginals(&r, &c).unwrap();
        let w = mitest_core::chi_bar_weights(&mi_hessian(&p0).unwrap(), &multinomial_cov(&p0).unwrap()).unwrap();
        prop_assert_eq!(w.count_near(1.0, 1e-8), 6);
        prop_assert_eq!(w.count_near(0.0, 1e-8), 5);
        let oracle = common::weights(&common::hessian_pullback(&common::product(&r, &c)), &common::cov(&common::product(&r, &c)));
        for (a, b) in w.lambdas().iter().zip(oracle) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn cdf_is_monotone(lambdas in prop::collection::vec(0.01f64..5.0, 1..8), x in 0.0f64..40.0, dx in 0.0f64..5.0) {
        let w = ChiBarWeights::new(lambdas).unwrap();
        let a = cdf(&w, x, 1e-12).unwrap();
        let b = cdf(&w, x + dx, 1e-12).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf(lambdas in prop::collection::vec(0.05f64..4.0, 1..8)) {
        let w = ChiBarWeights::new(lambdas).unwrap();
        for level in [0.5, 0.9, 0.95, 0.99] {
            let q = quantile(&w, level, NullMethod::Series, None).unwrap();
            prop_assert!((cdf(&w, q, 1e-12).unwrap() - level).abs() <= 1e-6);
        }
    }

    #[test]
    fn binning_conserves_observations(xs in prop::collection::vec(-5000i32..5000, 20..200), seed in 0u64..1000) {
        let pairs: Vec<(f64, f64)> = xs
            .iter()
            .enumerate()
            .map(|(k, &x)| (x as f64 / 1000.0, ((k as u64 * 7919 + seed) % 1000) as f64 / 100.0))
            .collect();
        for strategy in [BinStrategy::EqualWidth, BinStrategy::EqualFrequency] {
            match discretize(&pairs, &BinningSpec::new(BinRule::Rice, strategy)) {
                Ok(d) => {
                    prop_assert_eq!(d.table.n(), pairs.len() as u64);
                    prop_assert!(d.x_edges.windows(2).all(|e| e[0] < e[1]));
                }
                // Degenerate axes (all values equal) are reported, not binned.
                Err(_) => prop_assert!(pairs.iter().all(|p| p.0 == pairs[0].0) || pairs.iter().all(|p| p.1 == pairs[0].1)),
            }
        }
    }

    #[test]
    fn equal_frequency_is_invariant_under_monotone_maps(xs in prop::collection::vec(-5000i32..5000, 20..200)) {
        let pairs: Vec<(f64, f64)> = xs
            .iter()
            .enumerate()
            .map(|(k, &x)| (x as f64 / 1000.0, ((k * 31) % 17) as f64))
            .collect();
        let mapped: Vec<(f64, f64)> = pairs.iter().map(|&(x, y)| (x * x * x + x, y.exp())).collect();
        let spec = BinningSpec::new(BinRule::Fixed(4, 3), BinStrategy::EqualFrequency);
        let a = discretize(&pairs, &spec);
        let b = discretize(&mapped, &spec);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.table.to_rows(), b.table.to_rows()),
            (Err(e1), Err(e2)) => prop_assert_eq!(e1, e2),
            (a, b) => prop_assert!(false, "outcomes differ: {:?} vs {:?}", a.is_ok(), b.is_ok()),
        }
    }
}

#[test]
fn replicates_do_not_depend_on_thread_count() {
    let cfg = SimConfig::new(Marginal::Binomial(4, 0.5), Marginal::Uniform(5), 60, 300, Statistic::T1, 12);
    let many = sim::replicate_statistics(&cfg).unwrap();
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| sim::replicate_statistics(&cfg).unwrap());
    assert_eq!(many, one);
    assert_eq!(many.len(), 300);
}

#[test]
fn monte_carlo_draws_do_not_depend_on_thread_count() {
    let w = ChiBarWeights::new(vec![2.0, 1.0, 0.5]).unwrap();
    let many = mitest_core::sample(&w, 50_000, 3);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| mitest_core::sample(&w, 50_000, 3));
    assert_eq!(many, one);
}

#[test]
fn ks_distance_shrinks_with_n() {
    let u = Marginal::Uniform(5);
    let w = ChiBarWeights::<f64>::unit(16);
    let ks = |n| {
        let cfg = SimConfig::new(u.clone(), u.clone(), n, 4000, Statistic::T2, 31);
        sim::ks_distance(&sim::replicate_statistics(&cfg).unwrap(), &w, None).unwrap()
    };
    assert!(ks(1000) < ks(100));
}

#[test]
fn conjecture_holds_up_to_six_by_six() {
    for i in 2..=6 {
        for j in 2..=6 {
            assert!(sim::verify_t2_chi2_identity((i, j), 50, (i * 10 + j) as u64).unwrap() <= 1e-8);
        }
    }
}
