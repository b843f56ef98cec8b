use lqrdecay::search::{binomial, brute_force_search, combinations, pruned_search, SearchError, SearchOptions};
use lqrdecay::string_model::StringConfig;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn combinations_are_complete(n in 1usize..12, m in 1usize..6) {
        let all = combinations(n, m);
        prop_assert_eq!(all.len() as u128, binomial(n, m));
        prop_assert!(all.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(all.iter().all(|c| c.windows(2).all(|p| p[0] < p[1]) && c.iter().all(|&j| (1..=n).contains(&j))));
    }

    /// Pruning never changes the answer and never discards a configuration
    /// that could have beaten it.
    #[test]
    fn pruned_search_is_sound(n in 3usize..9, m in 1usize..4, t in 1.0f64..20.0, mass in 5.0f64..60.0) {
        prop_assume!(m < n);
        let template = StringConfig::new(n, m, t, mass);
        let opts = SearchOptions::default();
        let pruned = pruned_search(&template, &opts).unwrap();
        let brute = brute_force_search(&template, &opts).unwrap();
        prop_assert_eq!(&pruned.best_configs, &brute.best_configs);
        prop_assert!((pruned.gamma_star - brute.gamma_star).abs() <= 1e-12);
        prop_assert!(pruned.skipped().all(|e| e.upper < pruned.gamma_star));
        for e in &brute.evaluation_log {
            let g = e.gamma.unwrap();
            prop_assert!(e.lower <= g && g <= e.upper + 1e-9, "{:?}", e);
        }
        let batched = pruned_search(&template, &SearchOptions { batch: 4, ..opts }).unwrap();
        prop_assert_eq!(&batched.best_configs, &pruned.best_configs);
        prop_assert!((batched.gamma_star - pruned.gamma_star).abs() <= 1e-12);
    }
}

#[test]
fn brute_force_respects_cap() {
    let opts = SearchOptions { batch: 1, brute_force_cap: 10 };
    let err = brute_force_search(&StringConfig::new(8, 2, 10.0, 50.0), &opts).unwrap_err();
    assert!(matches!(err, SearchError::TooMany { count: 28, cap: 10 }));
}

#[test]
fn search_is_deterministic() {
    let template = StringConfig::new(10, 2, 10.0, 50.0);
    let a = pruned_search(&template, &SearchOptions::default()).unwrap();
    let b = pruned_search(&template, &SearchOptions::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.log_csv(), b.log_csv());
    assert!(a.log_csv().starts_with("config,upper,lower,gamma,solve_order\n"));
}
