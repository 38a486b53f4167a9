//! Property tests for the structural invariants.

use proptest::prelude::*;

use granger::causality::granger_causality_test;
use granger::dist::{f_sf, FParams};
use granger::ols::{build_lag_design, fit_ols};
use granger::search::{adjust_pvalues, Adjustment};
use granger::series::{load_csv_reader, SeriesTable};

fn series(len: usize) -> impl Strategy<Value = Vec<f64>> {
    // Finite, moderately scaled values; the AR recursion keeps them varied.
    proptest::collection::vec(-100.0f64..100.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nested_rss_never_increases(y in series(50), x in series(50), p in 1usize..=3) {
        let restricted = fit_ols(&build_lag_design(&y, None, p).unwrap());
        let unrestricted = fit_ols(&build_lag_design(&y, Some(&x), p).unwrap());
        let (Ok(restricted), Ok(unrestricted)) = (restricted, unrestricted) else {
            // Rank-deficient draws are legitimately rejected.
            return Ok(());
        };
        prop_assert!(unrestricted.rss <= restricted.rss * (1.0 + 1e-12));
    }

    #[test]
    fn swap_symmetry(y in series(40), x in series(40)) {
        let (Ok(fwd), Ok(rev)) = (
            granger_causality_test(&x, &y, 1, 0.05),
            granger_causality_test(&y, &x, 1, 0.05),
        ) else {
            return Ok(());
        };
        prop_assert_eq!(fwd.p_value_xy, rev.p_value_yx);
        prop_assert_eq!(fwd.p_value_yx, rev.p_value_xy);
        prop_assert_eq!(fwd.test_statistic_xy, rev.test_statistic_yx);
    }

    #[test]
    fn affine_invariance(y in series(50), x in series(50), a in prop_oneof![-8.0f64..-0.1, 0.1f64..8.0], b in -50.0f64..50.0) {
        let xt: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let (Ok(base), Ok(moved)) = (
            granger_causality_test(&x, &y, 2, 0.05),
            granger_causality_test(&xt, &y, 2, 0.05),
        ) else {
            return Ok(());
        };
        prop_assert!((base.test_statistic_xy / moved.test_statistic_xy - 1.0).abs() < 1e-8);
        prop_assert_eq!(base.x_causes_y, moved.x_causes_y);
    }

    #[test]
    fn adjustments_dominate_raw(pvals in proptest::collection::vec(0.0f64..=1.0, 1..30)) {
        for method in [Adjustment::Bonferroni, Adjustment::Bh] {
            let adj = adjust_pvalues(&pvals, method).unwrap();
            for (a, p) in adj.iter().zip(&pvals) {
                prop_assert!(a >= p);
                prop_assert!(*a <= 1.0);
            }
        }
        // BH keeps the raw ordering as a weak order.
        let adj = adjust_pvalues(&pvals, Adjustment::Bh).unwrap();
        let mut idx: Vec<usize> = (0..pvals.len()).collect();
        idx.sort_by(|&i, &j| pvals[i].partial_cmp(&pvals[j]).unwrap());
        for w in idx.windows(2) {
            prop_assert!(adj[w[0]] <= adj[w[1]] + 1e-15);
        }
    }

    #[test]
    fn f_sf_is_a_probability(stat in 0.0f64..1e6, d1 in 1u32..20, d2 in 1u32..300) {
        let p = f_sf(stat, FParams::new(d1, d2)).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn csv_round_trip_identity(cols in proptest::collection::vec(series(12), 1..5)) {
        let names: Vec<String> = (0..cols.len()).map(|i| format!("c{i}")).collect();
        let table = SeriesTable::new(names, cols).unwrap();
        let csv = table.to_csv_string().unwrap();
        let (back, report) = load_csv_reader(csv.as_bytes()).unwrap();
        prop_assert_eq!(back, table);
        prop_assert!(report.dropped.is_empty());
    }
}
