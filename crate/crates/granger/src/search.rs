//! Exhaustive directed pairwise causality search.
//!
//! Tests all K(K-1) ordered pairs of a table's columns, optionally sweeping
//! several lag orders and keeping the smallest p-value per pair, then
//! filters, adjusts for multiplicity, and sorts. Pair-by-lag tasks run on a
//! rayon pool; assembly is keyed so the output is identical to the serial
//! path.

use serde::Serialize;

use crate::causality::granger_causality_test_table;
use crate::error::{Error, Result};
use crate::series::SeriesTable;

/// Multiple-testing correction applied across the K(K-1) retained pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Adjustment {
    #[default]
    None,
    Bonferroni,
    Bh,
}

impl std::str::FromStr for Adjustment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Adjustment::None),
            "bonferroni" => Ok(Adjustment::Bonferroni),
            "bh" => Ok(Adjustment::Bh),
            other => Err(Error::InvalidArgument(format!(
                "unknown adjustment {other:?} (expected none, bonferroni, or bh)"
            ))),
        }
    }
}

impl std::fmt::Display for Adjustment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Adjustment::None => write!(f, "none"),
            Adjustment::Bonferroni => write!(f, "bonferroni"),
            Adjustment::Bh => write!(f, "bh"),
        }
    }
}

/// One directed test outcome. With a multi-lag sweep, `lag` is the lag that
/// minimized the raw p-value for this pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchRow {
    pub cause: String,
    pub effect: String,
    #[serde(rename = "p_value")]
    pub p_value: f64,
    pub statistic: f64,
    pub lag: usize,
    pub significant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_adjusted: Option<f64>,
}

/// Full search outcome. `rows` is the reported (possibly filtered) list;
/// the complete K(K-1) set is kept internally for the causality matrix.
#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub rows: Vec<SearchRow>,
    pub variables: Vec<String>,
    pub lags_tested: Vec<usize>,
    pub alpha: f64,
    pub pairs_examined: usize,
    pub adjustment: Adjustment,
    #[serde(skip)]
    complete: Vec<SearchRow>,
}

impl SearchResult {
    /// Every directed pair, sorted like `rows`, regardless of filtering.
    pub fn complete_rows(&self) -> &[SearchRow] {
        &self.complete
    }

    pub fn n_significant(&self) -> usize {
        self.complete.iter().filter(|r| r.significant).count()
    }
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub lags: Vec<usize>,
    pub alpha: f64,
    pub include_insignificant: bool,
    pub adjustment: Adjustment,
    /// None: rayon's default pool size. Some(1): strictly serial.
    pub threads: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            lags: vec![1],
            alpha: 0.05,
            include_insignificant: false,
            adjustment: Adjustment::None,
            threads: None,
        }
    }
}

/// Run every directed pairwise test among `columns` (all columns when the
/// list is empty).
pub fn granger_search(
    table: &SeriesTable,
    columns: &[String],
    opts: &SearchOptions,
) -> Result<SearchResult> {
    let sub = table.select(columns)?;
    let names: Vec<String> = sub.names().to_vec();
    let k = names.len();
    if k < 2 {
        return Err(Error::TooFewColumns(k));
    }
    if opts.lags.is_empty() || opts.lags.windows(2).any(|w| w[0] >= w[1]) || opts.lags[0] < 1 {
        return Err(Error::BadLagSpec(format!("{:?}", opts.lags)));
    }
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(Error::InvalidAlpha(opts.alpha));
    }
    // Surface data insufficiency up front, naming the offending lag.
    let t = sub.n_obs();
    for &lag in &opts.lags {
        let m = 1 + 2 * lag;
        if t < lag || t - lag <= m {
            return Err(Error::InsufficientData {
                t,
                p: lag,
                m,
                n_eff: t.saturating_sub(lag),
            });
        }
    }

    // One task per unordered pair and lag; each yields both directions.
    let mut tasks = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            for &lag in &opts.lags {
                tasks.push((i, j, lag));
            }
        }
    }

    // (cause index, effect index, lag, p-value, statistic)
    type Directed = (usize, usize, usize, f64, f64);
    let run_task = |&(i, j, lag): &(usize, usize, usize)| -> Result<[Directed; 2]> {
        let r = granger_causality_test_table(&sub, &names[i], &names[j], lag, opts.alpha)?;
        Ok([
            (i, j, lag, r.p_value_xy, r.test_statistic_xy),
            (j, i, lag, r.p_value_yx, r.test_statistic_yx),
        ])
    };

    let outcomes: Vec<Result<[Directed; 2]>> = match opts.threads {
        Some(1) => tasks.iter().map(run_task).collect(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            pool.install(|| {
                use rayon::prelude::*;
                tasks.par_iter().map(run_task).collect()
            })
        }
        None => {
            use rayon::prelude::*;
            tasks.par_iter().map(run_task).collect()
        }
    };

    // Keyed best-per-ordered-pair; ascending lag order plus strict `<`
    // implements the smallest-lag tie break.
    let mut best: Vec<Option<(usize, f64, f64)>> = vec![None; k * k];
    let mut ordered_tasks: Vec<Directed> = Vec::with_capacity(tasks.len() * 2);
    for outcome in outcomes {
        ordered_tasks.extend(outcome?);
    }
    ordered_tasks.sort_by_key(|t| (t.0, t.1, t.2));
    for (cause, effect, lag, p, stat) in ordered_tasks {
        let slot = &mut best[cause * k + effect];
        match slot {
            Some((_, best_p, _)) if p >= *best_p => {}
            _ => *slot = Some((lag, p, stat)),
        }
    }

    let mut complete: Vec<SearchRow> = Vec::with_capacity(k * (k - 1));
    for cause in 0..k {
        for effect in 0..k {
            if cause == effect {
                continue;
            }
            let (lag, p_value, statistic) =
                best[cause * k + effect].expect("every ordered pair was tested");
            complete.push(SearchRow {
                cause: names[cause].clone(),
                effect: names[effect].clone(),
                p_value,
                statistic,
                lag,
                significant: false,
                p_adjusted: None,
            });
        }
    }

    if opts.adjustment != Adjustment::None {
        let raw: Vec<f64> = complete.iter().map(|r| r.p_value).collect();
        let adjusted = adjust_pvalues(&raw, opts.adjustment)?;
        for (row, adj) in complete.iter_mut().zip(adjusted) {
            row.p_adjusted = Some(adj);
        }
    }
    for row in &mut complete {
        let decision_p = row.p_adjusted.unwrap_or(row.p_value);
        row.significant = decision_p < opts.alpha;
    }

    complete.sort_by(|a, b| {
        let pa = a.p_adjusted.unwrap_or(a.p_value);
        let pb = b.p_adjusted.unwrap_or(b.p_value);
        pa.partial_cmp(&pb)
            .expect("p-values are never NaN")
            .then_with(|| a.cause.cmp(&b.cause))
            .then_with(|| a.effect.cmp(&b.effect))
    });

    let rows = if opts.include_insignificant {
        complete.clone()
    } else {
        complete.iter().filter(|r| r.significant).cloned().collect()
    };

    Ok(SearchResult {
        rows,
        variables: names,
        lags_tested: opts.lags.clone(),
        alpha: opts.alpha,
        pairs_examined: k * (k - 1),
        adjustment: opts.adjustment,
        complete,
    })
}

/// Bonferroni or Benjamini-Hochberg adjustment, preserving input order.
/// `Adjustment::None` returns the input unchanged.
pub fn adjust_pvalues(pvals: &[f64], method: Adjustment) -> Result<Vec<f64>> {
    for &p in pvals {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidProbability(p));
        }
    }
    let m = pvals.len();
    match method {
        Adjustment::None => Ok(pvals.to_vec()),
        Adjustment::Bonferroni => Ok(pvals.iter().map(|p| (m as f64 * p).min(1.0)).collect()),
        Adjustment::Bh => {
            // Step-up: walk ranks from largest to smallest carrying the
            // running minimum of m * p_(j) / j.
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| pvals[a].partial_cmp(&pvals[b]).unwrap().then(a.cmp(&b)));
            let mut out = vec![0.0; m];
            let mut running = 1.0f64;
            for rank in (1..=m).rev() {
                let idx = order[rank - 1];
                // m/rank first: the own-rank factor is exactly 1.0, so the
                // adjusted value never rounds below the raw one.
                let candidate = ((m as f64 / rank as f64) * pvals[idx]).min(1.0);
                running = running.min(candidate);
                out[idx] = running;
            }
            Ok(out)
        }
    }
}

/// One cell of the causality matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixCell {
    pub p_value: f64,
    pub significant: bool,
}

/// K x K grid; cell (i, j) is the test of row variable i causing column
/// variable j. The diagonal is empty.
#[derive(Debug, Clone)]
pub struct CausalityMatrix {
    pub variables: Vec<String>,
    cells: Vec<Option<MatrixCell>>,
}

impl CausalityMatrix {
    pub fn cell(&self, row: usize, col: usize) -> Option<MatrixCell> {
        self.cells[row * self.variables.len() + col]
    }

    pub fn cell_by_name(&self, cause: &str, effect: &str) -> Option<MatrixCell> {
        let row = self.variables.iter().position(|v| v == cause)?;
        let col = self.variables.iter().position(|v| v == effect)?;
        self.cell(row, col)
    }
}

/// Assemble the matrix view from a search result (uses the complete row set,
/// so filtering does not leave holes).
pub fn causality_matrix(result: &SearchResult) -> CausalityMatrix {
    let k = result.variables.len();
    let mut cells = vec![None; k * k];
    for row in result.complete_rows() {
        let i = result
            .variables
            .iter()
            .position(|v| v == &row.cause)
            .expect("row names come from the variable list");
        let j = result
            .variables
            .iter()
            .position(|v| v == &row.effect)
            .expect("row names come from the variable list");
        cells[i * k + j] = Some(MatrixCell {
            p_value: row.p_adjusted.unwrap_or(row.p_value),
            significant: row.significant,
        });
    }
    CausalityMatrix {
        variables: result.variables.clone(),
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causality::granger_causality_test_table;
    use crate::series::load_csv;

    fn canada() -> SeriesTable {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/canada.csv");
        load_csv(path).unwrap().0
    }

    fn lag2_opts(include_insignificant: bool) -> SearchOptions {
        SearchOptions {
            lags: vec![2],
            include_insignificant,
            ..SearchOptions::default()
        }
    }

    // Reference ordering on the bundled dataset at lag 2, cross-checked
    // against statsmodels: six significant pairs at alpha = 0.05.
    #[test]
    fn canada_lag2_ordering() {
        let r = granger_search(&canada(), &[], &lag2_opts(true)).unwrap();
        assert_eq!(r.pairs_examined, 12);
        assert_eq!(r.rows.len(), 12);
        let order: Vec<(&str, &str)> = r
            .rows
            .iter()
            .map(|row| (row.cause.as_str(), row.effect.as_str()))
            .collect();
        assert_eq!(
            order,
            vec![
                ("e", "U"),
                ("e", "rw"),
                ("U", "rw"),
                ("prod", "e"),
                ("U", "prod"),
                ("prod", "U"),
                ("U", "e"),
                ("rw", "prod"),
                ("rw", "e"),
                ("e", "prod"),
                ("prod", "rw"),
                ("rw", "U"),
            ]
        );
        assert_eq!(r.n_significant(), 6);
        assert!((r.rows[0].p_value / 1.02810553406e-06 - 1.0).abs() < 1e-6);
        assert!((r.rows[1].p_value / 0.000166946079663 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn filtering_keeps_only_significant() {
        let r = granger_search(&canada(), &[], &lag2_opts(false)).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert!(r.rows.iter().all(|row| row.significant));
        // Matrix still sees every cell.
        let m = causality_matrix(&r);
        assert!(m.cell_by_name("rw", "U").is_some());
    }

    #[test]
    fn rows_match_direct_tests_bit_for_bit() {
        let table = canada();
        let r = granger_search(&table, &[], &lag2_opts(true)).unwrap();
        for row in &r.rows {
            let direct =
                granger_causality_test_table(&table, &row.cause, &row.effect, row.lag, 0.05)
                    .unwrap();
            assert_eq!(row.statistic, direct.test_statistic_xy);
            assert_eq!(row.p_value, direct.p_value_xy);
        }
    }

    #[test]
    fn multi_lag_keeps_smallest_p_per_pair() {
        let table = canada();
        let opts = SearchOptions {
            lags: vec![1, 2, 3, 4],
            include_insignificant: true,
            ..SearchOptions::default()
        };
        let r = granger_search(&table, &[], &opts).unwrap();
        assert_eq!(r.rows.len(), 12);
        for row in &r.rows {
            for lag in 1..=4 {
                let direct =
                    granger_causality_test_table(&table, &row.cause, &row.effect, lag, 0.05)
                        .unwrap();
                assert!(
                    row.p_value <= direct.p_value_xy,
                    "{}->{} lag {lag} beats reported one",
                    row.cause,
                    row.effect
                );
            }
        }
        // e -> U attains its minimum across lags 1..4 at lag 4 on this data.
        let eu = r
            .rows
            .iter()
            .find(|x| x.cause == "e" && x.effect == "U")
            .unwrap();
        assert_eq!(eu.lag, 4);
    }

    #[test]
    fn column_selection_limits_the_grid() {
        let r = granger_search(&canada(), &["e".into(), "U".into()], &lag2_opts(true)).unwrap();
        assert_eq!(r.pairs_examined, 2);
        assert_eq!(r.variables, ["e", "U"]);
    }

    #[test]
    fn too_few_columns_rejected() {
        assert!(matches!(
            granger_search(&canada(), &["e".into()], &lag2_opts(true)),
            Err(Error::TooFewColumns(1))
        ));
    }

    #[test]
    fn insufficient_data_names_offending_lag() {
        let table = SeriesTable::new(
            vec!["a".into(), "b".into()],
            vec![
                (0..10).map(|i| (i as f64).sin()).collect(),
                (0..10).map(|i| (i as f64).cos()).collect(),
            ],
        )
        .unwrap();
        let opts = SearchOptions {
            lags: vec![1, 3],
            ..SearchOptions::default()
        };
        match granger_search(&table, &[], &opts) {
            Err(Error::InsufficientData { p: 3, .. }) => {}
            other => panic!("expected InsufficientData at lag 3, got {other:?}"),
        }
    }

    #[test]
    fn single_threaded_equals_parallel() {
        let table = canada();
        let serial = granger_search(
            &table,
            &[],
            &SearchOptions {
                lags: vec![1, 2, 3],
                include_insignificant: true,
                threads: Some(1),
                ..SearchOptions::default()
            },
        )
        .unwrap();
        let parallel = granger_search(
            &table,
            &[],
            &SearchOptions {
                lags: vec![1, 2, 3],
                include_insignificant: true,
                threads: Some(4),
                ..SearchOptions::default()
            },
        )
        .unwrap();
        assert_eq!(serial.rows, parallel.rows);
    }

    #[test]
    fn bonferroni_examples() {
        assert_eq!(
            adjust_pvalues(&[0.01], Adjustment::Bonferroni).unwrap(),
            vec![0.01]
        );
        assert_eq!(
            adjust_pvalues(&[0.01, 0.02, 0.03], Adjustment::Bonferroni).unwrap(),
            vec![0.03, 0.06, 0.09]
        );
        assert_eq!(
            adjust_pvalues(&[0.9, 0.5], Adjustment::Bonferroni).unwrap(),
            vec![1.0, 1.0]
        );
    }

    #[test]
    fn bh_matches_hand_computed_oracle() {
        // Step-up by hand for m = 4:
        //   rank 4: 4*0.04/4 = 0.04
        //   rank 3: min(0.04, 4*0.02/3) = 0.0266667
        //   rank 2: min(0.0266667, 4*0.011/2) = 0.022
        //   rank 1: min(0.022, 4*0.005/1) = 0.02
        let adj = adjust_pvalues(&[0.005, 0.011, 0.02, 0.04], Adjustment::Bh).unwrap();
        let want = [0.02, 0.022, 4.0 * 0.02 / 3.0, 0.04];
        for (a, w) in adj.iter().zip(want) {
            assert!((a - w).abs() < 1e-12, "{a} vs {w}");
        }
    }

    #[test]
    fn adjustments_never_shrink_pvalues() {
        let pvals = [0.001, 0.2, 0.04, 0.04, 0.77, 1.0, 0.0];
        for method in [Adjustment::Bonferroni, Adjustment::Bh] {
            let adj = adjust_pvalues(&pvals, method).unwrap();
            for (a, p) in adj.iter().zip(pvals) {
                assert!(*a >= p);
                assert!(*a <= 1.0);
            }
        }
        // BH preserves the raw ranking as a weak order.
        let adj = adjust_pvalues(&pvals, Adjustment::Bh).unwrap();
        let mut idx: Vec<usize> = (0..pvals.len()).collect();
        idx.sort_by(|&a, &b| pvals[a].partial_cmp(&pvals[b]).unwrap());
        for w in idx.windows(2) {
            assert!(adj[w[0]] <= adj[w[1]]);
        }
    }

    #[test]
    fn invalid_probability_rejected() {
        assert!(matches!(
            adjust_pvalues(&[0.5, 1.2], Adjustment::Bh),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            adjust_pvalues(&[-0.1], Adjustment::Bonferroni),
            Err(Error::InvalidProbability(_))
        ));
    }

    #[test]
    fn adjustment_changes_significance_filter() {
        let table = canada();
        let opts = SearchOptions {
            lags: vec![2],
            adjustment: Adjustment::Bonferroni,
            include_insignificant: true,
            ..SearchOptions::default()
        };
        let r = granger_search(&table, &[], &opts).unwrap();
        for row in &r.rows {
            let adj = row.p_adjusted.expect("adjustment requested");
            assert!(adj >= row.p_value);
            assert_eq!(row.significant, adj < 0.05);
        }
        assert!(
            r.n_significant() < 6,
            "bonferroni should knock out some pairs"
        );
    }

    #[test]
    fn matrix_orientation_and_diagonal() {
        let r = granger_search(&canada(), &[], &lag2_opts(true)).unwrap();
        let m = causality_matrix(&r);
        for i in 0..4 {
            assert!(m.cell(i, i).is_none());
        }
        let eu = m.cell_by_name("e", "U").unwrap();
        assert!(eu.significant);
        assert!((eu.p_value / 1.02810553406e-06 - 1.0).abs() < 1e-6);
        let ue = m.cell_by_name("U", "e").unwrap();
        assert!(!ue.significant);
    }
}
