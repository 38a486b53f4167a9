//! The bidirectional bivariate causality F-test.
//!
//! For direction X→Y the restricted model regresses Y on its own lags and
//! the unrestricted model adds the lags of X; the statistic is
//! `((RSS_R - RSS_U)/p) / (RSS_U / df2)` with `df2 = n_eff - 2p - 1` on the
//! effective sample `n_eff = T - p`. Both models are fit on the same rows so
//! the nesting holds exactly.

use serde::Serialize;

use crate::dist::{f_sf, FParams};
use crate::error::{Error, Result};
use crate::ols::{build_lag_design, fit_ols};
use crate::series::SeriesTable;

/// Which hypothesis test backs the decision. Only the F-test exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TestKind {
    #[default]
    F,
}

impl std::str::FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "F" {
            Ok(TestKind::F)
        } else {
            Err(Error::UnsupportedTest(s.to_string()))
        }
    }
}

/// Both-direction test outcome for one pair of series.
#[derive(Debug, Clone, Serialize)]
pub struct GrangerResult {
    pub x_name: String,
    pub y_name: String,
    pub lag: usize,
    pub alpha: f64,
    /// Raw observation count T (degrees of freedom use the effective
    /// sample T - lag).
    pub n: usize,
    pub x_causes_y: bool,
    pub y_causes_x: bool,
    pub p_value_xy: f64,
    pub p_value_yx: f64,
    pub test_statistic_xy: f64,
    pub test_statistic_yx: f64,
}

/// Statistic and p-value for a single direction; shared with the search
/// engine so search rows are bit-identical to direct test calls.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DirectedTest {
    pub statistic: f64,
    pub p_value: f64,
}

pub(crate) fn test_one_direction(x: &[f64], y: &[f64], lag: usize) -> Result<DirectedTest> {
    let restricted = fit_ols(&build_lag_design(y, None, lag)?)?;
    let unrestricted = fit_ols(&build_lag_design(y, Some(x), lag)?)?;

    let n_eff = unrestricted.n_eff;
    let df2 = n_eff - 2 * lag - 1;
    // Roundoff can push the nested difference a hair below zero.
    let num = (restricted.rss - unrestricted.rss).max(0.0) / lag as f64;
    let statistic = num / (unrestricted.rss / df2 as f64);
    if !statistic.is_finite() {
        return Err(Error::InvalidStatistic(statistic));
    }
    let p_value = f_sf(statistic, FParams::new(lag as u32, df2 as u32))?;
    Ok(DirectedTest { statistic, p_value })
}

fn validate_inputs(
    x: &[f64],
    y: &[f64],
    x_name: &str,
    y_name: &str,
    lag: usize,
    alpha: f64,
) -> Result<()> {
    if lag < 1 {
        return Err(Error::InvalidLag);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let t = x.len();
    // Needs T - lag > 1 + 2*lag so the denominator df is at least 1.
    let m = 1 + 2 * lag;
    if t < lag || t - lag <= m {
        return Err(Error::InsufficientData {
            t,
            p: lag,
            m,
            n_eff: t.saturating_sub(lag),
        });
    }
    for (series, name) in [(x, x_name), (y, y_name)] {
        let first = series[0];
        if series.iter().all(|v| *v == first) {
            return Err(Error::ConstantSeries(name.to_string()));
        }
    }
    Ok(())
}

/// Run the test in both directions at significance level `alpha`.
pub fn granger_causality_test(
    x: &[f64],
    y: &[f64],
    lag: usize,
    alpha: f64,
) -> Result<GrangerResult> {
    granger_causality_test_named(x, y, "x", "y", lag, alpha)
}

/// Same, carrying the column names through to the result.
pub fn granger_causality_test_named(
    x: &[f64],
    y: &[f64],
    x_name: &str,
    y_name: &str,
    lag: usize,
    alpha: f64,
) -> Result<GrangerResult> {
    validate_inputs(x, y, x_name, y_name, lag, alpha)?;
    let xy = test_one_direction(x, y, lag)?;
    let yx = test_one_direction(y, x, lag)?;
    Ok(GrangerResult {
        x_name: x_name.to_string(),
        y_name: y_name.to_string(),
        lag,
        alpha,
        n: x.len(),
        x_causes_y: xy.p_value < alpha,
        y_causes_x: yx.p_value < alpha,
        p_value_xy: xy.p_value,
        p_value_yx: yx.p_value,
        test_statistic_xy: xy.statistic,
        test_statistic_yx: yx.statistic,
    })
}

/// Test two named columns of a table.
pub fn granger_causality_test_table(
    table: &SeriesTable,
    x_name: &str,
    y_name: &str,
    lag: usize,
    alpha: f64,
) -> Result<GrangerResult> {
    let x = table.column(x_name)?;
    let y = table.column(y_name)?;
    granger_causality_test_named(x, y, x_name, y_name, lag, alpha)
}

/// One row per direction of causality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TidyRow {
    pub direction: String,
    pub cause: String,
    pub effect: String,
    pub statistic: f64,
    #[serde(rename = "p_value")]
    pub p_value: f64,
    pub significant: bool,
}

/// Two rows, X→Y first.
pub fn tidy(result: &GrangerResult) -> Vec<TidyRow> {
    vec![
        TidyRow {
            direction: format!("{} -> {}", result.x_name, result.y_name),
            cause: result.x_name.clone(),
            effect: result.y_name.clone(),
            statistic: result.test_statistic_xy,
            p_value: result.p_value_xy,
            significant: result.x_causes_y,
        },
        TidyRow {
            direction: format!("{} -> {}", result.y_name, result.x_name),
            cause: result.y_name.clone(),
            effect: result.x_name.clone(),
            statistic: result.test_statistic_yx,
            p_value: result.p_value_yx,
            significant: result.y_causes_x,
        },
    ]
}

/// One-row summary of the test setup.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlanceRow {
    pub lag: usize,
    pub alpha: f64,
    pub n: usize,
    pub x_name: String,
    pub y_name: String,
}

pub fn glance(result: &GrangerResult) -> GlanceRow {
    GlanceRow {
        lag: result.lag,
        alpha: result.alpha,
        n: result.n,
        x_name: result.x_name.clone(),
        y_name: result.y_name.clone(),
    }
}
