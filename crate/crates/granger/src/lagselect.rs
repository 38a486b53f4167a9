//! Lag-order sensitivity analysis for one pair of series.
//!
//! Runs the bidirectional test at each requested lag, reports the best lag
//! per direction (minimum p-value, ties to the smaller lag), and computes
//! AIC/BIC from the bivariate VAR(p) residual covariance at each lag.

use serde::Serialize;

use crate::causality::{granger_causality_test_named, GrangerResult};
use crate::error::{Error, Result};
use crate::ols::{build_lag_design, fit_ols};
use crate::series::SeriesTable;

/// Both directions plus information criteria at one lag order.
#[derive(Debug, Clone, Serialize)]
pub struct LagRow {
    pub lag: usize,
    pub statistic_xy: f64,
    #[serde(rename = "p_value_xy")]
    pub p_value_xy: f64,
    pub significant_xy: bool,
    pub statistic_yx: f64,
    #[serde(rename = "p_value_yx")]
    pub p_value_yx: f64,
    pub significant_yx: bool,
    pub aic: f64,
    pub bic: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LagScanResult {
    pub x_name: String,
    pub y_name: String,
    pub lags: Vec<usize>,
    pub per_lag: Vec<LagRow>,
    pub alpha: f64,
    pub n: usize,
    pub best_lag_xy: usize,
    pub best_lag_yx: usize,
    pub n_significant_xy: usize,
    pub n_significant_yx: usize,
}

impl LagScanResult {
    pub fn best_p_xy(&self) -> f64 {
        self.per_lag
            .iter()
            .find(|r| r.lag == self.best_lag_xy)
            .map(|r| r.p_value_xy)
            .expect("best lag is one of the scanned lags")
    }

    pub fn best_p_yx(&self) -> f64 {
        self.per_lag
            .iter()
            .find(|r| r.lag == self.best_lag_yx)
            .map(|r| r.p_value_yx)
            .expect("best lag is one of the scanned lags")
    }
}

/// AIC and BIC of the bivariate VAR(p) on the common effective sample.
///
/// The residual covariance uses the maximum-likelihood divisor `n_eff`, and
/// its log-determinant goes through a 2x2 Cholesky factorization rather
/// than the raw determinant.
pub fn information_criteria(x: &[f64], y: &[f64], p: usize) -> Result<(f64, f64)> {
    let fit_y = fit_ols(&build_lag_design(y, Some(x), p)?)?;
    let fit_x = fit_ols(&build_lag_design(x, Some(y), p)?)?;
    let n_eff = fit_y.n_eff as f64;

    let mut s11 = 0.0;
    let mut s12 = 0.0;
    let mut s22 = 0.0;
    for (r1, r2) in fit_y.residuals.iter().zip(&fit_x.residuals) {
        s11 += r1 * r1;
        s12 += r1 * r2;
        s22 += r2 * r2;
    }
    s11 /= n_eff;
    s12 /= n_eff;
    s22 /= n_eff;

    // Cholesky of [[s11, s12], [s12, s22]]: det = s11 * (s22 - s12^2/s11).
    if s11 <= 0.0 {
        return Err(Error::SingularCovariance(p));
    }
    let schur = s22 - (s12 / s11) * s12;
    if schur <= 0.0 || s11 * schur <= 1e-300 {
        return Err(Error::SingularCovariance(p));
    }
    let log_det = s11.ln() + schur.ln();

    const K: f64 = 2.0;
    let penalty = p as f64 * K * K / n_eff;
    let aic = log_det + 2.0 * penalty;
    let bic = log_det + penalty * n_eff.ln();
    Ok((aic, bic))
}

/// Scan `lags` (nonempty, strictly increasing) for the pair `(x, y)`.
pub fn granger_lag_select(
    x: &[f64],
    y: &[f64],
    x_name: &str,
    y_name: &str,
    lags: &[usize],
    alpha: f64,
) -> Result<LagScanResult> {
    if lags.is_empty() || lags[0] < 1 || lags.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadLagSpec(format!("{lags:?}")));
    }
    // The largest lag is the binding constraint; report it if it fails.
    let largest = *lags.last().unwrap();
    let t = x.len().min(y.len());
    let m = 1 + 2 * largest;
    if t < largest || t - largest <= m {
        return Err(Error::InsufficientData {
            t,
            p: largest,
            m,
            n_eff: t.saturating_sub(largest),
        });
    }

    let mut per_lag = Vec::with_capacity(lags.len());
    for &lag in lags {
        let r: GrangerResult = granger_causality_test_named(x, y, x_name, y_name, lag, alpha)?;
        let (aic, bic) = information_criteria(x, y, lag)?;
        per_lag.push(LagRow {
            lag,
            statistic_xy: r.test_statistic_xy,
            p_value_xy: r.p_value_xy,
            significant_xy: r.x_causes_y,
            statistic_yx: r.test_statistic_yx,
            p_value_yx: r.p_value_yx,
            significant_yx: r.y_causes_x,
            aic,
            bic,
        });
    }

    // Ascending scan with strict `<` keeps the smallest lag on ties.
    let mut best_xy = (per_lag[0].lag, per_lag[0].p_value_xy);
    let mut best_yx = (per_lag[0].lag, per_lag[0].p_value_yx);
    for row in &per_lag[1..] {
        if row.p_value_xy < best_xy.1 {
            best_xy = (row.lag, row.p_value_xy);
        }
        if row.p_value_yx < best_yx.1 {
            best_yx = (row.lag, row.p_value_yx);
        }
    }

    Ok(LagScanResult {
        x_name: x_name.to_string(),
        y_name: y_name.to_string(),
        lags: lags.to_vec(),
        n: x.len(),
        alpha,
        best_lag_xy: best_xy.0,
        best_lag_yx: best_yx.0,
        n_significant_xy: per_lag.iter().filter(|r| r.significant_xy).count(),
        n_significant_yx: per_lag.iter().filter(|r| r.significant_yx).count(),
        per_lag,
    })
}

/// Table-column convenience wrapper.
pub fn granger_lag_select_table(
    table: &SeriesTable,
    x_name: &str,
    y_name: &str,
    lags: &[usize],
    alpha: f64,
) -> Result<LagScanResult> {
    let x = table.column(x_name)?;
    let y = table.column(y_name)?;
    granger_lag_select(x, y, x_name, y_name, lags, alpha)
}
