//! Lagged design matrices and single-equation least squares.
//!
//! Builds the restricted (own lags only) and unrestricted (own plus cross
//! lags) regressions behind the causality F-test and fits them by Householder
//! QR. Only residual sums of squares leave this module in practice, but the
//! full fit is exposed for diagnostics and tests.

use crate::error::{Error, Result};

/// One lagged regression problem: `response ~ predictors`.
///
/// Row `t` of the design corresponds to observation `t + p` of the raw
/// series, so the restricted and unrestricted designs for the same `(y, p)`
/// share an identical response vector.
#[derive(Debug, Clone)]
pub struct LagDesign {
    response: Vec<f64>,
    /// Row-major `n_eff x m`; column 0 is the intercept column of ones.
    predictors: Vec<f64>,
    n_eff: usize,
    m: usize,
    p: usize,
}

impl LagDesign {
    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn n_eff(&self) -> usize {
        self.n_eff
    }

    pub fn n_predictors(&self) -> usize {
        self.m
    }

    pub fn lag(&self) -> usize {
        self.p
    }

    pub fn predictor(&self, row: usize, col: usize) -> f64 {
        self.predictors[row * self.m + col]
    }
}

/// One fitted equation.
#[derive(Debug, Clone)]
pub struct VarFit {
    /// Intercept first, then own-lag coefficients 1..p, then cross-lag
    /// coefficients 1..p when present.
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Residual sum of squares.
    pub rss: f64,
    /// `rss / n_eff`, the ML residual variance.
    pub sigma2: f64,
    pub n_eff: usize,
    pub n_params: usize,
}

/// Build the design for regressing `y` on an intercept, its own lags
/// `1..=p`, and (when `x` is given) the lags of `x`.
///
/// Requires strictly more rows than predictors: `T - p > m`.
pub fn build_lag_design(y: &[f64], x: Option<&[f64]>, p: usize) -> Result<LagDesign> {
    if p < 1 {
        return Err(Error::InvalidLag);
    }
    let t = y.len();
    if let Some(x) = x {
        if x.len() != t {
            return Err(Error::LengthMismatch(y.len(), x.len()));
        }
    }
    let m = 1 + p + if x.is_some() { p } else { 0 };
    if t < p || t - p <= m {
        return Err(Error::InsufficientData {
            t,
            p,
            m,
            n_eff: t.saturating_sub(p),
        });
    }
    let n_eff = t - p;

    let mut predictors = Vec::with_capacity(n_eff * m);
    let mut response = Vec::with_capacity(n_eff);
    for row in 0..n_eff {
        let obs = row + p;
        response.push(y[obs]);
        predictors.push(1.0);
        for i in 1..=p {
            predictors.push(y[obs - i]);
        }
        if let Some(x) = x {
            for i in 1..=p {
                predictors.push(x[obs - i]);
            }
        }
    }

    Ok(LagDesign {
        response,
        predictors,
        n_eff,
        m,
        p,
    })
}

/// Fit by Householder QR without column pivoting.
///
/// A diagonal entry of R below `1e-10` times the largest diagonal entry
/// signals a constant or collinear column and yields `RankDeficient` with
/// that column's index.
pub fn fit_ols(design: &LagDesign) -> Result<VarFit> {
    let n = design.n_eff;
    let m = design.m;
    let mut a = design.predictors.clone();
    let mut qty = design.response.clone();

    let mut r_diag = vec![0.0f64; m];
    for k in 0..m {
        // Column norm below the diagonal, with scaling to dodge overflow.
        let mut scale = 0.0f64;
        for i in k..n {
            scale = scale.max(a[i * m + k].abs());
        }
        if scale == 0.0 {
            r_diag[k] = 0.0;
            continue;
        }
        let mut norm_sq = 0.0;
        for i in k..n {
            let v = a[i * m + k] / scale;
            norm_sq += v * v;
        }
        let mut norm = scale * norm_sq.sqrt();
        if a[k * m + k] > 0.0 {
            norm = -norm;
        }
        // Householder vector stored in place; v_k = a_kk - norm.
        for i in k..n {
            a[i * m + k] /= -norm;
        }
        a[k * m + k] += 1.0;
        r_diag[k] = norm;

        // Reflect the remaining columns.
        for j in (k + 1)..m {
            let mut s = 0.0;
            for i in k..n {
                s += a[i * m + k] * a[i * m + j];
            }
            s = -s / a[k * m + k];
            for i in k..n {
                a[i * m + j] += s * a[i * m + k];
            }
        }
        // Reflect the response.
        let mut s = 0.0;
        for i in k..n {
            s += a[i * m + k] * qty[i];
        }
        s = -s / a[k * m + k];
        for i in k..n {
            qty[i] += s * a[i * m + k];
        }
    }

    let max_pivot = r_diag.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    for (k, d) in r_diag.iter().enumerate() {
        if d.abs() <= 1e-10 * max_pivot {
            return Err(Error::RankDeficient(k));
        }
    }

    // Back-substitution: R c = Q' y.
    let mut coefficients = vec![0.0f64; m];
    for k in (0..m).rev() {
        let mut s = qty[k];
        for j in (k + 1)..m {
            s -= a[k * m + j] * coefficients[j];
        }
        coefficients[k] = s / r_diag[k];
    }

    let mut residuals = Vec::with_capacity(n);
    let mut rss = 0.0;
    for row in 0..n {
        let mut fitted = 0.0;
        for (j, c) in coefficients.iter().enumerate() {
            fitted += design.predictor(row, j) * c;
        }
        let r = design.response[row] - fitted;
        residuals.push(r);
        rss += r * r;
    }

    Ok(VarFit {
        coefficients,
        residuals,
        sigma2: rss / n as f64,
        rss,
        n_eff: n,
        n_params: m,
    })
}
