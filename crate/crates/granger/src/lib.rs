//! Granger causality testing, exhaustive pairwise search, and lag-order
//! sensitivity analysis for multivariate time-series tables.
//!
//! A series X "Granger-causes" a series Y when past values of X improve the
//! linear prediction of Y beyond what Y's own past provides. The test fits
//! two least-squares models per direction (with and without the other
//! series' lags) and compares their residual sums of squares with an F
//! statistic.
//!
//! # Modules
//!
//! - [`series`] - CSV loading, validation, column selection
//! - [`ols`] - lagged design matrices and Householder-QR least squares
//! - [`dist`] - F-distribution tail probabilities (incomplete beta)
//! - [`causality`] - the bidirectional test and tidy/glance views
//! - [`search`] - all-pairs search, multiplicity adjustment, causality matrix
//! - [`lagselect`] - per-lag scan with AIC/BIC
//! - [`sim`] - seeded bivariate VAR generator and Monte-Carlo harness
//! - [`render`] - text, CSV, JSON, and SVG output
//! - [`cli`] - the `granger` binary's argument handling
//!
//! # Example
//!
//! ```
//! use granger::causality::granger_causality_test;
//!
//! let x: Vec<f64> = (0..80).map(|i| (i as f64 * 0.7).sin()).collect();
//! let mut y = vec![0.0; 80];
//! for t in 1..80 {
//!     y[t] = 0.4 * y[t - 1] + 0.9 * x[t - 1] + (t as f64 * 1.3).cos() * 0.1;
//! }
//! let r = granger_causality_test(&x, &y, 2, 0.05).unwrap();
//! assert!(r.x_causes_y);
//! ```

pub mod causality;
pub mod cli;
pub mod dist;
pub mod error;
pub mod lagselect;
pub mod ols;
pub mod render;
pub mod search;
pub mod series;
pub mod sim;

#[doc(hidden)]
pub mod testutil;

pub use causality::{glance, granger_causality_test, tidy, GrangerResult};
pub use error::{Error, Result};
pub use lagselect::{granger_lag_select, information_criteria, LagScanResult};
pub use search::{adjust_pvalues, causality_matrix, granger_search, SearchOptions, SearchResult};
pub use series::{load_csv, SeriesTable};
pub use sim::{rejection_rate, simulate, VarSpec};
