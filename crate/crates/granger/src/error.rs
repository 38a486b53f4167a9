//! Error types shared across the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("row {row}, column {col:?}: cannot parse {value:?} as a finite number")]
    Parse {
        row: usize,
        col: String,
        value: String,
    },
    #[error("empty table: {0}")]
    EmptyTable(String),
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("column {0:?} selected more than once")]
    DuplicateColumn(String),
    #[error("column {0:?} contains a non-finite value")]
    NonFiniteValue(String),
    #[error("insufficient data: T={t} with lag={p} leaves {n_eff} usable rows for {m} parameters")]
    InsufficientData {
        t: usize,
        p: usize,
        m: usize,
        n_eff: usize,
    },
    #[error("lag order must be a positive integer")]
    InvalidLag,
    #[error("design matrix is rank deficient at column {0} (constant or collinear series)")]
    RankDeficient(usize),
    #[error("series {0:?} is constant over the sample")]
    ConstantSeries(String),
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
    #[error("invalid test statistic {0}: must be finite and nonnegative")]
    InvalidStatistic(f64),
    #[error("incomplete beta did not converge for x={x}, a={a}, b={b}")]
    NonConvergence { x: f64, a: f64, b: f64 },
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("need at least 2 numeric columns to search, found {0}")]
    TooFewColumns(usize),
    #[error("singular residual covariance at lag {0}")]
    SingularCovariance(usize),
    #[error("nonstationary specification: companion spectral radius {0:.6}")]
    NonStationarySpec(f64),
    #[error("unsupported test {0:?}: only \"F\" is available")]
    UnsupportedTest(String),
    #[error("format {0:?} is not supported for this result type")]
    UnsupportedFormat(&'static str),
    #[error("svg output requires an output path")]
    MissingOutputPath,
    #[error("bad lag specification {0:?}: expected N, A:B, or a comma list of increasing positive integers")]
    BadLagSpec(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by how the tool was invoked rather than by the
    /// data or the computation; the CLI maps these to exit code 2.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::UnknownColumn(_)
                | Error::DuplicateColumn(_)
                | Error::InvalidLag
                | Error::InvalidAlpha(_)
                | Error::UnsupportedTest(_)
                | Error::UnsupportedFormat(_)
                | Error::MissingOutputPath
                | Error::BadLagSpec(_)
                | Error::InvalidArgument(_)
        )
    }
}
