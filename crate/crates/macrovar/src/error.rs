use crate::series::Period;

/// Crate-wide error type.
///
/// Variants are grouped by how the CLI maps them to exit codes: configuration
/// problems (exit 2), data problems (exit 3) and numerical failures (exit 4).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    // --- configuration ---
    #[error("config: {0}")]
    Config(String),
    #[error("config: failed to read {path}: {source}")]
    ConfigIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config: failed to parse {path}: {source}")]
    ConfigParse {
        path: String,
        #[source]
        source: Box<toml::de::Error>,
    },

    // --- data ---
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("series '{series}': missing quarter {period} (series must be contiguous)")]
    Gap { series: String, period: Period },
    #[error("series '{series}': duplicate quarter {period}")]
    Duplicate { series: String, period: Period },
    #[error("series '{series}': empty")]
    EmptySeries { series: String },
    #[error("series '{series}': non-finite value at {period}")]
    NonFinite { series: String, period: Period },
    #[error("series '{series}': non-positive value {value} at {period}, cannot take log")]
    NonPositive {
        series: String,
        period: Period,
        value: f64,
    },
    #[error("series '{series}': {needed} observations needed, have {have}")]
    TooShort {
        series: String,
        needed: usize,
        have: usize,
    },
    #[error("no overlapping span between series: {spans}")]
    NoOverlap { spans: String },
    #[error("range {from}..{to} does not intersect span {span_from}..{span_to}")]
    EmptyRange {
        from: Period,
        to: Period,
        span_from: Period,
        span_to: Period,
    },
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("fetch {url}: {message}")]
    Fetch { url: String, message: String },

    // --- numerical ---
    #[error("collinear regressors: {columns:?}")]
    Collinear { columns: Vec<String> },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("degenerate model: {0}")]
    DegenerateModel(String),
    #[error("residual covariance is not positive definite{hint}", hint = if *.ridge_hint { "; rerun with ridge_on_non_pd to apply a diagonal jitter <= 1e-10 * max diagonal" } else { "" })]
    NotPositiveDefinite { ridge_hint: bool },
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    #[error("bootstrap aborted: {failed} of {total} replications failed or were unstable (> 5% allowed)")]
    BootstrapUnstable { failed: usize, total: usize },
    #[error("model is unstable: companion max modulus {max_modulus}")]
    UnstableModel { max_modulus: f64 },
}

/// Exit-code class of an error, the CLI's stable scripting contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// exit 2
    Config,
    /// exit 3
    Data,
    /// exit 4
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Config(_) | ConfigIo { .. } | ConfigParse { .. } => ErrorClass::Config,
            Io { .. } | Parse { .. } | Gap { .. } | Duplicate { .. } | EmptySeries { .. }
            | NonFinite { .. } | NonPositive { .. } | TooShort { .. } | NoOverlap { .. }
            | EmptyRange { .. } | Dataset(_) | InsufficientData(_) | Fetch { .. } => {
                ErrorClass::Data
            }
            Collinear { .. } | DegenerateInput(_) | DegenerateModel(_)
            | NotPositiveDefinite { .. } | NumericalDegeneracy(_) | BootstrapUnstable { .. }
            | UnstableModel { .. } => ErrorClass::Numerical,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Config => 2,
            ErrorClass::Data => 3,
            ErrorClass::Numerical => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
