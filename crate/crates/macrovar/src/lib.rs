//! Time-series econometrics for small quarterly macro panels: unit-root
//! tests (ADF, KPSS), VAR estimation with lag selection and stability
//! diagnostics, Granger causality, and Cholesky-orthogonalized impulse
//! responses with residual-bootstrap confidence bands. Ships a CSV ingestion
//! pipeline, a reference dataset and a `macrovar` CLI that turns a config
//! file into tables and plots.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod causality;
pub mod cli;
pub mod dataset;
pub mod dist;
pub mod error;
pub mod ingest;
pub mod irf;
pub mod pipeline;
pub mod regress;
pub mod series;
pub mod svg;
pub mod table;
pub mod unitroot;
pub mod var;

pub use dataset::Dataset;
pub use error::{Error, ErrorClass, Result};
pub use series::{Period, TimeSeries, Transform};
