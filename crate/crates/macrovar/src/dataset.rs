//! Aligned multivariate panels.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::series::{Period, TimeSeries};

/// An aligned panel of named series sharing start and length. The variable
/// order is meaningful: it is the identification order used downstream.
#[derive(Debug, Clone)]
pub struct Dataset {
    series: Vec<TimeSeries>,
}

impl Dataset {
    /// Truncate every series to the intersection of spans, preserving input
    /// order.
    pub fn align(series: Vec<TimeSeries>) -> Result<Dataset> {
        if series.is_empty() {
            return Err(Error::Dataset("cannot align an empty series list".into()));
        }
        let mut names = std::collections::HashSet::new();
        for s in &series {
            if !names.insert(s.name().to_string()) {
                return Err(Error::Dataset(format!("duplicate variable '{}'", s.name())));
            }
        }
        let start = series.iter().map(|s| s.start()).max().unwrap();
        let end = series.iter().map(|s| s.end()).min().unwrap();
        if start > end {
            let spans = series
                .iter()
                .map(|s| format!("{} [{}..{}]", s.name(), s.start(), s.end()))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::NoOverlap { spans });
        }
        let series = series
            .into_iter()
            .map(|s| s.window(start, end))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset { series })
    }

    pub fn names(&self) -> Vec<&str> {
        self.series.iter().map(|s| s.name()).collect()
    }

    pub fn k(&self) -> usize {
        self.series.len()
    }

    pub fn len(&self) -> usize {
        self.series[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> Period {
        self.series[0].start()
    }

    pub fn end(&self) -> Period {
        self.series[0].end()
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn by_name(&self, name: &str) -> Option<&TimeSeries> {
        self.series.iter().find(|s| s.name() == name)
    }

    /// Restrict all variables to `[from, to]` inclusive.
    pub fn subsample(&self, from: Period, to: Period) -> Result<Dataset> {
        let series = self
            .series
            .iter()
            .map(|s| s.window(from, to))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset { series })
    }

    /// Subset and reorder variables by name.
    pub fn select(&self, names: &[String]) -> Result<Dataset> {
        let series = names
            .iter()
            .map(|n| {
                self.by_name(n)
                    .cloned()
                    .ok_or_else(|| Error::Dataset(format!("unknown variable '{n}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        if series.is_empty() {
            return Err(Error::Dataset("selection is empty".into()));
        }
        Ok(Dataset { series })
    }

    /// T x k value matrix in variable order.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let t = self.len();
        let k = self.k();
        DMatrix::from_fn(t, k, |i, j| self.series[j].values()[i])
    }
}
