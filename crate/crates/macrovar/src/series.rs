//! Quarterly periods and single time series with transform provenance.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A calendar quarter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Period {
    year: i32,
    /// 1..=4
    quarter: u8,
}

impl Period {
    pub fn new(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::Config(format!(
                "quarter must be 1..4, got {quarter}"
            )));
        }
        Ok(Period { year, quarter })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn quarter(&self) -> u8 {
        self.quarter
    }

    /// Period `n` quarters later (or earlier for negative `n`).
    pub fn advanced(&self, n: i64) -> Period {
        let idx = self.year as i64 * 4 + (self.quarter as i64 - 1) + n;
        Period {
            year: idx.div_euclid(4) as i32,
            quarter: (idx.rem_euclid(4) + 1) as u8,
        }
    }

    pub fn next(&self) -> Period {
        self.advanced(1)
    }

    /// Number of quarters from `other` to `self` (positive when self is later).
    pub fn quarters_since(&self, other: &Period) -> i64 {
        (self.year as i64 * 4 + self.quarter as i64) - (other.year as i64 * 4 + other.quarter as i64)
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl FromStr for Period {
    type Err = Error;

    /// Accepts `2004Q1`, `2004-Q1` and `2004-01-01` (first month of quarter).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unrecognized period '{s}'"));
        let s = s.trim();
        if let Some((y, rest)) = s.split_once(['Q', 'q']) {
            let y = y.trim_end_matches('-');
            let year: i32 = y.parse().map_err(|_| bad())?;
            let quarter: u8 = rest.parse().map_err(|_| bad())?;
            return Period::new(year, quarter);
        }
        let mut it = s.split('-');
        match (it.next(), it.next(), it.next(), it.next()) {
            (Some(y), Some(m), Some(d), None) => {
                let year: i32 = y.parse().map_err(|_| bad())?;
                let month: u32 = m.parse().map_err(|_| bad())?;
                let _day: u32 = d.parse().map_err(|_| bad())?;
                match month {
                    1 => Period::new(year, 1),
                    4 => Period::new(year, 2),
                    7 => Period::new(year, 3),
                    10 => Period::new(year, 4),
                    _ => Err(Error::Config(format!(
                        "date '{s}' is not the first month of a quarter"
                    ))),
                }
            }
            _ => Err(bad()),
        }
    }
}

/// A transform applied to a series, recorded for provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Log,
    Diff,
    /// 100 * diff of logs over `span` quarters.
    Growth { span: usize },
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Log => write!(f, "log"),
            Transform::Diff => write!(f, "diff"),
            Transform::Growth { span: 1 } => write!(f, "growth"),
            Transform::Growth { span } => write!(f, "growth[{span}]"),
        }
    }
}

/// A contiguous quarterly series. Immutable after construction; transforms
/// return new values.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    name: String,
    start: Period,
    values: Vec<f64>,
    transforms: Vec<Transform>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, start: Period, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::EmptySeries { series: name });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                series: name,
                period: start.advanced(i as i64),
            });
        }
        Ok(TimeSeries {
            name,
            start,
            values,
            transforms: Vec::new(),
        })
    }

    /// Build from (period, value) observations; they may arrive unordered.
    /// Duplicate quarters and gaps are construction-time errors.
    pub fn from_observations(
        name: impl Into<String>,
        mut obs: Vec<(Period, f64)>,
    ) -> Result<Self> {
        let name = name.into();
        if obs.is_empty() {
            return Err(Error::EmptySeries { series: name });
        }
        obs.sort_by_key(|(p, _)| *p);
        for w in obs.windows(2) {
            let gap = w[1].0.quarters_since(&w[0].0);
            if gap == 0 {
                return Err(Error::Duplicate {
                    series: name,
                    period: w[0].0,
                });
            }
            if gap > 1 {
                return Err(Error::Gap {
                    series: name,
                    period: w[0].0.next(),
                });
            }
        }
        let start = obs[0].0;
        TimeSeries::new(name, start, obs.into_iter().map(|(_, v)| v).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start(&self) -> Period {
        self.start
    }

    /// Period of the last observation.
    pub fn end(&self) -> Period {
        self.start.advanced(self.values.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    pub fn period_at(&self, i: usize) -> Period {
        self.start.advanced(i as i64)
    }

    /// Value at a period, if inside the span.
    pub fn at(&self, period: Period) -> Option<f64> {
        let i = period.quarters_since(&self.start);
        if i < 0 {
            return None;
        }
        self.values.get(i as usize).copied()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn derived(&self, start: Period, values: Vec<f64>, applied: Transform) -> TimeSeries {
        let mut transforms = self.transforms.clone();
        transforms.push(applied);
        TimeSeries {
            name: self.name.clone(),
            start,
            values,
            transforms,
        }
    }

    /// Natural log of every value. Errors on the first non-positive value.
    pub fn log_transform(&self) -> Result<TimeSeries> {
        for (i, &v) in self.values.iter().enumerate() {
            if v <= 0.0 {
                return Err(Error::NonPositive {
                    series: self.name.clone(),
                    period: self.period_at(i),
                    value: v,
                });
            }
        }
        Ok(self.derived(
            self.start,
            self.values.iter().map(|v| v.ln()).collect(),
            Transform::Log,
        ))
    }

    /// First difference; output starts one quarter later.
    pub fn difference(&self) -> Result<TimeSeries> {
        if self.values.len() < 2 {
            return Err(Error::TooShort {
                series: self.name.clone(),
                needed: 2,
                have: self.values.len(),
            });
        }
        Ok(self.derived(
            self.start.next(),
            self.values.windows(2).map(|w| w[1] - w[0]).collect(),
            Transform::Diff,
        ))
    }

    /// Growth rate: 100 * (ln x_t - ln x_{t-span}). Output starts `span`
    /// quarters later.
    pub fn growth(&self, span: usize) -> Result<TimeSeries> {
        if span == 0 {
            return Err(Error::Config("growth span must be >= 1".into()));
        }
        if self.values.len() <= span {
            return Err(Error::TooShort {
                series: self.name.clone(),
                needed: span + 1,
                have: self.values.len(),
            });
        }
        for (i, &v) in self.values.iter().enumerate() {
            if v <= 0.0 {
                return Err(Error::NonPositive {
                    series: self.name.clone(),
                    period: self.period_at(i),
                    value: v,
                });
            }
        }
        let values = (span..self.values.len())
            .map(|t| 100.0 * (self.values[t].ln() - self.values[t - span].ln()))
            .collect();
        Ok(self.derived(
            self.start.advanced(span as i64),
            values,
            Transform::Growth { span },
        ))
    }

    /// Restrict to `[from, to]` inclusive, intersected with the span.
    pub fn window(&self, from: Period, to: Period) -> Result<TimeSeries> {
        if from > to {
            return Err(Error::Config(format!("window {from}..{to} is reversed")));
        }
        let lo = from.max(self.start);
        let hi = to.min(self.end());
        if lo > hi {
            return Err(Error::EmptyRange {
                from,
                to,
                span_from: self.start,
                span_to: self.end(),
            });
        }
        let a = lo.quarters_since(&self.start) as usize;
        let b = hi.quarters_since(&self.start) as usize;
        Ok(TimeSeries {
            name: self.name.clone(),
            start: lo,
            values: self.values[a..=b].to_vec(),
            transforms: self.transforms.clone(),
        })
    }
}
