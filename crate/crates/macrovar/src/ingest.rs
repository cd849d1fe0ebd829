//! CSV ingestion, declarative pipeline configuration and the fetch helper.
//!
//! The config is a single TOML file; paths inside it resolve relative to the
//! file's directory. See `configs/reference.toml` in the repository for the
//! full schema.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::irf::{IrfSpec, ShockSize};
use crate::series::{Period, TimeSeries};
use crate::var::VarSpec;

fn default_date_column() -> String {
    "DATE".into()
}
fn default_value_column() -> String {
    "VALUE".into()
}
fn default_growth_span() -> usize {
    1
}
fn default_lags() -> usize {
    1
}
fn default_true() -> bool {
    true
}
fn default_horizon() -> usize {
    8
}
fn default_ci() -> f64 {
    0.95
}
fn default_reps() -> usize {
    1000
}
fn default_shock_size() -> String {
    "one-sd".into()
}
fn default_out_dir() -> String {
    "out".into()
}
fn default_granger_mode() -> String {
    "conditional".into()
}

/// One `[[series]]` entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub name: String,
    pub path: String,
    #[serde(default = "default_date_column")]
    pub date_column: String,
    #[serde(default = "default_value_column")]
    pub value_column: String,
    /// `auto` accepts `YYYY-MM-DD` (first month of quarter), `YYYYQn` and
    /// `YYYY-Qn`.
    #[serde(default = "default_date_format")]
    pub date_format: String,
    /// Applied left to right; tokens: log, diff, growth, none.
    #[serde(default)]
    pub transforms: Vec<String>,
    #[serde(default)]
    pub shock: bool,
    /// Quarters spanned by the growth transform (1 = quarter over quarter,
    /// 4 = year over year).
    #[serde(default = "default_growth_span")]
    pub growth_span: usize,
}

fn default_date_format() -> String {
    "auto".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleConfig {
    pub start: String,
    pub end: String,
    /// Last quarter of the early subsample for causality tables.
    #[serde(default)]
    pub breakpoint: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarConfig {
    #[serde(default = "default_lags")]
    pub lags: usize,
    #[serde(default = "default_true")]
    pub constant: bool,
    pub ordering: Vec<String>,
    #[serde(default = "default_granger_mode")]
    pub granger_mode: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrfConfig {
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_ci")]
    pub ci_level: f64,
    #[serde(default = "default_reps")]
    pub replications: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_shock_size")]
    pub shock_size: String,
    #[serde(default)]
    pub ridge_on_non_pd: bool,
}

impl Default for IrfConfig {
    fn default() -> Self {
        IrfConfig {
            horizon: default_horizon(),
            ci_level: default_ci(),
            replications: default_reps(),
            seed: None,
            shock_size: default_shock_size(),
            ridge_on_non_pd: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_out_dir(),
        }
    }
}

/// Parsed and validated pipeline configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub sample: SampleConfig,
    pub series: Vec<SeriesConfig>,
    pub var: VarConfig,
    #[serde(default)]
    pub irf: IrfConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::ConfigIo {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut cfg: PipelineConfig = toml::from_str(&text).map_err(|e| Error::ConfigParse {
            path: path.display().to_string(),
            source: Box::new(e),
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for s in &mut cfg.series {
            let p = PathBuf::from(&s.path);
            if p.is_relative() {
                s.path = base.join(p).display().to_string();
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.series.is_empty() {
            return Err(Error::Config("at least one [[series]] is required".into()));
        }
        let mut names = std::collections::HashSet::new();
        for s in &self.series {
            if !names.insert(s.name.clone()) {
                return Err(Error::Config(format!("duplicate series name '{}'", s.name)));
            }
            for t in &s.transforms {
                if !matches!(t.as_str(), "log" | "diff" | "growth" | "none") {
                    return Err(Error::Config(format!(
                        "series '{}': unknown transform '{t}' (expected log|diff|growth|none)",
                        s.name
                    )));
                }
            }
            if s.growth_span == 0 {
                return Err(Error::Config(format!(
                    "series '{}': growth_span must be >= 1",
                    s.name
                )));
            }
        }
        let shocks: Vec<&str> = self
            .series
            .iter()
            .filter(|s| s.shock)
            .map(|s| s.name.as_str())
            .collect();
        if shocks.len() != 1 {
            return Err(Error::Config(format!(
                "exactly one series must be flagged shock = true, found {:?}",
                shocks
            )));
        }
        if self.var.ordering.is_empty() {
            return Err(Error::Config("[var] ordering must not be empty".into()));
        }
        for name in &self.var.ordering {
            if !names.contains(name) {
                return Err(Error::Config(format!(
                    "[var] ordering mentions unknown series '{name}'"
                )));
            }
        }
        if self.var.ordering.first().map(String::as_str) != Some(shocks[0]) {
            return Err(Error::Config(format!(
                "the shock series '{}' must come first in [var] ordering",
                shocks[0]
            )));
        }
        if self.var.lags == 0 {
            return Err(Error::Config("[var] lags must be >= 1".into()));
        }
        if !matches!(self.var.granger_mode.as_str(), "conditional" | "bivariate") {
            return Err(Error::Config(format!(
                "[var] granger_mode must be conditional|bivariate, got '{}'",
                self.var.granger_mode
            )));
        }
        if !matches!(self.irf.shock_size.as_str(), "one-sd" | "unit") {
            return Err(Error::Config(format!(
                "[irf] shock_size must be one-sd|unit, got '{}'",
                self.irf.shock_size
            )));
        }
        if !(0.0 < self.irf.ci_level && self.irf.ci_level < 1.0) {
            return Err(Error::Config("[irf] ci_level must be in (0, 1)".into()));
        }
        let (start, end) = (self.start()?, self.end()?);
        if start > end {
            return Err(Error::Config(format!(
                "[sample] start {start} is after end {end}"
            )));
        }
        if let Some(bp) = self.breakpoint()? {
            if bp < start || bp >= end {
                return Err(Error::Config(format!(
                    "[sample] breakpoint {bp} must lie inside [{start}, {end})"
                )));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> Result<Period> {
        self.sample.start.parse()
    }

    pub fn end(&self) -> Result<Period> {
        self.sample.end.parse()
    }

    pub fn breakpoint(&self) -> Result<Option<Period>> {
        self.sample
            .breakpoint
            .as_ref()
            .map(|s| s.parse())
            .transpose()
    }

    pub fn shock_name(&self) -> &str {
        self.series
            .iter()
            .find(|s| s.shock)
            .map(|s| s.name.as_str())
            .expect("validated: exactly one shock")
    }

    pub fn var_spec(&self) -> VarSpec {
        VarSpec {
            lags: self.var.lags,
            include_constant: self.var.constant,
            ordering: self.var.ordering.clone(),
        }
    }

    /// IRF spec with the seed resolution already applied (`seed` wins over
    /// the config, which wins over the MACROVAR_SEED variable, which wins
    /// over zero).
    pub fn irf_spec(&self, seed_override: Option<u64>) -> IrfSpec {
        let env_seed = std::env::var("MACROVAR_SEED")
            .ok()
            .and_then(|s| s.parse::<u64>().ok());
        let seed = seed_override
            .or(self.irf.seed)
            .or(env_seed)
            .unwrap_or(0);
        IrfSpec {
            horizon: self.irf.horizon,
            ci_level: self.irf.ci_level,
            bootstrap_reps: self.irf.replications,
            seed,
            shock_size: if self.irf.shock_size == "unit" {
                ShockSize::Unit
            } else {
                ShockSize::OneSd
            },
            ridge_on_non_pd: self.irf.ridge_on_non_pd,
        }
    }

    /// The resolved config as TOML, echoed into every run's output directory.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

fn parse_period_cell(s: &str, format: &str) -> Result<Period> {
    match format {
        "auto" => s.parse(),
        "iso" => {
            if s.contains('-') && !s.to_ascii_uppercase().contains('Q') {
                s.parse()
            } else {
                Err(Error::Config(format!("'{s}' is not an ISO date")))
            }
        }
        "quarter" => {
            if s.to_ascii_uppercase().contains('Q') {
                s.parse()
            } else {
                Err(Error::Config(format!("'{s}' is not a quarter label")))
            }
        }
        other => Err(Error::Config(format!(
            "unknown date_format '{other}' (expected auto|iso|quarter)"
        ))),
    }
}

/// Read one CSV series: header row required, rows sorted and validated as a
/// contiguous quarterly span.
pub fn read_series(cfg: &SeriesConfig) -> Result<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(&cfg.path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io {
                path: cfg.path.clone(),
                source: std::io::Error::new(std::io::ErrorKind::Other, e.to_string()),
            },
            _ => Error::Parse {
                path: cfg.path.clone(),
                line: 0,
                message: e.to_string(),
            },
        })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            path: cfg.path.clone(),
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            path: cfg.path.clone(),
            line: 1,
            message: format!("missing column '{name}' in header {headers:?}"),
        })
    };
    let date_idx = col(&cfg.date_column)?;
    let value_idx = col(&cfg.value_column)?;
    let mut obs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2; // 1-based, after the header
        let record = record.map_err(|e| Error::Parse {
            path: cfg.path.clone(),
            line,
            message: e.to_string(),
        })?;
        let date_cell = record.get(date_idx).ok_or_else(|| Error::Parse {
            path: cfg.path.clone(),
            line,
            message: "missing date cell".into(),
        })?;
        let value_cell = record.get(value_idx).ok_or_else(|| Error::Parse {
            path: cfg.path.clone(),
            line,
            message: "missing value cell".into(),
        })?;
        let period = parse_period_cell(date_cell, &cfg.date_format).map_err(|e| Error::Parse {
            path: cfg.path.clone(),
            line,
            message: e.to_string(),
        })?;
        let value: f64 = value_cell.parse().map_err(|_| Error::Parse {
            path: cfg.path.clone(),
            line,
            message: format!("unparsable value '{value_cell}'"),
        })?;
        obs.push((period, value));
    }
    TimeSeries::from_observations(cfg.name.clone(), obs)
}

/// Write a series as `DATE,VALUE` CSV with `YYYYQn` dates. Values use the
/// shortest representation that round-trips exactly.
pub fn write_series(series: &TimeSeries, path: &Path) -> Result<()> {
    let mut out = String::from("DATE,VALUE\n");
    for (i, v) in series.values().iter().enumerate() {
        out.push_str(&format!("{},{:?}\n", series.period_at(i), v));
    }
    std::fs::write(path, out).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn apply_transforms(cfg: &SeriesConfig, s: TimeSeries) -> Result<TimeSeries> {
    let mut out = s;
    for t in &cfg.transforms {
        out = match t.as_str() {
            "log" => out.log_transform()?,
            "diff" => out.difference()?,
            "growth" => out.growth(cfg.growth_span)?,
            "none" => out,
            other => {
                return Err(Error::Config(format!(
                    "series '{}': unknown transform '{other}'",
                    cfg.name
                )))
            }
        };
    }
    Ok(out)
}

/// Read every configured series, apply its transform chain, then align the
/// results (alignment happens after transforms) and restrict to the sample.
pub fn assemble(cfg: &PipelineConfig) -> Result<Dataset> {
    let mut transformed = Vec::with_capacity(cfg.series.len());
    for s in &cfg.series {
        let raw = read_series(s)?;
        transformed.push(apply_transforms(s, raw)?);
    }
    let aligned = Dataset::align(transformed)?;
    let start = cfg.start()?.max(aligned.start());
    let end = cfg.end()?.min(aligned.end());
    aligned.subsample(start, end)
}

/// Level-form variant used by the unit-root table: the transform chain with
/// one trailing `diff` removed (a `growth` chain is already a rate and stays
/// as-is).
pub fn assemble_level_form(cfg: &PipelineConfig, series_cfg: &SeriesConfig) -> Result<TimeSeries> {
    let mut chain = series_cfg.transforms.clone();
    if chain.last().map(String::as_str) == Some("diff") {
        chain.pop();
    }
    let level_cfg = SeriesConfig {
        transforms: chain,
        ..series_cfg.clone()
    };
    let raw = read_series(&level_cfg)?;
    let s = apply_transforms(&level_cfg, raw)?;
    let start = cfg.start()?.max(s.start());
    let end = cfg.end()?.min(s.end());
    s.window(start, end)
}

/// Short label like `log(oil)` or `growth(gdp)` describing the level form.
pub fn level_label(series_cfg: &SeriesConfig) -> String {
    let mut chain = series_cfg.transforms.clone();
    if chain.last().map(String::as_str) == Some("diff") {
        chain.pop();
    }
    chain
        .iter()
        .rev()
        .fold(series_cfg.name.clone(), |acc, t| {
            if t == &acc {
                // a variable named after its own transform (e.g. growth)
                acc
            } else {
                format!("{t}({acc})")
            }
        })
}

/// HTTPS GET of a CSV by series identifier from a FRED-style endpoint
/// (`{base_url}?id={series_id}`), 30 second timeout. Provided for pulling
/// fresh vintages; the test suite never calls it.
pub fn fetch_csv(base_url: &str, series_id: &str) -> Result<String> {
    let url = format!("{base_url}?id={series_id}");
    let client = reqwest::blocking::Client::builder()
        .timeout(std::time::Duration::from_secs(30))
        .build()
        .map_err(|e| Error::Fetch {
            url: url.clone(),
            message: e.to_string(),
        })?;
    let resp = client.get(&url).send().map_err(|e| Error::Fetch {
        url: url.clone(),
        message: e.to_string(),
    })?;
    if !resp.status().is_success() {
        return Err(Error::Fetch {
            url,
            message: format!("HTTP status {}", resp.status()),
        });
    }
    resp.text().map_err(|e| Error::Fetch {
        url,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn series_cfg(path: &str) -> SeriesConfig {
        SeriesConfig {
            name: "x".into(),
            path: path.into(),
            date_column: "DATE".into(),
            value_column: "VALUE".into(),
            date_format: "auto".into(),
            transforms: vec![],
            shock: false,
            growth_span: 1,
        }
    }

    #[test]
    fn happy_path_three_rows() {
        let f = write_tmp("DATE,VALUE\n2010-01-01,1.5\n2010-04-01,2.5\n2010-07-01,3.5\n");
        let s = read_series(&series_cfg(f.path().to_str().unwrap())).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.start(), Period::new(2010, 1).unwrap());
        assert_eq!(s.values(), &[1.5, 2.5, 3.5]);
    }

    #[test]
    fn mixed_quarter_labels_parse() {
        let f = write_tmp("DATE,VALUE\n2010Q1,1\n2010-Q2,2\n2010-07-01,3\n");
        let s = read_series(&series_cfg(f.path().to_str().unwrap())).unwrap();
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn gap_is_reported_with_the_missing_quarter() {
        let f = write_tmp("DATE,VALUE\n2010Q1,1\n2010Q3,2\n");
        match read_series(&series_cfg(f.path().to_str().unwrap())) {
            Err(Error::Gap { period, .. }) => {
                assert_eq!(period, Period::new(2010, 2).unwrap())
            }
            other => panic!("expected Gap, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_quarter_is_an_error() {
        let f = write_tmp("DATE,VALUE\n2010Q1,1\n2010Q1,2\n");
        assert!(matches!(
            read_series(&series_cfg(f.path().to_str().unwrap())),
            Err(Error::Duplicate { .. })
        ));
    }

    #[test]
    fn bad_cell_is_row_addressed() {
        let f = write_tmp("DATE,VALUE\n2010Q1,1\n2010Q2,not-a-number\n");
        match read_series(&series_cfg(f.path().to_str().unwrap())) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_reported() {
        let f = write_tmp("WHEN,VALUE\n2010Q1,1\n");
        match read_series(&series_cfg(f.path().to_str().unwrap())) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("DATE")),
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            read_series(&series_cfg("/nonexistent/file.csv")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn round_trip_write_read_is_identity() {
        let s = TimeSeries::new(
            "rt",
            Period::new(2004, 1).unwrap(),
            vec![1.1, 2.456789012345678, -3.25, 1e-7],
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        write_series(&s, &path).unwrap();
        let mut cfg = series_cfg(path.to_str().unwrap());
        cfg.name = "rt".into();
        let back = read_series(&cfg).unwrap();
        assert_eq!(back.start(), s.start());
        assert_eq!(back.values(), s.values());
    }

    #[test]
    fn level_label_strips_one_trailing_diff() {
        let mut cfg = series_cfg("x.csv");
        cfg.name = "oil".into();
        cfg.transforms = vec!["log".into(), "diff".into()];
        assert_eq!(level_label(&cfg), "log(oil)");
        cfg.transforms = vec!["growth".into()];
        assert_eq!(level_label(&cfg), "growth(oil)");
        cfg.transforms = vec![];
        assert_eq!(level_label(&cfg), "oil");
    }
}
