//! Assembled runs behind the CLI commands: unit-root table, lag selection,
//! causality grid, impulse responses with bands, and the one-shot report.

use sha2::{Digest, Sha256};

use crate::causality::{granger_table, GrangerMode, SampleLabel, SampleTable};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::ingest::{assemble, assemble_level_form, level_label, PipelineConfig};
use crate::irf::{bootstrap_bands, IrfResult, IrfSpec};
use crate::series::Period;
use crate::unitroot::{adf_test, kpss_test, AdfResult, AdfSpec, KpssResult, KpssSpec};
use crate::var::{select_lag, LagSelectionTable};

/// One row of the stationarity table: both tests on the level form and on
/// its first difference.
#[derive(Debug, Clone)]
pub struct UnitRootRow {
    pub name: String,
    pub level_label: String,
    pub level_adf: AdfResult,
    pub level_kpss: KpssResult,
    pub diff_adf: AdfResult,
    pub diff_kpss: KpssResult,
}

impl UnitRootRow {
    /// Both tests agree on stationarity at the 1% level.
    pub fn level_confirmed_stationary(&self) -> bool {
        self.level_adf.stationary_at_1pct() && self.level_kpss.stationary_at_1pct()
    }

    pub fn diff_confirmed_stationary(&self) -> bool {
        self.diff_adf.stationary_at_1pct() && self.diff_kpss.stationary_at_1pct()
    }
}

/// Run ADF and KPSS on every configured series: constant+trend on levels,
/// constant on differences, BIC lag selection, KPSS level null.
pub fn unit_root_table(cfg: &PipelineConfig) -> Result<Vec<UnitRootRow>> {
    let mut rows = Vec::with_capacity(cfg.series.len());
    for s in &cfg.series {
        let level = assemble_level_form(cfg, s)?;
        let diff = level.difference()?;
        let kpss_spec = KpssSpec::default();
        rows.push(UnitRootRow {
            name: s.name.clone(),
            level_label: level_label(s),
            level_adf: adf_test(&level, &AdfSpec::levels())?,
            level_kpss: kpss_test(&level, &kpss_spec)?,
            diff_adf: adf_test(&diff, &AdfSpec::differences())?,
            diff_kpss: kpss_test(&diff, &kpss_spec)?,
        });
    }
    Ok(rows)
}

/// The transformed panel restricted to the VAR variables in identification
/// order.
pub fn var_panel(cfg: &PipelineConfig) -> Result<Dataset> {
    let panel = assemble(cfg)?;
    panel.select(&cfg.var.ordering)
}

pub fn lag_selection(cfg: &PipelineConfig, p_max: usize) -> Result<LagSelectionTable> {
    let panel = var_panel(cfg)?;
    select_lag(&panel, p_max, cfg.var.constant)
}

/// Sample windows for the causality tables: full span plus pre/post
/// subsamples when the config names a breakpoint.
pub fn sample_windows(
    cfg: &PipelineConfig,
    panel: &Dataset,
) -> Result<Vec<(SampleLabel, Period, Period)>> {
    let mut windows = vec![(SampleLabel::Full, panel.start(), panel.end())];
    if let Some(bp) = cfg.breakpoint()? {
        windows.push((SampleLabel::PreBreak, panel.start(), bp));
        windows.push((SampleLabel::PostBreak, bp.next(), panel.end()));
    }
    Ok(windows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFilter {
    All,
    Full,
    Pre,
    Post,
}

pub fn granger_grid(
    cfg: &PipelineConfig,
    lags_override: Option<usize>,
    filter: SampleFilter,
) -> Result<Vec<SampleTable>> {
    let panel = var_panel(cfg)?;
    let mut spec = cfg.var_spec();
    if let Some(p) = lags_override {
        spec.lags = p;
    }
    let mode = if cfg.var.granger_mode == "bivariate" {
        GrangerMode::Bivariate
    } else {
        GrangerMode::Conditional
    };
    let windows: Vec<_> = sample_windows(cfg, &panel)?
        .into_iter()
        .filter(|(label, _, _)| match filter {
            SampleFilter::All => true,
            SampleFilter::Full => *label == SampleLabel::Full,
            SampleFilter::Pre => *label == SampleLabel::PreBreak,
            SampleFilter::Post => *label == SampleLabel::PostBreak,
        })
        .collect();
    granger_table(&panel, &spec, &windows, mode)
}

/// Impulse responses of every non-shock variable to the shock variable, with
/// bootstrap bands.
pub struct IrfRun {
    pub result: IrfResult,
    pub shock: String,
    /// (variable name, shock index, response index) for each response panel.
    pub responses: Vec<(String, usize, usize)>,
    /// Hex prefix identifying the resolved configuration.
    pub config_tag: String,
}

pub fn irf_run(cfg: &PipelineConfig, irf_spec: &IrfSpec) -> Result<IrfRun> {
    let panel = var_panel(cfg)?;
    let spec = cfg.var_spec();
    let result = bootstrap_bands(&panel, &spec, irf_spec)?;
    let shock = cfg.shock_name().to_string();
    let shock_idx = result
        .ordering
        .iter()
        .position(|n| *n == shock)
        .ok_or_else(|| Error::Config("shock variable missing from ordering".into()))?;
    let responses = result
        .ordering
        .iter()
        .enumerate()
        .filter(|(_, n)| **n != shock)
        .map(|(i, n)| (n.clone(), shock_idx, i))
        .collect();
    Ok(IrfRun {
        result,
        shock,
        responses,
        config_tag: config_tag(cfg, irf_spec),
    })
}

/// Eight hex chars derived from the resolved config plus the effective IRF
/// settings; used to stamp output filenames deterministically.
pub fn config_tag(cfg: &PipelineConfig, irf_spec: &IrfSpec) -> String {
    let mut hasher = Sha256::new();
    hasher.update(cfg.to_toml().as_bytes());
    hasher.update(format!(
        "h={} ci={} reps={} seed={} shock={:?}",
        irf_spec.horizon,
        irf_spec.ci_level,
        irf_spec.bootstrap_reps,
        irf_spec.seed,
        irf_spec.shock_size
    ));
    let digest = hasher.finalize();
    digest[..4].iter().map(|b| format!("{b:02x}")).collect()
}

/// CSV body for one response panel: `h,point,lower,upper`.
pub fn irf_panel_csv(run: &IrfRun, shock_idx: usize, response_idx: usize) -> String {
    let r = &run.result;
    let mut out = String::from("h,point,lower,upper\n");
    for h in 0..=r.horizon {
        let point = r.point.get(shock_idx, response_idx, h);
        let lo = r
            .lower
            .as_ref()
            .map(|c| c.get(shock_idx, response_idx, h))
            .unwrap_or(point);
        let hi = r
            .upper
            .as_ref()
            .map(|c| c.get(shock_idx, response_idx, h))
            .unwrap_or(point);
        out.push_str(&format!("{h},{point:?},{lo:?},{hi:?}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn reference_config() -> PipelineConfig {
        let path = Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../configs/reference.toml");
        PipelineConfig::load(&path).unwrap()
    }

    #[test]
    fn reference_panel_has_five_variables_and_seventy_quarters() {
        let cfg = reference_config();
        let panel = var_panel(&cfg).unwrap();
        assert_eq!(panel.k(), 5);
        assert_eq!(panel.len(), 70);
        assert_eq!(panel.names()[0], "oil");
        assert_eq!(panel.start(), Period::new(2004, 2).unwrap());
        assert_eq!(panel.end(), Period::new(2021, 3).unwrap());
    }

    #[test]
    fn unit_root_table_covers_all_six_series() {
        let cfg = reference_config();
        let rows = unit_root_table(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        let names: Vec<&str> = rows.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, vec!["oil", "ipi", "growth", "fx", "cpi", "rate"]);
        assert_eq!(rows[0].level_label, "log(oil)");
        assert_eq!(rows[2].level_label, "growth");
    }

    #[test]
    fn sample_windows_cover_break() {
        let cfg = reference_config();
        let panel = var_panel(&cfg).unwrap();
        let w = sample_windows(&cfg, &panel).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w[1].2, Period::new(2008, 3).unwrap());
        assert_eq!(w[2].1, Period::new(2008, 4).unwrap());
    }

    #[test]
    fn config_tag_is_deterministic_and_seed_sensitive() {
        let cfg = reference_config();
        let a = config_tag(&cfg, &cfg.irf_spec(Some(1)));
        let b = config_tag(&cfg, &cfg.irf_spec(Some(1)));
        let c = config_tag(&cfg, &cfg.irf_spec(Some(2)));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 8);
    }
}
