//! Augmented Dickey-Fuller and KPSS stationarity tests with embedded
//! critical-value tables.
//!
//! ADF critical values use the standard response-surface constants
//! (MacKinnon 2010), a cubic in 1/n evaluated at the regression's effective
//! sample size. KPSS critical values are the standard asymptotic constants
//! (Kwiatkowski et al. 1992, Table 1); the test suite validates them by
//! Monte Carlo quantile estimation.

use crate::error::{Error, Result};
use crate::regress::{self, DesignMatrix};
use crate::series::TimeSeries;

/// Deterministic terms of the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deterministic {
    None,
    Constant,
    ConstantTrend,
}

/// Lag-order policy for the ADF regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdfLagSelection {
    Fixed(usize),
    Aic,
    Bic,
}

#[derive(Debug, Clone, Copy)]
pub struct AdfSpec {
    pub deterministic: Deterministic,
    /// Search bound for automatic selection; `None` means the Schwert rule
    /// floor(12 * (n/100)^(1/4)).
    pub max_lags: Option<usize>,
    pub lag_selection: AdfLagSelection,
}

impl AdfSpec {
    /// Pipeline default for level series.
    pub fn levels() -> Self {
        AdfSpec {
            deterministic: Deterministic::ConstantTrend,
            max_lags: None,
            lag_selection: AdfLagSelection::Bic,
        }
    }

    /// Pipeline default for differenced series.
    pub fn differences() -> Self {
        AdfSpec {
            deterministic: Deterministic::Constant,
            max_lags: None,
            lag_selection: AdfLagSelection::Bic,
        }
    }
}

/// Critical values at the 1/5/10% levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
}

#[derive(Debug, Clone)]
pub struct AdfResult {
    /// t-ratio on the lagged level coefficient.
    pub statistic: f64,
    pub lags_used: usize,
    pub deterministic: Deterministic,
    pub critical_values: CriticalValues,
    /// Strongest level (0.01/0.05/0.10) at which the unit root is rejected.
    pub reject_at: Option<f64>,
    /// Effective regression sample.
    pub nobs: usize,
}

impl AdfResult {
    /// Unit root rejected at 1% (the Table-2 star convention).
    pub fn stationary_at_1pct(&self) -> bool {
        self.statistic <= self.critical_values.one
    }
}

/// KPSS null: stationary around a constant or around a linear trend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KpssNull {
    Level,
    Trend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bandwidth {
    /// floor(4 * (n/100)^(1/4))
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct KpssSpec {
    pub null_type: KpssNull,
    pub bandwidth: Bandwidth,
}

impl Default for KpssSpec {
    fn default() -> Self {
        KpssSpec {
            null_type: KpssNull::Level,
            bandwidth: Bandwidth::Auto,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KpssResult {
    /// LM statistic, always >= 0.
    pub statistic: f64,
    pub bandwidth_used: usize,
    pub null_type: KpssNull,
    pub critical_values: CriticalValues,
    /// Strongest level at which stationarity is REJECTED (statistic above
    /// the threshold).
    pub reject_at: Option<f64>,
}

impl KpssResult {
    /// Stationarity not rejected at 1% (the Table-2 star convention).
    pub fn stationary_at_1pct(&self) -> bool {
        self.statistic <= self.critical_values.one
    }
}

// MacKinnon (2010) response-surface constants: cv = b0 + b1/n + b2/n^2 + b3/n^3.
const TAU_NC: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.94100, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
const TAU_C: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const TAU_CT: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

/// ADF critical values for an effective sample of `n` observations.
pub fn adf_critical_values(deterministic: Deterministic, n: usize) -> CriticalValues {
    let table = match deterministic {
        Deterministic::None => &TAU_NC,
        Deterministic::Constant => &TAU_C,
        Deterministic::ConstantTrend => &TAU_CT,
    };
    let nf = n as f64;
    let eval = |row: &[f64; 4]| row[0] + row[1] / nf + row[2] / (nf * nf) + row[3] / (nf * nf * nf);
    CriticalValues {
        one: eval(&table[0]),
        five: eval(&table[1]),
        ten: eval(&table[2]),
    }
}

/// KPSS asymptotic critical values (level: 0.347/0.463/0.739 at 10/5/1%;
/// trend: 0.119/0.146/0.216).
pub fn kpss_critical_values(null_type: KpssNull) -> CriticalValues {
    match null_type {
        KpssNull::Level => CriticalValues {
            one: 0.739,
            five: 0.463,
            ten: 0.347,
        },
        KpssNull::Trend => CriticalValues {
            one: 0.216,
            five: 0.146,
            ten: 0.119,
        },
    }
}

fn schwert_max_lags(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

fn has_variation(values: &[f64]) -> bool {
    let first = values[0];
    values.iter().any(|v| (v - first).abs() > 0.0)
}

/// Build the ADF regression for lag order `p` using rows t = start..n-1 of
/// the level series: dy_t on [1, trend?, y_{t-1}, dy_{t-1}.. dy_{t-p}].
fn adf_regression(
    y: &[f64],
    dy: &[f64],
    p: usize,
    start: usize,
    deterministic: Deterministic,
) -> Result<(DesignMatrix, Vec<f64>, usize)> {
    let n = y.len();
    let rows = n - start;
    let mut names = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    match deterministic {
        Deterministic::None => {}
        Deterministic::Constant => {
            names.push("const".into());
            cols.push(vec![1.0; rows]);
        }
        Deterministic::ConstantTrend => {
            names.push("const".into());
            cols.push(vec![1.0; rows]);
            names.push("trend".into());
            cols.push((1..=rows).map(|t| t as f64).collect());
        }
    }
    let level_idx = cols.len();
    names.push("level".into());
    cols.push((start..n).map(|t| y[t - 1]).collect());
    for i in 1..=p {
        names.push(format!("dlag{i}"));
        cols.push((start..n).map(|t| dy[t - 1 - i]).collect());
    }
    let target: Vec<f64> = (start..n).map(|t| dy[t - 1]).collect();
    let x = DesignMatrix::from_columns(names, cols)?;
    Ok((x, target, level_idx))
}

/// Augmented Dickey-Fuller test. Automatic lag orders are chosen on a common
/// estimation sample (all candidates start at t = max_lags + 1), then the
/// chosen order is refit on its maximal sample.
pub fn adf_test(s: &TimeSeries, spec: &AdfSpec) -> Result<AdfResult> {
    let y = s.values();
    let n = y.len();
    let max_lags = match spec.lag_selection {
        AdfLagSelection::Fixed(p) => p,
        _ => spec.max_lags.unwrap_or_else(|| schwert_max_lags(n)),
    };
    if n < 15 + max_lags {
        return Err(Error::TooShort {
            series: s.name().to_string(),
            needed: 15 + max_lags,
            have: n,
        });
    }
    if !has_variation(y) {
        return Err(Error::DegenerateInput(format!(
            "series '{}' is constant",
            s.name()
        )));
    }
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();

    let chosen = match spec.lag_selection {
        AdfLagSelection::Fixed(p) => p,
        sel => {
            let start = max_lags + 1;
            let mut best_p = 0usize;
            let mut best = f64::INFINITY;
            for p in 0..=max_lags {
                let (x, target, _) = adf_regression(y, &dy, p, start, spec.deterministic)?;
                let fit = regress::ols(&x, &target)?;
                let t = fit.nobs;
                let sigma_mle =
                    nalgebra::DMatrix::from_element(1, 1, (fit.rss / t as f64).max(f64::MIN_POSITIVE));
                let ic = regress::information_criteria(&sigma_mle, t, x.ncols())?;
                let crit = match sel {
                    AdfLagSelection::Aic => ic.aic,
                    _ => ic.bic,
                };
                if crit < best - 1e-12 {
                    best = crit;
                    best_p = p;
                }
            }
            best_p
        }
    };

    let (x, target, level_idx) = adf_regression(y, &dy, chosen, chosen + 1, spec.deterministic)?;
    let fit = regress::ols(&x, &target)?;
    let statistic = fit.coefficients[level_idx] / fit.stderr[level_idx];
    let critical_values = adf_critical_values(spec.deterministic, fit.nobs);
    let reject_at = if statistic <= critical_values.one {
        Some(0.01)
    } else if statistic <= critical_values.five {
        Some(0.05)
    } else if statistic <= critical_values.ten {
        Some(0.10)
    } else {
        None
    };
    Ok(AdfResult {
        statistic,
        lags_used: chosen,
        deterministic: spec.deterministic,
        critical_values,
        reject_at,
        nobs: fit.nobs,
    })
}

/// Bartlett-kernel long-run variance: g0 + 2 * sum_j (1 - j/(bw+1)) g_j with
/// autocovariances over divisor n.
pub fn newey_west_lrv(residuals: &[f64], bandwidth: usize) -> Result<f64> {
    let n = residuals.len();
    if bandwidth >= n {
        return Err(Error::Config(format!(
            "bandwidth {bandwidth} must be below the sample size {n}"
        )));
    }
    let nf = n as f64;
    let mut lrv = residuals.iter().map(|e| e * e).sum::<f64>() / nf;
    for j in 1..=bandwidth {
        let gj = (j..n).map(|t| residuals[t] * residuals[t - j]).sum::<f64>() / nf;
        lrv += 2.0 * (1.0 - j as f64 / (bandwidth as f64 + 1.0)) * gj;
    }
    Ok(lrv.max(0.0))
}

/// KPSS stationarity test: scaled sum of squared partial sums of the
/// detrending residuals over a Newey-West long-run variance.
pub fn kpss_test(s: &TimeSeries, spec: &KpssSpec) -> Result<KpssResult> {
    let y = s.values();
    let n = y.len();
    if n < 15 {
        return Err(Error::TooShort {
            series: s.name().to_string(),
            needed: 15,
            have: n,
        });
    }
    if let Bandwidth::Fixed(bw) = spec.bandwidth {
        if bw >= n {
            return Err(Error::Config(format!(
                "fixed bandwidth {bw} must be below the series length {n}"
            )));
        }
    }
    let residuals: Vec<f64> = match spec.null_type {
        KpssNull::Level => {
            let mean = y.iter().sum::<f64>() / n as f64;
            y.iter().map(|v| v - mean).collect()
        }
        KpssNull::Trend => {
            let x = DesignMatrix::from_columns(
                vec!["const".into(), "trend".into()],
                vec![vec![1.0; n], (1..=n).map(|t| t as f64).collect()],
            )?;
            let fit = regress::ols(&x, y)?;
            fit.residuals.iter().copied().collect()
        }
    };
    let y_scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if residuals.iter().all(|e| e.abs() <= 1e-12 * y_scale) {
        return Err(Error::DegenerateInput(format!(
            "series '{}' is perfectly deterministic",
            s.name()
        )));
    }
    let bw = match spec.bandwidth {
        Bandwidth::Auto => (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize,
        Bandwidth::Fixed(bw) => bw,
    };
    let lrv = newey_west_lrv(&residuals, bw)?;
    if lrv <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "zero long-run variance for series '{}'",
            s.name()
        )));
    }
    let mut acc = 0.0;
    let mut sum_s2 = 0.0;
    for e in &residuals {
        acc += e;
        sum_s2 += acc * acc;
    }
    let statistic = sum_s2 / ((n * n) as f64 * lrv);
    let critical_values = kpss_critical_values(spec.null_type);
    let reject_at = if statistic > critical_values.one {
        Some(0.01)
    } else if statistic > critical_values.five {
        Some(0.05)
    } else if statistic > critical_values.ten {
        Some(0.10)
    } else {
        None
    };
    Ok(KpssResult {
        statistic,
        bandwidth_used: bw,
        null_type: spec.null_type,
        critical_values,
        reject_at,
    })
}
