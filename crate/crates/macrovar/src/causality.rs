//! Block-exclusion Granger causality Wald tests.

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::dist::chi_square_upper_tail;
use crate::error::{Error, Result};
use crate::series::Period;
use crate::var::{fit_var, VarModel, VarSpec};

/// Which sample window a result belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleLabel {
    Full,
    PreBreak,
    PostBreak,
    Custom(String),
}

impl std::fmt::Display for SampleLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SampleLabel::Full => write!(f, "full"),
            SampleLabel::PreBreak => write!(f, "pre-break"),
            SampleLabel::PostBreak => write!(f, "post-break"),
            SampleLabel::Custom(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GrangerResult {
    pub cause: String,
    pub effect: String,
    /// Wald statistic, chi-square with `df` degrees of freedom under the null.
    pub chi2: f64,
    /// Number of excluded lag coefficients (= p).
    pub df: usize,
    pub pvalue: f64,
    pub sample_label: SampleLabel,
}

impl GrangerResult {
    /// Strongest conventional level at which the null is rejected.
    pub fn significant_at(&self) -> Option<f64> {
        if self.pvalue < 0.01 {
            Some(0.01)
        } else if self.pvalue < 0.05 {
            Some(0.05)
        } else if self.pvalue < 0.10 {
            Some(0.10)
        } else {
            None
        }
    }
}

/// Wald test that all `p` lag coefficients of `cause` in `effect`'s equation
/// are zero, using that equation's OLS coefficient covariance.
pub fn granger_wald(m: &VarModel, cause: &str, effect: &str) -> Result<GrangerResult> {
    if cause == effect {
        return Err(Error::Config(format!(
            "cause and effect must differ, got '{cause}' twice"
        )));
    }
    let ci = m
        .index_of(cause)
        .ok_or_else(|| Error::Config(format!("unknown variable '{cause}'")))?;
    let ei = m
        .index_of(effect)
        .ok_or_else(|| Error::Config(format!("unknown variable '{effect}'")))?;
    let est = m.estimation().ok_or_else(|| {
        Error::Config("model carries no estimation information (was it fitted?)".into())
    })?;
    let k = m.k();
    let p = m.lags();
    let offset = usize::from(m.include_constant());

    let restricted = DVector::from_fn(p, |lag, _| m.coef()[lag][(ei, ci)]);
    if restricted.iter().all(|v| *v == 0.0) {
        // exactly zero restrictions hold with certainty
        return Ok(GrangerResult {
            cause: cause.to_string(),
            effect: effect.to_string(),
            chi2: 0.0,
            df: p,
            pvalue: 1.0,
            sample_label: SampleLabel::Full,
        });
    }
    // covariance of the restricted coefficients: sigma2_eq * selected block
    let mut v = DMatrix::zeros(p, p);
    for a in 0..p {
        for b in 0..p {
            let ia = offset + a * k + ci;
            let ib = offset + b * k + ci;
            v[(a, b)] = est.sigma2[ei] * est.xtx_inv[(ia, ib)];
        }
    }
    let chol = v.cholesky().ok_or_else(|| {
        Error::NumericalDegeneracy("restricted coefficient covariance is singular".into())
    })?;
    let solved = chol.solve(&restricted);
    let chi2 = restricted.dot(&solved);
    let pvalue = chi_square_upper_tail(chi2, p);
    Ok(GrangerResult {
        cause: cause.to_string(),
        effect: effect.to_string(),
        chi2,
        df: p,
        pvalue,
        sample_label: SampleLabel::Full,
    })
}

/// Conditional tests run inside the full system; bivariate refits a two
/// variable VAR per pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrangerMode {
    Conditional,
    Bivariate,
}

/// Outcome of one hypothesis row; fit failures are isolated per row.
#[derive(Debug, Clone)]
pub enum GrangerOutcome {
    Stat(GrangerResult),
    Unavailable(String),
}

#[derive(Debug, Clone)]
pub struct SampleTable {
    pub label: SampleLabel,
    pub from: Period,
    pub to: Period,
    pub rows: Vec<GrangerOutcome>,
}

/// For each sample window: restrict the (already transformed) panel, fit the
/// VAR, and test both directions for every (shock, other) pair — first
/// shock -> other for each other variable, then the reverse block.
pub fn granger_table(
    d: &Dataset,
    spec: &VarSpec,
    samples: &[(SampleLabel, Period, Period)],
    mode: GrangerMode,
) -> Result<Vec<SampleTable>> {
    let shock = spec
        .ordering
        .first()
        .ok_or_else(|| Error::Config("empty ordering".into()))?
        .clone();
    let others: Vec<String> = spec
        .ordering
        .iter()
        .skip(1)
        .cloned()
        .collect();
    let mut tables = Vec::new();
    for (label, from, to) in samples {
        let mut rows = Vec::new();
        let sub = match d.subsample(*from, *to) {
            Ok(s) => s,
            Err(e) => {
                let msg = format!("sample unavailable: {e}");
                for _ in 0..2 * others.len() {
                    rows.push(GrangerOutcome::Unavailable(msg.clone()));
                }
                tables.push(SampleTable {
                    label: label.clone(),
                    from: *from,
                    to: *to,
                    rows,
                });
                continue;
            }
        };
        let hypotheses: Vec<(String, String)> = others
            .iter()
            .map(|o| (shock.clone(), o.clone()))
            .chain(others.iter().map(|o| (o.clone(), shock.clone())))
            .collect();
        match mode {
            GrangerMode::Conditional => {
                let fitted = fit_var(&sub, spec);
                for (cause, effect) in &hypotheses {
                    rows.push(run_row(&fitted, cause, effect, label));
                }
            }
            GrangerMode::Bivariate => {
                for (cause, effect) in &hypotheses {
                    let pair_spec = VarSpec {
                        lags: spec.lags,
                        include_constant: spec.include_constant,
                        ordering: vec![cause.clone(), effect.clone()],
                    };
                    let pair = sub
                        .select(&pair_spec.ordering)
                        .and_then(|ds| fit_var(&ds, &pair_spec));
                    rows.push(run_row(&pair, cause, effect, label));
                }
            }
        }
        tables.push(SampleTable {
            label: label.clone(),
            from: *from,
            to: *to,
            rows,
        });
    }
    Ok(tables)
}

fn run_row(
    fitted: &Result<VarModel>,
    cause: &str,
    effect: &str,
    label: &SampleLabel,
) -> GrangerOutcome {
    match fitted {
        Ok(m) => match granger_wald(m, cause, effect) {
            Ok(mut r) => {
                r.sample_label = label.clone();
                GrangerOutcome::Stat(r)
            }
            Err(e) => GrangerOutcome::Unavailable(e.to_string()),
        },
        Err(e) => GrangerOutcome::Unavailable(e.to_string()),
    }
}
