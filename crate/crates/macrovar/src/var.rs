//! VAR(p) estimation by equation-wise least squares, lag-order selection and
//! companion-matrix stability diagnostics.

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::regress::{self, DesignMatrix, InformationCriteria};

#[derive(Debug, Clone)]
pub struct VarSpec {
    /// Lag order, >= 1.
    pub lags: usize,
    pub include_constant: bool,
    /// Identification order; must be a permutation of the dataset variables.
    pub ordering: Vec<String>,
}

impl VarSpec {
    pub fn new(lags: usize, ordering: Vec<String>) -> Self {
        VarSpec {
            lags,
            include_constant: true,
            ordering,
        }
    }
}

/// Per-equation estimation details kept for Wald tests. Models built from
/// known coefficients (rather than fitted) do not carry this.
#[derive(Debug, Clone)]
pub struct Estimation {
    /// (X'X)^-1 for the common regressor matrix [1?, y_{t-1}, .., y_{t-p}].
    pub xtx_inv: DMatrix<f64>,
    /// Per-equation residual variance, unbiased divisor (T_eff - ncols).
    pub sigma2: Vec<f64>,
}

/// A fitted (or constructed) VAR(p).
#[derive(Debug, Clone)]
pub struct VarModel {
    names: Vec<String>,
    lags: usize,
    include_constant: bool,
    intercept: DVector<f64>,
    /// A_1..A_p, each k x k, row = equation, column = variable.
    coef: Vec<DMatrix<f64>>,
    /// (T - p) x k residual matrix (empty for constructed models).
    residuals: DMatrix<f64>,
    /// k x k residual covariance, MLE divisor (T - p).
    sigma: DMatrix<f64>,
    nobs_effective: usize,
    estimation: Option<Estimation>,
}

impl VarModel {
    /// Build a model directly from known dynamics, e.g. for analytic impulse
    /// responses or simulation. Carries no estimation information.
    pub fn from_coefficients(
        names: Vec<String>,
        intercept: DVector<f64>,
        coef: Vec<DMatrix<f64>>,
        sigma: DMatrix<f64>,
    ) -> Result<Self> {
        let k = names.len();
        if coef.is_empty() {
            return Err(Error::Config("need at least one lag matrix".into()));
        }
        if intercept.len() != k
            || sigma.nrows() != k
            || sigma.ncols() != k
            || coef.iter().any(|a| a.nrows() != k || a.ncols() != k)
        {
            return Err(Error::Config("coefficient shapes do not match k".into()));
        }
        Ok(VarModel {
            names,
            lags: coef.len(),
            include_constant: true,
            intercept,
            coef,
            residuals: DMatrix::zeros(0, k),
            sigma,
            nobs_effective: 0,
            estimation: None,
        })
    }

    /// Attach per-equation estimation details to a constructed model so that
    /// Wald tests can run on externally estimated coefficients.
    pub fn with_estimation(mut self, estimation: Estimation) -> Self {
        self.estimation = Some(estimation);
        self
    }

    pub fn k(&self) -> usize {
        self.names.len()
    }

    pub fn lags(&self) -> usize {
        self.lags
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn include_constant(&self) -> bool {
        self.include_constant
    }

    pub fn intercept(&self) -> &DVector<f64> {
        &self.intercept
    }

    pub fn coef(&self) -> &[DMatrix<f64>] {
        &self.coef
    }

    pub fn residuals(&self) -> &DMatrix<f64> {
        &self.residuals
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn nobs_effective(&self) -> usize {
        self.nobs_effective
    }

    pub fn estimation(&self) -> Option<&Estimation> {
        self.estimation.as_ref()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Common regressor matrix [1?, y_{t-1},..,y_{t-p}] with rows t = start..T-1.
fn lag_design(
    data: &DMatrix<f64>,
    names: &[String],
    p: usize,
    start: usize,
    include_constant: bool,
) -> Result<DesignMatrix> {
    let t_total = data.nrows();
    let k = data.ncols();
    let rows = t_total - start;
    let mut col_names = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    if include_constant {
        col_names.push("const".into());
        cols.push(vec![1.0; rows]);
    }
    for lag in 1..=p {
        for j in 0..k {
            col_names.push(format!("{}.l{lag}", names[j]));
            cols.push((start..t_total).map(|t| data[(t - lag, j)]).collect());
        }
    }
    DesignMatrix::from_columns(col_names, cols)
}

/// Fit a VAR(p) by running the same regressor matrix through one least
/// squares per equation.
pub fn fit_var(d: &Dataset, spec: &VarSpec) -> Result<VarModel> {
    if spec.lags == 0 {
        return Err(Error::Config("VAR lag order must be >= 1".into()));
    }
    let k = d.k();
    {
        let mut sorted_spec: Vec<&String> = spec.ordering.iter().collect();
        sorted_spec.sort();
        let mut sorted_data = d.names();
        sorted_data.sort();
        let spec_names: Vec<&str> = sorted_spec.iter().map(|s| s.as_str()).collect();
        if spec_names != sorted_data {
            return Err(Error::Config(format!(
                "ordering {:?} is not a permutation of dataset variables {:?}",
                spec.ordering,
                d.names()
            )));
        }
    }
    let ordered = d.select(&spec.ordering)?;
    let data = ordered.to_matrix();
    let t_total = data.nrows();
    let p = spec.lags;
    let t_eff = t_total.saturating_sub(p);
    if t_eff <= k * p + 1 + 10 {
        return Err(Error::InsufficientData(format!(
            "effective sample {t_eff} too small for k={k}, p={p} (need > {})",
            k * p + 1 + 10
        )));
    }
    let x = lag_design(&data, &spec.ordering, p, p, spec.include_constant)?;
    let mut intercept = DVector::zeros(k);
    let mut coef = vec![DMatrix::zeros(k, k); p];
    let mut residuals = DMatrix::zeros(t_eff, k);
    let mut sigma2 = Vec::with_capacity(k);
    let mut xtx_inv = None;
    for eq in 0..k {
        let y: Vec<f64> = (p..t_total).map(|t| data[(t, eq)]).collect();
        let fit = regress::ols(&x, &y)?;
        let offset = usize::from(spec.include_constant);
        if spec.include_constant {
            intercept[eq] = fit.coefficients[0];
        }
        for lag in 0..p {
            for j in 0..k {
                coef[lag][(eq, j)] = fit.coefficients[offset + lag * k + j];
            }
        }
        for (t, e) in fit.residuals.iter().enumerate() {
            residuals[(t, eq)] = *e;
        }
        sigma2.push(fit.sigma2);
        xtx_inv.get_or_insert(fit.xtx_inv);
    }
    let sigma = residuals.transpose() * &residuals / t_eff as f64;
    Ok(VarModel {
        names: spec.ordering.clone(),
        lags: p,
        include_constant: spec.include_constant,
        intercept,
        coef,
        residuals,
        sigma,
        nobs_effective: t_eff,
        estimation: Some(Estimation {
            xtx_inv: xtx_inv.unwrap(),
            sigma2,
        }),
    })
}

/// One row of the lag-selection table.
#[derive(Debug, Clone, Copy)]
pub struct LagCriteria {
    pub p: usize,
    pub criteria: InformationCriteria,
}

#[derive(Debug, Clone)]
pub struct LagSelectionTable {
    pub rows: Vec<LagCriteria>,
    pub best_aic: usize,
    pub best_bic: usize,
    pub best_hq: usize,
}

/// Compare candidate lag orders 1..=p_max on the common estimation sample
/// starting at t = p_max. Ties break toward the smaller order.
pub fn select_lag(d: &Dataset, p_max: usize, include_constant: bool) -> Result<LagSelectionTable> {
    if p_max < 1 {
        return Err(Error::Config("p_max must be >= 1".into()));
    }
    let k = d.k();
    let names: Vec<String> = d.names().iter().map(|s| s.to_string()).collect();
    let data = d.to_matrix();
    let t_total = data.nrows();
    let t_eff = t_total.saturating_sub(p_max);
    if t_eff <= k * p_max + 1 + 10 {
        return Err(Error::InsufficientData(format!(
            "effective sample {t_eff} too small for p_max={p_max} (need > {})",
            k * p_max + 1 + 10
        )));
    }
    let mut rows = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let x = lag_design(&data, &names, p, p_max, include_constant)?;
        let mut residuals = DMatrix::zeros(t_eff, k);
        for eq in 0..k {
            let y: Vec<f64> = (p_max..t_total).map(|t| data[(t, eq)]).collect();
            let fit = regress::ols(&x, &y)?;
            for (t, e) in fit.residuals.iter().enumerate() {
                residuals[(t, eq)] = *e;
            }
        }
        let sigma_mle = residuals.transpose() * &residuals / t_eff as f64;
        let m = k * (k * p + usize::from(include_constant));
        let criteria = regress::information_criteria(&sigma_mle, t_eff, m)?;
        rows.push(LagCriteria { p, criteria });
    }
    let argmin = |f: fn(&InformationCriteria) -> f64| {
        rows.iter()
            .enumerate()
            .fold((0usize, f64::INFINITY), |(bi, bv), (i, r)| {
                let v = f(&r.criteria);
                if v < bv - 1e-12 {
                    (i, v)
                } else {
                    (bi, bv)
                }
            })
            .0
    };
    Ok(LagSelectionTable {
        best_aic: rows[argmin(|c| c.aic)].p,
        best_bic: rows[argmin(|c| c.bic)].p,
        best_hq: rows[argmin(|c| c.hq)].p,
        rows,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Stability {
    pub max_modulus: f64,
    pub stable: bool,
}

/// Largest eigenvalue modulus of the kp x kp companion matrix.
pub fn stability(m: &VarModel) -> Stability {
    let k = m.k();
    let p = m.lags();
    let dim = k * p;
    let mut companion = DMatrix::zeros(dim, dim);
    for lag in 0..p {
        for i in 0..k {
            for j in 0..k {
                companion[(i, lag * k + j)] = m.coef()[lag][(i, j)];
            }
        }
    }
    for i in k..dim {
        companion[(i, i - k)] = 1.0;
    }
    let eigs = companion.complex_eigenvalues();
    let max_modulus = eigs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    Stability {
        max_modulus,
        stable: max_modulus < 1.0 - 1e-10,
    }
}
