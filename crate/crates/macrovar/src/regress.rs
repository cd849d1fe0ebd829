//! Ordinary least squares via QR, with coefficient covariance and
//! information criteria. This is the estimation kernel behind the unit-root
//! regressions and every VAR equation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative rank tolerance: a column is flagged collinear when its R diagonal
/// falls below this times the largest column norm.
const RANK_TOL: f64 = 1e-10;

/// Named regressor matrix.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    names: Vec<String>,
    data: DMatrix<f64>,
}

impl DesignMatrix {
    pub fn from_columns(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() || columns.is_empty() {
            return Err(Error::Dataset(
                "design matrix needs one name per column".into(),
            ));
        }
        let n = columns[0].len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::Dataset("design matrix columns differ in length".into()));
        }
        let k = columns.len();
        let data = DMatrix::from_fn(n, k, |i, j| columns[j][i]);
        Ok(DesignMatrix { names, data })
    }

    pub fn from_matrix(names: Vec<String>, data: DMatrix<f64>) -> Result<Self> {
        if names.len() != data.ncols() {
            return Err(Error::Dataset(
                "design matrix needs one name per column".into(),
            ));
        }
        Ok(DesignMatrix { names, data })
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }
}

/// Output of [`ols`].
#[derive(Debug, Clone)]
pub struct RegressionResult {
    pub coefficients: DVector<f64>,
    pub stderr: DVector<f64>,
    pub residuals: DVector<f64>,
    /// Residual variance with the unbiased divisor (n - k).
    pub sigma2: f64,
    pub coef_cov: DMatrix<f64>,
    pub nobs: usize,
    pub df: usize,
    pub rss: f64,
    /// (X'X)^-1, shared by every equation fitted on the same regressors.
    pub xtx_inv: DMatrix<f64>,
}

impl RegressionResult {
    pub fn fitted(&self, x: &DesignMatrix) -> DVector<f64> {
        x.matrix() * &self.coefficients
    }
}

/// Least squares through a Householder QR factorization (never the normal
/// equations). Rank deficiency is reported with the offending column names.
pub fn ols(x: &DesignMatrix, y: &[f64]) -> Result<RegressionResult> {
    let n = x.nrows();
    let k = x.ncols();
    if y.len() != n {
        return Err(Error::Dataset(format!(
            "y has {} rows, X has {n}",
            y.len()
        )));
    }
    if n <= k {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {k} regressors"
        )));
    }
    let max_col_norm = (0..k)
        .map(|j| x.matrix().column(j).norm())
        .fold(0.0f64, f64::max);
    let qr = x.matrix().clone().qr();
    let q = qr.q();
    let r = qr.r();
    let tol = RANK_TOL * max_col_norm.max(f64::MIN_POSITIVE);
    let dependent: Vec<String> = (0..k)
        .filter(|&j| r[(j, j)].abs() <= tol)
        .map(|j| x.names()[j].clone())
        .collect();
    if !dependent.is_empty() {
        return Err(Error::Collinear { columns: dependent });
    }
    let yv = DVector::from_column_slice(y);
    let qty = q.transpose() * &yv;
    let coefficients = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::NumericalDegeneracy("upper-triangular solve failed".into()))?;
    let residuals = &yv - x.matrix() * &coefficients;
    let rss = residuals.dot(&residuals);
    let df = n - k;
    let sigma2 = rss / df as f64;
    // (X'X)^-1 = R^-1 R^-T
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::NumericalDegeneracy("R inversion failed".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let stderr = DVector::from_fn(k, |i, _| (sigma2 * xtx_inv[(i, i)]).max(0.0).sqrt());
    let coef_cov = xtx_inv.scale(sigma2);
    Ok(RegressionResult {
        coefficients,
        stderr,
        residuals,
        sigma2,
        coef_cov,
        nobs: n,
        df,
        rss,
        xtx_inv,
    })
}

/// Multivariate information criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InformationCriteria {
    pub aic: f64,
    pub bic: f64,
    pub hq: f64,
}

/// Criteria from an MLE residual covariance (divisor T), total parameter
/// count m and effective sample T:
/// aic = ln det(S) + 2m/T, bic = ln det(S) + m ln(T)/T,
/// hq = ln det(S) + 2m ln(ln T)/T.
pub fn information_criteria(
    sigma_mle: &DMatrix<f64>,
    nobs: usize,
    n_params: usize,
) -> Result<InformationCriteria> {
    if nobs <= n_params {
        return Err(Error::InsufficientData(format!(
            "criteria need nobs > n_params, got {nobs} <= {n_params}"
        )));
    }
    let chol = sigma_mle
        .clone()
        .cholesky()
        .ok_or_else(|| Error::DegenerateModel("residual covariance not positive definite".into()))?;
    let ln_det = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let t = nobs as f64;
    let m = n_params as f64;
    Ok(InformationCriteria {
        aic: ln_det + 2.0 * m / t,
        bic: ln_det + m * t.ln() / t,
        hq: ln_det + 2.0 * m * t.ln().ln() / t,
    })
}
