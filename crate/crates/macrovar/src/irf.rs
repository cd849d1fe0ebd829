//! Impulse response functions: MA inversion, Cholesky orthogonalization and
//! recursive-design residual bootstrap percentile bands.
//!
//! Bootstrap reproducibility: replication `i` draws from
//! `ChaCha8Rng::seed_from_u64(seed.wrapping_add(i))`. Replications are
//! independent given that rule and may run in any order; the percentile
//! reduction is order-free, so results are deterministic for a given seed.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::var::{fit_var, stability, VarModel, VarSpec};

/// Scale of the orthogonalized shock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShockSize {
    /// Columns of the Cholesky factor as-is: one-standard-deviation shocks.
    OneSd,
    /// Impact matrix rescaled to a unit diagonal.
    Unit,
}

#[derive(Debug, Clone)]
pub struct IrfSpec {
    /// Horizon H; responses run h = 0..=H.
    pub horizon: usize,
    /// Confidence level for percentile bands, in (0, 1).
    pub ci_level: f64,
    pub bootstrap_reps: usize,
    pub seed: u64,
    pub shock_size: ShockSize,
    /// Opt-in diagonal jitter (<= 1e-10 * max diagonal) when the residual
    /// covariance is not positive definite.
    pub ridge_on_non_pd: bool,
}

impl Default for IrfSpec {
    fn default() -> Self {
        IrfSpec {
            horizon: 8,
            ci_level: 0.95,
            bootstrap_reps: 1000,
            seed: 0,
            shock_size: ShockSize::OneSd,
            ridge_on_non_pd: false,
        }
    }
}

/// Dense [shock][response][h] array.
#[derive(Debug, Clone, PartialEq)]
pub struct IrfCube {
    k: usize,
    horizon: usize,
    data: Vec<f64>,
}

impl IrfCube {
    fn zeros(k: usize, horizon: usize) -> Self {
        IrfCube {
            k,
            horizon,
            data: vec![0.0; k * k * (horizon + 1)],
        }
    }

    fn idx(&self, shock: usize, response: usize, h: usize) -> usize {
        (shock * self.k + response) * (self.horizon + 1) + h
    }

    pub fn get(&self, shock: usize, response: usize, h: usize) -> f64 {
        self.data[self.idx(shock, response, h)]
    }

    fn set(&mut self, shock: usize, response: usize, h: usize, v: f64) {
        let i = self.idx(shock, response, h);
        self.data[i] = v;
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }
}

#[derive(Debug, Clone)]
pub struct IrfResult {
    pub point: IrfCube,
    pub lower: Option<IrfCube>,
    pub upper: Option<IrfCube>,
    /// Variable names in identification order.
    pub ordering: Vec<String>,
    pub shock_size: ShockSize,
    pub horizon: usize,
    pub ci_level: f64,
    /// Bootstrap replications that failed to refit or were unstable
    /// (skipped; bounded at 5% of the total).
    pub skipped_replications: usize,
}

/// MA coefficients of the fitted VAR: Phi_0 = I,
/// Phi_h = sum_{i=1..min(h,p)} Phi_{h-i} A_i.
pub fn ma_coefficients(m: &VarModel, horizon: usize) -> Vec<DMatrix<f64>> {
    let k = m.k();
    let p = m.lags();
    let mut phis = Vec::with_capacity(horizon + 1);
    phis.push(DMatrix::identity(k, k));
    for h in 1..=horizon {
        let mut phi = DMatrix::zeros(k, k);
        for i in 1..=h.min(p) {
            phi += &phis[h - i] * &m.coef()[i - 1];
        }
        phis.push(phi);
    }
    phis
}

fn cholesky_impact(m: &VarModel, spec: &IrfSpec) -> Result<DMatrix<f64>> {
    let sigma = m.sigma().clone();
    let chol = match sigma.clone().cholesky() {
        Some(c) => c,
        None => {
            if !spec.ridge_on_non_pd {
                return Err(Error::NotPositiveDefinite { ridge_hint: true });
            }
            let jitter = 1e-10 * sigma.diagonal().max();
            let ridged = &sigma + DMatrix::identity(m.k(), m.k()).scale(jitter);
            ridged
                .cholesky()
                .ok_or(Error::NotPositiveDefinite { ridge_hint: false })?
        }
    };
    let mut p = chol.l();
    if spec.shock_size == ShockSize::Unit {
        for j in 0..p.ncols() {
            let d = p[(j, j)];
            if d.abs() < f64::MIN_POSITIVE {
                return Err(Error::NumericalDegeneracy(
                    "zero diagonal in Cholesky factor".into(),
                ));
            }
            for i in 0..p.nrows() {
                p[(i, j)] /= d;
            }
        }
    }
    Ok(p)
}

fn theta_cube(m: &VarModel, spec: &IrfSpec) -> Result<IrfCube> {
    let k = m.k();
    let p = cholesky_impact(m, spec)?;
    let phis = ma_coefficients(m, spec.horizon);
    let mut cube = IrfCube::zeros(k, spec.horizon);
    for (h, phi) in phis.iter().enumerate() {
        let theta = phi * &p;
        for shock in 0..k {
            for response in 0..k {
                cube.set(shock, response, h, theta[(response, shock)]);
            }
        }
    }
    Ok(cube)
}

/// Point impulse responses to orthogonalized (Cholesky) shocks in the model's
/// variable ordering.
pub fn orthogonalized_irf(m: &VarModel, spec: &IrfSpec) -> Result<IrfResult> {
    let point = theta_cube(m, spec)?;
    Ok(IrfResult {
        point,
        lower: None,
        upper: None,
        ordering: m.names().to_vec(),
        shock_size: spec.shock_size,
        horizon: spec.horizon,
        ci_level: spec.ci_level,
        skipped_replications: 0,
    })
}

/// Linear-interpolation percentile of a sorted slice at probability q.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Recursive-design residual bootstrap percentile bands. Centered residual
/// rows are resampled with replacement, the sample is regenerated from the
/// actual initial `p` observations through the fitted dynamics, the model is
/// refit and the orthogonalized responses recomputed. Unstable or failing
/// replications are skipped and counted; more than 5% of them aborts.
pub fn bootstrap_bands(d: &Dataset, spec: &VarSpec, irf_spec: &IrfSpec) -> Result<IrfResult> {
    if irf_spec.bootstrap_reps < 100 {
        return Err(Error::Config(
            "bootstrap needs at least 100 replications for band output".into(),
        ));
    }
    if !(0.0 < irf_spec.ci_level && irf_spec.ci_level < 1.0) {
        return Err(Error::Config("ci_level must be inside (0, 1)".into()));
    }
    let base = fit_var(d, spec)?;
    let st = stability(&base);
    if !st.stable {
        return Err(Error::UnstableModel {
            max_modulus: st.max_modulus,
        });
    }
    let point = theta_cube(&base, irf_spec)?;
    let k = base.k();
    let p = base.lags();
    let ordered = d.select(&spec.ordering)?;
    let data = ordered.to_matrix();
    let t_total = data.nrows();
    let t_eff = base.nobs_effective();

    // center residual rows
    let resid = base.residuals().clone();
    let means: Vec<f64> = (0..k)
        .map(|j| resid.column(j).sum() / t_eff as f64)
        .collect();

    let h = irf_spec.horizon;
    let n_cells = k * k * (h + 1);
    let mut draws: Vec<Vec<f64>> = vec![Vec::with_capacity(irf_spec.bootstrap_reps); n_cells];
    let mut skipped = 0usize;

    for rep in 0..irf_spec.bootstrap_reps {
        let mut rng = ChaCha8Rng::seed_from_u64(irf_spec.seed.wrapping_add(rep as u64));
        let mut sim = DMatrix::zeros(t_total, k);
        for t in 0..p {
            for j in 0..k {
                sim[(t, j)] = data[(t, j)];
            }
        }
        for t in p..t_total {
            let row = rng.gen_range(0..t_eff);
            let mut next = base.intercept().clone();
            for lag in 1..=p {
                let prev = DVector::from_fn(k, |j, _| sim[(t - lag, j)]);
                next += &base.coef()[lag - 1] * prev;
            }
            for j in 0..k {
                sim[(t, j)] = next[j] + (resid[(row, j)] - means[j]);
            }
        }
        let sim_panel = rebuild_dataset(&ordered, &sim)?;
        let outcome = fit_var(&sim_panel, spec).and_then(|m| {
            if !stability(&m).stable {
                return Err(Error::UnstableModel {
                    max_modulus: stability(&m).max_modulus,
                });
            }
            theta_cube(&m, irf_spec)
        });
        match outcome {
            Ok(cube) => {
                for shock in 0..k {
                    for response in 0..k {
                        for hh in 0..=h {
                            let cell = (shock * k + response) * (h + 1) + hh;
                            draws[cell].push(cube.get(shock, response, hh));
                        }
                    }
                }
            }
            Err(_) => skipped += 1,
        }
    }
    if skipped * 20 > irf_spec.bootstrap_reps {
        return Err(Error::BootstrapUnstable {
            failed: skipped,
            total: irf_spec.bootstrap_reps,
        });
    }
    let q_lo = (1.0 - irf_spec.ci_level) / 2.0;
    let q_hi = (1.0 + irf_spec.ci_level) / 2.0;
    let mut lower = IrfCube::zeros(k, h);
    let mut upper = IrfCube::zeros(k, h);
    for shock in 0..k {
        for response in 0..k {
            for hh in 0..=h {
                let cell = (shock * k + response) * (h + 1) + hh;
                let mut v = draws[cell].clone();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                lower.set(shock, response, hh, percentile(&v, q_lo));
                upper.set(shock, response, hh, percentile(&v, q_hi));
            }
        }
    }
    Ok(IrfResult {
        point,
        lower: Some(lower),
        upper: Some(upper),
        ordering: base.names().to_vec(),
        shock_size: irf_spec.shock_size,
        horizon: h,
        ci_level: irf_spec.ci_level,
        skipped_replications: skipped,
    })
}

fn rebuild_dataset(template: &Dataset, values: &DMatrix<f64>) -> Result<Dataset> {
    use crate::series::TimeSeries;
    let series = template
        .series()
        .iter()
        .enumerate()
        .map(|(j, s)| {
            TimeSeries::new(
                s.name(),
                s.start(),
                (0..values.nrows()).map(|t| values[(t, j)]).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::align(series)
}
