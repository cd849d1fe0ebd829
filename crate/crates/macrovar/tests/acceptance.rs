//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities (run with --nocapture to see them).

use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use macrovar::causality::granger_wald;
use macrovar::dataset::Dataset;
use macrovar::ingest::PipelineConfig;
use macrovar::irf::{bootstrap_bands, orthogonalized_irf, IrfSpec};
use macrovar::pipeline;
use macrovar::series::{Period, TimeSeries};
use macrovar::unitroot::{
    adf_test, kpss_test, AdfLagSelection, AdfSpec, Bandwidth, Deterministic, KpssNull, KpssSpec,
};
use macrovar::var::{fit_var, VarModel, VarSpec};

fn reference_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml")
}

fn robustness_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/robustness.toml")
}

fn panel_from(names: &[&str], cols: Vec<Vec<f64>>) -> Dataset {
    let p0 = Period::new(2000, 1).unwrap();
    Dataset::align(
        names
            .iter()
            .zip(cols)
            .map(|(n, v)| TimeSeries::new(*n, p0, v).unwrap())
            .collect(),
    )
    .unwrap()
}

/// Criterion 1: noiseless VAR recovery.
#[test]
fn criterion_1_noiseless_var_recovery() {
    let started = Instant::now();
    let a = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.0, 0.3]);
    let t = 50;
    let mut data = vec![vec![1.0; t], vec![1.0; t]];
    let mut prev = DVector::from_vec(vec![1.0, 1.0]);
    for step in 1..t {
        let next = &a * &prev;
        data[0][step] = next[0];
        data[1][step] = next[1];
        prev = next;
    }
    let d = panel_from(&["a", "b"], data);
    let m = fit_var(&d, &VarSpec::new(1, vec!["a".into(), "b".into()])).unwrap();
    let mut max_err = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            max_err = max_err.max((m.coef()[0][(i, j)] - a[(i, j)]).abs());
        }
    }
    let max_sigma = m.sigma().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let elapsed = started.elapsed();
    assert!(max_err <= 1e-8, "coefficient error {max_err}");
    assert!(max_sigma <= 1e-16, "residual variance {max_sigma}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "PASS criterion 1: noiseless VAR recovery (max coef err {max_err:.2e}, max sigma {max_sigma:.2e}, {elapsed:?})"
    );
}

/// Criterion 2: analytic IRF equivalence against a brute-force matrix-power
/// oracle on 100 random stable VAR(1) models.
#[test]
fn criterion_2_analytic_irf_equivalence() {
    let started = Instant::now();

    // brute-force k x k multiply, independent of the production code path
    fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let k = a.len();
        let mut out = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    out[i][j] += a[i][l] * b[l][j];
                }
            }
        }
        out
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let k = 3;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let raw = DMatrix::from_fn(k, k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let sr = raw
            .complex_eigenvalues()
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        let target: f64 = rng.gen_range(0.2..0.95);
        let a = raw.scale(target / sr);
        // sigma built as L L' with known lower-triangular L, so L is the
        // exact Cholesky factor
        let mut l = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..=i {
                l[(i, j)] = if i == j {
                    rng.gen_range(0.5..2.0)
                } else {
                    rng.sample::<f64, _>(StandardNormal)
                };
            }
        }
        let sigma = &l * l.transpose();
        let m = VarModel::from_coefficients(
            (0..k).map(|i| format!("v{i}")).collect(),
            DVector::zeros(k),
            vec![a.clone()],
            sigma,
        )
        .unwrap();
        let r = orthogonalized_irf(&m, &IrfSpec::default()).unwrap();

        let a_vec: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| a[(i, j)]).collect())
            .collect();
        let l_vec: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| l[(i, j)]).collect())
            .collect();
        let mut power: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for h in 0..=8 {
            let theta = matmul(&power, &l_vec);
            for shock in 0..k {
                for resp in 0..k {
                    let got = r.point.get(shock, resp, h);
                    let want = theta[resp][shock];
                    worst = worst.max((got - want).abs());
                }
            }
            power = matmul(&a_vec, &power);
        }
    }
    let elapsed = started.elapsed();
    assert!(worst <= 1e-10, "worst deviation {worst:.2e}");
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("PASS criterion 2: analytic IRF equivalence (worst |diff| {worst:.2e}, {elapsed:?})");
}

/// Criterion 3: unit-root test size control.
#[test]
fn criterion_3_unit_root_size_control() {
    let started = Instant::now();
    let n = 200;
    let reps = 1000;
    let p0 = Period::new(2000, 1).unwrap();
    let adf_spec = AdfSpec {
        deterministic: Deterministic::Constant,
        max_lags: None,
        lag_selection: AdfLagSelection::Bic,
    };
    // the long bandwidth rule floor(12 * (n/100)^(1/4)); the short default
    // rule leaves the true rejection rate of an AR(0.5) at the 10% band edge
    let long_bw = (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
    let kpss_spec = KpssSpec {
        null_type: KpssNull::Level,
        bandwidth: Bandwidth::Fixed(long_bw),
    };
    let mut adf_rejections = 0;
    let mut kpss_rejections = 0;
    for rep in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + rep);
        let mut rw = vec![0.0; n];
        let mut ar = vec![0.0; n];
        for t in 1..n {
            rw[t] = rw[t - 1] + rng.sample::<f64, _>(StandardNormal);
            ar[t] = 0.5 * ar[t - 1] + rng.sample::<f64, _>(StandardNormal);
        }
        let rw = TimeSeries::new("rw", p0, rw).unwrap();
        let ar = TimeSeries::new("ar", p0, ar).unwrap();
        let a = adf_test(&rw, &adf_spec).unwrap();
        if a.statistic <= a.critical_values.five {
            adf_rejections += 1;
        }
        let k = kpss_test(&ar, &kpss_spec).unwrap();
        if k.statistic > k.critical_values.five {
            kpss_rejections += 1;
        }
    }
    let adf_rate = adf_rejections as f64 / reps as f64;
    let kpss_rate = kpss_rejections as f64 / reps as f64;
    let elapsed = started.elapsed();
    assert!(
        (0.02..=0.08).contains(&adf_rate),
        "ADF 5% rejection rate {adf_rate}"
    );
    assert!(
        (0.02..=0.10).contains(&kpss_rate),
        "KPSS 5% rejection rate {kpss_rate}"
    );
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "PASS criterion 3: size control (ADF {:.1}% in [2,8], KPSS {:.1}% in [2,10], {elapsed:?})",
        100.0 * adf_rate,
        100.0 * kpss_rate
    );
}

/// Criterion 4: Granger test power on the causal direction and size on the
/// reverse one.
#[test]
fn criterion_4_granger_power_and_size() {
    let started = Instant::now();
    let t = 1000;
    let reps = 200;
    let mut causal_hits = 0;
    let mut reverse_hits = 0;
    for rep in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(20_000 + rep);
        let x: Vec<f64> = (0..t).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let mut y = vec![0.0; t];
        for s in 1..t {
            y[s] = 0.8 * x[s - 1] + rng.sample::<f64, _>(StandardNormal);
        }
        let d = panel_from(&["x", "y"], vec![x, y]);
        let m = fit_var(&d, &VarSpec::new(1, vec!["x".into(), "y".into()])).unwrap();
        if granger_wald(&m, "x", "y").unwrap().pvalue < 0.001 {
            causal_hits += 1;
        }
        if granger_wald(&m, "y", "x").unwrap().pvalue < 0.05 {
            reverse_hits += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(
        causal_hits >= 198,
        "causal direction rejected at 0.1% in only {causal_hits}/200"
    );
    assert!(
        reverse_hits <= 20,
        "reverse direction rejected at 5% in {reverse_hits}/200"
    );
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "PASS criterion 4: granger power/size (causal {causal_hits}/200 at 0.1%, reverse {reverse_hits}/200 at 5%, {elapsed:?})"
    );
}

/// Criterion 5: bootstrap band coverage smoke test on a known VAR(1).
#[test]
fn criterion_5_bootstrap_coverage() {
    let started = Instant::now();
    let a = DMatrix::from_row_slice(3, 3, &[0.5, 0.1, 0.0, 0.1, 0.4, 0.1, 0.0, 0.2, 0.3]);
    let l = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.3, 0.9, 0.0, -0.2, 0.1, 0.8]);
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let t = 220;
    let mut data = vec![vec![0.0; t]; 3];
    let mut prev = DVector::<f64>::zeros(3);
    for step in 1..t {
        let eta = DVector::from_fn(3, |_, _| rng.sample::<f64, _>(StandardNormal));
        let next = &a * &prev + &l * eta;
        for j in 0..3 {
            data[j][step] = next[j];
        }
        prev = next;
    }
    let d = panel_from(&["x", "y", "z"], data);
    let spec = VarSpec::new(1, vec!["x".into(), "y".into(), "z".into()]);
    let irf_spec = IrfSpec {
        bootstrap_reps: 500,
        seed: 5,
        ..IrfSpec::default()
    };
    let r = bootstrap_bands(&d, &spec, &irf_spec).unwrap();
    let mut covered = 0;
    let mut power = DMatrix::identity(3, 3);
    for h in 0..=8 {
        let theta = &power * &l;
        for shock in 0..3 {
            for resp in 0..3 {
                let truth = theta[(resp, shock)];
                if r.lower.as_ref().unwrap().get(shock, resp, h) <= truth
                    && truth <= r.upper.as_ref().unwrap().get(shock, resp, h)
                {
                    covered += 1;
                }
            }
        }
        power = &power * &a;
    }
    let elapsed = started.elapsed();
    assert!(covered >= 74, "covered {covered}/81 cells");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("PASS criterion 5: bootstrap coverage ({covered}/81 cells, {elapsed:?})");
}

/// Criterion 6a: stationarity decision pattern on the bundled panel.
#[test]
fn criterion_6a_unit_root_star_pattern() {
    let cfg = PipelineConfig::load(&reference_config()).unwrap();
    let rows = pipeline::unit_root_table(&cfg).unwrap();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        assert!(
            row.diff_confirmed_stationary(),
            "first difference of '{}' not confirmed stationary (adf {:.3}, kpss {:.3})",
            row.name,
            row.diff_adf.statistic,
            row.diff_kpss.statistic
        );
        if row.name != "cpi" {
            assert!(
                !row.level_confirmed_stationary(),
                "level of '{}' unexpectedly confirmed stationary",
                row.name
            );
        }
    }
    println!("PASS criterion 6a: all six differenced series stationary at 1% by both tests; levels not confirmed stationary");
}

/// Criterion 6b: full-sample causality pattern and chi-square magnitudes.
#[test]
fn criterion_6b_granger_pattern() {
    let cfg = PipelineConfig::load(&reference_config()).unwrap();
    let tables = pipeline::granger_grid(&cfg, None, pipeline::SampleFilter::Full).unwrap();
    assert_eq!(tables.len(), 1);
    let rows = &tables[0].rows;
    assert_eq!(rows.len(), 8);
    let stat = |cause: &str, effect: &str| -> (f64, f64) {
        rows.iter()
            .find_map(|r| match r {
                macrovar::causality::GrangerOutcome::Stat(s)
                    if s.cause == cause && s.effect == effect =>
                {
                    Some((s.chi2, s.pvalue))
                }
                _ => None,
            })
            .unwrap()
    };
    // reported full-sample chi-square values, for the +-2.0 vintage check
    let reference: &[(&str, &str, f64, bool)] = &[
        ("oil", "ipi", 9.911, true),
        ("oil", "fx", 4.344, false),
        ("oil", "cpi", 1.871, false),
        ("oil", "rate", 2.960, false),
        ("ipi", "oil", 1.232, false),
        ("fx", "oil", 0.090, false),
        ("cpi", "oil", 10.364, true),
        ("rate", "oil", 1.232, false),
    ];
    for &(cause, effect, chi2_ref, significant) in reference {
        let (chi2, p) = stat(cause, effect);
        if significant {
            assert!(p < 0.05, "{cause}->{effect} p {p} not < 0.05");
        } else {
            assert!(p >= 0.05, "{cause}->{effect} p {p} unexpectedly < 0.05");
        }
        assert!(
            (chi2 - chi2_ref).abs() <= 2.0,
            "{cause}->{effect} chi2 {chi2:.3} not within 2.0 of {chi2_ref}"
        );
    }
    println!("PASS criterion 6b: full-sample causality split (oil->ipi and cpi->oil at 5%, six others not), chi2 within 2.0 of reference");
}

/// Criterion 6c: sign pattern of the h=1 responses to a one-sd oil shock.
#[test]
fn criterion_6c_irf_sign_pattern() {
    let cfg = PipelineConfig::load(&reference_config()).unwrap();
    let panel = pipeline::var_panel(&cfg).unwrap();
    let m = fit_var(&panel, &cfg.var_spec()).unwrap();
    let r = orthogonalized_irf(&m, &cfg.irf_spec(None)).unwrap();
    let idx = |name: &str| r.ordering.iter().position(|n| n == name).unwrap();
    let oil = idx("oil");
    let at_h1 = |name: &str| r.point.get(oil, idx(name), 1);
    assert!(at_h1("ipi") > 0.0, "ipi h1 {}", at_h1("ipi"));
    assert!(at_h1("fx") < 0.0, "fx h1 {}", at_h1("fx"));
    assert!(at_h1("cpi") < 0.0, "cpi h1 {}", at_h1("cpi"));
    assert!(at_h1("rate") < 0.0, "rate h1 {}", at_h1("rate"));
    println!(
        "PASS criterion 6c: h=1 one-sd oil shock signs (ipi {:+.4}, fx {:+.4}, cpi {:+.4}, rate {:+.4})",
        at_h1("ipi"),
        at_h1("fx"),
        at_h1("cpi"),
        at_h1("rate")
    );
}

/// Criterion 6d: growth response to an oil shock stays positive at h=1..3 in
/// the robustness configuration.
#[test]
fn criterion_6d_growth_robustness() {
    let cfg = PipelineConfig::load(&robustness_config()).unwrap();
    let panel = pipeline::var_panel(&cfg).unwrap();
    assert_eq!(panel.names()[1], "growth");
    let m = fit_var(&panel, &cfg.var_spec()).unwrap();
    let r = orthogonalized_irf(&m, &cfg.irf_spec(None)).unwrap();
    let oil = r.ordering.iter().position(|n| n == "oil").unwrap();
    let growth = r.ordering.iter().position(|n| n == "growth").unwrap();
    for h in 1..=3 {
        let v = r.point.get(oil, growth, h);
        assert!(v > 0.0, "growth response at h={h} is {v}");
    }
    println!(
        "PASS criterion 6d: growth response positive at h=1..3 ({:+.3}, {:+.3}, {:+.3})",
        r.point.get(oil, growth, 1),
        r.point.get(oil, growth, 2),
        r.point.get(oil, growth, 3)
    );
}

/// Criterion 6 runtime: the full report with 1000 bootstrap replications on
/// the bundled 70-observation panel finishes inside a minute.
#[test]
fn criterion_6_report_runtime() {
    let out = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_macrovar"))
        .args([
            "report",
            "--config",
            reference_config().to_str().unwrap(),
            "--out",
            out.path().to_str().unwrap(),
        ])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    let elapsed = started.elapsed();
    assert!(status.success());
    assert!(elapsed.as_secs_f64() < 60.0, "report took {elapsed:?}");
    assert!(out.path().join("manifest.txt").exists());
    println!("PASS criterion 6 runtime: full report in {elapsed:?} (< 60s)");
}

/// Criterion 7: byte-identical IRF CSVs across two runs with the same seed.
#[test]
fn criterion_7_irf_determinism() {
    let out_a = tempfile::tempdir().unwrap();
    let out_b = tempfile::tempdir().unwrap();
    for out in [&out_a, &out_b] {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_macrovar"))
            .args([
                "irf",
                "--config",
                reference_config().to_str().unwrap(),
                "--seed",
                "7",
                "--out",
                out.path().to_str().unwrap(),
            ])
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
    }
    let mut csvs: Vec<String> = std::fs::read_dir(out_a.path())
        .unwrap()
        .filter_map(|e| {
            let name = e.unwrap().file_name().into_string().unwrap();
            name.ends_with(".csv").then_some(name)
        })
        .collect();
    csvs.sort();
    assert_eq!(csvs.len(), 4, "expected 4 IRF panel CSVs, got {csvs:?}");
    let mut compared = 0;
    for name in &csvs {
        let a = std::fs::read(out_a.path().join(name)).unwrap();
        let b = std::fs::read(out_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
        compared += 1;
    }
    println!("PASS criterion 7: {compared} IRF CSVs byte-identical across reruns with seed 7");
}
