//! The `macrovar` command line: unitroot | lagselect | granger | irf | report.
//!
//! Exit codes are a stable contract: 0 success, 2 config error, 3 data
//! error, 4 numerical failure. Every run echoes the fully resolved config
//! into the output directory; IRF outputs carry a deterministic tag derived
//! from it.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::ingest::PipelineConfig;
use crate::irf::IrfSpec;
use crate::pipeline::{self, SampleFilter};
use crate::svg::render_irf_panel;
use crate::table::{self, Format};

#[derive(Debug, Parser)]
#[command(
    name = "macrovar",
    about = "stationarity tests, VAR estimation, Granger causality and impulse responses for quarterly macro panels",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Text => Format::Text,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SampleArg {
    All,
    Full,
    Pre,
    Post,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ShockArg {
    OneSd,
    Unit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Conditional,
    Bivariate,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Pipeline configuration file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; defaults to the config's [output] dir.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Table format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ADF and KPSS tests for every configured series, levels and first
    /// differences.
    Unitroot(CommonArgs),
    /// Information-criteria comparison of VAR lag orders.
    Lagselect {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest lag order to compare.
        #[arg(long, default_value_t = 2)]
        max_lags: usize,
    },
    /// Granger causality Wald tests over the configured sample windows.
    Granger {
        #[command(flatten)]
        common: CommonArgs,
        /// Restrict to one sample window.
        #[arg(long, value_enum, default_value_t = SampleArg::All)]
        samples: SampleArg,
        /// Override the VAR lag order.
        #[arg(long)]
        lags: Option<usize>,
        /// Conditional (full system) or bivariate pairwise tests.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Impulse responses to the shock variable with bootstrap bands; writes
    /// one CSV and one SVG per response variable.
    Irf {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, value_enum)]
        shock: Option<ShockArg>,
    },
    /// Unit-root table, lag selection, causality tables and impulse
    /// responses in one run, plus a manifest.
    Report {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
    },
}

/// Run a parsed command, returning the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

struct Prepared {
    cfg: PipelineConfig,
    out_dir: PathBuf,
}

/// Load the config, apply the output-dir override, create the directory and
/// echo the resolved config into it.
fn prepare(common: &CommonArgs) -> Result<Prepared> {
    let cfg = PipelineConfig::load(&common.config)?;
    let out_dir = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    ensure_dir(&out_dir)?;
    Ok(Prepared { cfg, out_dir })
}

fn echo_config(cfg: &PipelineConfig, out_dir: &Path) -> Result<()> {
    write_file(&out_dir.join("config.resolved.toml"), &cfg.to_toml())
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Unitroot(common) => {
            let p = prepare(&common)?;
            echo_config(&p.cfg, &p.out_dir)?;
            let rows = pipeline::unit_root_table(&p.cfg)?;
            let rendered = table::render_unit_root(&rows, common.format.into());
            print!("{rendered}");
            let ext = match common.format {
                OutputFormat::Text => "txt",
                OutputFormat::Csv => "csv",
            };
            write_file(&p.out_dir.join(format!("unitroot.{ext}")), &rendered)
        }
        Command::Lagselect { common, max_lags } => {
            let p = prepare(&common)?;
            echo_config(&p.cfg, &p.out_dir)?;
            let t = pipeline::lag_selection(&p.cfg, max_lags)?;
            let rendered = table::render_lag_selection(&t, common.format.into());
            print!("{rendered}");
            let ext = match common.format {
                OutputFormat::Text => "txt",
                OutputFormat::Csv => "csv",
            };
            write_file(&p.out_dir.join(format!("lagselect.{ext}")), &rendered)
        }
        Command::Granger {
            common,
            samples,
            lags,
            mode,
        } => {
            let p = prepare(&common)?;
            let mut cfg = p.cfg;
            if let Some(m) = mode {
                cfg.var.granger_mode = match m {
                    ModeArg::Conditional => "conditional".into(),
                    ModeArg::Bivariate => "bivariate".into(),
                };
            }
            echo_config(&cfg, &p.out_dir)?;
            let filter = match samples {
                SampleArg::All => SampleFilter::All,
                SampleArg::Full => SampleFilter::Full,
                SampleArg::Pre => SampleFilter::Pre,
                SampleArg::Post => SampleFilter::Post,
            };
            let tables = pipeline::granger_grid(&cfg, lags, filter)?;
            let rendered = table::render_granger(&tables, common.format.into());
            print!("{rendered}");
            let ext = match common.format {
                OutputFormat::Text => "txt",
                OutputFormat::Csv => "csv",
            };
            write_file(&p.out_dir.join(format!("granger.{ext}")), &rendered)
        }
        Command::Irf {
            common,
            reps,
            seed,
            horizon,
            shock,
        } => {
            let p = prepare(&common)?;
            let mut cfg = p.cfg;
            apply_irf_overrides(&mut cfg, reps, seed, horizon, shock);
            echo_config(&cfg, &p.out_dir)?;
            let spec = cfg.irf_spec(None);
            let files = write_irf_outputs(&cfg, &spec, &p.out_dir)?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(())
        }
        Command::Report { common, seed, reps } => {
            let p = prepare(&common)?;
            let mut cfg = p.cfg;
            apply_irf_overrides(&mut cfg, reps, seed, None, None);
            echo_config(&cfg, &p.out_dir)?;
            run_report(&cfg, &p.out_dir)
        }
    }
}

fn apply_irf_overrides(
    cfg: &mut PipelineConfig,
    reps: Option<usize>,
    seed: Option<u64>,
    horizon: Option<usize>,
    shock: Option<ShockArg>,
) {
    if let Some(r) = reps {
        cfg.irf.replications = r;
    }
    if let Some(s) = seed {
        cfg.irf.seed = Some(s);
    }
    if let Some(h) = horizon {
        cfg.irf.horizon = h;
    }
    if let Some(sh) = shock {
        cfg.irf.shock_size = match sh {
            ShockArg::OneSd => "one-sd".into(),
            ShockArg::Unit => "unit".into(),
        };
    }
}

/// Compute the bootstrap IRF and write one CSV and one SVG per response.
fn write_irf_outputs(
    cfg: &PipelineConfig,
    spec: &IrfSpec,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let run = pipeline::irf_run(cfg, spec)?;
    let mut written = Vec::new();
    let scale = match spec.shock_size {
        crate::irf::ShockSize::OneSd => "one-sd",
        crate::irf::ShockSize::Unit => "unit",
    };
    for (name, shock_idx, response_idx) in &run.responses {
        let stem = format!(
            "irf_{}_to_{}_{}_{}",
            run.shock, name, scale, run.config_tag
        );
        let csv_path = out_dir.join(format!("{stem}.csv"));
        write_file(&csv_path, &pipeline::irf_panel_csv(&run, *shock_idx, *response_idx))?;
        written.push(csv_path);

        let r = &run.result;
        let point: Vec<f64> = (0..=r.horizon)
            .map(|h| r.point.get(*shock_idx, *response_idx, h))
            .collect();
        let lower: Vec<f64> = (0..=r.horizon)
            .map(|h| {
                r.lower
                    .as_ref()
                    .map(|c| c.get(*shock_idx, *response_idx, h))
                    .unwrap_or(point[h])
            })
            .collect();
        let upper: Vec<f64> = (0..=r.horizon)
            .map(|h| {
                r.upper
                    .as_ref()
                    .map(|c| c.get(*shock_idx, *response_idx, h))
                    .unwrap_or(point[h])
            })
            .collect();
        let title = format!(
            "response of {} to a {} {} shock ({}% band)",
            name,
            scale,
            run.shock,
            (r.ci_level * 100.0).round()
        );
        let svg_path = out_dir.join(format!("{stem}.svg"));
        write_file(&svg_path, &render_irf_panel(&title, &point, &lower, &upper))?;
        written.push(svg_path);
    }
    Ok(written)
}

/// unitroot -> lagselect -> granger -> irf (both shock scalings), then a run
/// manifest. Stops at the first stage whose preconditions fail.
fn run_report(cfg: &PipelineConfig, out_dir: &Path) -> Result<()> {
    let started = Instant::now();
    let mut outputs: Vec<String> = vec!["config.resolved.toml".into()];

    let rows = pipeline::unit_root_table(cfg)?;
    let unitroot_txt = table::render_unit_root(&rows, Format::Text);
    write_file(&out_dir.join("unitroot.txt"), &unitroot_txt)?;
    write_file(
        &out_dir.join("unitroot.csv"),
        &table::render_unit_root(&rows, Format::Csv),
    )?;
    outputs.push("unitroot.txt".into());
    outputs.push("unitroot.csv".into());
    print!("{unitroot_txt}");

    let lag_table = pipeline::lag_selection(cfg, 2)?;
    let lag_txt = table::render_lag_selection(&lag_table, Format::Text);
    write_file(&out_dir.join("lagselect.txt"), &lag_txt)?;
    outputs.push("lagselect.txt".into());
    println!();
    println!(
        "lag order: using p={} from the config; criteria comparison:",
        cfg.var.lags
    );
    print!("{lag_txt}");

    let granger = pipeline::granger_grid(cfg, None, SampleFilter::All)?;
    let granger_txt = table::render_granger(&granger, Format::Text);
    write_file(&out_dir.join("granger.txt"), &granger_txt)?;
    write_file(
        &out_dir.join("granger.csv"),
        &table::render_granger(&granger, Format::Csv),
    )?;
    outputs.push("granger.txt".into());
    outputs.push("granger.csv".into());
    println!();
    print!("{granger_txt}");

    // both shock scalings, same seed
    let mut irf_files = Vec::new();
    for scale in ["one-sd", "unit"] {
        let mut c = cfg.clone();
        c.irf.shock_size = scale.into();
        let spec = c.irf_spec(None);
        irf_files.extend(write_irf_outputs(&c, &spec, out_dir)?);
    }
    for f in &irf_files {
        outputs.push(
            f.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
        );
    }
    println!();
    println!("impulse response outputs:");
    for f in &irf_files {
        println!("  {}", f.display());
    }

    let spec = cfg.irf_spec(None);
    let manifest = format!(
        "macrovar {} report\nconfig echo: config.resolved.toml\nseed: {}\nbootstrap replications: {}\nhorizon: {}\nci level: {}\nwall time: {:.2}s\noutputs:\n{}\n",
        env!("CARGO_PKG_VERSION"),
        spec.seed,
        spec.bootstrap_reps,
        spec.horizon,
        spec.ci_level,
        started.elapsed().as_secs_f64(),
        outputs
            .iter()
            .map(|o| format!("  {o}"))
            .collect::<Vec<_>>()
            .join("\n")
    );
    write_file(&out_dir.join("manifest.txt"), &manifest)?;
    Ok(())
}
