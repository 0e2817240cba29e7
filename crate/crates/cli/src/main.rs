use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use bttn_core::analytic::{self, total_snr_moments};
use bttn_core::channel::{derive_gains, SourceMode};
use bttn_core::experiments::{emit, run_figs, run_sweep_with, validation_report, Config, Format, SweepSpec};
use bttn_core::montecarlo;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "bttn", version, about = "RIS-aided backscatter tag-to-tag link model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// TOML config; defaults apply to every missing key
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Output format for curve data (csv or json)
    #[arg(long, global = true, default_value = "csv")]
    format: String,
    /// Monte Carlo seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per point
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Draw an independent source link for the RIS term
    #[arg(long, global = true)]
    independent_source: bool,
    /// Skip Monte Carlo and emit analytic values only
    #[arg(long, global = true)]
    analytic_only: bool,
    /// Worker threads for the simulator (results do not depend on it)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Suppress progress output
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// All three metrics at the configured operating point
    Point,
    /// The sweep described in the config's [sweep] section
    Sweep,
    /// Every figure preset
    Figs,
    /// Analytic versus Monte Carlo comparison in both source modes
    Validate,
}

fn load_config(opts: &Opts) -> Result<Config> {
    let mut cfg = match &opts.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = opts.seed {
        cfg.mc.seed = seed;
    }
    if let Some(n) = opts.trials {
        cfg.mc.n_trials = n;
    }
    if opts.independent_source {
        cfg.mc.source_mode = SourceMode::Independent;
    }
    if opts.analytic_only {
        cfg.mc.enabled = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn progress(quiet: bool, label: &str, done: usize, total: usize) {
    if !quiet {
        eprint!("\r{label}: {done}/{total}");
        if done == total {
            eprintln!();
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run(cli: Cli) -> Result<()> {
    let opts = &cli.opts;
    let format: Format = opts.format.parse()?;
    if let Some(w) = opts.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .context("building worker pool")?;
    }
    let cfg = load_config(opts)?;
    match cli.command {
        Command::Point => {
            let params = &cfg.params;
            let gains = derive_gains(params)?;
            let moments = total_snr_moments(params, &gains);
            let fit = analytic::fit_gamma(moments)?;
            let metrics = analytic::analytic_metrics(params)?;
            let mc = match cfg.mc.active() {
                Some(mc) => Some(montecarlo::simulate(params, &mc)?),
                None => None,
            };
            let doc = json!({
                "params": params,
                "gains": gains,
                "snr_moments": moments,
                "fit": fit,
                "analytic": metrics,
                "monte_carlo": mc,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Command::Sweep => {
            let spec = SweepSpec::from_config(&cfg)?;
            let points = run_sweep_with(&spec, |d, t| progress(opts.quiet, "sweep", d, t))?;
            ensure_dir(&opts.out)?;
            let path = opts.out.join(format!("sweep.{}", format.extension()));
            emit(&points, format, &path)?;
            if !opts.quiet {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Figs => {
            ensure_dir(&opts.out)?;
            let figs = run_figs(&cfg, |name, d, t| progress(opts.quiet, name, d, t))?;
            for (name, points) in figs {
                let path = opts.out.join(format!("{name}.{}", format.extension()));
                emit(&points, format, &path)?;
                if !opts.quiet {
                    eprintln!("wrote {}", path.display());
                }
            }
        }
        Command::Validate => {
            let report = validation_report(&cfg, |d, t| progress(opts.quiet, "validate", d, t))?;
            ensure_dir(&opts.out)?;
            let path = opts.out.join("validation.json");
            let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            serde_json::to_writer_pretty(file, &report)?;
            let mut out = std::io::stdout().lock();
            writeln!(
                out,
                "{:<6} {:>14} {:>14} {:>14} {:>14} {:>9}",
                "metric", "gap_shared", "gap_indep", "shared_v_ind", "fit_error", "tracking"
            )?;
            for s in &report.summaries {
                writeln!(
                    out,
                    "{:<6} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>4}/{:<4}",
                    s.metric.name(),
                    s.max_gap_shared,
                    s.max_gap_independent,
                    s.max_gap_shared_vs_independent,
                    s.max_fit_error,
                    s.points_tracking,
                    s.points_total
                )?;
            }
            writeln!(
                out,
                "monotonicity violations: {}, ordering violations: {}",
                report.monotonicity_violations.len(),
                report.ordering_violations.len()
            )?;
            if !opts.quiet {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn error_record(err: &anyhow::Error) -> serde_json::Value {
    match err.downcast_ref::<bttn_core::Error>() {
        Some(e) => json!({
            "error": {
                "kind": e.kind(),
                "field": e.field(),
                "message": e.to_string(),
            }
        }),
        None => json!({
            "error": {
                "kind": "runtime",
                "field": null,
                "message": format!("{err:#}"),
            }
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", error_record(&err));
            let validation = matches!(
                err.downcast_ref::<bttn_core::Error>().map(|e| e.kind()),
                Some("validation" | "config")
            );
            ExitCode::from(if validation { 2 } else { 1 })
        }
    }
}
