use serde::Serialize;

use super::config::{validate_grid, Axis, Config, Metric, SnrAxis};
use crate::analytic::{self, Metrics};
use crate::channel::{derive_gains, SystemParams};
use crate::error::{Error, Result};
use crate::montecarlo::{self, McConfig, McMetrics};

/// A fully resolved parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub name: String,
    pub axis: Axis,
    pub grid: Vec<f64>,
    /// RIS sizes, one curve each. Ignored on the `n_elements` axis.
    pub overlays: Vec<usize>,
    pub base: SystemParams,
    pub mc: Option<McConfig>,
    pub snr_axis: SnrAxis,
    pub anchor_db: f64,
    pub metrics: Vec<Metric>,
}

impl SweepSpec {
    /// The explicit sweep described by the `[sweep]` section.
    pub fn from_config(cfg: &Config) -> Result<Self> {
        cfg.validate()?;
        let s = &cfg.sweep;
        Ok(SweepSpec {
            name: "sweep".into(),
            axis: s.axis,
            grid: cfg.grid(),
            overlays: s.overlays.clone(),
            base: cfg.params.clone(),
            mc: cfg.mc.active(),
            snr_axis: s.snr_axis,
            anchor_db: s.anchor_db,
            metrics: s.metrics.clone(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate_at("params")?;
        if let Some(mc) = &self.mc {
            mc.validate_at("mc")?;
        }
        validate_grid(self.axis, &self.grid)?;
        if self.axis != Axis::NElements && self.overlays.is_empty() {
            return Err(Error::invalid("sweep.overlays", "must list at least one RIS size"));
        }
        if self.metrics.is_empty() {
            return Err(Error::invalid("sweep.metrics", "must name at least one metric"));
        }
        if !self.anchor_db.is_finite() {
            return Err(Error::invalid("sweep.anchor_db", "must be finite"));
        }
        Ok(())
    }

    /// (label, RIS size) of every curve, in output order.
    pub fn curves(&self) -> Vec<(String, Option<usize>)> {
        match self.axis {
            Axis::NElements => vec![("base".into(), None)],
            _ => self.overlays.iter().map(|&n| (overlay_label(n), Some(n))).collect(),
        }
    }

    /// Scenario at axis value `x` on the curve with RIS size `overlay`.
    pub fn params_at(&self, x: f64, overlay: Option<usize>) -> Result<SystemParams> {
        let mut p = self.base.clone();
        if let Some(n) = overlay {
            p.n_elements = n;
        }
        match self.axis {
            Axis::SnrDb => {
                let db = match self.snr_axis {
                    SnrAxis::Transmit => p.transmit_snr_db() + (x - self.anchor_db),
                    SnrAxis::MeanSnr => transmit_db_for_mean_snr(&p, x)?,
                };
                p = p.with_transmit_snr_db(db);
            }
            Axis::NElements => p.n_elements = x as usize,
            Axis::DTl => p.d_tl = x,
        }
        Ok(p)
    }
}

pub fn overlay_label(n: usize) -> String {
    if n == 0 {
        "no_ris".into()
    } else {
        format!("N={n}")
    }
}

/// 10·log₁₀ of the analytic mean SNR.
pub fn mean_snr_db(params: &SystemParams) -> Result<f64> {
    let gains = derive_gains(params)?;
    Ok(10.0 * analytic::total_snr_moments(params, &gains).mean.log10())
}

/// Transmit SNR (dB) at which the analytic mean SNR equals `target_db`.
pub fn transmit_db_for_mean_snr(params: &SystemParams, target_db: f64) -> Result<f64> {
    let at = |db: f64| mean_snr_db(&params.with_transmit_snr_db(db)).map(|m| m - target_db);
    let (mut lo, mut hi) = (-300.0, 300.0);
    if at(lo)? > 0.0 || at(hi)? < 0.0 {
        return Err(Error::invalid("sweep.grid", format!("mean SNR {target_db} dB is out of reach")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One metric on one curve at one axis value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub axis_name: String,
    pub axis_value: f64,
    pub overlay_label: String,
    pub metric: Metric,
    pub analytic: f64,
    pub mc_value: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub n_trials: Option<u64>,
    pub seed: Option<u64>,
}

fn pick(m: &Metrics, metric: Metric) -> f64 {
    match metric {
        Metric::Op => m.op,
        Metric::Ber => m.ber,
        Metric::Ac => m.ac,
    }
}

fn pick_mc(m: &McMetrics, metric: Metric) -> montecarlo::McEstimate {
    match metric {
        Metric::Op => m.op,
        Metric::Ber => m.ber,
        Metric::Ac => m.ac,
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<CurvePoint>> {
    run_sweep_with(spec, |_, _| {})
}

/// As [`run_sweep`], calling `progress(done, total)` after every point.
pub fn run_sweep_with<P: FnMut(usize, usize)>(spec: &SweepSpec, mut progress: P) -> Result<Vec<CurvePoint>> {
    spec.validate()?;
    let curves = spec.curves();
    let total = curves.len() * spec.grid.len();
    let mut out = Vec::with_capacity(total * spec.metrics.len());
    let mut done = 0;
    for (label, overlay) in &curves {
        for &x in &spec.grid {
            let params = spec.params_at(x, *overlay)?;
            let a = analytic::analytic_metrics(&params)?;
            let mc = match &spec.mc {
                Some(cfg) => Some(montecarlo::estimate_metrics(&params, cfg)?),
                None => None,
            };
            for &metric in &spec.metrics {
                let est = mc.as_ref().map(|m| pick_mc(m, metric));
                out.push(CurvePoint {
                    axis_name: spec.axis.name().into(),
                    axis_value: x,
                    overlay_label: label.clone(),
                    metric,
                    analytic: pick(&a, metric),
                    mc_value: est.map(|e| e.value),
                    mc_stderr: est.map(|e| e.std_error),
                    n_trials: est.map(|e| e.n_trials),
                    seed: spec.mc.as_ref().map(|c| c.seed),
                });
            }
            done += 1;
            progress(done, total);
        }
    }
    Ok(out)
}

pub const PRESETS: [&str; 4] = ["fig2", "fig3", "fig4", "fig5"];

/// Figure presets: OP, BER and AC against the SNR axis, and AC against the
/// talker-listener distance at the configured operating point.
pub fn preset(name: &str, cfg: &Config) -> Result<SweepSpec> {
    let (axis, metric) = match name {
        "fig2" => (Axis::SnrDb, Metric::Op),
        "fig3" => (Axis::SnrDb, Metric::Ber),
        "fig4" => (Axis::SnrDb, Metric::Ac),
        "fig5" => (Axis::DTl, Metric::Ac),
        other => return Err(Error::Config(format!("unknown preset `{other}`"))),
    };
    let mut overlays = cfg.sweep.overlays.clone();
    if !overlays.contains(&0) {
        overlays.insert(0, 0);
    }
    Ok(SweepSpec {
        name: name.into(),
        axis,
        grid: axis.default_grid(),
        overlays,
        base: cfg.params.clone(),
        mc: cfg.mc.active(),
        snr_axis: cfg.sweep.snr_axis,
        anchor_db: cfg.sweep.anchor_db,
        metrics: vec![metric],
    })
}

/// Runs every preset, in order. The three SNR-axis presets share their
/// scenarios, so they are evaluated in one pass and split by metric.
pub fn run_figs<P: FnMut(&str, usize, usize)>(cfg: &Config, mut progress: P) -> Result<Vec<(String, Vec<CurvePoint>)>> {
    cfg.validate()?;
    let mut snr = preset("fig2", cfg)?;
    snr.metrics = vec![Metric::Op, Metric::Ber, Metric::Ac];
    let points = run_sweep_with(&snr, |d, t| progress("fig2-4", d, t))?;
    let mut out = Vec::new();
    for name in ["fig2", "fig3", "fig4"] {
        let metric = preset(name, cfg)?.metrics[0];
        let sel = points.iter().filter(|p| p.metric == metric).cloned().collect();
        out.push((name.to_string(), sel));
    }
    let spec = preset("fig5", cfg)?;
    let points = run_sweep_with(&spec, |d, t| progress("fig5", d, t))?;
    out.push(("fig5".to_string(), points));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analytic_only(mut cfg: Config) -> Config {
        cfg.mc.enabled = false;
        cfg
    }

    #[test]
    fn single_point_equals_direct_call() {
        let mut cfg = analytic_only(Config::default());
        cfg.sweep.grid = Some(vec![30.0]);
        cfg.sweep.overlays = vec![20];
        let pts = run_sweep(&SweepSpec::from_config(&cfg).unwrap()).unwrap();
        assert_eq!(pts.len(), 3);
        let direct = analytic::analytic_metrics(&SystemParams::default()).unwrap();
        assert_eq!(pts[0].analytic, direct.op);
        assert_eq!(pts[1].analytic, direct.ber);
        assert_eq!(pts[2].analytic, direct.ac);
        assert!(pts.iter().all(|p| p.mc_value.is_none() && p.seed.is_none()));
    }

    #[test]
    fn anchor_maps_to_operating_point() {
        let spec = preset("fig2", &Config::default()).unwrap();
        let p = spec.params_at(30.0, Some(20)).unwrap();
        assert!((p.transmit_snr_db() - 51.0).abs() < 1e-12);
        let p = spec.params_at(0.0, Some(20)).unwrap();
        assert!((p.transmit_snr_db() - 21.0).abs() < 1e-12);
    }

    #[test]
    fn mean_snr_axis_hits_target() {
        let mut cfg = Config::default();
        cfg.sweep.snr_axis = SnrAxis::MeanSnr;
        let spec = preset("fig4", &cfg).unwrap();
        for n in [0, 40] {
            let p = spec.params_at(5.0, Some(n)).unwrap();
            assert!((mean_snr_db(&p).unwrap() - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn distance_axis_touches_direct_path_only() {
        let spec = preset("fig5", &Config::default()).unwrap();
        let a = derive_gains(&spec.params_at(1.0, Some(40)).unwrap()).unwrap();
        let b = derive_gains(&spec.params_at(4.0, Some(40)).unwrap()).unwrap();
        assert_eq!(a.gbar_y, b.gbar_y);
        assert!((a.gbar_x / b.gbar_x - 4f64.powf(3.5)).abs() < 1e-9);
    }

    #[test]
    fn preset_row_counts() {
        let cfg = analytic_only(Config::default());
        let spec = preset("fig2", &cfg).unwrap();
        let pts = run_sweep(&spec).unwrap();
        assert_eq!(pts.len(), 31 * 5);
        assert!(pts.iter().all(|p| p.metric == Metric::Op));
        let pts = run_sweep(&preset("fig5", &cfg).unwrap()).unwrap();
        assert_eq!(pts.len(), 13 * 5);
        assert!(pts.iter().any(|p| p.overlay_label == "no_ris"));
    }

    #[test]
    fn baseline_always_present() {
        let mut cfg = analytic_only(Config::default());
        cfg.sweep.overlays = vec![10, 40];
        let spec = preset("fig3", &cfg).unwrap();
        assert_eq!(spec.overlays, vec![0, 10, 40]);
    }

    #[test]
    fn n_elements_axis() {
        let mut cfg = analytic_only(Config::default());
        cfg.sweep.axis = Axis::NElements;
        cfg.sweep.metrics = vec![Metric::Ac];
        let pts = run_sweep(&SweepSpec::from_config(&cfg).unwrap()).unwrap();
        assert_eq!(pts.len(), 9);
        assert!(pts.windows(2).all(|w| w[1].analytic > w[0].analytic));
    }

    #[test]
    fn shared_pass_matches_individual_presets() {
        let mut cfg = Config::default();
        cfg.mc.n_trials = 300;
        cfg.sweep.overlays = vec![0, 20];
        let figs = run_figs(&cfg, |_, _, _| {}).unwrap();
        assert_eq!(figs.len(), 4);
        for (name, points) in &figs {
            let own = run_sweep(&preset(name, &cfg).unwrap()).unwrap();
            assert_eq!(&own, points, "{name}");
        }
    }

    #[test]
    fn unknown_preset() {
        assert_eq!(preset("fig9", &Config::default()).unwrap_err().kind(), "config");
    }

    #[test]
    fn mc_fields_present_when_requested() {
        let mut cfg = Config::default();
        cfg.mc.n_trials = 500;
        cfg.sweep.grid = Some(vec![10.0, 20.0]);
        cfg.sweep.overlays = vec![0, 10];
        let pts = run_sweep(&SweepSpec::from_config(&cfg).unwrap()).unwrap();
        assert_eq!(pts.len(), 12);
        assert!(pts.iter().all(|p| p.mc_value.is_some() && p.n_trials == Some(500) && p.seed == Some(42)));
    }
}
