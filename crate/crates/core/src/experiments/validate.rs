//! Analytic-vs-simulation comparison over an SNR sweep.
//!
//! Each point is simulated twice: with the physical shared source link and
//! with an independent copy of it for the RIS term. A gamma law fitted to
//! the independent-mode sample moments isolates the error of the gamma
//! shape itself; the analytic curve passes when its gap to the
//! independent-mode estimate stays within that fit error plus four
//! standard errors.

use serde::Serialize;

use super::config::{Config, Metric};
use super::sweep::{overlay_label, preset, CurvePoint, SweepSpec};
use crate::analytic::{self, GammaApprox, Metrics};
use crate::channel::SourceMode;
use crate::error::Result;
use crate::montecarlo::{self, McConfig, McEstimate, McRun};

/// Sigma multiplier for the tracking test.
pub const SIGMA_BAND: f64 = 4.0;

#[derive(Debug, Clone, Serialize)]
pub struct ValidationPoint {
    pub axis_value: f64,
    pub overlay_label: String,
    pub metric: Metric,
    pub analytic: f64,
    pub shared: McEstimate,
    pub independent: McEstimate,
    /// Metric under a gamma law fitted to the independent-mode moments.
    pub empirical_fit: f64,
}

impl ValidationPoint {
    pub fn fit_error(&self) -> f64 {
        (self.empirical_fit - self.independent.value).abs()
    }

    pub fn tracks(&self) -> bool {
        (self.analytic - self.independent.value).abs() <= self.fit_error() + SIGMA_BAND * self.independent.std_error
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricSummary {
    pub metric: Metric,
    pub max_gap_shared: f64,
    pub max_gap_independent: f64,
    pub max_gap_shared_vs_independent: f64,
    pub max_fit_error: f64,
    pub points_tracking: usize,
    pub points_total: usize,
}

impl MetricSummary {
    pub fn tracking_ok(&self) -> bool {
        self.points_tracking == self.points_total
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub n_trials: u64,
    pub seed: u64,
    pub points: Vec<ValidationPoint>,
    pub summaries: Vec<MetricSummary>,
    pub monotonicity_violations: Vec<String>,
    pub ordering_violations: Vec<String>,
}

fn pick(m: &Metrics, metric: Metric) -> f64 {
    match metric {
        Metric::Op => m.op,
        Metric::Ber => m.ber,
        Metric::Ac => m.ac,
    }
}

fn pick_mc(run: &McRun, metric: Metric) -> McEstimate {
    match metric {
        Metric::Op => run.metrics.op,
        Metric::Ber => run.metrics.ber,
        Metric::Ac => run.metrics.ac,
    }
}

fn fitted_metrics(fit: Option<GammaApprox>, threshold: f64) -> Result<Metrics> {
    match fit {
        Some(f) => Ok(Metrics {
            op: analytic::outage_for_fit(&f, threshold),
            ber: analytic::ber_for_fit(&f)?,
            ac: analytic::ac_for_fit(&f)?,
        }),
        // All-zero sample: the point mass at γ = 0.
        None => Ok(Metrics {
            op: 1.0,
            ber: 0.5,
            ac: 0.0,
        }),
    }
}

/// Runs the comparison on the SNR-axis preset grid of `cfg`.
pub fn validation_report<P: FnMut(usize, usize)>(cfg: &Config, mut progress: P) -> Result<ValidationReport> {
    let mut spec = preset("fig2", cfg)?;
    spec.metrics = Metric::ALL.to_vec();
    let mc = cfg.mc.config();
    mc.validate_at("mc")?;
    let total = spec.overlays.len() * spec.grid.len();
    let mut points = Vec::new();
    let mut curves = Vec::new();
    let mut done = 0;
    for &n in &spec.overlays {
        for &x in &spec.grid {
            let params = spec.params_at(x, Some(n))?;
            let a = analytic::analytic_metrics(&params)?;
            let shared = montecarlo::simulate(&params, &with_mode(&mc, SourceMode::Shared))?;
            let indep = montecarlo::simulate(&params, &with_mode(&mc, SourceMode::Independent))?;
            let fit = analytic::fit_gamma(indep.snr.pair()).ok();
            let emp = fitted_metrics(fit, params.snr_threshold())?;
            for metric in Metric::ALL {
                points.push(ValidationPoint {
                    axis_value: x,
                    overlay_label: overlay_label(n),
                    metric,
                    analytic: pick(&a, metric),
                    shared: pick_mc(&shared, metric),
                    independent: pick_mc(&indep, metric),
                    empirical_fit: pick(&emp, metric),
                });
                curves.push(CurvePoint {
                    axis_name: spec.axis.name().into(),
                    axis_value: x,
                    overlay_label: overlay_label(n),
                    metric,
                    analytic: pick(&a, metric),
                    mc_value: None,
                    mc_stderr: None,
                    n_trials: None,
                    seed: None,
                });
            }
            done += 1;
            progress(done, total);
        }
    }
    let summaries = Metric::ALL
        .iter()
        .map(|&metric| {
            let sel: Vec<_> = points.iter().filter(|p| p.metric == metric).collect();
            let max = |f: &dyn Fn(&ValidationPoint) -> f64| sel.iter().map(|p| f(p)).fold(0.0, f64::max);
            MetricSummary {
                metric,
                max_gap_shared: max(&|p| (p.analytic - p.shared.value).abs()),
                max_gap_independent: max(&|p| (p.analytic - p.independent.value).abs()),
                max_gap_shared_vs_independent: max(&|p| (p.shared.value - p.independent.value).abs()),
                max_fit_error: max(&|p| p.fit_error()),
                points_tracking: sel.iter().filter(|p| p.tracks()).count(),
                points_total: sel.len(),
            }
        })
        .collect();
    Ok(ValidationReport {
        n_trials: mc.n_trials,
        seed: mc.seed,
        points,
        summaries,
        monotonicity_violations: monotonicity_violations(&spec, &curves),
        ordering_violations: ordering_violations(&spec, &curves),
    })
}

fn with_mode(mc: &McConfig, mode: SourceMode) -> McConfig {
    McConfig {
        source_mode: mode,
        ..mc.clone()
    }
}

fn analytic_at<'a>(curves: &'a [CurvePoint], label: &str, metric: Metric) -> Vec<&'a CurvePoint> {
    curves
        .iter()
        .filter(|p| p.overlay_label == label && p.metric == metric)
        .collect()
}

/// Grid steps where an analytic SNR curve moves the wrong way: OP and BER
/// must not increase with SNR, AC must not decrease.
pub fn monotonicity_violations(spec: &SweepSpec, curves: &[CurvePoint]) -> Vec<String> {
    let mut out = Vec::new();
    for (label, _) in spec.curves() {
        for metric in Metric::ALL {
            let pts = analytic_at(curves, &label, metric);
            for w in pts.windows(2) {
                let (a, b) = (w[0].analytic, w[1].analytic);
                let bad = match metric {
                    Metric::Op | Metric::Ber => b > a,
                    Metric::Ac => b < a,
                };
                if bad {
                    out.push(format!(
                        "{label} {}: {a:e} at {} -> {b:e} at {}",
                        metric.name(),
                        w[0].axis_value,
                        w[1].axis_value
                    ));
                }
            }
        }
    }
    out
}

/// Grid points where a larger RIS fails to be strictly better.
pub fn ordering_violations(spec: &SweepSpec, curves: &[CurvePoint]) -> Vec<String> {
    let mut sizes = spec.overlays.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let mut out = Vec::new();
    for metric in Metric::ALL {
        for pair in sizes.windows(2) {
            let lo = analytic_at(curves, &overlay_label(pair[0]), metric);
            let hi = analytic_at(curves, &overlay_label(pair[1]), metric);
            for (a, b) in lo.iter().zip(&hi) {
                let better = match metric {
                    Metric::Op | Metric::Ber => b.analytic < a.analytic,
                    Metric::Ac => b.analytic > a.analytic,
                };
                if !better {
                    out.push(format!(
                        "{} at {}: N={} gives {:e}, N={} gives {:e}",
                        metric.name(),
                        a.axis_value,
                        pair[0],
                        a.analytic,
                        pair[1],
                        b.analytic
                    ));
                }
            }
        }
    }
    out
}
