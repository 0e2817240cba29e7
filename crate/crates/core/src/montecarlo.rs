//! Monte Carlo estimates of OP, BER and AC from simulated channel draws.
//!
//! Trials are grouped into fixed blocks of [`BLOCK`] consecutive indices.
//! Blocks run on the rayon pool, and their partial statistics are merged
//! in block order, so the floating-point result depends only on
//! (seed, n_trials).

use std::f64::consts::LN_2;

use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{GammaApprox, MomentPair};
use crate::channel::{sample_draw_into, trial_rng, ChannelDraw, Link, SnrForm, SourceMode, SystemParams};
use crate::error::{Error, Result};
use crate::specfun::q_function;

/// Trials per reduction block.
pub const BLOCK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub n_trials: u64,
    pub seed: u64,
    pub source_mode: SourceMode,
    pub snr_form: SnrForm,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_trials: 100_000,
            seed: 42,
            source_mode: SourceMode::Shared,
            snr_form: SnrForm::Exact,
        }
    }
}

impl McConfig {
    pub fn validate_at(&self, prefix: &str) -> Result<()> {
        if self.n_trials == 0 {
            let field = if prefix.is_empty() {
                "n_trials".to_string()
            } else {
                format!("{prefix}.n_trials")
            };
            return Err(Error::invalid(field, "must be at least 1"));
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McMetrics {
    pub op: McEstimate,
    pub ber: McEstimate,
    pub ac: McEstimate,
}

/// Sample mean and variance of γ with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalMoments {
    pub mean: McEstimate,
    pub variance: McEstimate,
}

impl EmpiricalMoments {
    pub fn pair(&self) -> MomentPair {
        MomentPair {
            mean: self.mean.value,
            variance: self.variance.value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McRun {
    pub metrics: McMetrics,
    pub snr: EmpiricalMoments,
}

/// Running central moments up to order four, mergeable across blocks.
#[derive(Debug, Clone, Copy, Default)]
struct Stats {
    n: f64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Stats {
    fn push(&mut self, x: f64) {
        let n1 = self.n;
        self.n += 1.0;
        let n = self.n;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let term = delta * dn * n1;
        self.mean += dn;
        self.m4 += term * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += term * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += term;
    }

    fn merge(&mut self, o: &Stats) {
        if o.n == 0.0 {
            return;
        }
        if self.n == 0.0 {
            *self = *o;
            return;
        }
        let (na, nb) = (self.n, o.n);
        let n = na + nb;
        let d = o.mean - self.mean;
        let d2 = d * d;
        let m2 = self.m2 + o.m2 + d2 * na * nb / n;
        let m3 = self.m3 + o.m3 + d * d2 * na * nb * (na - nb) / (n * n)
            + 3.0 * d * (na * o.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + o.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * o.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * d * (na * o.m3 - nb * self.m3) / n;
        self.mean += d * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
        self.n = n;
    }

    fn estimate(&self) -> McEstimate {
        let n = self.n;
        let std_error = if n > 1.0 {
            (self.m2 / (n - 1.0)).sqrt() / n.sqrt()
        } else {
            0.0
        };
        McEstimate {
            value: self.mean,
            std_error,
            n_trials: n as u64,
        }
    }

    fn variance_estimate(&self) -> McEstimate {
        let n = self.n;
        let var = if n > 1.0 { self.m2 / (n - 1.0) } else { 0.0 };
        let pop = self.m2 / n;
        let std_error = ((self.m4 / n - pop * pop).max(0.0) / n).sqrt();
        McEstimate {
            value: var,
            std_error,
            n_trials: n as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    op: Stats,
    ber: Stats,
    ac: Stats,
    snr: Stats,
}

impl Acc {
    fn push(&mut self, g: f64, threshold: f64) {
        self.op.push(if g <= threshold { 1.0 } else { 0.0 });
        self.ber.push(q_function((2.0 * g).sqrt()));
        self.ac.push(g.ln_1p() / LN_2);
        self.snr.push(g);
    }

    fn merge(&mut self, o: &Acc) {
        self.op.merge(&o.op);
        self.ber.merge(&o.ber);
        self.ac.merge(&o.ac);
        self.snr.merge(&o.snr);
    }

    fn finish(&self) -> McRun {
        McRun {
            metrics: McMetrics {
                op: self.op.estimate(),
                ber: self.ber.estimate(),
                ac: self.ac.estimate(),
            },
            snr: EmpiricalMoments {
                mean: self.snr.estimate(),
                variance: self.snr.variance_estimate(),
            },
        }
    }
}

/// Runs `n_trials` trials where `sample(state, i)` returns the SNR of trial
/// `i`. `init` builds per-block scratch state.
fn run<S, I, F>(n_trials: u64, threshold: f64, init: I, sample: F) -> McRun
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, u64) -> f64 + Sync,
{
    let blocks = n_trials.div_ceil(BLOCK);
    let partial: Vec<Acc> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut state = init();
            let mut acc = Acc::default();
            let end = ((b + 1) * BLOCK).min(n_trials);
            for i in b * BLOCK..end {
                acc.push(sample(&mut state, i), threshold);
            }
            acc
        })
        .collect();
    let mut total = Acc::default();
    for p in &partial {
        total.merge(p);
    }
    total.finish()
}

/// Metric estimators applied to an arbitrary per-trial SNR sampler.
pub fn estimate_from_sampler<F>(n_trials: u64, threshold: f64, sample: F) -> McRun
where
    F: Fn(u64) -> f64 + Sync,
{
    run(n_trials, threshold, || (), |_, i| sample(i))
}

/// Estimators fed with SNRs drawn straight from a gamma law, bypassing the
/// channel model.
pub fn estimate_from_fit(fit: &GammaApprox, threshold: f64, n_trials: u64, seed: u64) -> Result<McRun> {
    let dist = Gamma::new(fit.k, fit.theta).map_err(|_| Error::Degenerate("gamma law needs k > 0, theta > 0"))?;
    Ok(estimate_from_sampler(n_trials, threshold, |i| dist.sample(&mut trial_rng(seed, i))))
}

/// Full simulation with a caller-supplied channel generator; `fill` writes
/// the realization of trial `i` into the draw buffer.
pub fn simulate_with<F>(params: &SystemParams, cfg: &McConfig, fill: F) -> Result<McRun>
where
    F: Fn(&SystemParams, u64, &mut ChannelDraw) + Sync,
{
    params.validate()?;
    cfg.validate_at("")?;
    let link = Link::new(params)?;
    let threshold = params.snr_threshold();
    Ok(run(
        cfg.n_trials,
        threshold,
        ChannelDraw::default,
        |draw, i| {
            fill(params, i, draw);
            link.snr(draw, cfg.snr_form, cfg.source_mode)
        },
    ))
}

/// Simulates Rayleigh fading with ideal RIS phases; trial `i` uses the
/// random stream `trial_rng(seed, i)`.
pub fn simulate(params: &SystemParams, cfg: &McConfig) -> Result<McRun> {
    let seed = cfg.seed;
    simulate_with(params, cfg, |p, i, draw| sample_draw_into(p, &mut trial_rng(seed, i), draw))
}

pub fn estimate_metrics(params: &SystemParams, cfg: &McConfig) -> Result<McMetrics> {
    Ok(simulate(params, cfg)?.metrics)
}

pub fn empirical_snr_moments(params: &SystemParams, cfg: &McConfig) -> Result<EmpiricalMoments> {
    Ok(simulate(params, cfg)?.snr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u64, seed: u64) -> McConfig {
        McConfig {
            n_trials: n,
            seed,
            ..McConfig::default()
        }
    }

    #[test]
    fn stats_match_two_pass() {
        let xs: Vec<f64> = (0..10_000).map(|i| ((i * 37 % 101) as f64).powf(1.3) + 1e6).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let c = |p: i32| xs.iter().map(|x| (x - mean).powi(p)).sum::<f64>();
        let mut whole = Stats::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut merged = Stats::default();
        for chunk in xs.chunks(777) {
            let mut s = Stats::default();
            chunk.iter().for_each(|&x| s.push(x));
            merged.merge(&s);
        }
        for s in [whole, merged] {
            assert!((s.mean / mean - 1.0).abs() < 1e-13);
            assert!((s.m2 / c(2) - 1.0).abs() < 1e-9);
            assert!((s.m3 - c(3)).abs() < 1e-7 * c(3).abs().max(c(2).powf(1.5)));
            assert!((s.m4 / c(4) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_unit_trial() {
        let p = SystemParams {
            n_elements: 0,
            ..SystemParams::default()
        };
        let run = simulate_with(&p, &cfg(1, 5), |p, _, d| *d = ChannelDraw::unit(p.n_elements)).unwrap();
        let gx = Link::new(&p).unwrap().gains.gbar_x;
        assert!((run.snr.mean.value / gx - 1.0).abs() < 1e-14);
        assert_eq!(run.metrics.op.value, 0.0);
        assert_eq!(run.metrics.op.std_error, 0.0);
        let low = p.with_transmit_snr_db(-10.0);
        let run = simulate_with(&low, &cfg(1, 5), |p, _, d| *d = ChannelDraw::unit(p.n_elements)).unwrap();
        assert_eq!(run.metrics.op.value, 1.0);
    }

    #[test]
    fn rejects_zero_trials() {
        let err = simulate(&SystemParams::default(), &cfg(0, 1)).unwrap_err();
        assert_eq!(err.field(), Some("n_trials"));
    }

    #[test]
    fn deterministic_across_pools() {
        let p = SystemParams::default();
        let c = cfg(3 * BLOCK + 17, 99);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let a = one.install(|| simulate(&p, &c).unwrap());
        let b = many.install(|| simulate(&p, &c).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.metrics.ac.value.to_bits(), b.metrics.ac.value.to_bits());
    }

    #[test]
    fn power_scaling_per_trial() {
        let p = SystemParams::default().with_transmit_snr_db(10.0);
        let q = SystemParams::default().with_transmit_snr_db(30.0);
        let c = cfg(5000, 3);
        let a = simulate(&p, &c).unwrap();
        let b = simulate(&q, &c).unwrap();
        assert!((b.snr.mean.value / a.snr.mean.value / 100.0 - 1.0).abs() < 1e-10);
        assert!(b.metrics.op.value <= a.metrics.op.value);
    }

    #[test]
    fn estimates_within_ranges() {
        for db in [-20.0, 0.0, 30.0] {
            let p = SystemParams::default().with_transmit_snr_db(db);
            let m = estimate_metrics(&p, &cfg(2000, 8)).unwrap();
            assert!((0.0..=1.0).contains(&m.op.value));
            assert!((0.0..=0.5).contains(&m.ber.value));
            assert!(m.ac.value >= 0.0);
        }
    }

    #[test]
    fn direct_link_moments_without_ris() {
        // γ̄_x = 1: mean 1, variance 3 (|h|⁴ products of unit exponentials).
        let p = SystemParams {
            n_elements: 0,
            p_s_dbm: 0.0,
            noise_dbm: 0.0,
            d_tl: 1.0,
            ..SystemParams::default()
        };
        let m = empirical_snr_moments(&p, &cfg(400_000, 2)).unwrap();
        assert!((m.mean.value - 1.0).abs() < 3.0 * m.mean.std_error, "{m:?}");
        assert!((m.variance.value - 3.0).abs() < 3.0 * m.variance.std_error, "{m:?}");
    }

    #[test]
    fn std_error_halves_with_four_times_trials() {
        let p = SystemParams::default();
        let a = estimate_metrics(&p, &cfg(20_000, 4)).unwrap();
        let b = estimate_metrics(&p, &cfg(80_000, 4)).unwrap();
        let r = a.ac.std_error / b.ac.std_error;
        assert!((r - 2.0).abs() < 0.15, "{r}");
    }

    #[test]
    fn gamma_sampler_matches_fit_mean() {
        let fit = GammaApprox { k: 2.5, theta: 3.0 };
        let run = estimate_from_fit(&fit, 3.0, 100_000, 1).unwrap();
        assert!((run.snr.mean.value - 7.5).abs() < 4.0 * run.snr.mean.std_error);
    }
}
