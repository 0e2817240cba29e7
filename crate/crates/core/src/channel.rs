//! Physical channel layer: scenario parameters, Rayleigh fading draws and
//! the instantaneous SNR at the listener tag.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every physical input of a link scenario.
///
/// Powers are in dBm, distances in meters. `alpha`, `beta`, `delta1` and
/// `delta2` are the means of the squared fading amplitudes |h|² of the
/// source→talker, talker→listener, talker→RIS and RIS→listener links.
/// Defaults are the indoor operating point: P_s = 1 dBm, σ²_L = -50 dBm,
/// d_ST = d_TR = d_RL = 1 m, d_TL = 1.5 m, χ = 3.5, R_t = 2 bit/s/Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    pub p_s_dbm: f64,
    pub noise_dbm: f64,
    pub d_st: f64,
    pub d_tl: f64,
    pub d_tr: f64,
    pub d_rl: f64,
    pub chi: f64,
    pub n_elements: usize,
    pub alpha: f64,
    pub beta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub lambda_t: f64,
    pub r_t: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            p_s_dbm: 1.0,
            noise_dbm: -50.0,
            d_st: 1.0,
            d_tl: 1.5,
            d_tr: 1.0,
            d_rl: 1.0,
            chi: 3.5,
            n_elements: 20,
            alpha: 1.0,
            beta: 1.0,
            delta1: 1.0,
            delta2: 1.0,
            lambda_t: 1.0,
            r_t: 2.0,
        }
    }
}

impl SystemParams {
    /// Checks every invariant; `prefix` is prepended to field names in errors
    /// (e.g. `"params"` yields `params.d_tl`).
    pub fn validate_at(&self, prefix: &str) -> Result<()> {
        let field = |name: &str| {
            if prefix.is_empty() {
                name.to_string()
            } else {
                format!("{prefix}.{name}")
            }
        };
        let finite = [("p_s_dbm", self.p_s_dbm), ("noise_dbm", self.noise_dbm)];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(field(name), "must be finite"));
            }
        }
        let positive = [
            ("d_st", self.d_st),
            ("d_tl", self.d_tl),
            ("d_tr", self.d_tr),
            ("d_rl", self.d_rl),
            ("chi", self.chi),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("r_t", self.r_t),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(field(name), format!("must be a finite value > 0, got {v}")));
            }
        }
        if !(self.lambda_t > 0.0 && self.lambda_t <= 1.0) {
            return Err(Error::invalid(
                field("lambda_t"),
                format!("must lie in (0, 1], got {}", self.lambda_t),
            ));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at("")
    }

    /// Linear transmit SNR γ₀ = P_s / σ²_L.
    pub fn transmit_snr(&self) -> f64 {
        10f64.powf((self.p_s_dbm - self.noise_dbm) / 10.0)
    }

    pub fn transmit_snr_db(&self) -> f64 {
        self.p_s_dbm - self.noise_dbm
    }

    /// Copy with P_s moved so that γ₀ equals `db` (noise power unchanged).
    pub fn with_transmit_snr_db(&self, db: f64) -> Self {
        SystemParams {
            p_s_dbm: self.noise_dbm + db,
            ..self.clone()
        }
    }

    /// SNR threshold 2^{R_t} - 1.
    pub fn snr_threshold(&self) -> f64 {
        self.r_t.exp2() - 1.0
    }
}

/// Path-loss scaled gain factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedGains {
    /// γ₀ = P_s / σ²_L, linear.
    pub gamma0: f64,
    /// γ₀ / (d_ST^χ d_TL^χ)
    pub gbar_x: f64,
    /// γ₀ / (d_ST^χ d_TR^χ d_RL^χ)
    pub gbar_y: f64,
}

pub fn derive_gains(params: &SystemParams) -> Result<DerivedGains> {
    params.validate()?;
    Ok(gains_unchecked(params))
}

pub(crate) fn gains_unchecked(p: &SystemParams) -> DerivedGains {
    let gamma0 = p.transmit_snr();
    let st = p.d_st.powf(p.chi);
    DerivedGains {
        gamma0,
        gbar_x: gamma0 / (st * p.d_tl.powf(p.chi)),
        gbar_y: gamma0 / (st * p.d_tr.powf(p.chi) * p.d_rl.powf(p.chi)),
    }
}

/// Whether the RIS term sees the same source→talker fading as the direct
/// term (the physical link) or an independent copy of it (the assumption
/// behind the additive moment model).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceMode {
    #[default]
    Shared,
    Independent,
}

/// One realization of every fading amplitude and phase in the link.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelDraw {
    pub h_st: f64,
    /// Independent copy of h_ST, used only in [`SourceMode::Independent`].
    pub h_st_alt: f64,
    pub h_tl: f64,
    pub h_tr: Vec<f64>,
    pub h_rl: Vec<f64>,
    pub delta_ph: Vec<f64>,
    pub zeta_ph: Vec<f64>,
    pub phi_ph: Vec<f64>,
}

impl ChannelDraw {
    /// All amplitudes one, all phases zero.
    pub fn unit(n: usize) -> Self {
        ChannelDraw {
            h_st: 1.0,
            h_st_alt: 1.0,
            h_tl: 1.0,
            h_tr: vec![1.0; n],
            h_rl: vec![1.0; n],
            delta_ph: vec![0.0; n],
            zeta_ph: vec![0.0; n],
            phi_ph: vec![0.0; n],
        }
    }

    pub fn n_elements(&self) -> usize {
        self.h_tr.len()
    }

    /// Sets φ_n = δ_n + ζ_n (mod 2π) so every RIS path adds in phase.
    pub fn align_phases(&mut self) {
        for ((phi, d), z) in self.phi_ph.iter_mut().zip(&self.delta_ph).zip(&self.zeta_ph) {
            *phi = (d + z).rem_euclid(TAU);
        }
    }

    /// Ψ_n = φ_n - δ_n - ζ_n.
    pub fn residual_phase(&self, n: usize) -> f64 {
        self.phi_ph[n] - self.delta_ph[n] - self.zeta_ph[n]
    }

    fn source_amplitude(&self, mode: SourceMode) -> f64 {
        match mode {
            SourceMode::Shared => self.h_st,
            SourceMode::Independent => self.h_st_alt,
        }
    }
}

/// Random stream for Monte Carlo trial `trial` under `seed`.
///
/// ChaCha's 64-bit stream id is the trial index, so each trial's draw is a
/// pure function of (seed, trial) no matter which worker runs it.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn rayleigh<R: Rng + ?Sized>(rng: &mut R, mean_square: f64) -> f64 {
    let e: f64 = rng.sample(Exp1);
    (mean_square * e).sqrt()
}

/// Draws a fresh channel realization with ideal RIS phases.
pub fn sample_draw<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> ChannelDraw {
    let mut draw = ChannelDraw::default();
    sample_draw_into(params, rng, &mut draw);
    draw
}

/// In-place variant of [`sample_draw`] that reuses the buffers in `draw`.
///
/// Consumption order: h_ST, h_TL, alternate h_ST, then per element
/// (h_TR, h_RL, δ, ζ).
pub fn sample_draw_into<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R, draw: &mut ChannelDraw) {
    let n = params.n_elements;
    draw.h_st = rayleigh(rng, params.alpha);
    draw.h_tl = rayleigh(rng, params.beta);
    draw.h_st_alt = rayleigh(rng, params.alpha);
    draw.h_tr.clear();
    draw.h_rl.clear();
    draw.delta_ph.clear();
    draw.zeta_ph.clear();
    draw.phi_ph.clear();
    for _ in 0..n {
        draw.h_tr.push(rayleigh(rng, params.delta1));
        draw.h_rl.push(rayleigh(rng, params.delta2));
        let d = rng.random::<f64>() * TAU;
        let z = rng.random::<f64>() * TAU;
        draw.delta_ph.push(d);
        draw.zeta_ph.push(z);
        draw.phi_ph.push((d + z).rem_euclid(TAU));
    }
}

/// Which SNR expression to evaluate on a draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrForm {
    /// Complex RIS sum with the draw's actual phases.
    #[default]
    Exact,
    /// Co-phased amplitudes, Ψ_n = 0.
    Idealized,
}

/// Parameters and derived gains bundled for repeated SNR evaluation.
#[derive(Debug, Clone)]
pub struct Link {
    pub params: SystemParams,
    pub gains: DerivedGains,
    sqrt_gx: f64,
    sqrt_gy: f64,
    lambda_sq: f64,
}

impl Link {
    pub fn new(params: &SystemParams) -> Result<Self> {
        let gains = derive_gains(params)?;
        Ok(Link {
            params: params.clone(),
            gains,
            sqrt_gx: gains.gbar_x.sqrt(),
            sqrt_gy: gains.gbar_y.sqrt(),
            lambda_sq: params.lambda_t * params.lambda_t,
        })
    }

    /// λ_T² |√γ̄_x h_ST h_TL + √γ̄_y h_ST Σ h_TR,n h_RL,n e^{jΨ_n}|²
    pub fn snr_exact(&self, draw: &ChannelDraw, mode: SourceMode) -> f64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..draw.n_elements() {
            let amp = draw.h_tr[n] * draw.h_rl[n];
            sum += Complex64::from_polar(amp, draw.residual_phase(n));
        }
        let direct = self.sqrt_gx * draw.h_st * draw.h_tl;
        let total = sum * (self.sqrt_gy * draw.source_amplitude(mode)) + direct;
        self.lambda_sq * total.norm_sqr()
    }

    /// λ_T² [√γ̄_x h_ST h_TL + √γ̄_y h_ST Σ h_TR,n h_RL,n]²
    pub fn snr_idealized(&self, draw: &ChannelDraw, mode: SourceMode) -> f64 {
        let cascade: f64 = draw.h_tr.iter().zip(&draw.h_rl).map(|(a, b)| a * b).sum();
        let amp = self.sqrt_gx * draw.h_st * draw.h_tl + self.sqrt_gy * draw.source_amplitude(mode) * cascade;
        self.lambda_sq * amp * amp
    }

    pub fn snr(&self, draw: &ChannelDraw, form: SnrForm, mode: SourceMode) -> f64 {
        match form {
            SnrForm::Exact => self.snr_exact(draw, mode),
            SnrForm::Idealized => self.snr_idealized(draw, mode),
        }
    }
}

/// Instantaneous SNR with the draw's phases and a shared source link.
pub fn snr_exact(params: &SystemParams, draw: &ChannelDraw) -> Result<f64> {
    Ok(Link::new(params)?.snr_exact(draw, SourceMode::Shared))
}

/// Instantaneous SNR under ideal phase alignment and a shared source link.
pub fn snr_idealized(params: &SystemParams, draw: &ChannelDraw) -> Result<f64> {
    Ok(Link::new(params)?.snr_idealized(draw, SourceMode::Shared))
}
