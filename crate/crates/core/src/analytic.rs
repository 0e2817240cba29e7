//! Moment-matching model of the received SNR and the closed-form metrics
//! built on it.
//!
//! The direct product link and the RIS cascade each contribute a mean and a
//! variance. The two contributions are added as if independent, and a gamma
//! distribution with the same first two moments is used for the total SNR.
//! Outage probability, bit error rate and average capacity then follow from
//! that gamma law.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::channel::{derive_gains, DerivedGains, SystemParams};
use crate::error::{Error, Result};
use crate::specfun::{self, expect_under_gamma, lgamma, q_function, QuadSpec};

/// π² / 16, the squared mean of a product of two unit Rayleigh amplitudes.
const PI2_16: f64 = PI * PI / 16.0;

/// Relative agreement required between the quadrature and Meijer-G paths.
pub const CROSS_CHECK_TOL: f64 = 1e-8;

/// Mean and variance of a nonnegative random variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
}

impl MomentPair {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(mean >= 0.0) || !mean.is_finite() {
            return Err(Error::invalid("mean", format!("must be finite and >= 0, got {mean}")));
        }
        if !(variance >= 0.0) || !variance.is_finite() {
            return Err(Error::invalid("variance", format!("must be finite and >= 0, got {variance}")));
        }
        Ok(MomentPair { mean, variance })
    }

    pub fn add_independent(self, other: MomentPair) -> MomentPair {
        MomentPair {
            mean: self.mean + other.mean,
            variance: self.variance + other.variance,
        }
    }
}

/// Moments of X₁X₂ for independent X₁, X₂.
pub fn product_moments(a: MomentPair, b: MomentPair) -> MomentPair {
    MomentPair {
        mean: a.mean * b.mean,
        variance: a.variance * b.variance + a.variance * b.mean * b.mean + b.variance * a.mean * a.mean,
    }
}

/// Moments of the direct-path SNR γ̄_x |h_ST|² |h_TL|².
pub fn direct_link_moments(params: &SystemParams, gains: &DerivedGains) -> MomentPair {
    let m = gains.gbar_x * params.alpha * params.beta;
    MomentPair {
        mean: m,
        variance: 3.0 * m * m,
    }
}

/// Gamma model of the RIS cascade Y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RisSumGamma {
    pub n_elements: usize,
    pub k_prime: f64,
    pub theta_prime: f64,
}

impl RisSumGamma {
    /// E[Y] = k′θ′ = Nπ√(γ̄_y δ₁ δ₂)/4.
    pub fn mean(&self) -> f64 {
        self.k_prime * self.theta_prime
    }

    /// V[Y] = k′θ′² = N γ̄_y δ₁ δ₂ (16 - π²)/16.
    pub fn variance(&self) -> f64 {
        self.k_prime * self.theta_prime * self.theta_prime
    }

    pub fn moments(&self) -> MomentPair {
        MomentPair {
            mean: self.mean(),
            variance: self.variance(),
        }
    }

    fn outer_shape(&self) -> f64 {
        self.n_elements as f64 * self.k_prime
    }

    /// f_Y(y) = y^{(Nk′-2)/2} e^{-√y/θ′} / (2 θ′^{Nk′} Γ(Nk′)).
    ///
    /// This is the density of U² for U ~ Gamma(Nk′, θ′), and its moments are
    /// not the (E[Y], V[Y]) pair above.
    pub fn pdf(&self, y: f64) -> f64 {
        if !(y > 0.0) {
            return 0.0;
        }
        let a = self.outer_shape();
        let ln = 0.5 * (a - 2.0) * y.ln() - y.sqrt() / self.theta_prime
            - LN_2
            - a * self.theta_prime.ln()
            - lgamma(a);
        ln.exp()
    }

    /// F_Y(y) = P(Nk′, √y/θ′).
    pub fn cdf(&self, y: f64) -> f64 {
        if !(y > 0.0) {
            return 0.0;
        }
        if y.is_infinite() {
            return 1.0;
        }
        specfun::inc_gamma_pq(self.outer_shape(), y.sqrt() / self.theta_prime).0
    }
}

pub fn ris_sum_gamma(params: &SystemParams, gains: &DerivedGains) -> Result<RisSumGamma> {
    if params.n_elements == 0 {
        return Err(Error::Degenerate("RIS cascade needs at least one element"));
    }
    let n = params.n_elements as f64;
    let spread = 16.0 - PI * PI;
    Ok(RisSumGamma {
        n_elements: params.n_elements,
        k_prime: n * PI * PI / spread,
        theta_prime: spread * (gains.gbar_y * params.delta1 * params.delta2).sqrt() / (4.0 * PI),
    })
}

/// Moments of γ_y = |h_ST|² Y.
pub fn ris_link_moments(params: &SystemParams, gains: &DerivedGains) -> Result<MomentPair> {
    let y = ris_sum_gamma(params, gains)?;
    let n = params.n_elements as f64;
    let a = params.alpha;
    let g = gains.gbar_y * params.delta1 * params.delta2;
    Ok(MomentPair {
        mean: a * y.mean(),
        variance: a * a * n * g * (2.0 + (n - 2.0) * PI2_16),
    })
}

/// Moments of the total SNR, treating the two links as independent.
/// Without RIS elements only the direct link remains.
pub fn total_snr_moments(params: &SystemParams, gains: &DerivedGains) -> MomentPair {
    let direct = direct_link_moments(params, gains);
    let sum = match ris_link_moments(params, gains) {
        Ok(ris) => direct.add_independent(ris),
        Err(_) => direct,
    };
    // Backscatter loss scales the received power of both links alike.
    let l2 = params.lambda_t * params.lambda_t;
    MomentPair {
        mean: l2 * sum.mean,
        variance: l2 * l2 * sum.variance,
    }
}

/// Gamma law fitted by moments, E = kθ, V = kθ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaApprox {
    pub k: f64,
    pub theta: f64,
}

impl GammaApprox {
    pub fn mean(&self) -> f64 {
        self.k * self.theta
    }

    pub fn variance(&self) -> f64 {
        self.k * self.theta * self.theta
    }
}

pub fn fit_gamma(m: MomentPair) -> Result<GammaApprox> {
    if !(m.mean > 0.0) || !m.mean.is_finite() {
        return Err(Error::Degenerate("gamma fit needs a positive finite mean"));
    }
    if !(m.variance > 0.0) || !m.variance.is_finite() {
        return Err(Error::Degenerate("gamma fit needs a positive finite variance"));
    }
    Ok(GammaApprox {
        k: m.mean * m.mean / m.variance,
        theta: m.variance / m.mean,
    })
}

/// Shape and scale written out in closed form in terms of the scenario
/// parameters, independently of the moment pipeline.
pub fn shape_scale_closed_form(params: &SystemParams, gains: &DerivedGains) -> GammaApprox {
    let n = params.n_elements as f64;
    let (a, b) = (params.alpha, params.beta);
    let (gx, gy) = (gains.gbar_x, gains.gbar_y);
    let dd = params.delta1 * params.delta2;
    let lead = 4.0 * gx * b + n * PI * (gy * dd).sqrt();
    let spread = 3.0 * gx * gx * b * b + n * gy * dd * (2.0 + (n - 2.0) * PI * PI / 16.0);
    GammaApprox {
        k: lead * lead / (16.0 * spread),
        theta: params.lambda_t * params.lambda_t * 4.0 * a * spread / lead,
    }
}

/// Fitted SNR law for a scenario.
pub fn fit_for(params: &SystemParams) -> Result<GammaApprox> {
    let gains = derive_gains(params)?;
    fit_gamma(total_snr_moments(params, &gains))
}

pub fn snr_pdf(g: f64, fit: &GammaApprox) -> f64 {
    if !(g > 0.0) {
        return 0.0;
    }
    specfun::ln_gamma_pdf(g, fit.k, fit.theta).exp()
}

pub fn snr_cdf(g: f64, fit: &GammaApprox) -> f64 {
    if !(g > 0.0) {
        return 0.0;
    }
    if g.is_infinite() {
        return 1.0;
    }
    specfun::inc_gamma_pq(fit.k, g / fit.theta).0
}

fn metric_quad() -> QuadSpec {
    QuadSpec::default().relative_only()
}

fn agree(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    scale < f64::MIN_POSITIVE || (a - b).abs() <= CROSS_CHECK_TOL * scale
}

/// P(γ ≤ γ_th) under the fitted law.
pub fn outage_for_fit(fit: &GammaApprox, threshold: f64) -> f64 {
    snr_cdf(threshold, fit)
}

/// E[Q(√(2γ))] by quadrature, checked against the Meijer-G closed form.
pub fn ber_for_fit(fit: &GammaApprox) -> Result<f64> {
    let quad = expect_under_gamma(|g| q_function((2.0 * g).sqrt()), fit.k, fit.theta, &metric_quad())?;
    let meijer = specfun::meijer_g_ber(fit.k, fit.theta)?;
    if !agree(quad, meijer) {
        return Err(Error::CrossCheck {
            metric: "ber",
            quadrature: quad,
            meijer,
        });
    }
    Ok(quad)
}

/// E[log₂(1 + γ)] by quadrature, checked against the Meijer-G closed form.
pub fn ac_for_fit(fit: &GammaApprox) -> Result<f64> {
    let quad = expect_under_gamma(|g| g.ln_1p() / LN_2, fit.k, fit.theta, &metric_quad())?;
    let meijer = specfun::meijer_g_ac(fit.k, fit.theta)?;
    if !agree(quad, meijer) {
        return Err(Error::CrossCheck {
            metric: "ac",
            quadrature: quad,
            meijer,
        });
    }
    Ok(quad)
}

pub fn outage_probability(params: &SystemParams) -> Result<f64> {
    Ok(outage_for_fit(&fit_for(params)?, params.snr_threshold()))
}

pub fn bit_error_rate(params: &SystemParams) -> Result<f64> {
    ber_for_fit(&fit_for(params)?)
}

pub fn average_capacity(params: &SystemParams) -> Result<f64> {
    ac_for_fit(&fit_for(params)?)
}

/// The three link metrics for one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub op: f64,
    pub ber: f64,
    pub ac: f64,
}

pub fn analytic_metrics(params: &SystemParams) -> Result<Metrics> {
    let fit = fit_for(params)?;
    Ok(Metrics {
        op: outage_for_fit(&fit, params.snr_threshold()),
        ber: ber_for_fit(&fit)?,
        ac: ac_for_fit(&fit)?,
    })
}
