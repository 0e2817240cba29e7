//! Mellin-Barnes evaluation of the two Meijer-G instances behind the
//! closed-form BER and average capacity.
//!
//! Both are real for real positive arguments and have kernels satisfying
//! K(s̄) = conj K(s), so the contour integral along Re s = c reduces to
//!
//! ```text
//! G = (1/π) ∫₀^∞ Re[ K(c + iy) z^{c + iy} ] dy.
//! ```
//!
//! The abscissa `c` is placed at the minimum of K(c) z^c on the real axis
//! between the separating poles. That point is a saddle of the integrand, so
//! the phase is stationary at y = 0 and the integral has no cancellation to
//! speak of, even when the result is 10^-200.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use super::gamma::{lgamma, ln_gamma_complex, SQRT_PI};
use super::quad::{integrate_panels, QuadSpec};
use crate::error::{Error, Result};

/// Contour width beyond which the integrand is below e^-46 of its peak.
const LOG_TAIL: f64 = 46.0;

/// Returns ln G as (log-scale, normalised integral), G = e^scale · integral.
fn mellin_barnes<K>(ln_kernel: K, z: f64, strip: (f64, f64)) -> Result<(f64, f64)>
where
    K: Fn(Complex64) -> Complex64,
{
    let ln_z = z.ln();
    let real_log = |c: f64| ln_kernel(Complex64::new(c, 0.0)).re + c * ln_z;

    // Golden-section search for the saddle; the real log-kernel is convex.
    let width = strip.1 - strip.0;
    let mut a = strip.0 + 1e-9 * width;
    let mut b = strip.1 - 1e-9 * width;
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = real_log(x1);
    let mut f2 = real_log(x2);
    for _ in 0..200 {
        if (b - a) < 1e-12 * width {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = real_log(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = real_log(x2);
        }
    }
    let c = 0.5 * (a + b);
    let scale = real_log(c);

    let integrand = |y: f64| {
        let s = Complex64::new(c, y);
        let w = ln_kernel(s) + s * ln_z - scale;
        w.re.exp() * w.im.cos()
    };

    // Extend the contour until the modulus has decayed past LOG_TAIL.
    let step = 0.5;
    let mut breaks = vec![0.0];
    let mut y = 0.0;
    let mut below = 0;
    while below < 4 {
        y += step;
        breaks.push(y);
        let m = (ln_kernel(Complex64::new(c, y)).re + c * ln_z) - scale;
        if m < -LOG_TAIL {
            below += 1;
        } else {
            below = 0;
        }
        if y > 1e4 {
            return Err(Error::NonConvergence {
                routine: "mellin_barnes",
                refinements: breaks.len(),
                estimate: f64::NAN,
                error: f64::INFINITY,
            });
        }
    }
    let spec = QuadSpec {
        rel_tol: 1e-13,
        abs_tol: 1e-16,
        max_refinements: 40,
    };
    let (value, _) = integrate_panels(&integrand, &breaks, &spec, "mellin_barnes")?;
    Ok((scale, value / PI))
}

fn check(function: &'static str, k: f64, theta: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain {
            function,
            value: k,
            requirement: "shape k > 0",
        });
    }
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::Domain {
            function,
            value: theta,
            requirement: "scale theta > 0",
        });
    }
    Ok(())
}

/// G^{2,1}_{2,2}(θ | 1-k, 1; 0, ½) as (log-scale, factor).
fn g21_22_parts(k: f64, theta: f64) -> Result<(f64, f64)> {
    // Γ(-s) Γ(½-s) Γ(k+s) / Γ(1-s), poles of Γ(k+s) left of the strip.
    let kernel = |s: Complex64| {
        ln_gamma_complex(-s) + ln_gamma_complex(0.5 - s) + ln_gamma_complex(k + s)
            - ln_gamma_complex(1.0 - s)
    };
    mellin_barnes(kernel, theta, (-k, 0.0))
}

/// G^{1,3}_{3,2}(θ | 1-k, 1, 1; 1, 0) as (log-scale, factor).
fn g13_32_parts(k: f64, theta: f64) -> Result<(f64, f64)> {
    // Γ(1-s) Γ(k+s) Γ(s)² / Γ(1+s), strip 0 < Re s < 1.
    let kernel = |s: Complex64| {
        ln_gamma_complex(1.0 - s) + ln_gamma_complex(k + s) + 2.0 * ln_gamma_complex(s)
            - ln_gamma_complex(1.0 + s)
    };
    mellin_barnes(kernel, theta, (0.0, 1.0))
}

/// The raw Meijer function G^{2,1}_{2,2}(θ | 1-k, 1; 0, ½).
pub fn meijer_g21_22(k: f64, theta: f64) -> Result<f64> {
    check("meijer_g21_22", k, theta)?;
    let (scale, factor) = g21_22_parts(k, theta)?;
    Ok(scale.exp() * factor)
}

/// The raw Meijer function G^{1,3}_{3,2}(θ | 1-k, 1, 1; 1, 0).
pub fn meijer_g13_32(k: f64, theta: f64) -> Result<f64> {
    check("meijer_g13_32", k, theta)?;
    let (scale, factor) = g13_32_parts(k, theta)?;
    Ok(scale.exp() * factor)
}

/// Average of Q(√(2γ)) for γ ~ Gamma(k, θ) through the Meijer-G closed form
///
/// ```text
/// BER = G^{2,1}_{2,2}(θ | 1-k, 1; 0, ½) / (2 √π Γ(k)).
/// ```
///
/// The normalising constant follows from erfc(√x) = G^{2,0}_{1,2}(x | 1; 0, ½)/√π.
/// There is no 1/ln 2 factor here; that factor belongs to the capacity
/// expression only, and including it misstates the BER by 44%.
pub fn meijer_g_ber(k: f64, theta: f64) -> Result<f64> {
    check("meijer_g_ber", k, theta)?;
    let (scale, factor) = g21_22_parts(k, theta)?;
    Ok((scale - lgamma(k)).exp() * factor / (2.0 * SQRT_PI))
}

/// Average of log₂(1 + γ) for γ ~ Gamma(k, θ), in bits per channel use:
///
/// ```text
/// C̄ = G^{1,3}_{3,2}(θ | 1-k, 1, 1; 1, 0) / (Γ(k) ln 2).
/// ```
pub fn meijer_g_ac(k: f64, theta: f64) -> Result<f64> {
    check("meijer_g_ac", k, theta)?;
    let (scale, factor) = g13_32_parts(k, theta)?;
    Ok((scale - lgamma(k)).exp() * factor / LN_2)
}
