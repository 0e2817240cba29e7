//! Adaptive Gauss-Kronrod quadrature and gamma-weighted expectations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::gamma::lgamma;
use crate::error::{Error, Result};

/// Tolerances for the adaptive integrator.
///
/// `max_refinements` bounds the bisection depth of any single panel; an
/// integrand that still misses the target at that depth is reported as
/// non-convergent instead of being returned silently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinements: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_refinements: 30,
        }
    }
}

impl QuadSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_refinements: usize) -> Result<Self> {
        let spec = QuadSpec {
            rel_tol,
            abs_tol,
            max_refinements,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same spec with the absolute floor removed, for integrals whose value
    /// may be many orders of magnitude below one.
    pub fn relative_only(self) -> Self {
        QuadSpec {
            abs_tol: 0.0,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("quad.rel_tol", "must be > 0"));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::invalid("quad.abs_tol", "must be >= 0"));
        }
        if self.max_refinements < 1 {
            return Err(Error::invalid("quad.max_refinements", "must be >= 1"));
        }
        Ok(())
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// 21-point Kronrod rule with the QUADPACK error heuristic.
fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut result_k = fc * WGK[10];
    let mut result_g = 0.0;
    let mut resabs = result_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        result_k += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            result_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = result_k * 0.5;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = result_k * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((result_k - result_g) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

/// Globally adaptive integration of `f` over consecutive panels given by
/// `breaks` (sorted, at least two points). Returns (value, error estimate).
pub(crate) fn integrate_panels<F: Fn(f64) -> f64>(
    f: &F,
    breaks: &[f64],
    spec: &QuadSpec,
    routine: &'static str,
) -> Result<(f64, f64)> {
    debug_assert!(breaks.len() >= 2);
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let (value, error) = gauss_kronrod_21(f, w[0], w[1]);
        total += value;
        total_err += error;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
            depth: 0,
        });
    }
    let mut splits = 0usize;
    loop {
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        let worst = heap.pop().expect("panel heap never empties");
        if worst.depth >= spec.max_refinements || !total.is_finite() {
            return Err(Error::NonConvergence {
                routine,
                refinements: splits,
                estimate: total,
                error: total_err,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gauss_kronrod_21(f, worst.a, mid);
        let (v2, e2) = gauss_kronrod_21(f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        splits += 1;
        for (a, b, value, error) in [(worst.a, mid, v1, e1), (mid, worst.b, v2, e2)] {
            heap.push(Panel {
                a,
                b,
                value,
                error,
                depth: worst.depth + 1,
            });
        }
        // Running sums drift; resynchronise occasionally.
        if splits.is_multiple_of(64) {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    let total: f64 = heap.iter().map(|p| p.value).sum();
    let total_err: f64 = heap.iter().map(|p| p.error).sum();
    Ok((total, total_err))
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<f64> {
    spec.validate()?;
    if a == b {
        return Ok(0.0);
    }
    integrate_panels(&f, &[a, b], spec, "integrate").map(|(v, _)| v)
}

/// Drop in log-integrand below the peak that is treated as negligible.
const LOG_WINDOW: f64 = 60.0;

/// E[f(γ)] for γ ~ Gamma(shape `k`, scale `theta`).
///
/// The integral is taken in the log variable γ = θ·e^v, where the density
/// becomes e^{kv - e^v}/Γ(k). That absorbs the γ^{k-1} endpoint singularity
/// for k < 1 and turns every integrand of interest into a smooth bump with
/// exponential tails. The bump is located by scanning the log-integrand, and
/// panel breaks are placed around it (including v = ln k, the mean) before
/// adaptive refinement.
pub fn expect_under_gamma<F: Fn(f64) -> f64>(f: F, k: f64, theta: f64, spec: &QuadSpec) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain {
            function: "expect_under_gamma",
            value: k,
            requirement: "shape k > 0",
        });
    }
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::Domain {
            function: "expect_under_gamma",
            value: theta,
            requirement: "scale theta > 0",
        });
    }
    spec.validate()?;

    let ln_gk = lgamma(k);
    let log_weight = |v: f64| k * v - v.exp() - ln_gk;
    let log_integrand = |v: f64| {
        let fv = f(theta * v.exp());
        if fv == 0.0 {
            f64::NEG_INFINITY
        } else {
            fv.abs().ln() + log_weight(v)
        }
    };

    let step = (0.5 / k.sqrt()).min(0.25);
    let center = k.ln();
    // γ = θ e^v must stay representable and nonzero.
    let v_floor = (1e-300 / theta).ln().max(-745.0);
    let v_ceil = (1e300 / theta).ln();

    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    // Rightward: e^v overwhelms any polynomial growth of f quickly.
    let mut v = center;
    while v <= v_ceil {
        let h = log_integrand(v);
        if h.is_nan() {
            return Err(Error::Domain {
                function: "expect_under_gamma",
                value: theta * v.exp(),
                requirement: "integrand finite",
            });
        }
        peak = peak.max(h);
        let prev = samples.last().map_or(f64::INFINITY, |s| s.1);
        samples.push((v, h));
        if v > center + 1.0 && h < peak - LOG_WINDOW && (h < prev || h == f64::NEG_INFINITY) {
            break;
        }
        v += step;
    }
    // Leftward: the weight decays like e^{kv}, bounded f cannot revive it.
    let mut v = center - step;
    let mut prev = samples[0].1;
    while v >= v_floor {
        let h = log_integrand(v);
        if h.is_nan() {
            return Err(Error::Domain {
                function: "expect_under_gamma",
                value: theta * v.exp(),
                requirement: "integrand finite",
            });
        }
        peak = peak.max(h);
        samples.push((v, h));
        if v < center - 1.0 && h < peak - LOG_WINDOW && (h < prev || h == f64::NEG_INFINITY) {
            break;
        }
        prev = h;
        v -= step;
    }
    if peak == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));

    let first = samples
        .iter()
        .position(|&(_, h)| h >= peak - LOG_WINDOW)
        .expect("peak sample is inside the window");
    let last = samples
        .iter()
        .rposition(|&(_, h)| h >= peak - LOG_WINDOW)
        .expect("peak sample is inside the window");
    let lo = first.saturating_sub(1);
    let hi = (last + 1).min(samples.len() - 1);

    let mut breaks = vec![samples[lo].0];
    for &(v, h) in &samples[lo + 1..hi] {
        let width = v - breaks[breaks.len() - 1];
        let core = h >= peak - 25.0;
        if (core && width >= 1.0) || width >= 8.0 {
            breaks.push(v);
        }
    }
    let v_end = samples[hi].0;
    if v_end > breaks[breaks.len() - 1] {
        breaks.push(v_end);
    }
    if breaks.len() < 2 {
        breaks.push(breaks[0] + step);
    }

    let integrand = |v: f64| {
        let fv = f(theta * v.exp());
        if fv == 0.0 {
            0.0
        } else {
            fv * log_weight(v).exp()
        }
    };
    integrate_panels(&integrand, &breaks, spec, "expect_under_gamma").map(|(v, _)| v)
}
