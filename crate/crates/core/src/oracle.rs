//! Reference values of `Q_ν(a,b)` by adaptive quadrature of the defining
//! integral
//!
//! ```text
//! Q_ν(a,b) = a^{1-ν} ∫_b^∞ t^ν e^{-(t²+a²)/2} I_{ν-1}(a t) dt
//! ```
//!
//! This path shares nothing with the series evaluators beyond the Bessel
//! and log-gamma kernels, so it serves as the referee in cross-checks.

use crate::args::{clamp_probability, EvalReport, MarcumArgs, Method};
use crate::error::{domain, Error, Result};
use crate::special::ln_bessel_i_entire;
use crate::sum::CompensatedSum;

/// Smallest tolerance accepted by [`quadrature_q`].
pub const MIN_TOL: f64 = 1e-13;

const MAX_SEGMENTS: usize = 4000;

/// Which form of the integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureMode {
    /// `∫_b^∞ f(t) dt`.
    Direct,
    /// `1 - ∫_0^b f(t) dt`, better conditioned when `Q` is close to one.
    Complementary,
}

impl QuadratureMode {
    /// Complementary below the gamma mean (`b²/2 < ν`), direct otherwise.
    pub fn for_args(args: &MarcumArgs) -> Self {
        if args.y() < args.nu() {
            QuadratureMode::Complementary
        } else {
            QuadratureMode::Direct
        }
    }
}

/// The density `a^{1-ν} t^ν e^{-(t²+a²)/2} I_{ν-1}(a t)` at `t >= 0`.
///
/// Evaluated as `2^{1-ν} t^{2ν-1} e^{-(t²+a²)/2} G(a t)` where
/// `G(z) = I_{ν-1}(z) (z/2)^{1-ν}` is entire, all in log space. At `t = 0`
/// the value is `0` for `ν > 1/2`, finite for `ν = 1/2`, and infinite
/// (an integrable singularity) below that.
pub fn integrand(args: &MarcumArgs, t: f64) -> f64 {
    let (nu, a) = (args.nu(), args.a());
    if t == 0.0 {
        if nu > 0.5 {
            return 0.0;
        }
        if nu < 0.5 {
            return f64::INFINITY;
        }
    }
    let ln_t_part = if t == 0.0 { 0.0 } else { (2.0 * nu - 1.0) * t.ln() };
    let ln = ln_t_part + (1.0 - nu) * std::f64::consts::LN_2 - 0.5 * (t * t + a * a)
        + ln_bessel_i_entire(nu - 1.0, a * t);
    ln.exp()
}

/// End of the integration range such that the neglected tail beyond it is
/// below `tol / 10`, together with that tail bound.
///
/// Past its peak `ln f` decreases at rate at least
/// `κ(t) = t - a - (2ν-1)/t` (the Bessel ratio `I_ν/I_{ν-1}` is below one),
/// so the tail beyond `T` is at most `f(T)/κ(T)` once `κ(T) > 0`.
pub fn upper_cutoff(args: &MarcumArgs, tol: f64) -> (f64, f64) {
    let (nu, a, b) = (args.nu(), args.a(), args.b());
    let mut t = a.max(b) + 10.0 + (2.0 * nu * nu.ln().max(1.0)).sqrt();
    loop {
        let rate = t - a - (2.0 * nu - 1.0) / t;
        if rate >= 1.0 {
            let tail = integrand(args, t) / rate;
            if tail < 0.1 * tol {
                return (t, tail);
            }
        }
        t += 1.0;
    }
}

/// `∫_lo^hi f(t) dt` with its error estimate.
///
/// A range starting at `t = 0` with `ν < 1` is integrated in `u = t^ν`,
/// which removes the `t^{2ν-1}` endpoint behaviour.
pub fn integrate_density(args: &MarcumArgs, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    integrate_counted(args, lo, hi, tol).map(|(v, e, _)| (v, e))
}

fn integrate_counted(args: &MarcumArgs, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64, usize)> {
    if !(lo >= 0.0 && hi >= lo) {
        return Err(domain(format!("invalid integration range [{lo}, {hi}]")));
    }
    if hi == lo {
        return Ok((0.0, 0.0, 0));
    }
    let nu = args.nu();
    if lo == 0.0 && nu < 1.0 {
        let p = 1.0 / nu;
        let f = |u: f64| {
            if u == 0.0 {
                return 0.0;
            }
            integrand(args, u.powf(p)) * p * u.powf(p - 1.0)
        };
        adaptive_counted(f, &panels(0.0, hi.powf(nu)), tol)
    } else {
        adaptive_counted(|t| integrand(args, t), &panels(lo, hi), tol)
    }
}

/// Evaluates `Q_ν(a,b)` by quadrature, picking the mode by
/// [`QuadratureMode::for_args`].
pub fn quadrature_q(args: &MarcumArgs, tol: f64) -> Result<EvalReport> {
    quadrature_q_with_mode(args, tol, QuadratureMode::for_args(args))
}

/// Evaluates `Q_ν(a,b)` by quadrature in the given mode.
///
/// `error_bound` is the quadrature error estimate plus, in direct mode, the
/// bound on the neglected tail. `terms_used` counts subintervals.
pub fn quadrature_q_with_mode(
    args: &MarcumArgs,
    tol: f64,
    mode: QuadratureMode,
) -> Result<EvalReport> {
    args.require_positive_a("quadrature")?;
    if !(tol >= MIN_TOL) {
        return Err(domain(format!("quadrature tolerance must be >= {MIN_TOL:e}, got {tol:e}")));
    }
    if args.b() == 0.0 {
        return Ok(EvalReport {
            value: 1.0,
            terms_used: 0,
            error_bound: 0.0,
            method: Method::Quadrature,
        });
    }
    let (raw, estimate, segments) = match mode {
        QuadratureMode::Direct => {
            let (hi, tail) = upper_cutoff(args, tol);
            let budget = tol - tail;
            let (value, err, segments) =
                adaptive_counted(|t| integrand(args, t), &panels(args.b(), hi), budget)?;
            (value, err + tail, segments)
        }
        QuadratureMode::Complementary => {
            let (value, err, segments) = integrate_counted(args, 0.0, args.b(), tol)?;
            (1.0 - value, err, segments)
        }
    };
    if estimate > tol {
        return Err(Error::ToleranceNotMet { estimate, tol });
    }
    let value = clamp_probability(raw, estimate, Method::Quadrature)?;
    Ok(EvalReport {
        value,
        terms_used: segments,
        error_bound: estimate,
        method: Method::Quadrature,
    })
}

/// Breakpoints splitting `[lo, hi]` into panels no wider than one unit.
fn panels(lo: f64, hi: f64) -> Vec<f64> {
    let count = ((hi - lo).ceil() as usize).max(1);
    let width = (hi - lo) / count as f64;
    let mut points: Vec<f64> = (0..count).map(|i| lo + i as f64 * width).collect();
    points.push(hi);
    points
}

// 21-point Kronrod extension of the 10-point Gauss rule.
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

/// One Gauss–Kronrod panel: `(integral, error estimate)`.
fn gk21<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = f(center);
    let mut res_k = WGK[10] * f_center;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut f_left = [0.0; 10];
    let mut f_right = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (fl, fr) = (f(center - dx), f(center + dx));
        f_left[j] = fl;
        f_right[j] = fr;
        res_k += WGK[j] * (fl + fr);
        res_abs += WGK[j] * (fl.abs() + fr.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (fl + fr);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((f_left[j] - mean).abs() + (f_right[j] - mean).abs());
    }
    let result = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

/// Globally adaptive bisection: always split the segment with the largest
/// error. Contributions are summed in left-to-right order, so the result
/// does not depend on the refinement history.
fn adaptive_counted<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    tol: f64,
) -> Result<(f64, f64, usize)> {
    let mut segments: Vec<Segment> = breaks
        .windows(2)
        .map(|w| {
            let (value, err) = gk21(&f, w[0], w[1]);
            Segment { lo: w[0], hi: w[1], value, err }
        })
        .collect();
    loop {
        let total_err: f64 = segments.iter().map(|s| s.err).sum();
        if total_err <= tol || segments.len() >= MAX_SEGMENTS {
            if total_err > tol {
                return Err(Error::ToleranceNotMet { estimate: total_err, tol });
            }
            segments.sort_by(|p, q| p.lo.total_cmp(&q.lo));
            let sum: CompensatedSum = segments.iter().map(|s| s.value).collect();
            if !sum.value().is_finite() {
                return Err(Error::Overflow("integrand produced a non-finite value".into()));
            }
            return Ok((sum.value(), total_err, segments.len()));
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|p, q| p.1.err.total_cmp(&q.1.err))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.lo + s.hi);
        if mid <= s.lo || mid >= s.hi {
            return Err(Error::ToleranceNotMet { estimate: total_err, tol });
        }
        let (v1, e1) = gk21(&f, s.lo, mid);
        let (v2, e2) = gk21(&f, mid, s.hi);
        segments.push(Segment { lo: s.lo, hi: mid, value: v1, err: e1 });
        segments.push(Segment { lo: mid, hi: s.hi, value: v2, err: e2 });
    }
}
