//! `Q_ν(a,b)` by the generalized-Laguerre power series in `b²/2`.
//!
//! With `x = a²/2` and `y = b²/2`,
//!
//! ```text
//! Q_ν(a,b) = 1 - Σ_{n>=0} (-1)^n e^{-x} L_n^{(ν-1)}(x) / Γ(ν+n+1) · y^{n+ν}
//!          = 1 - Σ_{n>=0} e^{-x} y^ν P_{ν,n}(x, -y)
//! ```
//!
//! where `P_{ν,n}(x, t) = t^n L_n^{(ν-1)}(x) / Γ(ν+n+1)` obeys a three-term
//! recurrence in `n`. The coefficients of `y^{n+ν}` depend only on `(ν, a)`,
//! so they can be computed once and reused across many thresholds `b`
//! (see [`LaguerreCache`]).
//!
//! Terms are added until the a-priori truncation bound drops below the
//! requested tolerance. Two forms of that bound exist: the exponential-tail
//! form ([`truncation_bound_tail`]) that drives the stopping rule, and its
//! `1/n0` relaxation ([`truncation_bound`]) that can be inverted in closed
//! form ([`required_terms`]).

use crate::args::{clamp_probability, EvalReport, MarcumArgs, Method, TruncationPolicy};
use crate::bounds::exp_tail;
use crate::error::{domain, Error, Result};
use crate::special::{gamma_unchecked, ln_gamma};
use crate::sum::CompensatedSum;

/// `b²/2` above which the series is refused as ill-conditioned.
pub const ILL_CONDITIONED_Y: f64 = 45.0;
/// Value of [`truncation_bound`] at `n0 = 1` above which the series is refused.
pub const ILL_CONDITIONED_BOUND: f64 = 1e3;
/// Largest term count [`required_terms`] will report.
pub const REQUIRED_TERMS_CAP: usize = 1_000_000;

/// Rolling state of the `P_{ν,n}` recurrence: `p_curr = P_{ν,n}`, `p_prev = P_{ν,n-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PState {
    pub n: usize,
    pub p_curr: f64,
    pub p_prev: f64,
}

/// Initial conditions `P_{ν,0} = 1/Γ(ν+1)` and `P_{ν,1} = (ν-a')b'/Γ(ν+2)`,
/// returned as the state at `n = 1`.
pub fn p_init(nu: f64, a_p: f64, b_p: f64) -> PState {
    PState {
        n: 1,
        p_curr: (nu - a_p) * b_p / gamma_unchecked(nu + 2.0),
        p_prev: 1.0 / gamma_unchecked(nu + 1.0),
    }
}

/// Advances `P_{ν,n} → P_{ν,n+1}`:
///
/// ```text
/// P_{n+1} = (2n+ν-a') b' / ((n+1)(ν+n+1)) · P_n
///         - (n+ν-1) b'² / ((n+1)(ν+n)(ν+n+1)) · P_{n-1}
/// ```
pub fn p_step(state: PState, nu: f64, a_p: f64, b_p: f64) -> PState {
    debug_assert!(state.n >= 1);
    let n = state.n as f64;
    let c1 = (2.0 * n + nu - a_p) * b_p / ((n + 1.0) * (nu + n + 1.0));
    let c2 = (n + nu - 1.0) * b_p * b_p / ((n + 1.0) * (nu + n) * (nu + n + 1.0));
    PState { n: state.n + 1, p_curr: c1 * state.p_curr - c2 * state.p_prev, p_prev: state.p_curr }
}

/// A float carried with an extra binary exponent: `mant · 2^exp2`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Scaled {
    mant: f64,
    exp2: i32,
}

const RENORM_HI: f64 = 1.157_920_892_373_162e77; // 2^256
const RENORM_LO: f64 = 8.636_168_555_094_445e-78; // 2^-256

/// Binary exponent `e` with `2^e <= |v| < 2^{e+1}` for normal nonzero `v`.
fn exponent_of(v: f64) -> i32 {
    ((v.to_bits() >> 52) & 0x7ff) as i32 - 1023
}

/// `v · 2^e`, exact unless the result leaves the normal range.
fn ldexp(mut v: f64, mut e: i32) -> f64 {
    let step = |k: i32| f64::from_bits(((k + 1023) as u64) << 52);
    while e > 1000 {
        v *= step(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= step(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * step(e)
}

impl Scaled {
    const ZERO: Scaled = Scaled { mant: 0.0, exp2: 0 };

    /// `e^ln` without overflow or underflow.
    fn from_ln(ln: f64) -> Scaled {
        if ln == f64::NEG_INFINITY {
            return Scaled::ZERO;
        }
        if ln.abs() < 600.0 {
            return Scaled { mant: ln.exp(), exp2: 0 };
        }
        let e = (ln / std::f64::consts::LN_2).floor();
        Scaled { mant: (ln - e * std::f64::consts::LN_2).exp(), exp2: e as i32 }
    }

    fn renormalized(self) -> Scaled {
        let m = self.mant.abs();
        if m != 0.0 && !(RENORM_LO..=RENORM_HI).contains(&m) {
            let k = exponent_of(self.mant);
            Scaled { mant: ldexp(self.mant, -k), exp2: self.exp2 + k }
        } else {
            self
        }
    }

    fn times(self, other: Scaled) -> Scaled {
        Scaled { mant: self.mant * other.mant, exp2: self.exp2 + other.exp2 }
    }

    fn to_f64(self) -> f64 {
        ldexp(self.mant, self.exp2)
    }
}

/// Generates the series coefficients
/// `c_n = (-1)^n e^{-x} L_n^{(ν-1)}(x) / Γ(ν+n+1)` one at a time.
///
/// Runs [`p_step`] with `b' = -1` on values rescaled by a shared power of
/// two, so neither `e^{-x}` nor `1/Γ(ν+n+1)` underflows.
#[derive(Debug, Clone)]
struct CoeffCursor {
    nu: f64,
    x: f64,
    state: PState,
    exp2: i32,
    next_n: usize,
}

impl CoeffCursor {
    fn new(nu: f64, x: f64) -> Self {
        let start = if x < 600.0 && nu + 1.0 < 170.0 {
            Scaled { mant: (-x).exp() / gamma_unchecked(nu + 1.0), exp2: 0 }
        } else {
            Scaled::from_ln(-x - ln_gamma(nu + 1.0))
        }
        .renormalized();
        // P_{ν,1}/P_{ν,0} = (ν - x)(-1)/(ν + 1)
        let p1 = start.mant * (-(nu - x) / (nu + 1.0));
        Self {
            nu,
            x,
            state: PState { n: 1, p_curr: p1, p_prev: start.mant },
            exp2: start.exp2,
            next_n: 0,
        }
    }

    fn next(&mut self) -> Scaled {
        let n = self.next_n;
        self.next_n += 1;
        let mant = match n {
            0 => self.state.p_prev,
            1 => self.state.p_curr,
            _ => {
                self.state = p_step(self.state, self.nu, self.x, -1.0);
                let m = self.state.p_curr.abs();
                if m != 0.0 && !(RENORM_LO..=RENORM_HI).contains(&m) {
                    let k = exponent_of(self.state.p_curr);
                    self.state.p_curr = ldexp(self.state.p_curr, -k);
                    self.state.p_prev = ldexp(self.state.p_prev, -k);
                    self.exp2 += k;
                }
                self.state.p_curr
            }
        };
        Scaled { mant, exp2: self.exp2 }
    }
}

/// Stored series coefficients for one `(ν, a)` pair, reusable for any `b`.
///
/// Coefficient `n` is `(-1)^n e^{-a²/2} L_n^{(ν-1)}(a²/2) / Γ(ν+n+1)`, kept
/// with a separate binary exponent. Evaluation through a cache is
/// bit-identical to the uncached path; a cache that is too short is
/// continued locally during evaluation, and [`LaguerreCache::extend_to`]
/// grows it in place.
#[derive(Debug, Clone)]
pub struct LaguerreCache {
    nu: f64,
    a: f64,
    coeffs: Vec<Scaled>,
    cursor: CoeffCursor,
}

impl LaguerreCache {
    /// An empty cache for `(ν, a)`.
    pub fn new(nu: f64, a: f64) -> Result<Self> {
        if !(nu > 0.0) || nu.is_infinite() {
            return Err(domain(format!("cache requires nu > 0, got {nu}")));
        }
        if !(a > 0.0) || a.is_infinite() {
            return Err(domain(format!("cache requires a > 0, got {a}")));
        }
        Ok(Self { nu, a, coeffs: Vec::new(), cursor: CoeffCursor::new(nu, 0.5 * a * a) })
    }

    /// Makes coefficients `0..=upto` available.
    pub fn extend_to(&mut self, upto: usize) {
        while self.coeffs.len() <= upto {
            let c = self.cursor.next();
            self.coeffs.push(c);
        }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient `n` as a plain float (may underflow to zero).
    pub fn coefficient(&self, n: usize) -> Option<f64> {
        self.coeffs.get(n).map(|c| c.to_f64())
    }
}

/// Builds a cache holding coefficients `0..=upto` for `(ν, a)`.
pub fn cache_build(nu: f64, a: f64, upto: usize) -> Result<LaguerreCache> {
    let mut cache = LaguerreCache::new(nu, a)?;
    cache.extend_to(upto);
    Ok(cache)
}

/// Yields coefficients from a cache prefix, then from a private cursor.
struct CoeffSource<'a> {
    stored: &'a [Scaled],
    cursor: Option<CoeffCursor>,
    fallback: Option<&'a CoeffCursor>,
    nu: f64,
    x: f64,
    n: usize,
}

impl<'a> CoeffSource<'a> {
    fn new(args: &MarcumArgs, cache: Option<&'a LaguerreCache>) -> Self {
        match cache {
            Some(c) => Self {
                stored: &c.coeffs,
                cursor: None,
                fallback: Some(&c.cursor),
                nu: args.nu(),
                x: args.x(),
                n: 0,
            },
            None => {
                Self { stored: &[], cursor: None, fallback: None, nu: args.nu(), x: args.x(), n: 0 }
            }
        }
    }

    fn next(&mut self) -> Scaled {
        let n = self.n;
        self.n += 1;
        if let Some(c) = self.stored.get(n) {
            return *c;
        }
        let (nu, x, fallback) = (self.nu, self.x, self.fallback);
        self.cursor
            .get_or_insert_with(|| fallback.cloned().unwrap_or_else(|| CoeffCursor::new(nu, x)))
            .next()
    }
}

/// Successive `y^{n+ν}` in scaled form.
struct PowerSeq {
    y: f64,
    curr: Scaled,
}

impl PowerSeq {
    fn new(nu: f64, y: f64) -> Self {
        let curr =
            if y == 0.0 { Scaled::ZERO } else { Scaled::from_ln(nu * y.ln()).renormalized() };
        Self { y, curr }
    }

    fn next(&mut self) -> Scaled {
        let out = self.curr;
        self.curr = Scaled { mant: self.curr.mant * self.y, exp2: self.curr.exp2 }.renormalized();
        out
    }
}

/// Relaxed truncation bound after the terms `n = 0..=n0`:
///
/// * `ν >= 1`: `e^{y-x/2}/(n0+1) · min( y^ν/Γ(ν), y (2y/x)^{ν-1} )`
/// * `ν < 1`: `2 e^{y-x/2}/n0 · y^{ν+1}`
///
/// with `x = a²/2`, `y = b²/2`. Decays like `1/n0`. Returns infinity for
/// `n0 = 0`, where the `ν < 1` form is undefined.
pub fn truncation_bound(args: &MarcumArgs, n0: usize) -> f64 {
    let (nu, x, y) = (args.nu(), args.x(), args.y());
    if y == 0.0 {
        return 0.0;
    }
    if n0 == 0 {
        return f64::INFINITY;
    }
    let ln_y = y.ln();
    let n0 = n0 as f64;
    if nu >= 1.0 {
        let szego = nu * ln_y - ln_gamma(nu);
        let love = if x > 0.0 { ln_y + (nu - 1.0) * (2.0 * y / x).ln() } else { f64::INFINITY };
        (y - 0.5 * x + szego.min(love)).exp() / (n0 + 1.0)
    } else {
        2.0 * (y - 0.5 * x + (nu + 1.0) * ln_y).exp() / n0
    }
}

/// Sharp truncation bound after the terms `n = 0..=n0`, before the tail of
/// the exponential series is relaxed to `1/n0`:
///
/// * `ν >= 1`: `e^{-x/2} y^{ν-1} min(1/Γ(ν), (2/x)^{ν-1}) [e^y - Σ_{k<=n0+1} y^k/k!]`
/// * `ν < 1`: `2 e^{-x/2} y^ν [e^y - Σ_{k<=n0} y^k/k!]`
///
/// Never exceeds [`truncation_bound`] and decays factorially in `n0`.
pub fn truncation_bound_tail(args: &MarcumArgs, n0: usize) -> f64 {
    let (nu, x, y) = (args.nu(), args.x(), args.y());
    if y == 0.0 {
        return 0.0;
    }
    let ln_y = y.ln();
    if nu >= 1.0 {
        let szego = -ln_gamma(nu);
        let love = if x > 0.0 { (nu - 1.0) * (2.0 / x).ln() } else { f64::INFINITY };
        (-0.5 * x + (nu - 1.0) * ln_y + szego.min(love)).exp() * exp_tail(y, n0 + 2)
    } else {
        if n0 == 0 {
            return f64::INFINITY;
        }
        2.0 * (-0.5 * x + nu * ln_y).exp() * exp_tail(y, n0 + 1)
    }
}

/// Smallest `n0 >= 1` with `truncation_bound(args, n0) <= eps`, found by
/// inverting the `1/n0` law and checking the neighbours.
///
/// Fails with [`Error::Infeasible`] past [`REQUIRED_TERMS_CAP`]; the relaxed
/// bound is very pessimistic, see [`required_terms_tail`] for a practical
/// count.
pub fn required_terms(args: &MarcumArgs, eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(domain(format!("eps must be > 0, got {eps}")));
    }
    if args.y() == 0.0 {
        return Ok(1);
    }
    // truncation_bound = scale / (n0 + shift)
    let (scale, shift) = if args.nu() >= 1.0 {
        (truncation_bound(args, 1) * 2.0, 1.0)
    } else {
        (truncation_bound(args, 1), 0.0)
    };
    let estimate = (scale / eps - shift).ceil().max(1.0);
    if !(estimate <= REQUIRED_TERMS_CAP as f64) {
        return Err(Error::Infeasible { required: estimate, cap: REQUIRED_TERMS_CAP });
    }
    let mut n0 = estimate as usize;
    while truncation_bound(args, n0) > eps {
        n0 += 1;
    }
    while n0 > 1 && truncation_bound(args, n0 - 1) <= eps {
        n0 -= 1;
    }
    if n0 > REQUIRED_TERMS_CAP {
        return Err(Error::Infeasible { required: n0 as f64, cap: REQUIRED_TERMS_CAP });
    }
    Ok(n0)
}

/// Smallest `n0 >= 1` with `truncation_bound_tail(args, n0) <= eps`, up to `cap`.
pub fn required_terms_tail(args: &MarcumArgs, eps: f64, cap: usize) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(domain(format!("eps must be > 0, got {eps}")));
    }
    (1..=cap.max(1))
        .find(|&n0| truncation_bound_tail(args, n0) <= eps)
        .ok_or(Error::Infeasible { required: f64::INFINITY, cap })
}

/// Refuses arguments where cancellation in the alternating series would
/// consume most of double precision.
pub fn check_conditioning(args: &MarcumArgs) -> Result<()> {
    let y = args.y();
    if y > ILL_CONDITIONED_Y {
        return Err(Error::IllConditioned(format!("b²/2 = {y} exceeds {ILL_CONDITIONED_Y}")));
    }
    let bound = truncation_bound(args, 1);
    if bound > ILL_CONDITIONED_BOUND {
        return Err(Error::IllConditioned(format!(
            "truncation bound at one term is {bound:e}, above {ILL_CONDITIONED_BOUND:e}"
        )));
    }
    Ok(())
}

/// Evaluates `Q_ν(a,b)` by the Laguerre series, optionally through a
/// coefficient cache for the same `(ν, a)`.
///
/// Requires `a > 0`; `a = 0` is the limit `Γ(ν, b²/2)/Γ(ν)`, see
/// [`crate::alt_series::limit_a_zero`]. Arguments failing
/// [`check_conditioning`] are refused; [`eval_laguerre_series_unguarded`]
/// skips that check.
pub fn eval_laguerre_series(
    args: &MarcumArgs,
    policy: &TruncationPolicy,
    cache: Option<&LaguerreCache>,
) -> Result<EvalReport> {
    args.require_positive_a("Laguerre series")?;
    check_conditioning(args)?;
    eval_impl(args, policy, cache)
}

/// [`eval_laguerre_series`] without the conditioning guard.
pub fn eval_laguerre_series_unguarded(
    args: &MarcumArgs,
    policy: &TruncationPolicy,
    cache: Option<&LaguerreCache>,
) -> Result<EvalReport> {
    args.require_positive_a("Laguerre series")?;
    eval_impl(args, policy, cache)
}

fn eval_impl(
    args: &MarcumArgs,
    policy: &TruncationPolicy,
    cache: Option<&LaguerreCache>,
) -> Result<EvalReport> {
    if let Some(c) = cache {
        if c.nu != args.nu() || c.a != args.a() {
            return Err(domain(format!(
                "cache built for (nu = {}, a = {}) used with (nu = {}, a = {})",
                c.nu,
                c.a,
                args.nu(),
                args.a()
            )));
        }
    }
    let eps = policy.target_eps();
    let mut coeffs = CoeffSource::new(args, cache);
    let mut powers = PowerSeq::new(args.nu(), args.y());
    let mut sum = CompensatedSum::new();
    let mut max_term: f64 = 0.0;
    let mut bound = f64::INFINITY;

    for n in 0..policy.max_terms() {
        let term = coeffs.next().times(powers.next()).to_f64();
        if !term.is_finite() {
            return Err(Error::Overflow(format!("series term {n} is not finite")));
        }
        sum.add(term);
        max_term = max_term.max(term.abs());
        if n == 0 {
            continue;
        }
        bound = truncation_bound_tail(args, n);
        if bound <= eps {
            let terms_used = n + 1;
            let rounding = f64::EPSILON * (1.0 + terms_used as f64 * max_term);
            let error_bound = bound + rounding;
            let value = clamp_probability(1.0 - sum.value(), error_bound, Method::Laguerre)?;
            return Ok(EvalReport { value, terms_used, error_bound, method: Method::Laguerre });
        }
    }
    Err(Error::NonConvergence { terms: policy.max_terms(), bound, target: eps })
}

/// The partial sums `1 - Σ_{n<=n0}` for `n0 = 0..=n_max`, unclamped and
/// without conditioning checks.
pub fn laguerre_partial_sums(args: &MarcumArgs, n_max: usize) -> Result<Vec<f64>> {
    args.require_positive_a("Laguerre series")?;
    let mut coeffs = CoeffSource::new(args, None);
    let mut powers = PowerSeq::new(args.nu(), args.y());
    let mut sum = CompensatedSum::new();
    Ok((0..=n_max)
        .map(|_| {
            sum.add(coeffs.next().times(powers.next()).to_f64());
            1.0 - sum.value()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{brute_laguerre_sum, gamma, laguerre, LaguerreIndex};

    fn args(nu: f64, a: f64, b: f64) -> MarcumArgs {
        MarcumArgs::new(nu, a, b).unwrap()
    }

    fn policy(eps: f64) -> TruncationPolicy {
        TruncationPolicy::new(eps, 500).unwrap()
    }

    #[test]
    fn initial_conditions() {
        let s = p_init(1.0, 0.0, 1.0);
        assert_eq!((s.p_prev, s.p_curr), (1.0, 0.5));
        assert_eq!(p_init(2.0, 2.0, 1.0).p_curr, 0.0);
        let s = p_init(7.7, 2.42, -3.38);
        assert!(((s.p_prev - 1.0 / gamma(8.7).unwrap()) * gamma(8.7).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn step_examples() {
        let s = p_step(p_init(1.0, 0.0, 1.0), 1.0, 0.0, 1.0);
        assert_eq!(s.n, 2);
        assert!((s.p_curr - 1.0 / 6.0).abs() < 1e-16);
        let s = p_step(p_init(2.0, 1.0, 0.0), 2.0, 1.0, 0.0);
        assert_eq!(s.p_curr, 0.0);
    }

    #[test]
    fn step_matches_definition() {
        let (nu, ap, bp) = (3.0, 0.72, -1.28);
        let mut s = p_init(nu, ap, bp);
        while s.n < 40 {
            s = p_step(s, nu, ap, bp);
            let n = s.n;
            let l = brute_laguerre_sum(LaguerreIndex::new(n, nu - 1.0).unwrap(), ap);
            let scale = bp.abs().powi(n as i32) / gamma(nu + n as f64 + 1.0).unwrap();
            let want = bp.powi(n as i32) * l / gamma(nu + n as f64 + 1.0).unwrap();
            assert!((s.p_curr - want).abs() <= 1e-11 * scale * l.abs().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn reproduces_tabulated_values() {
        let cases = [
            (1.0, 0.2, 0.6, 0.838_249_985_438_908),
            (3.0, 1.2, 1.6, 0.916_936_068_900_377),
            (7.7, 2.2, 2.6, 0.993_735_633_182_201),
        ];
        for (nu, a, b, want) in cases {
            let r = eval_laguerre_series(&args(nu, a, b), &policy(1e-13), None).unwrap();
            assert!((r.value - want).abs() < 1e-13, "nu = {nu}: {} vs {want}", r.value);
            assert_eq!(r.method, Method::Laguerre);
            assert!(r.error_bound < 1e-12);
        }
    }

    #[test]
    fn zero_threshold_gives_one() {
        for nu in [0.3, 1.0, 4.5] {
            let r = eval_laguerre_series(&args(nu, 1.3, 0.0), &policy(1e-13), None).unwrap();
            assert_eq!(r.value, 1.0);
            assert!(r.error_bound <= f64::EPSILON);
            assert_eq!(r.terms_used, 2);
        }
    }

    #[test]
    fn rejects_zero_a_and_mismatched_cache() {
        let err = eval_laguerre_series(&args(1.0, 0.0, 1.0), &policy(1e-12), None).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let cache = cache_build(1.0, 0.3, 10).unwrap();
        let err =
            eval_laguerre_series(&args(1.0, 0.2, 1.0), &policy(1e-12), Some(&cache)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn non_convergence_is_reported() {
        let p = TruncationPolicy::new(1e-15, 3).unwrap();
        let err = eval_laguerre_series(&args(2.0, 1.2, 1.6), &p, None).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { terms: 3, .. }));
    }

    #[test]
    fn large_threshold_is_ill_conditioned() {
        let err = eval_laguerre_series(&args(1.0, 1.0, 10.0), &policy(1e-12), None).unwrap_err();
        assert!(matches!(err, Error::IllConditioned(_)));
        let err = eval_laguerre_series(&args(1.0, 2.0, 5.0), &policy(1e-12), None).unwrap_err();
        assert!(matches!(err, Error::IllConditioned(_)));
        assert!(eval_laguerre_series_unguarded(&args(1.0, 2.0, 5.0), &policy(1e-12), None).is_ok());
    }

    #[test]
    fn truncation_bound_examples() {
        assert_eq!(truncation_bound(&args(1.0, 2.0, 0.0), 5), 0.0);
        let want = (0.18f64 - 0.01).exp() / 11.0 * 0.18;
        assert!((truncation_bound(&args(1.0, 0.2, 0.6), 10) - want).abs() < 1e-16);
        let want = 2.0 * (0.5f64 - 0.25).exp() / 4.0 * 0.5f64.powf(1.5);
        assert!((truncation_bound(&args(0.5, 1.0, 1.0), 4) - want).abs() < 1e-16);
    }

    #[test]
    fn tail_bound_never_exceeds_relaxed_bound() {
        for nu in [0.3, 0.5, 1.0, 2.0, 7.7] {
            for a in [0.2, 1.2, 3.0] {
                for b in [0.6, 1.6, 2.6, 4.0] {
                    let args = args(nu, a, b);
                    for n0 in 1..60 {
                        let tail = truncation_bound_tail(&args, n0);
                        let relaxed = truncation_bound(&args, n0);
                        assert!(tail <= relaxed * (1.0 + 1e-12), "{args:?} n0 = {n0}");
                    }
                }
            }
        }
    }

    #[test]
    fn required_terms_inverts_relaxed_bound() {
        assert_eq!(required_terms(&args(2.0, 1.0, 0.0), 1e-10).unwrap(), 1);
        // relaxed bound 0.18 e^{0.17}/(n0+1) <= 1e-8 needs about 2.1e7 terms: past the cap
        let err = required_terms(&args(1.0, 0.2, 0.6), 1e-12).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
        let a = args(1.0, 0.2, 0.6);
        let n0 = required_terms(&a, 1e-4).unwrap();
        assert!(truncation_bound(&a, n0) <= 1e-4 && truncation_bound(&a, n0 - 1) > 1e-4);
        // closed form: ceil(0.18 e^{0.17} / 1e-4 - 1)
        let k = 0.18 * 0.17f64.exp();
        assert_eq!(n0, (k / 1e-4 - 1.0).ceil() as usize);
        let a = args(0.5, 1.0, 1.0);
        let n0 = required_terms(&a, 1e-3).unwrap();
        assert!(truncation_bound(&a, n0) <= 1e-3 && truncation_bound(&a, n0 - 1) > 1e-3);
    }

    #[test]
    fn required_terms_tail_is_small() {
        let a = args(5.0, 2.2, 2.6);
        let n0 = required_terms_tail(&a, 1e-14, 500).unwrap();
        assert!(n0 < 40);
        assert!(truncation_bound_tail(&a, n0) <= 1e-14);
        assert!(truncation_bound_tail(&a, n0 - 1) > 1e-14);
    }

    #[test]
    fn cache_single_coefficient() {
        let cache = cache_build(1.0, 0.2, 0).unwrap();
        assert_eq!(cache.len(), 1);
        let want = (-0.02f64).exp() / gamma(2.0).unwrap();
        assert!((cache.coefficient(0).unwrap() - want).abs() < 1e-16);
    }

    #[test]
    fn cache_coefficients_match_laguerre_values() {
        for (nu, a) in [(0.5, 0.7), (3.0, 1.2), (7.7, 2.2), (2.0, 6.0)] {
            let cache = cache_build(nu, a, 60).unwrap();
            let x = 0.5 * a * a;
            for n in 0..=60 {
                let c = cache.coefficient(n).unwrap();
                let l = laguerre(LaguerreIndex::new(n, nu - 1.0).unwrap(), x);
                let g = (ln_gamma(nu + n as f64 + 1.0) + x).exp();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!(
                    (sign * c * g - l).abs() <= 1e-12 * l.abs().max(1.0),
                    "nu = {nu}, a = {a}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn cached_and_uncached_are_bit_identical() {
        let p = policy(1e-13);
        let short = cache_build(3.0, 1.2, 5).unwrap();
        let long = cache_build(3.0, 1.2, 40).unwrap();
        for b in [0.0, 0.4, 0.6, 1.6, 2.4] {
            let a = args(3.0, 1.2, b);
            let plain = eval_laguerre_series(&a, &p, None).unwrap();
            assert_eq!(plain, eval_laguerre_series(&a, &p, Some(&short)).unwrap());
            assert_eq!(plain, eval_laguerre_series(&a, &p, Some(&long)).unwrap());
        }
    }

    #[test]
    fn huge_first_argument_does_not_underflow() {
        // e^{-x} alone underflows at x = 800
        let cache = cache_build(2.0, 40.0, 3).unwrap();
        let c0 = cache.coeffs[0];
        let ln_c0 = c0.mant.ln() + c0.exp2 as f64 * std::f64::consts::LN_2;
        assert!((ln_c0 - (-800.0 - ln_gamma(3.0))).abs() < 1e-9);
    }

    #[test]
    fn pent_form_for_first_order() {
        // P_{n+1} = (2n+1-a)b/((n+1)(n+2)) P_n - n b²/((n+1)²(n+2)) P_{n-1}
        fn pent_q1(a: f64, b: f64) -> f64 {
            let (x, y) = (0.5 * a * a, 0.5 * b * b);
            let t = -y;
            let (mut prev, mut curr) = (1.0, (1.0 - x) * t / 2.0);
            let mut sum = prev + curr;
            for n in 1..200 {
                let n = n as f64;
                let next = (2.0 * n + 1.0 - x) * t / ((n + 1.0) * (n + 2.0)) * curr
                    - n * t * t / ((n + 1.0) * (n + 1.0) * (n + 2.0)) * prev;
                prev = curr;
                curr = next;
                sum += next;
            }
            1.0 - y * (-x).exp() * sum
        }
        for a in [0.2, 0.7, 1.2, 2.2] {
            for b in [0.3, 0.6, 1.6, 2.6] {
                let r = eval_laguerre_series(&args(1.0, a, b), &policy(1e-15), None).unwrap();
                assert!((r.value - pent_q1(a, b)).abs() <= 1e-13, "a = {a}, b = {b}");
            }
        }
    }

    #[test]
    fn partial_sums_end_at_full_value() {
        let a = args(5.0, 2.2, 2.6);
        let sums = laguerre_partial_sums(&a, 60).unwrap();
        assert_eq!(sums.len(), 61);
        let full = eval_laguerre_series(&a, &policy(1e-14), None).unwrap().value;
        assert!((sums[60] - full).abs() < 1e-15);
    }

    #[test]
    fn ldexp_is_exact_scaling() {
        assert_eq!(ldexp(1.5, 3), 12.0);
        assert_eq!(ldexp(1.0, -1074), 5e-324);
        assert_eq!(ldexp(1.0, 2000), f64::INFINITY);
        assert_eq!(ldexp(ldexp(3.0, -1020), 1020), 3.0);
        assert_eq!(exponent_of(12.0), 3);
    }
}
