//! Two further series for `Q_ν(a,b)` and the `a → 0` limit.
//!
//! * Canonical (Poisson-mixture) form, with `x = a²/2`, `y = b²/2`:
//!   `Q = Σ_n e^{-x} x^n/n! · Γ(ν+n, y)/Γ(ν+n)`.
//! * Gideon–Gurland-type form, a Laguerre expansion in powers of `x`:
//!   `Q = Γ(ν,y)/Γ(ν) - Σ_{n>=1} (-1)^n e^{-y} y^ν L_{n-1}^{(ν)}(y) / (n Γ(ν+n)) · x^n`.
//!
//! Both are independent of the Laguerre series in `y`, which makes them
//! useful as cross-checks as well as alternative evaluators.

use crate::args::{clamp_probability, EvalReport, MarcumArgs, Method, TruncationPolicy};
use crate::error::{Error, Result};
use crate::special::{ln_gamma, reg_upper_gamma};
use crate::sum::CompensatedSum;

/// Steps between full-accuracy re-anchors of the forward recurrences.
const REANCHOR_EVERY: usize = 64;

/// `x = a²/2` above which the Gideon–Gurland series is refused.
pub const GG_ILL_CONDITIONED_X: f64 = 45.0;

/// `lim_{a→0} Q_ν(a,b) = Γ(ν, b²/2)/Γ(ν)`.
pub fn limit_a_zero(nu: f64, b: f64) -> Result<f64> {
    MarcumArgs::new(nu, 0.0, b)?;
    reg_upper_gamma(nu, 0.5 * b * b)
}

/// Evaluates the canonical Poisson-weighted incomplete-gamma series.
///
/// The regularized upper gamma is advanced by
/// `Q(s+1, y) = Q(s, y) + y^s e^{-y} / Γ(s+1)` and the Poisson weights by
/// their ratio; both are recomputed directly every 64 terms. The sum stops
/// once a geometric bound on the remaining Poisson mass is below the
/// target. Accepts `a = 0`.
pub fn eval_canonical(args: &MarcumArgs, policy: &TruncationPolicy) -> Result<EvalReport> {
    let (nu, x, y) = (args.nu(), args.x(), args.y());
    let eps = policy.target_eps();
    if y == 0.0 {
        return Ok(EvalReport {
            value: 1.0,
            terms_used: 1,
            error_bound: 0.0,
            method: Method::Canonical,
        });
    }

    let mut weight = 0.0;
    let mut upper = 0.0;
    let mut increment = 0.0;
    let mut sum = CompensatedSum::new();
    let mut tail = f64::INFINITY;

    for n in 0..policy.max_terms() {
        let s = nu + n as f64;
        if n % REANCHOR_EVERY == 0 {
            weight = poisson_weight(x, n);
            upper = reg_upper_gamma(s, y)?;
            increment = (s * y.ln() - y - ln_gamma(s + 1.0)).exp();
        }
        sum.add(weight * upper);

        let next_weight = if x == 0.0 { 0.0 } else { weight * x / (n as f64 + 1.0) };
        let m = n as f64 + 2.0;
        if m > x {
            // P(N > n) <= w_{n+1} (1 + x/m + (x/m)^2 + ...)
            tail = next_weight * m / (m - x);
            if tail <= eps {
                let terms_used = n + 1;
                let error_bound = tail + f64::EPSILON * terms_used as f64;
                let value = clamp_probability(sum.value(), error_bound, Method::Canonical)?;
                return Ok(EvalReport {
                    value,
                    terms_used,
                    error_bound,
                    method: Method::Canonical,
                });
            }
        }

        upper = (upper + increment).min(1.0);
        increment *= y / (s + 1.0);
        weight = next_weight;
    }
    Err(Error::NonConvergence { terms: policy.max_terms(), bound: tail, target: eps })
}

/// `e^{-x} x^n / n!`.
fn poisson_weight(x: f64, n: usize) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let n = n as f64;
    (n * x.ln() - x - ln_gamma(n + 1.0)).exp()
}

/// Evaluates the Gideon–Gurland-type series in powers of `a²/2`.
///
/// No a-priori bound is available for this expansion. The sum stops once
/// three consecutive terms are below `target_eps / 10` (and the terms are
/// past their peak); `error_bound` is the magnitude of those last three
/// terms plus a rounding allowance, an estimate rather than a guarantee.
pub fn eval_gideon_gurland(args: &MarcumArgs, policy: &TruncationPolicy) -> Result<EvalReport> {
    args.require_positive_a("Gideon-Gurland series")?;
    let (nu, x, y) = (args.nu(), args.x(), args.y());
    if x > GG_ILL_CONDITIONED_X {
        return Err(Error::IllConditioned(format!(
            "a²/2 = {x} exceeds {GG_ILL_CONDITIONED_X} for the Gideon-Gurland series"
        )));
    }
    let eps = policy.target_eps();
    let leading = reg_upper_gamma(nu, y)?;
    // e^{-y} y^ν / Γ(ν+1)
    let prefactor = if y == 0.0 { 0.0 } else { (nu * y.ln() - y - ln_gamma(nu + 1.0)).exp() };

    let mut sum = CompensatedSum::new();
    sum.add(leading);
    let mut abs_sum = leading;
    // h_n = (-x)^n Γ(ν+1)/Γ(ν+n)
    let mut h = -x;
    // L_{n-1}^{(ν)}(y) and L_{n-2}^{(ν)}(y)
    let mut lag = 1.0;
    let mut lag_prev = 0.0;
    let mut recent = [f64::INFINITY; 3];
    let mut small_run = 0;

    for n in 1..policy.max_terms() {
        let nf = n as f64;
        let term = -prefactor * h * lag / nf;
        sum.add(term);
        abs_sum += term.abs();
        recent[n % 3] = term.abs();

        if term.abs() < eps / 10.0 {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 && nf > x {
            let estimate: f64 = recent.iter().sum();
            let error_bound = estimate + f64::EPSILON * abs_sum * nf;
            let value = clamp_probability(sum.value(), error_bound, Method::GideonGurland)?;
            return Ok(EvalReport {
                value,
                terms_used: n + 1,
                error_bound,
                method: Method::GideonGurland,
            });
        }

        // advance to index n+1
        h *= -x / (nu + nf);
        // k L_k = (2k + ν - 1 - y) L_{k-1} - (k + ν - 1) L_{k-2}, here k = n
        let k = nf;
        let next = if n == 1 {
            1.0 + nu - y
        } else {
            ((2.0 * k + nu - 1.0 - y) * lag - (k + nu - 1.0) * lag_prev) / k
        };
        lag_prev = lag;
        lag = next;
    }
    Err(Error::NonConvergence {
        terms: policy.max_terms(),
        bound: recent.iter().sum(),
        target: eps,
    })
}
