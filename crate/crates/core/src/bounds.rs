//! Uniform bounds on generalized Laguerre polynomials and the exponential
//! series tail inequality behind the truncation estimates.
//!
//! These are exposed as plain functions so they can be checked numerically
//! against [`crate::special::laguerre`] over parameter sweeps.

use crate::error::{domain, Result};
use crate::special::{ln_gamma, LaguerreIndex};

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(domain(format!("bound requires x > 0, got {x}")));
    }
    Ok(())
}

/// `ln[Γ(α+n+1) / (n! Γ(α+1))]`, the log of `L_n^{(α)}(0)`.
fn ln_binomial(idx: LaguerreIndex) -> f64 {
    let n = idx.n() as f64;
    let alpha = idx.alpha();
    ln_gamma(alpha + n + 1.0) - ln_gamma(n + 1.0) - ln_gamma(alpha + 1.0)
}

/// `|L_n^{(α)}(x)| <= Γ(α+n+1)/(n! Γ(α+1)) e^{x/2}` for `α >= 0`, `x > 0`.
pub fn szego_bound(idx: LaguerreIndex, x: f64) -> Result<f64> {
    if idx.alpha() < 0.0 {
        return Err(domain(format!("szego_bound requires alpha >= 0, got {}", idx.alpha())));
    }
    check_x(x)?;
    Ok((ln_binomial(idx) + 0.5 * x).exp())
}

/// `|L_n^{(α)}(x)| <= Γ(α+n+1)/n! (x/2)^{-α} e^{x/2}` for `α >= 0`, `x > 0`.
pub fn love_bound(idx: LaguerreIndex, x: f64) -> Result<f64> {
    let alpha = idx.alpha();
    if alpha < 0.0 {
        return Err(domain(format!("love_bound requires alpha >= 0, got {alpha}")));
    }
    check_x(x)?;
    let n = idx.n() as f64;
    Ok((ln_gamma(alpha + n + 1.0) - ln_gamma(n + 1.0) - alpha * (0.5 * x).ln() + 0.5 * x).exp())
}

/// `|L_n^{(α)}(x)| <= (2 - Γ(α+n+1)/(n! Γ(α+1))) e^{x/2}` for `-1 < α <= 0`, `x > 0`.
pub fn szego_small_order_bound(idx: LaguerreIndex, x: f64) -> Result<f64> {
    if idx.alpha() > 0.0 {
        return Err(domain(format!(
            "szego_small_order_bound requires -1 < alpha <= 0, got {}",
            idx.alpha()
        )));
    }
    check_x(x)?;
    Ok((2.0 - ln_binomial(idx).exp()) * (0.5 * x).exp())
}

/// Tail of the exponential series after the degree-`n` partial sum, and
/// its upper bound `x e^x / n`.
///
/// Returns `(gap, bound)` with `gap = e^x - Σ_{k=0}^n x^k/k!`. The gap is
/// summed forward from `k = n+1`, never formed as a difference.
pub fn sewell_gap(x: f64, n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(domain("sewell_gap requires n >= 1"));
    }
    if !(x >= 0.0) || x.is_infinite() {
        return Err(domain(format!("sewell_gap requires finite x >= 0, got {x}")));
    }
    Ok((exp_tail(x, n + 1), x * x.exp() / n as f64))
}

/// `Σ_{k >= from} x^k / k!` for `x >= 0`.
pub(crate) fn exp_tail(x: f64, from: usize) -> f64 {
    if x == 0.0 {
        return if from == 0 { 1.0 } else { 0.0 };
    }
    let from_f = from as f64;
    let mut term = (from_f * x.ln() - ln_gamma(from_f + 1.0)).exp();
    if term == 0.0 {
        return 0.0;
    }
    let mut sum = term;
    let mut k = from_f;
    loop {
        k += 1.0;
        term *= x / k;
        sum += term;
        if k > x && term <= 1e-17 * sum {
            break;
        }
    }
    sum
}
