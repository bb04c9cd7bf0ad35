//! Argument, policy, and report types shared by every evaluator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Arguments `(ν, a, b)` of `Q_ν(a, b)` with `ν > 0`, `a >= 0`, `b >= 0`.
///
/// `a = 0` is representable (it is the limit case); the Laguerre and
/// Gideon–Gurland series additionally require `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarcumArgs {
    nu: f64,
    a: f64,
    b: f64,
}

impl MarcumArgs {
    pub fn new(nu: f64, a: f64, b: f64) -> Result<Self> {
        if !(nu > 0.0) || nu.is_infinite() {
            return Err(domain(format!("order must satisfy nu > 0, got nu = {nu}")));
        }
        if !(a >= 0.0) || a.is_infinite() {
            return Err(domain(format!("first argument must satisfy a >= 0, got a = {a}")));
        }
        if !(b >= 0.0) || b.is_infinite() {
            return Err(domain(format!("second argument must satisfy b >= 0, got b = {b}")));
        }
        Ok(Self { nu, a, b })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `a²/2`, the Poisson mean / Laguerre argument.
    pub fn x(&self) -> f64 {
        0.5 * self.a * self.a
    }

    /// `b²/2`, the gamma-distribution threshold.
    pub fn y(&self) -> f64 {
        0.5 * self.b * self.b
    }

    pub(crate) fn require_positive_a(&self, who: &str) -> Result<()> {
        if self.a > 0.0 {
            Ok(())
        } else {
            Err(domain(format!("{who} requires a > 0, got a = {}", self.a)))
        }
    }
}

/// Absolute error target and hard term cap for a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    target_eps: f64,
    max_terms: usize,
}

impl TruncationPolicy {
    pub const DEFAULT_MAX_TERMS: usize = 500;

    pub fn new(target_eps: f64, max_terms: usize) -> Result<Self> {
        if !(target_eps > 0.0) || target_eps.is_infinite() {
            return Err(domain(format!("target_eps must be > 0, got {target_eps}")));
        }
        if max_terms < 2 {
            return Err(domain(format!("max_terms must be >= 2, got {max_terms}")));
        }
        Ok(Self { target_eps, max_terms })
    }

    pub fn target_eps(&self) -> f64 {
        self.target_eps
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { target_eps: 1e-13, max_terms: Self::DEFAULT_MAX_TERMS }
    }
}

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Laguerre,
    Canonical,
    GideonGurland,
    Quadrature,
}

impl Method {
    pub const ALL: [Method; 4] =
        [Method::Laguerre, Method::Canonical, Method::GideonGurland, Method::Quadrature];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Laguerre => "laguerre",
            Method::Canonical => "canonical",
            Method::GideonGurland => "gideon_gurland",
            Method::Quadrature => "quadrature",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| domain(format!("unknown method {s:?}")))
    }
}

/// Result of one evaluation.
///
/// `error_bound` is a guaranteed bound for the Laguerre and canonical
/// series (truncation bound plus a rounding allowance), the quadrature
/// error estimate for the oracle, and a heuristic residual estimate for
/// the Gideon–Gurland series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub value: f64,
    pub terms_used: usize,
    pub error_bound: f64,
    pub method: Method,
}

/// Clamp a probability that left `[0, 1]` by at most `slack`; anything
/// further out is an internal inconsistency.
pub(crate) fn clamp_probability(value: f64, slack: f64, method: Method) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::Consistency(format!("{method} produced non-finite value {value}")));
    }
    if value < 0.0 {
        if -value <= slack {
            return Ok(0.0);
        }
    } else if value > 1.0 {
        if value - 1.0 <= slack {
            return Ok(1.0);
        }
    } else {
        return Ok(value);
    }
    Err(Error::Consistency(format!(
        "{method} produced {value}, outside [0, 1] by more than its error bound {slack:e}"
    )))
}
