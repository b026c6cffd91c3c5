//! Scalar comparison policy.
//!
//! The testers' "reject if the statistic is nonzero / exceeds a threshold"
//! checks are stated over ℝ. On the exact-rational path (`Exact`) they are
//! realized literally; on the floating-point path (`Tolerant`) a zero test
//! must absorb rounding noise, which scales with the magnitude of the summed
//! terms rather than with the final (nearly cancelled) value. Every tolerant
//! comparison therefore takes an explicit `scale` — callers pass the sum of
//! absolute values of the terms that produced the statistic.

use serde::{Deserialize, Serialize};

/// How scalar equality / zero-ness is decided.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum Comparison {
    /// Bit-exact comparison; used by the discrete tester (all-rational path)
    /// and by rational-grid unit tests.
    Exact,
    /// Relative/absolute tolerance comparison for floating-point statistics.
    Tolerant { tau_rel: f64, tau_abs: f64 },
}

impl Default for Comparison {
    /// The default float policy: τ_rel = 1e−9, τ_abs = 1e−12.
    fn default() -> Self {
        Comparison::Tolerant {
            tau_rel: 1e-9,
            tau_abs: 1e-12,
        }
    }
}

impl Comparison {
    /// Tolerance granted to a statistic whose constituent terms have total
    /// magnitude `scale`. Zero under `Exact`.
    pub fn slack(&self, scale: f64) -> f64 {
        match *self {
            Comparison::Exact => 0.0,
            Comparison::Tolerant { tau_rel, tau_abs } => tau_abs.max(tau_rel * scale.abs()),
        }
    }

    /// Is `value` zero, given that it was produced by summing terms of total
    /// magnitude `scale`?
    pub fn is_zero(&self, value: f64, scale: f64) -> bool {
        match *self {
            Comparison::Exact => value == 0.0,
            Comparison::Tolerant { .. } => value.abs() <= self.slack(scale),
        }
    }

    /// Are `a` and `b` equal? Uses `max(|a|,|b|)` as the scale.
    pub fn eq(&self, a: f64, b: f64) -> bool {
        self.is_zero(a - b, a.abs().max(b.abs()))
    }

    /// Does `value` exceed `threshold` by more than the granted slack?
    /// This is the tolerant form of the testers' `|stat| > θ` checks.
    pub fn exceeds(&self, value: f64, threshold: f64, scale: f64) -> bool {
        value.abs() > threshold + self.slack(scale)
    }
}
