//! Magnitudes carried in base-2 log space.
//!
//! Several certified error bounds carry factors like 2^{8d²} or 2^{(2n)^{45d}}
//! that overflow every float format for nontrivial parameters. Such bounds are
//! represented as a normalized (mantissa, exponent) pair m·2^e with
//! m ∈ [1, 2), and compared in log space; they are never collapsed to `f64`
//! unless they happen to fit.

use std::cmp::Ordering;

/// A non-negative magnitude m·2^e with mantissa m ∈ [1, 2) (or exactly zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMag {
    mantissa: f64,
    /// Binary exponent. `f64` so that towers like (2n)^{45d} (whose *exponent*
    /// overflows i64 comfortably) are still representable.
    exp2: f64,
}

impl LogMag {
    pub const ZERO: LogMag = LogMag {
        mantissa: 0.0,
        exp2: 0.0,
    };

    /// Build from an ordinary finite non-negative float.
    pub fn from_f64(v: f64) -> LogMag {
        assert!(v.is_finite() && v >= 0.0, "LogMag requires finite v >= 0");
        if v == 0.0 {
            return LogMag::ZERO;
        }
        let e = v.log2().floor();
        LogMag {
            mantissa: v / e.exp2(),
            exp2: e,
        }
        .normalized()
    }

    /// Build directly as 2^e.
    pub fn exp2_of(e: f64) -> LogMag {
        LogMag {
            mantissa: 1.0,
            exp2: e,
        }
    }

    fn normalized(mut self) -> LogMag {
        if self.mantissa == 0.0 {
            return LogMag::ZERO;
        }
        while self.mantissa >= 2.0 {
            self.mantissa /= 2.0;
            self.exp2 += 1.0;
        }
        while self.mantissa < 1.0 {
            self.mantissa *= 2.0;
            self.exp2 -= 1.0;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    /// log2 of the magnitude (−∞ for zero).
    pub fn log2(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.exp2 + self.mantissa.log2()
        }
    }

    pub fn mul(self, other: LogMag) -> LogMag {
        if self.is_zero() || other.is_zero() {
            return LogMag::ZERO;
        }
        LogMag {
            mantissa: self.mantissa * other.mantissa,
            exp2: self.exp2 + other.exp2,
        }
        .normalized()
    }

    pub fn mul_f64(self, v: f64) -> LogMag {
        self.mul(LogMag::from_f64(v))
    }

    /// Integer power.
    pub fn powi(self, k: u32) -> LogMag {
        let mut acc = LogMag::from_f64(1.0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Collapse to `f64`; ±inf / 0 when out of range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.mantissa * self.exp2.exp2()
        }
    }
}

impl PartialOrd for LogMag {
    fn partial_cmp(&self, other: &LogMag) -> Option<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            // Lexicographic on (exponent, mantissa): at huge exponents the
            // mantissa's log2 contribution would be absorbed by rounding.
            (false, false) => (self.exp2, self.mantissa).partial_cmp(&(other.exp2, other.mantissa)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_small_values() {
        for v in [1.0, 0.5, 3.25, 1e-9, 7.5e11] {
            let m = LogMag::from_f64(v);
            assert!((m.to_f64() - v).abs() <= v * 1e-15);
        }
        assert_eq!(LogMag::from_f64(0.0).to_f64(), 0.0);
    }

    #[test]
    fn multiplication_adds_logs() {
        let a = LogMag::from_f64(6.0);
        let b = LogMag::from_f64(7.0);
        assert!((a.mul(b).to_f64() - 42.0).abs() < 1e-12);
    }

    #[test]
    fn astronomical_exponents_compare() {
        // 2^(10^30) vs 2^(2·10^30): far beyond f64 range, still ordered.
        let a = LogMag::exp2_of(1e30);
        let b = LogMag::exp2_of(2e30);
        assert!(a < b);
        // Same exponent, different mantissa: mantissa breaks the tie even when
        // its log2 contribution would vanish against the exponent.
        let c = LogMag::exp2_of(1e30).mul_f64(1.5);
        assert!(a < c && c < b);
        assert!(a.to_f64().is_infinite()); // collapsing is lossy, comparing is not
    }

    #[test]
    fn powers() {
        let a = LogMag::from_f64(2.0).powi(10);
        assert_eq!(a.to_f64(), 1024.0);
    }
}
