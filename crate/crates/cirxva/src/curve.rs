//! Piecewise-constant rate curves with exact integrals.

use crate::error::{domain, Result};

/// A right-open piecewise-constant function of time on `[0, ∞)`.
///
/// Segment `i` applies on `[starts[i], starts[i+1])`; the last segment
/// extends to infinity, so the curve is defined on all of `[0, T]` for any
/// deal maturity. Integrals are exact sums of panel widths times levels.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    starts: Vec<f64>,
    values: Vec<f64>,
}

impl RateCurve {
    /// Curve equal to `value` at all times.
    pub fn constant(value: f64) -> Self {
        RateCurve {
            starts: vec![0.0],
            values: vec![value],
        }
    }

    /// Piecewise-constant curve from `(start_time, value)` pairs.
    ///
    /// The first start must be 0 and starts must be strictly increasing.
    pub fn piecewise(segments: &[(f64, f64)]) -> Result<Self> {
        if segments.is_empty() {
            return Err(domain("rate curve needs at least one segment"));
        }
        if segments[0].0 != 0.0 {
            return Err(domain("rate curve must start at t = 0"));
        }
        for w in segments.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(domain("rate curve segment starts must be strictly increasing"));
            }
        }
        if segments.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(domain("rate curve segments must be finite"));
        }
        Ok(RateCurve {
            starts: segments.iter().map(|s| s.0).collect(),
            values: segments.iter().map(|s| s.1).collect(),
        })
    }

    /// Level at time `t` (clamped to the first segment for `t < 0`).
    pub fn value(&self, t: f64) -> f64 {
        match self.starts.iter().rposition(|&s| s <= t) {
            Some(i) => self.values[i],
            None => self.values[0],
        }
    }

    /// Exact integral over `[a, b]`; `a > b` yields the signed integral.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        if a > b {
            return -self.integral(b, a);
        }
        let mut total = 0.0;
        for i in 0..self.starts.len() {
            let lo = self.starts[i].max(a);
            let hi = if i + 1 < self.starts.len() {
                self.starts[i + 1].min(b)
            } else {
                b
            };
            if hi > lo {
                total += self.values[i] * (hi - lo);
            }
        }
        total
    }

    /// True when the curve is a single constant segment.
    pub fn is_constant(&self) -> bool {
        self.values.len() == 1
    }
}
