//! Tolerance-mediated comparison of reals.
//!
//! Every inequality in the axiom checkers goes through a [`Tolerance`], so a
//! single policy decides what "equal", "less or equal" and "strictly
//! positive" mean in floating point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TolMode {
    Absolute,
    Relative,
}

/// Comparison tolerance.
///
/// * absolute: `a == b` iff `|a - b| <= eps`
/// * relative: `a == b` iff `|a - b| <= eps * max(1, |a|, |b|)`
///
/// A strict inequality `a < b` is tested as `a <= b - margin`, so values
/// inside the margin band count as *not* strictly separated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    eps: f64,
    mode: TolMode,
}

impl Tolerance {
    pub fn new(eps: f64, mode: TolMode) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::input(format!(
                "tolerance epsilon must be a finite nonnegative real, got {eps}"
            )));
        }
        Ok(Tolerance { eps, mode })
    }

    pub fn absolute(eps: f64) -> Result<Self> {
        Tolerance::new(eps, TolMode::Absolute)
    }

    pub fn relative(eps: f64) -> Result<Self> {
        Tolerance::new(eps, TolMode::Relative)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn mode(&self) -> TolMode {
        self.mode
    }

    /// The comparison margin for a pair of operands.
    pub fn margin(&self, a: f64, b: f64) -> f64 {
        match self.mode {
            TolMode::Absolute => self.eps,
            TolMode::Relative => self.eps * 1.0_f64.max(a.abs()).max(b.abs()),
        }
    }

    pub fn eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.margin(a, b)
    }

    /// Non-strict `a <= b` with margin.
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.margin(a, b)
    }

    /// Strict `a < b`: requires separation by at least the margin.
    pub fn lt_strict(&self, a: f64, b: f64) -> bool {
        a <= b - self.margin(a, b)
    }

    /// Strict `a > 0` with margin.
    pub fn positive(&self, a: f64) -> bool {
        self.lt_strict(0.0, a)
    }
}

impl Default for Tolerance {
    /// 1e-9, relative.
    fn default() -> Self {
        Tolerance {
            eps: 1e-9,
            mode: TolMode::Relative,
        }
    }
}
