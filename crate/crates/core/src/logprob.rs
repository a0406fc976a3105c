//! Natural-log probabilities.
//!
//! Multi-copy bounds reach 1e-30 and below at the figure parameters, so every
//! bound is carried as `ln P`. Values under `e^-700` are never exponentiated.

use std::f64::consts::{LN_10, LN_2};
use std::fmt;

/// Below this, `exp` would leave the normal double range.
pub const UNDERFLOW_LN: f64 = -700.0;

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LnProb(pub f64);

/// Result of exponentiating an [`LnProb`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponentiated {
    pub value: f64,
    /// Set when the log value was below [`UNDERFLOW_LN`] and `value` was forced to 0.
    pub underflow: bool,
}

impl LnProb {
    pub const HALF: LnProb = LnProb(-LN_2);
    /// Perfect discrimination.
    pub const ZERO: LnProb = LnProb(f64::NEG_INFINITY);

    pub fn from_prob(p: f64) -> LnProb {
        LnProb(p.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn log10(self) -> f64 {
        self.0 / LN_10
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn exp_checked(self) -> Exponentiated {
        if self.0 < UNDERFLOW_LN {
            Exponentiated { value: 0.0, underflow: true }
        } else {
            Exponentiated { value: self.0.exp(), underflow: false }
        }
    }

    /// `ln(½ · x^copies)` from the per-copy `ln x`.
    pub fn half_power(ln_per_copy: f64, copies: usize) -> LnProb {
        if ln_per_copy == f64::NEG_INFINITY {
            return LnProb::ZERO;
        }
        LnProb(-LN_2 + copies as f64 * ln_per_copy)
    }
}

impl fmt::Display for LnProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `ln(e^a + e^b)` without overflow or underflow.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}
