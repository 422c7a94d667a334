use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Working-precision selection for pmf and divergence evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionMode {
    Binary64,
    Extended,
}

impl std::fmt::Display for PrecisionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PrecisionMode::Binary64 => write!(f, "binary64"),
            PrecisionMode::Extended => write!(f, "extended"),
        }
    }
}

/// Summation order is fixed crate-wide: probabilities are sorted ascending
/// and sums are Neumaier-compensated, so results are permutation-invariant
/// bit for bit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompensatedAscending;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub mode: PrecisionMode,
    /// Decimal digits carried in extended mode. The extended scalar is a
    /// double-double, good for 31 digits; requests outside [30, 31] are
    /// rejected rather than silently honored.
    pub extended_digits: u32,
    pub sum_strategy: CompensatedAscending,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self {
            mode: PrecisionMode::Binary64,
            extended_digits: 31,
            sum_strategy: CompensatedAscending,
        }
    }
}

impl PrecisionPolicy {
    pub fn binary64() -> Self {
        Self::default()
    }

    pub fn extended() -> Self {
        Self {
            mode: PrecisionMode::Extended,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == PrecisionMode::Extended {
            if self.extended_digits < 30 {
                return Err(Error::InvalidConfig(format!(
                    "extended mode requires >= 30 digits, got {}",
                    self.extended_digits
                )));
            }
            if self.extended_digits > 31 {
                return Err(Error::InvalidConfig(format!(
                    "extended scalar carries 31 digits, cannot honor {}",
                    self.extended_digits
                )));
            }
        }
        Ok(())
    }
}

/// Truncation control for sums over the infinite Poisson support.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Maximum omitted-mass contribution allowed per infinite sum; the
    /// certified bound on what was dropped is reported, never discarded.
    pub tail_epsilon: f64,
    /// Absolute ceiling on the Poisson support index.
    pub hard_cap: Option<usize>,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_epsilon: 1e-15,
            hard_cap: None,
        }
    }
}

impl TruncationPolicy {
    /// Default ceiling: λ + 50·√(λ+1) + 200 keeps the true omitted mass far
    /// below `tail_epsilon` for every λ reachable at desk scale.
    pub fn cap_for(&self, lambda: f64) -> usize {
        match self.hard_cap {
            Some(c) => c,
            None => (lambda + 50.0 * (lambda + 1.0).sqrt() + 200.0).ceil() as usize,
        }
    }

    pub fn with_cap(self, cap: usize) -> Self {
        Self {
            hard_cap: Some(cap),
            ..self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_digit_validation() {
        assert!(PrecisionPolicy::extended().validate().is_ok());
        let mut p = PrecisionPolicy::extended();
        p.extended_digits = 29;
        assert!(p.validate().is_err());
        p.extended_digits = 50;
        assert!(p.validate().is_err());
    }

    #[test]
    fn default_cap_scales_with_lambda() {
        let t = TruncationPolicy::default();
        assert_eq!(t.cap_for(0.0), 250);
        assert!(t.cap_for(100.0) > 300);
        assert_eq!(t.with_cap(64).cap_for(1e6), 64);
    }
}
