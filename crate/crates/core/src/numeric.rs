//! Float comparison rules shared by solvers and checkers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// Global comparison tolerance for objective values.
pub const TAU: f64 = 1e-9;

/// How inequalities between sums of oracle values are decided.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Absolute tolerance: a violation needs a margin larger than the tolerance.
    Tolerance(f64),
    /// Exact rational arithmetic on the binary values of the floats.
    Exact,
}

impl Default for Comparison {
    fn default() -> Self {
        Comparison::Tolerance(TAU)
    }
}

impl Comparison {
    fn tolerance(self) -> f64 {
        match self {
            Comparison::Tolerance(t) => t,
            Comparison::Exact => 0.0,
        }
    }

    /// Decides `sum(lhs) >= sum(rhs)`.
    pub fn sums_ge(self, lhs: &[f64], rhs: &[f64]) -> bool {
        match self {
            Comparison::Exact => exact_sum(lhs) >= exact_sum(rhs),
            _ => lhs.iter().sum::<f64>() >= rhs.iter().sum::<f64>() - self.tolerance(),
        }
    }

    /// Decides `lhs_a - lhs_b >= rhs_a - rhs_b`, the shape of every marginal-gain inequality.
    pub fn gains_ge(self, lhs_a: f64, lhs_b: f64, rhs_a: f64, rhs_b: f64) -> bool {
        self.sums_ge(&[lhs_a, rhs_b], &[rhs_a, lhs_b])
    }
}

fn exact_sum(values: &[f64]) -> BigRational {
    values.iter().fold(BigRational::zero(), |acc, &v| {
        acc + BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    })
}

/// `a >= b` up to [`TAU`].
pub fn ge(a: f64, b: f64) -> bool {
    a >= b - TAU
}

/// `|a - b| <= TAU`.
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_mode_sees_float_noise() {
        // 0.1 + 0.2 != 0.3 in binary floating point
        assert!(Comparison::default().sums_ge(&[0.3], &[0.1, 0.2]));
        assert!(!Comparison::Exact.sums_ge(&[0.3], &[0.1, 0.2]));
        assert!(Comparison::Exact.sums_ge(&[0.1, 0.2], &[0.3]));
    }

    #[test]
    fn tolerance_margin() {
        assert!(Comparison::Tolerance(1e-3).sums_ge(&[1.0], &[1.0005]));
        assert!(!Comparison::Tolerance(1e-3).sums_ge(&[1.0], &[1.002]));
    }
}
