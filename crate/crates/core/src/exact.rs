//! Brute-force optima by full enumeration of the feasible region.

use serde::{Deserialize, Serialize};

use crate::constraint::Constraint;
use crate::error::{invalid, LatmaxError, Result};
use crate::lattice::{enumeration_limit, for_each_ideal, for_each_lattice_point, Point};
use crate::numeric::TAU;
use crate::oracle::{Domain, ValueOracle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub value: f64,
    /// First maximizer in enumeration order.
    pub argmax: Point,
    /// Points visited, feasible or not.
    pub enumerated: u64,
    pub feasible: u64,
    pub constraint: String,
}

/// Maximum of `oracle` over the points admitted by `constraint`, visiting
/// lattice points in mixed-radix order and ideals in depth-first order.
pub fn exact_max(oracle: &ValueOracle, constraint: &Constraint) -> Result<ExactResult> {
    let mut best: Option<(f64, Point)> = None;
    let mut feasible = 0u64;
    let mut err = None;
    let enumerated = match oracle.domain() {
        Domain::IntLattice { n, bound } => for_each_lattice_point(*n, *bound, enumeration_limit(), |x| {
            if err.is_some() {
                return;
            }
            match constraint.admits_point(x.coords()) {
                Ok(true) => {}
                Ok(false) => return,
                Err(e) => {
                    err = Some(e);
                    return;
                }
            }
            feasible += 1;
            match oracle.eval_lattice(x) {
                Ok(v) if best.as_ref().is_none_or(|(b, _)| v > *b) => best = Some((v, Point::Lattice(x.clone()))),
                Ok(_) => {}
                Err(e) => err = Some(e),
            }
        })?,
        Domain::Dl { poset } => {
            constraint.check_poset(poset)?;
            for_each_ideal(poset, enumeration_limit(), |s| {
                if !constraint.admits_set(s.mask()) {
                    return;
                }
                feasible += 1;
                let v = oracle.eval_mask(s.mask());
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, Point::Ideal(s)));
                }
            })?
        }
    };
    if let Some(e) = err {
        return Err(e);
    }
    let (value, argmax) =
        best.ok_or_else(|| LatmaxError::Infeasible(format!("no feasible point under {}", constraint.describe())))?;
    Ok(ExactResult { value, argmax, enumerated, feasible, constraint: constraint.describe() })
}

/// `achieved / exact` clamped to `[0, 1]`; an optimum of 0 gives 1.
pub fn ratio(achieved: f64, exact: f64) -> Result<f64> {
    if achieved < -TAU || exact < -TAU || achieved.is_nan() || exact.is_nan() {
        return Err(invalid(format!("ratio of {achieved} and {exact}")));
    }
    if exact <= TAU {
        return Ok(1.0);
    }
    Ok((achieved / exact).clamp(0.0, 1.0))
}
