//! JSON instance files: a domain, a function family with parameters and an
//! optional constraint.
//!
//! ```json
//! { "domain": {"type": "int_lattice", "n": 3, "C": 2},
//!   "function": {"family": "fig3", "params": {"epsilon": 0.1}},
//!   "constraint": {"type": "cardinality", "k": 2} }
//! ```
//!
//! Integer-lattice families may also be placed on a `dl` domain whose poset
//! is `n` disjoint chains of length `C`; they are then read through the chain
//! encoding.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constraint::{Constraint, KnapsackConstraint, MatroidSpec, PosetMatroid};
use crate::error::{LatmaxError, Result};
use crate::lattice::Poset;
use crate::oracle::{Domain, DrParams, ValueOracle};
use crate::reduction::ReducedInstance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstraintSpec {
    None,
    Cardinality { k: usize },
    Knapsack { weights: Vec<f64>, budget: f64 },
    Matroid(MatroidSpec),
    Matroids { matroids: Vec<MatroidSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    /// Optional for the fixed-shape families `fig3`, `fig4` and `lemma4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    pub function: FunctionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<ConstraintSpec>,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub spec: InstanceSpec,
    pub oracle: ValueOracle,
    pub constraint: Constraint,
}

fn bad(msg: impl Into<String>) -> LatmaxError {
    LatmaxError::InvalidInstance(msg.into())
}

fn param_f64(p: &Value, key: &str, default: Option<f64>) -> Result<f64> {
    match p.get(key) {
        Some(v) => v.as_f64().ok_or_else(|| bad(format!("parameter {key} must be a number"))),
        None => default.ok_or_else(|| bad(format!("missing parameter {key}"))),
    }
}

fn param_u64(p: &Value, key: &str, default: Option<u64>) -> Result<u64> {
    match p.get(key) {
        Some(v) => v.as_u64().ok_or_else(|| bad(format!("parameter {key} must be a nonnegative integer"))),
        None => default.ok_or_else(|| bad(format!("missing parameter {key}"))),
    }
}

fn param_bool(p: &Value, key: &str, default: bool) -> Result<bool> {
    match p.get(key) {
        Some(v) => v.as_bool().ok_or_else(|| bad(format!("parameter {key} must be a boolean"))),
        None => Ok(default),
    }
}

/// Places a lattice oracle on `domain`, directly or through the chain encoding.
fn place(oracle: ValueOracle, domain: &Domain) -> Result<ValueOracle> {
    let (n, bound) = oracle.lattice_dims().expect("lattice family");
    match domain {
        Domain::IntLattice { n: dn, bound: db } if (*dn, *db) == (n, bound) => Ok(oracle),
        Domain::Dl { poset } if poset.is_disjoint_chains(n, bound as usize) => oracle.on_chains(),
        other => Err(LatmaxError::DomainMismatch(format!(
            "{} lives on [{bound}]^{n}, instance domain is {}",
            oracle.name(),
            other.describe()
        ))),
    }
}

impl InstanceSpec {
    pub fn new(domain: Option<Domain>, family: &str, params: Value) -> Self {
        InstanceSpec { domain, function: FunctionSpec { family: family.into(), params }, constraint: None }
    }

    pub fn with_constraint(mut self, c: ConstraintSpec) -> Self {
        self.constraint = Some(c);
        self
    }

    pub fn build(&self) -> Result<Instance> {
        let oracle = self.build_oracle()?;
        let constraint = self.build_constraint(&oracle)?;
        Ok(Instance { spec: self.clone(), oracle, constraint })
    }

    fn default_domain(&self) -> Result<Domain> {
        let p = &self.function.params;
        match self.function.family.as_str() {
            "fig3" => Ok(Domain::IntLattice { n: 3, bound: 2 }),
            "fig4" => Ok(Domain::IntLattice { n: 2, bound: 2 }),
            "lemma4" => Ok(Domain::IntLattice { n: 2, bound: param_u64(p, "C", None)? as u32 }),
            f => Err(bad(format!("family {f} needs an explicit domain"))),
        }
    }

    fn build_oracle(&self) -> Result<ValueOracle> {
        let domain = match &self.domain {
            Some(d) => d.clone(),
            None => self.default_domain()?,
        };
        let p = &self.function.params;
        match self.function.family.as_str() {
            "fig3" => place(ValueOracle::fig3(param_f64(p, "epsilon", Some(0.1))?)?, &domain),
            "fig4" => place(ValueOracle::fig4(param_f64(p, "x", None)?)?, &domain),
            "lemma4" => {
                let bound = match &domain {
                    Domain::IntLattice { bound, .. } => *bound as u64,
                    Domain::Dl { poset } => (poset.size() / 2) as u64,
                };
                let c = param_u64(p, "C", Some(bound))? as u32;
                place(ValueOracle::lemma4(c, param_f64(p, "epsilon", Some(0.1))?)?, &domain)
            }
            "cardinality" => Ok(ValueOracle::cardinality(domain)),
            "random_submodular" => {
                let seed = param_u64(p, "seed", Some(0))?;
                let (n, bound) = match &domain {
                    Domain::IntLattice { n, bound } => (*n, *bound),
                    Domain::Dl { .. } => (param_u64(p, "n", None)? as usize, param_u64(p, "C", None)? as u32),
                };
                place(ValueOracle::random_submodular(n, bound, seed)?, &domain)
            }
            "random_dr_dl" => {
                let Domain::Dl { poset } = domain else {
                    return Err(bad("random_dr_dl needs a dl domain"));
                };
                let params =
                    DrParams { monotone: param_bool(p, "monotone", true)?, coverage: param_bool(p, "coverage", true)? };
                ValueOracle::random_dr_dl(poset, param_u64(p, "seed", Some(0))?, params)
            }
            "table" => match domain {
                Domain::IntLattice { n, bound } => {
                    let values: Vec<f64> = serde_json::from_value(
                        p.get("values").cloned().ok_or_else(|| bad("table needs params.values"))?,
                    )
                    .map_err(|e| bad(format!("table values: {e}")))?;
                    ValueOracle::lattice_table(n, bound, values)
                }
                Domain::Dl { poset } => {
                    let entries: Vec<(Vec<usize>, f64)> = serde_json::from_value(
                        p.get("entries").cloned().ok_or_else(|| bad("ideal table needs params.entries"))?,
                    )
                    .map_err(|e| bad(format!("table entries: {e}")))?;
                    ValueOracle::ideal_table(poset, entries)
                }
            },
            f => Err(bad(format!("unknown function family {f}"))),
        }
    }

    fn build_constraint(&self, oracle: &ValueOracle) -> Result<Constraint> {
        let poset = oracle.poset();
        let need_poset = |what: &str| -> Result<&Poset> {
            poset.ok_or_else(|| LatmaxError::DomainMismatch(format!("{what} constraints need a dl domain")))
        };
        let c = match &self.constraint {
            None | Some(ConstraintSpec::None) => Constraint::None,
            Some(ConstraintSpec::Cardinality { k }) => Constraint::Cardinality(*k),
            Some(ConstraintSpec::Knapsack { weights, budget }) => {
                Constraint::Knapsack(KnapsackConstraint::new(weights.clone(), *budget)?)
            }
            Some(ConstraintSpec::Matroid(m)) => {
                Constraint::Matroids(vec![PosetMatroid::from_spec(need_poset("matroid")?.clone(), m)?])
            }
            Some(ConstraintSpec::Matroids { matroids }) => {
                let p = need_poset("matroid")?;
                Constraint::Matroids(
                    matroids.iter().map(|m| PosetMatroid::from_spec(p.clone(), m)).collect::<Result<_>>()?,
                )
            }
        };
        match (oracle.lattice_dims(), poset) {
            (Some((n, _)), _) => {
                if let Constraint::Knapsack(k) = &c {
                    if k.weights.len() != n {
                        return Err(LatmaxError::DomainMismatch(format!(
                            "{} knapsack weights for n = {n}",
                            k.weights.len()
                        )));
                    }
                }
            }
            (None, Some(p)) => c.check_poset(p)?,
            (None, None) => unreachable!("every domain is a lattice or a poset"),
        }
        Ok(c)
    }
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: InstanceSpec = serde_json::from_str(text).map_err(|e| bad(format!("instance JSON: {e}")))?;
        spec.build()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

impl ReducedInstance {
    /// The instance file for the reduced problem.
    pub fn to_spec(&self) -> InstanceSpec {
        InstanceSpec::new(Some(Domain::Dl { poset: self.poset.clone() }), "cardinality", Value::Null).with_constraint(
            ConstraintSpec::Knapsack { weights: self.knapsack.weights.clone(), budget: self.knapsack.budget },
        )
    }
}
