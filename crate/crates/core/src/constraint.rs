//! Feasibility structures: poset matroids and knapsack constraints.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, LatmaxError, Result};
use crate::lattice::{mask_elements, Ideal, Mask, Poset};

/// Membership test for a family of independent ideals.
pub trait IndependenceOracle {
    fn is_independent(&self, set: Mask) -> bool;
}

/// On-disk matroid form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatroidSpec {
    Uniform { k: usize },
    Family { independent: Vec<Vec<usize>> },
}

#[derive(Clone)]
pub enum MatroidKind {
    /// Ideals of size at most `k`.
    Uniform { k: usize },
    /// An explicit list of independent ideals.
    Family(HashSet<Mask>),
    /// Caller-supplied test; the axioms are assumed, not checked.
    Custom(Arc<dyn Fn(Mask) -> bool + Send + Sync>),
}

impl fmt::Debug for MatroidKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatroidKind::Uniform { k } => write!(f, "Uniform {{ k: {k} }}"),
            MatroidKind::Family(fam) => write!(f, "Family({} sets)", fam.len()),
            MatroidKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A family of independent ideals of `poset`.
#[derive(Debug, Clone)]
pub struct PosetMatroid {
    poset: Poset,
    kind: MatroidKind,
}

impl PosetMatroid {
    pub fn uniform(poset: Poset, k: usize) -> Self {
        PosetMatroid { poset, kind: MatroidKind::Uniform { k } }
    }

    /// Every listed set must be an ideal of `poset`.
    pub fn family(poset: Poset, independent: &[Vec<usize>]) -> Result<Self> {
        let mut fam = HashSet::new();
        for ids in independent {
            fam.insert(poset.ideal(ids)?.mask());
        }
        Ok(PosetMatroid { poset, kind: MatroidKind::Family(fam) })
    }

    pub fn custom(poset: Poset, test: impl Fn(Mask) -> bool + Send + Sync + 'static) -> Self {
        PosetMatroid { poset, kind: MatroidKind::Custom(Arc::new(test)) }
    }

    /// All ideals independent.
    pub fn free(poset: Poset) -> Self {
        let k = poset.size();
        Self::uniform(poset, k)
    }

    pub fn from_spec(poset: Poset, spec: &MatroidSpec) -> Result<Self> {
        match spec {
            MatroidSpec::Uniform { k } => Ok(Self::uniform(poset, *k)),
            MatroidSpec::Family { independent } => Self::family(poset, independent),
        }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            MatroidKind::Uniform { k } => format!("uniform(k={k})"),
            MatroidKind::Family(f) => format!("family({} independent ideals)", f.len()),
            MatroidKind::Custom(_) => "custom".into(),
        }
    }

    pub fn contains(&self, s: &Ideal) -> bool {
        self.is_independent(s.mask())
    }
}

impl IndependenceOracle for PosetMatroid {
    fn is_independent(&self, set: Mask) -> bool {
        match &self.kind {
            MatroidKind::Uniform { k } => set.count_ones() as usize <= *k,
            MatroidKind::Family(f) => f.contains(&set),
            MatroidKind::Custom(t) => t(set),
        }
    }
}

/// `w(S) = Σ_{e∈S} w_e ≤ budget`. On an integer lattice the weights apply
/// per unit of each coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackConstraint {
    pub weights: Vec<f64>,
    pub budget: f64,
}

impl KnapsackConstraint {
    pub fn new(weights: Vec<f64>, budget: f64) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("knapsack weights must be finite and nonnegative"));
        }
        if !(budget.is_finite() && budget >= 0.0) {
            return Err(invalid("knapsack budget must be finite and nonnegative"));
        }
        Ok(KnapsackConstraint { weights, budget })
    }

    pub fn weight(&self, set: Mask) -> f64 {
        mask_elements(set).map(|e| self.weights[e]).sum()
    }

    pub fn is_binary(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0 || w == 1.0)
    }

    pub fn feasible(&self, set: Mask) -> bool {
        self.weight(set) <= self.budget + crate::numeric::TAU
    }

    pub fn lattice_weight(&self, x: &[u32]) -> f64 {
        x.iter().zip(&self.weights).map(|(&c, &w)| c as f64 * w).sum()
    }
}

impl IndependenceOracle for KnapsackConstraint {
    fn is_independent(&self, set: Mask) -> bool {
        self.feasible(set)
    }
}

/// Feasible region for exact optimization.
#[derive(Debug, Clone, Default)]
pub enum Constraint {
    #[default]
    None,
    /// `|S| ≤ k` on ideals, `Σ x_i ≤ k` on lattice points.
    Cardinality(usize),
    /// Independent in every listed matroid.
    Matroids(Vec<PosetMatroid>),
    Knapsack(KnapsackConstraint),
}

impl Constraint {
    pub fn describe(&self) -> String {
        match self {
            Constraint::None => "none".into(),
            Constraint::Cardinality(k) => format!("cardinality(k={k})"),
            Constraint::Matroids(ms) => {
                let parts: Vec<String> = ms.iter().map(|m| m.describe()).collect();
                format!("matroids[{}]", parts.join(","))
            }
            Constraint::Knapsack(k) => format!("knapsack(budget={})", k.budget),
        }
    }

    /// Feasibility of an ideal.
    pub fn admits_set(&self, set: Mask) -> bool {
        match self {
            Constraint::None => true,
            Constraint::Cardinality(k) => set.count_ones() as usize <= *k,
            Constraint::Matroids(ms) => ms.iter().all(|m| m.is_independent(set)),
            Constraint::Knapsack(k) => k.feasible(set),
        }
    }

    /// Feasibility of a lattice point.
    pub fn admits_point(&self, x: &[u32]) -> Result<bool> {
        match self {
            Constraint::None => Ok(true),
            Constraint::Cardinality(k) => Ok(x.iter().map(|&c| c as usize).sum::<usize>() <= *k),
            Constraint::Knapsack(k) => Ok(k.lattice_weight(x) <= k.budget + crate::numeric::TAU),
            Constraint::Matroids(_) => {
                Err(LatmaxError::DomainMismatch("poset matroids apply to distributive lattices only".into()))
            }
        }
    }

    /// Checks that the constraint fits a poset with `size` elements.
    pub fn check_poset(&self, poset: &Poset) -> Result<()> {
        match self {
            Constraint::Matroids(ms) => {
                if ms.iter().any(|m| m.poset() != poset) {
                    return Err(LatmaxError::DomainMismatch("matroid is defined on a different poset".into()));
                }
            }
            Constraint::Knapsack(k) if k.weights.len() != poset.size() => {
                return Err(LatmaxError::DomainMismatch(format!(
                    "{} knapsack weights for {} elements",
                    k.weights.len(),
                    poset.size()
                )));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Independent ideals listed as sorted id vectors, for reports.
pub fn family_listing(m: &PosetMatroid) -> Option<Vec<Vec<usize>>> {
    match &m.kind {
        MatroidKind::Family(f) => {
            let mut out: Vec<Vec<usize>> = f.iter().map(|&s| mask_elements(s).collect()).collect();
            out.sort();
            Some(out)
        }
        _ => None,
    }
}

#[cfg(test)]
pub(crate) fn ids_mask(ids: &[usize]) -> Mask {
    crate::lattice::mask_of(ids.iter().copied())
}
