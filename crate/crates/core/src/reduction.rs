//! Densest k-subhypergraph as knapsack-constrained maximization of `|S|` on
//! a distributive lattice, and the way back.
//!
//! Every vertex becomes an element; every hyperedge `e` becomes `k` copies
//! sitting above the vertices of `e`. Vertices weigh 1, copies weigh 0 and the
//! budget is `k`, so a feasible ideal is at most `k` vertices plus copies of
//! the edges they induce.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constraint::{Constraint, KnapsackConstraint};
use crate::error::{invalid, LatmaxError, Result};
use crate::lattice::{bit, enumeration_limit, mask_elements, mask_of, Ideal, Mask, Poset};
use crate::oracle::{Domain, ValueOracle};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HypergraphSpec", into = "HypergraphSpec")]
pub struct Hypergraph {
    vertices: usize,
    edges: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct HypergraphSpec {
    vertices: usize,
    edges: Vec<Vec<usize>>,
}

impl TryFrom<HypergraphSpec> for Hypergraph {
    type Error = LatmaxError;
    fn try_from(s: HypergraphSpec) -> Result<Self> {
        Hypergraph::new(s.vertices, s.edges)
    }
}

impl From<Hypergraph> for HypergraphSpec {
    fn from(h: Hypergraph) -> Self {
        HypergraphSpec { vertices: h.vertices, edges: h.edges }
    }
}

impl Hypergraph {
    /// Edges are stored sorted and deduplicated within themselves.
    pub fn new(vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if vertices > 64 {
            return Err(LatmaxError::TooManyElements { size: vertices, max: 64 });
        }
        let mut clean = Vec::with_capacity(edges.len());
        for (q, mut e) in edges.into_iter().enumerate() {
            if e.is_empty() {
                return Err(LatmaxError::InvalidInstance(format!("hyperedge {q} is empty")));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= vertices) {
                return Err(LatmaxError::InvalidInstance(format!("hyperedge {q} names vertex {v} of {vertices}")));
            }
            e.sort_unstable();
            e.dedup();
            clean.push(e);
        }
        Ok(Hypergraph { vertices, edges: clean })
    }

    /// `edges` hyperedges of 2 to `max_size` distinct vertices each (single
    /// vertices when `vertices < 2`).
    pub fn random(vertices: usize, edges: usize, max_size: usize, seed: u64) -> Result<Self> {
        if vertices == 0 && edges > 0 {
            return Err(invalid("hyperedges need at least one vertex"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hi = max_size.clamp(1, vertices.max(1));
        let lo = 2.min(hi);
        let list = (0..edges)
            .map(|_| {
                let size = rng.gen_range(lo..=hi);
                sample(&mut rng, vertices, size).into_vec()
            })
            .collect();
        Hypergraph::new(vertices, list)
    }

    /// As many hyperedges as vertices.
    pub fn random_balanced(vertices: usize, max_size: usize, seed: u64) -> Result<Self> {
        Self::random(vertices, vertices, max_size, seed)
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn edge_masks(&self) -> Vec<Mask> {
        self.edges.iter().map(|e| mask_of(e.iter().copied())).collect()
    }

    /// Number of hyperedges inside the vertex set.
    pub fn induced_edges(&self, set: Mask) -> usize {
        self.edge_masks().iter().filter(|&&e| e & !set == 0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum ElementRole {
    Vertex { vertex: usize },
    EdgeCopy { edge: usize, copy: usize },
}

#[derive(Debug, Clone)]
pub struct ReducedInstance {
    pub hypergraph: Hypergraph,
    pub k: usize,
    pub poset: Poset,
    pub oracle: ValueOracle,
    pub knapsack: KnapsackConstraint,
    pub roles: Vec<ElementRole>,
}

impl ReducedInstance {
    pub fn element_count(&self) -> usize {
        self.poset.size()
    }

    pub fn constraint(&self) -> Constraint {
        Constraint::Knapsack(self.knapsack.clone())
    }

    /// Element id of copy `copy` of hyperedge `edge`.
    pub fn copy_id(&self, edge: usize, copy: usize) -> usize {
        self.hypergraph.vertices + edge * self.k + copy
    }

    fn vertex_mask(&self) -> Mask {
        mask_of(0..self.hypergraph.vertices)
    }

    /// The ideal of `vertices` plus every copy of every edge they induce.
    pub fn normalized_ideal(&self, vertices: Mask) -> Ideal {
        let mut m = vertices;
        for (q, e) in self.hypergraph.edge_masks().into_iter().enumerate() {
            if e & !vertices == 0 {
                m |= mask_of((0..self.k).map(|i| self.copy_id(q, i)));
            }
        }
        self.poset.ideal_from_mask(m).expect("vertices plus induced copies form an ideal")
    }
}

/// Builds the knapsack instance; the optimum equals `k (1 + R)` with `R`
/// the densest-k-subhypergraph optimum.
pub fn reduce_dksh(h: &Hypergraph, k: usize) -> Result<ReducedInstance> {
    let n = h.vertices;
    if k == 0 || k > n {
        return Err(invalid(format!("k = {k} must lie in 1..={n}")));
    }
    let size = n + k * h.edge_count();
    let mut covers = Vec::new();
    let mut roles: Vec<ElementRole> = (0..n).map(|v| ElementRole::Vertex { vertex: v }).collect();
    let mut labels: Vec<String> = (0..n).map(|v| format!("v{v}")).collect();
    for (q, e) in h.edges.iter().enumerate() {
        for i in 0..k {
            let id = n + q * k + i;
            roles.push(ElementRole::EdgeCopy { edge: q, copy: i });
            labels.push(format!("e{q}^{}", i + 1));
            covers.extend(e.iter().map(|&v| (v, id)));
        }
    }
    let poset = Poset::new(size, covers)?.with_labels(labels)?;
    let weights = (0..size).map(|e| if e < n { 1.0 } else { 0.0 }).collect();
    let knapsack = KnapsackConstraint::new(weights, k as f64)?;
    let oracle =
        ValueOracle::cardinality(Domain::Dl { poset: poset.clone() }).with_name("reduced densest-k-subhypergraph");
    Ok(ReducedInstance { hypergraph: h.clone(), k, poset, oracle, knapsack, roles })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DkshSolution {
    pub vertices: Vec<usize>,
    /// Hyperedges induced by `vertices`.
    pub beta: usize,
    /// Size of the normalized ideal, `k (1 + beta)`.
    pub normalized_size: usize,
}

/// Reads a vertex set off a feasible ideal: keep its vertices, pad with the
/// lowest missing ids up to `k`, and if that induces nothing, switch to a
/// smallest hyperedge of size at most `k` (padded the same way).
pub fn extract_dksh_solution(inst: &ReducedInstance, s: &Ideal) -> Result<DkshSolution> {
    if s.universe() != inst.poset.size() || !inst.poset.is_ideal(s.mask()) {
        return Err(LatmaxError::Infeasible("not an ideal of the reduced poset".into()));
    }
    if !inst.knapsack.feasible(s.mask()) {
        return Err(LatmaxError::Infeasible(format!(
            "{} vertices exceed the budget {}",
            inst.knapsack.weight(s.mask()),
            inst.k
        )));
    }
    let n = inst.hypergraph.vertices;
    let pad = |mut m: Mask| {
        for v in 0..n {
            if m.count_ones() as usize >= inst.k {
                break;
            }
            m |= bit(v);
        }
        m
    };
    let mut chosen = pad(s.mask() & inst.vertex_mask());
    if inst.hypergraph.induced_edges(chosen) == 0 {
        let smallest = inst.hypergraph.edges.iter().filter(|e| e.len() <= inst.k).min_by_key(|e| e.len());
        if let Some(e) = smallest {
            chosen = pad(mask_of(e.iter().copied()));
        }
    }
    let beta = inst.hypergraph.induced_edges(chosen);
    Ok(DkshSolution {
        vertices: mask_elements(chosen).collect(),
        beta,
        normalized_size: inst.normalized_ideal(chosen).len(),
    })
}

/// Exact optimum by scanning all `k`-subsets in lexicographic order; the
/// first best subset is returned.
pub fn dksh_brute_force(h: &Hypergraph, k: usize) -> Result<(Vec<usize>, usize)> {
    let n = h.vertices;
    if k > n {
        return Err(invalid(format!("k = {k} exceeds {n} vertices")));
    }
    let count = binomial(n as u64, k as u64);
    if count.is_none_or(|c| c > enumeration_limit()) {
        return Err(LatmaxError::DomainTooLarge {
            region: format!("{k}-subsets of {n} vertices"),
            limit: enumeration_limit(),
        });
    }
    let edges = h.edge_masks();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best: Option<(Vec<usize>, usize)> = None;
    loop {
        let m = mask_of(idx.iter().copied());
        let r = edges.iter().filter(|&&e| e & !m == 0).count();
        if best.as_ref().is_none_or(|b| r > b.1) {
            best = Some((idx.clone(), r));
        }
        // next combination
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else { break };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(best.expect("at least the first subset"))
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    (0..k).try_fold(1u64, |acc, i| acc.checked_mul(n - i).map(|v| v / (i + 1)))
}

/// Guarantee carried over to the hypergraph problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferBound {
    /// `n'(m' + 1)`, the size at which the lattice ratio is evaluated.
    pub size_argument: usize,
    /// `(1 + 1/c) · α`.
    pub factor: f64,
}

/// `(1 + 1/c) α` for an `α`-approximation on the reduced instance.
pub fn ratio_transfer(alpha: f64, vertices: usize, edges: usize, c: f64) -> Result<TransferBound> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(invalid(format!("alpha = {alpha} must be at least 1")));
    }
    if c.is_nan() || c < 1.0 {
        return Err(invalid(format!("c = {c} must be at least 1")));
    }
    Ok(TransferBound { size_argument: vertices * (edges + 1), factor: (1.0 + 1.0 / c) * alpha })
}

/// `2^{(log₂(√n − 1))^δ − 1}`, defined for `n ≥ 4`.
pub fn hardness_factor(n: f64, delta: f64) -> Result<f64> {
    if n.is_nan() || n < 4.0 || delta.is_nan() || delta <= 0.0 {
        return Err(invalid(format!("hardness factor needs n >= 4 and delta > 0, got n = {n}, delta = {delta}")));
    }
    Ok(2f64.powf((n.sqrt() - 1.0).log2().powf(delta) - 1.0))
}

/// Outcome of mapping a lattice solution back and comparing with the exact
/// hypergraph optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferCheck {
    pub optimum: usize,
    pub beta: usize,
    /// `OPT / f(S)` on the reduced instance.
    pub alpha: f64,
    /// `R ≤ 2 α β`.
    pub holds: bool,
}

pub fn check_transfer(inst: &ReducedInstance, s: &Ideal, reduced_opt: f64, dksh_opt: usize) -> Result<TransferCheck> {
    let sol = extract_dksh_solution(inst, s)?;
    let achieved = s.len() as f64;
    let alpha = if achieved > 0.0 { reduced_opt / achieved } else { f64::INFINITY };
    let holds = (dksh_opt as f64) <= 2.0 * alpha * sol.beta as f64 + crate::numeric::TAU || dksh_opt == 0;
    Ok(TransferCheck { optimum: dksh_opt, beta: sol.beta, alpha, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_max;

    fn path3() -> Hypergraph {
        Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap()
    }

    #[test]
    fn path_reduction() {
        let inst = reduce_dksh(&path3(), 2).unwrap();
        assert_eq!(inst.element_count(), 7);
        let opt = exact_max(&inst.oracle, &inst.constraint()).unwrap();
        assert_eq!(opt.value, 4.0);
        assert_eq!(dksh_brute_force(&path3(), 2).unwrap().1, 1);
        assert!(inst.knapsack.is_binary());
    }

    #[test]
    fn edgeless_and_full_edge() {
        let h = Hypergraph::new(4, vec![]).unwrap();
        let inst = reduce_dksh(&h, 3).unwrap();
        assert_eq!(exact_max(&inst.oracle, &inst.constraint()).unwrap().value, 3.0);
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let inst = reduce_dksh(&h, 3).unwrap();
        assert_eq!(exact_max(&inst.oracle, &inst.constraint()).unwrap().value, 6.0);
    }

    #[test]
    fn extraction() {
        let inst = reduce_dksh(&path3(), 2).unwrap();
        let s = inst.poset.ideal(&[0, 1, inst.copy_id(0, 0), inst.copy_id(0, 1)]).unwrap();
        let sol = extract_dksh_solution(&inst, &s).unwrap();
        assert_eq!(sol.vertices, vec![0, 1]);
        assert_eq!(sol.beta, 1);
        assert_eq!((sol.normalized_size - inst.k) / inst.k, sol.beta);
        let empty = extract_dksh_solution(&inst, &inst.poset.empty_ideal()).unwrap();
        assert_eq!(empty.vertices.len(), 2);
        assert_eq!(empty.beta, 1);
        assert!(extract_dksh_solution(&inst, &inst.poset.ideal(&[0, 1, 2]).unwrap()).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let tri = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(dksh_brute_force(&tri, 2).unwrap().1, 1);
        assert_eq!(dksh_brute_force(&Hypergraph::new(3, vec![]).unwrap(), 2).unwrap().1, 0);
        let h = Hypergraph::new(4, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![2, 3]]).unwrap();
        assert_eq!(dksh_brute_force(&h, 3).unwrap(), (vec![0, 1, 2], 3));
    }

    #[test]
    fn transfer_formulas() {
        assert_eq!(ratio_transfer(1.0, 3, 2, 1.0).unwrap().factor, 2.0);
        assert_eq!(ratio_transfer(1.0, 3, 2, 1.0).unwrap().size_argument, 9);
        assert!((ratio_transfer(1.5, 3, 2, 1e9).unwrap().factor - 1.5).abs() < 1e-8);
        assert_eq!(hardness_factor(4.0, 0.5).unwrap(), 0.5);
        // √100 - 1 = 9, log₂ 9 ≈ 3.1699, δ = 1 → 2^{2.1699} = 4.5
        assert!((hardness_factor(100.0, 1.0).unwrap() - 4.5).abs() < 1e-12);
        assert!(hardness_factor(3.0, 1.0).is_err());
    }

    #[test]
    fn random_hypergraphs_are_valid() {
        for seed in 0..10 {
            let h = Hypergraph::random(5, 4, 3, seed).unwrap();
            assert_eq!(h.edge_count(), 4);
            assert!(h.edges().iter().all(|e| (2..=3).contains(&e.len())));
            assert_eq!(Hypergraph::random_balanced(4, 2, seed).unwrap().edge_count(), 4);
        }
    }
}
