//! Value oracles: nonnegative functions on a bounded integer lattice or on the
//! ideals of a poset, with an exact count of evaluations.
//!
//! Built-in families cover the worked examples (`fig3`, `fig4`, `lemma4`),
//! the cardinality function, explicit tables and two seeded generators.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, LatmaxError, Result};
use crate::lattice::{
    enumeration_limit, for_each_ideal, for_each_lattice_point, lattice_size, linear_extension, mask_elements, mask_of,
    Ideal, LatticePoint, Mask, Point, Poset, TieBreak,
};

/// Indices `(i, j)` of a coordinate pair with `i < j`.
type PairKey = (usize, usize);

/// Where an oracle lives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    IntLattice {
        n: usize,
        #[serde(rename = "C")]
        bound: u32,
    },
    Dl {
        poset: Poset,
    },
}

impl Domain {
    pub fn describe(&self) -> String {
        match self {
            Domain::IntLattice { n, bound } => format!("[{bound}]^{n}"),
            Domain::Dl { poset } => format!("D(P), |P| = {}", poset.size()),
        }
    }
}

/// Evaluation rule behind an oracle.
#[derive(Debug, Clone, PartialEq)]
enum Rule {
    Fig3 {
        epsilon: f64,
    },
    Fig4 {
        x: f64,
    },
    Lemma4 {
        epsilon: f64,
    },
    Cardinality,
    LatticeTable(Vec<f64>),
    IdealTable(HashMap<Mask, f64>),
    /// `shift + Σ_{e∈S} w_e + φ(|S|) + weight(∪_{e∈S} cover_e)`.
    Separable(SeparableDr),
    /// A lattice rule read through the disjoint-chain encoding.
    Chains {
        inner: Box<Rule>,
        n: usize,
        bound: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableDr {
    pub weights: Vec<f64>,
    /// `φ(0), φ(1), …, φ(m)`.
    pub phi: Vec<f64>,
    pub cover_sets: Vec<Mask>,
    pub item_weights: Vec<f64>,
    pub shift: f64,
}

impl SeparableDr {
    fn value(&self, set: Mask) -> f64 {
        let mut covered: Mask = 0;
        let mut total = self.shift + self.phi[set.count_ones() as usize];
        for e in mask_elements(set) {
            total += self.weights[e];
            covered |= self.cover_sets[e];
        }
        total + mask_elements(covered).map(|i| self.item_weights[i]).sum::<f64>()
    }
}

/// A nonnegative function with a query counter.
#[derive(Debug)]
pub struct ValueOracle {
    name: String,
    domain: Domain,
    rule: Rule,
    queries: AtomicU64,
}

impl Clone for ValueOracle {
    fn clone(&self) -> Self {
        ValueOracle {
            name: self.name.clone(),
            domain: self.domain.clone(),
            rule: self.rule.clone(),
            queries: AtomicU64::new(self.queries()),
        }
    }
}

fn check_value(v: f64, at: impl FnOnce() -> String) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(LatmaxError::InvalidInstance(format!("value {v} at {} is not finite and nonnegative", at())));
    }
    Ok(())
}

impl ValueOracle {
    fn build(name: impl Into<String>, domain: Domain, rule: Rule) -> Self {
        ValueOracle { name: name.into(), domain, rule, queries: AtomicU64::new(0) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// `(n, C)` for integer-lattice oracles.
    pub fn lattice_dims(&self) -> Option<(usize, u32)> {
        match self.domain {
            Domain::IntLattice { n, bound } => Some((n, bound)),
            Domain::Dl { .. } => None,
        }
    }

    pub fn poset(&self) -> Option<&Poset> {
        match &self.domain {
            Domain::Dl { poset } => Some(poset),
            Domain::IntLattice { .. } => None,
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset_queries(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }

    pub fn eval(&self, point: &Point) -> Result<f64> {
        match point {
            Point::Lattice(x) => self.eval_lattice(x),
            Point::Ideal(s) => self.eval_ideal(s),
        }
    }

    pub fn eval_lattice(&self, x: &LatticePoint) -> Result<f64> {
        let Domain::IntLattice { n, bound } = self.domain else {
            return Err(LatmaxError::DomainMismatch(format!(
                "lattice point given to an oracle on {}",
                self.domain.describe()
            )));
        };
        if x.dim() != n || x.bound() != bound {
            return Err(LatmaxError::DomainMismatch(format!(
                "point in [{}]^{} given to an oracle on [{bound}]^{n}",
                x.bound(),
                x.dim()
            )));
        }
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(lattice_rule_value(&self.rule, x.coords(), bound))
    }

    pub fn eval_ideal(&self, s: &Ideal) -> Result<f64> {
        let Domain::Dl { poset } = &self.domain else {
            return Err(LatmaxError::DomainMismatch(format!("ideal given to an oracle on {}", self.domain.describe())));
        };
        if s.universe() != poset.size() || !poset.is_ideal(s.mask()) {
            return Err(LatmaxError::DomainMismatch(format!("{s:?} is not an ideal of the oracle's poset")));
        }
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(ideal_rule_value(&self.rule, s.mask()))
    }

    /// Evaluates a raw mask that the caller guarantees is an ideal of the poset.
    pub(crate) fn eval_mask(&self, mask: Mask) -> f64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        ideal_rule_value(&self.rule, mask)
    }

    // ---- built-in families ----

    /// The tight instance on `{0,1,2}^3`: `f = min(#{a_i > 0}, #{a_i < 2})`
    /// except value `1 + ε` on the permutations of `(2,0,2)` and `(2,0,0)` and
    /// on `(2,0,1)`, `(0,2,1)`.
    pub fn fig3(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid(format!("fig3 needs epsilon > 0, got {epsilon}")));
        }
        Ok(Self::build(format!("fig3(eps={epsilon})"), Domain::IntLattice { n: 3, bound: 2 }, Rule::Fig3 { epsilon }))
    }

    /// The `{0,1,2}^2` instance whose value at `(0,2)` is `x`.
    pub fn fig4(x: f64) -> Result<Self> {
        if !(x >= 1.0 && x.is_finite()) {
            return Err(invalid(format!("fig4 needs x >= 1, got {x}")));
        }
        Ok(Self::build(format!("fig4(x={x})"), Domain::IntLattice { n: 2, bound: 2 }, Rule::Fig4 { x }))
    }

    /// On `[C]^2`: 0 at `(0,0)` and `(C,C)`, 1 at `(C,0)`, `ε` elsewhere.
    pub fn lemma4(bound: u32, epsilon: f64) -> Result<Self> {
        if bound < 1 {
            return Err(invalid("lemma4 needs C >= 1"));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(invalid(format!("lemma4 needs 0 < epsilon < 1, got {epsilon}")));
        }
        Ok(Self::build(
            format!("lemma4(C={bound},eps={epsilon})"),
            Domain::IntLattice { n: 2, bound },
            Rule::Lemma4 { epsilon },
        ))
    }

    /// `f(S) = |S|` on ideals, `f(x) = Σ x_i` on lattice points.
    pub fn cardinality(domain: Domain) -> Self {
        Self::build("cardinality", domain, Rule::Cardinality)
    }

    /// Explicit table in mixed-radix order (first coordinate least significant).
    pub fn lattice_table(n: usize, bound: u32, values: Vec<f64>) -> Result<Self> {
        let expected = lattice_size(n, bound).ok_or_else(|| invalid("lattice too large for a table"))?;
        if values.len() as u64 != expected {
            return Err(LatmaxError::InvalidInstance(format!(
                "table has {} values, [{bound}]^{n} has {expected} points",
                values.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            check_value(v, || format!("{:?}", LatticePoint::from_index(i, n, bound).coords()))?;
        }
        Ok(Self::build("table", Domain::IntLattice { n, bound }, Rule::LatticeTable(values)))
    }

    /// Tabulates `f` over `[bound]^n`.
    pub fn from_lattice_fn(n: usize, bound: u32, f: impl Fn(&LatticePoint) -> f64) -> Result<Self> {
        let mut values = Vec::new();
        for_each_lattice_point(n, bound, enumeration_limit(), |x| values.push(f(x)))?;
        Self::lattice_table(n, bound, values)
    }

    /// Explicit table keyed by ideal; every ideal of `poset` must be present.
    pub fn ideal_table(poset: Poset, entries: impl IntoIterator<Item = (Vec<usize>, f64)>) -> Result<Self> {
        let mut table = HashMap::new();
        for (ids, v) in entries {
            let s = poset.ideal(&ids)?;
            check_value(v, || format!("{ids:?}"))?;
            table.insert(s.mask(), v);
        }
        let mut missing = None;
        for_each_ideal(&poset, enumeration_limit(), |s| {
            if missing.is_none() && !table.contains_key(&s.mask()) {
                missing = Some(s);
            }
        })?;
        if let Some(s) = missing {
            return Err(LatmaxError::InvalidInstance(format!("table has no value for ideal {:?}", s.elements())));
        }
        Ok(Self::build("table", Domain::Dl { poset }, Rule::IdealTable(table)))
    }

    /// Tabulates `f` over all ideals of `poset`.
    pub fn from_ideal_fn(poset: Poset, f: impl Fn(&Ideal) -> f64) -> Result<Self> {
        let mut entries = Vec::new();
        for_each_ideal(&poset, enumeration_limit(), |s| entries.push((s.elements(), f(&s))))?;
        Self::ideal_table(poset, entries)
    }

    /// Seeded submodular function on `[bound]^n`: random unary terms plus,
    /// for every coordinate pair, a 2-D table with nonpositive discrete cross
    /// differences, shifted so that its minimum is 0. All values are dyadic
    /// rationals, so sums are exact in `f64`.
    pub fn random_submodular(n: usize, bound: u32, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5b11);
        let c = bound as usize;
        let unary: Vec<Vec<f64>> =
            (0..n).map(|_| (0..=c).map(|_| rng.gen_range(0..=32) as f64 / 16.0).collect()).collect();
        // cum[i][j][a][b] = Σ_{s<a, t<b} w_st
        let mut pair: Vec<(PairKey, Vec<Vec<f64>>)> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let w: Vec<Vec<f64>> =
                    (0..c).map(|_| (0..c).map(|_| rng.gen_range(0..=16) as f64 / 16.0).collect()).collect();
                let mut cum = vec![vec![0.0; c + 1]; c + 1];
                for a in 1..=c {
                    for b in 1..=c {
                        cum[a][b] = cum[a - 1][b] + cum[a][b - 1] - cum[a - 1][b - 1] + w[a - 1][b - 1];
                    }
                }
                pair.push(((i, j), cum));
            }
        }
        let raw = |x: &LatticePoint| -> f64 {
            let xs = x.coords();
            let mut v: f64 = (0..n).map(|i| unary[i][xs[i] as usize]).sum();
            for ((i, j), cum) in &pair {
                v -= cum[xs[*i] as usize][xs[*j] as usize];
            }
            v
        };
        let mut values = Vec::new();
        for_each_lattice_point(n, bound, enumeration_limit(), |x| values.push(raw(x)))?;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        for v in values.iter_mut() {
            *v -= min;
        }
        let mut oracle = Self::lattice_table(n, bound, values)?;
        oracle.name = format!("random_submodular(n={n},C={bound},seed={seed})");
        Ok(oracle)
    }

    /// Seeded monotone DR-submodular function on `D(poset)`.
    pub fn random_dr_monotone_dl(poset: Poset, seed: u64) -> Result<Self> {
        Self::random_dr_dl(poset, seed, DrParams { monotone: true, coverage: true })
    }

    /// Seeded DR-submodular function on `D(poset)`:
    /// `shift + Σ w_e + φ(|S|) + coverage`, with weights non-increasing along
    /// the order, `φ` concave and cover sets shrinking along the order. With
    /// `monotone` the weights and `φ` increments are nonnegative and the shift
    /// is 0.
    pub fn random_dr_dl(poset: Poset, seed: u64, params: DrParams) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd1_5eed);
        let m = poset.size();
        let ext = linear_extension(&poset, TieBreak::Id);
        const ITEMS: usize = 8;
        let mut weights = vec![0.0; m];
        let mut cover_sets = vec![0 as Mask; m];
        for &e in ext.order() {
            let preds: Vec<usize> = (0..m).filter(|&d| poset.upper_covers(d) & (1 << e) != 0).collect();
            let (w, cover) = if preds.is_empty() {
                let w = if params.monotone { rng.gen_range(4..=16) } else { rng.gen_range(-6..=16) };
                let cover = mask_of((0..ITEMS).filter(|_| rng.gen_bool(0.4)));
                (w as f64 / 4.0, cover)
            } else {
                let min_w = preds.iter().map(|&d| weights[d]).fold(f64::INFINITY, f64::min);
                let drop = rng.gen_range(0..=4) as f64 / 4.0;
                let w = if params.monotone { (min_w - drop).max(0.0) } else { min_w - drop };
                let common = preds.iter().fold(!0 as Mask, |acc, &d| acc & cover_sets[d]);
                let cover = mask_of(mask_elements(common).filter(|_| rng.gen_bool(0.7)));
                (w, cover)
            };
            weights[e] = w;
            cover_sets[e] = if params.coverage { cover } else { 0 };
        }
        let item_weights: Vec<f64> = (0..ITEMS).map(|_| rng.gen_range(1..=4) as f64 / 4.0).collect();
        let mut phi = vec![0.0; m + 1];
        let mut inc: i64 = if params.monotone { rng.gen_range(0..=8) } else { rng.gen_range(-2..=8) };
        for t in 1..=m {
            if params.monotone {
                inc = inc.max(0);
            }
            phi[t] = phi[t - 1] + inc as f64 / 4.0;
            inc -= rng.gen_range(0..=3);
        }
        let lower = weights.iter().map(|w| w.min(0.0)).sum::<f64>() + phi.iter().copied().fold(0.0, f64::min);
        let shift = if lower < 0.0 { -lower } else { 0.0 };
        let rule = Rule::Separable(SeparableDr { weights, phi, cover_sets, item_weights, shift });
        let kind = if params.monotone { "random_dr_monotone_dl" } else { "random_dr_dl" };
        Ok(Self::build(format!("{kind}(m={m},seed={seed})"), Domain::Dl { poset }, rule))
    }

    /// `shift + Σ w_e + φ(|S|) + coverage` with caller-chosen parameters.
    pub fn separable_dr(poset: Poset, params: SeparableDr) -> Result<Self> {
        let m = poset.size();
        if params.weights.len() != m || params.phi.len() != m + 1 || params.cover_sets.len() != m {
            return Err(LatmaxError::InvalidInstance("separable parameters do not match the poset size".into()));
        }
        let items = params.item_weights.len();
        if items < 64 && params.cover_sets.iter().any(|&c| c >> items != 0) {
            return Err(LatmaxError::InvalidInstance("cover set refers to a missing item".into()));
        }
        let oracle = Self::build("separable_dr", Domain::Dl { poset }, Rule::Separable(params));
        let mut bad = None;
        for_each_ideal(oracle.poset().unwrap(), enumeration_limit(), |s| {
            if bad.is_none() {
                let v = ideal_rule_value(&oracle.rule, s.mask());
                if !(v.is_finite() && v >= 0.0) {
                    bad = Some((s, v));
                }
            }
        })?;
        if let Some((s, v)) = bad {
            check_value(v, || format!("{:?}", s.elements()))?;
        }
        Ok(oracle)
    }

    /// Reads a lattice oracle through the disjoint-chain encoding: the result
    /// lives on the ideals of `n` chains of length `C`.
    pub fn on_chains(&self) -> Result<Self> {
        let Domain::IntLattice { n, bound } = self.domain else {
            return Err(LatmaxError::DomainMismatch("only lattice oracles can be chain-encoded".into()));
        };
        let poset = Poset::disjoint_chains(n, bound as usize)?;
        Ok(Self::build(
            format!("{} on chains", self.name),
            Domain::Dl { poset },
            Rule::Chains { inner: Box::new(self.rule.clone()), n, bound },
        ))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Evaluation handle that keeps a per-run query count next to the shared one.
pub(crate) struct Tally<'a> {
    pub oracle: &'a ValueOracle,
    pub count: u64,
}

impl<'a> Tally<'a> {
    pub fn new(oracle: &'a ValueOracle) -> Self {
        Tally { oracle, count: 0 }
    }

    pub fn lattice(&mut self, x: &LatticePoint) -> Result<f64> {
        self.count += 1;
        self.oracle.eval_lattice(x)
    }

    pub fn mask(&mut self, m: Mask) -> f64 {
        self.count += 1;
        self.oracle.eval_mask(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrParams {
    pub monotone: bool,
    pub coverage: bool,
}

impl Default for DrParams {
    fn default() -> Self {
        DrParams { monotone: true, coverage: true }
    }
}

const FIG4: [[f64; 3]; 3] = [[1.0, 1.0, f64::NAN], [2.0, 1.0, 1.0], [3.0, 2.0, 2.0]];

fn lattice_rule_value(rule: &Rule, x: &[u32], bound: u32) -> f64 {
    match rule {
        Rule::Fig3 { epsilon } => {
            let mut sorted = [x[0], x[1], x[2]];
            sorted.sort_unstable();
            let special = sorted == [0, 2, 2] || sorted == [0, 0, 2] || x == [2, 0, 1] || x == [0, 2, 1];
            if special {
                1.0 + epsilon
            } else {
                let positive = x.iter().filter(|&&a| a > 0).count();
                let below_top = x.iter().filter(|&&a| a < 2).count();
                positive.min(below_top) as f64
            }
        }
        Rule::Fig4 { x: top } => {
            let (a, b) = (x[0] as usize, x[1] as usize);
            if (a, b) == (0, 2) {
                *top
            } else {
                FIG4[a][b]
            }
        }
        Rule::Lemma4 { epsilon } => {
            if x == [0, 0] || x == [bound, bound] {
                0.0
            } else if x == [bound, 0] {
                1.0
            } else {
                *epsilon
            }
        }
        Rule::Cardinality => x.iter().map(|&c| c as f64).sum(),
        Rule::LatticeTable(values) => {
            let radix = bound as usize + 1;
            let idx = x.iter().rev().fold(0, |acc, &c| acc * radix + c as usize);
            values[idx]
        }
        Rule::IdealTable(_) | Rule::Separable(_) | Rule::Chains { .. } => {
            unreachable!("ideal rule evaluated on a lattice point")
        }
    }
}

fn ideal_rule_value(rule: &Rule, set: Mask) -> f64 {
    match rule {
        Rule::Cardinality => set.count_ones() as f64,
        Rule::IdealTable(table) => table[&set],
        Rule::Separable(s) => s.value(set),
        Rule::Chains { inner, n, bound } => {
            let c = *bound as usize;
            let chain = if c == 0 { 0 } else { (1u64 << c) - 1 };
            let coords: Vec<u32> = (0..*n).map(|i| ((set >> (i * c)) & chain).count_ones()).collect();
            lattice_rule_value(inner, &coords, *bound)
        }
        _ => unreachable!("lattice rule evaluated on an ideal"),
    }
}
