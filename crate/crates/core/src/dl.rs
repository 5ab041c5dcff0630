//! Solvers on distributive lattices: greedy under poset-matroid constraints
//! and double greedy for unconstrained DR-submodular maximization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::checks::{check_dr_dl, check_monotone, DrDlMode};
use crate::constraint::{IndependenceOracle, PosetMatroid};
use crate::error::{invalid, LatmaxError, Result};
use crate::lattice::{bit, mask_elements, mask_of, Ideal, LinearExtension, Mask, Poset};
use crate::numeric::{Comparison, TAU};
use crate::oracle::{Tally, ValueOracle};
use crate::smbil::BranchRecord;
use crate::trace::TraceVerdict;

fn dl_poset(oracle: &ValueOracle) -> Result<&Poset> {
    oracle
        .poset()
        .ok_or_else(|| LatmaxError::DomainMismatch("distributive-lattice solver on an integer lattice".into()))
}

fn ids(m: Mask) -> Vec<usize> {
    mask_elements(m).collect()
}

// ---------------------------------------------------------------- greedy

/// One processed element of the greedy scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyScan {
    pub element: usize,
    /// `f(S+x) - f(S)`; absent for blocked elements.
    pub gain: Option<f64>,
    pub accepted: bool,
    /// Discarded because a predecessor was discarded earlier.
    pub blocked: bool,
}

/// An accepted element: `S^i = S^{i-1} + x_{r^i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyAccept {
    pub set: Vec<usize>,
    pub value: f64,
    pub rho: f64,
    /// 1-based position of the element in the processed order.
    pub r: usize,
    /// `f(OPT) - f(S^i)` once a reference optimum is attached.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatroidGreedyTrace {
    pub poset: Poset,
    /// Number of matroids intersected (1 for a single constraint).
    pub matroids: usize,
    /// Set when the constraint is `|S| ≤ k`.
    pub cardinality: Option<usize>,
    pub f_empty: f64,
    pub scan: Vec<GreedyScan>,
    pub accepted: Vec<GreedyAccept>,
    pub opt: Option<Vec<usize>>,
    pub f_opt: Option<f64>,
    pub sigma: Option<Vec<usize>>,
    /// Whether the input was certified monotone and DR-submodular.
    pub monotone_dr: Option<bool>,
    pub queries: u64,
}

#[derive(Debug, Clone)]
pub struct MatroidGreedyRun {
    pub solution: Ideal,
    pub value: f64,
    pub queries: u64,
    pub trace: MatroidGreedyTrace,
}

/// `σ_i = |OPT ∩ {x_{r^i}, …, x_{r^{i+1}-1}}|` with `r^1 = 1` and
/// `r^{K+1} = n + 1`; `order` is the processed order, `r` the 1-based
/// acceptance positions.
pub fn sigma_counts(order: &[usize], r: &[usize], opt: Mask) -> Vec<usize> {
    let k = r.len();
    (0..k)
        .map(|i| {
            let start = if i == 0 { 1 } else { r[i] };
            let end = if i + 1 < k { r[i + 1] } else { order.len() + 1 };
            order[start - 1..end - 1].iter().filter(|&&e| opt & bit(e) != 0).count()
        })
        .collect()
}

fn greedy(
    oracle: &ValueOracle,
    accept: &dyn Fn(Mask) -> bool,
    matroids: usize,
    cardinality: Option<usize>,
) -> Result<MatroidGreedyRun> {
    let poset = dl_poset(oracle)?;
    let m = poset.size();
    let mut ev = Tally::new(oracle);
    let mut s: Mask = 0;
    let mut processed: Mask = 0;
    let mut f_s = ev.mask(0);
    let f_empty = f_s;
    let mut scan = Vec::with_capacity(m);
    let mut accepted = Vec::new();
    while processed.count_ones() as usize != m {
        let mut best: Option<(usize, f64, f64)> = None;
        let mut cands = Vec::new();
        for x in (0..m).filter(|&x| processed & bit(x) == 0 && poset.addable(s, x)) {
            let v = ev.mask(s | bit(x));
            cands.push((x, v - f_s, v));
        }
        let max = cands.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        if let Some(&c) = cands.iter().find(|c| c.1 >= max - TAU) {
            best = Some(c);
        }
        match best {
            Some((x, gain, v)) => {
                processed |= bit(x);
                let ok = accept(s | bit(x));
                scan.push(GreedyScan { element: x, gain: Some(gain), accepted: ok, blocked: false });
                if ok {
                    s |= bit(x);
                    f_s = v;
                    accepted.push(GreedyAccept { set: ids(s), value: v, rho: gain, r: scan.len(), gap: None });
                }
            }
            None => {
                // every minimal unprocessed element sits above a discarded one
                let minimal: Vec<usize> =
                    (0..m).filter(|&x| processed & bit(x) == 0 && poset.below(x) & !processed == 0).collect();
                for x in minimal {
                    processed |= bit(x);
                    scan.push(GreedyScan { element: x, gain: None, accepted: false, blocked: true });
                }
            }
        }
    }
    let trace = MatroidGreedyTrace {
        poset: poset.clone(),
        matroids,
        cardinality,
        f_empty,
        scan,
        accepted,
        opt: None,
        f_opt: None,
        sigma: None,
        monotone_dr: None,
        queries: ev.count,
    };
    Ok(MatroidGreedyRun { solution: Ideal::from_raw(m, s), value: f_s, queries: ev.count, trace })
}

/// Greedy under one poset matroid: repeatedly take the addable unprocessed
/// element of largest gain (ties to the lowest id) and keep it iff the result
/// stays independent.
pub fn greedy_poset_matroid(oracle: &ValueOracle, matroid: &PosetMatroid) -> Result<MatroidGreedyRun> {
    greedy_s_matroids(oracle, std::slice::from_ref(matroid))
}

/// Greedy under `|S| ≤ k`.
pub fn greedy_cardinality(oracle: &ValueOracle, k: usize) -> Result<MatroidGreedyRun> {
    let m = dl_poset(oracle)?.size();
    if k > m {
        return Err(invalid(format!("cardinality bound {k} exceeds the {m} elements")));
    }
    greedy(oracle, &|s: Mask| s.count_ones() as usize <= k, 1, Some(k))
}

/// Greedy under the intersection of several poset matroids on one poset.
pub fn greedy_s_matroids(oracle: &ValueOracle, matroids: &[PosetMatroid]) -> Result<MatroidGreedyRun> {
    let poset = dl_poset(oracle)?;
    if matroids.is_empty() {
        return Err(invalid("at least one matroid is required"));
    }
    if matroids.iter().any(|mt| mt.poset() != poset) {
        return Err(LatmaxError::DomainMismatch("matroid is defined on a different poset".into()));
    }
    let cardinality = match matroids {
        [single] => match single.kind() {
            crate::constraint::MatroidKind::Uniform { k } => Some(*k),
            _ => None,
        },
        _ => None,
    };
    let accept = |s: Mask| matroids.iter().all(|mt| mt.is_independent(s));
    greedy(oracle, &accept, matroids.len(), cardinality)
}

impl MatroidGreedyTrace {
    pub fn solution(&self) -> Vec<usize> {
        self.accepted.last().map(|a| a.set.clone()).unwrap_or_default()
    }

    pub fn value(&self) -> f64 {
        self.accepted.last().map(|a| a.value).unwrap_or(self.f_empty)
    }

    pub fn order(&self) -> Vec<usize> {
        self.scan.iter().map(|s| s.element).collect()
    }

    /// Attaches a reference optimum and fills `σ`, `f(OPT)` and the gaps.
    pub fn annotate_opt(&mut self, oracle: &ValueOracle, opt: &Ideal) -> Result<()> {
        let f_opt = oracle.eval_ideal(opt)?;
        let r: Vec<usize> = self.accepted.iter().map(|a| a.r).collect();
        self.sigma = Some(sigma_counts(&self.order(), &r, opt.mask()));
        self.opt = Some(opt.elements());
        self.f_opt = Some(f_opt);
        for a in &mut self.accepted {
            a.gap = Some(f_opt - a.value);
        }
        Ok(())
    }

    /// Runs the exhaustive checkers and records the result.
    pub fn certify(&mut self, oracle: &ValueOracle) -> Result<bool> {
        let ok = check_monotone(oracle, Comparison::default())?.holds
            && check_dr_dl(oracle, DrDlMode::Local, Comparison::default())?.holds;
        self.monotone_dr = Some(ok);
        Ok(ok)
    }

    /// Structural checks always; `ρ` non-increasing and nonnegative for
    /// certified inputs; with a reference optimum the prefix bound on `σ`,
    /// `Σ σ_i ρ_i ≤ Σ ρ_i`, the `1/(s+1)` guarantee and, under a
    /// cardinality constraint, `δ_{i+1} ≤ (1 - 1/k) δ_i`.
    pub fn validate(&self, cmp: Comparison) -> TraceVerdict {
        let mut v = TraceVerdict::default();
        let p = &self.poset;
        let m = p.size();
        let order = self.order();
        let mut seen: Mask = 0;
        for (i, &e) in order.iter().enumerate() {
            if e >= m || seen & bit(e) != 0 || p.below(e) & !seen != 0 {
                v.push(i + 1, "linear-extension", format!("element {e} out of order"));
                return v;
            }
            seen |= bit(e);
        }
        if order.len() != m {
            v.push(0, "linear-extension", format!("{} of {m} elements processed", order.len()));
        }
        let mut prev: Mask = 0;
        let mut f_prev = self.f_empty;
        let mut rho_prev = f64::INFINITY;
        for (i, a) in self.accepted.iter().enumerate() {
            v.steps_checked += 1;
            let step = i + 1;
            let cur = mask_of(a.set.iter().copied());
            let added = cur & !prev;
            if a.set.iter().any(|&e| e >= m) || !p.is_ideal(cur) || cur & prev != prev || added.count_ones() != 1 {
                v.push(step, "ideal-chain", format!("S^{step} = {:?} does not extend S^{} by one element", a.set, i));
                return v;
            }
            if a.r == 0 || a.r > order.len() || bit(order[a.r - 1]) != added {
                v.push(step, "r-index", format!("r^{step} = {} does not point at the added element", a.r));
            }
            if (a.value - f_prev - a.rho).abs() > TAU {
                v.push(step, "rho", format!("ρ_{step} = {} but the values differ by {}", a.rho, a.value - f_prev));
            }
            if self.monotone_dr == Some(true) {
                if !cmp.sums_ge(&[a.rho], &[0.0]) {
                    v.push(step, "rho-nonnegative", format!("ρ_{step} = {}", a.rho));
                }
                if !cmp.sums_ge(&[rho_prev], &[a.rho]) {
                    v.push(step, "rho-nonincreasing", format!("ρ_{step} = {} > ρ_{} = {rho_prev}", a.rho, i));
                }
            }
            prev = cur;
            f_prev = a.value;
            rho_prev = a.rho;
        }
        if let Some(sigma) = &self.sigma {
            let mut prefix = 0;
            for (t, &s) in sigma.iter().enumerate() {
                prefix += s;
                if prefix > t + 1 {
                    v.push(t + 1, "sigma-prefix", format!("σ_1 + … + σ_{} = {prefix}", t + 1));
                }
            }
            let weighted: Vec<f64> = sigma.iter().zip(&self.accepted).map(|(&s, a)| s as f64 * a.rho).collect();
            let plain: Vec<f64> = self.accepted.iter().map(|a| a.rho).collect();
            if self.monotone_dr == Some(true) && !cmp.sums_ge(&plain, &weighted) {
                v.push(0, "sigma-rho", "Σ σ_i ρ_i exceeds Σ ρ_i".into());
            }
        }
        if let (Some(f_opt), Some(true)) = (self.f_opt, self.monotone_dr) {
            let value = self.value();
            let s = self.matroids as f64;
            if !cmp.sums_ge(&[(s + 1.0) * value], &[f_opt]) {
                v.push(0, "matroid-bound", format!("f(S) = {value} < f(OPT)/{} with f(OPT) = {f_opt}", s + 1.0));
            }
            if let Some(k) = self.cardinality.filter(|&k| k > 0) {
                let shrink = 1.0 - 1.0 / k as f64;
                let mut gap = f_opt - self.f_empty;
                for (i, a) in self.accepted.iter().enumerate() {
                    let next = f_opt - a.value;
                    if next > shrink * gap + TAU {
                        v.push(i + 1, "cardinality-recursion", format!("δ_{} = {next} > (1-1/k)·{gap}", i + 1));
                    }
                    gap = next;
                }
                if value < (1.0 - (-1.0f64).exp()) * f_opt - TAU {
                    v.push(0, "cardinality-bound", format!("f(S) = {value} < (1-1/e)·{f_opt}"));
                }
            }
        }
        v
    }
}

// ---------------------------------------------------------- double greedy

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DlStep {
    pub step: usize,
    pub x_min: usize,
    pub x_max: usize,
    /// `f(A + x_min) - f(A)`.
    pub gain_a: f64,
    /// `f(B - x_max) - f(B)`.
    pub gain_b: f64,
    /// Probability of the A-move (0 or 1 for the deterministic variant).
    pub prob_a: f64,
    pub took_a: bool,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub f_a: f64,
    pub f_b: f64,
    /// `f((OPT ∪ A_i) ∩ B_i)` once a reference optimum is attached.
    pub f_opt: Option<f64>,
    pub branches: Option<BranchRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DlDoubleGreedyTrace {
    pub randomized: bool,
    pub seed: Option<u64>,
    pub poset: Poset,
    pub extension: Vec<usize>,
    pub f_a0: f64,
    pub f_b0: f64,
    pub dr_certified: Option<bool>,
    pub opt: Option<Vec<usize>>,
    pub f_opt0: Option<f64>,
    pub steps: Vec<DlStep>,
    pub queries: u64,
}

#[derive(Debug, Clone)]
pub struct DlRun {
    pub solution: Ideal,
    pub value: f64,
    pub queries: u64,
    pub trace: DlDoubleGreedyTrace,
}

/// The pair considered next: first extension element in `B \ A`, and the
/// element of `B` above it with the largest extension position.
fn next_pair(poset: &Poset, ext: &[usize], a: Mask, b: Mask) -> Option<(usize, usize)> {
    let k = ext.iter().position(|&e| b & !a & bit(e) != 0)?;
    let x_min = ext[k];
    let x_max = *ext[k..].iter().rev().find(|&&e| b & bit(e) != 0 && poset.leq(x_min, e))?;
    Some((x_min, x_max))
}

fn double_greedy(oracle: &ValueOracle, extension: &LinearExtension, seed: Option<u64>) -> Result<DlRun> {
    let poset = dl_poset(oracle)?;
    if !extension.is_valid_for(poset) {
        return Err(LatmaxError::DomainMismatch("extension does not fit the oracle's poset".into()));
    }
    let ext = extension.order();
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut ev = Tally::new(oracle);
    let (mut a, mut b) = (0, poset.full());
    let (mut f_a, mut f_b) = (ev.mask(a), ev.mask(b));
    let (f_a0, f_b0) = (f_a, f_b);
    let mut steps = Vec::with_capacity(poset.size());
    while a != b {
        let (x_min, x_max) = next_pair(poset, ext, a, b).expect("A ⊊ B leaves a pair");
        let va = ev.mask(a | bit(x_min));
        let vb = ev.mask(b & !bit(x_max));
        let (ga, gb) = (va - f_a, vb - f_b);
        let (prob_a, took_a) = match rng.as_mut() {
            Some(r) => {
                let (pa, pb) = (ga.max(0.0), gb.max(0.0));
                let p = if pa + pb > 0.0 { pa / (pa + pb) } else { 0.0 };
                (p, r.gen::<f64>() < p)
            }
            None => {
                let t = ga >= gb - TAU;
                (if t { 1.0 } else { 0.0 }, t)
            }
        };
        if took_a {
            a |= bit(x_min);
            f_a = va;
        } else {
            b &= !bit(x_max);
            f_b = vb;
        }
        let branches =
            seed.map(|_| BranchRecord { prob_a, increase_a: ga, increase_b: gb, decrease_a: None, decrease_b: None });
        steps.push(DlStep {
            step: steps.len() + 1,
            x_min,
            x_max,
            gain_a: ga,
            gain_b: gb,
            prob_a,
            took_a,
            a: ids(a),
            b: ids(b),
            f_a,
            f_b,
            f_opt: None,
            branches,
        });
    }
    let m = poset.size();
    let trace = DlDoubleGreedyTrace {
        randomized: seed.is_some(),
        seed,
        poset: poset.clone(),
        extension: ext.to_vec(),
        f_a0,
        f_b0,
        dr_certified: None,
        opt: None,
        f_opt0: None,
        steps,
        queries: ev.count,
    };
    Ok(DlRun { solution: Ideal::from_raw(m, a), value: f_a, queries: ev.count, trace })
}

/// Randomized double greedy: the A-move is taken with probability
/// `a⁺ / (a⁺ + b⁺)`, where `0/0` reads as 0.
pub fn dl_double_greedy(oracle: &ValueOracle, seed: u64, extension: &LinearExtension) -> Result<DlRun> {
    double_greedy(oracle, extension, Some(seed))
}

/// Deterministic double greedy: the A-move is taken iff `a_i ≥ b_i`.
pub fn dl_double_greedy_deterministic(oracle: &ValueOracle, extension: &LinearExtension) -> Result<DlRun> {
    double_greedy(oracle, extension, None)
}

impl DlDoubleGreedyTrace {
    pub fn solution(&self) -> Vec<usize> {
        self.steps.last().map(|s| s.a.clone()).unwrap_or_default()
    }

    pub fn certify(&mut self, oracle: &ValueOracle) -> Result<bool> {
        let ok = check_dr_dl(oracle, DrDlMode::Local, Comparison::default())?.holds;
        self.dr_certified = Some(ok);
        Ok(ok)
    }

    /// Attaches `f(OPT_i)` per step and, for both possible moves of every
    /// step, the resulting decrease of `f(OPT_i)`.
    pub fn annotate_opt(&mut self, oracle: &ValueOracle, opt: &Ideal) -> Result<()> {
        let poset = dl_poset(oracle)?;
        if poset != &self.poset || opt.universe() != poset.size() || !poset.is_ideal(opt.mask()) {
            return Err(LatmaxError::DomainMismatch("reference optimum does not fit the trace".into()));
        }
        let o = opt.mask();
        let between = |a: Mask, b: Mask| oracle.eval_mask((o | a) & b);
        let (mut a, mut b) = (0, poset.full());
        let mut prev = between(a, b);
        self.opt = Some(opt.elements());
        self.f_opt0 = Some(prev);
        for s in &mut self.steps {
            let via_a = between(a | bit(s.x_min), b);
            let via_b = between(a, b & !bit(s.x_max));
            let br = s.branches.get_or_insert(BranchRecord {
                prob_a: s.prob_a,
                increase_a: s.gain_a,
                increase_b: s.gain_b,
                decrease_a: None,
                decrease_b: None,
            });
            br.decrease_a = Some(prev - via_a);
            br.decrease_b = Some(prev - via_b);
            a = mask_of(s.a.iter().copied());
            b = mask_of(s.b.iter().copied());
            prev = if s.took_a { via_a } else { via_b };
            s.f_opt = Some(prev);
        }
        Ok(())
    }

    /// Structural checks from the recorded sets alone; for certified DR
    /// inputs also `a_i + b_i ≥ 0` and the per-step expectation bound
    /// (`E[decrease] ≤ ½ E[gain]` randomized, `decrease ≤ gain`
    /// deterministic).
    pub fn validate(&self, cmp: Comparison) -> TraceVerdict {
        let mut v = TraceVerdict::default();
        let p = &self.poset;
        let m = p.size();
        let Ok(ext) = LinearExtension::new(p, self.extension.clone()) else {
            v.push(0, "extension", "recorded extension is not a linear extension".into());
            return v;
        };
        let (mut a, mut b): (Mask, Mask) = (0, p.full());
        let (mut f_a, mut f_b) = (self.f_a0, self.f_b0);
        for s in &self.steps {
            v.steps_checked += 1;
            let i = s.step;
            if s.a.iter().chain(&s.b).any(|&e| e >= m) {
                v.push(i, "shape", "element id out of range".into());
                return v;
            }
            match next_pair(p, ext.order(), a, b) {
                Some(pair) if pair == (s.x_min, s.x_max) => {}
                other => v.push(i, "pair", format!("recorded ({}, {}), expected {other:?}", s.x_min, s.x_max)),
            }
            if !p.leq(s.x_min, s.x_max) || !p.removable(b, s.x_max) || !p.addable(a, s.x_min) {
                v.push(i, "pair-shape", format!("x_min = {}, x_max = {}", s.x_min, s.x_max));
            }
            let (na, nb) = (mask_of(s.a.iter().copied()), mask_of(s.b.iter().copied()));
            let expected = if s.took_a { (a | bit(s.x_min), b) } else { (a, b & !bit(s.x_max)) };
            if (na, nb) != expected {
                v.push(i, "transition", format!("A = {:?}, B = {:?} do not follow the move", s.a, s.b));
            }
            if !p.is_ideal(na) || !p.is_ideal(nb) || na & !nb != 0 {
                v.push(i, "ideals", format!("A = {:?}, B = {:?}", s.a, s.b));
            }
            let gain = if s.took_a { (s.f_a - f_a, s.gain_a) } else { (s.f_b - f_b, s.gain_b) };
            if (gain.0 - gain.1).abs() > TAU {
                v.push(i, "gain", format!("recorded gain {} but values moved by {}", gain.1, gain.0));
            }
            let (pa, pb) = (s.gain_a.max(0.0), s.gain_b.max(0.0));
            let expected_p = if !self.randomized {
                if s.gain_a >= s.gain_b - TAU {
                    1.0
                } else {
                    0.0
                }
            } else if pa + pb > 0.0 {
                pa / (pa + pb)
            } else {
                0.0
            };
            if (expected_p - s.prob_a).abs() > TAU || (s.took_a && s.prob_a <= 0.0) || (!s.took_a && s.prob_a >= 1.0) {
                v.push(i, "probability", format!("prob_a = {} with gains ({}, {})", s.prob_a, s.gain_a, s.gain_b));
            }
            if self.dr_certified == Some(true) {
                if !cmp.sums_ge(&[s.gain_a, s.gain_b], &[]) {
                    v.push(i, "gain-sum", format!("a_i + b_i = {} < 0", s.gain_a + s.gain_b));
                }
                if let Some(br) = &s.branches {
                    if let Some(dec) = br.expected_decrease() {
                        let gain = br.expected_increase();
                        let bound = if self.randomized { 0.5 * gain } else { gain };
                        if dec > bound + TAU {
                            v.push(i, "expected-decrease", format!("expected decrease {dec} exceeds {bound}"));
                        }
                    }
                }
            }
            a = na;
            b = nb;
            f_a = s.f_a;
            f_b = s.f_b;
        }
        if a != b {
            v.push(0, "termination", "A and B differ at the end".into());
        }
        if self.steps.len() != m {
            v.push(0, "step-count", format!("{} steps for {m} elements", self.steps.len()));
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{linear_extension, TieBreak};
    use crate::oracle::Domain;

    fn modular(poset: Poset, w: Vec<f64>) -> ValueOracle {
        ValueOracle::from_ideal_fn(poset, move |s| s.elements().iter().map(|&e| w[e]).sum()).unwrap()
    }

    #[test]
    fn sigma_matches_fig5_example() {
        // OPT = {x4, x5, x6}, S = {x1, x3, x6} on the id order
        let order: Vec<usize> = (0..7).collect();
        let r = [1, 3, 6];
        assert_eq!(sigma_counts(&order, &r, mask_of([3, 4, 5])), vec![0, 2, 1]);
    }

    #[test]
    fn modular_uniform_is_exact() {
        let p = Poset::antichain(3).unwrap();
        let f = modular(p.clone(), vec![5.0, 3.0, 1.0]);
        let run = greedy_poset_matroid(&f, &PosetMatroid::uniform(p, 2)).unwrap();
        assert_eq!(run.value, 8.0);
        assert_eq!(run.solution.elements(), vec![0, 1]);
    }

    #[test]
    fn cardinality_edges() {
        let p = Poset::new(7, [(0, 1), (0, 2), (3, 4), (5, 6)]).unwrap();
        let f = ValueOracle::cardinality(Domain::Dl { poset: p.clone() });
        let run = greedy_poset_matroid(&f, &PosetMatroid::uniform(p.clone(), 3)).unwrap();
        assert_eq!(run.value, 3.0);
        assert!(p.is_ideal(run.solution.mask()));
        assert_eq!(greedy_cardinality(&f, 7).unwrap().solution.mask(), p.full());
        assert_eq!(greedy_cardinality(&f, 0).unwrap().value, 0.0);
        assert!(greedy_cardinality(&f, 8).is_err());
    }

    #[test]
    fn discarded_elements_block_successors() {
        // chain 0 < 1 plus a free element 2; only sets avoiding 0 are independent
        let p = Poset::new(3, [(0, 1)]).unwrap();
        let fam = PosetMatroid::family(p.clone(), &[vec![], vec![2]]).unwrap();
        let f = modular(p, vec![4.0, 2.0, 1.0]);
        let run = greedy_poset_matroid(&f, &fam).unwrap();
        assert_eq!(run.solution.elements(), vec![2]);
        let scan = &run.trace.scan;
        assert_eq!(scan.iter().map(|s| s.element).collect::<Vec<_>>(), vec![0, 2, 1]);
        assert!(scan[2].blocked);
        assert!(run.trace.validate(Comparison::default()).ok());
    }

    #[test]
    fn antichain_modular_double_greedy_takes_everything() {
        let p = Poset::antichain(4).unwrap();
        let f = modular(p.clone(), vec![1.0, 2.0, 0.5, 3.0]);
        let ext = linear_extension(&p, TieBreak::Id);
        for seed in 0..10 {
            let run = dl_double_greedy(&f, seed, &ext).unwrap();
            assert_eq!(run.value, 6.5);
            assert!(run.trace.steps.iter().all(|s| s.took_a));
        }
        let run = dl_double_greedy_deterministic(&f, &ext).unwrap();
        assert_eq!(run.solution.mask(), p.full());
    }

    #[test]
    fn fig4_extension_cdab() {
        let f = ValueOracle::fig4(100.0).unwrap().on_chains().unwrap();
        let p = f.poset().unwrap().clone();
        let ext = LinearExtension::new(&p, vec![2, 3, 0, 1]).unwrap();
        // 0/0 on the first pair sends the randomized run down to (2, 0)
        for seed in 0..20 {
            let run = dl_double_greedy(&f, seed, &ext).unwrap();
            assert_eq!(run.solution.elements(), vec![0, 1]);
            assert_eq!(run.value, 3.0);
        }
        // the deterministic rule takes the A-move on that tie and reaches (0, 2)
        let run = dl_double_greedy_deterministic(&f, &ext).unwrap();
        assert_eq!(run.solution.elements(), vec![2, 3]);
        assert_eq!(run.value, 100.0);
    }

    #[test]
    fn traces_validate_with_opt() {
        let p = Poset::random(7, 0.3, 3).unwrap();
        let f = ValueOracle::random_dr_dl(p.clone(), 3, crate::oracle::DrParams { monotone: false, coverage: true })
            .unwrap();
        let ext = linear_extension(&p, TieBreak::Seeded(1));
        let opt = crate::exact::exact_max(&f, &crate::constraint::Constraint::None).unwrap();
        let crate::lattice::Point::Ideal(o) = opt.argmax else { panic!() };
        for seed in 0..10 {
            let mut run = dl_double_greedy(&f, seed, &ext).unwrap();
            assert!(run.trace.certify(&f).unwrap());
            run.trace.annotate_opt(&f, &o).unwrap();
            let v = run.trace.validate(Comparison::default());
            assert!(v.ok(), "{v:?}");
        }
        let mut run = dl_double_greedy_deterministic(&f, &ext).unwrap();
        run.trace.certify(&f).unwrap();
        run.trace.annotate_opt(&f, &o).unwrap();
        assert!(run.trace.validate(Comparison::default()).ok());
        let mut corrupt = run.trace.clone();
        corrupt.steps[0].x_max = corrupt.steps[0].x_min;
        corrupt.steps[0].took_a = !corrupt.steps[0].took_a;
        assert!(!corrupt.validate(Comparison::default()).ok());
    }
}
