//! Double greedy on the bounded integer lattice `[C]^n` and two randomized
//! variants.
//!
//! All three keep a lower vector `a` (start `0`) and an upper vector `b`
//! (start `C`) and settle one component at a time until `a = b`. Every change
//! of `a` or `b` is one trace step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, LatmaxError, Result};
use crate::lattice::{meet_join, LatticePoint};
use crate::numeric::{Comparison, TAU};
use crate::oracle::{Tally, ValueOracle};
use crate::trace::TraceVerdict;

/// Order in which components are settled.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentOrder {
    /// `0, 1, …, n-1`.
    #[default]
    Fixed,
    /// Next component is the unsettled one with the largest `max(δ_a, δ_b)`;
    /// ties go to the lowest index.
    GainGreedy,
    Permutation(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// The chosen move of a component.
    Move,
    /// Copying the chosen value into the other vector.
    Sync,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmbilAlgorithm {
    Dg13,
    RandAll,
    RandBest,
}

impl SmbilAlgorithm {
    pub fn name(self) -> &'static str {
        match self {
            SmbilAlgorithm::Dg13 => "dg13",
            SmbilAlgorithm::RandAll => "rand-all",
            SmbilAlgorithm::RandBest => "rand-best",
        }
    }
}

/// Both outcomes of a randomized two-way choice, for expectation checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub prob_a: f64,
    pub increase_a: f64,
    pub increase_b: f64,
    /// `f(OPT^{i-1}) - f(OPT^i)` if the a-move (resp. b-move) is taken.
    pub decrease_a: Option<f64>,
    pub decrease_b: Option<f64>,
}

impl BranchRecord {
    pub fn expected_increase(&self) -> f64 {
        self.prob_a * self.increase_a + (1.0 - self.prob_a) * self.increase_b
    }

    pub fn expected_decrease(&self) -> Option<f64> {
        Some(self.prob_a * self.decrease_a? + (1.0 - self.prob_a) * self.decrease_b?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmbilStep {
    pub step: usize,
    pub component: usize,
    pub kind: StepKind,
    pub side: Side,
    /// New value of the changed coordinate.
    pub value: u32,
    pub delta_a: Option<f64>,
    pub delta_b: Option<f64>,
    pub argmax_a: Option<u32>,
    pub argmax_b: Option<u32>,
    /// Probability with which the recorded move was drawn.
    pub prob: Option<f64>,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub f_a: f64,
    pub f_b: f64,
    /// `f((OPT ∨ a^i) ∧ b^i)` once a reference optimum is attached.
    pub f_opt: Option<f64>,
    pub branches: Option<BranchRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleGreedyTrace {
    pub algorithm: SmbilAlgorithm,
    pub n: usize,
    #[serde(rename = "C")]
    pub bound: u32,
    pub seed: Option<u64>,
    pub f_a0: f64,
    pub f_b0: f64,
    pub opt: Option<Vec<u32>>,
    pub f_opt0: Option<f64>,
    pub steps: Vec<SmbilStep>,
    pub queries: u64,
}

#[derive(Debug, Clone)]
pub struct SmbilRun {
    pub solution: LatticePoint,
    pub value: f64,
    pub queries: u64,
    pub trace: DoubleGreedyTrace,
}

struct Gains {
    /// `f(a | a_k = c)` and `f(b | b_k = c)` for `c = 0..=C`.
    cand_a: Vec<f64>,
    cand_b: Vec<f64>,
    f_a: f64,
    f_b: f64,
    delta_a: f64,
    delta_b: f64,
    arg_a: u32,
    arg_b: u32,
}

fn gains(ev: &mut Tally, a: &LatticePoint, b: &LatticePoint, k: usize) -> Result<Gains> {
    let bound = a.bound();
    let mut cand_a = Vec::with_capacity(bound as usize + 1);
    let mut cand_b = Vec::with_capacity(bound as usize + 1);
    for c in 0..=bound {
        cand_a.push(ev.lattice(&a.with(k, c))?);
    }
    for c in 0..=bound {
        cand_b.push(ev.lattice(&b.with(k, c))?);
    }
    let f_a = cand_a[a.get(k) as usize];
    let f_b = cand_b[b.get(k) as usize];
    let max_a = cand_a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_b = cand_b.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // largest maximizer for a, smallest for b
    let arg_a = (0..=bound).rev().find(|&c| cand_a[c as usize] >= max_a - TAU).unwrap_or(0);
    let arg_b = (0..=bound).find(|&c| cand_b[c as usize] >= max_b - TAU).unwrap_or(bound);
    Ok(Gains { f_a, f_b, delta_a: max_a - f_a, delta_b: max_b - f_b, arg_a, arg_b, cand_a, cand_b })
}

fn check_dims(oracle: &ValueOracle) -> Result<(usize, u32)> {
    oracle
        .lattice_dims()
        .ok_or_else(|| LatmaxError::DomainMismatch("integer-lattice solver on a distributive lattice".into()))
}

fn check_order(order: &ComponentOrder, n: usize) -> Result<()> {
    if let ComponentOrder::Permutation(p) = order {
        let mut seen = vec![false; n];
        if p.len() != n || p.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
            return Err(invalid(format!("component order {p:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

struct Runner<'a> {
    ev: Tally<'a>,
    a: LatticePoint,
    b: LatticePoint,
    f_a: f64,
    f_b: f64,
    steps: Vec<SmbilStep>,
    settled: Vec<bool>,
    rng: Option<ChaCha8Rng>,
}

impl<'a> Runner<'a> {
    fn new(oracle: &'a ValueOracle, seed: Option<u64>) -> Result<Self> {
        let (n, bound) = check_dims(oracle)?;
        Ok(Runner {
            ev: Tally::new(oracle),
            a: LatticePoint::bottom(n, bound),
            b: LatticePoint::top(n, bound),
            f_a: f64::NAN,
            f_b: f64::NAN,
            steps: Vec::with_capacity(2 * n),
            settled: vec![false; n],
            rng: seed.map(ChaCha8Rng::seed_from_u64),
        })
    }

    fn record(&mut self, component: usize, kind: StepKind, side: Side, value: u32, f_new: f64) -> &mut SmbilStep {
        match side {
            Side::A => {
                self.a.set(component, value);
                self.f_a = f_new;
            }
            Side::B => {
                self.b.set(component, value);
                self.f_b = f_new;
            }
        }
        self.steps.push(SmbilStep {
            step: self.steps.len() + 1,
            component,
            kind,
            side,
            value,
            delta_a: None,
            delta_b: None,
            argmax_a: None,
            argmax_b: None,
            prob: None,
            a: self.a.coords().to_vec(),
            b: self.b.coords().to_vec(),
            f_a: self.f_a,
            f_b: self.f_b,
            f_opt: None,
            branches: None,
        });
        self.steps.last_mut().expect("just pushed")
    }

    /// Next component and its gains.
    fn next(&mut self, order: &ComponentOrder, pos: usize) -> Result<(usize, Gains)> {
        match order {
            ComponentOrder::Fixed => {
                let g = gains(&mut self.ev, &self.a, &self.b, pos)?;
                Ok((pos, g))
            }
            ComponentOrder::Permutation(p) => {
                let g = gains(&mut self.ev, &self.a, &self.b, p[pos])?;
                Ok((p[pos], g))
            }
            ComponentOrder::GainGreedy => {
                let mut best: Option<(usize, Gains)> = None;
                for k in (0..self.settled.len()).filter(|&k| !self.settled[k]) {
                    let g = gains(&mut self.ev, &self.a, &self.b, k)?;
                    let score = g.delta_a.max(g.delta_b);
                    if best.as_ref().is_none_or(|(_, bg)| score > bg.delta_a.max(bg.delta_b) + TAU) {
                        best = Some((k, g));
                    }
                }
                Ok(best.expect("an unsettled component remains"))
            }
        }
    }

    fn start_values(&mut self, first: Option<&Gains>) -> Result<()> {
        match first {
            Some(g) => {
                self.f_a = g.f_a;
                self.f_b = g.f_b;
            }
            None => {
                self.f_a = self.ev.lattice(&self.a.clone())?;
                self.f_b = self.ev.lattice(&self.b.clone())?;
            }
        }
        Ok(())
    }

    fn finish(self, algorithm: SmbilAlgorithm, seed: Option<u64>, f_a0: f64, f_b0: f64) -> SmbilRun {
        let trace = DoubleGreedyTrace {
            algorithm,
            n: self.a.dim(),
            bound: self.a.bound(),
            seed,
            f_a0,
            f_b0,
            opt: None,
            f_opt0: None,
            steps: self.steps,
            queries: self.ev.count,
        };
        SmbilRun { solution: self.a, value: self.f_a, queries: self.ev.count, trace }
    }
}

/// Two-way variants: deterministic (`seed = None`) or drawn with probability
/// proportional to the positive parts of the gains.
fn two_way(oracle: &ValueOracle, order: &ComponentOrder, seed: Option<u64>) -> Result<SmbilRun> {
    let mut run = Runner::new(oracle, seed)?;
    let n = run.a.dim();
    check_order(order, n)?;
    let (mut f_a0, mut f_b0) = (f64::NAN, f64::NAN);
    if n == 0 {
        run.start_values(None)?;
        f_a0 = run.f_a;
        f_b0 = run.f_b;
    }
    for pos in 0..n {
        let (k, g) = run.next(order, pos)?;
        if pos == 0 {
            run.start_values(Some(&g))?;
            f_a0 = run.f_a;
            f_b0 = run.f_b;
        }
        run.settled[k] = true;
        let (take_a, prob) = match run.rng.as_mut() {
            None => (g.delta_a >= g.delta_b - TAU, None),
            Some(rng) => {
                let (pa, pb) = (g.delta_a.max(0.0), g.delta_b.max(0.0));
                let p = if pa + pb > 0.0 { pa / (pa + pb) } else { 0.0 };
                let take_a = rng.gen::<f64>() < p;
                (take_a, Some(if take_a { p } else { 1.0 - p }))
            }
        };
        let prob_a = prob.map(|p| if take_a { p } else { 1.0 - p });
        let (first, second, c) = if take_a { (Side::A, Side::B, g.arg_a) } else { (Side::B, Side::A, g.arg_b) };
        let f_first = if take_a { g.cand_a[c as usize] } else { g.cand_b[c as usize] };
        let f_second = if take_a { g.cand_b[c as usize] } else { g.cand_a[c as usize] };
        let step = run.record(k, StepKind::Move, first, c, f_first);
        step.delta_a = Some(g.delta_a);
        step.delta_b = Some(g.delta_b);
        step.argmax_a = Some(g.arg_a);
        step.argmax_b = Some(g.arg_b);
        step.prob = prob;
        if let Some(p) = prob_a {
            step.branches = Some(BranchRecord {
                prob_a: p,
                increase_a: g.delta_a,
                increase_b: g.delta_b,
                decrease_a: None,
                decrease_b: None,
            });
        }
        run.record(k, StepKind::Sync, second, c, f_second);
    }
    let algo = if seed.is_some() { SmbilAlgorithm::RandBest } else { SmbilAlgorithm::Dg13 };
    Ok(run.finish(algo, seed, f_a0, f_b0))
}

/// Deterministic double greedy. Ties `δ_a = δ_b` (within τ) take the a-move.
pub fn double_greedy_smbil(oracle: &ValueOracle, order: &ComponentOrder) -> Result<SmbilRun> {
    two_way(oracle, order, None)
}

/// Draws between the best a-move and the best b-move with probability
/// `δ_a⁺ / (δ_a⁺ + δ_b⁺)`; `0/0` takes the b-move.
pub fn randomized_best_options(oracle: &ValueOracle, seed: u64, order: &ComponentOrder) -> Result<SmbilRun> {
    two_way(oracle, order, Some(seed))
}

/// Settles each component by a sequence of single moves `a_k = c`
/// (`a_k < c ≤ b_k`) or `b_k = c` (`a_k ≤ c < b_k`) drawn proportionally to
/// their positive increase. Without a positive option the move raises `a_k`
/// to the smallest zero-increase value, else lowers `b_k` to the largest
/// zero-increase value, else takes the least-bad move.
pub fn randomized_all_choices(oracle: &ValueOracle, seed: u64, order: &ComponentOrder) -> Result<SmbilRun> {
    let mut run = Runner::new(oracle, Some(seed))?;
    let n = run.a.dim();
    check_order(order, n)?;
    run.start_values(None)?;
    let (f_a0, f_b0) = (run.f_a, run.f_b);
    for pos in 0..n {
        let k = match order {
            ComponentOrder::Fixed => pos,
            ComponentOrder::Permutation(p) => p[pos],
            ComponentOrder::GainGreedy => {
                let (k, _) = run.next(order, pos)?;
                k
            }
        };
        run.settled[k] = true;
        while run.a.get(k) < run.b.get(k) {
            let (lo, hi) = (run.a.get(k), run.b.get(k));
            let mut moves: Vec<(Side, u32, f64)> = Vec::with_capacity(2 * (hi - lo) as usize);
            for c in lo + 1..=hi {
                let v = run.ev.lattice(&run.a.with(k, c))?;
                moves.push((Side::A, c, v - run.f_a));
            }
            for c in lo..hi {
                let v = run.ev.lattice(&run.b.with(k, c))?;
                moves.push((Side::B, c, v - run.f_b));
            }
            let total: f64 = moves.iter().map(|m| m.2).filter(|&d| d > TAU).sum();
            let (idx, prob) = if total > 0.0 {
                let rng = run.rng.as_mut().expect("seeded");
                let mut u = rng.gen::<f64>() * total;
                let positive: Vec<usize> = (0..moves.len()).filter(|&i| moves[i].2 > TAU).collect();
                let mut pick = *positive.last().expect("total > 0");
                for &i in &positive {
                    if u < moves[i].2 {
                        pick = i;
                        break;
                    }
                    u -= moves[i].2;
                }
                (pick, moves[pick].2 / total)
            } else {
                let zero = |m: &(Side, u32, f64)| m.2.abs() <= TAU;
                let pick = moves
                    .iter()
                    .position(|m| m.0 == Side::A && zero(m))
                    .or_else(|| moves.iter().rposition(|m| m.0 == Side::B && zero(m)))
                    .unwrap_or_else(|| {
                        (0..moves.len()).fold(0, |best, i| if moves[i].2 > moves[best].2 { i } else { best })
                    });
                (pick, 1.0)
            };
            let (side, c, inc) = moves[idx];
            let f_new = match side {
                Side::A => run.f_a + inc,
                Side::B => run.f_b + inc,
            };
            run.record(k, StepKind::Move, side, c, f_new).prob = Some(prob);
        }
    }
    Ok(run.finish(SmbilAlgorithm::RandAll, Some(seed), f_a0, f_b0))
}

/// Lower bound on the probability that the all-choices variant ends at value
/// `ε` on the `lemma4(C, ε)` instance with the fixed component order.
pub fn all_choices_failure_probability(bound: u32, epsilon: f64) -> Result<f64> {
    if bound == 0 || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("need C ≥ 1 and 0 < ε < 1, got C = {bound}, ε = {epsilon}")));
    }
    let c = bound as f64;
    let denom = (2.0 * c - 1.0) * epsilon + 1.0;
    let tail: f64 = (1..bound)
        .map(|i| {
            let r = (bound - i) as f64 * epsilon;
            (epsilon / denom) * (r / (r + 1.0 - epsilon))
        })
        .sum();
    Ok(c * epsilon / denom + tail)
}

fn opt_between(opt: &LatticePoint, a: &LatticePoint, b: &LatticePoint) -> Result<LatticePoint> {
    let (_, j) = meet_join(opt, a)?;
    let (m, _) = meet_join(&j, b)?;
    Ok(m)
}

impl DoubleGreedyTrace {
    /// Fills `f(OPT^i)` for every step and, for randomized two-way steps, the
    /// decrease under both branches. Evaluations go through `oracle` but are
    /// not counted in `queries`.
    pub fn annotate_opt(&mut self, oracle: &ValueOracle, opt: &LatticePoint) -> Result<()> {
        if opt.dim() != self.n || opt.bound() != self.bound {
            return Err(LatmaxError::DomainMismatch("reference optimum has the wrong shape".into()));
        }
        let mut a = LatticePoint::bottom(self.n, self.bound);
        let mut b = LatticePoint::top(self.n, self.bound);
        let mut prev = oracle.eval_lattice(opt)?;
        self.opt = Some(opt.coords().to_vec());
        self.f_opt0 = Some(prev);
        for step in &mut self.steps {
            if let (Some(br), Some(ca), Some(cb)) = (step.branches.as_mut(), step.argmax_a, step.argmax_b) {
                let via_a = oracle.eval_lattice(&opt_between(opt, &a.with(step.component, ca), &b)?)?;
                let via_b = oracle.eval_lattice(&opt_between(opt, &a, &b.with(step.component, cb))?)?;
                br.decrease_a = Some(prev - via_a);
                br.decrease_b = Some(prev - via_b);
            }
            a = LatticePoint::new(step.a.clone(), self.bound)?;
            b = LatticePoint::new(step.b.clone(), self.bound)?;
            let v = oracle.eval_lattice(&opt_between(opt, &a, &b)?)?;
            step.f_opt = Some(v);
            prev = v;
        }
        Ok(())
    }

    pub fn final_point(&self) -> Vec<u32> {
        self.steps.last().map(|s| s.a.clone()).unwrap_or_else(|| vec![0; self.n])
    }

    /// Checks the recorded run: shapes, `a ≤ b`, single-coordinate changes,
    /// `a = b` at the end, non-decreasing `f(a)` and `f(b)`, and for the
    /// deterministic algorithm with an attached optimum
    /// `f(OPT^{i-1}) - f(OPT^i) ≤ Δf(a) + Δf(b)`.
    pub fn validate(&self, cmp: Comparison) -> TraceVerdict {
        let mut v = TraceVerdict::default();
        let mut a = vec![0; self.n];
        let mut b = vec![self.bound; self.n];
        let (mut fa, mut fb) = (self.f_a0, self.f_b0);
        let mut f_opt = self.f_opt0;
        for s in &self.steps {
            v.steps_checked += 1;
            let i = s.step;
            if s.a.len() != self.n || s.b.len() != self.n {
                v.push(i, "shape", format!("vectors of length {}/{} for n = {}", s.a.len(), s.b.len(), self.n));
                return v;
            }
            if s.a.iter().zip(&s.b).any(|(x, y)| x > y) || s.b.iter().any(|&c| c > self.bound) {
                v.push(i, "a<=b", format!("a = {:?}, b = {:?}", s.a, s.b));
            }
            let changed: Vec<usize> = (0..self.n).filter(|&j| a[j] != s.a[j] || b[j] != s.b[j]).collect();
            if changed.iter().any(|&j| j != s.component) {
                v.push(i, "single-coordinate", format!("coordinates {changed:?} changed, component {}", s.component));
            }
            if !cmp.sums_ge(&[s.f_a], &[fa]) {
                v.push(i, "a-monotone", format!("f(a) fell from {fa} to {}", s.f_a));
            }
            if !cmp.sums_ge(&[s.f_b], &[fb]) {
                v.push(i, "b-monotone", format!("f(b) fell from {fb} to {}", s.f_b));
            }
            if self.algorithm == SmbilAlgorithm::Dg13 {
                if let (Some(prev), Some(cur)) = (f_opt, s.f_opt) {
                    if !cmp.sums_ge(&[s.f_a, s.f_b, cur], &[fa, fb, prev]) {
                        v.push(
                            i,
                            "opt-decrease",
                            format!("OPT decrease {} exceeds gain {}", prev - cur, (s.f_a - fa) + (s.f_b - fb)),
                        );
                    }
                }
            }
            a.clone_from(&s.a);
            b.clone_from(&s.b);
            fa = s.f_a;
            fb = s.f_b;
            f_opt = s.f_opt;
        }
        if a != b {
            v.push(0, "termination", format!("final a = {a:?} differs from b = {b:?}"));
        }
        if self.algorithm != SmbilAlgorithm::RandAll && self.steps.len() != 2 * self.n {
            v.push(0, "step-count", format!("{} steps for n = {}", self.steps.len(), self.n));
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[u32], bound: u32) -> LatticePoint {
        LatticePoint::new(c.to_vec(), bound).unwrap()
    }

    #[test]
    fn fig3_fixed_order() {
        let f = ValueOracle::fig3(0.1).unwrap();
        let run = double_greedy_smbil(&f, &ComponentOrder::Fixed).unwrap();
        assert_eq!(run.value, 1.1);
        // first iteration: tie δ_a = δ_b = 1.1 takes the a-move with c' = 2
        let s1 = &run.trace.steps[0];
        assert_eq!((s1.side, s1.value, s1.delta_a, s1.delta_b), (Side::A, 2, Some(1.1), Some(1.1)));
        // second component: δ_a = f(2,1,0) - f(2,0,0) = 0.9 < δ_b = 1.1, b-move to 0
        let s3 = &run.trace.steps[2];
        assert_eq!((s3.side, s3.value, s3.delta_b), (Side::B, 0, Some(1.1)));
        assert!((s3.delta_a.unwrap() - 0.9).abs() < 1e-12);
        assert_eq!(run.trace.steps[3].a, vec![2, 0, 0]);
        assert_eq!(run.trace.steps[3].b, vec![2, 0, 2]);
        assert_eq!(run.solution.coords(), &[2, 0, 2]);
        assert_eq!(run.queries, 2 * 3 * 3);
        assert!(run.trace.validate(Comparison::default()).ok());
    }

    #[test]
    fn fig3_other_orders() {
        let f = ValueOracle::fig3(0.1).unwrap();
        // settling the third coordinate second leaves (2,·,0), where the middle value 1 scores 2
        let run = double_greedy_smbil(&f, &ComponentOrder::Permutation(vec![0, 2, 1])).unwrap();
        assert_eq!(run.solution.coords(), &[2, 1, 0]);
        assert_eq!(run.value, 2.0);
        let run = double_greedy_smbil(&f, &ComponentOrder::GainGreedy).unwrap();
        assert_eq!(run.value, 1.1);
        assert!(double_greedy_smbil(&f, &ComponentOrder::Permutation(vec![0, 0, 1])).is_err());
    }

    #[test]
    fn opt_decrease_on_fig3() {
        let f = ValueOracle::fig3(0.1).unwrap();
        let mut run = double_greedy_smbil(&f, &ComponentOrder::Fixed).unwrap();
        run.trace.annotate_opt(&f, &pt(&[1, 1, 1], 2)).unwrap();
        assert_eq!(run.trace.f_opt0, Some(3.0));
        assert_eq!(run.trace.steps.last().unwrap().f_opt, Some(1.1));
        assert!(run.trace.validate(Comparison::Exact).ok());
    }

    #[test]
    fn corrupted_trace_is_caught() {
        let f = ValueOracle::fig3(0.1).unwrap();
        let mut run = double_greedy_smbil(&f, &ComponentOrder::Fixed).unwrap();
        run.trace.steps[2].f_a = -1.0;
        let v = run.trace.validate(Comparison::default());
        assert_eq!(v.first("a-monotone").unwrap().step, 3);
    }

    #[test]
    fn rand_best_first_step_on_fig3() {
        let f = ValueOracle::fig3(0.1).unwrap();
        let opt = pt(&[1, 1, 1], 2);
        for seed in 0..20 {
            let mut run = randomized_best_options(&f, seed, &ComponentOrder::Fixed).unwrap();
            run.trace.annotate_opt(&f, &opt).unwrap();
            let br = run.trace.steps[0].branches.clone().unwrap();
            assert_eq!(br.prob_a, 0.5);
            assert_eq!(br.expected_decrease(), Some(1.0));
            assert_eq!(br.expected_increase(), 1.1);
            let v = run.trace.validate(Comparison::default());
            assert!(v.ok(), "{v:?}");
        }
    }

    #[test]
    fn rand_all_terminates_with_equal_vectors() {
        let f = ValueOracle::lemma4(6, 0.1).unwrap();
        for seed in 0..50 {
            let run = randomized_all_choices(&f, seed, &ComponentOrder::Fixed).unwrap();
            assert!(run.value == 0.1 || run.value == 1.0 || run.value == 0.0);
            let v = run.trace.validate(Comparison::default());
            assert!(v.ok(), "{v:?}");
        }
    }

    #[test]
    fn seeds_reproduce() {
        let f = ValueOracle::random_submodular(3, 3, 5).unwrap();
        let r1 = randomized_all_choices(&f, 9, &ComponentOrder::Fixed).unwrap();
        let r2 = randomized_all_choices(&f, 9, &ComponentOrder::Fixed).unwrap();
        assert_eq!(r1.trace, r2.trace);
        let r1 = randomized_best_options(&f, 9, &ComponentOrder::GainGreedy).unwrap();
        let r2 = randomized_best_options(&f, 9, &ComponentOrder::GainGreedy).unwrap();
        assert_eq!(r1.trace, r2.trace);
    }

    #[test]
    fn all_choices_bound_against_simulation() {
        assert!((all_choices_failure_probability(1, 0.1).unwrap() - 1.0 / 11.0).abs() < 1e-12);
        assert!((all_choices_failure_probability(20, 0.1).unwrap() - 0.594207651735).abs() < 1e-9);
        assert!(all_choices_failure_probability(0, 0.1).is_err());
        let f = ValueOracle::lemma4(5, 0.1).unwrap();
        let trials = 4000;
        let hits = (0..trials)
            .filter(|&s| randomized_all_choices(&f, s, &ComponentOrder::Fixed).unwrap().value == 0.1)
            .count() as f64;
        let p = hits / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(p >= all_choices_failure_probability(5, 0.1).unwrap() - 3.0 * se, "{p}");
    }
}
