//! One solver run on one instance, with optional reference annotations.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Context};
use latmax_core::checks::{check_dr, check_monotone};
use latmax_core::constraint::MatroidSpec;
use latmax_core::dl::{dl_double_greedy, dl_double_greedy_deterministic, greedy_cardinality, greedy_s_matroids};
use latmax_core::instance::Instance;
use latmax_core::smbil::{double_greedy_smbil, randomized_all_choices, randomized_best_options, ComponentOrder, Side};
use latmax_core::trace::{AnyTrace, TraceVerdict};
use latmax_core::{linear_extension, Comparison, Constraint, LinearExtension, Point, PosetMatroid, TieBreak};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Dg13,
    RandAll,
    RandBest,
    MatroidGreedy,
    CardGreedy,
    DlDg,
    DlDgDet,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dg13 => "dg13",
            Algorithm::RandAll => "rand-all",
            Algorithm::RandBest => "rand-best",
            Algorithm::MatroidGreedy => "matroid-greedy",
            Algorithm::CardGreedy => "card-greedy",
            Algorithm::DlDg => "dl-dg",
            Algorithm::DlDgDet => "dl-dg-det",
        }
    }

    /// Draws random numbers itself.
    pub fn randomized(self) -> bool {
        matches!(self, Algorithm::RandAll | Algorithm::RandBest | Algorithm::DlDg)
    }

    fn on_int_lattice(self) -> bool {
        matches!(self, Algorithm::Dg13 | Algorithm::RandAll | Algorithm::RandBest)
    }

    /// Proven approximation factor, in expectation for randomized solvers;
    /// `matroids` is the number of intersected matroids.
    pub fn guarantee(self, matroids: usize) -> Option<f64> {
        match self {
            Algorithm::Dg13 | Algorithm::DlDgDet => Some(1.0 / 3.0),
            Algorithm::MatroidGreedy => Some(1.0 / (matroids.max(1) as f64 + 1.0)),
            Algorithm::CardGreedy => Some(1.0 - (-1.0f64).exp()),
            Algorithm::DlDg => Some(0.5),
            Algorithm::RandAll | Algorithm::RandBest => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn parse_ids(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',').map(|t| t.trim().parse::<usize>().with_context(|| format!("bad id {t:?} in {s:?}"))).collect()
}

/// Component order for the integer-lattice solvers.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderChoice {
    #[default]
    Fixed,
    Greedy,
    Permutation(Vec<usize>),
}

impl OrderChoice {
    pub fn to_core(&self) -> ComponentOrder {
        match self {
            OrderChoice::Fixed => ComponentOrder::Fixed,
            OrderChoice::Greedy => ComponentOrder::GainGreedy,
            OrderChoice::Permutation(p) => ComponentOrder::Permutation(p.clone()),
        }
    }
}

impl FromStr for OrderChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Ok(match s {
            "fixed" => OrderChoice::Fixed,
            "greedy" => OrderChoice::Greedy,
            _ => OrderChoice::Permutation(parse_ids(s)?),
        })
    }
}

/// Linear extension used by the distributive-lattice double greedy.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionChoice {
    /// Smallest available id first.
    #[default]
    Id,
    /// Random available element, seeded by the run seed.
    Seeded,
    Order(Vec<usize>),
}

impl FromStr for ExtensionChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Ok(match s {
            "id" => ExtensionChoice::Id,
            "seeded" => ExtensionChoice::Seeded,
            _ => ExtensionChoice::Order(parse_ids(s)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    #[serde(default)]
    pub order: OrderChoice,
    #[serde(default)]
    pub extension: ExtensionChoice,
    /// Cardinality bound for `card-greedy`; defaults to the instance's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Matroids for `matroid-greedy`; defaults to the instance's.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matroids: Vec<MatroidSpec>,
}

impl SolveOptions {
    pub fn new(algorithm: Algorithm) -> Self {
        SolveOptions { algorithm, order: OrderChoice::Fixed, extension: ExtensionChoice::Id, k: None, matroids: vec![] }
    }

    /// Whether the run seed influences the result.
    pub fn uses_seed(&self) -> bool {
        self.algorithm.randomized()
            || (matches!(self.algorithm, Algorithm::DlDgDet) && self.extension == ExtensionChoice::Seeded)
    }

    /// Worst-case oracle query count where the solver has a fixed budget.
    pub fn query_bound(&self, inst: &Instance) -> Option<u64> {
        match self.algorithm {
            Algorithm::Dg13 | Algorithm::RandBest if !matches!(self.order, OrderChoice::Greedy) => {
                let (n, bound) = inst.oracle.lattice_dims()?;
                let n = n as u64;
                Some(2 * n * (bound as u64 + 1) + 4 * n)
            }
            Algorithm::DlDg | Algorithm::DlDgDet => Some(2 * inst.oracle.poset()?.size() as u64 + 2),
            _ => None,
        }
    }

    fn matroids(&self, inst: &Instance) -> anyhow::Result<Vec<PosetMatroid>> {
        let poset = inst.oracle.poset().context("matroid-greedy needs a distributive-lattice instance")?;
        if !self.matroids.is_empty() {
            return self
                .matroids
                .iter()
                .map(|m| PosetMatroid::from_spec(poset.clone(), m).map_err(Into::into))
                .collect();
        }
        match &inst.constraint {
            Constraint::Matroids(ms) => Ok(ms.clone()),
            Constraint::Cardinality(k) => Ok(vec![PosetMatroid::uniform(poset.clone(), *k)]),
            other => bail!("matroid-greedy needs a matroid; the instance constraint is {}", other.describe()),
        }
    }

    /// Number of matroids the greedy run intersects (1 otherwise).
    pub fn matroid_count(&self, inst: &Instance) -> usize {
        match (&inst.constraint, self.matroids.len()) {
            (_, s) if s > 0 => s,
            (Constraint::Matroids(ms), _) => ms.len(),
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub algorithm: Algorithm,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Coordinates on the integer lattice, element ids on a distributive lattice.
    pub solution: Vec<usize>,
    pub value: f64,
    pub queries: u64,
    #[serde(skip)]
    pub trace: AnyTrace,
}

fn require_unconstrained(inst: &Instance, algo: Algorithm) -> anyhow::Result<()> {
    if !matches!(inst.constraint, Constraint::None) {
        bail!("{algo} is unconstrained but the instance carries {}", inst.constraint.describe());
    }
    Ok(())
}

/// Runs `opts.algorithm` once; `seed` is ignored by deterministic solvers.
pub fn solve(inst: &Instance, opts: &SolveOptions, seed: u64) -> anyhow::Result<Outcome> {
    let f = &inst.oracle;
    let algo = opts.algorithm;
    let run_seed = opts.uses_seed().then_some(seed);
    if algo.on_int_lattice() {
        require_unconstrained(inst, algo)?;
        let order = opts.order.to_core();
        let run = match algo {
            Algorithm::Dg13 => double_greedy_smbil(f, &order)?,
            Algorithm::RandAll => randomized_all_choices(f, seed, &order)?,
            _ => randomized_best_options(f, seed, &order)?,
        };
        return Ok(Outcome {
            algorithm: algo,
            seed: run_seed,
            solution: run.solution.coords().iter().map(|&c| c as usize).collect(),
            value: run.value,
            queries: run.queries,
            trace: AnyTrace::Smbil(run.trace),
        });
    }
    let poset = f.poset().with_context(|| format!("{algo} needs a distributive-lattice instance"))?;
    let (solution, value, queries, trace) = match algo {
        Algorithm::MatroidGreedy => {
            let run = greedy_s_matroids(f, &opts.matroids(inst)?)?;
            (run.solution, run.value, run.queries, AnyTrace::MatroidGreedy(run.trace))
        }
        Algorithm::CardGreedy => {
            let k = match (opts.k, &inst.constraint) {
                (Some(k), _) | (None, &Constraint::Cardinality(k)) => k,
                _ => bail!("card-greedy needs --k or a cardinality constraint"),
            };
            let run = greedy_cardinality(f, k)?;
            (run.solution, run.value, run.queries, AnyTrace::MatroidGreedy(run.trace))
        }
        _ => {
            require_unconstrained(inst, algo)?;
            let ext = match &opts.extension {
                ExtensionChoice::Id => linear_extension(poset, TieBreak::Id),
                ExtensionChoice::Seeded => linear_extension(poset, TieBreak::Seeded(seed)),
                ExtensionChoice::Order(o) => LinearExtension::new(poset, o.clone())?,
            };
            let run = if algo == Algorithm::DlDg {
                dl_double_greedy(f, seed, &ext)?
            } else {
                dl_double_greedy_deterministic(f, &ext)?
            };
            (run.solution, run.value, run.queries, AnyTrace::DlDoubleGreedy(run.trace))
        }
    };
    Ok(Outcome { algorithm: algo, seed: run_seed, solution: solution.elements(), value, queries, trace })
}

/// Runs the property checkers that the solver's trace invariants rely on:
/// monotone and DR for the greedy solvers, DR for the lattice double greedy.
pub fn certify(inst: &Instance, algo: Algorithm) -> anyhow::Result<Option<bool>> {
    let f = &inst.oracle;
    Ok(match algo {
        Algorithm::MatroidGreedy | Algorithm::CardGreedy => {
            Some(check_monotone(f, Comparison::default())?.holds && check_dr(f, Comparison::default())?.holds)
        }
        Algorithm::DlDg | Algorithm::DlDgDet => Some(check_dr(f, Comparison::default())?.holds),
        _ => None,
    })
}

impl Outcome {
    /// Attaches a reference optimum; evaluations are not counted in `queries`.
    pub fn annotate(&mut self, inst: &Instance, opt: &Point) -> anyhow::Result<()> {
        let f = &inst.oracle;
        match (&mut self.trace, opt) {
            (AnyTrace::Smbil(t), Point::Lattice(x)) => t.annotate_opt(f, x)?,
            (AnyTrace::MatroidGreedy(t), Point::Ideal(s)) => t.annotate_opt(f, s)?,
            (AnyTrace::DlDoubleGreedy(t), Point::Ideal(s)) => t.annotate_opt(f, s)?,
            _ => bail!("reference optimum lives on the wrong domain"),
        }
        Ok(())
    }

    /// Records the certification result so property-dependent invariants apply.
    pub fn set_certified(&mut self, certified: Option<bool>) {
        match &mut self.trace {
            AnyTrace::MatroidGreedy(t) => t.monotone_dr = certified,
            AnyTrace::DlDoubleGreedy(t) => t.dr_certified = certified,
            AnyTrace::Smbil(_) => {}
        }
    }

    pub fn validate(&self) -> TraceVerdict {
        self.trace.validate(Comparison::default())
    }

    /// Realized increase and decrease at the first randomized two-way choice;
    /// the decrease needs an attached optimum.
    pub fn first_choice(&self) -> Option<(f64, Option<f64>)> {
        match &self.trace {
            AnyTrace::Smbil(t) => t.steps.iter().find_map(|s| {
                let b = s.branches.as_ref()?;
                Some(match s.side {
                    Side::A => (b.increase_a, b.decrease_a),
                    Side::B => (b.increase_b, b.decrease_b),
                })
            }),
            AnyTrace::DlDoubleGreedy(t) => t.steps.first().and_then(|s| {
                let b = s.branches.as_ref()?;
                Some(if s.took_a { (b.increase_a, b.decrease_a) } else { (b.increase_b, b.decrease_b) })
            }),
            AnyTrace::MatroidGreedy(_) => None,
        }
    }
}
