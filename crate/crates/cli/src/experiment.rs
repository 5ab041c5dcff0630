//! Experiment configs, per-run rows, aggregates and guarantee verdicts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use latmax_core::checks::{check_dr, check_monotone, check_poset_matroid};
use latmax_core::constraint::MatroidSpec;
use latmax_core::exact::{exact_max, ratio, ExactResult};
use latmax_core::instance::{ConstraintSpec, Instance, InstanceSpec};
use latmax_core::reduction::{check_transfer, dksh_brute_force, extract_dksh_solution, reduce_dksh, Hypergraph};
use latmax_core::{enumerate_ideals, enumeration_limit, Comparison, Domain, Point, Poset, PosetMatroid, TAU};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::fmt::{sig, to_json};
use crate::solve::{certify, solve, SolveOptions};

fn yes() -> bool {
    true
}

fn one() -> u64 {
    1
}

/// Where the instances of an experiment come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceSource {
    Files {
        paths: Vec<PathBuf>,
    },
    Inline {
        instances: Vec<InstanceSpec>,
    },
    /// `per_shape` seeded instances for every `(n, C)` pair.
    RandomSubmodular {
        n: Vec<usize>,
        #[serde(rename = "C")]
        bounds: Vec<u32>,
        per_shape: u64,
        #[serde(default)]
        seed_start: u64,
    },
    /// `per_size` seeded random posets and DR functions for every size.
    RandomDrDl {
        elements: Vec<usize>,
        edge_prob: f64,
        per_size: u64,
        #[serde(default)]
        seed_start: u64,
        #[serde(default = "yes")]
        monotone: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        constraint: Option<ConstraintGen>,
    },
    Lemma4 {
        #[serde(rename = "C")]
        bounds: Vec<u32>,
        epsilon: f64,
    },
    /// The `fig4` function on the two-chain poset.
    Fig4Chains {
        x: Vec<f64>,
    },
}

/// Constraint attached to generated distributive-lattice instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintGen {
    Cardinality {
        k: usize,
    },
    /// The uniform poset matroid of rank `k`.
    Uniform {
        k: usize,
    },
    /// Ideals with `|S| ≤ k` and at most `⌈k/2⌉` elements in a seeded random
    /// half of the poset, kept only if the family passes the poset-matroid
    /// check; otherwise uniform of rank `k`.
    Capped {
        k: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum Task {
    Solve {
        instances: InstanceSource,
        solver: SolveOptions,
        /// Compute brute-force optima for ratios and trace annotations.
        #[serde(default = "yes")]
        exact: bool,
    },
    /// Reduce seeded random hypergraphs and compare the reduced optimum with
    /// `k (1 + R)`.
    Reduction { hypergraphs: HypergraphSource },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypergraphSource {
    pub count: u64,
    /// Inclusive ranges.
    pub vertices: [usize; 2],
    pub edges: [usize; 2],
    pub k: [usize; 2],
    pub max_edge_size: usize,
    #[serde(default)]
    pub seed_start: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Achieved,
    Ratio,
    FirstIncrease,
    FirstDecrease,
}

/// A statement checked against the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Guarantee {
    /// Every row has `ratio ≥ bound`.
    MinRatio { bound: f64 },
    /// Per instance, `mean ratio − 3σ̂/√T ≥ bound`.
    MeanRatio { bound: f64 },
    /// Every row stays within its query budget.
    QueryBound,
    /// No row reports a trace-invariant violation.
    TraceInvariants,
    /// `achieved == exact` bit for bit in every row.
    ExactMatch,
    /// Per instance, the mean achieved value is at most `bound`.
    MeanValueAtMost {
        bound: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        instance: Option<usize>,
    },
    /// Per-instance mean values strictly decrease in instance order.
    MeanValueDecreasing,
    /// Per instance, the share of rows with `achieved = value` is at least
    /// `bound − 3σ̂/√T`.
    ValueFrequency {
        value: f64,
        bound: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        instance: Option<usize>,
    },
    /// Per instance, `|mean − target| ≤ 3σ̂/√T`.
    MeanNear {
        metric: Metric,
        target: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        instance: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(flatten)]
    pub task: Task,
    /// Runs per instance.
    #[serde(default = "one")]
    pub trials: u64,
    /// Row `r` (instance-major, then trial) runs with seed `base_seed + r`.
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub guarantees: Vec<Guarantee>,
    /// Adds a wall-clock column; reports are then no longer reproducible.
    #[serde(default)]
    pub runtime: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputPaths>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing experiment config {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub instance: usize,
    pub label: String,
    pub trial: u64,
    pub seed: u64,
    pub achieved: f64,
    pub exact: Option<f64>,
    pub ratio: Option<f64>,
    pub queries: u64,
    pub query_bound: Option<u64>,
    pub violations: usize,
    pub first_increase: Option<f64>,
    pub first_decrease: Option<f64>,
    pub runtime_ms: Option<f64>,
}

impl Row {
    fn metric(&self, m: Metric) -> Option<f64> {
        match m {
            Metric::Achieved => Some(self.achieved),
            Metric::Ratio => self.ratio,
            Metric::FirstIncrease => self.first_increase,
            Metric::FirstDecrease => self.first_decrease,
        }
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var =
            if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Some(Stats {
            count: values.len(),
            mean,
            sd: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// `3σ̂/√T`.
    pub fn half_width(&self) -> f64 {
        3.0 * self.sd / (self.count as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub instance: usize,
    pub label: String,
    pub exact: Option<f64>,
    pub value: Stats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<Stats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub rows: usize,
    pub instances: usize,
    pub min_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub ratio_sd: Option<f64>,
    pub total_queries: u64,
    pub max_queries: u64,
    pub violations: usize,
    pub per_instance: Vec<InstanceSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    /// Value compared against `threshold`, taken from the worst instance.
    pub observed: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    #[serde(skip)]
    pub rows: Vec<Row>,
    pub aggregates: Aggregates,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
}

const CSV_HEADER: &str =
    "instance,label,trial,seed,achieved,exact,ratio,queries,query_bound,violations,first_increase,first_decrease";

fn opt_f(x: Option<f64>) -> String {
    x.map(sig).unwrap_or_default()
}

impl Report {
    fn from_rows(name: &str, rows: Vec<Row>, guarantees: &[Guarantee]) -> Report {
        let aggregates = aggregate(&rows);
        let verdicts: Vec<Verdict> = guarantees.iter().map(|g| verdict(g, &rows, &aggregates)).collect();
        let passed = verdicts.iter().all(|v| v.pass);
        Report { name: name.into(), rows, aggregates, verdicts, passed }
    }

    /// Rows as CSV; the runtime column appears only if some row carries it.
    pub fn csv(&self) -> String {
        let timed = self.rows.iter().any(|r| r.runtime_ms.is_some());
        let mut out = String::from(CSV_HEADER);
        if timed {
            out.push_str(",runtime_ms");
        }
        out.push('\n');
        for r in &self.rows {
            let cells = [
                r.instance.to_string(),
                r.label.clone(),
                r.trial.to_string(),
                r.seed.to_string(),
                sig(r.achieved),
                opt_f(r.exact),
                opt_f(r.ratio),
                r.queries.to_string(),
                r.query_bound.map(|q| q.to_string()).unwrap_or_default(),
                r.violations.to_string(),
                opt_f(r.first_increase),
                opt_f(r.first_decrease),
            ];
            out.push_str(&cells.join(","));
            if timed {
                out.push(',');
                out.push_str(&opt_f(r.runtime_ms));
            }
            out.push('\n');
        }
        out
    }

    /// Aggregates and verdicts as JSON.
    pub fn summary_json(&self) -> anyhow::Result<String> {
        to_json(self)
    }

    pub fn write(&self, paths: &OutputPaths) -> anyhow::Result<()> {
        if let Some(p) = &paths.csv {
            std::fs::write(p, self.csv()).with_context(|| format!("writing {}", p.display()))?;
        }
        if let Some(p) = &paths.json {
            std::fs::write(p, self.summary_json()?).with_context(|| format!("writing {}", p.display()))?;
        }
        Ok(())
    }
}

fn aggregate(rows: &[Row]) -> Aggregates {
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let all = Stats::of(&ratios);
    let mut groups: BTreeMap<usize, Vec<&Row>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.instance).or_default().push(r);
    }
    let per_instance = groups
        .into_iter()
        .map(|(i, rs)| {
            let values: Vec<f64> = rs.iter().map(|r| r.achieved).collect();
            let ratios: Vec<f64> = rs.iter().filter_map(|r| r.ratio).collect();
            InstanceSummary {
                instance: i,
                label: rs[0].label.clone(),
                exact: rs[0].exact,
                value: Stats::of(&values).expect("group is nonempty"),
                ratio: Stats::of(&ratios),
            }
        })
        .collect::<Vec<_>>();
    Aggregates {
        rows: rows.len(),
        instances: per_instance.len(),
        min_ratio: all.map(|s| s.min),
        mean_ratio: all.map(|s| s.mean),
        ratio_sd: all.map(|s| s.sd),
        total_queries: rows.iter().map(|r| r.queries).sum(),
        max_queries: rows.iter().map(|r| r.queries).max().unwrap_or(0),
        violations: rows.iter().map(|r| r.violations).sum(),
        per_instance,
    }
}

/// Worst `(observed, threshold)` over checks of the form `observed ≥ threshold`
/// (`at_least`) or `observed ≤ threshold`.
fn worst(checks: impl IntoIterator<Item = (f64, f64)>, at_least: bool) -> Option<(f64, f64, bool)> {
    let mut out: Option<(f64, f64, f64)> = None;
    for (obs, thr) in checks {
        let margin = if at_least { obs - thr } else { thr - obs };
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        if out.is_none_or(|(_, _, m)| margin < m) {
            out = Some((obs, thr, margin));
        }
    }
    out.map(|(o, t, m)| (o, t, m >= 0.0))
}

fn scoped(rows: &[Row], instance: Option<usize>) -> BTreeMap<usize, Vec<&Row>> {
    let mut groups: BTreeMap<usize, Vec<&Row>> = BTreeMap::new();
    for r in rows.iter().filter(|r| instance.is_none_or(|i| r.instance == i)) {
        groups.entry(r.instance).or_default().push(r);
    }
    groups
}

fn group_stats(groups: &BTreeMap<usize, Vec<&Row>>, f: impl Fn(&Row) -> Option<f64>) -> Option<Vec<Stats>> {
    groups
        .values()
        .map(|rs| {
            let vals: Option<Vec<f64>> = rs.iter().map(|r| f(r)).collect();
            Stats::of(&vals?)
        })
        .collect()
}

fn scope_name(instance: Option<usize>) -> String {
    instance.map(|i| format!(" on instance {i}")).unwrap_or_default()
}

fn verdict(g: &Guarantee, rows: &[Row], agg: &Aggregates) -> Verdict {
    let (name, result) = match g {
        Guarantee::MinRatio { bound } => (
            format!("min ratio >= {}", sig(*bound)),
            rows.iter()
                .map(|r| r.ratio.map(|x| (x, bound - TAU)))
                .collect::<Option<Vec<_>>>()
                .and_then(|c| worst(c, true)),
        ),
        Guarantee::MeanRatio { bound } => (
            format!("mean ratio - 3sd/sqrt(T) >= {} per instance", sig(*bound)),
            group_stats(&scoped(rows, None), |r| r.ratio)
                .and_then(|st| worst(st.iter().map(|s| (s.mean - s.half_width(), bound - TAU)), true)),
        ),
        Guarantee::QueryBound => (
            "queries within budget".into(),
            rows.iter()
                .map(|r| r.query_bound.map(|b| (r.queries as f64, b as f64)))
                .collect::<Option<Vec<_>>>()
                .and_then(|c| worst(c, false)),
        ),
        Guarantee::TraceInvariants => (
            "trace invariants hold".into(),
            (!rows.is_empty()).then_some((agg.violations as f64, 0.0, agg.violations == 0)),
        ),
        Guarantee::ExactMatch => (
            "achieved equals exact".into(),
            rows.iter()
                .map(|r| r.exact.map(|e| ((r.achieved - e).abs(), 0.0)))
                .collect::<Option<Vec<_>>>()
                .and_then(|c| worst(c, false)),
        ),
        Guarantee::MeanValueAtMost { bound, instance } => (
            format!("mean value <= {}{}", sig(*bound), scope_name(*instance)),
            group_stats(&scoped(rows, *instance), |r| Some(r.achieved))
                .and_then(|st| worst(st.iter().map(|s| (s.mean, bound + TAU)), false)),
        ),
        Guarantee::MeanValueDecreasing => {
            let means: Vec<f64> = agg.per_instance.iter().map(|s| s.value.mean).collect();
            (
                "mean value strictly decreasing across instances".into(),
                (means.len() >= 2)
                    .then(|| worst(means.windows(2).map(|w| (w[1] - w[0], 0.0)), false))
                    .flatten()
                    .map(|(o, t, _)| (o, t, means.windows(2).all(|w| w[1] < w[0]))),
            )
        }
        Guarantee::ValueFrequency { value, bound, instance } => (
            format!("Pr[value = {}] >= {} - 3sd/sqrt(T){}", sig(*value), sig(*bound), scope_name(*instance)),
            group_stats(&scoped(rows, *instance), |r| Some(if (r.achieved - value).abs() <= TAU { 1.0 } else { 0.0 }))
                .and_then(|st| worst(st.iter().map(|s| (s.mean, bound - s.half_width() - TAU)), true)),
        ),
        Guarantee::MeanNear { metric, target, instance } => (
            format!("|mean {} - {}| <= 3sd/sqrt(T){}", metric_name(*metric), sig(*target), scope_name(*instance)),
            group_stats(&scoped(rows, *instance), |r| r.metric(*metric))
                .and_then(|st| worst(st.iter().map(|s| ((s.mean - target).abs(), s.half_width() + TAU)), false)),
        ),
    };
    match result {
        Some((observed, threshold, pass)) => Verdict { name, pass, observed, threshold },
        None => Verdict { name: format!("{name} (no data)"), pass: false, observed: f64::NAN, threshold: f64::NAN },
    }
}

fn metric_name(m: Metric) -> &'static str {
    match m {
        Metric::Achieved => "value",
        Metric::Ratio => "ratio",
        Metric::FirstIncrease => "first-step increase",
        Metric::FirstDecrease => "first-step decrease",
    }
}

/// Instances of a source with their labels, in a fixed order.
pub fn materialize(source: &InstanceSource) -> anyhow::Result<Vec<(String, InstanceSpec)>> {
    let mut out = Vec::new();
    match source {
        InstanceSource::Files { paths } => {
            for p in paths {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                let spec: InstanceSpec =
                    serde_json::from_str(&text).with_context(|| format!("parsing instance {}", p.display()))?;
                let label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                out.push((label, spec));
            }
        }
        InstanceSource::Inline { instances } => {
            for (i, s) in instances.iter().enumerate() {
                out.push((format!("{} #{i}", s.function.family), s.clone()));
            }
        }
        InstanceSource::RandomSubmodular { n, bounds, per_shape, seed_start } => {
            let mut seed = *seed_start;
            for &n in n {
                for &c in bounds {
                    for _ in 0..*per_shape {
                        let spec = InstanceSpec::new(
                            Some(Domain::IntLattice { n, bound: c }),
                            "random_submodular",
                            json!({ "seed": seed }),
                        );
                        out.push((format!("random_submodular n={n} C={c} seed={seed}"), spec));
                        seed += 1;
                    }
                }
            }
        }
        InstanceSource::RandomDrDl { elements, edge_prob, per_size, seed_start, monotone, constraint } => {
            let mut seed = *seed_start;
            for &m in elements {
                for _ in 0..*per_size {
                    let poset = Poset::random(m, *edge_prob, seed)?;
                    let mut spec = InstanceSpec::new(
                        Some(Domain::Dl { poset: poset.clone() }),
                        "random_dr_dl",
                        json!({ "seed": seed, "monotone": monotone }),
                    );
                    let mut label = format!("random_dr_dl m={m} seed={seed}");
                    if let Some(g) = constraint {
                        let (c, tag) = generate_constraint(&poset, g, seed)?;
                        label.push_str(&format!(" constraint={tag}"));
                        spec = spec.with_constraint(c);
                    }
                    out.push((label, spec));
                    seed += 1;
                }
            }
        }
        InstanceSource::Lemma4 { bounds, epsilon } => {
            for &c in bounds {
                let spec = InstanceSpec::new(None, "lemma4", json!({ "C": c, "epsilon": epsilon }));
                out.push((format!("lemma4 C={c} eps={}", sig(*epsilon)), spec));
            }
        }
        InstanceSource::Fig4Chains { x } => {
            let poset = Poset::disjoint_chains(2, 2)?;
            for &x in x {
                let spec = InstanceSpec::new(Some(Domain::Dl { poset: poset.clone() }), "fig4", json!({ "x": x }));
                out.push((format!("fig4 chains x={}", sig(x)), spec));
            }
        }
    }
    Ok(out)
}

fn generate_constraint(poset: &Poset, g: &ConstraintGen, seed: u64) -> anyhow::Result<(ConstraintSpec, String)> {
    let uniform = |k| (ConstraintSpec::Matroid(MatroidSpec::Uniform { k }), format!("uniform{k}"));
    match *g {
        ConstraintGen::Cardinality { k } => Ok((ConstraintSpec::Cardinality { k }, format!("card{k}"))),
        ConstraintGen::Uniform { k } => Ok(uniform(k)),
        ConstraintGen::Capped { k } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d_6174_726f_6964);
            let half: u64 = (0..poset.size()).filter(|_| rng.gen_bool(0.5)).fold(0, |m, e| m | (1 << e));
            let cap = k.div_ceil(2);
            let independent: Vec<Vec<usize>> = enumerate_ideals(poset, enumeration_limit())?
                .into_iter()
                .filter(|s| s.len() <= k && (s.mask() & half).count_ones() as usize <= cap)
                .map(|s| s.elements())
                .collect();
            let candidate = PosetMatroid::family(poset.clone(), &independent)?;
            if check_poset_matroid(poset, &candidate)?.holds {
                Ok((ConstraintSpec::Matroid(MatroidSpec::Family { independent }), format!("capped{k}")))
            } else {
                Ok(uniform(k))
            }
        }
    }
}

struct Prepared {
    label: String,
    inst: Instance,
    exact: Option<ExactResult>,
    certified: Option<bool>,
}

/// Runs every row of `config` and derives aggregates and verdicts.
pub fn run_experiment(config: &ExperimentConfig) -> anyhow::Result<Report> {
    if config.trials == 0 {
        bail!("trials must be positive");
    }
    let rows = match &config.task {
        Task::Solve { instances, solver, exact } => solve_rows(config, instances, solver, *exact)?,
        Task::Reduction { hypergraphs } => reduction_rows(config, hypergraphs)?,
    };
    let report = Report::from_rows(&config.name, rows, &config.guarantees);
    if let Some(out) = &config.output {
        report.write(out)?;
    }
    Ok(report)
}

fn solve_rows(
    config: &ExperimentConfig,
    source: &InstanceSource,
    solver: &SolveOptions,
    with_exact: bool,
) -> anyhow::Result<Vec<Row>> {
    let specs = materialize(source)?;
    let prepared: Vec<Prepared> = specs
        .into_par_iter()
        .map(|(label, spec)| {
            let inst = spec.build().with_context(|| format!("building {label}"))?;
            let exact = if with_exact {
                Some(exact_max(&inst.oracle, &inst.constraint).with_context(|| label.clone())?)
            } else {
                None
            };
            let certified = certify(&inst, solver.algorithm)?;
            Ok(Prepared { label, inst, exact, certified })
        })
        .collect::<anyhow::Result<_>>()?;
    let trials = config.trials;
    let jobs: Vec<(usize, u64)> = (0..prepared.len()).flat_map(|i| (0..trials).map(move |t| (i, t))).collect();
    jobs.into_par_iter()
        .map(|(i, t)| {
            let p = &prepared[i];
            let seed = config.base_seed + i as u64 * trials + t;
            let start = Instant::now();
            let mut out =
                solve(&p.inst, solver, seed).with_context(|| format!("{} on {}", solver.algorithm, p.label))?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            if let Some(e) = &p.exact {
                out.annotate(&p.inst, &e.argmax)?;
            }
            out.set_certified(p.certified);
            let verdict = out.validate();
            let (first_increase, first_decrease) = match out.first_choice() {
                Some((inc, dec)) => (Some(inc), dec),
                None => (None, None),
            };
            let exact = p.exact.as_ref().map(|e| e.value);
            Ok(Row {
                instance: i,
                label: p.label.clone(),
                trial: t,
                seed,
                achieved: out.value,
                exact,
                ratio: exact.map(|e| ratio(out.value, e)).transpose()?,
                queries: out.queries,
                query_bound: solver.query_bound(&p.inst),
                violations: verdict.violations.len(),
                first_increase,
                first_decrease,
                runtime_ms: config.runtime.then_some(elapsed),
            })
        })
        .collect()
}

fn reduction_rows(config: &ExperimentConfig, src: &HypergraphSource) -> anyhow::Result<Vec<Row>> {
    let pick = |rng: &mut ChaCha8Rng, r: [usize; 2]| rng.gen_range(r[0]..=r[1].max(r[0]));
    (0..src.count)
        .into_par_iter()
        .map(|i| {
            let seed = src.seed_start + i;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vertices = pick(&mut rng, src.vertices);
            let edges = pick(&mut rng, src.edges);
            let k = pick(&mut rng, src.k).clamp(1, vertices.max(1));
            let h = Hypergraph::random(vertices, edges, src.max_edge_size, seed)?;
            let start = Instant::now();
            let red = reduce_dksh(&h, k)?;
            let opt = exact_max(&red.oracle, &red.constraint())?;
            let (_, r) = dksh_brute_force(&h, k)?;
            let target = (k * (1 + r)) as f64;
            let Point::Ideal(best) = &opt.argmax else { bail!("reduced optimum is not an ideal") };
            let mut violations = 0;
            violations += usize::from(red.element_count() != vertices + k * edges);
            violations += usize::from(!check_dr(&red.oracle, Comparison::default())?.holds);
            violations += usize::from(!check_monotone(&red.oracle, Comparison::default())?.holds);
            violations += usize::from(extract_dksh_solution(&red, best)?.beta != r);
            violations += usize::from(!check_transfer(&red, best, opt.value, r)?.holds);
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            Ok(Row {
                instance: i as usize,
                label: format!("hypergraph n={vertices} m={edges} k={k} seed={seed}"),
                trial: 0,
                seed,
                achieved: opt.value,
                exact: Some(target),
                ratio: Some(ratio(opt.value, target)?),
                queries: opt.enumerated,
                query_bound: None,
                violations,
                first_increase: None,
                first_decrease: None,
                runtime_ms: config.runtime.then_some(elapsed),
            })
        })
        .collect()
}

/// Verdict of replaying a recorded trace.
#[derive(Debug, Clone, Serialize)]
pub struct ReplayReport {
    pub trace: &'static str,
    pub steps_checked: usize,
    pub ok: bool,
    pub violations: Vec<latmax_core::trace::Violation>,
}

/// Re-checks every invariant of a trace file from the recorded values alone.
pub fn replay(text: &str) -> anyhow::Result<ReplayReport> {
    use latmax_core::trace::AnyTrace;
    let trace: AnyTrace = serde_json::from_str(text).context("malformed trace")?;
    let kind = match &trace {
        AnyTrace::Smbil(_) => "smbil",
        AnyTrace::MatroidGreedy(_) => "matroid_greedy",
        AnyTrace::DlDoubleGreedy(_) => "dl_double_greedy",
    };
    let v = trace.validate(Comparison::default());
    Ok(ReplayReport { trace: kind, steps_checked: v.steps_checked, ok: v.ok(), violations: v.violations })
}
