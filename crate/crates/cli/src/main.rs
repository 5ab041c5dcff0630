use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use latmax_cli::experiment::{replay, run_experiment, ExperimentConfig, OutputPaths, Stats};
use latmax_cli::fmt::to_json;
use latmax_cli::presets::{preset, PRESETS};
use latmax_cli::solve::{certify, solve, Algorithm, ExtensionChoice, OrderChoice, SolveOptions};
use latmax_core::checks::{
    check_coordinate_concave, check_dr_dl, check_dr_int_lattice, check_monotone, check_poset_matroid, check_submodular,
    DrDlMode, DrLatticeMode, SubmodularMode,
};
use latmax_core::constraint::MatroidSpec;
use latmax_core::exact::{exact_max, ratio};
use latmax_core::instance::{ConstraintSpec, Instance, InstanceSpec};
use latmax_core::reduction::{reduce_dksh, Hypergraph};
use latmax_core::{Comparison, Constraint, Domain, PosetMatroid};
use serde_json::json;

#[derive(Parser)]
#[command(name = "latmax", version, about = "Submodular maximization on integer and distributive lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Submodular,
    Dr,
    Monotone,
    CoordinateConcave,
    PosetMatroid,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a property of an instance by exhaustive enumeration.
    Check {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
        /// Matroid JSON for `poset-matroid`; defaults to the instance constraint.
        #[arg(long)]
        matroid: Option<PathBuf>,
        /// Compare all pairs (or use the definition) instead of local tests.
        #[arg(long)]
        exhaustive: bool,
        /// Decide inequalities in exact rational arithmetic.
        #[arg(long)]
        exact_arith: bool,
    },
    /// Run a solver.
    Solve {
        #[arg(long, value_enum)]
        algo: Algorithm,
        #[arg(long)]
        instance: PathBuf,
        /// fixed, greedy, or a comma-separated permutation.
        #[arg(long, default_value = "fixed")]
        order: OrderChoice,
        /// id, seeded, or a comma-separated linear extension.
        #[arg(long, default_value = "id")]
        extension: ExtensionChoice,
        #[arg(long)]
        matroid: Vec<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Write the first run's trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Compare against the brute-force optimum and the solver guarantee.
        #[arg(long)]
        exact: bool,
    },
    /// Brute-force optimum over the feasible region.
    Exact {
        #[arg(long)]
        instance: PathBuf,
        /// Constraint JSON (inline or a file); overrides the instance's.
        #[arg(long)]
        constraint: Option<String>,
    },
    /// Build the knapsack instance for densest k-subhypergraph.
    Reduce {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment from a config file or a built-in preset.
    Experiment {
        #[arg(long, conflicts_with = "preset", required_unless_present_any = ["preset", "list"])]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// List preset names.
        #[arg(long)]
        list: bool,
        /// Print the resolved config instead of running it.
        #[arg(long)]
        print_config: bool,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Add a wall-clock column to the rows.
        #[arg(long)]
        runtime: bool,
    },
    /// Re-check every invariant of a recorded trace.
    Replay {
        #[arg(long)]
        trace: PathBuf,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    Instance::load(path).with_context(|| format!("loading instance {}", path.display()))
}

fn load_matroid(path: &Path) -> anyhow::Result<MatroidSpec> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing matroid {}", path.display()))
}

fn emit(value: &impl serde::Serialize) -> anyhow::Result<()> {
    print!("{}", to_json(value)?);
    Ok(())
}

fn check(
    instance: &Path,
    property: Property,
    matroid: Option<&Path>,
    exhaustive: bool,
    exact_arith: bool,
) -> anyhow::Result<bool> {
    let inst = load_instance(instance)?;
    let f = &inst.oracle;
    let cmp = if exact_arith { Comparison::Exact } else { Comparison::default() };
    let report = match property {
        Property::Submodular => {
            check_submodular(f, if exhaustive { SubmodularMode::AllPairs } else { SubmodularMode::LocalSquares }, cmp)?
        }
        Property::Dr => match f.domain() {
            Domain::IntLattice { .. } => check_dr_int_lattice(
                f,
                if exhaustive { DrLatticeMode::Definition } else { DrLatticeMode::Characterization },
                cmp,
            )?,
            Domain::Dl { .. } => check_dr_dl(f, if exhaustive { DrDlMode::Exhaustive } else { DrDlMode::Local }, cmp)?,
        },
        Property::Monotone => check_monotone(f, cmp)?,
        Property::CoordinateConcave => check_coordinate_concave(f, cmp)?,
        Property::PosetMatroid => {
            let poset = f.poset().context("poset-matroid checks need a distributive-lattice instance")?;
            let m = match (matroid, &inst.constraint) {
                (Some(p), _) => PosetMatroid::from_spec(poset.clone(), &load_matroid(p)?)?,
                (None, Constraint::Matroids(ms)) if ms.len() == 1 => ms[0].clone(),
                _ => bail!("give --matroid or an instance with a single matroid constraint"),
            };
            check_poset_matroid(poset, &m)?
        }
    };
    emit(&report)?;
    Ok(report.holds)
}

#[allow(clippy::too_many_arguments)]
fn solve_cmd(
    algo: Algorithm,
    instance: &Path,
    order: OrderChoice,
    extension: ExtensionChoice,
    matroids: &[PathBuf],
    k: Option<usize>,
    seed: u64,
    trials: u64,
    trace: Option<&Path>,
    with_exact: bool,
) -> anyhow::Result<bool> {
    if trials == 0 {
        bail!("--trials must be positive");
    }
    let inst = load_instance(instance)?;
    let opts = SolveOptions {
        algorithm: algo,
        order,
        extension,
        k,
        matroids: matroids.iter().map(|p| load_matroid(p)).collect::<anyhow::Result<_>>()?,
    };
    let exact = if with_exact { Some(exact_max(&inst.oracle, &inst.constraint)?) } else { None };
    let certified = certify(&inst, algo)?;
    let mut runs = Vec::new();
    let mut all_ok = true;
    for t in 0..trials {
        let mut out = solve(&inst, &opts, seed + t)?;
        if let Some(e) = &exact {
            out.annotate(&inst, &e.argmax)?;
        }
        out.set_certified(certified);
        let verdict = out.validate();
        all_ok &= verdict.ok();
        if t == 0 {
            if let Some(p) = trace {
                let text = serde_json::to_string_pretty(&out.trace)? + "\n";
                std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        runs.push(json!({
            "seed": out.seed,
            "solution": out.solution,
            "value": out.value,
            "queries": out.queries,
            "trace_ok": verdict.ok(),
            "violations": verdict.violations,
        }));
    }
    let values: Vec<f64> = runs.iter().map(|r| r["value"].as_f64().expect("value")).collect();
    let stats = Stats::of(&values).expect("at least one run");
    let mut summary = json!({
        "algorithm": algo.name(),
        "instance": instance.display().to_string(),
        "trials": trials,
        "value": stats,
        "trace_ok": all_ok,
    });
    let mut pass = all_ok;
    if let Some(e) = &exact {
        let ratios: Vec<f64> = values.iter().map(|&v| ratio(v, e.value)).collect::<Result<_, _>>()?;
        let rs = Stats::of(&ratios).expect("at least one run");
        summary["exact"] = json!(e.value);
        summary["ratio"] = json!(rs);
        if let Some(g) = algo.guarantee(opts.matroid_count(&inst)) {
            let observed = if opts.uses_seed() { rs.mean - rs.half_width() } else { rs.min };
            let ok = observed >= g - latmax_core::TAU;
            pass &= ok;
            summary["verdict"] =
                json!({ "name": format!("ratio >= {}", latmax_cli::fmt::sig(g)), "pass": ok, "observed": observed });
        }
    }
    if trials == 1 {
        summary["run"] = runs.pop().expect("one run");
    } else {
        summary["runs"] = json!(runs);
    }
    emit(&summary)?;
    Ok(pass)
}

fn exact_cmd(instance: &Path, constraint: Option<&str>) -> anyhow::Result<bool> {
    let text = read(instance)?;
    let mut spec: InstanceSpec = serde_json::from_str(&text).context("parsing instance")?;
    if let Some(c) = constraint {
        let body = if c.trim_start().starts_with('{') { c.to_string() } else { read(Path::new(c))? };
        spec.constraint = Some(serde_json::from_str::<ConstraintSpec>(&body).context("parsing constraint")?);
    }
    let inst = spec.build()?;
    emit(&exact_max(&inst.oracle, &inst.constraint)?)?;
    Ok(true)
}

fn reduce_cmd(hypergraph: &Path, k: usize, out: &Path) -> anyhow::Result<bool> {
    let h: Hypergraph = serde_json::from_str(&read(hypergraph)?).context("parsing hypergraph")?;
    let red = reduce_dksh(&h, k)?;
    let spec = red.to_spec();
    std::fs::write(out, serde_json::to_string_pretty(&spec)? + "\n")
        .with_context(|| format!("writing {}", out.display()))?;
    emit(&json!({
        "vertices": h.vertices(),
        "edges": h.edge_count(),
        "k": k,
        "elements": red.element_count(),
        "budget": red.knapsack.budget,
        "out": out.display().to_string(),
    }))?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn experiment_cmd(
    config: Option<&Path>,
    preset_name: Option<&str>,
    list: bool,
    print_config: bool,
    trials: Option<u64>,
    csv: Option<PathBuf>,
    json_out: Option<PathBuf>,
    runtime: bool,
) -> anyhow::Result<bool> {
    if list {
        for p in PRESETS {
            println!("{p}");
        }
        return Ok(true);
    }
    let mut cfg = match (config, preset_name) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Some(name)) => preset(name).with_context(|| format!("unknown preset {name}; try --list"))?,
        (None, None) => bail!("give --config or --preset"),
    };
    if let Some(t) = trials {
        cfg.trials = t;
    }
    cfg.runtime |= runtime;
    if csv.is_some() || json_out.is_some() {
        let mut out = cfg.output.take().unwrap_or(OutputPaths { csv: None, json: None });
        out.csv = csv.or(out.csv);
        out.json = json_out.or(out.json);
        cfg.output = Some(out);
    }
    if print_config {
        emit(&cfg)?;
        return Ok(true);
    }
    let report = run_experiment(&cfg)?;
    print!("{}", report.summary_json()?);
    Ok(report.passed)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Check { instance, property, matroid, exhaustive, exact_arith } => {
            check(&instance, property, matroid.as_deref(), exhaustive, exact_arith)
        }
        Command::Solve { algo, instance, order, extension, matroid, k, seed, trials, trace, exact } => {
            solve_cmd(algo, &instance, order, extension, &matroid, k, seed, trials, trace.as_deref(), exact)
        }
        Command::Exact { instance, constraint } => exact_cmd(&instance, constraint.as_deref()),
        Command::Reduce { hypergraph, k, out } => reduce_cmd(&hypergraph, k, &out),
        Command::Experiment { config, preset, list, print_config, trials, csv, json, runtime } => {
            experiment_cmd(config.as_deref(), preset.as_deref(), list, print_config, trials, csv, json, runtime)
        }
        Command::Replay { trace } => {
            let report = replay(&read(&trace)?)?;
            emit(&report)?;
            Ok(report.ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
