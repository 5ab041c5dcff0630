//! Acceptance suite: one pass/fail line per criterion; exits nonzero if any
//! criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use latmax_cli::experiment::{materialize, run_experiment, Report, Task};
use latmax_cli::fmt::sig;
use latmax_cli::presets::preset;
use latmax_cli::solve::certify;
use latmax_core::checks::{
    check_coordinate_concave, check_poset_matroid, check_submodular, PropertyReport, SubmodularMode,
};
use latmax_core::instance::Instance;
use latmax_core::smbil::{all_choices_failure_probability, double_greedy_smbil, ComponentOrder};
use latmax_core::{enumerate_ideals, Comparison, LatticePoint, Poset, PosetMatroid, ValueOracle, TAU};
use serde_json::{json, Value};

/// Tolerance on the tight-example ratio.
const RATIO_TOL: f64 = 1e-9;
/// Tolerance on guarantee bounds.
const BOUND_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
    csv: String,
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn run(name: &str) -> Report {
    run_experiment(&preset(name).expect("preset exists")).expect("experiment runs")
}

fn failed_verdicts(r: &Report) -> Vec<String> {
    r.verdicts.iter().filter(|v| !v.pass).map(|v| format!("{} (observed {})", v.name, sig(v.observed))).collect()
}

fn cli(args: &[&str]) -> (bool, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_latmax")).args(args).output().expect("binary runs");
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.success(), v)
}

fn tight_example(dir: &Path) -> Outcome {
    let start = Instant::now();
    let path = dir.join("fig3.json");
    std::fs::write(&path, json!({"function": {"family": "fig3", "params": {"epsilon": 0.1}}}).to_string()).unwrap();
    let p = path.to_str().unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for order in ["fixed", "greedy"] {
        let (status, v) = cli(&["solve", "--algo", "dg13", "--instance", p, "--order", order, "--exact"]);
        let value = v["run"]["value"].as_f64();
        let exact = v["exact"].as_f64();
        ok &= status && value == Some(1.1) && exact == Some(3.0);
        notes.push(format!("{order}: value {}", value.map_or("missing".into(), sig)));
    }
    let (status, v) = cli(&["exact", "--instance", p]);
    ok &= status && v["value"].as_f64() == Some(3.0);
    let mut csv = String::new();
    for name in ["tight-fixed", "tight-greedy"] {
        let r = run(name);
        let row = &r.rows[0];
        ok &= row.achieved == 1.1 && row.exact == Some(3.0);
        ok &= row.ratio.is_some_and(|x| (x - 1.1 / 3.0).abs() <= RATIO_TOL) && r.passed;
        csv.push_str(&r.csv());
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    Outcome {
        pass: ok,
        detail: format!("{}, exact 3, ratio {}, {}", notes.join(", "), sig(1.1 / 3.0), secs(elapsed)),
        csv,
    }
}

/// Optimum over `[C]^n` by an independent scan of mixed-radix indices.
fn scan_lattice(f: &ValueOracle) -> f64 {
    let (n, c) = f.lattice_dims().unwrap();
    let total = (c as usize + 1).pow(n as u32);
    (0..total).map(|i| f.eval_lattice(&LatticePoint::from_index(i, n, c)).unwrap()).fold(f64::NEG_INFINITY, f64::max)
}

fn dg13_random() -> Outcome {
    let start = Instant::now();
    let cfg = preset("dg13-random").unwrap();
    let r = run_experiment(&cfg).unwrap();
    let Task::Solve { instances, .. } = &cfg.task else { unreachable!() };
    let specs = materialize(instances).unwrap();
    let mut mismatches = 0;
    for (row, (_, spec)) in r.rows.iter().zip(&specs) {
        let inst = spec.build().unwrap();
        if row.exact != Some(scan_lattice(&inst.oracle)) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    let fails = failed_verdicts(&r);
    Outcome {
        pass: r.rows.len() >= 200 && fails.is_empty() && mismatches == 0 && elapsed < Duration::from_secs(30),
        detail: format!(
            "{} instances, min ratio {}, max queries {}, {} optimum mismatches, {}{}",
            r.rows.len(),
            sig(r.aggregates.min_ratio.unwrap_or(f64::NAN)),
            r.aggregates.max_queries,
            mismatches,
            secs(elapsed),
            fmt_fails(&fails)
        ),
        csv: r.csv(),
    }
}

fn fmt_fails(fails: &[String]) -> String {
    if fails.is_empty() {
        String::new()
    } else {
        format!("; failed: {}", fails.join("; "))
    }
}

/// Deterministic double greedy on `{0,1}^n`: add `i` iff the gain of adding
/// is at least the gain of removing.
fn classical_double_greedy(f: &ValueOracle) -> Vec<u32> {
    let (n, _) = f.lattice_dims().unwrap();
    let eval = |x: &[u32]| f.eval_lattice(&LatticePoint::new(x.to_vec(), 1).unwrap()).unwrap();
    let mut lo = vec![0u32; n];
    let mut hi = vec![1u32; n];
    for i in 0..n {
        let mut up = lo.clone();
        up[i] = 1;
        let mut down = hi.clone();
        down[i] = 0;
        let add = eval(&up) - eval(&lo);
        let remove = eval(&down) - eval(&hi);
        if add >= remove - TAU {
            lo = up;
        } else {
            hi = down;
        }
    }
    lo
}

fn boolean() -> Outcome {
    let start = Instant::now();
    let r = run("boolean");
    let mut agree = 0;
    let mut disagree = 0;
    let mut oracles: Vec<ValueOracle> = Vec::new();
    for n in 2..=6 {
        for seed in 0..40 {
            oracles.push(ValueOracle::random_submodular(n, 1, seed).unwrap());
        }
    }
    for n in 2..=8 {
        oracles.push(latmax_cli::presets::symmetric_cut_table(n).build().unwrap().oracle);
    }
    for f in &oracles {
        let run = double_greedy_smbil(f, &ComponentOrder::Fixed).unwrap();
        if run.solution.coords() == classical_double_greedy(f).as_slice() {
            agree += 1;
        } else {
            disagree += 1;
        }
    }
    let fails = failed_verdicts(&r);
    Outcome {
        pass: fails.is_empty() && disagree == 0,
        detail: format!(
            "cut tables n=2..8 min ratio {}; matches classical double greedy on {agree}/{} instances, {}{}",
            sig(r.aggregates.min_ratio.unwrap_or(f64::NAN)),
            agree + disagree,
            secs(start.elapsed()),
            fmt_fails(&fails)
        ),
        csv: r.csv(),
    }
}

fn all_choices() -> Outcome {
    let start = Instant::now();
    let r = run("all-choices");
    let elapsed = start.elapsed();
    let means: Vec<String> = r.aggregates.per_instance.iter().map(|s| sig(s.value.mean)).collect();
    let p20 = r.aggregates.per_instance.get(2).map(|_| {
        let rows: Vec<_> = r.rows.iter().filter(|x| x.instance == 2).collect();
        rows.iter().filter(|x| (x.achieved - 0.1).abs() <= TAU).count() as f64 / rows.len() as f64
    });
    let fails = failed_verdicts(&r);
    Outcome {
        pass: fails.is_empty() && elapsed < Duration::from_secs(20),
        detail: format!(
            "C=20: Pr[value=0.1] {} vs bound {}; means over C=5,10,20,40: {}; {}{}",
            sig(p20.unwrap_or(f64::NAN)),
            sig(all_choices_failure_probability(20, 0.1).unwrap()),
            means.join(" > "),
            secs(elapsed),
            fmt_fails(&fails)
        ),
        csv: r.csv(),
    }
}

fn best_options() -> Outcome {
    let start = Instant::now();
    let r = run("best-options");
    let elapsed = start.elapsed();
    let mean = |f: fn(&latmax_cli::Row) -> Option<f64>| {
        let v: Vec<f64> = r.rows.iter().filter_map(f).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let fails = failed_verdicts(&r);
    Outcome {
        pass: fails.is_empty() && r.rows.len() == 100_000 && elapsed < Duration::from_secs(20),
        detail: format!(
            "{} trials, E[decrease] {}, E[increase] {}, {}{}",
            r.rows.len(),
            sig(mean(|x| x.first_decrease)),
            sig(mean(|x| x.first_increase)),
            secs(elapsed),
            fmt_fails(&fails)
        ),
        csv: r.csv(),
    }
}

/// Constrained optimum over every subset that is an ideal, by direct scan.
fn scan_ideals(inst: &Instance) -> f64 {
    let poset = inst.oracle.poset().unwrap();
    let m = poset.size();
    (0u64..1 << m)
        .filter(|&s| poset.is_ideal(s) && inst.constraint.admits_set(s))
        .map(|s| inst.oracle.eval_ideal(&poset.ideal_from_mask(s).unwrap()).unwrap())
        .fold(f64::NEG_INFINITY, f64::max)
}

fn greedy_guarantees() -> Outcome {
    let start = Instant::now();
    let mut csv = String::new();
    let mut notes = Vec::new();
    let mut ok = true;
    for name in ["matroid-greedy", "card-greedy"] {
        let cfg = preset(name).unwrap();
        let r = run_experiment(&cfg).unwrap();
        let Task::Solve { instances, solver, .. } = &cfg.task else { unreachable!() };
        let specs = materialize(instances).unwrap();
        let mut mismatches = 0;
        let mut uncertified = 0;
        for (row, (_, spec)) in r.rows.iter().zip(&specs) {
            let inst = spec.build().unwrap();
            mismatches += usize::from(row.exact != Some(scan_ideals(&inst)));
            uncertified += usize::from(certify(&inst, solver.algorithm).unwrap() != Some(true));
        }
        let fails = failed_verdicts(&r);
        ok &= r.rows.len() >= 100 && fails.is_empty() && mismatches == 0 && uncertified == 0;
        notes.push(format!(
            "{name}: {} instances, min ratio {}, {mismatches} optimum mismatches, {uncertified} uncertified{}",
            r.rows.len(),
            sig(r.aggregates.min_ratio.unwrap_or(f64::NAN)),
            fmt_fails(&fails)
        ));
        csv.push_str(&r.csv());
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    Outcome { pass: ok, detail: format!("{}; {}", notes.join("; "), secs(elapsed)), csv }
}

fn dl_double_greedy() -> Outcome {
    let start = Instant::now();
    let cfg = preset("dl-dg").unwrap();
    let r = run_experiment(&cfg).unwrap();
    let Task::Solve { instances, .. } = &cfg.task else { unreachable!() };
    let specs = materialize(instances).unwrap();
    let uncertified = specs
        .iter()
        .filter(|(_, s)| certify(&s.build().unwrap(), latmax_cli::Algorithm::DlDg).unwrap() != Some(true))
        .count();
    let elapsed = start.elapsed();
    let worst = r
        .aggregates
        .per_instance
        .iter()
        .filter_map(|s| s.ratio.map(|x| x.mean - x.half_width()))
        .fold(f64::INFINITY, f64::min);
    let fails = failed_verdicts(&r);
    Outcome {
        pass: specs.len() >= 30
            && cfg.trials >= 2000
            && uncertified == 0
            && fails.is_empty()
            && worst >= 0.5 - BOUND_TOL
            && elapsed < Duration::from_secs(60),
        detail: format!(
            "{} instances x {} trials, worst mean - 3sd/sqrt(T) {}, {} step checks violated, {}{}",
            specs.len(),
            cfg.trials,
            sig(worst),
            r.aggregates.violations,
            secs(elapsed),
            fmt_fails(&fails)
        ),
        csv: r.csv(),
    }
}

fn non_dr() -> Outcome {
    let r = run("non-dr");
    let means: Vec<String> = r
        .aggregates
        .per_instance
        .iter()
        .map(|s| format!("x={} mean {}", sig(s.exact.unwrap_or(f64::NAN)), sig(s.value.mean)))
        .collect();
    let opt_is_x = r.aggregates.per_instance.iter().zip([10.0, 100.0, 1000.0]).all(|(s, x)| s.exact == Some(x));
    let fails = failed_verdicts(&r);
    Outcome {
        pass: fails.is_empty() && opt_is_x,
        detail: format!("{}{}", means.join(", "), fmt_fails(&fails)),
        csv: r.csv(),
    }
}

fn reduction() -> Outcome {
    let start = Instant::now();
    let r = run("reduction");
    let elapsed = start.elapsed();
    let fails = failed_verdicts(&r);
    Outcome {
        pass: r.rows.len() >= 20 && fails.is_empty() && elapsed < Duration::from_secs(30),
        detail: format!(
            "{} hypergraphs, optimum = k(1+R) on all, {} structural failures, {}{}",
            r.rows.len(),
            r.aggregates.violations,
            secs(elapsed),
            fmt_fails(&fails)
        ),
        csv: r.csv(),
    }
}

fn witness_line(case: &str, rep: &PropertyReport, confirmed: bool) -> String {
    let kind = rep
        .witness
        .as_ref()
        .map(|w| serde_json::to_value(w).unwrap()["kind"].as_str().unwrap_or("").to_string())
        .unwrap_or_default();
    format!("{case},{},{},{kind},{confirmed}\n", rep.property, rep.holds)
}

fn checker_soundness() -> Outcome {
    let cmp = Comparison::default();
    let mut csv = String::from("case,property,holds,witness,confirmed\n");
    let mut ok = true;

    // f(1,1) = 1 and 0 elsewhere: the unit square is supermodular
    let square = ValueOracle::lattice_table(2, 1, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
    let rep = check_submodular(&square, SubmodularMode::LocalSquares, cmp).unwrap();
    let conf = rep.witness.as_ref().is_some_and(|w| w.confirm(&square, cmp).unwrap());
    ok &= !rep.holds && conf;
    csv.push_str(&witness_line("supermodular square", &rep, conf));

    let convex = ValueOracle::lattice_table(1, 3, vec![0.0, 1.0, 4.0, 9.0]).unwrap();
    let rep = check_coordinate_concave(&convex, cmp).unwrap();
    let conf = rep.witness.as_ref().is_some_and(|w| w.confirm(&convex, cmp).unwrap());
    ok &= !rep.holds && conf;
    csv.push_str(&witness_line("convex coordinate", &rep, conf));

    let chain = Poset::chain(3).unwrap();
    let gap = PosetMatroid::family(chain.clone(), &[vec![], vec![0, 1]]).unwrap();
    let rep = check_poset_matroid(&chain, &gap).unwrap();
    let conf = rep.witness.as_ref().is_some_and(|w| w.confirm_family(&chain, &gap).unwrap());
    ok &= !rep.holds && conf;
    csv.push_str(&witness_line("non-hereditary family", &rep, conf));

    // two parallel pairs of a graphic matroid, each pair ordered by the poset
    let p = Poset::new(4, [(0, 2), (1, 3)]).unwrap();
    let forests: Vec<Vec<usize>> = enumerate_ideals(&p, 1 << 20)
        .unwrap()
        .into_iter()
        .filter(|s| !(s.contains(0) && s.contains(1)) && !(s.contains(2) && s.contains(3)))
        .map(|s| s.elements())
        .collect();
    let graphic = PosetMatroid::family(p.clone(), &forests).unwrap();
    let rep = check_poset_matroid(&p, &graphic).unwrap();
    let conf = rep.witness.as_ref().is_some_and(|w| w.confirm_family(&p, &graphic).unwrap());
    ok &= !rep.holds && conf;
    csv.push_str(&witness_line("graphic ideals", &rep, conf));

    let mut certified = Vec::new();
    let positives = [
        ("fig3 eps=0.1", ValueOracle::fig3(0.1).unwrap()),
        ("fig4 x=1", ValueOracle::fig4(1.0).unwrap()),
        ("fig4 x=10", ValueOracle::fig4(10.0).unwrap()),
        ("fig4 x=100", ValueOracle::fig4(100.0).unwrap()),
    ];
    for (case, f) in &positives {
        for mode in [SubmodularMode::LocalSquares, SubmodularMode::AllPairs] {
            let rep = check_submodular(f, mode, cmp).unwrap();
            ok &= rep.holds;
            csv.push_str(&witness_line(case, &rep, rep.holds));
        }
        certified.push(*case);
    }
    Outcome {
        pass: ok,
        detail: format!(
            "4 planted violations detected with confirmed witnesses; certified submodular: {}",
            certified.join(", ")
        ),
        csv,
    }
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("tight example", Box::new(|| tight_example(dir.path()))),
        ("double greedy guarantee", Box::new(dg13_random)),
        ("Boolean lattice", Box::new(boolean)),
        ("all-choices failure law", Box::new(all_choices)),
        ("best-options expectation gap", Box::new(best_options)),
        ("greedy guarantees", Box::new(greedy_guarantees)),
        ("DL double greedy guarantee", Box::new(dl_double_greedy)),
        ("non-DR regression", Box::new(non_dr)),
        ("reduction identity", Box::new(reduction)),
        ("checker soundness", Box::new(checker_soundness)),
    ];
    let mut all = true;
    let mut first_csvs = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        all &= o.pass;
        println!("criterion {:>2} [{name}]: {} | {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        first_csvs.push(o.csv);
    }
    let start = Instant::now();
    let differing: Vec<usize> =
        criteria.iter().enumerate().filter(|(i, (_, f))| f().csv != first_csvs[*i]).map(|(i, _)| i + 1).collect();
    let pass = differing.is_empty();
    all &= pass;
    println!(
        "criterion 11 [reproducibility]: {} | {} CSV reports, {} bytes, differing: {:?}, {}",
        if pass { "PASS" } else { "FAIL" },
        first_csvs.len(),
        first_csvs.iter().map(String::len).sum::<usize>(),
        differing,
        secs(start.elapsed())
    );
    if !all {
        std::process::exit(1);
    }
}
