//! Built-in experiment configurations, one per checked claim.

use latmax_core::instance::InstanceSpec;
use latmax_core::smbil::all_choices_failure_probability;
use latmax_core::Domain;
use serde_json::json;

use crate::experiment::{ConstraintGen, ExperimentConfig, Guarantee, HypergraphSource, InstanceSource, Metric, Task};
use crate::solve::{Algorithm, OrderChoice, SolveOptions};

/// Names accepted by [`preset`].
pub const PRESETS: &[&str] = &[
    "tight-fixed",
    "tight-greedy",
    "dg13-random",
    "boolean",
    "all-choices",
    "best-options",
    "matroid-greedy",
    "card-greedy",
    "dl-dg",
    "non-dr",
    "reduction",
];

fn config(
    name: &str,
    instances: InstanceSource,
    solver: SolveOptions,
    trials: u64,
    guarantees: Vec<Guarantee>,
) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        task: Task::Solve { instances, solver, exact: true },
        trials,
        base_seed: 0,
        guarantees,
        runtime: false,
        output: None,
    }
}

fn fig3() -> InstanceSource {
    InstanceSource::Inline { instances: vec![InstanceSpec::new(None, "fig3", json!({ "epsilon": 0.1 }))] }
}

fn tight(name: &str, order: OrderChoice) -> ExperimentConfig {
    let solver = SolveOptions { order, ..SolveOptions::new(Algorithm::Dg13) };
    config(
        name,
        fig3(),
        solver,
        1,
        vec![
            Guarantee::MeanNear { metric: Metric::Achieved, target: 1.1, instance: None },
            Guarantee::MeanNear { metric: Metric::Ratio, target: 1.1 / 3.0, instance: None },
            Guarantee::MinRatio { bound: 1.0 / 3.0 },
            Guarantee::TraceInvariants,
        ],
    )
}

/// `|S| (n - |S|)` on `{0,1}^n` as an explicit table.
pub fn symmetric_cut_table(n: usize) -> InstanceSpec {
    let values: Vec<f64> = (0..1u64 << n)
        .map(|m| {
            let s = m.count_ones() as f64;
            s * (n as f64 - s)
        })
        .collect();
    InstanceSpec::new(Some(Domain::IntLattice { n, bound: 1 }), "table", json!({ "values": values }))
}

fn random_dl(per_size: u64, monotone: bool, constraint: Option<ConstraintGen>) -> InstanceSource {
    InstanceSource::RandomDrDl {
        elements: vec![6, 8, 10],
        edge_prob: 0.25,
        per_size,
        seed_start: 0,
        monotone,
        constraint,
    }
}

/// The named preset, or `None`.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    Some(match name {
        "tight-fixed" => tight(name, OrderChoice::Fixed),
        "tight-greedy" => tight(name, OrderChoice::Greedy),
        "dg13-random" => config(
            name,
            InstanceSource::RandomSubmodular { n: vec![2, 3, 4], bounds: vec![1, 2, 3], per_shape: 23, seed_start: 0 },
            SolveOptions::new(Algorithm::Dg13),
            1,
            vec![Guarantee::MinRatio { bound: 1.0 / 3.0 }, Guarantee::QueryBound, Guarantee::TraceInvariants],
        ),
        "boolean" => config(
            name,
            InstanceSource::Inline { instances: (2..=8).map(symmetric_cut_table).collect() },
            SolveOptions::new(Algorithm::Dg13),
            1,
            vec![Guarantee::MinRatio { bound: 1.0 / 3.0 }, Guarantee::QueryBound, Guarantee::TraceInvariants],
        ),
        "all-choices" => {
            let bound = all_choices_failure_probability(20, 0.1).expect("valid parameters");
            config(
                name,
                InstanceSource::Lemma4 { bounds: vec![5, 10, 20, 40], epsilon: 0.1 },
                SolveOptions::new(Algorithm::RandAll),
                10_000,
                vec![
                    Guarantee::ValueFrequency { value: 0.1, bound, instance: Some(2) },
                    Guarantee::MeanValueDecreasing,
                    Guarantee::TraceInvariants,
                ],
            )
        }
        "best-options" => config(
            name,
            fig3(),
            SolveOptions::new(Algorithm::RandBest),
            100_000,
            vec![
                Guarantee::MeanNear { metric: Metric::FirstDecrease, target: 1.0, instance: None },
                Guarantee::MeanNear { metric: Metric::FirstIncrease, target: 1.1, instance: None },
                Guarantee::TraceInvariants,
            ],
        ),
        "matroid-greedy" => config(
            name,
            random_dl(34, true, Some(ConstraintGen::Capped { k: 3 })),
            SolveOptions::new(Algorithm::MatroidGreedy),
            1,
            vec![Guarantee::MinRatio { bound: 0.5 }, Guarantee::TraceInvariants],
        ),
        "card-greedy" => config(
            name,
            random_dl(34, true, Some(ConstraintGen::Cardinality { k: 3 })),
            SolveOptions::new(Algorithm::CardGreedy),
            1,
            vec![Guarantee::MinRatio { bound: 1.0 - (-1.0f64).exp() }, Guarantee::TraceInvariants],
        ),
        "dl-dg" => config(
            name,
            random_dl(10, false, None),
            SolveOptions::new(Algorithm::DlDg),
            2000,
            vec![Guarantee::MeanRatio { bound: 0.5 }, Guarantee::QueryBound, Guarantee::TraceInvariants],
        ),
        "non-dr" => config(
            name,
            InstanceSource::Fig4Chains { x: vec![10.0, 100.0, 1000.0] },
            SolveOptions::new(Algorithm::DlDg),
            1000,
            vec![Guarantee::MeanValueAtMost { bound: 5.0, instance: None }, Guarantee::TraceInvariants],
        ),
        "reduction" => ExperimentConfig {
            name: name.into(),
            task: Task::Reduction {
                hypergraphs: HypergraphSource {
                    count: 24,
                    vertices: [3, 6],
                    edges: [1, 6],
                    k: [1, 3],
                    max_edge_size: 3,
                    seed_start: 0,
                },
            },
            trials: 1,
            base_seed: 0,
            guarantees: vec![Guarantee::ExactMatch, Guarantee::TraceInvariants],
            runtime: false,
            output: None,
        },
        _ => return None,
    })
}
