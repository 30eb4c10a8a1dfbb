//! Temporary probe: effect of steps-per-epoch on threshold calibration.

use ebr_core::fixtures::{load_fixture, FAMILY_SMALL};
use ebr_core::harness::{run_benchmark, BenchOptions, SampleSpec};
use ebr_core::kge::{train, ScorerKind, TrainConfig};
use ebr_core::triples::extract_triples;
use ebr_core::Model;

#[test]
#[ignore]
fn probe_batch_sizes() {
    let kb = load_fixture(FAMILY_SMALL).unwrap();
    let graph = extract_triples(&kb);
    for batch_size in [512usize, 156, 104, 64, 32] {
        for seed in [1u64, 2, 3] {
            let model: Model = train(
                &graph,
                ScorerKind::Complex,
                32,
                &TrainConfig {
                    batch_size,
                    seed,
                    ..Default::default()
                },
            )
            .unwrap();
            let report = run_benchmark(
                &kb,
                &model,
                &BenchOptions {
                    gamma: 0.5,
                    sample: SampleSpec { count: 90, max_depth: 3, seed: 7 },
                    strict_oracle: false,
                    clean_kb: None,
                },
            )
            .unwrap();
            let worst = report
                .per_class()
                .into_iter()
                .min_by(|a, b| a.2.partial_cmp(&b.2).unwrap())
                .unwrap();
            println!(
                "batch {batch_size} seed {seed}: overall {:.4}, worst class {} {:.4}",
                report.overall_mean().unwrap(),
                worst.0,
                worst.2
            );
        }
    }
}
