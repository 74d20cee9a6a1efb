use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sps_core::analytic::SpsConfig;
use sps_core::metrics::summarize_pooled;
use sps_core::simcore::{Execution, Scenario, SimOptions, TrialBatch};

fn batch(n_sen: u32, p_k: f64) -> TrialBatch {
    TrialBatch {
        scenario: Scenario::fully_connected(n_sen),
        cfg: SpsConfig::new(p_k, 5, 1.0, 10.0).unwrap(),
        options: SimOptions::default(),
        base_seed: 7,
        trials: 8,
        duration_s: 20.0,
        warmup_s: 2.0,
    }
}

fn road_batch() -> TrialBatch {
    TrialBatch {
        scenario: Scenario::PartiallyConnected {
            road_length_km: 2.0,
            rho: 100.0,
            r_sen_km: 0.4,
        },
        cfg: SpsConfig::new(0.8, 5, 1.0, 10.0).unwrap(),
        options: SimOptions::default(),
        base_seed: 7,
        trials: 8,
        duration_s: 20.0,
        warmup_s: 2.0,
    }
}

fn execution_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("trial_batch");
    group.sample_size(10);
    let cases = [
        ("fcn_n100_pk0", batch(100, 0.0)),
        ("fcn_n300_pk0.8", batch(300, 0.8)),
        ("road_rho100", road_batch()),
    ];
    for (name, b) in cases {
        for (label, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(label, name), &b, |bench, b| {
                bench.iter(|| b.run_map(exec, |t| summarize_pooled(&t)).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, execution_modes);
criterion_main!(benches);
