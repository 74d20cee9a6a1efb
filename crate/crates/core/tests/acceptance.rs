//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Runs the full-size Monte Carlo experiments, so expect a few minutes.

use std::process::ExitCode;
use std::time::Instant;

use sps_core::analytic::{
    fcn_rhs, p_rs_binomial_sum, p_rs_closed_form, prr_fcn, prr_pcn, solve_prr_fcn, throughput,
    PcnParams, SpsConfig,
};
use sps_core::harness::{
    figure_spec, rows_to_string, run_experiment, CsvRow, ExperimentOutput, ExperimentSpec, Metric,
    RunSettings, Source,
};
use sps_core::metrics::{aggregate, summarize_pooled, GroupKey, ScenarioKind};
use sps_core::simcore::{Execution, Scenario, SimOptions, TrialBatch};

const IDENTITY_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-9;
const BISECTION_TOL: f64 = 1e-8;
const PRR_GAP: (f64, f64) = (0.198, 0.015);
const THROUGHPUT_GAP: (f64, f64) = (1.96, 0.15);
const CEILING: (f64, f64) = (9.9, 0.05);
const FCN_AGREEMENT: f64 = 0.02;
const PCN_AGREEMENT: f64 = 0.03;
const HD_FLOOR: (f64, f64) = (0.010, 0.003);

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn cfg(p_k: f64, n_s: u32) -> SpsConfig {
    SpsConfig::new(p_k, n_s, 1.0, 10.0).unwrap()
}

fn binomial_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for p_k in [0.0, 0.2, 0.5, 0.8, 1.0] {
        for n_sen in [1u32, 10, 100, 400] {
            for n_a in [50.0, 400.0, 1000.0] {
                let c = cfg(p_k, 5);
                let closed = p_rs_closed_form(&c, f64::from(n_sen), n_a).unwrap();
                let sum = p_rs_binomial_sum(&c, n_sen, n_a).unwrap();
                worst = worst.max((closed - sum).abs());
                count += 1;
            }
        }
    }
    check(
        count == 60 && worst <= IDENTITY_TOL,
        format!("{count} combinations, max |diff| = {worst:.2e} (tol {IDENTITY_TOL:e})"),
    )
}

/// Root of x - rhs(x) on [0, 1] by bisection.
fn bisect(c: &SpsConfig, n_sen: f64) -> f64 {
    let g = |x: f64| x - fcn_rhs(c, n_sen, x).unwrap();
    let (mut lo, mut hi) = (0.0, 1.0);
    if g(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn fixed_point() -> Outcome {
    let (mut worst_res, mut worst_bis, mut points) = (0.0f64, 0.0f64, 0);
    for i in 0..=10 {
        let p_k = f64::from(i) / 10.0;
        for n_s in [5, 10, 15] {
            for n_sen in [50.0, 100.0, 159.0, 200.0, 300.0, 400.0] {
                let c = cfg(p_k, n_s);
                let fp = solve_prr_fcn(&c, n_sen).unwrap();
                let rhs = fcn_rhs(&c, n_sen, fp.prr).unwrap();
                worst_res = worst_res.max((fp.prr - rhs).abs());
                worst_bis = worst_bis.max((fp.prr - bisect(&c, n_sen)).abs());
                points += 1;
            }
        }
    }
    check(
        worst_res <= RESIDUAL_TOL && worst_bis <= BISECTION_TOL,
        format!(
            "{points} points, max residual {worst_res:.2e}, max bisection diff {worst_bis:.2e}"
        ),
    )
}

fn prr_gap() -> Outcome {
    let (lo, hi) = (cfg(0.0, 5), cfg(0.8, 5));
    let (p0, p8) = (prr_fcn(&lo, 400.0).unwrap(), prr_fcn(&hi, 400.0).unwrap());
    let gap = p8 - p0;
    let tp_gap = throughput(&hi, p8).unwrap() - throughput(&lo, p0).unwrap();
    check(
        (gap - PRR_GAP.0).abs() <= PRR_GAP.1
            && (tp_gap - THROUGHPUT_GAP.0).abs() <= THROUGHPUT_GAP.1,
        format!(
            "PRR gap {gap:.5} (want {}±{}), throughput gap {tp_gap:.4} (want {}±{})",
            PRR_GAP.0, PRR_GAP.1, THROUGHPUT_GAP.0, THROUGHPUT_GAP.1
        ),
    )
}

fn fcn_batch(n_sen: u32, p_k: f64, n_s: u32) -> TrialBatch {
    TrialBatch {
        scenario: Scenario::fully_connected(n_sen),
        cfg: cfg(p_k, n_s),
        options: SimOptions::default(),
        base_seed: 1,
        trials: 40,
        duration_s: 300.0,
        warmup_s: 10.0,
    }
}

fn throughput_ceiling() -> (Outcome, Vec<(u32, f64, f64)>) {
    let mut means = Vec::new();
    for n_s in [5, 10, 15] {
        let batch = fcn_batch(50, 0.8, n_s);
        let stats = batch
            .run_map(Execution::Parallel, |t| summarize_pooled(&t))
            .unwrap();
        let key = GroupKey {
            scenario: ScenarioKind::FullyConnected,
            p_k: 0.8,
            n_s,
            tau: 10.0,
            n_sen: Some(50.0),
            rho: None,
            r_sen_km: None,
            d_bin_m: None,
        };
        let agg = aggregate(key, &stats).unwrap();
        means.push((n_s, agg.throughput.mean, agg.throughput.ci95));
    }
    let ok = means.iter().all(|m| (m.1 - CEILING.0).abs() <= CEILING.1);
    let detail = means
        .iter()
        .map(|(n_s, m, _)| format!("n_s={n_s}: {m:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    (
        check(ok, format!("{detail} (want {}±{})", CEILING.0, CEILING.1)),
        means,
    )
}

fn find<'a>(
    rows: &'a [CsvRow],
    source: Source,
    metric: Metric,
    key: &GroupKey,
) -> Option<&'a CsvRow> {
    rows.iter()
        .find(|r| r.source == source && r.metric == metric && r.key == *key)
}

/// Largest |sim - analytic| PRR over every simulated row, and the row count.
fn agreement(out: &ExperimentOutput) -> (f64, usize, String) {
    let mut worst = (0.0f64, String::new());
    let mut n = 0;
    for sim in out
        .rows
        .iter()
        .filter(|r| r.source == Source::Sim && r.metric == Metric::Prr)
    {
        let model = find(&out.rows, Source::Analytic, Metric::Prr, &sim.key)
            .and_then(|r| r.mean)
            .unwrap_or(f64::NAN);
        let diff = (sim.mean.unwrap_or(f64::NAN) - model).abs();
        n += 1;
        if diff.is_nan() || diff > worst.0 {
            worst = (
                diff,
                format!(
                    "p_k={} N_sen={} d={:?}",
                    sim.key.p_k,
                    sim.key.n_sen.unwrap_or(0.0),
                    sim.key.d_bin_m
                ),
            );
        }
    }
    (worst.0, n, worst.1)
}

fn hd_floor() -> Outcome {
    let batch = fcn_batch(1, 0.0, 5);
    let counts = batch
        .run_map(Execution::Parallel, |t| {
            t.pairs().fold((0u64, 0u64), |(s, r), p| {
                (s + u64::from(p.sent), r + u64::from(p.received))
            })
        })
        .unwrap();
    let sent: u64 = counts.iter().map(|c| c.0).sum();
    let received: u64 = counts.iter().map(|c| c.1).sum();
    let loss = 1.0 - received as f64 / sent as f64;
    check(
        (loss - HD_FLOOR.0).abs() <= HD_FLOOR.1,
        format!(
            "loss rate {loss:.5} over {sent} packets (want {}±{})",
            HD_FLOOR.0, HD_FLOOR.1
        ),
    )
}

/// `a` is at least `b` up to overlap of their confidence intervals.
fn ge_within_ci(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 + a.1 >= b.0 - b.1
}

fn sim_estimate(
    rows: &[CsvRow],
    metric: Metric,
    pred: impl Fn(&GroupKey) -> bool,
) -> Vec<(GroupKey, (f64, f64))> {
    rows.iter()
        .filter(|r| r.source == Source::Sim && r.metric == metric && pred(&r.key))
        .map(|r| (r.key, (r.mean.unwrap(), r.ci95.unwrap())))
        .collect()
}

fn shape_properties(
    fig4a: &ExperimentOutput,
    fig5a: &ExperimentOutput,
    ceiling: &[(u32, f64, f64)],
) -> Outcome {
    let mut failures = Vec::new();
    let mut fail = |what: String| failures.push(what);

    // model
    for p_k in [0.0, 0.8] {
        for n_s in [5, 10, 15] {
            let c = cfg(p_k, n_s);
            let tps: Vec<f64> = [50.0, 100.0, 200.0, 300.0, 400.0]
                .iter()
                .map(|&n| throughput(&c, prr_fcn(&c, n).unwrap()).unwrap())
                .collect();
            if tps.windows(2).any(|w| w[1] > w[0]) {
                fail(format!(
                    "model throughput rises with N_sen (p_k={p_k}, n_s={n_s})"
                ));
            }
        }
    }
    for n_sen in [100.0, 200.0, 300.0, 400.0] {
        let prrs: Vec<f64> = (0..10)
            .map(|i| prr_fcn(&cfg(f64::from(i) / 10.0, 5), n_sen).unwrap())
            .collect();
        if prrs.windows(2).any(|w| w[1] < w[0]) {
            fail(format!("model PRR falls with p_k (N_sen={n_sen})"));
        }
    }
    let pcn = PcnParams::new(200.0, 0.4).unwrap();
    let centers: Vec<f64> = (0..16).map(|i| 12.5 + 25.0 * f64::from(i)).collect();
    let network = |p_k: f64, n_s: u32| {
        let c = cfg(p_k, n_s);
        centers
            .iter()
            .map(|&d| throughput(&c, prr_pcn(&c, &pcn, d).unwrap()).unwrap())
            .sum::<f64>()
            / centers.len() as f64
    };
    let mut gaps = Vec::new();
    for p_k in [0.0, 0.8] {
        let nets: Vec<f64> = [5, 10, 15].iter().map(|&n| network(p_k, n)).collect();
        if nets.windows(2).any(|w| w[1] < w[0]) {
            fail(format!(
                "model network throughput falls with n_s (p_k={p_k})"
            ));
        }
        for n_s in [5, 10, 15] {
            let c = cfg(p_k, n_s);
            let curve: Vec<f64> = centers
                .iter()
                .map(|&d| prr_pcn(&c, &pcn, d).unwrap())
                .collect();
            if curve.windows(2).any(|w| w[1] > w[0]) {
                fail(format!(
                    "model PRR rises with distance (p_k={p_k}, n_s={n_s})"
                ));
            }
        }
    }
    for n_s in [5, 10, 15] {
        gaps.push(network(0.8, n_s) - network(0.0, n_s));
    }
    if gaps.windows(2).any(|w| w[1] >= w[0]) {
        fail(format!(
            "model network gap does not shrink with n_s: {gaps:?}"
        ));
    }

    // simulation, up to CI overlap
    for p_k in [0.0, 0.8] {
        let tps = sim_estimate(&fig4a.rows, Metric::Throughput, |k| k.p_k == p_k);
        if tps.windows(2).any(|w| !ge_within_ci(w[0].1, w[1].1)) {
            fail(format!("simulated throughput rises with N_sen (p_k={p_k})"));
        }
        let prrs = sim_estimate(&fig5a.rows, Metric::Prr, |k| k.p_k == p_k);
        if prrs.windows(2).any(|w| !ge_within_ci(w[0].1, w[1].1)) {
            fail(format!("simulated PRR rises with distance (p_k={p_k})"));
        }
    }
    for n_sen in [100.0, 200.0, 300.0, 400.0] {
        let prrs = sim_estimate(&fig4a.rows, Metric::Prr, |k| k.n_sen == Some(n_sen));
        if prrs.windows(2).any(|w| !ge_within_ci(w[1].1, w[0].1)) {
            fail(format!("simulated PRR falls with p_k (N_sen={n_sen})"));
        }
    }
    if ceiling
        .windows(2)
        .any(|w| !ge_within_ci((w[1].1, w[1].2), (w[0].1, w[0].2)))
    {
        fail("simulated fully connected throughput falls with n_s".into());
    }

    let spec = ExperimentSpec {
        trials: 10,
        ..figure_spec("5c").unwrap()
    };
    let fig5c = run_experiment(&spec, &RunSettings::default()).unwrap();
    let net = |p_k: f64| sim_estimate(&fig5c.rows, Metric::Throughput, |k| k.p_k == p_k);
    let (net0, net8) = (net(0.0), net(0.8));
    for series in [&net0, &net8] {
        if series.windows(2).any(|w| !ge_within_ci(w[1].1, w[0].1)) {
            fail("simulated network throughput falls with n_s".into());
        }
    }
    let sim_gaps: Vec<(f64, f64)> = net0
        .iter()
        .zip(&net8)
        .map(|(a, b)| (b.1 .0 - a.1 .0, a.1 .1 + b.1 .1))
        .collect();
    if sim_gaps.windows(2).any(|w| !ge_within_ci(w[0], w[1])) {
        fail(format!(
            "simulated network gap grows with n_s: {sim_gaps:?}"
        ));
    }

    let detail = if failures.is_empty() {
        format!(
            "model and simulated shapes hold; model network gaps {:.4}/{:.4}/{:.4}, simulated {:.4}/{:.4}/{:.4}",
            gaps[0], gaps[1], gaps[2], sim_gaps[0].0, sim_gaps[1].0, sim_gaps[2].0
        )
    } else {
        failures.join("; ")
    };
    check(failures.is_empty(), detail)
}

fn main() -> ExitCode {
    let _ = env_logger::builder().is_test(true).try_init();
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut timed = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let mut o = f();
        o.detail = format!("{} [{:.1} s]", o.detail, start.elapsed().as_secs_f64());
        println!(
            "{} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((name, o));
    };

    timed("binomial identity", &mut binomial_identity);
    timed("fixed point", &mut fixed_point);
    timed("PRR and throughput gap", &mut prr_gap);

    let mut ceiling = Vec::new();
    timed("throughput ceiling", &mut || {
        let (o, means) = throughput_ceiling();
        ceiling = means;
        o
    });

    let fig4a_spec = figure_spec("4a").unwrap();
    let mut fig4a = None;
    let mut fig5a = None;
    timed("model vs simulation", &mut || {
        let a = run_experiment(&fig4a_spec, &RunSettings::default()).unwrap();
        let b = run_experiment(&figure_spec("5a").unwrap(), &RunSettings::default()).unwrap();
        let (fw, fnum, fat) = agreement(&a);
        let (pw, pnum, pat) = agreement(&b);
        let ok = fnum == 8 && pnum == 32 && fw <= FCN_AGREEMENT && pw <= PCN_AGREEMENT;
        fig4a = Some(a);
        fig5a = Some(b);
        check(
            ok,
            format!(
                "fully connected: {fnum} points, max diff {fw:.4} at {fat} (tol {FCN_AGREEMENT}); \
                 road: {pnum} bins, max diff {pw:.4} at {pat} (tol {PCN_AGREEMENT})"
            ),
        )
    });
    let (fig4a, fig5a) = (fig4a.unwrap(), fig5a.unwrap());

    timed("half-duplex floor", &mut hd_floor);
    timed("shape properties", &mut || {
        shape_properties(&fig4a, &fig5a, &ceiling)
    });

    timed("determinism", &mut || {
        let sequential = RunSettings {
            execution: Execution::Sequential,
            ..Default::default()
        };
        let first = rows_to_string(&fig4a.rows).unwrap();
        let second =
            rows_to_string(&run_experiment(&fig4a_spec, &sequential).unwrap().rows).unwrap();
        check(
            first == second,
            format!(
                "reproduce 4a twice (parallel, sequential): {} bytes, identical = {}",
                first.len(),
                first == second
            ),
        )
    });

    let failed = results.iter().filter(|r| !r.1.passed).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
