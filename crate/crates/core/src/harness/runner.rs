use std::path::{Path, PathBuf};

use log::{info, warn};

use super::csvio::{write_rows, CsvRow, Metric, Source};
use super::spec::{ExperimentSpec, GridPoint, PcnOutput};
use super::HarnessError;
use crate::analytic::{prr_fcn, prr_pcn_with_base, throughput, ModelError};
use crate::metrics::{
    aggregate, bin_center, bin_count, network_stats, summarize_distance, summarize_pooled,
    GroupKey, GroupStats, ScenarioKind,
};
use crate::simcore::{Execution, SimOptions, TrialBatch, TrialResult};

/// Run-time overrides layered on top of a spec.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunSettings {
    pub execution: Execution,
    pub options: SimOptions,
    pub seed: Option<u64>,
    pub trials: Option<u32>,
    pub duration_s: Option<f64>,
}

impl RunSettings {
    /// The spec with overrides applied, re-validated.
    pub fn apply(&self, spec: &ExperimentSpec) -> Result<ExperimentSpec, HarnessError> {
        let mut spec = spec.clone();
        if let Some(seed) = self.seed {
            spec.base_seed = seed;
        }
        if let Some(trials) = self.trials {
            spec.trials = trials;
        }
        if let Some(d) = self.duration_s {
            spec.duration_s = d;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<CsvRow>,
}

impl ExperimentOutput {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.is_failure()).count()
    }

    pub fn write_to(&self, path: &Path) -> Result<(), HarnessError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)
                .map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
        }
        let file = std::fs::File::create(path)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        write_rows(std::io::BufWriter::new(file), &self.rows)
    }
}

pub fn output_path(dir: &Path, spec: &ExperimentSpec) -> PathBuf {
    dir.join(spec.output_file())
}

fn key_of(spec: &ExperimentSpec, point: &GridPoint, d_bin_m: Option<f64>) -> GroupKey {
    let pcn = point.pcn;
    GroupKey {
        scenario: spec.scenario,
        p_k: point.cfg.p_k(),
        n_s: point.cfg.n_s(),
        tau: point.cfg.tau(),
        n_sen: Some(point.n_sen()),
        rho: pcn.map(|p| p.rho()),
        r_sen_km: pcn.map(|p| p.r_sen_km()),
        d_bin_m,
    }
}

/// Distance bin centers reported for a partially connected point.
fn bin_centers(spec: &ExperimentSpec, point: &GridPoint) -> Vec<(u32, f64)> {
    let range_m = point.pcn.map(|p| p.r_sen_m()).unwrap_or(0.0);
    (0..bin_count(spec.bin_width_m, range_m))
        .map(|i| (i, bin_center(i, spec.bin_width_m)))
        .collect()
}

/// PRR and throughput from the model.
type ModelPair = Result<(f64, f64), ModelError>;

fn analytic_pair(figure: &str, key: GroupKey, value: ModelPair) -> [CsvRow; 2] {
    match value {
        Ok((prr, tp)) => [
            CsvRow::analytic(figure, key, Metric::Prr, prr),
            CsvRow::analytic(figure, key, Metric::Throughput, tp),
        ],
        Err(e) => [Metric::Prr, Metric::Throughput]
            .map(|m| CsvRow::failed(figure, key, Source::Analytic, m, e.to_string())),
    }
}

fn sim_failure(figure: &str, key: GroupKey, msg: &str) -> [CsvRow; 2] {
    [Metric::Prr, Metric::Throughput]
        .map(|m| CsvRow::failed(figure, key, Source::Sim, m, msg.to_string()))
}

fn sim_pair(figure: &str, key: GroupKey, per_trial: &[Option<GroupStats>]) -> [CsvRow; 2] {
    match aggregate(key, per_trial) {
        Some(agg) => CsvRow::from_aggregate(figure, &agg),
        None => sim_failure(figure, key, "no packets counted"),
    }
}

/// Model rows for one grid point.
fn analytic_rows(spec: &ExperimentSpec, point: &GridPoint) -> Vec<CsvRow> {
    let figure = spec.figure_label();
    let cfg = &point.cfg;
    let n_sen = point.n_sen();
    let Some(pcn) = point.pcn else {
        let value = prr_fcn(cfg, n_sen).and_then(|p| Ok((p, throughput(cfg, p)?)));
        return analytic_pair(figure, key_of(spec, point, None), value).to_vec();
    };
    let base = prr_fcn(cfg, n_sen);
    let curve: Vec<(f64, ModelPair)> = bin_centers(spec, point)
        .into_iter()
        .map(|(_, d)| {
            let v = base.clone().and_then(|b| {
                let p = prr_pcn_with_base(cfg, &pcn, d, b)?;
                Ok((p, throughput(cfg, p)?))
            });
            (d, v)
        })
        .collect();
    match spec.pcn_output {
        PcnOutput::Distance => curve
            .into_iter()
            .flat_map(|(d, v)| analytic_pair(figure, key_of(spec, point, Some(d)), v))
            .collect(),
        PcnOutput::Network => {
            let values: Result<Vec<(f64, f64)>, ModelError> =
                curve.into_iter().map(|(_, v)| v).collect();
            let mean = values.map(|vs| {
                let n = vs.len() as f64;
                (
                    vs.iter().map(|v| v.0).sum::<f64>() / n,
                    vs.iter().map(|v| v.1).sum::<f64>() / n,
                )
            });
            analytic_pair(figure, key_of(spec, point, None), mean).to_vec()
        }
    }
}

fn warn_flagged(spec: &ExperimentSpec, point: &GridPoint, flagged: usize) {
    if flagged > 0 {
        warn!(
            "{}: p_k={} n_s={} N_sen={}: {flagged}/{} trials starved for idle resources",
            spec.name,
            point.cfg.p_k(),
            point.cfg.n_s(),
            point.n_sen(),
            spec.trials
        );
    }
}

/// Simulated rows for one grid point.
fn sim_rows(spec: &ExperimentSpec, point: &GridPoint, settings: &RunSettings) -> Vec<CsvRow> {
    let figure = spec.figure_label();
    let batch = TrialBatch {
        scenario: point.scenario,
        cfg: point.cfg,
        options: settings.options,
        base_seed: spec.base_seed,
        trials: spec.trials,
        duration_s: spec.duration_s,
        warmup_s: spec.effective_warmup_s(),
    };
    let bin_width = spec.bin_width_m;
    let pooled = spec.scenario == ScenarioKind::FullyConnected;
    let summaries = batch.run_map(settings.execution, |t: TrialResult| {
        let bins = if pooled {
            Ok(Vec::new())
        } else {
            summarize_distance(&t, bin_width)
        };
        let total = if pooled { summarize_pooled(&t) } else { None };
        (t.flagged, total, bins)
    });
    let summaries = match summaries {
        Ok(s) => s,
        Err(e) => {
            let d = spec.pcn_output == PcnOutput::Distance && !pooled;
            let keys: Vec<GroupKey> = if d {
                bin_centers(spec, point)
                    .into_iter()
                    .map(|(_, c)| key_of(spec, point, Some(c)))
                    .collect()
            } else {
                vec![key_of(spec, point, None)]
            };
            return keys
                .into_iter()
                .flat_map(|k| sim_failure(figure, k, &e.to_string()))
                .collect();
        }
    };
    warn_flagged(spec, point, summaries.iter().filter(|s| s.0).count());

    if pooled {
        let per_trial: Vec<Option<GroupStats>> = summaries.into_iter().map(|s| s.1).collect();
        return sim_pair(figure, key_of(spec, point, None), &per_trial).to_vec();
    }
    let mut binned = Vec::with_capacity(summaries.len());
    for (_, _, bins) in summaries {
        match bins {
            Ok(b) => binned.push(b),
            Err(e) => {
                return sim_failure(figure, key_of(spec, point, None), &e.to_string()).to_vec()
            }
        }
    }
    match spec.pcn_output {
        PcnOutput::Distance => bin_centers(spec, point)
            .into_iter()
            .flat_map(|(index, center)| {
                let per_trial: Vec<Option<GroupStats>> = binned
                    .iter()
                    .map(|bins| bins.iter().find(|(b, _)| b.index == index).map(|(_, s)| *s))
                    .collect();
                sim_pair(figure, key_of(spec, point, Some(center)), &per_trial)
            })
            .collect(),
        PcnOutput::Network => {
            let per_trial: Vec<Option<GroupStats>> =
                binned.iter().map(|bins| network_stats(bins)).collect();
            sim_pair(figure, key_of(spec, point, None), &per_trial).to_vec()
        }
    }
}

/// Model rows for every grid point of `spec`.
pub fn run_analytic(spec: &ExperimentSpec) -> Result<ExperimentOutput, HarnessError> {
    spec.validate()?;
    let rows = spec
        .grid_points()
        .into_iter()
        .filter_map(Result::ok)
        .flat_map(|p| analytic_rows(spec, &p))
        .collect();
    Ok(ExperimentOutput { rows })
}

/// Model and simulated rows for every grid point of `spec`, with the
/// overrides in `settings` applied first.
pub fn run_experiment(
    spec: &ExperimentSpec,
    settings: &RunSettings,
) -> Result<ExperimentOutput, HarnessError> {
    let spec = settings.apply(spec)?;
    let mut rows = Vec::new();
    for point in spec.grid_points().into_iter().filter_map(Result::ok) {
        info!(
            "{}: p_k={} n_s={} N_sen={} ({} trials x {} s)",
            spec.name,
            point.cfg.p_k(),
            point.cfg.n_s(),
            point.n_sen(),
            spec.trials,
            spec.duration_s
        );
        rows.extend(analytic_rows(&spec, &point));
        rows.extend(sim_rows(&spec, &point, settings));
    }
    Ok(ExperimentOutput { rows })
}
