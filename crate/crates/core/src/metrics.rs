//! Reduction of simulated trials into the plotted quantities.
//!
//! Within a trial, pairs are pooled into one value per group. Across trials,
//! the per-trial values are averaged and a normal-approximation 95% interval
//! is reported; trials are the independent replication unit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::simcore::{PairCounts, Scenario, TrialResult};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;
pub const DEFAULT_BIN_WIDTH_M: f64 = 25.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("counted duration must be positive, got {0} s")]
    ZeroDuration(f64),
    #[error("bin width must be positive, got {0} m")]
    BadBinWidth(f64),
    #[error("distance curve is empty")]
    EmptyCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    FullyConnected,
    PartiallyConnected,
}

impl ScenarioKind {
    pub fn of(scn: &Scenario) -> Self {
        match scn {
            Scenario::FullyConnected { .. } => ScenarioKind::FullyConnected,
            Scenario::PartiallyConnected { .. } => ScenarioKind::PartiallyConnected,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::FullyConnected => "fully_connected",
            ScenarioKind::PartiallyConnected => "partially_connected",
        }
    }
}

/// Identifies what an aggregate describes. Fields that do not apply are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupKey {
    pub scenario: ScenarioKind,
    pub p_k: f64,
    pub n_s: u32,
    pub tau: f64,
    pub n_sen: Option<f64>,
    pub rho: Option<f64>,
    pub r_sen_km: Option<f64>,
    pub d_bin_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub ci95: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub key: GroupKey,
    pub prr: Estimate,
    pub throughput: Estimate,
    pub n_trials: u32,
    /// Pairs pooled per trial, summed over trials.
    pub n_pairs: u64,
    /// Only one trial contributed, so the interval is reported as 0.
    pub single_trial: bool,
}

/// One trial's pooled value for one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    /// Received over packets sent to a listening receiver; `None` if nothing was.
    pub prr: Option<f64>,
    /// Mean per-pair throughput, packets/sec.
    pub throughput: f64,
    pub n_pairs: u64,
}

/// Measured throughput of one pair: receptions per counted second.
pub fn pair_throughput(received: u64, counted_duration_s: f64) -> Result<f64, MetricsError> {
    if !(counted_duration_s > 0.0) {
        return Err(MetricsError::ZeroDuration(counted_duration_s));
    }
    Ok(received as f64 / counted_duration_s)
}

/// Pools a set of pairs from one trial. `None` when the set is empty or no
/// time was counted.
pub fn pool_pairs<'a, I>(pairs: I, counted_duration_s: f64) -> Option<GroupStats>
where
    I: IntoIterator<Item = &'a PairCounts>,
{
    let (mut received, mut contended, mut n) = (0u64, 0u64, 0u64);
    for p in pairs {
        received += u64::from(p.received);
        contended += u64::from(p.contended());
        n += 1;
    }
    if n == 0 {
        return None;
    }
    let throughput = pair_throughput(received, counted_duration_s).ok()? / n as f64;
    Some(GroupStats {
        prr: (contended > 0).then(|| received as f64 / contended as f64),
        throughput,
        n_pairs: n,
    })
}

/// A distance bin `[index * width, (index + 1) * width)`, the last one closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceBin {
    pub index: u32,
    pub center_m: f64,
}

/// Groups pairs by distance, keeping only transmitters clear of road-end
/// effects. Distances are capped at `max_distance_m`, so a pair exactly at
/// the sensing range lands in the last bin.
pub fn bin_by_distance<I>(
    pairs: I,
    scenario: &Scenario,
    bin_width_m: f64,
    max_distance_m: f64,
) -> Result<BTreeMap<u32, Vec<PairCounts>>, MetricsError>
where
    I: IntoIterator<Item = PairCounts>,
{
    if !(bin_width_m > 0.0) {
        return Err(MetricsError::BadBinWidth(bin_width_m));
    }
    let last = bin_count(bin_width_m, max_distance_m).saturating_sub(1);
    let mut bins: BTreeMap<u32, Vec<PairCounts>> = BTreeMap::new();
    for p in pairs {
        if !scenario.is_measured_tx(p.tx_position_m) {
            continue;
        }
        let index = ((p.distance_m / bin_width_m).floor() as u32).min(last);
        bins.entry(index).or_default().push(p);
    }
    Ok(bins)
}

pub fn bin_count(bin_width_m: f64, max_distance_m: f64) -> u32 {
    ((max_distance_m / bin_width_m) - 1e-9).ceil().max(1.0) as u32
}

pub fn bin_center(index: u32, bin_width_m: f64) -> f64 {
    (f64::from(index) + 0.5) * bin_width_m
}

/// Fully connected summary of one trial: every pair pooled.
pub fn summarize_pooled(trial: &TrialResult) -> Option<GroupStats> {
    let pairs: Vec<PairCounts> = trial
        .pairs()
        .filter(|p| trial.scenario.is_measured_tx(p.tx_position_m))
        .collect();
    pool_pairs(&pairs, trial.counted_duration_s())
}

/// Distance-binned summary of one trial.
pub fn summarize_distance(
    trial: &TrialResult,
    bin_width_m: f64,
) -> Result<Vec<(DistanceBin, GroupStats)>, MetricsError> {
    let max = trial.scenario.sensing_range_m().unwrap_or(0.0);
    let bins = bin_by_distance(trial.pairs(), &trial.scenario, bin_width_m, max)?;
    Ok(bins
        .iter()
        .filter_map(|(&index, pairs)| {
            pool_pairs(pairs, trial.counted_duration_s()).map(|s| {
                (
                    DistanceBin {
                        index,
                        center_m: bin_center(index, bin_width_m),
                    },
                    s,
                )
            })
        })
        .collect())
}

/// Network-level value of one trial: unweighted mean over its distance bins.
pub fn network_stats(bins: &[(DistanceBin, GroupStats)]) -> Option<GroupStats> {
    if bins.is_empty() {
        return None;
    }
    let prrs: Vec<f64> = bins.iter().filter_map(|(_, s)| s.prr).collect();
    let tps: Vec<f64> = bins.iter().map(|(_, s)| s.throughput).collect();
    Some(GroupStats {
        prr: (prrs.len() == bins.len()).then(|| order_free_mean(&prrs)),
        throughput: order_free_mean(&tps),
        n_pairs: bins.iter().map(|(_, s)| s.n_pairs).sum(),
    })
}

/// Mean and 95% half-width of per-trial values. A single value gets a zero
/// half-width.
pub fn estimate(values: &[f64]) -> Option<Estimate> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = order_free_mean(values);
    if n == 1 {
        return Some(Estimate { mean, ci95: 0.0 });
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let sd = (order_free_sum(&sq) / (n - 1) as f64).sqrt();
    Some(Estimate {
        mean,
        ci95: Z_95 * sd / (n as f64).sqrt(),
    })
}

/// Aggregates one group across trials. Trials without a value for the group
/// are skipped; `None` if no trial had one.
pub fn aggregate(key: GroupKey, per_trial: &[Option<GroupStats>]) -> Option<AggregateResult> {
    let present: Vec<&GroupStats> = per_trial.iter().flatten().collect();
    let prrs: Vec<f64> = present.iter().filter_map(|s| s.prr).collect();
    let tps: Vec<f64> = present.iter().map(|s| s.throughput).collect();
    let throughput = estimate(&tps)?;
    let prr = estimate(&prrs)?;
    Some(AggregateResult {
        key,
        prr,
        throughput,
        n_trials: present.len() as u32,
        n_pairs: present.iter().map(|s| s.n_pairs).sum(),
        single_trial: present.len() == 1,
    })
}

/// Aggregates many groups, dropping the empty ones.
pub fn aggregate_groups<I>(groups: I) -> Vec<AggregateResult>
where
    I: IntoIterator<Item = (GroupKey, Vec<Option<GroupStats>>)>,
{
    groups
        .into_iter()
        .filter_map(|(key, trials)| aggregate(key, &trials))
        .collect()
}

/// Network throughput: unweighted mean of a distance curve's throughput means.
pub fn network_throughput(curve: &[AggregateResult]) -> Result<f64, MetricsError> {
    if curve.is_empty() {
        return Err(MetricsError::EmptyCurve);
    }
    let tps: Vec<f64> = curve.iter().map(|a| a.throughput.mean).collect();
    Ok(order_free_mean(&tps))
}

/// Sums in sorted order so the result does not depend on input order.
fn order_free_sum(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().sum()
}

fn order_free_mean(values: &[f64]) -> f64 {
    order_free_sum(values) / values.len() as f64
}
