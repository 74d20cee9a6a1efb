use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::engine::{advance, transmit, PeriodStats, SimOptions};
use super::grid::ResourceGrid;
use super::reception::ReceptionTally;
use super::scenario::{build_scenario, Scenario};
use super::SimError;
use crate::analytic::SpsConfig;

/// Trials whose reselections starve more often than this are flagged.
pub const STARVATION_FLAG_RATE: f64 = 0.5;

/// Packet accounting for one ordered pair within sensing range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCounts {
    pub tx: u32,
    pub rx: u32,
    pub tx_position_m: f64,
    pub distance_m: f64,
    pub sent: u32,
    pub received: u32,
    /// Packets lost because the receiver transmitted in the same slot.
    pub hd_lost: u32,
}

impl PairCounts {
    /// Packets that reached a listening receiver: the denominator of the MAC-level PRR.
    pub fn contended(&self) -> u32 {
        self.sent - self.hd_lost
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub scenario: Scenario,
    pub cfg: SpsConfig,
    pub options: SimOptions,
    pub seed: u64,
    pub total_periods: u32,
    pub counted_periods: u32,
    pub stats: PeriodStats,
    /// Starvation rate exceeded [`STARVATION_FLAG_RATE`].
    pub flagged: bool,
    positions_m: Vec<f64>,
    neighborhoods: Vec<(u32, u32)>,
    tally: ReceptionTally,
}

impl TrialResult {
    /// Seconds of simulated time that contributed to the counts.
    pub fn counted_duration_s(&self) -> f64 {
        f64::from(self.counted_periods) / self.cfg.tau()
    }

    pub fn vehicle_count(&self) -> usize {
        self.positions_m.len()
    }

    pub fn starvation_rate(&self) -> f64 {
        if self.stats.reselections == 0 {
            0.0
        } else {
            self.stats.starvations as f64 / self.stats.reselections as f64
        }
    }

    /// Every in-range ordered pair, tx-major, rx ascending.
    pub fn pairs(&self) -> impl Iterator<Item = PairCounts> + '_ {
        let sent = self.counted_periods;
        self.neighborhoods
            .iter()
            .enumerate()
            .flat_map(move |(tx, &(lo, hi))| {
                let tx = tx as u32;
                (lo..=hi).filter(move |&rx| rx != tx).map(move |rx| {
                    let hd_lost = self.tally.hd_lost(tx, rx);
                    let lost = hd_lost + self.tally.collision_lost(tx, rx);
                    let tx_pos = self.positions_m[tx as usize];
                    PairCounts {
                        tx,
                        rx,
                        tx_position_m: tx_pos,
                        distance_m: (tx_pos - self.positions_m[rx as usize]).abs(),
                        sent,
                        received: sent - lost,
                        hd_lost,
                    }
                })
            })
    }
}

/// Number of whole periods in `seconds` at `tau` packets/sec.
pub fn periods_in(seconds: f64, tau: f64) -> u32 {
    (seconds * tau + 1e-9).floor() as u32
}

/// Simulates `duration_s` seconds and counts receptions after the first
/// `warmup_s`. Deterministic in `seed`.
pub fn run_trial(
    scn: &Scenario,
    cfg: &SpsConfig,
    opts: &SimOptions,
    seed: u64,
    duration_s: f64,
    warmup_s: f64,
) -> Result<TrialResult, SimError> {
    if !(warmup_s >= 0.0 && duration_s >= warmup_s && duration_s.is_finite()) {
        return Err(SimError::InvalidDuration {
            duration_s,
            warmup_s,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pop = build_scenario(scn, cfg, &mut rng)?;
    let mut grid = ResourceGrid::new(cfg.n_s(), cfg.n_r());
    let mut tally = ReceptionTally::new(&pop);

    let total = periods_in(duration_s, cfg.tau());
    let warmup = periods_in(warmup_s, cfg.tau()).min(total);
    let mut stats = PeriodStats::default();
    for period in 0..total {
        transmit(&pop, &mut grid);
        if period >= warmup {
            tally.record(&grid, &pop);
        }
        stats += advance(&mut pop, &grid, cfg, opts, &mut rng);
    }

    let mut result = TrialResult {
        scenario: *scn,
        cfg: *cfg,
        options: *opts,
        seed,
        total_periods: total,
        counted_periods: tally.periods(),
        stats,
        flagged: false,
        positions_m: pop.vehicles.iter().map(|v| v.position_m).collect(),
        neighborhoods: (0..pop.len() as u32).map(|v| pop.neighborhood(v)).collect(),
        tally,
    };
    result.flagged = result.starvation_rate() > STARVATION_FLAG_RATE;
    if result.flagged {
        debug!(
            "seed {seed}: {} of {} reselections starved",
            stats.starvations, stats.reselections
        );
    }
    Ok(result)
}
