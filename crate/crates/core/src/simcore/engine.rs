use log::trace;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grid::{Cell, ResourceGrid, SensingRecord};
use super::scenario::Population;
use crate::analytic::SpsConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOptions {
    /// A vehicle senses nothing in the slot it transmits in. Turning this off
    /// leaves only its own transmission unobserved.
    pub sensing_deafness: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            sensing_deafness: true,
        }
    }
}

impl SimOptions {
    /// Sensing without the half-duplex extension.
    pub fn strict_paper_mode() -> Self {
        Self {
            sensing_deafness: false,
        }
    }
}

/// Reservation activity during one period.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodStats {
    /// Counters that expired.
    pub expirations: u64,
    /// Expirations that led to a new selection (the rest kept their RBG).
    pub reselections: u64,
    /// Reselections that found no idle cell and fell back to the whole window.
    pub starvations: u64,
}

impl std::ops::AddAssign for PeriodStats {
    fn add_assign(&mut self, rhs: Self) {
        self.expirations += rhs.expirations;
        self.reselections += rhs.reselections;
        self.starvations += rhs.starvations;
    }
}

/// Every vehicle transmits once, in its reserved cell.
pub fn transmit(pop: &Population, grid: &mut ResourceGrid) {
    grid.rebuild(pop);
}

/// End-of-period bookkeeping after the transmissions in `grid`.
///
/// Counters tick down; expired ones keep their RBG with probability `p_k` or
/// reselect uniformly among the cells they sensed idle in `grid`. Vehicles
/// are visited in id order so the RNG stream is reproducible.
pub fn advance<R: Rng + ?Sized>(
    pop: &mut Population,
    grid: &ResourceGrid,
    cfg: &SpsConfig,
    opts: &SimOptions,
    rng: &mut R,
) -> PeriodStats {
    let mut stats = PeriodStats::default();
    let n_s = cfg.n_s();
    for v in 0..pop.len() as u32 {
        let state = &mut pop.vehicles[v as usize];
        debug_assert!(state.rc >= 1);
        state.rc -= 1;
        if state.rc > 0 {
            continue;
        }
        stats.expirations += 1;
        state.rc = cfg.rc_init();
        if rng.gen_bool(cfg.p_k()) {
            continue;
        }
        stats.reselections += 1;
        let record = SensingRecord::observe(grid, pop, v, opts.sensing_deafness);
        let cell = match record.pick_idle(rng) {
            Some(c) => c,
            None => {
                stats.starvations += 1;
                trace!("vehicle {v} starved, selecting over the full window");
                rng.gen_range(0..cfg.n_r())
            }
        };
        pop.vehicles[v as usize].reserved = Cell::from_index(cell, n_s);
    }
    stats
}

/// One selection period: transmit, then update reservations. Returns the
/// stats of the update; `grid` is left holding this period's transmissions.
pub fn run_period<R: Rng + ?Sized>(
    pop: &mut Population,
    grid: &mut ResourceGrid,
    cfg: &SpsConfig,
    opts: &SimOptions,
    rng: &mut R,
) -> PeriodStats {
    transmit(pop, grid);
    advance(pop, grid, cfg, opts, rng)
}
