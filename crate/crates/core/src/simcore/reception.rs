use serde::{Deserialize, Serialize};

use super::grid::ResourceGrid;
use super::scenario::Population;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Received,
    /// Receiver was transmitting in the same slot.
    HalfDuplex,
    /// Another vehicle in range of the receiver used the same cell.
    Collision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reception {
    pub tx: u32,
    pub rx: u32,
    pub outcome: Outcome,
}

/// Outcome for every ordered pair within sensing range, evaluated directly
/// from positions and the period's cell assignment.
///
/// Quadratic in the population; the trial loop uses [`ReceptionTally`].
pub fn detect_receptions(grid: &ResourceGrid, pop: &Population) -> Vec<Reception> {
    let range = pop.sensing_range_m().unwrap_or(f64::INFINITY);
    let within = |a: u32, b: u32| pop.distance_m(a, b) <= range + 1e-6;
    let n = pop.len() as u32;
    let mut out = Vec::new();
    for tx in 0..n {
        let cell = grid.cell_of(tx);
        for rx in 0..n {
            if rx == tx || !within(tx, rx) {
                continue;
            }
            let outcome = if grid.cell_of(rx).slot == cell.slot {
                Outcome::HalfDuplex
            } else if (0..n).any(|o| o != tx && grid.cell_of(o) == cell && within(rx, o)) {
                Outcome::Collision
            } else {
                Outcome::Received
            };
            out.push(Reception { tx, rx, outcome });
        }
    }
    out
}

/// Accumulated losses per in-range (tx, rx) pair over many periods.
///
/// Only failures are counted; a period costs time proportional to the
/// half-duplex and collision events rather than to the number of pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceptionTally {
    /// Per tx: first neighbor index and offset of its block in the loss arrays.
    rx_lo: Vec<u32>,
    offset: Vec<usize>,
    hd_lost: Vec<u32>,
    collision_lost: Vec<u32>,
    periods: u32,
}

impl ReceptionTally {
    pub fn new(pop: &Population) -> Self {
        let mut rx_lo = Vec::with_capacity(pop.len());
        let mut offset = Vec::with_capacity(pop.len() + 1);
        let mut total = 0usize;
        for v in 0..pop.len() as u32 {
            let (lo, hi) = pop.neighborhood(v);
            rx_lo.push(lo);
            offset.push(total);
            total += (hi - lo + 1) as usize;
        }
        offset.push(total);
        Self {
            rx_lo,
            offset,
            hd_lost: vec![0; total],
            collision_lost: vec![0; total],
            periods: 0,
        }
    }

    #[inline]
    fn slot_index(&self, tx: u32, rx: u32) -> usize {
        self.offset[tx as usize] + (rx - self.rx_lo[tx as usize]) as usize
    }

    /// Counts the losses of one period of transmissions.
    pub fn record(&mut self, grid: &ResourceGrid, pop: &Population) {
        self.periods += 1;
        let n_s = grid.n_s();
        for tx in 0..pop.len() as u32 {
            let cell = grid.cell_index_of(tx);
            let slot = cell / n_s;

            for &rx in grid.slot_occupants(slot) {
                if rx != tx && pop.in_range(tx, rx) {
                    let i = self.slot_index(tx, rx);
                    self.hd_lost[i] += 1;
                }
            }

            let sharers = grid.occupants(cell);
            if sharers.len() < 2 {
                continue;
            }
            // Receivers hit by co-user `o` are the overlap of two neighborhoods,
            // a contiguous id range. Co-users come in id order and the ranges
            // are monotone in id, so `next` stops overlaps being counted twice.
            let (lo, hi) = pop.neighborhood(tx);
            let mut next = lo;
            for &o in sharers {
                if o == tx {
                    continue;
                }
                let (o_lo, o_hi) = pop.neighborhood(o);
                let first = next.max(o_lo);
                let last = hi.min(o_hi);
                if first > last {
                    continue;
                }
                for rx in first..=last {
                    if rx != tx && grid.cell_index_of(rx) / n_s != slot {
                        let i = self.slot_index(tx, rx);
                        self.collision_lost[i] += 1;
                    }
                }
                next = last + 1;
            }
        }
    }

    pub fn periods(&self) -> u32 {
        self.periods
    }

    pub fn hd_lost(&self, tx: u32, rx: u32) -> u32 {
        self.hd_lost[self.slot_index(tx, rx)]
    }

    pub fn collision_lost(&self, tx: u32, rx: u32) -> u32 {
        self.collision_lost[self.slot_index(tx, rx)]
    }
}
