use rand::Rng;
use serde::{Deserialize, Serialize};

use super::scenario::Population;

/// One RBG: a subchannel in a slot of the selection period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub slot: u32,
    pub subchannel: u32,
}

impl Cell {
    #[inline]
    pub fn from_index(index: u32, n_s: u32) -> Self {
        Cell {
            slot: index / n_s,
            subchannel: index % n_s,
        }
    }

    #[inline]
    pub fn index(&self, n_s: u32) -> u32 {
        self.slot * n_s + self.subchannel
    }
}

/// Occupancy of one selection period, stored as a bucket per cell.
///
/// Cells of a slot are adjacent, so the transmitters of a whole slot are one
/// contiguous run of `members`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    n_s: u32,
    n_cells: u32,
    cell_of: Vec<u32>,
    /// `members[start[c]..start[c + 1]]` transmit in cell `c`, in id order.
    start: Vec<u32>,
    members: Vec<u32>,
}

impl ResourceGrid {
    pub fn new(n_s: u32, n_cells: u32) -> Self {
        Self {
            n_s,
            n_cells,
            cell_of: Vec::new(),
            start: vec![0; n_cells as usize + 1],
            members: Vec::new(),
        }
    }

    /// Records every vehicle transmitting once, in its reserved cell.
    pub fn rebuild(&mut self, pop: &Population) {
        let n_s = self.n_s;
        self.cell_of.clear();
        self.cell_of
            .extend(pop.vehicles.iter().map(|v| v.reserved.index(n_s)));

        self.start.iter_mut().for_each(|s| *s = 0);
        for &c in &self.cell_of {
            debug_assert!(c < self.n_cells);
            self.start[c as usize + 1] += 1;
        }
        for i in 1..self.start.len() {
            self.start[i] += self.start[i - 1];
        }

        self.members.clear();
        self.members.resize(self.cell_of.len(), 0);
        let mut fill = self.start.clone();
        for (v, &c) in self.cell_of.iter().enumerate() {
            let slot = &mut fill[c as usize];
            self.members[*slot as usize] = v as u32;
            *slot += 1;
        }
    }

    pub fn n_s(&self) -> u32 {
        self.n_s
    }

    pub fn n_cells(&self) -> u32 {
        self.n_cells
    }

    /// Total transmissions recorded this period.
    pub fn transmissions(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn cell_index_of(&self, v: u32) -> u32 {
        self.cell_of[v as usize]
    }

    pub fn cell_of(&self, v: u32) -> Cell {
        Cell::from_index(self.cell_index_of(v), self.n_s)
    }

    #[inline]
    pub fn occupants(&self, cell: u32) -> &[u32] {
        &self.members[self.start[cell as usize] as usize..self.start[cell as usize + 1] as usize]
    }

    #[inline]
    pub fn slot_occupants(&self, slot: u32) -> &[u32] {
        let first = (slot * self.n_s) as usize;
        let last = first + self.n_s as usize;
        &self.members[self.start[first] as usize..self.start[last] as usize]
    }
}

/// What a vehicle learned about the cells of one selection period.
///
/// A cell is idle only if it was observed and nobody was heard in it; cells
/// the vehicle could not observe are never candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensingRecord {
    busy: Vec<u64>,
    unobserved: Vec<u64>,
    n_cells: u32,
}

impl SensingRecord {
    pub fn empty(n_cells: u32) -> Self {
        let words = (n_cells as usize).div_ceil(64);
        Self {
            busy: vec![0; words],
            unobserved: vec![0; words],
            n_cells,
        }
    }

    /// What `v` heard in `grid`: transmissions by in-range vehicles other than
    /// itself. With `deaf_in_own_slot` the whole slot `v` transmitted in goes
    /// unobserved.
    pub fn observe(grid: &ResourceGrid, pop: &Population, v: u32, deaf_in_own_slot: bool) -> Self {
        let mut record = Self::empty(grid.n_cells());
        let n_s = grid.n_s();
        let own_slot = grid.cell_index_of(v) / n_s;
        if deaf_in_own_slot {
            (own_slot * n_s..(own_slot + 1) * n_s).for_each(|c| record.mark_unobserved(c));
        }
        let (lo, hi) = pop.neighborhood(v);
        for u in lo..=hi {
            if u == v {
                continue;
            }
            let c = grid.cell_index_of(u);
            if deaf_in_own_slot && c / n_s == own_slot {
                continue;
            }
            record.mark(c);
        }
        record
    }

    #[inline]
    pub fn mark(&mut self, cell: u32) {
        self.busy[(cell / 64) as usize] |= 1 << (cell % 64);
    }

    #[inline]
    pub fn mark_unobserved(&mut self, cell: u32) {
        self.unobserved[(cell / 64) as usize] |= 1 << (cell % 64);
    }

    #[inline]
    pub fn is_busy(&self, cell: u32) -> bool {
        self.busy[(cell / 64) as usize] & (1 << (cell % 64)) != 0
    }

    #[inline]
    pub fn is_idle(&self, cell: u32) -> bool {
        (self.busy[(cell / 64) as usize] | self.unobserved[(cell / 64) as usize])
            & (1 << (cell % 64))
            == 0
    }

    fn blocked_words(&self) -> impl Iterator<Item = u64> + '_ {
        self.busy.iter().zip(&self.unobserved).map(|(b, u)| b | u)
    }

    pub fn idle_count(&self) -> u32 {
        self.n_cells - self.blocked_words().map(|w| w.count_ones()).sum::<u32>()
    }

    /// Uniform draw among idle cells, `None` when there is none.
    pub fn pick_idle<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<u32> {
        let idle = self.idle_count();
        if idle == 0 {
            return None;
        }
        let mut k = rng.gen_range(0..idle);
        for (w, word) in self.blocked_words().enumerate() {
            let base = w as u32 * 64;
            let width = (self.n_cells - base).min(64);
            let mask = if width == 64 {
                u64::MAX
            } else {
                (1u64 << width) - 1
            };
            let free = !word & mask;
            let n = free.count_ones();
            if k < n {
                let mut bits = free;
                for _ in 0..k {
                    bits &= bits - 1;
                }
                return Some(base + bits.trailing_zeros());
            }
            k -= n;
        }
        unreachable!("idle count and bitset disagree")
    }
}
