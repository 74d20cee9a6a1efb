//! Independent Monte Carlo trials, optionally spread over a rayon pool.
//!
//! Trial `i` is seeded with `base_seed + i` and results come back in trial
//! order whichever way they were executed, so downstream reductions see the
//! same sequence either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::engine::SimOptions;
use super::scenario::Scenario;
use super::trial::{run_trial, TrialResult};
use super::SimError;
use crate::analytic::SpsConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Worker pool of `jobs` threads, or rayon's global pool when `None`.
    /// Runs sequentially when built without the `parallel` feature.
    #[default]
    Parallel,
    ParallelJobs(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialBatch {
    pub scenario: Scenario,
    pub cfg: SpsConfig,
    pub options: SimOptions,
    pub base_seed: u64,
    pub trials: u32,
    pub duration_s: f64,
    pub warmup_s: f64,
}

impl TrialBatch {
    pub fn seed(&self, trial: u32) -> u64 {
        self.base_seed.wrapping_add(u64::from(trial))
    }

    pub fn run_one(&self, trial: u32) -> Result<TrialResult, SimError> {
        run_trial(
            &self.scenario,
            &self.cfg,
            &self.options,
            self.seed(trial),
            self.duration_s,
            self.warmup_s,
        )
    }

    /// Runs every trial and reduces each through `summarize` as soon as it
    /// finishes, so full pair tables never pile up in memory.
    pub fn run_map<T, F>(&self, exec: Execution, summarize: F) -> Result<Vec<T>, SimError>
    where
        T: Send,
        F: Fn(TrialResult) -> T + Sync,
    {
        let one = |i: u32| self.run_one(i).map(&summarize);
        match exec {
            Execution::Sequential => (0..self.trials).map(one).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..self.trials).into_par_iter().map(one).collect(),
            #[cfg(feature = "parallel")]
            Execution::ParallelJobs(jobs) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs.max(1))
                    .build()
                    .map_err(|e| SimError::ThreadPool(e.to_string()))?;
                pool.install(|| (0..self.trials).into_par_iter().map(one).collect())
            }
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel | Execution::ParallelJobs(_) => (0..self.trials).map(one).collect(),
        }
    }

    pub fn run(&self, exec: Execution) -> Result<Vec<TrialResult>, SimError> {
        self.run_map(exec, |r| r)
    }
}
