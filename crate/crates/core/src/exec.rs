//! Execution context: enumeration budget, worker pool and the fixed-order
//! reduction every parallel sum goes through.
//!
//! Partial results are produced per block of indices and combined by a
//! pairwise tree whose shape depends only on the number of blocks, so sums
//! are bit-identical for any worker count.

use std::ops::{Add, Range};
use std::sync::Arc;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

/// Number of indices per reduction block.
pub const BLOCK: u64 = 4096;

/// Default enumeration budget (tuple visits).
pub const DEFAULT_BUDGET: u64 = 1 << 31;

#[derive(Clone)]
pub struct Exec {
    budget: u64,
    workers: usize,
    pool: Arc<ThreadPool>,
}

impl std::fmt::Debug for Exec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Exec")
            .field("budget", &self.budget)
            .field("workers", &self.workers)
            .finish()
    }
}

impl Default for Exec {
    fn default() -> Self {
        Self::new(1, DEFAULT_BUDGET).expect("single-thread pool")
    }
}

impl Exec {
    pub fn new(workers: usize, budget: u64) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidArgument("workers must be at least 1".into()));
        }
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        Ok(Self {
            budget,
            workers,
            pool: Arc::new(pool),
        })
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn check_budget(&self, needed: u128) -> Result<()> {
        if needed > self.budget as u128 {
            Err(Error::BudgetExceeded {
                needed,
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }

    /// Evaluates `f` on consecutive blocks of `[0, len)` and returns the
    /// partial results in block order.
    pub fn map_blocks<T, F>(&self, len: u64, block: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<u64>) -> T + Sync + Send,
    {
        let block = block.max(1);
        let nblocks = len.div_ceil(block);
        let run = |b: u64| f(b * block..((b + 1) * block).min(len));
        if self.workers == 1 {
            (0..nblocks).map(run).collect()
        } else {
            self.pool
                .install(|| (0..nblocks).into_par_iter().map(run).collect())
        }
    }

    /// Block-partitioned sum with the fixed tree reduction.
    pub fn sum_blocks<T, F>(&self, len: u64, block: u64, f: F) -> T
    where
        T: Send + Copy + Default + Add<Output = T>,
        F: Fn(Range<u64>) -> T + Sync + Send,
    {
        tree_reduce(self.map_blocks(len, block, f))
    }
}

/// Pairwise reduction in a fixed shape: `((a0+a1)+(a2+a3))+...`.
pub fn tree_reduce<T>(mut v: Vec<T>) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    if v.is_empty() {
        return T::default();
    }
    while v.len() > 1 {
        let next: Vec<T> = v
            .chunks(2)
            .map(|c| if c.len() == 2 { c[0] + c[1] } else { c[0] })
            .collect();
        v = next;
    }
    v[0]
}
