//! Chunked execution of Monte Carlo loops and parameter sweeps.
//!
//! Every estimator splits its sample index range into fixed-size chunks. Chunk
//! `k` draws from its own ChaCha8 stream derived from `(seed, purpose, k)`, and
//! chunk results are merged in index order. The result therefore depends only
//! on `(seed, samples, chunk_size)`, never on the thread count or on whether
//! the `parallel` feature is enabled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Default number of samples per chunk.
pub const DEFAULT_CHUNK: usize = 1 << 14;

/// How chunked work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    /// Rayon work-stealing. Falls back to sequential when the crate is built
    /// without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Sample budget, seed and scheduling for one Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
    pub chunk_size: usize,
    pub execution: Execution,
}

impl MonteCarlo {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            chunk_size: DEFAULT_CHUNK,
            execution: Execution::default(),
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_chunk_size(mut self, chunk_size: usize) -> Self {
        self.chunk_size = chunk_size.max(1);
        self
    }

    /// Same configuration with a different sample count.
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    /// Runs `body(rng, count)` once per chunk and returns the chunk results in
    /// chunk order. `purpose` separates the random streams of independent
    /// estimators that share a seed.
    pub fn run<T, F>(&self, purpose: u32, body: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut ChaCha8Rng, usize) -> T + Sync + Send,
    {
        let chunk = self.chunk_size.max(1);
        let n_chunks = self.samples.div_ceil(chunk);
        let total = self.samples;
        let seed = self.seed;
        let job = move |k: usize| {
            let count = chunk.min(total - k * chunk);
            let mut rng = chunk_rng(seed, purpose, k as u64);
            body(&mut rng, count)
        };
        map_indices(self.execution, n_chunks, job)
    }
}

/// Random stream for chunk `chunk` of estimator `purpose`.
pub fn chunk_rng(seed: u64, purpose: u32, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 40) | (chunk & ((1 << 40) - 1)));
    rng
}

/// Applies `f` to `0..n`, preserving order.
pub fn map_indices<T, F>(execution: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// Applies `f` to every item of a slice, preserving order.
pub fn map_slice<I, T, F>(execution: Execution, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    map_indices(execution, items.len(), |i| f(&items[i]))
}

/// Mergeable running mean and variance (Welford / Chan).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn merged<'a>(parts: impl IntoIterator<Item = &'a Moments>) -> Moments {
        let mut acc = Moments::default();
        for p in parts {
            acc.merge(p);
        }
        acc
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}
