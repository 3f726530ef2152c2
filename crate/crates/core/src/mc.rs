//! Seeded Monte Carlo plumbing shared by the numerical oracles and the
//! configuration-space integrals.
//!
//! Samples are split into a fixed number of chunks, each with its own ChaCha
//! stream derived from the seed. Chunks are merged in index order, so a run is
//! reproducible bit for bit whatever the worker count. `deterministic` mode
//! instead draws every sample from one sequential stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CHUNKS: u64 = 64;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Worker count; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub deterministic: bool,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig { samples, seed, threads: None, deterministic: false }
    }

    pub fn deterministic(mut self) -> Self {
        self.deterministic = true;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }
}

/// Running mean and variance (Welford), mergeable across chunks.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &Accumulator) -> Accumulator {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * self.n as f64 * other.n as f64 / n as f64;
        Accumulator { n, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl IntegralEstimate {
    pub fn from_accumulator(acc: &Accumulator, seed: u64) -> Self {
        IntegralEstimate { value: acc.mean(), std_error: acc.std_error(), samples: acc.count(), seed }
    }

    /// Deviation from `target` in units of the standard error.
    pub fn sigmas_from(&self, target: f64) -> f64 {
        (self.value - target).abs() / self.std_error
    }

    pub fn scaled(&self, c: f64) -> Self {
        IntegralEstimate { value: self.value * c, std_error: self.std_error * c.abs(), ..*self }
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk + 1);
    rng
}

/// Runs `n` draws of `sample` and accumulates them, honouring `config`'s
/// chunking, threading and determinism settings. `sample` may push any number
/// of values per draw (usually one).
pub fn run<F>(config: &McConfig, sample: F) -> Result<Accumulator>
where
    F: Fn(&mut ChaCha8Rng, &mut Accumulator) + Sync,
{
    run_vec(config, 1, |rng, accs| sample(rng, &mut accs[0])).map(|mut v| v.remove(0))
}

/// Like [`run`] but with `width` parallel accumulators per draw, for
/// estimating several correlated integrals from the same samples.
pub fn run_vec<F>(config: &McConfig, width: usize, sample: F) -> Result<Vec<Accumulator>>
where
    F: Fn(&mut ChaCha8Rng, &mut [Accumulator]) + Sync,
{
    if config.samples == 0 {
        return Err(Error::ZeroSamples);
    }
    if config.deterministic {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut accs = vec![Accumulator::default(); width];
        for _ in 0..config.samples {
            sample(&mut rng, &mut accs);
        }
        return Ok(accs);
    }
    let chunks = CHUNKS.min(config.samples);
    let per = config.samples / chunks;
    let extra = config.samples % chunks;
    let work = |k: u64| {
        let mut rng = chunk_rng(config.seed, k);
        let mut accs = vec![Accumulator::default(); width];
        let n = per + u64::from(k < extra);
        for _ in 0..n {
            sample(&mut rng, &mut accs);
        }
        accs
    };
    let parts: Vec<Vec<Accumulator>> = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::SizeGuard(format!("thread pool: {e}")))?
            .install(|| (0..chunks).into_par_iter().map(work).collect()),
        None => (0..chunks).into_par_iter().map(work).collect(),
    };
    let mut out = vec![Accumulator::default(); width];
    for part in &parts {
        for (o, p) in out.iter_mut().zip(part) {
            *o = o.merge(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn merge_matches_sequential() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut all = Accumulator::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Accumulator::default(), Accumulator::default());
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        let m = a.merge(&b);
        assert!((m.mean() - all.mean()).abs() < 1e-14);
        assert!((m.variance() - all.variance()).abs() < 1e-13);
    }

    #[test]
    fn result_is_independent_of_thread_count() {
        let f = |rng: &mut ChaCha8Rng, acc: &mut Accumulator| acc.push(rng.random::<f64>());
        let a = run(&McConfig::new(10_000, 5).with_threads(1), f).unwrap();
        let b = run(&McConfig::new(10_000, 5).with_threads(4), f).unwrap();
        assert_eq!(a.mean(), b.mean());
        assert_eq!(a.count(), 10_000);
        let c = run(&McConfig::new(10_000, 5).deterministic(), f).unwrap();
        let d = run(&McConfig::new(10_000, 5).deterministic(), f).unwrap();
        assert_eq!(c.mean(), d.mean());
        assert!((c.mean() - 0.5).abs() < 0.02);
    }

    #[test]
    fn zero_samples_rejected() {
        let f = |_: &mut ChaCha8Rng, _: &mut Accumulator| {};
        assert!(matches!(run(&McConfig::new(0, 1), f), Err(Error::ZeroSamples)));
    }
}
