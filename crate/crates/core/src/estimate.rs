//! Monte Carlo plumbing: running moments, stream fan-out and deterministic
//! merging.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::rng::{RngStream, StreamRng};

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub estimate: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub streams: u64,
}

impl EstimatorResult {
    /// `(estimate − target) / stderr`; zero when both the error and the
    /// deviation vanish.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.estimate - target;
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    }

    /// Whether `target` lies within `k` standard errors.
    pub fn covers(&self, target: f64, k: f64) -> bool {
        self.z_score(target).abs() <= k
    }
}

/// Welford running mean and centred second moment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Pooled moments of two disjoint sample sets.
    pub fn merge(&self, other: &Moments) -> Moments {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + d * w,
            m2: self.m2 + other.m2 + d * d * self.n as f64 * w,
        }
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

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Sample budget and stream layout of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub streams: u64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64, streams: u64) -> Result<Self> {
        if samples == 0 {
            return Err(domain("samples must be >= 1"));
        }
        if streams == 0 {
            return Err(domain("streams must be >= 1"));
        }
        Ok(Self { samples, seed, streams })
    }

    /// Samples assigned to each stream: an even split, with the first
    /// `samples % streams` streams taking one extra.
    pub fn per_stream(&self) -> Vec<u64> {
        let base = self.samples / self.streams;
        let extra = self.samples % self.streams;
        (0..self.streams).map(|i| base + u64::from(i < extra)).collect()
    }

    fn result(&self, m: &Moments) -> EstimatorResult {
        EstimatorResult {
            estimate: m.mean(),
            stderr: m.stderr(),
            n_samples: m.count(),
            seed: self.seed,
            streams: self.streams,
        }
    }
}

/// Estimates `k` expectations at once. `draw` fills one sample of all `k`
/// integrands; streams run in parallel and are merged in stream order, so
/// the result depends only on `cfg`.
pub fn run_streams_multi<F>(cfg: &McConfig, k: usize, draw: F) -> Result<Vec<EstimatorResult>>
where
    F: Fn(&mut StreamRng, &mut [f64]) -> Result<()> + Sync,
{
    let counts = cfg.per_stream();
    let per_stream: Vec<Vec<Moments>> = counts
        .par_iter()
        .enumerate()
        .map(|(id, &count)| {
            let mut rng = RngStream::new(cfg.seed, id as u64).rng();
            let mut acc = vec![Moments::default(); k];
            let mut buf = vec![0.0; k];
            for _ in 0..count {
                draw(&mut rng, &mut buf)?;
                for (m, &x) in acc.iter_mut().zip(&buf) {
                    m.push(x);
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![Moments::default(); k];
    for acc in &per_stream {
        for (t, m) in total.iter_mut().zip(acc) {
            *t = t.merge(m);
        }
    }
    Ok(total.iter().map(|m| cfg.result(m)).collect())
}

/// Single-integrand form of [`run_streams_multi`].
pub fn run_streams<F>(cfg: &McConfig, draw: F) -> Result<EstimatorResult>
where
    F: Fn(&mut StreamRng) -> Result<f64> + Sync,
{
    let out = run_streams_multi(cfg, 1, |rng, buf| {
        buf[0] = draw(rng)?;
        Ok(())
    })?;
    Ok(out[0])
}

/// Collects `cfg.samples` raw draws, concatenated in stream order. `draw`
/// also receives the stream id.
pub fn collect_streams<T, F>(cfg: &McConfig, draw: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut StreamRng, u64) -> Result<T> + Sync,
{
    let counts = cfg.per_stream();
    let chunks: Vec<Vec<T>> = counts
        .par_iter()
        .enumerate()
        .map(|(id, &count)| {
            let mut rng = RngStream::new(cfg.seed, id as u64).rng();
            (0..count).map(|_| draw(&mut rng, id as u64)).collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}
