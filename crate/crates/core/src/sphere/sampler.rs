//! Seeded uniform sampling on `S^{N−1}` with independent per-batch streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::SphereError;

/// Monte-Carlo estimate of a mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { mean: value, stderr: 0.0, samples: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSampler {
    /// Ambient dimension; points lie on `S^{n−1}`.
    pub n: usize,
    pub seed: u64,
    pub batch: usize,
}

/// A uniform point on `S^{n−1}`: a normalized standard normal vector.
pub fn uniform_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 1e-150 {
            return x.into_iter().map(|v| v / r).collect();
        }
    }
}

impl SphereSampler {
    pub fn new(n: usize, seed: u64) -> Result<Self, SphereError> {
        if n < 2 {
            return Err(SphereError::DimensionTooSmall(n));
        }
        Ok(Self { n, seed, batch: 16_384 })
    }

    pub fn with_batch(mut self, batch: usize) -> Self {
        self.batch = batch.max(1);
        self
    }

    /// The generator for batch `k`: one seed, stream `k`.
    pub fn stream(&self, k: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k);
        rng
    }

    /// Runs `step` once per sample, batch by batch, accumulating into one
    /// state per batch; the batch states are merged in batch order, so the
    /// result does not depend on the number of threads.
    pub fn map_reduce<A, I, S, M>(&self, samples: usize, init: I, step: S, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync,
        S: Fn(&mut ChaCha8Rng, &mut A) + Sync,
        M: Fn(A, A) -> A,
    {
        let batches = samples.div_ceil(self.batch);
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(batches.max(1));
        let run = |k: usize| {
            let mut rng = self.stream(k as u64);
            let mut acc = init();
            let count = self.batch.min(samples - k * self.batch);
            for _ in 0..count {
                step(&mut rng, &mut acc);
            }
            acc
        };
        let mut results: Vec<(usize, A)> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    let run = &run;
                    scope.spawn(move || (w..batches).step_by(threads).map(|k| (k, run(k))).collect::<Vec<_>>())
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("sampling worker panicked")).collect()
        });
        results.sort_by_key(|(k, _)| *k);
        results.into_iter().map(|(_, a)| a).fold(init(), merge)
    }

    /// Mean of `f` over `samples` draws with its standard error.
    pub fn estimate(&self, samples: usize, f: impl Fn(&mut ChaCha8Rng) -> f64 + Sync) -> Estimate {
        let (s, s2, n) = self.map_reduce(
            samples,
            || (0.0, 0.0, 0usize),
            |rng, acc| {
                let v = f(rng);
                acc.0 += v;
                acc.1 += v * v;
                acc.2 += 1;
            },
            |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
        );
        summarize(s, s2, n)
    }

    /// Mean of `f` at uniform points of the sphere.
    pub fn sphere_mean(&self, samples: usize, f: impl Fn(&[f64]) -> f64 + Sync) -> Estimate {
        let n = self.n;
        self.estimate(samples, |rng| f(&uniform_point(rng, n)))
    }

    /// All draws of `f`, in deterministic order.
    pub fn collect<T: Send>(&self, samples: usize, f: impl Fn(&mut ChaCha8Rng) -> T + Sync) -> Vec<T> {
        self.map_reduce(
            samples,
            Vec::new,
            |rng, acc| acc.push(f(rng)),
            |mut a, b| {
                a.extend(b);
                a
            },
        )
    }
}

pub(crate) fn summarize(sum: f64, sum_sq: f64, n: usize) -> Estimate {
    if n == 0 {
        return Estimate { mean: f64::NAN, stderr: f64::INFINITY, samples: 0 };
    }
    let mean = sum / n as f64;
    let var = if n > 1 { ((sum_sq - n as f64 * mean * mean) / (n - 1) as f64).max(0.0) } else { f64::INFINITY };
    Estimate { mean, stderr: (var / n as f64).sqrt(), samples: n }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_unit_vectors() {
        let s = SphereSampler::new(5, 7).unwrap();
        for x in s.collect(1000, |rng| uniform_point(rng, 5)) {
            let r: f64 = x.iter().map(|v| v * v).sum();
            assert!((r - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn moments_within_three_sigma() {
        let n = 4;
        let s = SphereSampler::new(n, 11).unwrap().with_batch(5000);
        let m1 = s.sphere_mean(100_000, |x| x[0]);
        assert!(m1.mean.abs() < 3.0 * m1.stderr);
        let m2 = s.sphere_mean(100_000, |x| x[1] * x[1]);
        assert!((m2.mean - 0.25).abs() < 3.0 * m2.stderr);
        let m12 = s.sphere_mean(100_000, |x| x[0] * x[2]);
        assert!(m12.mean.abs() < 3.0 * m12.stderr);
    }

    #[test]
    fn batches_are_deterministic() {
        let s = SphereSampler::new(3, 99).unwrap().with_batch(777);
        let a = s.sphere_mean(10_000, |x| x[0] + x[1] * x[2]);
        let b = s.sphere_mean(10_000, |x| x[0] + x[1] * x[2]);
        assert_eq!(a, b);
        let other = SphereSampler::new(3, 100).unwrap().with_batch(777).sphere_mean(10_000, |x| x[0] + x[1] * x[2]);
        assert_ne!(a.mean, other.mean);
    }
}
