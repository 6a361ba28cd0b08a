//! Densities on the sphere, their marginals `f_j = P_j F`, and the entropy
//! inequality `Σ_j S(f_j) ≤ 2 S(F)`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::marginal::MarginalMeasure;
use super::sampler::{summarize, uniform_point, Estimate, SphereSampler};
use super::SphereError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DensityKind {
    Uniform,
    /// `F = χ_cap / μ(cap)` for the cap of geodesic radius `epsilon` around `e_1`.
    Cap { epsilon: f64, mass: f64 },
    /// `F = 1 + slope · v_1`.
    Affine { slope: f64 },
}

/// A probability density on `S^{n−1}` with respect to `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityOnSphere {
    pub n: usize,
    pub kind: DensityKind,
}

impl DensityOnSphere {
    pub fn uniform(n: usize) -> Result<Self, SphereError> {
        MarginalMeasure::new(n)?;
        Ok(Self { n, kind: DensityKind::Uniform })
    }

    pub fn affine(n: usize, slope: f64) -> Result<Self, SphereError> {
        MarginalMeasure::new(n)?;
        if !(slope.abs() <= 1.0) {
            return Err(SphereError::ParameterOutOfRegime(format!("|slope| = {} exceeds 1", slope.abs())));
        }
        Ok(Self { n, kind: DensityKind::Affine { slope } })
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self.kind {
            DensityKind::Uniform => 1.0,
            DensityKind::Cap { epsilon, mass } => {
                if x[0] >= epsilon.cos() {
                    1.0 / mass
                } else {
                    0.0
                }
            }
            DensityKind::Affine { slope } => 1.0 + slope * x[0],
        }
    }

    /// `S(F) = ∫ F ln F dμ` when known in closed form.
    pub fn entropy_exact(&self) -> Option<f64> {
        match self.kind {
            DensityKind::Uniform => Some(0.0),
            DensityKind::Cap { mass, .. } => Some(-mass.ln()),
            DensityKind::Affine { .. } => None,
        }
    }

    /// A point distributed as `F dμ`.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.n;
        match self.kind {
            DensityKind::Uniform => uniform_point(rng, n),
            DensityKind::Affine { slope } => loop {
                let x = uniform_point(rng, n);
                if rng.gen::<f64>() * (1.0 + slope.abs()) <= 1.0 + slope * x[0] {
                    return x;
                }
            },
            DensityKind::Cap { epsilon, .. } => {
                // The polar angle has density ∝ sin^{n−2} ϑ on [0, ε]: propose
                // ϑ ∝ ϑ^{n−2} and accept with probability (sin ϑ / ϑ)^{n−2}.
                let k = n as i32 - 2;
                let theta = loop {
                    let t = epsilon * rng.gen::<f64>().powf(1.0 / (n as f64 - 1.0));
                    let ratio = if t == 0.0 { 1.0 } else { t.sin() / t };
                    if rng.gen::<f64>() <= ratio.powi(k) {
                        break t;
                    }
                };
                let w = uniform_point(rng, n - 1);
                let mut x = Vec::with_capacity(n);
                x.push(theta.cos());
                x.extend(w.iter().map(|v| theta.sin() * v));
                x
            }
        }
    }

    /// Monte-Carlo mean of `F` under `μ`, which should be 1.
    pub fn normalization_certificate(&self, sampler: &SphereSampler, samples: usize) -> Estimate {
        sampler.sphere_mean(samples, |x| self.evaluate(x))
    }
}

/// Density of the cap of geodesic radius `epsilon` around `e_1`.
pub fn cap_density(n: usize, epsilon: f64) -> Result<DensityOnSphere, SphereError> {
    let m = MarginalMeasure::new(n)?;
    if !(epsilon > 0.0 && epsilon < std::f64::consts::PI) {
        return Err(SphereError::ParameterOutOfRegime(format!("cap radius {epsilon} outside (0, π)")));
    }
    Ok(DensityOnSphere { n, kind: DensityKind::Cap { epsilon, mass: m.mass_angles(0.0, epsilon) } })
}

/// One check of `∫ φ(v_j) F dμ = ∫ φ f_j dν_N`.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub test_function: &'static str,
    pub sample_side: Estimate,
    pub profile_side: f64,
    /// Largest change the binning alone can cause.
    pub binning_bound: f64,
    pub holds: bool,
}

/// Histogram estimate of the marginal `f_j`.
#[derive(Debug, Clone, Serialize)]
pub struct MarginalProfile {
    pub j: usize,
    pub edges: Vec<f64>,
    pub values: Vec<f64>,
    pub counts: Vec<usize>,
    pub masses: Vec<f64>,
    pub samples: usize,
    pub identity_checks: Vec<IdentityCheck>,
}

impl MarginalProfile {
    /// `S(f_j) = ∫ f_j ln f_j dν_N` of the histogram, with the plug-in bias
    /// `(bins − 1) / 2n` removed, and its standard error.
    pub fn entropy(&self) -> (f64, f64) {
        let n = self.samples as f64;
        let mut s = 0.0;
        let mut s2 = 0.0;
        let mut used = 0usize;
        for (&c, &f) in self.counts.iter().zip(&self.values) {
            if c == 0 {
                continue;
            }
            used += 1;
            let q = c as f64 / n;
            let l = f.ln();
            s += q * l;
            s2 += q * l * l;
        }
        let bias = (used.saturating_sub(1)) as f64 / (2.0 * n);
        let delta_var = ((s2 - s * s) / n).max(0.0);
        let chi_var = 2.0 * (used.saturating_sub(1)) as f64 / (4.0 * n * n);
        (s - bias, (delta_var + chi_var).sqrt())
    }
}

fn bin_of(edges: &[f64], v: f64) -> usize {
    let bins = edges.len() - 1;
    edges.partition_point(|&e| e <= v).clamp(1, bins) - 1
}

/// Builds the histogram of coordinate `j` from draws of `F dμ`.
fn profile_from_points(
    m: &MarginalMeasure,
    points: &[Vec<f64>],
    j: usize,
    bins: usize,
) -> Result<MarginalProfile, SphereError> {
    let vals: Vec<f64> = points.iter().map(|x| x[j]).collect();
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let edges = m.quantile_edges(lo, hi, bins);
    let masses: Vec<f64> = edges.windows(2).map(|w| m.mass(w[0], w[1])).collect();
    let mut counts = vec![0usize; bins];
    for &v in &vals {
        counts[bin_of(&edges, v)] += 1;
    }
    if let Some(b) = counts.iter().position(|&c| c == 0) {
        return Err(SphereError::EmptyBin { coordinate: j, bin: b });
    }
    let total = vals.len() as f64;
    let values: Vec<f64> = counts.iter().zip(&masses).map(|(&c, &ms)| c as f64 / total / ms).collect();

    let tests: [(&'static str, fn(f64) -> f64); 3] = [("1", |_| 1.0), ("v", |v| v), ("v^2", |v| v * v)];
    let identity_checks = tests
        .iter()
        .map(|&(name, phi)| {
            let (s, s2) = vals.iter().fold((0.0, 0.0), |(a, b), &v| (a + phi(v), b + phi(v) * phi(v)));
            let sample_side = summarize(s, s2, vals.len());
            let mut profile_side = 0.0;
            let mut binning_bound = 0.0;
            for (k, w) in edges.windows(2).enumerate() {
                profile_side += values[k] * m.integrate_between(w[0], w[1], phi);
                let (a, b) = (phi(w[0]), phi(w[1]));
                let (mut lo, mut hi) = (a.min(b), a.max(b));
                if w[0] < 0.0 && w[1] > 0.0 {
                    lo = lo.min(phi(0.0));
                    hi = hi.max(phi(0.0));
                }
                binning_bound += counts[k] as f64 / total * (hi - lo);
            }
            let holds = (sample_side.mean - profile_side).abs() <= 3.0 * sample_side.stderr + binning_bound + 1e-12;
            IdentityCheck { test_function: name, sample_side, profile_side, binning_bound, holds }
        })
        .collect();
    Ok(MarginalProfile { j, edges, values, counts, masses, samples: vals.len(), identity_checks })
}

/// The conditional expectation of `F` given `v_j`, as a histogram over
/// equal-`ν_N` bins spanning the sampled range of `v_j`.
pub fn conditional_expectation(
    density: &DensityOnSphere,
    j: usize,
    bins: usize,
    sampler: &SphereSampler,
    samples: usize,
) -> Result<MarginalProfile, SphereError> {
    let n = density.n;
    if j >= n || sampler.n != n {
        return Err(SphereError::LengthMismatch { expected: n, found: j.max(sampler.n) });
    }
    let m = MarginalMeasure::new(n)?;
    let points = sampler.collect(samples, |rng| density.sample(rng));
    profile_from_points(&m, &points, j, bins)
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Report {
    pub n: usize,
    pub kind: DensityKind,
    /// Monte-Carlo `S(F)`.
    pub entropy: Estimate,
    pub entropy_exact: Option<f64>,
    pub marginal_entropies: Vec<f64>,
    pub marginal_stderr: Vec<f64>,
    pub sum: f64,
    pub combined_stderr: f64,
    /// `Σ S(f_j) / S(F)`; NaN when `S(F) = 0`.
    pub ratio: f64,
    /// `Σ S(f_j) ≤ 2 S(F) + 3 σ`.
    pub holds: bool,
}

pub fn check_theorem2(
    density: &DensityOnSphere,
    sampler: &SphereSampler,
    bins: usize,
    samples: usize,
) -> Result<Theorem2Report, SphereError> {
    let n = density.n;
    if sampler.n != n {
        return Err(SphereError::LengthMismatch { expected: n, found: sampler.n });
    }
    let m = MarginalMeasure::new(n)?;
    let points = sampler.collect(samples, |rng| density.sample(rng));
    // S(F) = ∫ F ln F dμ = E_{F dμ}[ln F].
    let (s, s2) = points.iter().fold((0.0, 0.0), |(a, b), x| {
        let l = density.evaluate(x).ln();
        (a + l, b + l * l)
    });
    let entropy = summarize(s, s2, points.len());
    let mut marginal_entropies = Vec::with_capacity(n);
    let mut marginal_stderr = Vec::with_capacity(n);
    for j in 0..n {
        let prof = profile_from_points(&m, &points, j, bins)?;
        let (e, se) = prof.entropy();
        marginal_entropies.push(e);
        marginal_stderr.push(se);
    }
    let sum: f64 = marginal_entropies.iter().sum();
    let combined_stderr =
        (marginal_stderr.iter().map(|s| s * s).sum::<f64>() + 4.0 * entropy.stderr * entropy.stderr).sqrt();
    if entropy.stderr > 0.05 * entropy.mean.abs() + 1e-3 {
        return Err(SphereError::EntropyUnstable { stderr: entropy.stderr });
    }
    let ratio = if entropy.mean.abs() > 0.0 { sum / entropy.mean } else { f64::NAN };
    Ok(Theorem2Report {
        n,
        kind: density.kind,
        entropy,
        entropy_exact: density.entropy_exact(),
        marginal_entropies,
        marginal_stderr,
        sum,
        combined_stderr,
        ratio,
        holds: sum <= 2.0 * entropy.mean + 3.0 * combined_stderr,
    })
}

/// Runs [`check_theorem2`] on cap densities of decreasing radius.
pub fn cap_schedule(
    n: usize,
    radii: &[f64],
    sampler: &SphereSampler,
    bins: usize,
    samples: usize,
) -> Result<Vec<Theorem2Report>, SphereError> {
    radii.iter().map(|&eps| check_theorem2(&cap_density(n, eps)?, sampler, bins, samples)).collect()
}
