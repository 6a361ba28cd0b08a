//! The spherical Young inequality `∫ Π_j f_j(v_j) dμ ≤ Π_j ‖f_j‖_{L^p(ν_N)}`, `p ≥ 2`,
//! and the trial function showing that `p < 2` admits no constant.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::marginal::{gl_points, Abscissa, MarginalMeasure};
use super::sampler::{uniform_point, SphereSampler};
use super::SphereError;

/// A function of one coordinate `v ∈ [−1, 1]`.
#[derive(Clone)]
pub enum SphereFunction {
    Constant(f64),
    /// Value `values[k]` on `[edges[k], edges[k+1])`, zero outside.
    Piecewise { edges: Vec<f64>, values: Vec<f64> },
    Custom(Arc<dyn Fn(Abscissa) -> f64 + Send + Sync>),
}

impl fmt::Debug for SphereFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Piecewise { edges, values } => write!(f, "Piecewise({edges:?}, {values:?})"),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl SphereFunction {
    pub fn custom(f: impl Fn(Abscissa) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    pub fn eval(&self, a: Abscissa) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Piecewise { edges, values } => {
                if a.v < edges[0] || a.v > *edges.last().unwrap() {
                    return 0.0;
                }
                let k = edges.partition_point(|&e| e <= a.v).clamp(1, values.len());
                values[k - 1]
            }
            Self::Custom(f) => f(a),
        }
    }

    /// `‖f‖_{L^p(ν_N)}`; exact for constant and piecewise-constant functions.
    pub fn lp_norm(&self, m: &MarginalMeasure, p: f64) -> Result<f64, SphereError> {
        match self {
            Self::Constant(c) => Ok(c.abs()),
            Self::Piecewise { edges, values } => {
                let s: f64 = edges.windows(2).zip(values).map(|(w, v)| v.abs().powf(p) * m.mass(w[0], w[1])).sum();
                Ok(s.powf(1.0 / p))
            }
            Self::Custom(f) => m.lp_norm(|a| f(a), p),
        }
    }
}

/// `f(v) = |v|^{−α} + (1 − v^2)^{−α(N−1)/2}`.
pub fn trial_function(n: usize, alpha: f64) -> SphereFunction {
    let e = alpha * (n as f64 - 1.0) / 2.0;
    SphereFunction::custom(move |a| a.v.abs().powf(-alpha) + a.gap.powf(-e))
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    pub n: usize,
    pub p: f64,
    pub lhs: f64,
    pub stderr: f64,
    pub rhs: f64,
    pub norms: Vec<f64>,
    pub samples: usize,
    /// Both sides were computed in closed form.
    pub analytic: bool,
    /// `lhs ≤ rhs + 3 stderr`, up to rounding.
    pub holds: bool,
    pub margin: f64,
}

pub fn check_theorem1(
    fs: &[SphereFunction],
    p: f64,
    sampler: &SphereSampler,
    samples: usize,
) -> Result<Theorem1Report, SphereError> {
    let n = sampler.n;
    if fs.len() != n {
        return Err(SphereError::LengthMismatch { expected: n, found: fs.len() });
    }
    if !(p >= 2.0) {
        return Err(SphereError::ParameterOutOfRegime(format!("p = {p} is below 2")));
    }
    let m = MarginalMeasure::new(n)?;
    let norms = fs.iter().map(|f| f.lp_norm(&m, p)).collect::<Result<Vec<_>, _>>()?;
    let rhs: f64 = norms.iter().product();
    let constants: Option<Vec<f64>> =
        fs.iter().map(|f| if let SphereFunction::Constant(c) = f { Some(*c) } else { None }).collect();
    let (lhs, stderr, used, analytic) = match constants {
        // μ is a probability measure, so the left side is the product itself.
        Some(cs) => (cs.iter().product(), 0.0, 0, true),
        None => {
            let e = sampler.estimate(samples, |rng| {
                let x = uniform_point(rng, n);
                fs.iter().zip(&x).map(|(f, &v)| f.eval(Abscissa::from_value(v))).product()
            });
            (e.mean, e.stderr, e.samples, false)
        }
    };
    Ok(Theorem1Report {
        n,
        p,
        lhs,
        stderr,
        rhs,
        norms,
        samples: used,
        analytic,
        holds: lhs <= rhs + 3.0 * stderr + 1e-12 * rhs.abs(),
        margin: rhs - lhs,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    /// `‖f‖_{L^p(ν_3)}`, finite when `pα < 1`.
    pub norm: f64,
    pub rhs: f64,
    pub caps: Vec<f64>,
    /// `∫ Π_j min(f(v_j), h) dμ` for each cap `h`.
    pub lhs: Vec<f64>,
    /// `lhs(last cap) / lhs(first cap)`.
    pub growth: f64,
    /// `α ≥ 1/2`: the untruncated left side is infinite.
    pub divergent_regime: bool,
}

/// One-dimensional rule on `[0, len]` with panels graded toward both ends.
/// Nodes are `(x, len − x, weight)`, each distance accurate near its own end.
fn graded_rule(len: f64, levels: usize, ratio: f64) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    let mut hi = len / 2.0;
    for _ in 0..levels {
        let lo = hi * ratio;
        for (d, w) in gl_points(lo, hi) {
            out.push((d, len - d, w));
            out.push((len - d, d, w));
        }
        hi = lo;
    }
    out
}

/// Truncated left side on `S^2` by graded tensor quadrature over one octant.
fn truncated_lhs(f: &SphereFunction, cap: f64) -> f64 {
    let g = |a: Abscissa| f.eval(a).min(cap);
    let u_rule = graded_rule(1.0, 40, 0.3);
    let phi_rule = graded_rule(FRAC_PI_2, 40, 0.3);
    let mut total = 0.0;
    for &(u, one_minus_u, wu) in &u_rule {
        // v_3 = u, v_1 = ρ cos φ, v_2 = ρ sin φ with ρ^2 = 1 − u^2.
        let rho2 = one_minus_u * (1.0 + u);
        let rho = rho2.sqrt();
        let f3 = g(Abscissa { v: u, gap: rho2 });
        let mut inner = 0.0;
        for &(phi, comp, wp) in &phi_rule {
            let (s, c) = (phi.sin(), comp.sin());
            let a1 = Abscissa { v: rho * c, gap: u * u + rho2 * s * s };
            let a2 = Abscissa { v: rho * s, gap: u * u + rho2 * c * c };
            inner += wp * g(a1) * g(a2);
        }
        total += wu * f3 * inner;
    }
    // Eight octants; dμ = du dφ / 4π on S^2.
    8.0 * total / (4.0 * PI)
}

pub fn divergence_trial(alpha: f64, p: f64, caps: &[f64]) -> Result<DivergenceReport, SphereError> {
    let n = 3;
    if !(alpha > 0.0 && alpha < 1.0) || !(p >= 1.0) {
        return Err(SphereError::ParameterOutOfRegime(format!("alpha = {alpha}, p = {p}")));
    }
    if p * alpha >= 1.0 {
        return Err(SphereError::NormDiverges);
    }
    if caps.is_empty() || caps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SphereError::ParameterOutOfRegime("caps must be increasing".into()));
    }
    let f = trial_function(n, alpha);
    let m = MarginalMeasure::new(n)?;
    let norm = f.lp_norm(&m, p)?;
    let lhs: Vec<f64> = caps.iter().map(|&h| truncated_lhs(&f, h)).collect();
    Ok(DivergenceReport {
        n,
        alpha,
        p,
        norm,
        rhs: norm.powi(n as i32),
        caps: caps.to_vec(),
        growth: lhs.last().unwrap() / lhs[0],
        lhs,
        divergent_regime: alpha >= 0.5,
    })
}
