//! Heat-flow interpolation between trial functions and Gaussian optimizers.
//!
//! Each `u_j = f_j^{p_j}` evolves by `∂_t u = κ_j ∂_y^2 u` with
//! `κ_j = |R a_j|^2`; `η(t) = ∫ Π_j f_j(t, a_j·x) dx` is then
//! nondecreasing when `R = (AS(AS)^t)^{-1/2}` at an Euler-Lagrange point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::configuration::Configuration;
use crate::gaussian::GaussianSolution;
use crate::linalg::decomp::symmetric_eigen;
use crate::linalg::elim::inverse;
use crate::linalg::{inverse_sqrt_spd, LinalgError, TolerancePolicy};
use crate::polytope::ExponentVector;
use crate::RealMatrix;

/// Values of `f` below this are treated as zero when forming `ln f`.
pub const LOG_FLOOR: f64 = 1e-300;
/// Dissipation samples are taken only where `F(x)` exceeds this.
pub const DENSITY_FLOOR: f64 = 1e-30;
/// Gaussian tails are cut at this many standard deviations.
const TAIL_SIGMAS: f64 = 14.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeatflowError {
    #[error("heat-flow quadrature supports M <= 3, got M = {0}")]
    UnsupportedDimension(usize),
    #[error("norm of function {index} drifted by {drift:e} at t = {time}")]
    GridTooCoarse { index: usize, time: f64, drift: f64 },
    #[error("expected {expected} initial functions, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("profile is invalid: {0}")]
    InvalidProfile(&'static str),
    #[error("time grid must be nonnegative and increasing")]
    InvalidTimes,
    #[error("exponent p_{0} is infinite")]
    InfiniteExponent(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A bounded, nonnegative, compactly supported piecewise-constant function.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    edges: Vec<f64>,
    values: Vec<f64>,
}

impl Profile {
    pub fn new(edges: Vec<f64>, values: Vec<f64>) -> Result<Self, HeatflowError> {
        if edges.len() != values.len() + 1 || values.is_empty() {
            return Err(HeatflowError::InvalidProfile("need one more edge than values"));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) || edges.iter().any(|e| !e.is_finite()) {
            return Err(HeatflowError::InvalidProfile("edges must be finite and increasing"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(HeatflowError::InvalidProfile("values must be finite and nonnegative"));
        }
        Ok(Self { edges, values })
    }

    /// The indicator of `[a, b]`.
    pub fn indicator(a: f64, b: f64) -> Result<Self, HeatflowError> {
        Self::new(vec![a, b], vec![1.0])
    }

    /// Midpoint samples of `f` on `cells` equal cells of `[lo, hi]`.
    pub fn sampled(lo: f64, hi: f64, cells: usize, f: impl Fn(f64) -> f64) -> Result<Self, HeatflowError> {
        let h = (hi - lo) / cells as f64;
        let edges = (0..=cells).map(|k| lo + k as f64 * h).collect();
        let values = (0..cells).map(|k| f(lo + (k as f64 + 0.5) * h)).collect();
        Self::new(edges, values)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.edges[0], *self.edges.last().unwrap())
    }

    pub fn eval(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if y < lo || y >= hi {
            return 0.0;
        }
        let k = self.edges.partition_point(|&e| e <= y) - 1;
        self.values[k]
    }

    /// `∫ f^p`.
    pub fn power_integral(&self, p: f64) -> f64 {
        self.values.iter().zip(self.edges.windows(2)).map(|(v, w)| v.powf(p) * (w[1] - w[0])).sum()
    }
}

/// Tolerance and resolution settings for the flow.
#[derive(Debug, Clone, Copy)]
pub struct FlowGrid {
    /// Minimum number of points in each one-dimensional table.
    pub table_points: usize,
    /// Table spacing is at most `sigma / table_resolution`.
    pub table_resolution: f64,
    /// Starting points per dimension for the η quadrature.
    pub min_points: usize,
    /// Points per dimension are never refined beyond these (by `M`).
    pub max_points: [usize; 3],
    pub rel_tol: f64,
}

impl Default for FlowGrid {
    fn default() -> Self {
        Self { table_points: 4097, table_resolution: 8.0, min_points: 65, max_points: [16385, 2049, 193], rel_tol: 1e-6 }
    }
}

impl FlowGrid {
    pub fn from_policy(tol: &TolerancePolicy) -> Self {
        Self { rel_tol: tol.quadrature_rel_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct FlowProblem {
    pub configuration: Configuration,
    pub z: ExponentVector,
    /// Euler-Lagrange widths, when `R` comes from a solution.
    pub s: Option<Vec<f64>>,
    pub r_matrix: RealMatrix,
    pub diffusions: Vec<f64>,
    pub initial: Vec<Profile>,
    pub grid: FlowGrid,
    /// `D_G(p)` when known.
    pub d_gaussian: Option<f64>,
}

/// `Q_ij = δ_ij p_j |R a_j|^2 − (R a_i)·(R a_j)`.
pub fn q_matrix(c: &Configuration, z: &ExponentVector, r: &RealMatrix) -> Result<RealMatrix, HeatflowError> {
    let ra = r.matmul(c.matrix())?;
    let n = c.len();
    let p = z.p_values();
    let mut q = ra.transpose().matmul(&ra)?.map(|v| -v);
    for j in 0..n {
        if !p[j].is_finite() {
            return Err(HeatflowError::InfiniteExponent(j));
        }
        let norm2: f64 = ra.column(j).iter().map(|v| v * v).sum();
        q[(j, j)] += p[j] * norm2;
    }
    Ok(q)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(q: &RealMatrix) -> Result<f64, HeatflowError> {
    let (vals, _) = symmetric_eigen(q)?;
    Ok(vals.last().copied().unwrap_or(0.0))
}

impl FlowProblem {
    /// Flow with `R = (AS(AS)^t)^{-1/2}` from an Euler-Lagrange solution.
    pub fn from_solution(
        c: &Configuration,
        z: &ExponentVector,
        sol: &GaussianSolution,
        initial: Vec<Profile>,
        grid: FlowGrid,
    ) -> Result<Self, HeatflowError> {
        let a_s = c.matrix().scale_columns(&sol.s);
        let r = inverse_sqrt_spd(&a_s.matmul(&a_s.transpose())?, c.tolerances())?;
        let mut p = Self::with_r(c, z, r, initial, grid)?;
        p.s = Some(sol.s.clone());
        p.d_gaussian = Some(sol.d_value);
        Ok(p)
    }

    /// Flow with an arbitrary invertible `R`.
    pub fn with_r(
        c: &Configuration,
        z: &ExponentVector,
        r: RealMatrix,
        initial: Vec<Profile>,
        grid: FlowGrid,
    ) -> Result<Self, HeatflowError> {
        if c.dim() > 3 {
            return Err(HeatflowError::UnsupportedDimension(c.dim()));
        }
        if initial.len() != c.len() {
            return Err(HeatflowError::LengthMismatch { expected: c.len(), found: initial.len() });
        }
        if let Some(j) = z.p_values().iter().position(|p| !p.is_finite()) {
            return Err(HeatflowError::InfiniteExponent(j));
        }
        let ra = r.matmul(c.matrix())?;
        let diffusions = (0..c.len()).map(|j| ra.column(j).iter().map(|v| v * v).sum()).collect();
        Ok(Self {
            configuration: c.clone(),
            z: z.clone(),
            s: None,
            r_matrix: r,
            diffusions,
            initial,
            grid,
            d_gaussian: None,
        })
    }

    pub fn q_matrix(&self) -> Result<RealMatrix, HeatflowError> {
        q_matrix(&self.configuration, &self.z, &self.r_matrix)
    }

    /// Optimizer Gaussians `f_j(y) = exp(−s_j^2 y^2 / (4τ))`, truncated at
    /// eight standard deviations of `f_j^{p_j}`.
    pub fn optimizer_profiles(sol: &GaussianSolution, z: &ExponentVector, tau: f64, cells: usize) -> Vec<Profile> {
        sol.s
            .iter()
            .zip(z.p_values())
            .map(|(&s, p)| {
                let sigma = (2.0 * tau / (p * s * s)).sqrt();
                let half = 8.0 * sigma;
                Profile::sampled(-half, half, cells, |y| (-s * s * y * y / (4.0 * tau)).exp()).expect("valid Gaussian profile")
            })
            .collect()
    }

    /// The evolved functions at time `t`.
    pub fn evolved(&self, t: f64) -> Vec<Evolved> {
        let p = self.z.p_values();
        self.initial
            .iter()
            .zip(&self.diffusions)
            .zip(p)
            .map(|((prof, &k), p)| Evolved::new(prof, p, (2.0 * k * t).sqrt(), &self.grid))
            .collect()
    }
}

/// `f(t, ·)` for one function: exact at `t = 0`, otherwise a cubic table of `u = f^p`.
#[derive(Debug, Clone)]
pub struct Evolved {
    p: f64,
    initial: Option<Profile>,
    lo: f64,
    h: f64,
    u: Vec<f64>,
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

impl Evolved {
    fn new(prof: &Profile, p: f64, sigma: f64, grid: &FlowGrid) -> Self {
        if sigma == 0.0 {
            return Self { p, initial: Some(prof.clone()), lo: 0.0, h: 0.0, u: Vec::new() };
        }
        // u(y) = Σ_k J_k Φ((y − x_k)/σ) with jumps J_k of u at the edges.
        let jumps: Vec<f64> = (0..prof.edges.len())
            .map(|k| {
                let right = prof.values.get(k).map_or(0.0, |v| v.powf(p));
                let left = if k == 0 { 0.0 } else { prof.values[k - 1].powf(p) };
                right - left
            })
            .collect();
        let mut prefix = vec![0.0; jumps.len() + 1];
        for (k, j) in jumps.iter().enumerate() {
            prefix[k + 1] = prefix[k] + j;
        }
        let (a, b) = prof.support();
        let lo = a - TAIL_SIGMAS * sigma;
        let hi = b + TAIL_SIGMAS * sigma;
        let needed = ((hi - lo) * grid.table_resolution / sigma).ceil() as usize + 1;
        let points = grid.table_points.max(needed);
        let h = (hi - lo) / (points - 1) as f64;
        let reach = 40.0 * sigma;
        let u = (0..points)
            .map(|i| {
                let y = lo + i as f64 * h;
                let first = prof.edges.partition_point(|&e| e < y - reach);
                let last = prof.edges.partition_point(|&e| e <= y + reach);
                let mut sum = prefix[first];
                for k in first..last {
                    sum += jumps[k] * normal_cdf((y - prof.edges[k]) / sigma);
                }
                sum.max(0.0)
            })
            .collect();
        Self { p, initial: None, lo, h, u }
    }

    pub fn support(&self) -> (f64, f64) {
        match &self.initial {
            Some(p) => p.support(),
            None => (self.lo, self.lo + self.h * (self.u.len() - 1) as f64),
        }
    }

    /// Catmull-Rom value and derivative of `u` at `y`.
    fn u_and_derivative(&self, y: f64) -> (f64, f64) {
        let s = (y - self.lo) / self.h;
        let n = self.u.len();
        if !(s >= 0.0) || s > (n - 1) as f64 {
            return (0.0, 0.0);
        }
        let i = (s.floor() as usize).min(n - 2);
        let x = s - i as f64;
        let at = |k: isize| -> f64 {
            if k < 0 || k as usize >= n {
                0.0
            } else {
                self.u[k as usize]
            }
        };
        let i = i as isize;
        let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
        let c1 = 0.5 * (p2 - p0);
        let c2 = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
        let c3 = 0.5 * (p3 - p0) + 1.5 * (p1 - p2);
        let v = ((c3 * x + c2) * x + c1) * x + p1;
        let d = ((3.0 * c3 * x + 2.0 * c2) * x + c1) / self.h;
        (v.max(0.0), d)
    }

    pub fn value(&self, y: f64) -> f64 {
        match &self.initial {
            Some(p) => p.eval(y),
            None => self.u_and_derivative(y).0.powf(1.0 / self.p),
        }
    }

    /// `h' = (ln f)' = u' / (p u)`, or `None` where `f` is below the floor.
    pub fn log_derivative(&self, y: f64) -> Option<f64> {
        if self.initial.is_some() {
            return (self.value(y) > LOG_FLOOR).then_some(0.0);
        }
        let (u, du) = self.u_and_derivative(y);
        (u.powf(1.0 / self.p) > LOG_FLOOR).then(|| du / (self.p * u))
    }

    /// `‖f‖_p` from the table (Simpson) or the exact cells at `t = 0`.
    pub fn norm(&self) -> f64 {
        let integral = match &self.initial {
            Some(p) => p.power_integral(self.p),
            None => {
                let n = self.u.len();
                let mut s = self.u[0] + self.u[n - 1];
                for (i, v) in self.u.iter().enumerate().take(n - 1).skip(1) {
                    s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
                }
                let mut total = s * self.h / 3.0;
                if n % 2 == 0 {
                    // Even point count: trapezoid on the last interval.
                    total = total - (self.u[n - 1]) * self.h / 3.0 + (self.u[n - 2] + self.u[n - 1]) * self.h / 2.0;
                }
                total
            }
        };
        integral.powf(1.0 / self.p)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub eta_values: Vec<f64>,
    /// Richardson error estimate of each η value.
    pub eta_errors: Vec<f64>,
    /// `norms[k][j] = ‖f_j(times[k])‖_{p_j}`.
    pub norms: Vec<Vec<f64>>,
    pub initial_norms: Vec<f64>,
    /// `η(t_max) / Π ‖f_j‖_{p_j}`.
    pub limit_estimate: f64,
    pub d_gaussian: Option<f64>,
}

impl FlowTrace {
    pub fn norm_product(&self) -> f64 {
        self.initial_norms.iter().product()
    }

    pub fn ratios(&self) -> Vec<f64> {
        let np = self.norm_product();
        self.eta_values.iter().map(|e| e / np).collect()
    }
}

/// `(lo, hi)` box for `x` outside of which some factor vanishes.
fn quadrature_box(c: &Configuration, ev: &[Evolved]) -> Result<Vec<(f64, f64)>, HeatflowError> {
    let a = c.matrix();
    // x = (AA^t)^{-1} A (A^t x) bounds each coordinate by the supports.
    let b = inverse(&a.matmul(&a.transpose())?)?.matmul(a)?;
    Ok((0..c.dim())
        .map(|i| {
            let (mut lo, mut hi) = (0.0, 0.0);
            for (j, e) in ev.iter().enumerate() {
                let (l, h) = e.support();
                let w = b[(i, j)];
                let (x0, x1) = if w >= 0.0 { (w * l, w * h) } else { (w * h, w * l) };
                lo += x0;
                hi += x1;
            }
            (lo, hi)
        })
        .collect())
}

fn trapezoid_weights(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let h = (hi - lo) / (n - 1) as f64;
    let xs = (0..n).map(|i| lo + i as f64 * h).collect();
    let ws = (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }).collect();
    (xs, ws)
}

/// Tensor trapezoid rule for `∫ Π_j f_j(a_j·x) dx` with `n` points per dimension.
fn tensor_trapezoid(c: &Configuration, ev: &[Evolved], bx: &[(f64, f64)], n: usize) -> f64 {
    let a = c.matrix();
    let m = c.dim();
    let nodes: Vec<(Vec<f64>, Vec<f64>)> = bx.iter().map(|&(lo, hi)| trapezoid_weights(n, lo, hi)).collect();
    let nf = c.len();
    let mut total = 0.0;
    let mut idx = vec![0usize; m];
    let mut y = vec![0.0; nf];
    loop {
        let mut w = 1.0;
        for d in 0..m {
            w *= nodes[d].1[idx[d]];
        }
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = (0..m).map(|d| a[(d, j)] * nodes[d].0[idx[d]]).sum();
        }
        let mut f = w;
        for (j, e) in ev.iter().enumerate() {
            if f == 0.0 {
                break;
            }
            f *= e.value(y[j]);
        }
        total += f;
        let mut d = 0;
        loop {
            if d == m {
                return total;
            }
            idx[d] += 1;
            if idx[d] < n {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// `η(t)` with a Richardson error estimate from successive halvings of the step.
pub fn eta(p: &FlowProblem, t: f64) -> Result<(f64, f64, Vec<Evolved>), HeatflowError> {
    let ev = p.evolved(t);
    let c = &p.configuration;
    if c.dim() == 0 {
        return Ok((ev.iter().map(|_| 1.0).product(), 0.0, ev));
    }
    let bx = quadrature_box(c, &ev)?;
    let cap = p.grid.max_points[c.dim() - 1];
    let mut n = p.grid.min_points.min(cap);
    let mut coarse = tensor_trapezoid(c, &ev, &bx, n);
    loop {
        let m = 2 * n - 1;
        let fine = tensor_trapezoid(c, &ev, &bx, m);
        let err = (fine - coarse).abs();
        if err <= p.grid.rel_tol * fine.abs() || 2 * m - 1 > cap {
            return Ok((fine, err, ev));
        }
        coarse = fine;
        n = m;
    }
}

/// Evolves the problem over `times`, evaluating the slices in parallel.
pub fn evolve(p: &FlowProblem, times: &[f64]) -> Result<FlowTrace, HeatflowError> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(HeatflowError::InvalidTimes);
    }
    let pv = p.z.p_values();
    let initial_norms: Vec<f64> =
        p.initial.iter().zip(&pv).map(|(f, &pj)| f.power_integral(pj).powf(1.0 / pj)).collect();
    let slices: Vec<Result<(f64, f64, Vec<f64>), HeatflowError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = times
            .iter()
            .map(|&t| {
                scope.spawn(move || {
                    let (e, err, ev) = eta(p, t)?;
                    Ok((e, err, ev.iter().map(Evolved::norm).collect()))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("η worker panicked")).collect()
    });
    let mut trace = FlowTrace {
        times: times.to_vec(),
        eta_values: Vec::new(),
        eta_errors: Vec::new(),
        norms: Vec::new(),
        initial_norms,
        limit_estimate: f64::NAN,
        d_gaussian: p.d_gaussian,
    };
    for (k, slice) in slices.into_iter().enumerate() {
        let (e, err, norms) = slice?;
        for (j, (nj, n0)) in norms.iter().zip(&trace.initial_norms).enumerate() {
            let drift = (nj - n0).abs() / n0.max(f64::MIN_POSITIVE);
            if drift > p.grid.rel_tol {
                return Err(HeatflowError::GridTooCoarse { index: j, time: times[k], drift });
            }
        }
        trace.eta_values.push(e);
        trace.eta_errors.push(err);
        trace.norms.push(norms);
    }
    if let Some(last) = trace.eta_values.last() {
        trace.limit_estimate = last / trace.norm_product();
    }
    Ok(trace)
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotoneReport {
    pub monotone: bool,
    /// Smallest `η(t_{k+1}) − η(t_k)`.
    pub min_difference: f64,
    /// Indices `k` where the step from `k` to `k + 1` decreased beyond tolerance.
    pub violations: Vec<usize>,
    /// `D_G Π‖f_j‖ − η(t_max)`, when `D_G` is known.
    pub limit_gap: Option<f64>,
}

pub fn certify_monotone(trace: &FlowTrace) -> MonotoneReport {
    let mut min_difference = f64::INFINITY;
    let mut violations = Vec::new();
    for k in 0..trace.eta_values.len().saturating_sub(1) {
        let diff = trace.eta_values[k + 1] - trace.eta_values[k];
        let allowance = 3.0 * trace.eta_errors[k].max(trace.eta_errors[k + 1]);
        min_difference = min_difference.min(diff);
        if diff < -allowance {
            violations.push(k);
        }
    }
    let limit_gap = match (trace.d_gaussian, trace.eta_values.last()) {
        (Some(d), Some(e)) => Some(d * trace.norm_product() - e),
        _ => None,
    };
    MonotoneReport { monotone: violations.is_empty(), min_difference, violations, limit_gap }
}

#[derive(Debug, Clone, Serialize)]
pub struct DissipationReport {
    pub samples: usize,
    /// Smallest `Σ h'_i Q_ij h'_j` over the samples.
    pub min_form: f64,
    /// Smallest `Σ h'_i Q_ij h'_j F(x)`.
    pub min_integrand: f64,
}

/// Samples the integrand of `dη/dt` at uniform points of the quadrature box.
pub fn dissipation(p: &FlowProblem, t: f64, samples: usize, seed: u64) -> Result<DissipationReport, HeatflowError> {
    let q = p.q_matrix()?;
    let ev = p.evolved(t);
    let c = &p.configuration;
    let bx = quadrature_box(c, &ev)?;
    let a = c.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut min_form, mut min_integrand, mut taken) = (f64::INFINITY, f64::INFINITY, 0);
    let mut attempts = 0;
    while taken < samples && attempts < 100 * samples.max(1) {
        attempts += 1;
        let x: Vec<f64> = bx.iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect();
        let ys: Vec<f64> = (0..c.len()).map(|j| (0..c.dim()).map(|d| a[(d, j)] * x[d]).sum()).collect();
        let big_f: f64 = ys.iter().zip(&ev).map(|(&y, e)| e.value(y)).product();
        if big_f <= DENSITY_FLOOR {
            continue;
        }
        let Some(hp) = ys.iter().zip(&ev).map(|(&y, e)| e.log_derivative(y)).collect::<Option<Vec<f64>>>() else {
            continue;
        };
        let form: f64 = (0..c.len()).map(|i| (0..c.len()).map(|j| hp[i] * q[(i, j)] * hp[j]).sum::<f64>()).sum();
        min_form = min_form.min(form);
        min_integrand = min_integrand.min(form * big_f);
        taken += 1;
    }
    Ok(DissipationReport { samples: taken, min_form, min_integrand })
}

/// Geometric time grid `0, t_min, .., t_max` with `per_decade` points per decade.
pub fn geometric_times(t_min: f64, t_max: f64, per_decade: usize) -> Vec<f64> {
    let decades = (t_max / t_min).log10();
    let steps = (decades * per_decade as f64).ceil().max(1.0) as usize;
    let mut out = vec![0.0];
    out.extend((0..=steps).map(|k| t_min * (t_max / t_min).powf(k as f64 / steps as f64)));
    out
}
