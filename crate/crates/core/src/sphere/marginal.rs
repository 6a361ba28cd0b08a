//! The marginal `ν_N` of one coordinate of a uniform point on `S^{N−1}`.
//!
//! Everything is computed in the polar angle `ϑ = acos v`, where
//! `dν_N = Z_N sin^{N−2} ϑ dϑ` is smooth, so Gauss-Legendre panels are
//! accurate. Singular integrands are handled by panels graded toward
//! `v = ±1` and `v = 0` with a geometric tail correction.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use super::SphereError;

/// A point of `[−1, 1]` with `1 − v^2` carried separately for accuracy near `±1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub v: f64,
    /// `1 − v^2`.
    pub gap: f64,
}

impl Abscissa {
    pub fn from_value(v: f64) -> Self {
        Self { v, gap: ((1.0 - v) * (1.0 + v)).max(0.0) }
    }

    /// `v = cos ϑ`.
    pub fn from_angle(theta: f64) -> Self {
        let s = theta.sin();
        Self { v: theta.cos(), gap: s * s }
    }
}

const GL_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights of order `n` on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl_table() -> &'static (Vec<f64>, Vec<f64>) {
    static TABLE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    TABLE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// `∫_a^b f` by one Gauss-Legendre panel.
pub fn gl_panel(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (x, w) = gl_table();
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    x.iter().zip(w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>() * half
}

/// Nodes and weights of one Gauss-Legendre panel on `[a, b]`.
pub fn gl_points(a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gl_table();
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    x.iter().zip(w).map(|(xi, wi)| (mid + half * xi, wi * half)).collect()
}

/// `∫_a^b f` by `panels` equal Gauss-Legendre panels.
pub fn gl_composite(a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels).map(|k| gl_panel(a + k as f64 * h, a + (k + 1) as f64 * h, &mut f)).sum()
}

/// Number of geometric levels toward each singular point.
const LEVELS: usize = 56;
const RATIO: f64 = 0.3;

/// `∫_0^{π/4} g(δ) dδ` on panels graded toward `δ = 0`, with the part
/// below the last panel extrapolated from the geometric decay of the
/// panel contributions. Errors if the contributions do not decay.
fn graded_to_zero(g: impl Fn(f64) -> f64) -> Result<f64, SphereError> {
    let mut contributions = Vec::with_capacity(LEVELS + 1);
    let mut hi = FRAC_PI_4;
    for _ in 0..LEVELS {
        let lo = hi * RATIO;
        contributions.push(gl_panel(lo, hi, &g));
        hi = lo;
    }
    let total: f64 = contributions.iter().sum();
    let c = &contributions[LEVELS - 3..];
    let scale = total.abs().max(f64::MIN_POSITIVE);
    if c.iter().all(|x| x.abs() <= 1e-17 * scale) {
        return Ok(total);
    }
    let rho = c[2] / c[1];
    let rho_prev = c[1] / c[0];
    if !(rho.is_finite() && rho_prev.is_finite()) || rho >= 0.995 || rho_prev >= 0.995 {
        return Err(SphereError::NormDiverges);
    }
    if rho <= 0.0 {
        return Ok(total);
    }
    Ok(total + c[2] * rho / (1.0 - rho))
}

/// The marginal measure `ν_N` with its normalization fixed numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalMeasure {
    pub n: usize,
    /// `Z_N` in `dν_N = Z_N (1 − v^2)^{(N−3)/2} dv`.
    pub z: f64,
}

/// `1 / ∫_0^π sin^{n−2} ϑ dϑ` by composite Gauss-Legendre.
pub fn normalization_constant(n: usize) -> f64 {
    let k = n as i32 - 2;
    1.0 / gl_composite(0.0, PI, 8, |t| t.sin().powi(k))
}

/// `|S^{d}| = 2π^{(d+1)/2} / Γ((d+1)/2)`.
pub fn sphere_area(d: usize) -> f64 {
    let h = (d as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / libm::tgamma(h)
}

/// The prefactor `|S^{N−2}| / |S^{N−3}|` as printed in the source; kept
/// only to record that it does not normalize `ν_N`.
pub fn printed_normalization(n: usize) -> f64 {
    sphere_area(n - 2) / sphere_area(n - 3)
}

/// Largest `N` for which the normalization table is built.
pub const MAX_N: usize = 64;

/// `Z_N` fixed by the oracle `∫ dν_N = 1` and hard-asserted on first use.
pub fn resolved_normalization(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=MAX_N)
            .map(|n| {
                if n < 2 {
                    return f64::NAN;
                }
                let z = normalization_constant(n);
                let m = MarginalMeasure { n, z };
                let total = m.integrate(|_| 1.0).expect("constant integrand");
                assert!((total - 1.0).abs() < 1e-12, "ν_{n} has total mass {total}");
                let closed = sphere_area(n - 2) / sphere_area(n - 1);
                assert!((z - closed).abs() < 1e-12 * closed, "Z_{n} = {z} vs {closed}");
                if n >= 3 {
                    let printed = printed_normalization(n) / z;
                    assert!((printed - 1.0).abs() > 1e-3, "printed prefactor unexpectedly normalizes ν_{n}");
                }
                z
            })
            .collect()
    });
    if n < table.len() {
        table[n]
    } else {
        normalization_constant(n)
    }
}

impl MarginalMeasure {
    pub fn new(n: usize) -> Result<Self, SphereError> {
        if n < 2 {
            return Err(SphereError::DimensionTooSmall(n));
        }
        Ok(Self { n, z: resolved_normalization(n) })
    }

    /// Density in `v`.
    pub fn density(&self, v: f64) -> f64 {
        let g = (1.0 - v) * (1.0 + v);
        if g <= 0.0 {
            return if self.n == 3 { self.z } else { 0.0 };
        }
        self.z * g.powf((self.n as f64 - 3.0) / 2.0)
    }

    fn angular(&self, s: f64) -> f64 {
        self.z * s.powi(self.n as i32 - 2)
    }

    /// `ν_N` of the angles `[ϑ_a, ϑ_b] ⊂ [0, π]`.
    pub fn mass_angles(&self, a: f64, b: f64) -> f64 {
        let panels = ((b - a) / 0.2).ceil().max(1.0) as usize;
        gl_composite(a, b, panels, |t| self.angular(t.sin()))
    }

    /// `ν_N([lo, hi])`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        self.mass_angles(hi.clamp(-1.0, 1.0).acos(), lo.clamp(-1.0, 1.0).acos())
    }

    /// `∫_{[lo, hi]} g dν_N` for smooth `g`.
    pub fn integrate_between(&self, lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> f64 {
        let (a, b) = (hi.clamp(-1.0, 1.0).acos(), lo.clamp(-1.0, 1.0).acos());
        let panels = ((b - a) / 0.2).ceil().max(1.0) as usize;
        gl_composite(a, b, panels, |t| g(t.cos()) * self.angular(t.sin()))
    }

    /// Edges of `bins` cells of equal `ν_N` mass covering `[lo, hi]`.
    pub fn quantile_edges(&self, lo: f64, hi: f64, bins: usize) -> Vec<f64> {
        let total = self.mass(lo, hi);
        let mut edges = vec![lo];
        for k in 1..bins {
            let target = total * k as f64 / bins as f64;
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if self.mass(lo, mid) < target {
                    a = mid;
                } else {
                    b = mid;
                }
                if b - a <= 1e-16 * (1.0 + mid.abs()) {
                    break;
                }
            }
            edges.push(0.5 * (a + b));
        }
        edges.push(hi);
        edges
    }

    /// `∫ g dν_N` for `g` that may be integrably singular at `v ∈ {−1, 0, 1}`.
    /// Errors with `NormDiverges` when a singularity is not integrable.
    pub fn integrate(&self, g: impl Fn(Abscissa) -> f64) -> Result<f64, SphereError> {
        // Four regions in δ ∈ [0, π/4], each graded toward δ = 0:
        // ϑ = δ, ϑ = π/2 − δ, ϑ = π/2 + δ, ϑ = π − δ.
        let near_pole = |sign: f64| {
            graded_to_zero(|d: f64| {
                let s = d.sin();
                g(Abscissa { v: sign * d.cos(), gap: s * s }) * self.angular(s)
            })
        };
        let near_equator = |sign: f64| {
            graded_to_zero(|d: f64| {
                let c = d.cos();
                g(Abscissa { v: sign * d.sin(), gap: c * c }) * self.angular(c)
            })
        };
        Ok(near_pole(1.0)? + near_equator(1.0)? + near_equator(-1.0)? + near_pole(-1.0)?)
    }

    /// `(∫ |f|^p dν_N)^{1/p}`.
    pub fn lp_norm(&self, f: impl Fn(Abscissa) -> f64, p: f64) -> Result<f64, SphereError> {
        Ok(self.integrate(|a| f(a).abs().powf(p))?.powf(1.0 / p))
    }
}
