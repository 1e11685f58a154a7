//! Riesz potentials `Σ_j |y - x_j|^{-s}`, their gradients, and the normalized
//! potential of the uniform measure on the unit sphere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, Configuration, DomainSet};
use crate::quad;

/// Distances below this are treated as coincident and give `+∞`.
pub const COINCIDENCE: f64 = 1e-300;

/// Above this exponent potentials are summed in log space.
pub const LOG_SPACE_S: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `s > d`.
    Hypersingular,
    /// `d - 1 ≤ s < d`, spheres only.
    SphereSubcritical,
}

/// A Riesz exponent validated against a domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszParam {
    pub s: f64,
    pub regime: Regime,
}

impl RieszParam {
    pub fn new(domain: &DomainSet, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidArgument(format!("Riesz exponent s = {s} must be positive")));
        }
        let d = domain.dim() as f64;
        if s > d {
            return Ok(RieszParam { s, regime: Regime::Hypersingular });
        }
        if matches!(domain, DomainSet::Sphere { .. }) && s >= d - 1.0 && s < d {
            return Ok(RieszParam { s, regime: Regime::SphereSubcritical });
        }
        Err(Error::InvalidRegime(format!(
            "s = {s} on {} (d = {}): need s > d, or d-1 ≤ s < d on a sphere",
            domain.name(),
            domain.dim()
        )))
    }
}

/// Kahan–Babuška (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn check(cfg: &Configuration, y: &[f64], s: f64) -> Result<()> {
    if y.len() != cfg.dim() {
        return Err(Error::DimensionMismatch { expected: cfg.dim(), got: y.len() });
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidArgument(format!("Riesz exponent s = {s} must be positive")));
    }
    Ok(())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `ln Σ_j |y - x_j|^{-s}` over a flat coordinate array, `+∞` on coincidence.
///
/// Terms are scaled by the nearest distance, so no term overflows for any `s`.
pub(crate) fn log_potential_raw(coords: &[f64], dim: usize, y: &[f64], s: f64) -> f64 {
    let mut dmin2 = f64::INFINITY;
    for x in coords.chunks_exact(dim) {
        dmin2 = dmin2.min(sq_dist(x, y));
    }
    if dmin2.sqrt() <= COINCIDENCE {
        return f64::INFINITY;
    }
    let half = 0.5 * s;
    let mut acc = CompensatedSum::default();
    for x in coords.chunks_exact(dim) {
        acc.add((dmin2 / sq_dist(x, y)).powf(half));
    }
    -half * dmin2.ln() + acc.value().ln()
}

/// `ln f(y)` with `∇_y ln f` written to `grad`, and each point's share
/// `w_j = |y - x_j|^{-s} / f(y)` written to `weights` when given.
///
/// Returns `+∞` (leaving the outputs untouched) on coincidence.
pub(crate) fn log_potential_grad(
    coords: &[f64],
    dim: usize,
    y: &[f64],
    s: f64,
    grad: &mut [f64],
    mut weights: Option<&mut [f64]>,
) -> f64 {
    let mut dmin2 = f64::INFINITY;
    for x in coords.chunks_exact(dim) {
        dmin2 = dmin2.min(sq_dist(x, y));
    }
    if dmin2.sqrt() <= COINCIDENCE {
        return f64::INFINITY;
    }
    let half = 0.5 * s;
    let mut acc = CompensatedSum::default();
    grad.iter_mut().for_each(|g| *g = 0.0);
    for (j, x) in coords.chunks_exact(dim).enumerate() {
        let r2 = sq_dist(x, y);
        let t = (dmin2 / r2).powf(half);
        acc.add(t);
        if let Some(w) = weights.as_deref_mut() {
            w[j] = t;
        }
        for k in 0..dim {
            grad[k] -= s * t * (y[k] - x[k]) / r2;
        }
    }
    let total = acc.value();
    grad.iter_mut().for_each(|g| *g /= total);
    if let Some(w) = weights {
        w.iter_mut().for_each(|v| *v /= total);
    }
    -half * dmin2.ln() + total.ln()
}

/// `Σ_j |y - x_j|^{-s}` over a flat coordinate array, `+∞` on coincidence.
pub(crate) fn potential_raw(coords: &[f64], dim: usize, y: &[f64], s: f64) -> f64 {
    if s > LOG_SPACE_S {
        return log_potential_raw(coords, dim, y, s).exp();
    }
    let half = -0.5 * s;
    let mut acc = CompensatedSum::default();
    for x in coords.chunks_exact(dim) {
        let r2 = sq_dist(x, y);
        if r2.sqrt() <= COINCIDENCE {
            return f64::INFINITY;
        }
        acc.add(r2.powf(half));
    }
    acc.value()
}

/// `Σ_j |y - x_j|^{-s}`; `+∞` when `y` coincides with some `x_j`.
pub fn potential(cfg: &Configuration, y: &[f64], s: f64) -> Result<f64> {
    check(cfg, y, s)?;
    Ok(potential_raw(cfg.coords(), cfg.dim(), y, s))
}

/// Natural logarithm of [`potential`], finite even when the potential overflows.
pub fn log_potential(cfg: &Configuration, y: &[f64], s: f64) -> Result<f64> {
    check(cfg, y, s)?;
    Ok(log_potential_raw(cfg.coords(), cfg.dim(), y, s))
}

/// Potential with its gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGradient {
    pub value: f64,
    /// `∂/∂x_j` of the sum, flattened in point order.
    pub grad_points: Vec<f64>,
    /// `∇_y` of the sum.
    pub grad_y: Vec<f64>,
}

/// Potential and its analytic gradients with respect to every `x_j` and to `y`.
pub fn potential_gradient(cfg: &Configuration, y: &[f64], s: f64) -> Result<PotentialGradient> {
    check(cfg, y, s)?;
    let dim = cfg.dim();
    let mut grad_points = vec![0.0; cfg.coords().len()];
    let mut grad_y = vec![0.0; dim];
    let mut value = CompensatedSum::default();
    for (j, x) in cfg.points().enumerate() {
        let r2 = sq_dist(x, y);
        if r2.sqrt() <= COINCIDENCE {
            return Err(Error::InvalidArgument("gradient undefined: y coincides with a configuration point".into()));
        }
        let term = r2.powf(-0.5 * s);
        value.add(term);
        // ∇_x |y-x|^{-s} = s |y-x|^{-s-2} (y - x) = -∇_y.
        let c = s * term / r2;
        for k in 0..dim {
            let g = c * (y[k] - x[k]);
            grad_points[j * dim + k] = g;
            grad_y[k] -= g;
        }
    }
    Ok(PotentialGradient { value: value.value(), grad_points, grad_y })
}

/// Normalized potential `(1/H_d(S^d)) ∫_{S^d} |y - x|^{-s} dH_d(x)` of the uniform
/// measure on the unit sphere `S^d ⊂ R^{d+1}`, for `0 < s < d`.
///
/// On the sphere this is the constant `γ_{s,d}`. The integral is reduced to one
/// variable `u = 1 - cos θ` and integrated adaptively.
pub fn sphere_uniform_potential(d: usize, s: f64, y: &[f64]) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidArgument("sphere dimension must be at least 1".into()));
    }
    if y.len() != d + 1 {
        return Err(Error::DimensionMismatch { expected: d + 1, got: y.len() });
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidArgument(format!("Riesz exponent s = {s} must be positive")));
    }
    if s >= d as f64 {
        return Err(Error::Divergent { s, d });
    }
    let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let a = (d as f64 - 2.0) / 2.0;
    let integrand = |u: f64| -> f64 {
        let base = (u * (2.0 - u)).powf(a);
        let q = (1.0 - r) * (1.0 - r) + 2.0 * r * u;
        base * q.powf(-s / 2.0)
    };
    // u = v^k on [0,1] removes the u^{(d-s)/2 - 1} endpoint singularity at r = 1;
    // u = 2 - v² on [1,2] removes the (2-u)^{-1/2} singularity when d = 1.
    let k = (2.0 / (d as f64 - s)).ceil().max(1.0);
    let left = quad::integrate(|v: f64| integrand(v.powf(k)) * k * v.powf(k - 1.0), 0.0, 1.0, 0.0, 1e-11, 4000);
    let right = quad::integrate(|v: f64| integrand(2.0 - v * v) * 2.0 * v, 0.0, 1.0, 0.0, 1e-11, 4000);
    let scale = d as f64 * unit_ball_volume(d) / ((d + 1) as f64 * unit_ball_volume(d + 1));
    Ok(scale * (left.value + right.value))
}
