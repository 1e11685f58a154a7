//! Admissible domains: membership, nearest-point projection, boundary distance,
//! Hausdorff measure, diameter, uniform sampling and meshes.

mod cells;
mod config;
mod mesh;

pub use config::{Configuration, Point};
pub(crate) use config::lex_cmp;
pub(crate) use cells::{Cell, CellGeom};
pub use mesh::{build_mesh, default_fill, Mesh, SpatialHash};

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Maximum iterations of the ellipsoid Lagrange-parameter solve.
const ELLIPSOID_MAX_ITER: usize = 200;
const ELLIPSOID_TOL: f64 = 1e-12;

/// A compact set `A` on which configurations live.
///
/// `Cube` is `[0,1]^d`, `Ball` the closed unit ball of `R^d`, `Ellipsoid` the solid
/// ellipsoid `Σ x_i²/a_i² ≤ 1`, `Sphere` the unit sphere `S^d ⊂ R^{d+1}` and
/// `SphericalCap` the cap `{x ∈ S^d : x(1) ≥ t0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSet {
    Cube { d: usize },
    Ball { d: usize },
    Ellipsoid { semi_axes: Vec<f64> },
    Sphere { d: usize },
    SphericalCap { d: usize, t0: f64 },
}

/// Volume of the unit ball in `R^d`, `π^{d/2} / Γ(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// Surface measure of the unit sphere `S^d`, which is `(d+1) V_{d+1}`.
pub fn sphere_area(d: usize) -> f64 {
    (d + 1) as f64 * unit_ball_volume(d + 1)
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl DomainSet {
    pub fn cube(d: usize) -> Self {
        DomainSet::Cube { d }
    }

    pub fn ball(d: usize) -> Self {
        DomainSet::Ball { d }
    }

    pub fn sphere(d: usize) -> Self {
        DomainSet::Sphere { d }
    }

    pub fn ellipsoid(semi_axes: Vec<f64>) -> Result<Self> {
        let dom = DomainSet::Ellipsoid { semi_axes };
        dom.validate()?;
        Ok(dom)
    }

    pub fn cap(d: usize, t0: f64) -> Result<Self> {
        let dom = DomainSet::SphericalCap { d, t0 };
        dom.validate()?;
        Ok(dom)
    }

    /// Checks the parameter invariants of the domain.
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSet::Cube { d } | DomainSet::Ball { d } | DomainSet::Sphere { d } => {
                if *d == 0 {
                    return Err(Error::InvalidDomain("dimension must be at least 1".into()));
                }
            }
            DomainSet::Ellipsoid { semi_axes } => {
                if semi_axes.is_empty() {
                    return Err(Error::InvalidDomain("ellipsoid needs at least one semi-axis".into()));
                }
                if semi_axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                    return Err(Error::InvalidDomain(
                        "ellipsoid semi-axes must be finite and strictly positive".into(),
                    ));
                }
            }
            DomainSet::SphericalCap { d, t0 } => {
                if *d == 0 {
                    return Err(Error::InvalidDomain("dimension must be at least 1".into()));
                }
                if !(t0.is_finite() && *t0 > -1.0 && *t0 < 1.0) {
                    return Err(Error::InvalidDomain(format!("cap height t0 = {t0} must lie in (-1, 1)")));
                }
            }
        }
        Ok(())
    }

    /// Intrinsic dimension `d`.
    pub fn dim(&self) -> usize {
        match self {
            DomainSet::Cube { d }
            | DomainSet::Ball { d }
            | DomainSet::Sphere { d }
            | DomainSet::SphericalCap { d, .. } => *d,
            DomainSet::Ellipsoid { semi_axes } => semi_axes.len(),
        }
    }

    /// Ambient dimension `ℓ`.
    pub fn ambient_dim(&self) -> usize {
        match self {
            DomainSet::Sphere { d } | DomainSet::SphericalCap { d, .. } => d + 1,
            _ => self.dim(),
        }
    }

    /// Short lowercase name used in tables.
    pub fn name(&self) -> &'static str {
        match self {
            DomainSet::Cube { .. } => "cube",
            DomainSet::Ball { .. } => "ball",
            DomainSet::Ellipsoid { .. } => "ellipsoid",
            DomainSet::Sphere { .. } => "sphere",
            DomainSet::SphericalCap { .. } => "cap",
        }
    }

    /// True for full-dimensional bodies (cube, ball, ellipsoid).
    pub fn is_body(&self) -> bool {
        matches!(self, DomainSet::Cube { .. } | DomainSet::Ball { .. } | DomainSet::Ellipsoid { .. })
    }

    /// Semi-axes for ball-like bodies (all ones for the ball).
    pub(crate) fn axes(&self) -> Option<Vec<f64>> {
        match self {
            DomainSet::Ball { d } => Some(vec![1.0; *d]),
            DomainSet::Ellipsoid { semi_axes } => Some(semi_axes.clone()),
            _ => None,
        }
    }

    pub(crate) fn check_dim(&self, p: &[f64]) -> Result<()> {
        let l = self.ambient_dim();
        if p.len() != l {
            return Err(Error::DimensionMismatch { expected: l, got: p.len() });
        }
        Ok(())
    }

    /// Whether `p` lies in the domain up to `tol`.
    pub fn contains(&self, p: &[f64], tol: f64) -> Result<bool> {
        self.check_dim(p)?;
        Ok(self.contains_unchecked(p, tol))
    }

    pub(crate) fn contains_unchecked(&self, p: &[f64], tol: f64) -> bool {
        if p.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match self {
            DomainSet::Cube { .. } => p.iter().all(|&x| x >= -tol && x <= 1.0 + tol),
            DomainSet::Ball { .. } => norm(p) <= 1.0 + tol,
            DomainSet::Ellipsoid { semi_axes } => {
                let q: f64 = p.iter().zip(semi_axes).map(|(x, a)| (x / a) * (x / a)).sum();
                if q <= 1.0 {
                    return true;
                }
                let (y, _) = ellipsoid_surface_point(semi_axes, p);
                dist(&y, p) <= tol
            }
            DomainSet::Sphere { .. } => (norm(p) - 1.0).abs() <= tol,
            DomainSet::SphericalCap { t0, .. } => (norm(p) - 1.0).abs() <= tol && p[0] >= t0 - tol,
        }
    }

    /// A nearest point of the domain to `p`.
    ///
    /// Projecting the origin onto a sphere or cap returns the lexicographically smallest
    /// unit vector `(-1, 0, …, 0)` (then moved to the rim for caps).
    pub fn project(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(p)?;
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("cannot project a non-finite point".into()));
        }
        let mut y = p.to_vec();
        self.project_in_place(&mut y);
        Ok(y)
    }

    pub(crate) fn project_in_place(&self, y: &mut [f64]) {
        match self {
            DomainSet::Cube { .. } => {
                for v in y.iter_mut() {
                    *v = v.clamp(0.0, 1.0);
                }
            }
            DomainSet::Ball { .. } => {
                let r = norm(y);
                if r > 1.0 {
                    for v in y.iter_mut() {
                        *v /= r;
                    }
                }
            }
            DomainSet::Ellipsoid { semi_axes } => {
                let q: f64 = y.iter().zip(semi_axes).map(|(x, a)| (x / a) * (x / a)).sum();
                if q > 1.0 {
                    let (s, _) = ellipsoid_surface_point(semi_axes, y);
                    y.copy_from_slice(&s);
                }
            }
            DomainSet::Sphere { .. } => normalize_or_default(y),
            DomainSet::SphericalCap { t0, .. } => {
                normalize_or_default(y);
                if y[0] < *t0 {
                    project_to_rim(y, *t0);
                }
            }
        }
    }

    /// Euclidean distance from `p ∈ A` to the boundary `∂A`.
    ///
    /// The sphere has no boundary and reports `+∞`; for caps the distance is the
    /// chordal distance to the rim circle.
    pub fn boundary_distance(&self, p: &[f64]) -> Result<f64> {
        if !self.contains(p, 1e-9)? {
            return Err(Error::NotInDomain);
        }
        Ok(self.boundary_distance_unchecked(p))
    }

    pub(crate) fn boundary_distance_unchecked(&self, p: &[f64]) -> f64 {
        match self {
            DomainSet::Cube { .. } => p
                .iter()
                .map(|&x| x.min(1.0 - x))
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
            DomainSet::Ball { .. } => (1.0 - norm(p)).max(0.0),
            DomainSet::Ellipsoid { semi_axes } => {
                let (y, _) = ellipsoid_surface_point(semi_axes, p);
                dist(&y, p)
            }
            DomainSet::Sphere { .. } => f64::INFINITY,
            DomainSet::SphericalCap { t0, .. } => {
                let rest = norm(&p[1..]);
                let d2 = 2.0 - 2.0 * (p[0] * t0 + (1.0 - t0 * t0).sqrt() * rest);
                d2.max(0.0).sqrt()
            }
        }
    }

    /// `H_d(A)`, normalized so that `H_d([0,1]^d) = 1`.
    pub fn hausdorff_measure(&self) -> f64 {
        match self {
            DomainSet::Cube { .. } => 1.0,
            DomainSet::Ball { d } => unit_ball_volume(*d),
            DomainSet::Ellipsoid { semi_axes } => {
                unit_ball_volume(semi_axes.len()) * semi_axes.iter().product::<f64>()
            }
            DomainSet::Sphere { d } => sphere_area(*d),
            DomainSet::SphericalCap { d, t0 } => cap_area(*d, *t0),
        }
    }

    /// Exact (chordal) diameter.
    pub fn diameter(&self) -> f64 {
        match self {
            DomainSet::Cube { d } => (*d as f64).sqrt(),
            DomainSet::Ball { .. } | DomainSet::Sphere { .. } => 2.0,
            DomainSet::Ellipsoid { semi_axes } => 2.0 * semi_axes.iter().cloned().fold(0.0, f64::max),
            DomainSet::SphericalCap { t0, .. } => {
                if *t0 <= 0.0 {
                    2.0
                } else {
                    2.0 * (1.0 - t0 * t0).sqrt()
                }
            }
        }
    }

    /// Draws a point from the normalized Hausdorff measure on the domain.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            DomainSet::Cube { d } => (0..*d).map(|_| rng.random::<f64>()).collect(),
            DomainSet::Ball { d } => sample_ball(*d, rng),
            DomainSet::Ellipsoid { semi_axes } => {
                let mut p = sample_ball(semi_axes.len(), rng);
                for (x, a) in p.iter_mut().zip(semi_axes) {
                    *x *= a;
                }
                p
            }
            DomainSet::Sphere { d } => sample_sphere(d + 1, rng),
            DomainSet::SphericalCap { d, t0 } => {
                let theta0 = t0.acos();
                let smax = if theta0 >= PI / 2.0 { 1.0 } else { theta0.sin() };
                let theta = loop {
                    let th = theta0 * rng.random::<f64>();
                    let accept = if *d == 1 { 1.0 } else { (th.sin() / smax).powi(*d as i32 - 1) };
                    if rng.random::<f64>() <= accept {
                        break th;
                    }
                };
                let u = sample_sphere(*d, rng);
                let mut p = Vec::with_capacity(d + 1);
                p.push(theta.cos());
                p.extend(u.iter().map(|x| x * theta.sin()));
                p
            }
        }
    }
}

fn sample_sphere<R: Rng + ?Sized>(l: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..l).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let r = norm(&v);
        if r > 1e-12 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

fn sample_ball<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let dir = sample_sphere(d, rng);
    let r = rng.random::<f64>().powf(1.0 / d as f64);
    dir.into_iter().map(|x| x * r).collect()
}

/// Surface measure of `{x ∈ S^d : x(1) ≥ t0}`, integrating `d V_d sin^{d-1}θ` over `[0, arccos t0]`.
pub fn cap_area(d: usize, t0: f64) -> f64 {
    let theta0 = t0.clamp(-1.0, 1.0).acos();
    let base = d as f64 * unit_ball_volume(d);
    if d == 1 {
        return base * theta0;
    }
    let r = quad::integrate(|th: f64| th.sin().powi(d as i32 - 1), 0.0, theta0, 0.0, 1e-12, 2000);
    base * r.value
}

fn normalize_or_default(y: &mut [f64]) {
    let r = norm(y);
    if r > 0.0 && r.is_finite() {
        for v in y.iter_mut() {
            *v /= r;
        }
    } else {
        y.iter_mut().for_each(|v| *v = 0.0);
        y[0] = -1.0;
    }
}

/// Nearest rim point `(t0, √(1-t0²) u)` of the cap to the unit vector `y`.
fn project_to_rim(y: &mut [f64], t0: f64) {
    let rest = norm(&y[1..]);
    let radius = (1.0 - t0 * t0).sqrt();
    y[0] = t0;
    if rest > 0.0 {
        for v in y[1..].iter_mut() {
            *v *= radius / rest;
        }
    } else {
        y[1..].iter_mut().for_each(|v| *v = 0.0);
        y[1] = -radius;
    }
}

/// Nearest point of the ellipsoid surface `Σ y_i²/a_i² = 1` to `p` (inside or outside).
///
/// Returns the point and the Lagrange parameter `t` with `y_i = a_i² p_i / (a_i² + t)`.
pub(crate) fn ellipsoid_surface_point(axes: &[f64], p: &[f64]) -> (Vec<f64>, f64) {
    let n = axes.len();
    let q: Vec<f64> = p.iter().map(|x| x.abs()).collect();
    let a_min = axes.iter().cloned().fold(f64::INFINITY, f64::min);
    let lo = -a_min * a_min;

    // When every shortest axis carries no component, F stays finite at t = -a_min²
    // and the nearest point may leave the principal plane.
    let degenerate_axes: Vec<usize> = (0..n)
        .filter(|&i| (axes[i] - a_min).abs() <= 1e-14 * a_min)
        .collect();
    if degenerate_axes.iter().all(|&i| q[i] <= 1e-13 * axes[i]) {
        let mut f_lim = -1.0;
        for i in 0..n {
            if !degenerate_axes.contains(&i) {
                let den = axes[i] * axes[i] - a_min * a_min;
                f_lim += (axes[i] * q[i] / den).powi(2);
            }
        }
        if f_lim <= 0.0 {
            let mut y = vec![0.0; n];
            for i in 0..n {
                if !degenerate_axes.contains(&i) {
                    y[i] = axes[i] * axes[i] * q[i] / (axes[i] * axes[i] - a_min * a_min);
                }
            }
            y[degenerate_axes[0]] = a_min * (-f_lim).sqrt();
            for i in 0..n {
                if p[i] < 0.0 {
                    y[i] = -y[i];
                }
            }
            return (y, lo);
        }
    }

    let f = |t: f64| -> (f64, f64) {
        let mut val = -1.0;
        let mut der = 0.0;
        for i in 0..n {
            let den = t + axes[i] * axes[i];
            let r = axes[i] * q[i] / den;
            val += r * r;
            der += -2.0 * r * r / den;
        }
        (val, der)
    };
    let aq: f64 = axes.iter().zip(&q).map(|(a, x)| (a * x) * (a * x)).sum::<f64>().sqrt();
    let mut lo_t = lo;
    let mut hi_t = aq - a_min * a_min;
    if hi_t <= lo_t {
        hi_t = lo_t + a_min * a_min;
    }
    // Newton from the left stays left of the root because F is convex and decreasing.
    let mut t = axes
        .iter()
        .zip(&q)
        .map(|(a, x)| a * x - a * a)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(lo_t + 1e-300_f64.max((hi_t - lo_t) * 1e-16));
    if t >= hi_t {
        t = 0.5 * (lo_t + hi_t);
    }
    let scale = aq.max(a_min * a_min);
    for _ in 0..ELLIPSOID_MAX_ITER {
        let (val, der) = f(t);
        // F(t) = Σ y_i²/a_i² - 1 is at rounding level: y is on the surface.
        if val.abs() <= 4.0 * f64::EPSILON {
            break;
        }
        if val > 0.0 {
            lo_t = lo_t.max(t);
        } else {
            hi_t = hi_t.min(t);
        }
        let mut next = if der < 0.0 { t - val / der } else { f64::NAN };
        if !(next > lo_t && next < hi_t) {
            next = 0.5 * (lo_t + hi_t);
        }
        let step = (next - t).abs();
        t = next;
        if step <= ELLIPSOID_TOL * scale || hi_t - lo_t <= ELLIPSOID_TOL * scale * 1e-3 {
            // One more Newton step squares the remaining error.
            let (val, der) = f(t);
            let polished = t - val / der;
            if der < 0.0 && polished > lo_t && polished < hi_t {
                t = polished;
            }
            break;
        }
    }
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let v = axes[i] * axes[i] * q[i] / (t + axes[i] * axes[i]);
            if p[i] < 0.0 {
                -v
            } else {
                v
            }
        })
        .collect();
    (y, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn contains_examples() {
        assert!(DomainSet::cube(3).contains(&[0.5, 0.5, 0.5], 1e-12).unwrap());
        assert!(!DomainSet::sphere(2).contains(&[0.0, 0.0, 1.01], 1e-12).unwrap());
        let cap = DomainSet::cap(2, 0.5).unwrap();
        assert!(cap.contains(&[0.5, 0.0, 0.75f64.sqrt()], 1e-9).unwrap());
        assert!(!cap.contains(&[0.4, 0.0, 0.84f64.sqrt()], 1e-9).unwrap());
    }

    #[test]
    fn contains_rejects_dimension_mismatch() {
        let err = DomainSet::sphere(2).contains(&[1.0, 0.0], 1e-9).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, got: 2 });
    }

    #[test]
    fn project_examples() {
        assert_eq!(DomainSet::cube(2).project(&[1.5, -0.3]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(DomainSet::sphere(2).project(&[0.0, 0.0, 2.0]).unwrap(), vec![0.0, 0.0, 1.0]);
        let b = DomainSet::ball(2).project(&[3.0, 4.0]).unwrap();
        assert!(close(b[0], 0.6, 1e-15) && close(b[1], 0.8, 1e-15));
    }

    #[test]
    fn origin_projects_to_lexicographic_minimum() {
        assert_eq!(DomainSet::sphere(2).project(&[0.0, 0.0, 0.0]).unwrap(), vec![-1.0, 0.0, 0.0]);
        let cap = DomainSet::cap(2, 0.5).unwrap();
        let p = cap.project(&[0.0, 0.0, 0.0]).unwrap();
        assert!(close(p[0], 0.5, 1e-15) && close(p[1], -(0.75f64.sqrt()), 1e-15) && p[2] == 0.0);
    }

    #[test]
    fn cap_projection_hits_rim() {
        let cap = DomainSet::cap(2, 0.0).unwrap();
        let p = cap.project(&[-1.0, 1.0, 0.0]).unwrap();
        assert!(close(p[0], 0.0, 1e-15) && close(p[1], 1.0, 1e-15));
    }

    #[test]
    fn boundary_distance_examples() {
        assert!(close(DomainSet::ball(2).boundary_distance(&[0.25, 0.0]).unwrap(), 0.75, 1e-15));
        assert!(close(DomainSet::cube(2).boundary_distance(&[0.5, 0.2]).unwrap(), 0.2, 1e-15));
        assert_eq!(DomainSet::sphere(2).boundary_distance(&[0.0, 0.0, 1.0]).unwrap(), f64::INFINITY);
        assert_eq!(
            DomainSet::ball(2).boundary_distance(&[2.0, 0.0]).unwrap_err(),
            Error::NotInDomain
        );
    }

    #[test]
    fn ellipsoid_boundary_distance_matches_dense_sampling() {
        let e = DomainSet::ellipsoid(vec![2.0, 1.0]).unwrap();
        let brute = |p: &[f64]| {
            (0..200_000)
                .map(|k| {
                    let th = 2.0 * PI * k as f64 / 200_000.0;
                    dist(&[2.0 * th.cos(), th.sin()], p)
                })
                .fold(f64::INFINITY, f64::min)
        };
        for p in [[0.0, 0.0], [0.5, 0.3], [1.5, -0.2], [-1.2, 0.5], [0.0, 0.9]] {
            let got = e.boundary_distance(&p).unwrap();
            assert!(close(got, brute(&p), 1e-8), "{p:?}: {got} vs {}", brute(&p));
        }
        assert!(close(e.boundary_distance(&[0.0, 0.0]).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn cap_boundary_distance_is_chordal_rim_distance() {
        let cap = DomainSet::cap(2, 0.0).unwrap();
        let d = cap.boundary_distance(&[1.0, 0.0, 0.0]).unwrap();
        assert!(close(d, 2f64.sqrt(), 1e-14));
    }

    #[test]
    fn measures() {
        assert_eq!(DomainSet::cube(4).hausdorff_measure(), 1.0);
        assert!(close(DomainSet::ball(2).hausdorff_measure(), PI, 1e-14));
        assert!(close(DomainSet::sphere(2).hausdorff_measure(), 4.0 * PI, 1e-13));
        assert!(close(DomainSet::sphere(1).hausdorff_measure(), 2.0 * PI, 1e-13));
        assert!(close(DomainSet::ball(3).hausdorff_measure(), 4.0 * PI / 3.0, 1e-14));
        let cap = DomainSet::cap(2, 0.3).unwrap();
        assert!(close(cap.hausdorff_measure(), 2.0 * PI * 0.7, 1e-10));
        let e = DomainSet::ellipsoid(vec![2.0, 3.0]).unwrap();
        assert!(close(e.hausdorff_measure(), 6.0 * PI, 1e-13));
    }

    #[test]
    fn cap_measure_tends_to_sphere() {
        for d in 1..=4 {
            let full = sphere_area(d);
            let mut prev = 0.0;
            for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
                let m = cap_area(d, -1.0 + eps);
                assert!(m > prev && m < full);
                prev = m;
            }
            assert!((full - prev) / full < 1e-2, "d={d}");
        }
    }

    #[test]
    fn diameters() {
        assert!(close(DomainSet::cube(2).diameter(), 2f64.sqrt(), 1e-15));
        assert_eq!(DomainSet::sphere(5).diameter(), 2.0);
        assert!(close(DomainSet::cap(2, 0.6).unwrap().diameter(), 1.6, 1e-15));
    }

    #[test]
    fn invalid_domains() {
        assert!(DomainSet::ellipsoid(vec![1.0, 0.0]).is_err());
        assert!(DomainSet::cap(2, 1.0).is_err());
        assert!(DomainSet::cap(2, -1.0).is_err());
        assert!(DomainSet::cube(0).validate().is_err());
    }

    #[test]
    fn samples_are_in_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let domains = [
            DomainSet::cube(3),
            DomainSet::ball(2),
            DomainSet::ellipsoid(vec![2.0, 0.5, 1.0]).unwrap(),
            DomainSet::sphere(2),
            DomainSet::cap(1, 0.2).unwrap(),
            DomainSet::cap(3, -0.4).unwrap(),
        ];
        for dom in &domains {
            for _ in 0..200 {
                let p = dom.sample_uniform(&mut rng);
                assert!(dom.contains(&p, 1e-12).unwrap(), "{dom:?} {p:?}");
            }
        }
    }

    #[test]
    fn projection_is_idempotent_and_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let domains = [
            DomainSet::cube(2),
            DomainSet::ball(3),
            DomainSet::ellipsoid(vec![2.0, 1.0]).unwrap(),
            DomainSet::ellipsoid(vec![0.5, 1.5, 1.0]).unwrap(),
        ];
        for dom in &domains {
            let l = dom.ambient_dim();
            for _ in 0..10_000 {
                let p: Vec<f64> = (0..l).map(|_| 6.0 * rng.random::<f64>() - 3.0).collect();
                let q = dom.sample_uniform(&mut rng);
                let pp = dom.project(&p).unwrap();
                let ppp = dom.project(&pp).unwrap();
                assert!(dist(&pp, &ppp) <= 1e-12, "{dom:?} {p:?} {pp:?} {ppp:?}");
                assert!(dist(&p, &pp) <= dist(&p, &q) + 1e-10, "{dom:?}");
            }
        }
    }

    #[test]
    fn sphere_and_cap_projection_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dom in [DomainSet::sphere(2), DomainSet::cap(2, 0.3).unwrap()] {
            for _ in 0..1000 {
                let p: Vec<f64> = (0..3).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect();
                let pp = dom.project(&p).unwrap();
                assert!(dom.contains(&pp, 1e-12).unwrap());
                assert!(dist(&pp, &dom.project(&pp).unwrap()) <= 1e-12);
                // optimality against sampled cap points
                let q = dom.sample_uniform(&mut rng);
                assert!(dist(&p, &pp) <= dist(&p, &q) + 1e-10);
            }
        }
    }
}
