//! Cells for branch-and-bound over a domain: axis boxes for bodies and
//! cube-sphere face patches for spheres and caps.

use super::mesh::for_each_grid;
use super::{dist, dot, ellipsoid_surface_point, norm, DomainSet};

#[derive(Debug, Clone)]
pub(crate) enum Region {
    /// Axis-aligned box `[lo, hi]` in ambient coordinates.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Radial image of the face `{x_axis = sign}` of `[-1,1]^{d+1}` restricted to the
    /// parameter box `[lo, hi]` in the remaining coordinates.
    Patch { axis: usize, sign: f64, lo: Vec<f64>, hi: Vec<f64> },
}

#[derive(Debug, Clone)]
pub(crate) struct Cell {
    pub region: Region,
    pub depth: u32,
}

/// Derived geometry of a cell that meets the domain.
#[derive(Debug, Clone)]
pub(crate) struct CellGeom {
    /// Expansion point; every point of the cell is within `radius` of it.
    pub center: Vec<f64>,
    pub radius: f64,
    /// A point of the domain associated with the cell (upper-bound probe).
    pub rep: Vec<f64>,
    /// Supporting halfspace `n·y ≤ b` of a ball-like body, for boxes crossing its boundary.
    halfspace: Option<(Vec<f64>, f64)>,
}

fn patch_point(axis: usize, sign: f64, u: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(u.len() + 1);
    let mut k = 0;
    for c in 0..=u.len() {
        if c == axis {
            v.push(sign);
        } else {
            v.push(u[k]);
            k += 1;
        }
    }
    let r = norm(&v);
    v.iter_mut().for_each(|x| *x /= r);
    v
}

fn split_box(lo: &[f64], hi: &[f64]) -> Vec<(Vec<f64>, Vec<f64>)> {
    let d = lo.len();
    let mut out = Vec::with_capacity(1 << d);
    for_each_grid(&vec![2; d], |idx| {
        let mut a = Vec::with_capacity(d);
        let mut b = Vec::with_capacity(d);
        for k in 0..d {
            let mid = 0.5 * (lo[k] + hi[k]);
            if idx[k] == 0 {
                a.push(lo[k]);
                b.push(mid);
            } else {
                a.push(mid);
                b.push(hi[k]);
            }
        }
        out.push((a, b));
    });
    out
}

fn grid_boxes(lo: &[f64], hi: &[f64], n: &[usize]) -> Vec<(Vec<f64>, Vec<f64>)> {
    let d = lo.len();
    let mut out = Vec::new();
    for_each_grid(n, |idx| {
        let a: Vec<f64> =
            (0..d).map(|k| lo[k] + (hi[k] - lo[k]) * idx[k] as f64 / n[k] as f64).collect();
        let b: Vec<f64> =
            (0..d).map(|k| lo[k] + (hi[k] - lo[k]) * (idx[k] + 1) as f64 / n[k] as f64).collect();
        out.push((a, b));
    });
    out
}

impl Cell {
    /// A partition of the domain (or of a superset of it) into cells of diameter about `h`.
    pub fn initial(domain: &DomainSet, h: f64) -> Vec<Cell> {
        let d = domain.dim();
        let sqrt_d = (d as f64).sqrt();
        let boxes = |lo: Vec<f64>, hi: Vec<f64>| {
            let n: Vec<usize> =
                lo.iter().zip(&hi).map(|(a, b)| ((b - a) * sqrt_d / h).ceil().max(1.0) as usize).collect();
            grid_boxes(&lo, &hi, &n)
                .into_iter()
                .map(|(lo, hi)| Cell { region: Region::Box { lo, hi }, depth: 0 })
                .collect::<Vec<_>>()
        };
        let cells = match domain {
            DomainSet::Cube { .. } => boxes(vec![0.0; d], vec![1.0; d]),
            DomainSet::Ball { .. } | DomainSet::Ellipsoid { .. } => {
                let axes = domain.axes().expect("ball-like domain");
                boxes(axes.iter().map(|a| -a).collect(), axes)
            }
            DomainSet::Sphere { .. } | DomainSet::SphericalCap { .. } => {
                let m = (2.0 * sqrt_d / h).ceil().max(1.0) as usize;
                let mut out = Vec::new();
                for axis in 0..=d {
                    for sign in [-1.0, 1.0] {
                        for (lo, hi) in grid_boxes(&vec![-1.0; d], &vec![1.0; d], &vec![m; d]) {
                            out.push(Cell { region: Region::Patch { axis, sign, lo, hi }, depth: 0 });
                        }
                    }
                }
                out
            }
        };
        cells.into_iter().filter(|c| c.geom(domain).is_some()).collect()
    }

    /// The `2^d` cells obtained by halving every parameter interval.
    pub fn children(&self) -> Vec<Cell> {
        let depth = self.depth + 1;
        match &self.region {
            Region::Box { lo, hi } => split_box(lo, hi)
                .into_iter()
                .map(|(lo, hi)| Cell { region: Region::Box { lo, hi }, depth })
                .collect(),
            Region::Patch { axis, sign, lo, hi } => split_box(lo, hi)
                .into_iter()
                .map(|(lo, hi)| Cell { region: Region::Patch { axis: *axis, sign: *sign, lo, hi }, depth })
                .collect(),
        }
    }

    /// Geometry of the cell, or `None` when it provably misses the domain.
    pub fn geom(&self, domain: &DomainSet) -> Option<CellGeom> {
        match &self.region {
            Region::Box { lo, hi } => {
                let center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
                let radius = 0.5 * dist(lo, hi);
                let mut rep = center.clone();
                domain.project_in_place(&mut rep);
                let mut halfspace = None;
                if let Some(axes) = domain.axes() {
                    // Nearest and farthest box points in the ellipsoid gauge.
                    let mut qmin = 0.0;
                    let mut qmax = 0.0;
                    for k in 0..lo.len() {
                        let near = 0.0f64.clamp(lo[k], hi[k]) / axes[k];
                        let far = lo[k].abs().max(hi[k].abs()) / axes[k];
                        qmin += near * near;
                        qmax += far * far;
                    }
                    if qmin > 1.0 {
                        return None;
                    }
                    if qmax > 1.0 {
                        let (q, _) = ellipsoid_surface_point(&axes, &center);
                        let mut n: Vec<f64> = q.iter().zip(&axes).map(|(x, a)| x / (a * a)).collect();
                        let nn = norm(&n);
                        if nn > 0.0 {
                            n.iter_mut().for_each(|x| *x /= nn);
                            let b = dot(&n, &q);
                            halfspace = Some((n, b));
                        }
                    }
                }
                Some(CellGeom { center, radius, rep, halfspace })
            }
            Region::Patch { axis, sign, lo, hi } => {
                let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
                let center = patch_point(*axis, *sign, &mid);
                let mut radius: f64 = 0.0;
                let d = lo.len();
                let mut corner = vec![0.0; d];
                for_each_grid(&vec![2; d], |idx| {
                    for k in 0..d {
                        corner[k] = if idx[k] == 0 { lo[k] } else { hi[k] };
                    }
                    radius = radius.max(dist(&center, &patch_point(*axis, *sign, &corner)));
                });
                let mut rep = center.clone();
                if let DomainSet::SphericalCap { t0, .. } = domain {
                    if max_first_coord(&center, radius) < *t0 {
                        return None;
                    }
                    domain.project_in_place(&mut rep);
                }
                Some(CellGeom { center, radius, rep, halfspace: None })
            }
        }
    }

    /// Lower and upper bounds on `|y - x|` over the cell.
    pub fn dist_range(&self, geom: &CellGeom, x: &[f64]) -> (f64, f64) {
        match &self.region {
            Region::Box { lo, hi } => {
                let mut near = 0.0;
                let mut far = 0.0;
                for k in 0..x.len() {
                    let dn = if x[k] < lo[k] {
                        lo[k] - x[k]
                    } else if x[k] > hi[k] {
                        x[k] - hi[k]
                    } else {
                        0.0
                    };
                    let df = (x[k] - lo[k]).abs().max((x[k] - hi[k]).abs());
                    near += dn * dn;
                    far += df * df;
                }
                (near.sqrt(), far.sqrt())
            }
            Region::Patch { .. } => {
                let c = dist(&geom.center, x);
                ((c - geom.radius).max(0.0), c + geom.radius)
            }
        }
    }

    /// Lower bound on `g·(y - center)` over the part of the cell inside the domain.
    pub fn linear_lower(&self, domain: &DomainSet, geom: &CellGeom, g: &[f64]) -> f64 {
        match &self.region {
            Region::Box { lo, hi } => {
                let c = &geom.center;
                let box_min = |w: &[f64]| -> f64 {
                    (0..w.len()).map(|k| w[k] * (if w[k] >= 0.0 { lo[k] } else { hi[k] } - c[k])).sum()
                };
                let mut best = box_min(g);
                if let Some((n, b)) = &geom.halfspace {
                    // Lagrangian dual of min g·(y-c) over box ∩ {n·y ≤ b}; concave and
                    // piecewise linear in λ, so its maximum sits at a breakpoint.
                    let slack = dot(n, c) - b;
                    let mut w = vec![0.0; g.len()];
                    for k in 0..g.len() {
                        if n[k] != 0.0 {
                            let lam = -g[k] / n[k];
                            if lam > 0.0 && lam.is_finite() {
                                for i in 0..g.len() {
                                    w[i] = g[i] + lam * n[i];
                                }
                                best = best.max(box_min(&w) + lam * slack);
                            }
                        }
                    }
                }
                best
            }
            Region::Patch { .. } => {
                let p = &geom.center;
                let r = geom.radius;
                // On the sphere, y - p = t - (|y-p|²/2) p with t ⟂ p and |t| ≤ |y-p| ≤ r.
                let sphere_bound = |w: &[f64]| -> f64 {
                    let wn = dot(w, p);
                    let wt2 = (dot(w, w) - wn * wn).max(0.0);
                    -wt2.sqrt() * r - wn.max(0.0) * r * r / 2.0
                };
                let mut best = sphere_bound(g);
                if let DomainSet::SphericalCap { t0, .. } = domain {
                    // Dualize y(1) ≥ t0: g·(y-p) ≥ (g - λe1)·(y-p) - λ(p(1) - t0).
                    let slack = p[0] - t0;
                    let e1t = (1.0 - p[0] * p[0]).max(0.0).sqrt();
                    let dual = |lam: f64| -> f64 {
                        let mut w = g.to_vec();
                        w[0] -= lam;
                        sphere_bound(&w) - lam * slack
                    };
                    let hi = 4.0 * (norm(g) + 1.0) / e1t.max(r).max(1e-12);
                    let (mut a, mut b) = (0.0, hi);
                    let phi = 0.5 * (5f64.sqrt() - 1.0);
                    for _ in 0..60 {
                        let m1 = b - phi * (b - a);
                        let m2 = a + phi * (b - a);
                        if dual(m1) < dual(m2) {
                            a = m1;
                        } else {
                            b = m2;
                        }
                    }
                    best = best.max(dual(0.5 * (a + b)));
                }
                best
            }
        }
    }
}

/// Upper bound on `y(1)` over sphere points within `r` of the unit vector `p`.
fn max_first_coord(p: &[f64], r: f64) -> f64 {
    let e1t = (1.0 - p[0] * p[0]).max(0.0).sqrt();
    p[0] + e1t * r + (-p[0]).max(0.0) * r * r / 2.0
}
