//! Exact covering-radius descent on the unit square.
//!
//! Reflecting the points across the four sides and the four corners makes the
//! Voronoi diagram of the square exact: every local maximum of `min_j |y - x_j|`
//! over `[0,1]^2` is the circumcenter of a Delaunay triangle of the reflected set
//! that lies in the square.

use delaunator::{triangulate, Point as DPoint};

use crate::simplex_qp::simplex_qp_with;

/// Sign and offset of each reflected copy: copy coordinate = sign * x + offset.
const COPIES: [([f64; 2], [f64; 2]); 9] = [
    ([1.0, 1.0], [0.0, 0.0]),
    ([-1.0, 1.0], [0.0, 0.0]),
    ([-1.0, 1.0], [2.0, 0.0]),
    ([1.0, -1.0], [0.0, 0.0]),
    ([1.0, -1.0], [0.0, 2.0]),
    ([-1.0, -1.0], [0.0, 0.0]),
    ([-1.0, -1.0], [2.0, 0.0]),
    ([-1.0, -1.0], [0.0, 2.0]),
    ([-1.0, -1.0], [2.0, 2.0]),
];

/// Keeps reflected copies apart so the triangulation stays nondegenerate.
const WALL: f64 = 1e-7;

/// A local maximum of the distance to the configuration, with `∂r/∂x`.
struct Hole {
    r: f64,
    /// `(point index, gradient)` for the three defining points.
    grad: [(usize, [f64; 2]); 3],
}

fn holes(coords: &[f64]) -> Vec<Hole> {
    let n = coords.len() / 2;
    let mut pts = Vec::with_capacity(9 * n);
    for (sign, off) in COPIES {
        for x in coords.chunks_exact(2) {
            pts.push(DPoint { x: sign[0] * x[0] + off[0], y: sign[1] * x[1] + off[1] });
        }
    }
    let tri = triangulate(&pts);
    let mut out = Vec::new();
    for t in tri.triangles.chunks_exact(3) {
        let [a, b, c] = [&pts[t[0]], &pts[t[1]], &pts[t[2]]];
        let (bx, by, cx, cy) = (b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y);
        let det = 2.0 * (bx * cy - by * cx);
        if det.abs() < 1e-300 {
            continue;
        }
        let (b2, c2) = (bx * bx + by * by, cx * cx + cy * cy);
        let ux = (cy * b2 - by * c2) / det;
        let uy = (bx * c2 - cx * b2) / det;
        let u = [a.x + ux, a.y + uy];
        if !(-1e-12..=1.0 + 1e-12).contains(&u[0]) || !(-1e-12..=1.0 + 1e-12).contains(&u[1]) {
            continue;
        }
        let r = (ux * ux + uy * uy).sqrt();
        // Barycentric coordinates of the circumcenter give ∂r/∂p_k = λ_k (p_k - u) / r.
        let l1 = (ux * cy - uy * cx) / (bx * cy - by * cx);
        let l2 = (bx * uy - by * ux) / (bx * cy - by * cx);
        let lam = [1.0 - l1 - l2, l1, l2];
        let mut grad = [(0, [0.0; 2]); 3];
        for k in 0..3 {
            let p = &pts[t[k]];
            let (sign, _) = COPIES[t[k] / n];
            grad[k] = (t[k] % n, [sign[0] * lam[k] * (p.x - u[0]) / r, sign[1] * lam[k] * (p.y - u[1]) / r]);
        }
        out.push(Hole { r, grad });
    }
    out
}

/// Exact covering radius of a configuration in `[0,1]^2`.
#[cfg(test)]
fn square_covering(coords: &[f64]) -> f64 {
    holes(coords).iter().map(|h| h.r).fold(0.0, f64::max)
}

fn clamp(coords: &mut [f64]) {
    for v in coords {
        *v = v.clamp(WALL, 1.0 - WALL);
    }
}

/// Proximal minimax steps on the exact covering radius: each step minimizes
/// `max_k r_k + g_k·Δ + μ|Δ|²/2` over the holes within `margin` of the largest.
/// Returns the covering radius of the final configuration.
pub(crate) fn square_minimax(coords: &mut [f64], budget: usize) -> f64 {
    let total = coords.len();
    let spacing = (2.0 / total as f64).sqrt();
    clamp(coords);
    let mut hs = holes(coords);
    let mut rmax = hs.iter().map(|h| h.r).fold(0.0, f64::max);
    let mu0 = 1.0 / (0.1 * spacing);
    let mut mu = mu0;
    let mut history = vec![rmax];
    for _ in 0..budget {
        // Stop once 50 steps gain less than a relative 1e-7.
        if history.len() > 50 && history[history.len() - 51] - rmax < 1e-7 * rmax {
            break;
        }
        history.push(rmax);
        // Steps are about 1/μ long, so farther holes cannot become the largest.
        let margin = (4.0 / mu).min(0.1 * spacing);
        let active: Vec<&Hole> = hs.iter().filter(|h| h.r >= rmax - margin).collect();
        let k = active.len();
        // Gradients touch at most three points, so inner products are sparse.
        let grads: Vec<Vec<(usize, [f64; 2])>> = active
            .iter()
            .map(|h| {
                let mut g: Vec<(usize, [f64; 2])> = Vec::with_capacity(3);
                for (j, d) in h.grad {
                    match g.iter_mut().find(|e| e.0 == j) {
                        Some(e) => {
                            e.1[0] += d[0];
                            e.1[1] += d[1];
                        }
                        None => g.push((j, d)),
                    }
                }
                g
            })
            .collect();
        // Q = G Gᵀ / μ through the sparse gradient rows; its largest eigenvalue is
        // bounded by the largest row sum of |Q|, taken over holes sharing a point.
        let mut by_point: Vec<Vec<usize>> = vec![Vec::new(); total / 2];
        for (a, g) in grads.iter().enumerate() {
            for (j, _) in g {
                by_point[*j].push(a);
            }
        }
        let lip = (0..k)
            .map(|a| {
                let mut row = 0.0;
                for (i, u) in &grads[a] {
                    for &b in &by_point[*i] {
                        let w = grads[b].iter().find(|e| e.0 == *i).map_or([0.0; 2], |e| e.1);
                        row += (u[0] * w[0] + u[1] * w[1]).abs();
                    }
                }
                row / mu
            })
            .fold(0.0, f64::max);
        let matvec = |z: &[f64], out: &mut [f64]| {
            let mut v = vec![0.0; total];
            for (zb, g) in z.iter().zip(&grads) {
                for (j, d) in g {
                    v[2 * j] += zb * d[0];
                    v[2 * j + 1] += zb * d[1];
                }
            }
            for (o, g) in out.iter_mut().zip(&grads) {
                *o = g.iter().map(|(j, d)| d[0] * v[2 * j] + d[1] * v[2 * j + 1]).sum::<f64>() / mu;
            }
        };
        // Dual of the proximal step: maximize Σλ_k r_k - |Σλ_k g_k|²/(2μ) over the simplex.
        let c: Vec<f64> = active.iter().map(|h| rmax - h.r).collect();
        let lam = simplex_qp_with(matvec, lip, &c, 500, 1e-14);
        let mut trial = coords.to_vec();
        for (l, g) in lam.iter().zip(&grads) {
            for (j, d) in g {
                trial[2 * j] -= l * d[0] / mu;
                trial[2 * j + 1] -= l * d[1] / mu;
            }
        }
        clamp(&mut trial);
        let ht = holes(&trial);
        let rt = ht.iter().map(|h| h.r).fold(0.0, f64::max);
        if rt < rmax {
            coords.copy_from_slice(&trial);
            hs = ht;
            rmax = rt;
            mu = (mu / 2.0).max(mu0 * 1e-3);
        } else {
            mu *= 4.0;
            if mu > mu0 * 1e12 {
                break;
            }
        }
    }
    rmax
}
