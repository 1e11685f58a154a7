//! Minimal enclosing balls by Welzl's move-to-front algorithm.

use crate::geometry::{dist, dist2};

/// Relative slack used in containment tests.
const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, p: &[f64]) -> bool {
        dist(&self.center, p) <= self.radius * (1.0 + SLACK) + 1e-15
    }
}

/// Smallest ball through all of `support` with center in their affine hull.
///
/// Affinely dependent supports fall back to the circumball of a maximal independent
/// subset, enlarged to contain the rest.
fn circumball(support: &[&[f64]], dim: usize) -> Ball {
    match support.len() {
        0 => return Ball { center: vec![0.0; dim], radius: -1.0 },
        1 => return Ball { center: support[0].to_vec(), radius: 0.0 },
        _ => {}
    }
    let p0 = support[0];
    // Keep the difference vectors whose Gram–Schmidt residual is non-negligible.
    let mut residuals: Vec<Vec<f64>> = Vec::new();
    let mut vs: Vec<Vec<f64>> = Vec::new();
    for p in &support[1..] {
        let v: Vec<f64> = p.iter().zip(p0).map(|(a, b)| a - b).collect();
        let mut r = v.clone();
        for b in &residuals {
            let bb: f64 = b.iter().map(|x| x * x).sum();
            let c: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / bb;
            r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let scale: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r.iter().map(|x| x * x).sum::<f64>().sqrt() > 1e-10 * scale.max(1e-300) {
            residuals.push(r);
            vs.push(v);
        }
    }
    let k = vs.len();
    let mut center = p0.to_vec();
    if k > 0 {
        // Solve 2 Σ_j α_j (v_i·v_j) = |v_i|².
        let mut a = vec![vec![0.0; k + 1]; k];
        for i in 0..k {
            for j in 0..k {
                a[i][j] = 2.0 * vs[i].iter().zip(&vs[j]).map(|(x, y)| x * y).sum::<f64>();
            }
            a[i][k] = vs[i].iter().map(|x| x * x).sum();
        }
        let alpha = solve(a);
        for (al, v) in alpha.iter().zip(&vs) {
            center.iter_mut().zip(v).for_each(|(c, x)| *c += al * x);
        }
    }
    let radius = support.iter().map(|p| dist(&center, p)).fold(0.0, f64::max);
    Ball { center, radius }
}

/// Gaussian elimination with partial pivoting on an augmented `k×(k+1)` system.
fn solve(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let k = a.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        let p = a[col][col];
        if p.abs() < 1e-300 {
            continue;
        }
        for row in col + 1..k {
            let f = a[row][col] / p;
            for c in col..=k {
                a[row][c] -= f * a[col][c];
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut v = a[row][k];
        for c in row + 1..k {
            v -= a[row][c] * x[c];
        }
        x[row] = if a[row][row].abs() < 1e-300 { 0.0 } else { v / a[row][row] };
    }
    x
}

fn mtf<'a>(pts: &mut Vec<&'a [f64]>, end: usize, support: &mut Vec<&'a [f64]>, dim: usize) -> Ball {
    let mut ball = circumball(support, dim);
    if support.len() == dim + 1 {
        return ball;
    }
    let mut i = 0;
    while i < end {
        let p = pts[i];
        if ball.radius < 0.0 || !ball.contains(p) {
            support.push(p);
            ball = mtf(pts, i, support, dim);
            support.pop();
            let q = pts.remove(i);
            pts.insert(0, q);
        }
        i += 1;
    }
    ball
}

/// Minimal enclosing ball of a nonempty point set (all points of length `dim`).
pub fn min_enclosing_ball<P: AsRef<[f64]>>(points: &[P]) -> Ball {
    assert!(!points.is_empty(), "minimal enclosing ball of an empty set");
    let dim = points[0].as_ref().len();
    let mut pts: Vec<&[f64]> = points.iter().map(|p| p.as_ref()).collect();
    let n = pts.len();
    let mut support = Vec::with_capacity(dim + 1);
    let mut ball = mtf(&mut pts, n, &mut support, dim);
    // A second pass guards against rounding in the move-to-front bookkeeping.
    if !points.iter().all(|p| ball.contains(p.as_ref())) {
        let n = pts.len();
        ball = mtf(&mut pts, n, &mut support, dim);
    }
    ball
}

/// Radius of the minimal enclosing ball.
pub fn meb_radius<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    min_enclosing_ball(points).radius
}

/// Whether the points fit in a closed ball of radius `r` (up to relative slack).
pub(crate) fn fits_in_radius<P: AsRef<[f64]>>(points: &[P], r: f64) -> bool {
    if points.len() <= 1 {
        return true;
    }
    if points.len() == 2 {
        return dist2(points[0].as_ref(), points[1].as_ref()).sqrt() / 2.0 <= r * (1.0 + SLACK);
    }
    meb_radius(points) <= r * (1.0 + SLACK)
}
