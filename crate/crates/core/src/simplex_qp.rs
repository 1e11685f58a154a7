//! Small convex quadratic programs over the probability simplex.

/// Euclidean projection of `v` onto `{λ ≥ 0, Σλ = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Minimizes `c·λ + ½ λᵀQλ` over the simplex by accelerated projected gradient.
///
/// `q` is a symmetric positive semidefinite `K×K` matrix in row-major order.
pub fn simplex_qp(q: &[f64], c: &[f64], max_iter: usize, tol: f64) -> Vec<f64> {
    let k = c.len();
    assert_eq!(q.len(), k * k, "Q must be K×K");
    // Gershgorin bound on the largest eigenvalue.
    let lip = (0..k).map(|i| q[i * k..(i + 1) * k].iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let matvec = |x: &[f64], out: &mut [f64]| {
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..k).map(|j| q[i * k + j] * x[j]).sum();
        }
    };
    simplex_qp_with(matvec, lip, c, max_iter, tol)
}

/// [`simplex_qp`] with `Q` given by its product `matvec(x, out)` and an upper bound
/// `lip` on its largest eigenvalue.
pub fn simplex_qp_with(matvec: impl Fn(&[f64], &mut [f64]), lip: f64, c: &[f64], max_iter: usize, tol: f64) -> Vec<f64> {
    let k = c.len();
    if k == 1 {
        return vec![1.0];
    }
    let step = 1.0 / lip.max(1e-300);
    let mut qz = vec![0.0; k];
    let mut x = vec![1.0 / k as f64; k];
    let mut z = x.clone();
    let mut t = 1.0f64;
    for _ in 0..max_iter {
        matvec(&z, &mut qz);
        let trial: Vec<f64> = z.iter().zip(&qz).zip(c).map(|((a, q), ci)| a - step * (ci + q)).collect();
        let xn = project_simplex(&trial);
        let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let moved = xn.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        z = xn.iter().zip(&x).map(|(a, b)| a + (t - 1.0) / tn * (a - b)).collect();
        x = xn;
        t = tn;
        if moved < tol {
            break;
        }
    }
    x
}

/// Weights of the minimum-norm point of the convex hull of `vectors` (each of length `dim`).
pub fn min_norm_weights(vectors: &[Vec<f64>], max_iter: usize) -> Vec<f64> {
    let k = vectors.len();
    let mut q = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            q[i * k + j] = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
        }
    }
    simplex_qp(&q, &vec![0.0; k], max_iter, 1e-14)
}
