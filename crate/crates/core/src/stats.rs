//! Rank statistics used for trend tests.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Kendall rank correlation with a one-sided p-value for an increasing trend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KendallTau {
    pub tau: f64,
    /// `P(τ ≥ τ_observed)` under the null hypothesis of no association.
    pub p_increasing: f64,
}

/// Kendall's tau-b between `x` and `y`.
///
/// Without ties the p-value is exact (from the inversion-count distribution);
/// with ties a normal approximation with the tie-corrected variance is used.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<KendallTau> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if n < 2 {
        return Err(Error::NotEnoughSamples { needed: 2, got: n });
    }
    let (mut conc, mut disc) = (0i64, 0i64);
    let (mut tx, mut ty) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let a = (x[j] - x[i]).signum() * if x[j] == x[i] { 0.0 } else { 1.0 };
            let b = (y[j] - y[i]).signum() * if y[j] == y[i] { 0.0 } else { 1.0 };
            if a == 0.0 {
                tx += 1;
            }
            if b == 0.0 {
                ty += 1;
            }
            if a * b > 0.0 {
                conc += 1;
            } else if a * b < 0.0 {
                disc += 1;
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as i64;
    let denom = (((pairs - tx) * (pairs - ty)) as f64).sqrt();
    let tau = if denom > 0.0 { (conc - disc) as f64 / denom } else { 0.0 };
    let p_increasing = if tx == 0 && ty == 0 {
        // S = C - D = pairs - 2·inversions; P(S ≥ s) = P(inv ≤ disc).
        let counts = inversion_counts(n);
        let total: f64 = counts.iter().sum();
        counts[..=disc as usize].iter().sum::<f64>() / total
    } else {
        let nf = n as f64;
        let tie_term = |ties: &[usize]| ties.iter().map(|&t| (t * (t - 1) * (2 * t + 5)) as f64).sum::<f64>();
        let var = (nf * (nf - 1.0) * (2.0 * nf + 5.0) - tie_term(&tie_groups(x)) - tie_term(&tie_groups(y))) / 18.0;
        if var <= 0.0 {
            1.0
        } else {
            let z = ((conc - disc) as f64 - 1.0) / var.sqrt();
            0.5 * erfc(z / std::f64::consts::SQRT_2)
        }
    };
    Ok(KendallTau { tau, p_increasing: p_increasing.clamp(0.0, 1.0) })
}

fn tie_groups(v: &[f64]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let mut out = Vec::new();
    let mut run = 1;
    for w in s.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            if run > 1 {
                out.push(run);
            }
            run = 1;
        }
    }
    if run > 1 {
        out.push(run);
    }
    out
}

/// Number of permutations of `n` items with `k` inversions, for every `k`.
fn inversion_counts(n: usize) -> Vec<f64> {
    let mut counts = vec![1.0];
    for m in 2..=n {
        let mut next = vec![0.0; counts.len() + m - 1];
        for (k, c) in counts.iter().enumerate() {
            for j in 0..m {
                next[k + j] += c;
            }
        }
        counts = next;
    }
    counts
}
