//! Extrapolation of large-N and large-s limits from finite runs: the polarization
//! constant `σ_{s,d}`, the covering constant `lim N^{1/d} ρ_A(N)`, the s-th-root chain
//! linking them, and empirical constants of the separation and covering bounds.

use serde::{Deserialize, Serialize};

use crate::covering::{
    best_covering, boundary_min_scaled, corner_min_scaled, covering_radius, eta_star, weak_separation_bound,
    BestCovering, CoverOptions,
};
use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, DomainSet};
use crate::polarization::{polarization_curve, PolarizationResult, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    PowerFit,
    Richardson,
    LastValue,
}

/// Fit of `value(n) = L + a n^{-p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub samples: Vec<(f64, f64)>,
    pub limit: f64,
    pub a: f64,
    pub p: f64,
    /// Root-mean-square relative error of the model over the samples.
    pub residual: f64,
    pub method: FitMethod,
}

/// Options of [`fit_limit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    /// Power-fit residual above which the Richardson fallback is used.
    pub max_residual: f64,
    /// Search interval for the exponent.
    pub p_range: (f64, f64),
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_residual: 0.05, p_range: (0.02, 6.0) }
    }
}

/// Least squares in `(L, a)` for fixed `p`, with the relative RMS residual.
fn linear_fit(samples: &[(f64, f64)], p: f64) -> (f64, f64, f64) {
    // Weighted by 1/value so the residual is relative.
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(n, v) in samples {
        let w = 1.0 / (v * v).max(1e-300);
        let t = n.powf(-p);
        s11 += w;
        s12 += w * t;
        s22 += w * t * t;
        b1 += w * v;
        b2 += w * v * t;
    }
    let det = s11 * s22 - s12 * s12;
    let (l, a) = if det.abs() <= 1e-14 * s11 * s22 {
        (b1 / s11, 0.0)
    } else {
        ((b1 * s22 - b2 * s12) / det, (s11 * b2 - s12 * b1) / det)
    };
    let rms = (samples
        .iter()
        .map(|&(n, v)| {
            let e = (l + a * n.powf(-p) - v) / v.abs().max(1e-300);
            e * e
        })
        .sum::<f64>()
        / samples.len() as f64)
        .sqrt();
    (l, a, rms)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

/// Extrapolates `lim_{n→∞} value(n)` from at least four samples with strictly increasing `n`.
///
/// The exponent is found by golden-section search on the residual of the linear
/// least-squares fit in `(L, a)`, started from the grid `{1/2, 1, 2}/d` and a log-spaced
/// scan of the exponent range. When the best residual exceeds `max_residual`, or the
/// fitted limit lies more than four sample spans from the last sample, the
/// Aitken/Richardson limit of the last three samples is returned instead.
pub fn fit_limit(samples: &[(f64, f64)], d: usize, opts: &FitOptions) -> Result<AsymptoticFit> {
    if samples.len() < 4 {
        return Err(Error::NotEnoughSamples { needed: 4, got: samples.len() });
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) || samples.iter().any(|s| !(s.0 > 0.0) || !s.1.is_finite()) {
        return Err(Error::InvalidArgument("samples need positive, strictly increasing n and finite values".into()));
    }
    let (p_lo, p_hi) = opts.p_range;
    let d = d.max(1) as f64;
    let mut starts: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|k| k / d).collect();
    starts.extend((0..=40).map(|i| p_lo * (p_hi / p_lo).powf(i as f64 / 40.0)));
    starts.sort_by(|a, b| a.total_cmp(b));
    let resid = |p: f64| linear_fit(samples, p).2;
    let mut best_p = starts[0];
    let mut best_r = f64::INFINITY;
    for (i, &p) in starts.iter().enumerate() {
        let r = resid(p);
        if r < best_r {
            best_r = r;
            best_p = starts[i];
        }
    }
    let i = starts.iter().position(|&p| p == best_p).expect("present");
    let lo = if i == 0 { p_lo } else { starts[i - 1] };
    let hi = if i + 1 == starts.len() { p_hi } else { starts[i + 1] };
    let p = golden_min(resid, lo, hi);
    let (p, (l, a, r)) = if resid(p) <= best_r { (p, linear_fit(samples, p)) } else { (best_p, linear_fit(samples, best_p)) };
    // Flat, noisy samples admit tiny exponents whose limits run far off; keep the
    // extrapolation within a few sample spans of the last value.
    let last = samples[samples.len() - 1].1;
    let span = samples.iter().map(|s| (s.1 - last).abs()).fold(0.0, f64::max);
    if r <= opts.max_residual && l.is_finite() && p > 0.0 && (l - last).abs() <= 4.0 * span + 1e-12 * last.abs() {
        return Ok(AsymptoticFit { samples: samples.to_vec(), limit: l, a, p, residual: r, method: FitMethod::PowerFit });
    }
    let k = samples.len();
    let (x1, x2, x3) = (samples[k - 3].1, samples[k - 2].1, samples[k - 1].1);
    let denom = (x3 - x2) - (x2 - x1);
    let aitken = x3 - (x3 - x2) * (x3 - x2) / denom;
    if denom.abs() > 1e-14 * x3.abs() && aitken.is_finite() && (aitken - x3).abs() <= (x3 - x1).abs().max(1e-300) * 4.0 {
        Ok(AsymptoticFit { samples: samples.to_vec(), limit: aitken, a: 0.0, p: 0.0, residual: r, method: FitMethod::Richardson })
    } else {
        Ok(AsymptoticFit { samples: samples.to_vec(), limit: x3, a: 0.0, p: 0.0, residual: r, method: FitMethod::LastValue })
    }
}

/// `σ̂` together with the runs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaEstimate {
    pub s: f64,
    /// Fit of `𝒫̂_s(A;N) (H_d(A)/N)^{s/d}`, whose limit is `σ̂`.
    pub fit: AsymptoticFit,
    pub runs: Vec<PolarizationResult>,
}

/// Estimates `σ_{s,d} = lim 𝒫_s(A;N) (H_d(A)/N)^{s/d}` for `s > d`.
pub fn estimate_sigma(domain: &DomainSet, s: f64, ns: &[usize], opts: &SolverOptions) -> Result<SigmaEstimate> {
    let d = domain.dim();
    if !(s > d as f64) {
        return Err(Error::InvalidRegime(format!("σ requires s > d, got s = {s}, d = {d}")));
    }
    let runs = polarization_curve(domain, s, ns, opts)?;
    let h = domain.hausdorff_measure();
    let samples: Vec<(f64, f64)> =
        runs.iter().map(|r| (r.n as f64, (r.log_value + (s / d as f64) * (h.ln() - (r.n as f64).ln())).exp())).collect();
    let fit = fit_limit(&samples, d, &FitOptions::default())?;
    Ok(SigmaEstimate { s, fit, runs })
}

/// `lim N^{1/d} ρ̂_A(N)` together with the coverings used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringConstantEstimate {
    pub fit: AsymptoticFit,
    pub runs: Vec<BestCovering>,
}

/// Extrapolates `N^{1/d} ρ̂_A(N)` from [`best_covering`] runs.
pub fn estimate_covering_constant(domain: &DomainSet, ns: &[usize], opts: &CoverOptions) -> Result<CoveringConstantEstimate> {
    let d = domain.dim();
    let runs: Vec<BestCovering> = ns.iter().map(|&n| best_covering(domain, n, opts)).collect::<Result<_>>()?;
    let samples: Vec<(f64, f64)> =
        runs.iter().map(|b| (b.config.len() as f64, (b.config.len() as f64).powf(1.0 / d as f64) * b.radius.rho)).collect();
    let fit = fit_limit(&samples, d, &FitOptions::default())?;
    Ok(CoveringConstantEstimate { fit, runs })
}

/// `(V_d/Γ_d)^{1/d}` where the thinnest covering density `Γ_d` is known (`d ≤ 2`).
pub fn chain_target(d: usize) -> Option<f64> {
    let gamma = match d {
        1 => 1.0,
        2 => 2.0 * std::f64::consts::PI / 27f64.sqrt(),
        _ => return None,
    };
    Some((unit_ball_volume(d) / gamma).powf(1.0 / d as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub s: f64,
    pub sigma: f64,
    /// `σ̂_s^{1/s} H_d(A)^{-1/d}`.
    pub sigma_root: f64,
    /// `|sigma_root - covering_leg|`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTable {
    pub d: usize,
    /// `1 / lim N^{1/d} ρ̂_A(N)`.
    pub covering_leg: f64,
    /// `(V_d/Γ_d)^{1/d} H_d(A)^{-1/d}` when known.
    pub target: Option<f64>,
    pub rows: Vec<ChainRow>,
    /// True when the gaps do not increase along the s list.
    pub gap_shrinks: bool,
    pub sigma_fits: Vec<SigmaEstimate>,
    pub covering_fit: CoveringConstantEstimate,
}

/// Both legs of the s-th-root chain: `(σ̂_s/H^{s/d})^{1/s}` for each s and
/// `1/lim N^{1/d} ρ̂_A(N)`.
pub fn sth_root_chain(
    domain: &DomainSet,
    s_list: &[f64],
    ns: &[usize],
    solver: &SolverOptions,
    cover: &CoverOptions,
) -> Result<ChainTable> {
    if s_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("s list must be strictly increasing".into()));
    }
    let d = domain.dim();
    let h = domain.hausdorff_measure();
    let covering_fit = estimate_covering_constant(domain, ns, cover)?;
    let covering_leg = 1.0 / covering_fit.fit.limit;
    let mut rows = Vec::new();
    let mut sigma_fits = Vec::new();
    for &s in s_list {
        let est = estimate_sigma(domain, s, ns, solver)?;
        let sigma = est.fit.limit;
        let sigma_root = sigma.powf(1.0 / s) * h.powf(-1.0 / d as f64);
        rows.push(ChainRow { s, sigma, sigma_root, gap: (sigma_root - covering_leg).abs() });
        sigma_fits.push(est);
    }
    let gap_shrinks = rows.windows(2).all(|w| w[1].gap <= w[0].gap);
    let target = chain_target(d).map(|t| t * h.powf(-1.0 / d as f64));
    Ok(ChainTable { d, covering_leg, target, rows, gap_shrinks, sigma_fits, covering_fit })
}

/// Empirical constants of the separation and covering estimates over a set of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsProfile {
    /// `min N^{1/d} |y* - nearest point|`.
    pub c_hat: f64,
    /// `max 𝒫̂ / N^{s/d}`.
    pub big_c_hat: f64,
    /// `min 𝒫̂ / N^{s/d}`.
    pub p_hat: f64,
    /// `max N^{1/d} ρ_A(ω)`.
    pub r_hat: f64,
    /// Boundary repulsion: `min dist(x, ∂A) N^{2/d}` for smooth bodies and the scaled
    /// corner statistic for the cube; `None` for spheres and caps.
    pub b_hat: Option<f64>,
    /// `min η*` over the runs with at least `2d` points.
    pub eta_hat: Option<f64>,
    /// Geometric constant chosen so the covering bound is attained by the smallest-N run.
    pub c_d: f64,
    /// Covering bound `(7^s C_d M s / (5^s p̂ (s-d) η̂^d))^{1/(s-d)}`.
    pub r_formula: f64,
    /// `r_hat ≤ r_formula`.
    pub formula_holds: bool,
}

/// Empirical constants from runs that share `A` and `s > d`.
pub fn bounds_profile(runs: &[PolarizationResult]) -> Result<BoundsProfile> {
    let first = runs.first().ok_or_else(|| Error::InvalidArgument("empty run archive".into()))?;
    let domain = &first.domain;
    let s = first.s;
    if runs.iter().any(|r| r.domain != *domain || r.s != s) {
        return Err(Error::InvalidArgument("runs must share domain and s".into()));
    }
    let d = domain.dim();
    let df = d as f64;
    if !(s > df) {
        return Err(Error::InvalidRegime(format!("bounds profile needs s > d, got s = {s}")));
    }
    let scale = |n: usize, e: f64| (n as f64).powf(e);
    let mut c_hat = f64::INFINITY;
    let mut big_c = 0.0f64;
    let mut p_hat = f64::INFINITY;
    let mut r_hat = 0.0f64;
    let mut eta_hat: Option<f64> = None;
    let mut b_hat: Option<f64> = None;
    let mut smallest: Option<(usize, f64, f64)> = None;
    for r in runs {
        let norm = (r.log_value - (s / df) * (r.n as f64).ln()).exp();
        c_hat = c_hat.min(r.scaled_witness_gap());
        big_c = big_c.max(norm);
        p_hat = p_hat.min(norm);
        let rho = covering_radius(domain, &r.config, 1e-6 * domain.diameter())?.upper * scale(r.n, 1.0 / df);
        r_hat = r_hat.max(rho);
        if let Some(eta) = eta_star(domain, &r.config) {
            eta_hat = Some(eta_hat.map_or(eta, |e: f64| e.min(eta)));
        }
        let b = match domain {
            DomainSet::Cube { .. } => corner_min_scaled(domain, &r.config),
            _ => boundary_min_scaled(domain, &r.config),
        };
        if let Some(b) = b {
            b_hat = Some(b_hat.map_or(b, |x: f64| x.min(b)));
        }
        if smallest.is_none_or(|(n, _, _)| r.n < n) {
            smallest = Some((r.n, rho, norm));
        }
    }
    let m = weak_separation_bound(d) as f64;
    // log of 7^s M s / (5^s (s-d) η^d) / p, so that R^{s-d} = C_d · exp(base).
    let log_base = |p: f64, eta: f64| s * (7.0f64 / 5.0).ln() + m.ln() + s.ln() - (s - df).ln() - p.ln() - df * eta.ln();
    let eta_for_formula = eta_hat.unwrap_or(1.0);
    let (_, rho0, p0) = smallest.expect("nonempty");
    let log_c_d = (s - df) * rho0.ln() - log_base(p0, eta_for_formula);
    let r_formula = ((log_c_d + log_base(p_hat, eta_for_formula)) / (s - df)).exp();
    Ok(BoundsProfile {
        c_hat,
        big_c_hat: big_c,
        p_hat,
        r_hat,
        b_hat,
        eta_hat,
        c_d: log_c_d.exp(),
        r_formula,
        formula_holds: r_hat <= r_formula * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law() {
        let samples: Vec<(f64, f64)> = [4.0, 8.0, 16.0, 32.0, 64.0].iter().map(|&n| (n, 3.0 + 2.0 / n)).collect();
        let f = fit_limit(&samples, 1, &FitOptions::default()).unwrap();
        assert_eq!(f.method, FitMethod::PowerFit);
        assert!((f.limit - 3.0).abs() < 1e-9 && (f.p - 1.0).abs() < 1e-6 && f.residual < 1e-10, "{f:?}");
    }

    #[test]
    fn constant_sequence() {
        let samples: Vec<(f64, f64)> = (1..6).map(|n| (n as f64, 5.0)).collect();
        let f = fit_limit(&samples, 2, &FitOptions::default()).unwrap();
        assert!((f.limit - 5.0).abs() < 1e-12 && f.a.abs() < 1e-9);
    }

    #[test]
    fn too_few_samples() {
        assert!(fit_limit(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)], 1, &FitOptions::default()).is_err());
        assert!(fit_limit(&[(1.0, 1.0), (3.0, 1.0), (2.0, 1.0), (4.0, 1.0)], 1, &FitOptions::default()).is_err());
    }

    #[test]
    fn richardson_fallback() {
        // Oscillating data fit no power law; Aitken on the tail recovers the geometric limit.
        let samples = vec![(1.0, 9.0), (2.0, 1.0), (3.0, 2.0 + 1.0), (4.0, 2.0 + 0.5), (5.0, 2.0 + 0.25)];
        let f = fit_limit(&samples, 1, &FitOptions { max_residual: 1e-6, ..FitOptions::default() }).unwrap();
        assert_eq!(f.method, FitMethod::Richardson);
        assert!((f.limit - 2.0).abs() < 1e-12);
    }

    #[test]
    fn flat_noisy_samples_stay_near_the_data() {
        let samples = vec![(16.0, 0.6777), (24.0, 0.6775), (32.0, 0.6775), (48.0, 0.6650), (64.0, 0.6636)];
        let f = fit_limit(&samples, 2, &FitOptions::default()).unwrap();
        assert!((f.limit - 0.6636).abs() <= 4.0 * 0.0141, "{f:?}");
    }

    #[test]
    fn chain_targets() {
        assert!((chain_target(1).unwrap() - 2.0).abs() < 1e-15);
        assert!((chain_target(2).unwrap() - 27f64.powf(0.25) / 2f64.sqrt()).abs() < 1e-12);
        assert!(chain_target(3).is_none());
    }

    #[test]
    fn profile_on_a_short_curve() {
        let opts = SolverOptions { restarts: 3, budget: 300, ..SolverOptions::default() };
        let runs = polarization_curve(&DomainSet::cube(1), 3.0, &[4, 6, 8], &opts).unwrap();
        let b = bounds_profile(&runs).unwrap();
        assert!(b.c_hat > 0.0 && b.p_hat <= b.big_c_hat && b.r_hat > 0.0 && b.b_hat.unwrap() > 0.0);
        // Duality: ρ^{-s} ≤ 𝒫 for every run.
        for r in &runs {
            let rho = covering_radius(&r.domain, &r.config, 1e-9).unwrap().upper;
            assert!(rho.powf(-3.0) <= r.bracket.1 * (1.0 + 1e-9));
        }
        assert!(bounds_profile(&[]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn noiseless_power_laws_recovered(l in 0.5f64..5.0, a in -3.0f64..3.0, p in 0.3f64..3.0) {
            let samples: Vec<(f64, f64)> = [8.0, 12.0, 16.0, 24.0, 32.0, 48.0].iter().map(|&n: &f64| (n, l + a * n.powf(-p))).collect();
            let f = fit_limit(&samples, 1, &FitOptions::default()).unwrap();
            prop_assert!((f.limit - l).abs() <= 1e-8 * l, "{:?}", f);
        }
    }
}
