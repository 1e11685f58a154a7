//! Multi-start ascent for `max_ω min_y Σ_j |y - x_j|^{-s}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::init::{initial_coords, InitKind};
use super::inner::{certify, descend, InnerOptions, Landscape};
use super::{PolarizationResult, SolverOptions, SolverStats};
use crate::error::{Error, Result};
use crate::geometry::{default_fill, dist2, lex_cmp, Configuration, DomainSet};
use crate::riesz::{log_potential_grad, RieszParam};
use crate::simplex_qp::simplex_qp;

/// Golden-ratio increment separating the restart seeds.
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Initial softmin temperature (on log-potential values) and number of doublings.
const BETA0: f64 = 16.0;
const DOUBLINGS: u32 = 8;

/// A tracked local minimizer of the potential and its log-value.
#[derive(Debug, Clone)]
struct Witness {
    y: Vec<f64>,
    v: f64,
}

struct Problem<'a> {
    domain: &'a DomainSet,
    s: f64,
    dim: usize,
    landscape: &'a Landscape,
    spacing: f64,
    max_keep: usize,
    /// `ln f` varies like `s ln(distance)`, so margins and temperatures are per unit of `s/4`.
    vscale: f64,
}

impl Problem<'_> {
    /// Local minimizers of `ln f` within `margin` of the lowest, lowest first.
    fn witnesses(&self, coords: &[f64], margin: f64) -> Vec<Witness> {
        let margin = margin * self.vscale;
        let minima = self.landscape.local_minima(coords, self.dim, self.s);
        let Some(&(v0, _)) = minima.first() else { return Vec::new() };
        let mut out: Vec<Witness> = Vec::new();
        let tie = (1e-6 * self.spacing).powi(2);
        for &(v, i) in minima.iter().take_while(|m| m.0 <= v0 + margin + self.vscale).take(2 * self.max_keep) {
            let _ = v;
            let mut y = self.landscape.mesh.node(i).to_vec();
            let v = descend(self.domain, coords, self.dim, self.s, &mut y, 30);
            if v.is_finite() && out.iter().all(|w| dist2(&w.y, &y) > tie) {
                out.push(Witness { y, v });
            }
        }
        out.sort_by(|a, b| a.v.total_cmp(&b.v).then_with(|| lex_cmp(&a.y, &b.y)));
        if let Some(vmin) = out.first().map(|w| w.v) {
            out.retain(|w| w.v <= vmin + margin);
        }
        out.truncate(self.max_keep);
        out
    }

    /// `∇_x ln f(y)` with respect to all points, into `out`.
    fn point_gradient(&self, coords: &[f64], y: &[f64], out: &mut [f64]) {
        let n = coords.len() / self.dim;
        let mut gy = vec![0.0; self.dim];
        let mut w = vec![0.0; n];
        log_potential_grad(coords, self.dim, y, self.s, &mut gy, Some(&mut w));
        for (j, x) in coords.chunks_exact(self.dim).enumerate() {
            let r2 = dist2(x, y);
            for k in 0..self.dim {
                out[j * self.dim + k] = self.s * w[j] * (y[k] - x[k]) / r2;
            }
        }
    }

    fn step(&self, coords: &[f64], direction: &[f64], scale: f64) -> Vec<f64> {
        let mut out: Vec<f64> = coords.iter().zip(direction).map(|(x, d)| x + scale * d).collect();
        for p in out.chunks_exact_mut(self.dim) {
            self.domain.project_in_place(p);
        }
        out
    }
}

fn softmin(ws: &[Witness], beta: f64) -> f64 {
    let vmin = ws[0].v;
    let sum: f64 = ws.iter().map(|w| (-beta * (w.v - vmin)).exp()).sum();
    vmin - sum.ln() / beta
}

/// Outcome of one restart.
struct Run {
    coords: Vec<f64>,
    v: f64,
    iterations: usize,
}

/// Softmin annealing, then active-set QP steps, then single-point exchanges.
fn ascend(p: &Problem, mut x: Vec<f64>, budget: usize) -> Run {
    let total = x.len();
    let mut iterations = 0;
    let mut ws = p.witnesses(&x, 0.15);
    if ws.is_empty() {
        return Run { coords: x, v: f64::NEG_INFINITY, iterations };
    }
    let mut best = Run { coords: x.clone(), v: ws[0].v, iterations: 0 };
    let mut grad = vec![0.0; total];
    let mut gk = vec![0.0; total];

    // Annealed softmin ascent with normalized steps.
    let per_stage = (budget * 6 / 10) / (DOUBLINGS as usize + 1);
    let mut tau = 0.25 * p.spacing;
    for stage in 0..=DOUBLINGS {
        let beta_n = BETA0 * 2f64.powi(stage as i32);
        let margin = (10.0 / beta_n).max(0.15);
        let beta = beta_n / p.vscale;
        ws = p.witnesses(&x, margin);
        tau = tau.max(1e-3 * p.spacing);
        for _ in 0..per_stage {
            iterations += 1;
            let vmin = ws[0].v;
            grad.iter_mut().for_each(|g| *g = 0.0);
            let norm: f64 = ws.iter().map(|w| (-beta * (w.v - vmin)).exp()).sum();
            for w in &ws {
                let pk = (-beta * (w.v - vmin)).exp() / norm;
                p.point_gradient(&x, &w.y, &mut gk);
                grad.iter_mut().zip(&gk).for_each(|(g, d)| *g += pk * d);
            }
            let gmax = grad.chunks_exact(p.dim).map(|g| g.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max);
            if gmax == 0.0 {
                break;
            }
            let trial = p.step(&x, &grad, tau / gmax);
            let wt = p.witnesses(&trial, margin);
            if !wt.is_empty() && softmin(&wt, beta) > softmin(&ws, beta) {
                x = trial;
                ws = wt;
                tau *= 1.3;
                if ws[0].v > best.v {
                    best = Run { coords: x.clone(), v: ws[0].v, iterations: 0 };
                }
            } else {
                tau *= 0.5;
                if tau < 1e-9 * p.spacing {
                    break;
                }
            }
        }
    }

    // Active-set polish from the best configuration so far.
    x = best.coords.clone();
    let qp_budget = budget * 35 / 100;
    iterations += polish(p, &mut x, &mut best, qp_budget);

    // Move the least-contributing point half the hole radius toward the witness.
    let remaining = budget.saturating_sub(iterations).max(3);
    for _ in 0..3.min(remaining) {
        iterations += 1;
        let ws = p.witnesses(&best.coords, 0.0);
        let Some(w) = ws.first() else { break };
        let mut gy = vec![0.0; p.dim];
        let mut weights = vec![0.0; total / p.dim];
        log_potential_grad(&best.coords, p.dim, &w.y, p.s, &mut gy, Some(&mut weights));
        let j = (0..weights.len()).min_by(|&a, &b| weights[a].total_cmp(&weights[b])).expect("nonempty");
        let gap = best.coords.chunks_exact(p.dim).map(|x| dist2(x, &w.y)).fold(f64::INFINITY, f64::min).sqrt();
        let xj = &best.coords[j * p.dim..(j + 1) * p.dim];
        let len = dist2(xj, &w.y).sqrt();
        if len == 0.0 {
            break;
        }
        let mut dir = vec![0.0; total];
        for k in 0..p.dim {
            dir[j * p.dim + k] = (w.y[k] - xj[k]) / len;
        }
        let mut trial = p.step(&best.coords, &dir, 0.5 * gap);
        let wt = p.witnesses(&trial, 0.15);
        if wt.first().is_some_and(|t| t.v > best.v) {
            let v = wt[0].v;
            best = Run { coords: trial.clone(), v, iterations: 0 };
            iterations += polish(p, &mut trial, &mut best, 20);
        }
    }
    best.iterations = iterations;
    best
}

/// Proximal max-min steps: maximize `min_k v_k + g_k·Δ - μ|Δ|²/2` through its simplex dual.
fn polish(p: &Problem, x: &mut Vec<f64>, best: &mut Run, budget: usize) -> usize {
    let total = x.len();
    let mut ws = p.witnesses(x, 0.15);
    if ws.is_empty() {
        return 0;
    }
    let mut mu = 0.0;
    let mut mu0 = 0.0;
    let mut used = 0;
    for _ in 0..budget {
        used += 1;
        let k = ws.len();
        let mut cols = vec![vec![0.0; total]; k];
        for (c, w) in cols.iter_mut().zip(&ws) {
            p.point_gradient(x, &w.y, c);
        }
        if mu == 0.0 {
            let gmax = cols.iter().flat_map(|c| c.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
            mu0 = gmax.max(1e-300) / (0.1 * p.spacing);
            mu = mu0;
        }
        let mut q = vec![0.0; k * k];
        for a in 0..k {
            for b in a..k {
                let v: f64 = cols[a].iter().zip(&cols[b]).map(|(u, w)| u * w).sum::<f64>() / mu;
                q[a * k + b] = v;
                q[b * k + a] = v;
            }
        }
        let c: Vec<f64> = ws.iter().map(|w| w.v - ws[0].v).collect();
        let lam = simplex_qp(&q, &c, 500, 1e-13);
        let mut delta = vec![0.0; total];
        for (l, col) in lam.iter().zip(&cols) {
            delta.iter_mut().zip(col).for_each(|(d, g)| *d += l * g / mu);
        }
        let trial = p.step(x, &delta, 1.0);
        let wt = p.witnesses(&trial, 0.15);
        if wt.first().is_some_and(|t| t.v > ws[0].v) {
            *x = trial;
            ws = wt;
            mu = (mu / 2.0).max(mu0 * 1e-6);
            if ws[0].v > best.v {
                *best = Run { coords: x.clone(), v: ws[0].v, iterations: 0 };
            }
        } else {
            mu *= 4.0;
            if mu > mu0 * 1e14 {
                break;
            }
        }
    }
    used
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    Ok(())
}

/// Closed forms: one point at the center of the domain's smallest enclosing ball, and
/// the collapsed configuration of the ball for `s ≤ d - 2`.
fn closed_form(domain: &DomainSet, n: usize, s: f64) -> Option<Configuration> {
    let d = domain.dim();
    let l = domain.ambient_dim();
    if matches!(domain, DomainSet::Ball { .. }) && s <= d as f64 - 2.0 {
        return Configuration::new(l, vec![0.0; l * n]).ok();
    }
    if n != 1 {
        return None;
    }
    let center = match domain {
        DomainSet::Cube { .. } => vec![0.5; l],
        DomainSet::Ball { .. } | DomainSet::Ellipsoid { .. } => vec![0.0; l],
        DomainSet::Sphere { .. } => {
            let mut c = vec![0.0; l];
            c[0] = -1.0;
            c
        }
        DomainSet::SphericalCap { .. } => {
            let mut c = vec![0.0; l];
            c[0] = 1.0;
            c
        }
    };
    Configuration::new(l, center).ok()
}

fn validate(domain: &DomainSet, n: usize, s: f64) -> Result<()> {
    domain.validate()?;
    check_n(n)?;
    let d = domain.dim() as f64;
    if matches!(domain, DomainSet::Ellipsoid { .. }) && s <= d - 2.0 {
        return Err(Error::InvalidRegime(format!(
            "s = {s} ≤ d - 2 on an ellipsoid: optimal configurations degenerate, not computed"
        )));
    }
    if matches!(domain, DomainSet::Ball { .. }) && s > 0.0 && s <= d - 2.0 {
        return Ok(());
    }
    RieszParam::new(domain, s).map(|_| ())
}

fn result_from(
    domain: &DomainSet,
    s: f64,
    cfg: Configuration,
    opts: &SolverOptions,
    landscape: &Landscape,
    fill: f64,
    mut stats: SolverStats,
) -> PolarizationResult {
    let inner_opts = InnerOptions { tol: opts.tol, fill: Some(fill), max_cells: opts.max_cells, ..InnerOptions::default() };
    let cert = certify(domain, &cfg, s, &inner_opts, landscape, fill);
    stats.cells = cert.cells;
    PolarizationResult {
        domain: domain.clone(),
        s,
        n: cfg.len(),
        value: cert.value,
        log_value: cert.log_value,
        bracket: (cert.lower.min(cert.value), cert.value),
        log_bracket: (cert.log_lower, cert.log_value),
        certified: cert.certified,
        witness: cert.witness,
        config: cfg,
        stats,
    }
}

/// Certified polarization of a given configuration.
pub fn evaluate(domain: &DomainSet, cfg: &Configuration, s: f64, opts: &SolverOptions) -> Result<PolarizationResult> {
    validate(domain, cfg.len(), s)?;
    cfg.check_in(domain, 1e-9)?;
    let fill = opts.fill.unwrap_or_else(|| default_fill(domain, cfg.len()));
    let landscape = Landscape::new(domain, fill)?;
    let stats = SolverStats { restarts: 0, iterations: 0, mesh_fill: fill, seed: opts.seed, cells: 0, closed_form: false };
    Ok(result_from(domain, s, cfg.clone(), opts, &landscape, fill, stats))
}

/// Approximates `𝒫_s(A; N) = max_ω P_s(A; ω)` by multi-start ascent and certifies the
/// inner minimum of the returned configuration.
pub fn maximize_polarization(domain: &DomainSet, n: usize, s: f64, opts: &SolverOptions) -> Result<PolarizationResult> {
    maximize_from(domain, n, s, opts, None)
}

fn maximize_from(
    domain: &DomainSet,
    n: usize,
    s: f64,
    opts: &SolverOptions,
    warm: Option<&Configuration>,
) -> Result<PolarizationResult> {
    validate(domain, n, s)?;
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let fill = opts.fill.unwrap_or_else(|| default_fill(domain, n));
    let landscape = Landscape::new(domain, fill)?;
    if let Some(cfg) = closed_form(domain, n, s) {
        let stats = SolverStats { restarts: 0, iterations: 0, mesh_fill: fill, seed: opts.seed, cells: 0, closed_form: true };
        return Ok(result_from(domain, s, cfg, opts, &landscape, fill, stats));
    }
    let dim = domain.ambient_dim();
    let d = domain.dim() as f64;
    let problem = Problem {
        domain,
        s,
        dim,
        landscape: &landscape,
        spacing: 0.5 * domain.diameter() * (n as f64).powf(-1.0 / d),
        max_keep: 4 * n + 8,
        vscale: (s / 4.0).max(1.0),
    };
    let runs: Vec<Run> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add((r as u64).wrapping_mul(SEED_STRIDE)));
            let x0 = match (r, warm) {
                (0, Some(w)) => grow_greedily(&problem, w.coords().to_vec(), n),
                _ => initial_coords(domain, n, InitKind::for_restart(r), &landscape.mesh, &mut rng),
            };
            ascend(&problem, x0, opts.budget)
        })
        .collect();
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let mut best: Option<(f64, Configuration)> = None;
    for run in runs {
        let cfg = Configuration::new(dim, run.coords).expect("finite coordinates").canonical();
        let better = match &best {
            None => true,
            Some((v, c)) => {
                let tie = (run.v - v).abs() <= 1e-12 * v.abs().max(1.0);
                if tie {
                    lex_cmp(cfg.coords(), c.coords()).is_lt()
                } else {
                    run.v > *v
                }
            }
        };
        if better {
            best = Some((run.v, cfg));
        }
    }
    let (_, cfg) = best.expect("at least one restart");
    let stats = SolverStats { restarts: opts.restarts, iterations, mesh_fill: fill, seed: opts.seed, cells: 0, closed_form: false };
    Ok(result_from(domain, s, cfg, opts, &landscape, fill, stats))
}

/// Adds points one at a time at the lowest local minimizer of the current potential.
fn grow_greedily(p: &Problem, mut coords: Vec<f64>, n: usize) -> Vec<f64> {
    while coords.len() < n * p.dim {
        let Some(&(_, i)) = p.landscape.local_minima(&coords, p.dim, p.s).first() else { break };
        let mut y = p.landscape.mesh.node(i).to_vec();
        descend(p.domain, &coords, p.dim, p.s, &mut y, 30);
        coords.extend_from_slice(&y);
    }
    coords.truncate(n * p.dim);
    coords
}

/// Runs [`maximize_polarization`] over an increasing list of N. The first restart of
/// each N starts from the previous optimum grown greedily at potential minimizers.
pub fn polarization_curve(domain: &DomainSet, s: f64, ns: &[usize], opts: &SolverOptions) -> Result<Vec<PolarizationResult>> {
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("N list must be strictly increasing".into()));
    }
    let mut out: Vec<PolarizationResult> = Vec::with_capacity(ns.len());
    for &n in ns {
        let warm = out.last().map(|prev| prev.config.clone());
        out.push(maximize_from(domain, n, s, opts, warm.as_ref())?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact `min_{y∈[0,1]} |y-a|^{-s} + |y-b|^{-s}` for `a < b`: the sum is convex
    /// between the points, so the candidates are the endpoints and the root of the
    /// derivative in `(a, b)`.
    fn segment_min(a: f64, b: f64, s: f64) -> f64 {
        let f = |y: f64| (y - a).abs().powf(-s) + (y - b).abs().powf(-s);
        let df = |y: f64| -s * (y - a).powf(-s - 1.0) + s * (b - y).powf(-s - 1.0);
        let (mut lo, mut hi) = (a, b);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if df(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        f(0.0).min(f(1.0)).min(f(0.5 * (lo + hi)))
    }

    fn opts() -> SolverOptions {
        SolverOptions { restarts: 4, budget: 400, ..SolverOptions::default() }
    }

    #[test]
    fn two_points_on_segment_match_grid_oracle() {
        for s in [2.0, 3.0, 6.0] {
            let step = 5e-3;
            let m = (1.0 / step) as usize;
            let mut best = (0.0f64, 0.0, 1.0);
            for i in 0..=m {
                for j in i + 1..=m {
                    let (a, b) = (i as f64 * step, j as f64 * step);
                    let v = segment_min(a, b, s);
                    if v > best.0 {
                        best = (v, a, b);
                    }
                }
            }
            // Compass search from the best grid pair.
            let mut h = step;
            while h > 1e-12 {
                let (v0, a, b) = best;
                let mut moved = false;
                for (da, db) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, -h), (-h, h), (h, h), (-h, -h)] {
                    let (na, nb) = (a + da, b + db);
                    if 0.0 <= na && na < nb && nb <= 1.0 {
                        let v = segment_min(na, nb, s);
                        if v > v0 {
                            best = (v, na, nb);
                            moved = true;
                            break;
                        }
                    }
                }
                if !moved {
                    h *= 0.5;
                }
            }
            let oracle = best.0;
            let r = maximize_polarization(&DomainSet::cube(1), 2, s, &opts()).unwrap();
            assert!(r.certified);
            assert!((r.value - oracle).abs() <= 1e-6 * oracle, "s={s}: {} vs {oracle}", r.value);
            let x = r.config.coords();
            assert!((x[0] + x[1] - 1.0).abs() < 1e-3, "{x:?}");
        }
    }

    #[test]
    fn single_point_closed_forms() {
        for s in [3.0, 5.0, 10.0] {
            let r = maximize_polarization(&DomainSet::cube(1), 1, s, &opts()).unwrap();
            assert!((r.value - 2f64.powf(s)).abs() <= 1e-9 * 2f64.powf(s));
            assert_eq!(r.config.coords(), &[0.5]);
            assert!(r.stats.closed_form);
        }
        for d in [2, 3] {
            let r = maximize_polarization(&DomainSet::ball(d), 1, d as f64 + 1.0, &opts()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12);
        }
        let r = maximize_polarization(&DomainSet::sphere(2), 1, 4.0, &opts()).unwrap();
        assert!((r.value - 0.25f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn collapsed_ball_configuration() {
        let r = maximize_polarization(&DomainSet::ball(4), 3, 1.5, &opts()).unwrap();
        assert!(r.config.coords().iter().all(|&x| x == 0.0));
        assert!((r.value - 3.0).abs() < 1e-12);
        let e = DomainSet::ellipsoid(vec![1.0, 0.8, 0.6, 0.5]).unwrap();
        assert!(matches!(maximize_polarization(&e, 3, 1.5, &opts()), Err(Error::InvalidRegime(_))));
    }

    #[test]
    fn regimes_and_arguments() {
        assert!(maximize_polarization(&DomainSet::cube(2), 3, 1.5, &opts()).is_err());
        assert!(maximize_polarization(&DomainSet::cube(2), 0, 3.0, &opts()).is_err());
        let zero = SolverOptions { restarts: 0, ..opts() };
        assert!(maximize_polarization(&DomainSet::cube(2), 2, 3.0, &zero).is_err());
        // Sub-critical exponents are allowed on spheres.
        assert!(maximize_polarization(&DomainSet::sphere(2), 2, 1.5, &opts()).is_ok());
    }

    #[test]
    fn antipodal_pair_on_circle() {
        let r = maximize_polarization(&DomainSet::sphere(1), 2, 3.0, &opts()).unwrap();
        let x = r.config.coords();
        assert!((x[0] + x[2]).abs() < 1e-3 && (x[1] + x[3]).abs() < 1e-3, "{x:?}");
        // Worst point is a quarter turn away: two chords of length √2.
        assert!((r.value - 2.0 * 2f64.powf(-1.5)).abs() < 1e-4);
    }

    #[test]
    fn evaluate_matches_solver_value() {
        let r = maximize_polarization(&DomainSet::cube(2), 3, 4.0, &opts()).unwrap();
        let e = evaluate(&DomainSet::cube(2), &r.config, 4.0, &opts()).unwrap();
        assert!((e.value - r.value).abs() <= 1e-9 * r.value);
        assert!(r.bracket.0 <= r.value && r.bracket.1 == r.value);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = maximize_polarization(&DomainSet::ball(2), 5, 4.0, &opts()).unwrap();
        let b = maximize_polarization(&DomainSet::ball(2), 5, 4.0, &opts()).unwrap();
        assert_eq!(a.config, b.config);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn curve_is_increasing() {
        let runs = polarization_curve(&DomainSet::cube(1), 3.0, &[2, 3, 4, 5], &opts()).unwrap();
        assert!(runs.windows(2).all(|w| w[1].value > w[0].value));
        assert!(polarization_curve(&DomainSet::cube(1), 3.0, &[3, 2], &opts()).is_err());
    }
}
