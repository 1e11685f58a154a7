//! Covering radius, separation, weak separation, best coverings and
//! equidistribution diagnostics of point configurations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    build_mesh, cap_area, dist, dist2, dot, norm, unit_ball_volume, Cell, CellGeom, Configuration, DomainSet, Mesh,
    SpatialHash,
};
use crate::meb::{fits_in_radius, meb_radius, min_enclosing_ball};
use crate::quad;
use crate::square::square_minimax;

/// Certified covering radius of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringRadius {
    /// Largest `min_j |y - x_j|` found; a lower bound on the covering radius.
    pub rho: f64,
    /// Certified upper bound.
    pub upper: f64,
    /// Point of the domain attaining `rho`.
    pub farthest_point: Vec<f64>,
    pub certified: bool,
}

struct Entry {
    ub: f64,
    seq: usize,
    cell: Cell,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub.total_cmp(&other.ub).then(other.seq.cmp(&self.seq))
    }
}

/// Upper bound on `|y - x|` over the part of the cell inside the domain.
fn far_bound(domain: &DomainSet, cell: &Cell, geom: &CellGeom, x: &[f64]) -> f64 {
    let (_, far) = cell.dist_range(geom, x);
    // |y-x|² = |y-c|² + 2(c-x)·(y-c) + |c-x|² with the linear term bounded over the cell.
    let xc: Vec<f64> = x.iter().zip(&geom.center).map(|(a, c)| a - c).collect();
    let quad = geom.radius * geom.radius + dot(&xc, &xc) - 2.0 * cell.linear_lower(domain, geom, &xc);
    let mut best = far.min(quad.max(0.0).sqrt());
    if !domain.is_body() {
        // On the unit sphere |y-x|² = 2 - 2 y·x.
        let lin = dot(&geom.center, x) + cell.linear_lower(domain, geom, x);
        best = best.min((2.0 - 2.0 * lin).max(0.0).sqrt());
    }
    best
}

fn min_dist(coords: &[f64], dim: usize, y: &[f64]) -> f64 {
    nearest(coords, dim, y).1
}

fn nearest(coords: &[f64], dim: usize, y: &[f64]) -> (usize, f64) {
    let (j, d2) = coords
        .chunks_exact(dim)
        .map(|x| dist2(x, y))
        .enumerate()
        .fold((0, f64::INFINITY), |b, (j, d2)| if d2 < b.1 { (j, d2) } else { b });
    (j, d2.sqrt())
}

/// The cell representative and its push by the cell radius away from its nearest
/// point, projected onto the domain; the push lands exactly on corners and rims.
fn probes(domain: &DomainSet, geom: &CellGeom, coords: &[f64], dim: usize) -> [(Vec<f64>, f64); 2] {
    let (j, g) = nearest(coords, dim, &geom.rep);
    let x = &coords[j * dim..(j + 1) * dim];
    let mut y: Vec<f64> = if g > 0.0 {
        geom.rep.iter().zip(x).map(|(r, x)| r + geom.radius * (r - x) / g).collect()
    } else {
        geom.rep.clone()
    };
    domain.project_in_place(&mut y);
    let gy = min_dist(coords, dim, &y);
    [(geom.rep.clone(), g), (y, gy)]
}

/// `ρ_A(ω) = max_{y∈A} min_j |y - x_j|` by branch-and-bound, to absolute tolerance `tol`.
pub fn covering_radius(domain: &DomainSet, cfg: &Configuration, tol: f64) -> Result<CoveringRadius> {
    covering_radius_with(domain, cfg, tol, 2_000_000)
}

pub(crate) fn covering_radius_with(
    domain: &DomainSet,
    cfg: &Configuration,
    tol: f64,
    max_cells: usize,
) -> Result<CoveringRadius> {
    if cfg.is_empty() {
        return Err(Error::InvalidArgument("covering radius of an empty configuration".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    cfg.check_in(domain, 1e-9)?;
    let dim = cfg.dim();
    let coords = cfg.coords();
    let d = domain.dim() as f64;
    let h = (0.5 * (cfg.len() as f64).powf(-1.0 / d)).min(0.2) * domain.diameter();

    let mut best = f64::NEG_INFINITY;
    let mut witness = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut evaluated = 0usize;
    let mut consider = |cell: Cell, heap: &mut BinaryHeap<Entry>, best: &mut f64, witness: &mut Vec<f64>| -> usize {
        let Some(geom) = cell.geom(domain) else { return 0 };
        for (y, g) in probes(domain, &geom, coords, dim) {
            if g > *best {
                *best = g;
                *witness = y;
            }
        }
        let ub = coords
            .chunks_exact(dim)
            .map(|x| far_bound(domain, &cell, &geom, x))
            .fold(f64::INFINITY, f64::min);
        if ub > *best {
            seq += 1;
            heap.push(Entry { ub, seq, cell });
        }
        1
    };
    for cell in Cell::initial(domain, h) {
        evaluated += consider(cell, &mut heap, &mut best, &mut witness);
    }
    let mut upper;
    let certified;
    loop {
        let Some(top) = heap.peek() else {
            upper = best;
            certified = true;
            break;
        };
        upper = top.ub.max(best);
        if top.ub - best <= tol {
            certified = true;
            break;
        }
        if top.cell.depth >= 40 || evaluated >= max_cells {
            certified = false;
            break;
        }
        let top = heap.pop().expect("peeked");
        for child in top.cell.children() {
            evaluated += consider(child, &mut heap, &mut best, &mut witness);
        }
    }
    Ok(CoveringRadius { rho: best, upper, farthest_point: witness, certified })
}

/// Minimum pairwise distance `δ(ω)`; zero exactly when a point is repeated.
pub fn separation(cfg: &Configuration) -> Result<f64> {
    let n = cfg.len();
    if n < 2 {
        return Err(Error::NotEnoughSamples { needed: 2, got: n });
    }
    let dim = cfg.dim();
    if n <= 2000 {
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                best = best.min(dist2(cfg.point(i), cfg.point(j)));
            }
        }
        return Ok(best.sqrt());
    }
    // Bucket by a cell size that leaves a few points per bucket, then shrink the search radius.
    let lo: Vec<f64> = (0..dim).map(|k| cfg.points().map(|p| p[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..dim).map(|k| cfg.points().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let extent = dist(&lo, &hi).max(1e-300);
    let cell = extent * (n as f64).powf(-1.0 / dim as f64);
    let hash = SpatialHash::new(dim, cfg.coords(), cell);
    let mut best = f64::INFINITY;
    for i in 0..n {
        let mut r = cell;
        loop {
            let near: Vec<usize> = hash.within(cfg.point(i), r).into_iter().filter(|&j| j != i).collect();
            if !near.is_empty() || r > extent {
                for j in near {
                    best = best.min(dist(cfg.point(i), cfg.point(j)));
                }
                break;
            }
            r *= 2.0;
        }
    }
    Ok(best)
}

/// Points (indices) within `2r` of point `i` with larger index, in index order.
fn later_neighbors(cfg: &Configuration, i: usize, r: f64) -> Vec<usize> {
    (i + 1..cfg.len()).filter(|&j| dist(cfg.point(i), cfg.point(j)) <= 2.0 * r * (1.0 + 1e-12)).collect()
}

fn grow(cfg: &Configuration, subset: &mut Vec<usize>, cands: &[usize], r: f64, best: &mut usize) {
    *best = (*best).max(subset.len());
    for (k, &c) in cands.iter().enumerate() {
        if subset.len() + cands.len() - k <= *best {
            return;
        }
        subset.push(c);
        let pts: Vec<&[f64]> = subset.iter().map(|&i| cfg.point(i)).collect();
        if fits_in_radius(&pts, r) {
            let rest: Vec<usize> = cands[k + 1..]
                .iter()
                .copied()
                .filter(|&j| dist(cfg.point(c), cfg.point(j)) <= 2.0 * r * (1.0 + 1e-12))
                .collect();
            grow(cfg, subset, &rest, r, best);
        }
        subset.pop();
    }
}

/// `max_{z∈R^ℓ} #(ω ∩ B(z, r))` with the closed ball; repeated points count separately.
///
/// A subset fits in some ball of radius `r` exactly when its minimal enclosing ball
/// does, so the search runs over subsets with branch-and-bound.
pub fn weak_separation_count(cfg: &Configuration, r: f64) -> usize {
    if cfg.is_empty() {
        return 0;
    }
    if !(r > 0.0) {
        // Only coincident points share a ball of radius zero.
        let mut pts = cfg.to_points();
        pts.sort_by(|a, b| crate::geometry::lex_cmp(a, b));
        let mut best = 1;
        let mut run = 1;
        for w in pts.windows(2) {
            run = if w[0] == w[1] { run + 1 } else { 1 };
            best = best.max(run);
        }
        return best;
    }
    let mut best = 1;
    for i in 0..cfg.len() {
        let cands = later_neighbors(cfg, i, r);
        if cands.len() < best {
            continue;
        }
        let mut subset = vec![i];
        grow(cfg, &mut subset, &cands, r, &mut best);
    }
    best
}

/// Smallest minimal-enclosing-ball radius over all `k`-point subsets (`+∞` if `k > N`).
pub fn min_subset_radius(cfg: &Configuration, k: usize) -> f64 {
    let n = cfg.len();
    if k > n {
        return f64::INFINITY;
    }
    if k <= 1 {
        return 0.0;
    }
    // Start from the k-1 nearest neighbours of every point.
    let mut bound = f64::INFINITY;
    for i in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| dist2(cfg.point(i), cfg.point(a)).total_cmp(&dist2(cfg.point(i), cfg.point(b))));
        let mut pts: Vec<&[f64]> = vec![cfg.point(i)];
        pts.extend(others[..k - 1].iter().map(|&j| cfg.point(j)));
        bound = bound.min(meb_radius(&pts));
    }
    fn search(cfg: &Configuration, subset: &mut Vec<usize>, cands: &[usize], k: usize, bound: &mut f64) {
        if subset.len() == k {
            let pts: Vec<&[f64]> = subset.iter().map(|&i| cfg.point(i)).collect();
            *bound = bound.min(meb_radius(&pts));
            return;
        }
        for (idx, &c) in cands.iter().enumerate() {
            if subset.len() + cands.len() - idx < k {
                return;
            }
            subset.push(c);
            let pts: Vec<&[f64]> = subset.iter().map(|&i| cfg.point(i)).collect();
            if meb_radius(&pts) < *bound {
                let rest: Vec<usize> =
                    cands[idx + 1..].iter().copied().filter(|&j| dist(cfg.point(c), cfg.point(j)) < 2.0 * *bound).collect();
                search(cfg, subset, &rest, k, bound);
            }
            subset.pop();
        }
    }
    for i in 0..n {
        let cands: Vec<usize> = (i + 1..n).filter(|&j| dist(cfg.point(i), cfg.point(j)) < 2.0 * bound).collect();
        let mut subset = vec![i];
        search(cfg, &mut subset, &cands, k, &mut bound);
    }
    bound
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakSepVerdict {
    pub eta: f64,
    pub m_observed: usize,
    pub m_bound: usize,
    pub pass: bool,
}

/// The weak-separation bound `M = 2d - 1`.
pub fn weak_separation_bound(d: usize) -> usize {
    2 * d - 1
}

/// Counts at `r = η N^{-1/d}` for each `η`, compared with `M = 2d - 1`.
pub fn weak_separation_verdict(domain: &DomainSet, cfg: &Configuration, eta_grid: &[f64]) -> Vec<WeakSepVerdict> {
    let d = domain.dim();
    let m_bound = weak_separation_bound(d);
    let scale = (cfg.len() as f64).powf(-1.0 / d as f64);
    eta_grid
        .iter()
        .map(|&eta| {
            let m_observed = weak_separation_count(cfg, eta * scale);
            WeakSepVerdict { eta, m_observed, m_bound, pass: m_observed <= m_bound }
        })
        .collect()
}

/// Supremum of the `η` passing the weak-separation test with `M = 2d - 1`:
/// `N^{1/d}` times the smallest enclosing radius of any `2d` points. `None` when
/// `N < 2d`, where every `η` passes.
pub fn eta_star(domain: &DomainSet, cfg: &Configuration) -> Option<f64> {
    let d = domain.dim();
    let k = weak_separation_bound(d) + 1;
    (cfg.len() >= k).then(|| min_subset_radius(cfg, k) * (cfg.len() as f64).powf(1.0 / d as f64))
}

/// Greedy farthest-point sampling of `n` mesh nodes starting from node `start`.
pub(crate) fn farthest_point_sampling(mesh: &Mesh, n: usize, start: usize) -> Vec<f64> {
    let mut coords = Vec::with_capacity(n * mesh.dim());
    let mut gap = vec![f64::INFINITY; mesh.len()];
    let mut next = start;
    for _ in 0..n {
        let p = mesh.node(next).to_vec();
        for (i, y) in mesh.nodes().enumerate() {
            gap[i] = gap[i].min(dist2(y, &p));
        }
        coords.extend_from_slice(&p);
        next = (0..gap.len()).fold(0, |b, i| if gap[i] > gap[b] { i } else { b });
    }
    coords
}

/// Hash of the configuration with buckets about one point spacing wide.
fn point_hash(mesh: &Mesh, coords: &[f64], dim: usize) -> SpatialHash {
    let n = (coords.len() / dim).max(1) as f64;
    let lo: Vec<f64> = (0..dim).map(|k| mesh.nodes().map(|p| p[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..dim).map(|k| mesh.nodes().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let cell = (dist(&lo, &hi) * n.powf(-1.0 / dim as f64)).max(mesh.spacing());
    SpatialHash::new(dim, coords, cell)
}

/// Mesh estimate of the covering radius: `max_node min_j |node - x_j|`.
fn mesh_covering(mesh: &Mesh, coords: &[f64], dim: usize) -> f64 {
    let hash = point_hash(mesh, coords, dim);
    mesh.nodes().map(|y| hash.nearest(y).map_or(f64::INFINITY, |(_, d)| d)).fold(0.0, f64::max)
}

/// Chebyshev-center Lloyd iterations on the mesh: each point moves to the center of
/// the smallest ball enclosing its Voronoi cell's nodes (projected back onto the domain).
///
/// Keeps the best iterate by mesh covering radius and returns that radius.
pub(crate) fn chebyshev_lloyd(domain: &DomainSet, mesh: &Mesh, coords: &mut Vec<f64>, iters: usize) -> f64 {
    let dim = mesh.dim();
    let n = coords.len() / dim;
    let mut best = (mesh_covering(mesh, coords, dim), coords.clone());
    let mut stalled = 0;
    for _ in 0..iters {
        let hash = point_hash(mesh, coords, dim);
        let mut cells: Vec<Vec<&[f64]>> = vec![Vec::new(); n];
        for y in mesh.nodes() {
            if let Some((j, _)) = hash.nearest(y) {
                cells[j].push(y);
            }
        }
        for (j, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                continue;
            }
            let mut c = min_enclosing_ball(cell).center;
            domain.project_in_place(&mut c);
            coords[j * dim..(j + 1) * dim].copy_from_slice(&c);
        }
        let rho = mesh_covering(mesh, coords, dim);
        if rho < best.0 - 1e-12 * best.0 {
            best = (rho, coords.clone());
            stalled = 0;
        } else {
            stalled += 1;
            if stalled == 5 {
                break;
            }
        }
    }
    *coords = best.1;
    best.0
}

/// Exact Lloyd iteration on `[0,1]`: every point moves to the midpoint of its Voronoi interval.
fn lloyd_interval(xs: &mut [f64]) {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    for _ in 0..200_000 {
        let mut moved: f64 = 0.0;
        let mut left = 0.0;
        let old = xs.to_vec();
        for i in 0..n {
            let right = if i + 1 < n { 0.5 * (old[i] + old[i + 1]) } else { 1.0 };
            let c = 0.5 * (left + right);
            moved = moved.max((c - xs[i]).abs());
            xs[i] = c;
            left = right;
        }
        if moved < 1e-15 {
            break;
        }
    }
}

/// Meshes of fill 0.15, 0.07 and 0.035 times the point spacing `diam · N^{-1/d}`.
pub(crate) fn covering_meshes(domain: &DomainSet, n: usize) -> Result<Vec<Mesh>> {
    let d = domain.dim() as f64;
    let spacing = domain.diameter() * (n as f64).powf(-1.0 / d);
    [0.15, 0.07, 0.035].iter().map(|f| build_mesh(domain, (f * spacing).min(0.5 * domain.diameter()))).collect()
}

/// Centroidal Lloyd iterations on the mesh: each point moves to the mean of its cell's nodes.
fn centroid_lloyd(domain: &DomainSet, mesh: &Mesh, coords: &mut [f64], iters: usize) {
    let dim = mesh.dim();
    let n = coords.len() / dim;
    for _ in 0..iters {
        let hash = point_hash(mesh, coords, dim);
        let mut sums = vec![0.0; coords.len()];
        let mut counts = vec![0usize; n];
        for y in mesh.nodes() {
            if let Some((j, _)) = hash.nearest(y) {
                counts[j] += 1;
                sums[j * dim..(j + 1) * dim].iter_mut().zip(y).for_each(|(s, v)| *s += v);
            }
        }
        for j in (0..n).filter(|&j| counts[j] > 0) {
            let c = &mut sums[j * dim..(j + 1) * dim];
            c.iter_mut().for_each(|v| *v /= counts[j] as f64);
            domain.project_in_place(c);
            coords[j * dim..(j + 1) * dim].copy_from_slice(c);
        }
    }
}

/// Farthest-point sampling from a random node, centroidal Lloyd relaxation, then
/// Chebyshev-center Lloyd on each mesh. On the square the result is refined by exact
/// minimax descent and the returned radius is exact; otherwise it is the finest mesh estimate.
pub(crate) fn lloyd_covering<R: Rng>(domain: &DomainSet, meshes: &[Mesh], n: usize, iterations: usize, rng: &mut R) -> (f64, Vec<f64>) {
    let start = rng.random_range(0..meshes[0].len());
    let mut coords = farthest_point_sampling(&meshes[0], n, start);
    centroid_lloyd(domain, &meshes[0], &mut coords, iterations);
    let mut rho = f64::INFINITY;
    for mesh in meshes {
        rho = chebyshev_lloyd(domain, mesh, &mut coords, iterations);
    }
    if let DomainSet::Cube { d: 2 } = domain {
        rho = square_minimax(&mut coords, 40 * iterations);
    }
    (rho, coords)
}

/// Options for [`best_covering`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoverOptions {
    pub restarts: usize,
    /// Lloyd iterations per mesh level.
    pub iterations: usize,
    /// Absolute tolerance of the final covering-radius certification.
    pub tol: f64,
    pub seed: u64,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions { restarts: 4, iterations: 60, tol: 1e-6, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestCovering {
    pub config: Configuration,
    pub radius: CoveringRadius,
}

/// Approximates the best N-point covering `ρ_A(N)` by farthest-point initialization
/// followed by Chebyshev-center Lloyd iterations on successively finer meshes.
pub fn best_covering(domain: &DomainSet, n: usize, opts: &CoverOptions) -> Result<BestCovering> {
    domain.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let dim = domain.ambient_dim();
    if let DomainSet::Cube { d: 1 } = domain {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        lloyd_interval(&mut xs);
        let config = Configuration::new(1, xs)?;
        let radius = covering_radius(domain, &config, opts.tol)?;
        return Ok(BestCovering { config, radius });
    }
    let meshes = covering_meshes(domain, n)?;
    let runs: Vec<(f64, Vec<f64>)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add((r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            lloyd_covering(domain, &meshes, n, opts.iterations, &mut rng)
        })
        .collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for run in runs {
        if best.as_ref().is_none_or(|b| run.0 < b.0) {
            best = Some(run);
        }
    }
    let (_, coords) = best.expect("at least one restart");
    let config = Configuration::new(dim, coords)?.canonical();
    let radius = covering_radius(domain, &config, opts.tol)?;
    Ok(BestCovering { config, radius })
}

/// Volume of `B(z, r) ∩ [0,1]^d` by nested adaptive quadrature over slices.
fn ball_box_volume(z: &[f64], r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if z.len() == 1 {
        return ((z[0] + r).min(1.0) - (z[0] - r).max(0.0)).max(0.0);
    }
    let a = (z[0] - r).max(0.0);
    let b = (z[0] + r).min(1.0);
    if a >= b {
        return 0.0;
    }
    let rest = &z[1..];
    quad::integrate(
        |x: f64| {
            let h2 = r * r - (x - z[0]) * (x - z[0]);
            if h2 <= 0.0 {
                0.0
            } else {
                ball_box_volume(rest, h2.sqrt())
            }
        },
        a,
        b,
        1e-12,
        1e-9,
        200,
    )
    .value
}

/// Volume of a cap of height `h` cut from a ball of radius `radius` in `R^d`.
fn ball_cap_volume(d: usize, radius: f64, h: f64) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    if h >= 2.0 * radius {
        return unit_ball_volume(d) * radius.powi(d as i32);
    }
    // Slices at distance t from the center are (d-1)-balls of radius √(R² - t²).
    let v = unit_ball_volume(d - 1);
    quad::integrate(
        |t: f64| v * (radius * radius - t * t).max(0.0).powf((d as f64 - 1.0) / 2.0),
        radius - h,
        radius,
        0.0,
        1e-12,
        500,
    )
    .value
}

/// Volume of `B(z, r) ∩ B(0, 1)` in `R^d`.
fn ball_ball_volume(d: usize, z: &[f64], r: f64) -> f64 {
    let c = norm(z);
    if c + r <= 1.0 {
        return unit_ball_volume(d) * r.powi(d as i32);
    }
    if c + 1.0 <= r {
        return unit_ball_volume(d);
    }
    if c >= 1.0 + r {
        return 0.0;
    }
    // Radical hyperplane at distance x from the origin.
    let x = (c * c + 1.0 - r * r) / (2.0 * c);
    ball_cap_volume(d, 1.0, 1.0 - x) + ball_cap_volume(d, r, r - (c - x))
}

/// `max |#(ω ∩ B(z,r))/N - H_d(B(z,r) ∩ A)/H_d(A)|` over 1000 seeded probe centers
/// `z ∈ A`, for each radius.
///
/// Probe-ball masses are exact up to quadrature for cubes, balls and spheres and use a
/// fixed seeded Monte Carlo sample of 20000 points for ellipsoids and caps.
pub fn equidistribution_discrepancy(domain: &DomainSet, cfg: &Configuration, radii: &[f64], seed: u64) -> Result<Vec<f64>> {
    if cfg.is_empty() {
        return Err(Error::InvalidArgument("discrepancy of an empty configuration".into()));
    }
    cfg.check_in(domain, 1e-9)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..1000).map(|_| domain.sample_uniform(&mut rng)).collect();
    let sample: Vec<Vec<f64>> = match domain {
        DomainSet::Ellipsoid { .. } | DomainSet::SphericalCap { .. } => {
            (0..20_000).map(|_| domain.sample_uniform(&mut rng)).collect()
        }
        _ => Vec::new(),
    };
    let d = domain.dim();
    let n = cfg.len() as f64;
    let mass = |z: &[f64], r: f64| -> f64 {
        match domain {
            DomainSet::Cube { .. } => ball_box_volume(z, r),
            DomainSet::Ball { .. } => ball_ball_volume(d, z, r) / unit_ball_volume(d),
            DomainSet::Sphere { .. } => {
                if r >= 2.0 {
                    1.0
                } else {
                    cap_area(d, 1.0 - r * r / 2.0) / domain.hausdorff_measure()
                }
            }
            _ => sample.iter().filter(|p| dist2(p, z) <= r * r).count() as f64 / sample.len() as f64,
        }
    };
    Ok(radii
        .iter()
        .map(|&r| {
            centers
                .iter()
                .map(|z| {
                    let count = cfg.points().filter(|x| dist2(x, z) <= r * r).count() as f64;
                    (count / n - mass(z, r)).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect())
}

/// `min_x dist(x, ∂A) · N^{2/d}` for bodies; `None` for spheres and caps.
pub fn boundary_min_scaled(domain: &DomainSet, cfg: &Configuration) -> Option<f64> {
    if !domain.is_body() || cfg.is_empty() {
        return None;
    }
    let d = domain.dim() as f64;
    let m = cfg.points().map(|p| domain.boundary_distance_unchecked(p)).fold(f64::INFINITY, f64::min);
    Some(m * (cfg.len() as f64).powf(2.0 / d))
}

/// For the cube: `min` over points and corners of the largest coordinate distance to
/// the corner, times `N^{1/d}`; `None` for other domains.
pub fn corner_min_scaled(domain: &DomainSet, cfg: &Configuration) -> Option<f64> {
    let DomainSet::Cube { d } = domain else { return None };
    let m = cfg
        .points()
        .map(|p| {
            // The nearest corner in the max-coordinate sense rounds each coordinate.
            p.iter().map(|&x| x.min(1.0 - x)).fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    Some(m * (cfg.len() as f64).powf(1.0 / *d as f64))
}

/// Covering and separation diagnostics of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub n: usize,
    pub rho: f64,
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub rho_certified: bool,
    pub farthest_point: Vec<f64>,
    /// `None` for a single point.
    pub delta: Option<f64>,
    pub weak_sep: Vec<WeakSepVerdict>,
    pub eta_star: Option<f64>,
    pub boundary_min_scaled: Option<f64>,
    pub corner_min_scaled: Option<f64>,
    pub discrepancy: Vec<(f64, f64)>,
}

/// Computes every diagnostic of [`CoveringReport`].
pub fn covering_report(
    domain: &DomainSet,
    cfg: &Configuration,
    eta_grid: &[f64],
    probe_radii: &[f64],
    tol: f64,
) -> Result<CoveringReport> {
    let cov = covering_radius(domain, cfg, tol)?;
    let delta = if cfg.len() >= 2 { Some(separation(cfg)?) } else { None };
    let disc = equidistribution_discrepancy(domain, cfg, probe_radii, 0)?;
    Ok(CoveringReport {
        n: cfg.len(),
        rho: cov.rho,
        rho_lo: cov.rho,
        rho_hi: cov.upper,
        rho_certified: cov.certified,
        farthest_point: cov.farthest_point,
        delta,
        weak_sep: weak_separation_verdict(domain, cfg, eta_grid),
        eta_star: eta_star(domain, cfg),
        boundary_min_scaled: boundary_min_scaled(domain, cfg),
        corner_min_scaled: corner_min_scaled(domain, cfg),
        discrepancy: probe_radii.iter().copied().zip(disc).collect(),
    })
}
