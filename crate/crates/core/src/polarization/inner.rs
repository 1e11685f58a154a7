//! Certified minimization of `y ↦ Σ_j |y - x_j|^{-s}` over the domain.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_mesh, default_fill, dist2, Cell, CellGeom, Configuration, DomainSet, Mesh};
use crate::riesz::{log_potential_grad, log_potential_raw, potential_raw};

/// Settings of the inner minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerOptions {
    /// Relative bracket width at which the minimum counts as certified.
    pub tol: f64,
    /// Mesh fill; `None` uses [`default_fill`].
    pub fill: Option<f64>,
    /// Number of best discrete local minima refined by descent.
    pub seeds: usize,
    /// Cell evaluations allowed in branch-and-bound.
    pub max_cells: usize,
    /// Halvings allowed below the initial cells.
    pub max_depth: u32,
}

impl Default for InnerOptions {
    fn default() -> Self {
        InnerOptions { tol: 1e-4, fill: None, seeds: 10, max_cells: 400_000, max_depth: 12 }
    }
}

/// Outcome of [`inner_min`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerMin {
    /// Potential at the witness.
    pub value: f64,
    pub log_value: f64,
    /// Best point found; `value` is attained here.
    pub witness: Vec<f64>,
    /// Certified lower bound on the minimum over the domain.
    pub lower: f64,
    pub log_lower: f64,
    pub certified: bool,
    pub cells: usize,
    pub fill: f64,
}

/// A mesh with precomputed neighbour lists, reused across configurations.
#[derive(Debug, Clone)]
pub(crate) struct Landscape {
    pub mesh: Mesh,
    neighbors: Vec<Vec<u32>>,
}

impl Landscape {
    pub fn new(domain: &DomainSet, fill: f64) -> Result<Self> {
        let mesh = build_mesh(domain, fill)?;
        let neighbors = mesh.grid_neighbors();
        Ok(Landscape { mesh, neighbors })
    }

    /// Discrete local minima of `ln f` on the mesh, sorted by value then index.
    pub fn local_minima(&self, coords: &[f64], dim: usize, s: f64) -> Vec<(f64, usize)> {
        let vals: Vec<f64> = self.mesh.nodes().map(|y| log_potential_raw(coords, dim, y, s)).collect();
        let mut minima: Vec<(f64, usize)> = (0..vals.len())
            .filter(|&i| vals[i].is_finite() && self.neighbors[i].iter().all(|&j| vals[i] <= vals[j as usize]))
            .map(|i| (vals[i], i))
            .collect();
        minima.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        minima
    }
}

/// Projected normalized-gradient descent on `ln f` with Armijo backtracking.
///
/// Returns the final log-value; `y` is updated in place and stays in the domain.
pub(crate) fn descend(domain: &DomainSet, coords: &[f64], dim: usize, s: f64, y: &mut [f64], max_steps: usize) -> f64 {
    let mut grad = vec![0.0; dim];
    let mut trial = vec![0.0; dim];
    let mut tg = vec![0.0; dim];
    let mut v = log_potential_grad(coords, dim, y, s, &mut grad, None);
    if !v.is_finite() {
        return v;
    }
    let nearest = coords.chunks_exact(dim).map(|x| dist2(x, y)).fold(f64::INFINITY, f64::min).sqrt();
    let mut step = 0.1 * nearest;
    let floor = 1e-13 * domain.diameter();
    for _ in 0..max_steps {
        let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gn == 0.0 || step < floor {
            break;
        }
        loop {
            for k in 0..dim {
                trial[k] = y[k] - step * grad[k] / gn;
            }
            domain.project_in_place(&mut trial);
            let decrease: f64 = (0..dim).map(|k| grad[k] * (y[k] - trial[k])).sum();
            let vt = log_potential_grad(coords, dim, &trial, s, &mut tg, None);
            if vt.is_finite() && vt <= v - 1e-4 * decrease && decrease > 0.0 {
                y.copy_from_slice(&trial);
                grad.copy_from_slice(&tg);
                v = vt;
                step *= 2.0;
                break;
            }
            step *= 0.5;
            if step < floor {
                break;
            }
        }
    }
    v
}

/// Heap entry ordered so that the smallest lower bound pops first.
struct Entry {
    lb: f64,
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
        other.lb.total_cmp(&self.lb).then(other.seq.cmp(&self.seq))
    }
}

/// Lower bound on `f / e^{ln_scale}` over the cell.
fn cell_lower_bound(
    domain: &DomainSet,
    cell: &Cell,
    geom: &CellGeom,
    coords: &[f64],
    dim: usize,
    s: f64,
    ln_scale: f64,
) -> f64 {
    let mut lb0 = 0.0;
    let mut fc = 0.0;
    let mut curvature = 0.0;
    let mut second_order = true;
    let mut g = vec![0.0; dim];
    for x in coords.chunks_exact(dim) {
        let (near, far) = cell.dist_range(geom, x);
        lb0 += (-s * far.ln() - ln_scale).exp();
        if near <= 0.0 {
            second_order = false;
            continue;
        }
        let r2 = dist2(&geom.center, x);
        let t = (-0.5 * s * r2.ln() - ln_scale).exp();
        fc += t;
        for k in 0..dim {
            g[k] -= s * t * (geom.center[k] - x[k]) / r2;
        }
        // Smallest Hessian eigenvalue of |y-x|^{-s} is -s|y-x|^{-s-2}.
        curvature += s * (-(s + 2.0) * near.ln() - ln_scale).exp();
    }
    let mut lb = lb0;
    if second_order {
        let lin = cell.linear_lower(domain, geom, &g);
        let lb2 = fc + lin - 0.5 * curvature * geom.radius * geom.radius;
        if lb2.is_finite() {
            lb = lb.max(lb2);
        }
    }
    lb.max(0.0)
}

/// Branch-and-bound state; values are relative to `e^{ln_scale}`.
struct Search {
    heap: BinaryHeap<Entry>,
    seq: usize,
    evaluated: usize,
    ub: f64,
    witness: Vec<f64>,
}

impl Search {
    fn consider(&mut self, domain: &DomainSet, coords: &[f64], dim: usize, s: f64, ln_scale: f64, cell: Cell) {
        let Some(geom) = cell.geom(domain) else { return };
        self.evaluated += 1;
        let probe = (log_potential_raw(coords, dim, &geom.rep, s) - ln_scale).exp();
        if probe < self.ub {
            let mut y = geom.rep.clone();
            let v = descend(domain, coords, dim, s, &mut y, 50);
            self.ub = (v - ln_scale).exp();
            self.witness = y;
        }
        let lb = cell_lower_bound(domain, &cell, &geom, coords, dim, s, ln_scale);
        if lb < self.ub {
            self.seq += 1;
            self.heap.push(Entry { lb, seq: self.seq, cell });
        }
    }
}

/// Certified `min_{y∈A} Σ_j |y - x_j|^{-s}` with default options and relative tolerance `tol`.
pub fn inner_min(domain: &DomainSet, cfg: &Configuration, s: f64, tol: f64) -> Result<InnerMin> {
    inner_min_with(domain, cfg, s, &InnerOptions { tol, ..InnerOptions::default() })
}

/// Certified inner minimization.
///
/// A mesh sweep picks the best discrete local minima, which are refined by projected
/// descent. Branch-and-bound over cells then certifies the minimum: each cell gets the
/// larger of a far-distance bound and a second-order Taylor bound at its center,
/// and cells are split best-first until the bracket closes to `tol` relative.
pub fn inner_min_with(domain: &DomainSet, cfg: &Configuration, s: f64, opts: &InnerOptions) -> Result<InnerMin> {
    if cfg.is_empty() {
        return Err(Error::InvalidArgument("inner minimization needs a nonempty configuration".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {} must be positive", opts.tol)));
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidArgument(format!("Riesz exponent s = {s} must be positive")));
    }
    cfg.check_in(domain, 1e-9)?;
    let fill = opts.fill.unwrap_or_else(|| default_fill(domain, cfg.len()));
    let landscape = Landscape::new(domain, fill)?;
    Ok(certify(domain, cfg, s, opts, &landscape, fill))
}

pub(crate) fn certify(
    domain: &DomainSet,
    cfg: &Configuration,
    s: f64,
    opts: &InnerOptions,
    landscape: &Landscape,
    fill: f64,
) -> InnerMin {
    let dim = cfg.dim();
    let coords = cfg.coords();

    let mut best_v = f64::INFINITY;
    let mut witness = landscape.mesh.node(0).to_vec();
    for &(_, i) in landscape.local_minima(coords, dim, s).iter().take(opts.seeds.max(1)) {
        let mut y = landscape.mesh.node(i).to_vec();
        let v = descend(domain, coords, dim, s, &mut y, 200);
        if v < best_v {
            best_v = v;
            witness = y;
        }
    }
    if !best_v.is_finite() {
        // Every node coincides with a point; fall back to any cell representative.
        witness = Cell::initial(domain, fill)
            .iter()
            .filter_map(|c| c.geom(domain))
            .map(|g| g.rep)
            .find(|y| log_potential_raw(coords, dim, y, s).is_finite())
            .unwrap_or(witness);
        best_v = log_potential_raw(coords, dim, &witness, s);
    }

    let ln_scale = best_v;
    let mut search = Search { heap: BinaryHeap::new(), seq: 0, evaluated: 0, ub: 1.0, witness };
    for cell in Cell::initial(domain, fill) {
        search.consider(domain, coords, dim, s, ln_scale, cell);
    }
    let mut lower;
    let certified;
    loop {
        let Some(top) = search.heap.peek() else {
            lower = search.ub;
            certified = true;
            break;
        };
        lower = top.lb.min(search.ub);
        if search.ub - top.lb <= opts.tol * search.ub {
            certified = true;
            break;
        }
        if top.cell.depth >= opts.max_depth || search.evaluated >= opts.max_cells {
            certified = false;
            break;
        }
        let top = search.heap.pop().expect("peeked");
        for child in top.cell.children() {
            search.consider(domain, coords, dim, s, ln_scale, child);
        }
    }
    let witness = search.witness;
    let evaluated = search.evaluated;
    let log_value = log_potential_raw(coords, dim, &witness, s);
    let log_lower = if lower > 0.0 { ln_scale + lower.ln() } else { f64::NEG_INFINITY };
    InnerMin {
        value: potential_raw(coords, dim, &witness, s),
        log_value,
        witness,
        lower: log_lower.exp(),
        log_lower: log_lower.min(log_value),
        certified,
        cells: evaluated,
        fill,
    }
}
