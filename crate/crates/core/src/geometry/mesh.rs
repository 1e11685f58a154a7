use std::collections::HashMap;

use super::{dist2, norm, DomainSet};
use crate::error::{Error, Result};

/// A finite node set of `A` with a certified fill distance: every point of `A`
/// lies within `fill_distance` of some node.
#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    nodes: Vec<f64>,
    fill_distance: f64,
    spacing: f64,
}

impl Mesh {
    pub fn len(&self) -> usize {
        self.nodes.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn nodes(&self) -> std::slice::ChunksExact<'_, f64> {
        self.nodes.chunks_exact(self.dim)
    }

    /// Certified upper bound on `max_{y∈A} min_node |y - node|`.
    pub fn fill_distance(&self) -> f64 {
        self.fill_distance
    }

    /// Nominal distance between grid neighbours.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Neighbour lists: for every node, the other nodes within `radius`.
    pub fn neighbors(&self, radius: f64) -> Vec<Vec<u32>> {
        let hash = SpatialHash::new(self.dim, &self.nodes, radius);
        (0..self.len())
            .map(|i| {
                hash.within(self.node(i), radius)
                    .into_iter()
                    .filter(|&j| j != i)
                    .map(|j| j as u32)
                    .collect()
            })
            .collect()
    }

    /// Neighbour lists covering the immediate grid neighbours (diagonals included).
    pub fn grid_neighbors(&self) -> Vec<Vec<u32>> {
        self.neighbors(self.spacing * (self.dim as f64).sqrt() * 1.01)
    }
}

/// Default mesh fill for the inner minimization of an `n`-point configuration,
/// `min(0.2, 0.25 n^{-1/d}) · diam(A)`.
pub fn default_fill(domain: &DomainSet, n: usize) -> f64 {
    let d = domain.dim() as f64;
    (0.25 * (n.max(1) as f64).powf(-1.0 / d)).min(0.2) * domain.diameter()
}

/// Builds a mesh of `A` whose fill distance is at most `h`.
pub fn build_mesh(domain: &DomainSet, h: f64) -> Result<Mesh> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("mesh fill h = {h} must be positive")));
    }
    domain.validate()?;
    let d = domain.dim();
    let sqrt_d = (d as f64).sqrt();
    match domain {
        DomainSet::Cube { .. } => {
            let n = (sqrt_d / h).ceil().max(1.0) as usize;
            let step = 1.0 / n as f64;
            let mut nodes = Vec::new();
            for_each_grid(&vec![n + 1; d], |idx| {
                nodes.extend(idx.iter().map(|&i| i as f64 * step));
            });
            Ok(Mesh { dim: d, nodes, fill_distance: step * sqrt_d / 2.0, spacing: step })
        }
        DomainSet::Ball { .. } | DomainSet::Ellipsoid { .. } => {
            let axes = domain.axes().expect("ball-like domain");
            let counts: Vec<usize> =
                axes.iter().map(|a| (2.0 * a * sqrt_d / h).ceil().max(1.0) as usize).collect();
            let steps: Vec<f64> = axes.iter().zip(&counts).map(|(a, n)| 2.0 * a / *n as f64).collect();
            let half_diag = steps.iter().map(|s| s * s).sum::<f64>().sqrt() / 2.0;
            let mut nodes = Vec::new();
            let mut y = vec![0.0; d];
            let sizes: Vec<usize> = counts.iter().map(|n| n + 1).collect();
            for_each_grid(&sizes, |idx| {
                for k in 0..d {
                    y[k] = -axes[k] + idx[k] as f64 * steps[k];
                }
                if domain.contains_unchecked(&y, 0.0) {
                    nodes.extend_from_slice(&y);
                } else {
                    let mut p = y.clone();
                    domain.project_in_place(&mut p);
                    if dist2(&p, &y) <= half_diag * half_diag {
                        nodes.extend_from_slice(&p);
                    }
                }
            });
            let spacing = steps.iter().cloned().fold(0.0, f64::max);
            Ok(Mesh { dim: d, nodes, fill_distance: half_diag, spacing })
        }
        DomainSet::Sphere { .. } | DomainSet::SphericalCap { .. } => {
            // Radial projection of the cube surface onto the sphere is 1-Lipschitz;
            // caps pay a factor 2 for the rim projection of outside nodes.
            let is_cap = matches!(domain, DomainSet::SphericalCap { .. });
            let face_fill = if is_cap { h / 2.0 } else { h };
            let m = (sqrt_d / face_fill).ceil().max(1.0) as usize;
            let step = 2.0 / m as f64;
            let f = step * sqrt_d / 2.0;
            let l = d + 1;
            let mut pts: Vec<Vec<f64>> = Vec::new();
            for axis in 0..l {
                for sign in [-1.0, 1.0] {
                    for_each_grid(&vec![m + 1; d], |idx| {
                        let mut v = Vec::with_capacity(l);
                        let mut k = 0;
                        for c in 0..l {
                            if c == axis {
                                v.push(sign);
                            } else {
                                v.push(-1.0 + idx[k] as f64 * step);
                                k += 1;
                            }
                        }
                        let r = norm(&v);
                        v.iter_mut().for_each(|x| *x /= r);
                        if domain.contains_unchecked(&v, 0.0) {
                            pts.push(v);
                        } else {
                            let mut p = v.clone();
                            domain.project_in_place(&mut p);
                            if dist2(&p, &v) <= f * f {
                                pts.push(p);
                            }
                        }
                    });
                }
            }
            pts.sort_by(|a, b| super::config::lex_cmp(a, b));
            pts.dedup_by(|a, b| dist2(a, b) <= 1e-24);
            let fill = if is_cap { 2.0 * f } else { f };
            Ok(Mesh { dim: l, nodes: pts.concat(), fill_distance: fill, spacing: step })
        }
    }
}

/// Calls `f` on every multi-index of a grid with the given axis sizes.
pub(crate) fn for_each_grid<F: FnMut(&[usize])>(sizes: &[usize], mut f: F) {
    if sizes.iter().any(|&s| s == 0) {
        return;
    }
    let mut idx = vec![0usize; sizes.len()];
    loop {
        f(&idx);
        let mut k = 0;
        loop {
            if k == sizes.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Uniform-grid bucketing of a fixed point set for radius and nearest-point queries.
#[derive(Debug, Clone)]
pub struct SpatialHash {
    dim: usize,
    cell: f64,
    coords: Vec<f64>,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
    key_min: Vec<i64>,
    key_max: Vec<i64>,
}

impl SpatialHash {
    pub fn new(dim: usize, coords: &[f64], cell: f64) -> Self {
        let cell = if cell > 0.0 && cell.is_finite() { cell } else { 1.0 };
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        let mut key_min = vec![i64::MAX; dim];
        let mut key_max = vec![i64::MIN; dim];
        for (i, p) in coords.chunks_exact(dim).enumerate() {
            let key: Vec<i64> = p.iter().map(|x| (x / cell).floor() as i64).collect();
            for k in 0..dim {
                key_min[k] = key_min[k].min(key[k]);
                key_max[k] = key_max[k].max(key[k]);
            }
            buckets.entry(key).or_default().push(i);
        }
        SpatialHash { dim, cell, coords: coords.to_vec(), buckets, key_min, key_max }
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn key(&self, q: &[f64]) -> Vec<i64> {
        q.iter().map(|x| (x / self.cell).floor() as i64).collect()
    }

    /// Indices of stored points within `radius` of `q`, in increasing index order.
    pub fn within(&self, q: &[f64], radius: f64) -> Vec<usize> {
        let reach = (radius / self.cell).ceil() as i64;
        let center = self.key(q);
        let mut out = Vec::new();
        let sizes = vec![(2 * reach + 1) as usize; self.dim];
        let mut key = vec![0i64; self.dim];
        let r2 = radius * radius;
        for_each_grid(&sizes, |idx| {
            for k in 0..self.dim {
                key[k] = center[k] + idx[k] as i64 - reach;
            }
            if let Some(list) = self.buckets.get(&key) {
                for &i in list {
                    if dist2(self.point(i), q) <= r2 {
                        out.push(i);
                    }
                }
            }
        });
        out.sort_unstable();
        out
    }

    /// Nearest stored point to `q` and its distance (lowest index on ties).
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        if self.buckets.is_empty() {
            return None;
        }
        let center = self.key(q);
        let max_ring = (0..self.dim)
            .map(|k| (center[k] - self.key_min[k]).abs().max((self.key_max[k] - center[k]).abs()))
            .max()
            .unwrap_or(0);
        let mut best: Option<(usize, f64)> = None;
        let mut key = vec![0i64; self.dim];
        for ring in 0..=max_ring {
            let sizes = vec![(2 * ring + 1) as usize; self.dim];
            for_each_grid(&sizes, |idx| {
                let on_ring = idx.iter().any(|&i| i as i64 == 0 || i as i64 == 2 * ring);
                if !on_ring && ring > 0 {
                    return;
                }
                for k in 0..self.dim {
                    key[k] = center[k] + idx[k] as i64 - ring;
                }
                if let Some(list) = self.buckets.get(&key) {
                    for &i in list {
                        let d2 = dist2(self.point(i), q);
                        let better = match best {
                            None => true,
                            Some((bi, bd)) => d2 < bd || (d2 == bd && i < bi),
                        };
                        if better {
                            best = Some((i, d2));
                        }
                    }
                }
            });
            if let Some((_, bd)) = best {
                // Points in rings beyond `ring` are at least `ring * cell` away.
                let reach = ring as f64 * self.cell;
                if bd.sqrt() <= reach {
                    break;
                }
            }
        }
        best.map(|(i, d2)| (i, d2.sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Max over the nodes of a refined mesh of the distance to the coarse node set.
    fn refinement_fill(domain: &DomainSet, mesh: &Mesh) -> f64 {
        let fine = build_mesh(domain, mesh.fill_distance() / 2.0).unwrap();
        let hash = SpatialHash::new(mesh.dim(), &mesh.nodes, mesh.fill_distance());
        fine.nodes().map(|p| hash.nearest(p).unwrap().1).fold(0.0, f64::max)
    }

    #[test]
    fn cube_line_mesh() {
        let m = build_mesh(&DomainSet::cube(1), 0.25).unwrap();
        let xs: Vec<f64> = m.nodes().map(|p| p[0]).collect();
        assert_eq!(xs.first(), Some(&0.0));
        assert_eq!(xs.last(), Some(&1.0));
        assert!(xs.windows(2).all(|w| w[1] - w[0] <= 0.25 + 1e-15));
        assert!(m.fill_distance() <= 0.25);
    }

    #[test]
    fn sphere_mesh_size_and_fill() {
        let dom = DomainSet::sphere(2);
        let m = build_mesh(&dom, 0.5).unwrap();
        assert!((50..=500).contains(&m.len()), "{}", m.len());
        assert!(m.fill_distance() <= 0.5);
        assert!(refinement_fill(&dom, &m) <= m.fill_distance());
        for p in m.nodes() {
            assert!(dom.contains(p, 1e-12).unwrap());
        }
    }

    #[test]
    fn ball_mesh_probe_fill() {
        let dom = DomainSet::ball(2);
        let m = build_mesh(&dom, 0.1).unwrap();
        let hash = SpatialHash::new(2, &m.nodes, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100_000 {
            let p = dom.sample_uniform(&mut rng);
            assert!(hash.nearest(&p).unwrap().1 <= 0.1);
        }
    }

    #[test]
    fn refinement_certifies_every_domain() {
        let domains = [
            DomainSet::cube(2),
            DomainSet::ball(2),
            DomainSet::ellipsoid(vec![1.5, 0.7]).unwrap(),
            DomainSet::sphere(1),
            DomainSet::sphere(2),
            DomainSet::cap(2, 0.4).unwrap(),
            DomainSet::cap(2, -0.5).unwrap(),
        ];
        for dom in &domains {
            let m = build_mesh(dom, 0.2).unwrap();
            assert!(m.fill_distance() <= 0.2, "{dom:?}");
            assert!(refinement_fill(dom, &m) <= m.fill_distance() + 1e-12, "{dom:?}");
            for p in m.nodes() {
                assert!(dom.contains(p, 1e-12).unwrap(), "{dom:?}");
            }
        }
    }

    #[test]
    fn rejects_bad_fill() {
        assert!(build_mesh(&DomainSet::cube(2), 0.0).is_err());
        assert!(build_mesh(&DomainSet::cube(2), -1.0).is_err());
    }

    #[test]
    fn mesh_is_deterministic() {
        let a = build_mesh(&DomainSet::sphere(2), 0.3).unwrap();
        let b = build_mesh(&DomainSet::sphere(2), 0.3).unwrap();
        assert_eq!(a.nodes, b.nodes);
    }

    #[test]
    fn spatial_hash_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<f64> = (0..600).map(|_| rng.random::<f64>() * 3.0 - 1.0).collect();
        let hash = SpatialHash::new(3, &pts, 0.17);
        for _ in 0..200 {
            let q: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 5.0 - 2.0).collect();
            let (bi, bd) = pts
                .chunks_exact(3)
                .enumerate()
                .map(|(i, p)| (i, dist2(p, &q).sqrt()))
                .fold((usize::MAX, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            let (hi, hd) = hash.nearest(&q).unwrap();
            assert_eq!(hi, bi);
            assert_eq!(hd, bd);
            let within = hash.within(&q, 0.4);
            let brute: Vec<usize> = pts
                .chunks_exact(3)
                .enumerate()
                .filter(|(_, p)| dist2(p, &q) <= 0.16)
                .map(|(i, _)| i)
                .collect();
            assert_eq!(within, brute);
        }
    }
}
