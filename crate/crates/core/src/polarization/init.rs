//! Starting configurations for the multi-start ascent.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::covering::{covering_meshes, farthest_point_sampling, lloyd_covering};
use crate::geometry::{DomainSet, Mesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum InitKind {
    Covering,
    Lattice,
    Random,
}

impl InitKind {
    pub fn for_restart(r: usize) -> Self {
        match r % 3 {
            0 => InitKind::Covering,
            1 => InitKind::Lattice,
            _ => InitKind::Random,
        }
    }
}

/// Flat coordinates of `n` starting points in the domain.
pub(crate) fn initial_coords<R: Rng>(domain: &DomainSet, n: usize, kind: InitKind, mesh: &Mesh, rng: &mut R) -> Vec<f64> {
    match kind {
        InitKind::Covering => match covering_meshes(domain, n) {
            Ok(meshes) => lloyd_covering(domain, &meshes, n, 30, rng).1,
            Err(_) => {
                let start = rng.random_range(0..mesh.len());
                farthest_point_sampling(mesh, n, start)
            }
        },
        InitKind::Lattice => lattice_coords(domain, n, rng).unwrap_or_else(|| random_coords(domain, n, rng)),
        InitKind::Random => random_coords(domain, n, rng),
    }
}

fn random_coords<R: Rng>(domain: &DomainSet, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).flat_map(|_| domain.sample_uniform(rng)).collect()
}

/// Spiral points on spheres and caps, rotated hexagonal or cubic lattices in bodies.
fn lattice_coords<R: Rng>(domain: &DomainSet, n: usize, rng: &mut R) -> Option<Vec<f64>> {
    let d = domain.dim();
    match domain {
        DomainSet::Sphere { .. } | DomainSet::SphericalCap { .. } => {
            let t0 = match domain {
                DomainSet::SphericalCap { t0, .. } => *t0,
                _ => -1.0,
            };
            let phase = 2.0 * PI * rng.random::<f64>();
            if d == 1 {
                let theta0 = t0.acos();
                let full = t0 <= -1.0;
                return Some(
                    (0..n)
                        .flat_map(|i| {
                            let th = if full {
                                phase + 2.0 * PI * i as f64 / n as f64
                            } else {
                                -theta0 + theta0 * (2 * i + 1) as f64 / n as f64
                            };
                            [th.cos(), th.sin()]
                        })
                        .collect(),
                );
            }
            if d != 2 {
                return None;
            }
            let golden = PI * (3.0 - 5f64.sqrt());
            Some(
                (0..n)
                    .flat_map(|i| {
                        let z = 1.0 - (1.0 - t0) * (i as f64 + 0.5) / n as f64;
                        let r = (1.0 - z * z).max(0.0).sqrt();
                        let phi = phase + golden * i as f64;
                        [z, r * phi.cos(), r * phi.sin()]
                    })
                    .collect(),
            )
        }
        _ => {
            // Rows are generators of a unit-covolume basis; the planar one is hexagonal and randomly rotated.
            let mut basis: Vec<Vec<f64>> = (0..d)
                .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            if d == 2 {
                let c = (2.0 / 3f64.sqrt()).sqrt();
                basis = vec![vec![c, 0.0], vec![0.5 * c, 0.5 * 3f64.sqrt() * c]];
                let a = 2.0 * PI * rng.random::<f64>();
                let (sn, cs) = a.sin_cos();
                for v in basis.iter_mut() {
                    *v = vec![cs * v[0] - sn * v[1], sn * v[0] + cs * v[1]];
                }
            }
            let center: Vec<f64> = match domain {
                DomainSet::Cube { .. } => vec![0.5; d],
                _ => vec![0.0; d],
            };
            let reach = domain.diameter();
            let shift: Vec<f64> = (0..d).map(|_| rng.random::<f64>() - 0.5).collect();
            let mut scale = (domain.hausdorff_measure() / n as f64).powf(1.0 / d as f64) * 1.1;
            for _ in 0..200 {
                let pts = lattice_points_in(domain, &basis, &center, &shift, scale, reach);
                if pts.len() >= n {
                    let mut pts = pts;
                    pts.shuffle(rng);
                    pts.truncate(n);
                    return Some(pts.concat());
                }
                scale *= 0.97;
            }
            None
        }
    }
}

fn lattice_points_in(
    domain: &DomainSet,
    basis: &[Vec<f64>],
    center: &[f64],
    shift: &[f64],
    scale: f64,
    reach: f64,
) -> Vec<Vec<f64>> {
    let d = basis.len();
    // Both bases have minimum singular value above 1/2, so |k| ≤ reach/(scale/2) suffices.
    let k = (reach / (0.5 * scale)).ceil() as i64 + 1;
    let mut out = Vec::new();
    let mut idx = vec![-k; d];
    loop {
        let mut p = center.to_vec();
        for (g, (&i, sh)) in basis.iter().zip(idx.iter().zip(shift)) {
            for c in 0..d {
                p[c] += scale * (i as f64 + sh) * g[c];
            }
        }
        if domain.contains_unchecked(&p, 0.0) {
            out.push(p);
        }
        let mut pos = 0;
        loop {
            if pos == d {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] <= k {
                break;
            }
            idx[pos] = -k;
            pos += 1;
        }
    }
}
