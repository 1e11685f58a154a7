//! Covering lattices of `R^d`: covering radius, covering density and the counting
//! characterization of density, plus covering numbers of the unit cube.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{estimate_covering_constant, estimate_sigma};
use crate::covering::{best_covering, CoverOptions};
use crate::error::{Error, Result};
use crate::geometry::{build_mesh, dist2, dot, unit_ball_volume, DomainSet};
use crate::polarization::SolverOptions;

/// A full-rank lattice `{Σ c_i g_i : c ∈ Z^d}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    /// Generators `g_i`, each of length `d`.
    pub generators: Vec<Vec<f64>>,
    pub name: Option<String>,
}

/// Covering radius with a bracket; `lower == upper` when the enumeration is exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeRadius {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

impl Lattice {
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self> {
        let d = generators.len();
        if d == 0 || d > 5 {
            return Err(Error::InvalidArgument(format!("lattice dimension {d} outside 1..=5")));
        }
        if generators.iter().any(|g| g.len() != d || g.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidArgument("lattice basis must be a finite square matrix".into()));
        }
        let l = Lattice { generators, name: None };
        if !(l.det() > 1e-12 * l.generators.iter().map(|g| dot(g, g).sqrt()).product::<f64>()) {
            return Err(Error::SingularBasis);
        }
        Ok(l)
    }

    fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    /// `Z^d`.
    pub fn integer(d: usize) -> Result<Self> {
        let g = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Ok(Lattice::new(g)?.named(&format!("Z{d}")))
    }

    /// Hexagonal lattice generated by `(1, 0)` and `(1/2, √3/2)`.
    pub fn hexagonal() -> Self {
        Lattice::new(vec![vec![1.0, 0.0], vec![0.5, 0.75f64.sqrt()]]).expect("nonsingular").named("hex")
    }

    /// `A_d = {x ∈ Z^{d+1} : Σ x_i = 0}` in orthonormal coordinates of its hyperplane.
    pub fn a_lattice(d: usize) -> Result<Self> {
        let gens: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let mut v = vec![0.0; d + 1];
                v[i] = 1.0;
                v[i + 1] = -1.0;
                v
            })
            .collect();
        Ok(Lattice::new(hyperplane_coords(&gens))?.named(&format!("A{d}")))
    }

    /// `A_d^*`, the projection of `Z^{d+1}` onto the sum-zero hyperplane.
    pub fn a_dual_lattice(d: usize) -> Result<Self> {
        let gens: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..=d).map(|j| if i == j { 1.0 } else { 0.0 } - 1.0 / (d + 1) as f64).collect())
            .collect();
        Ok(Lattice::new(hyperplane_coords(&gens))?.named(&format!("A{d}*")))
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    /// Covolume `|det G|`.
    pub fn det(&self) -> f64 {
        let d = self.dim();
        let mut m = self.generators.clone();
        let mut det = 1.0;
        for c in 0..d {
            let p = (c..d).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).expect("nonempty");
            if m[p][c] == 0.0 {
                return 0.0;
            }
            m.swap(c, p);
            det *= m[c][c];
            for r in c + 1..d {
                let f = m[r][c] / m[c][c];
                for k in c..d {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
        det.abs()
    }

    /// Same lattice scaled by `t`.
    pub fn scaled(&self, t: f64) -> Lattice {
        Lattice { generators: self.generators.iter().map(|g| g.iter().map(|x| x * t).collect()).collect(), name: self.name.clone() }
    }

    /// LLL-reduced generators (`δ = 3/4`) of the same lattice.
    pub fn lll(&self) -> Vec<Vec<f64>> {
        let mut b = self.generators.clone();
        let d = b.len();
        let gso = |b: &[Vec<f64>]| -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
            let mut bs: Vec<Vec<f64>> = Vec::with_capacity(d);
            let mut mu = vec![vec![0.0; d]; d];
            for i in 0..d {
                let mut v = b[i].clone();
                for j in 0..i {
                    mu[i][j] = dot(&b[i], &bs[j]) / dot(&bs[j], &bs[j]);
                    for k in 0..d {
                        v[k] -= mu[i][j] * bs[j][k];
                    }
                }
                bs.push(v);
            }
            (bs, mu)
        };
        let mut k = 1;
        let mut guard = 0;
        while k < d && guard < 10_000 {
            guard += 1;
            for j in (0..k).rev() {
                let (_, mu) = gso(&b);
                let q = mu[k][j].round();
                if q != 0.0 {
                    let bj = b[j].clone();
                    for (x, y) in b[k].iter_mut().zip(&bj) {
                        *x -= q * y;
                    }
                }
            }
            let (bs, mu) = gso(&b);
            if dot(&bs[k], &bs[k]) >= (0.75 - mu[k][k - 1] * mu[k][k - 1]) * dot(&bs[k - 1], &bs[k - 1]) {
                k += 1;
            } else {
                b.swap(k, k - 1);
                k = k.max(2) - 1;
            }
        }
        b
    }
}

/// Coordinates of vectors lying in the hyperplane `Σ x_i = 0` of `R^{d+1}` with respect
/// to a Gram-Schmidt basis of that hyperplane.
fn hyperplane_coords(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = vectors.len();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(d);
    for i in 0..d {
        let mut v = vec![0.0; d + 1];
        v[i] = 1.0;
        v[i + 1] = -1.0;
        for f in &frame {
            let c = dot(&v, f);
            for (a, b) in v.iter_mut().zip(f) {
                *a -= c * b;
            }
        }
        let n = dot(&v, &v).sqrt();
        frame.push(v.iter().map(|x| x / n).collect());
    }
    vectors.iter().map(|v| frame.iter().map(|f| dot(v, f)).collect()).collect()
}

fn combine(gens: &[Vec<f64>], coeffs: &[i64]) -> Vec<f64> {
    let d = gens[0].len();
    let mut v = vec![0.0; d];
    for (g, &c) in gens.iter().zip(coeffs) {
        for k in 0..d {
            v[k] += c as f64 * g[k];
        }
    }
    v
}

/// All nonzero lattice vectors with coefficients in `[-k, k]^d`.
fn small_vectors(gens: &[Vec<f64>], k: i64) -> Vec<Vec<f64>> {
    let d = gens.len();
    let mut out = Vec::new();
    let mut c = vec![-k; d];
    loop {
        if c.iter().any(|&x| x != 0) {
            out.push(combine(gens, &c));
        }
        let mut pos = 0;
        loop {
            if pos == d {
                return out;
            }
            c[pos] += 1;
            if c[pos] <= k {
                break;
            }
            c[pos] = -k;
            pos += 1;
        }
    }
}

/// Solves the square system `a x = b` by partial pivoting; `None` when singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let d = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    for c in 0..d {
        let p = (c..d).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[p][c].abs() <= 1e-10 * scale {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..d {
            let f = a[r][c] / a[c][c];
            for k in c..d {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; d];
    for c in (0..d).rev() {
        let s: f64 = (c + 1..d).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

/// Covering radius `max_{x∈R^d} min_{v∈L} |x - v|`.
///
/// Enumerates the vertices of the Voronoi cell of the origin cut out by the
/// Voronoi-relevant vectors among the small combinations of an LLL-reduced basis.
/// Every halfspace used is valid for the true cell, so the largest vertex norm is an
/// upper bound; the lower bound is the distance from that vertex to a larger set of
/// lattice vectors. For `d ≤ 3` the candidate set contains every relevant vector and
/// the two agree.
pub fn lattice_covering_radius(lattice: &Lattice) -> LatticeRadius {
    let gens = lattice.lll();
    let d = gens.len();
    let cands = small_vectors(&gens, 2);
    // v is relevant unless some other u has |v - 2u| ≤ |v|, i.e. ±v are not the only
    // shortest vectors of v + 2L.
    let relevant: Vec<&Vec<f64>> = cands
        .iter()
        .filter(|v| {
            let nv = dot(v, v);
            !cands.iter().any(|u| {
                let w: Vec<f64> = v.iter().zip(u.iter()).map(|(a, b)| a - 2.0 * b).collect();
                let nw = dot(&w, &w);
                nw <= nv * (1.0 + 1e-10) && dist2(&w, v) > 1e-12 * nv && dist2(&w, &v.iter().map(|x| -x).collect::<Vec<_>>()) > 1e-12 * nv
            })
        })
        .collect();
    let rhs: Vec<f64> = relevant.iter().map(|v| 0.5 * dot(v, v)).collect();
    let mut best_norm2: f64 = 0.0;
    let mut best_vertex = vec![0.0; d];
    let mut idx: Vec<usize> = (0..d).collect();
    let m = relevant.len();
    if m >= d {
        loop {
            let a: Vec<Vec<f64>> = idx.iter().map(|&i| relevant[i].clone()).collect();
            let b: Vec<f64> = idx.iter().map(|&i| rhs[i]).collect();
            if let Some(x) = solve(a, b) {
                let n2 = dot(&x, &x);
                if n2 > best_norm2
                    && relevant.iter().zip(&rhs).all(|(v, r)| dot(v, &x) <= r + 1e-9 * r.max(1e-300))
                {
                    best_norm2 = n2;
                    best_vertex = x;
                }
            }
            // Next d-subset in lexicographic order.
            let mut i = d;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if idx[i] < m - d + i {
                    idx[i] += 1;
                    for j in i + 1..d {
                        idx[j] = idx[j - 1] + 1;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    let upper = best_norm2.sqrt();
    let wide = small_vectors(&gens, if d <= 3 { 3 } else { 2 });
    let lower = wide.iter().map(|v| dist2(v, &best_vertex)).fold(best_norm2, f64::min).sqrt();
    let exact = d <= 3;
    LatticeRadius { lower: if exact { upper } else { lower }, upper, exact }
}

/// Covering density `V_d R^d / det` with `R` the covering radius (upper bracket).
pub fn lattice_density(lattice: &Lattice) -> f64 {
    let d = lattice.dim();
    unit_ball_volume(d) * lattice_covering_radius(lattice).upper.powi(d as i32) / lattice.det()
}

/// `#(L ∩ [-R, R]^d) · V_d ρ^d / (2R)^d` for each `R`.
pub fn density_by_counting(lattice: &Lattice, radii: &[f64]) -> Result<Vec<f64>> {
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidArgument("counting radii must be positive".into()));
    }
    let d = lattice.dim();
    let rho = lattice_covering_radius(lattice).upper;
    // Coefficients of points in the box are bounded through the inverse basis.
    let mut inv_rows = vec![vec![0.0; d]; d];
    for k in 0..d {
        let a: Vec<Vec<f64>> = (0..d).map(|r| (0..d).map(|c| lattice.generators[c][r]).collect()).collect();
        let e: Vec<f64> = (0..d).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        let col = solve(a, e).expect("nonsingular basis");
        for i in 0..d {
            inv_rows[i][k] = col[i];
        }
    }
    Ok(radii
        .iter()
        .map(|&r| {
            let bounds: Vec<i64> = inv_rows.iter().map(|row| (row.iter().map(|x| x.abs()).sum::<f64>() * r).ceil() as i64 + 1).collect();
            let mut c: Vec<i64> = bounds.iter().map(|b| -b).collect();
            let mut count = 0u64;
            'outer: loop {
                let p = combine(&lattice.generators, &c);
                if p.iter().all(|x| x.abs() <= r * (1.0 + 1e-12)) {
                    count += 1;
                }
                let mut pos = 0;
                loop {
                    if pos == d {
                        break 'outer;
                    }
                    c[pos] += 1;
                    if c[pos] <= bounds[pos] {
                        break;
                    }
                    c[pos] = -bounds[pos];
                    pos += 1;
                }
            }
            count as f64 * unit_ball_volume(d) * rho.powi(d as i32) / (2.0 * r).powi(d as i32)
        })
        .collect())
}

/// Bracket `(lower, upper)` on the covering number `N_{[0,1]^d}(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringCount {
    pub r: f64,
    /// Largest of the volume bound and a greedy `2r`-separated packing.
    pub lower: usize,
    /// Smallest N whose computed covering has certified radius at most `r`.
    pub upper: usize,
}

/// Covering number of the unit cube `[0,1]^d` by balls of radius `r`.
pub fn covering_count(d: usize, r: f64, opts: &CoverOptions) -> Result<CoveringCount> {
    let cube = DomainSet::cube(d);
    if !(r > 0.0 && r < cube.diameter()) {
        return Err(Error::InvalidArgument(format!("radius {r} must lie in (0, diam)")));
    }
    let volume_bound = (1.0 / (unit_ball_volume(d) * r.powi(d as i32))).ceil() as usize;
    let mesh = build_mesh(&cube, (0.1 * r).min(0.05))?;
    let mut packing: Vec<&[f64]> = Vec::new();
    for y in mesh.nodes() {
        if packing.iter().all(|p| dist2(p, y) > 4.0 * r * r) {
            packing.push(y);
        }
    }
    let lower = volume_bound.max(packing.len()).max(1);
    let covers = |n: usize| -> Result<bool> { Ok(best_covering(&cube, n, opts)?.radius.upper <= r * (1.0 + 1e-9)) };
    let mut hi = lower;
    while !covers(hi)? {
        hi = hi + hi.div_ceil(2);
    }
    let mut lo = lower;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if covers(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(CoveringCount { r, lower: lower.min(hi), upper: hi })
}

/// Seeded random planar lattices of covolume one.
pub fn random_planar_lattices(count: usize, seed: u64) -> Vec<Lattice> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: f64 = rng.random_range(0.3..1.0);
            let b: f64 = rng.random_range(-2.0..2.0);
            let angle: f64 = rng.random_range(0.0..std::f64::consts::PI);
            let (s, c) = angle.sin_cos();
            let g1 = [a, 0.0];
            let g2 = [b, 1.0 / a];
            let rot = |v: [f64; 2]| vec![c * v[0] - s * v[1], s * v[0] + c * v[1]];
            Lattice::new(vec![rot(g1), rot(g2)]).expect("unimodular")
        })
        .collect()
}

/// Options of [`gamma_chain_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GammaChainOptions {
    /// Radius for the covering-number leg.
    pub r: f64,
    /// N list for the covering-constant and polarization fits.
    pub n_list: Vec<usize>,
    pub s: f64,
    pub solver: SolverOptions,
    pub cover: CoverOptions,
}

impl Default for GammaChainOptions {
    fn default() -> Self {
        GammaChainOptions {
            r: 0.1,
            n_list: vec![8, 12, 16, 24],
            s: 16.0,
            solver: SolverOptions { restarts: 4, budget: 600, ..SolverOptions::default() },
            cover: CoverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaLeg {
    pub name: String,
    pub value: f64,
}

/// The four estimates of `Γ_d / V_d` on the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaChain {
    pub d: usize,
    /// `Γ_d / V_d` with `Γ_1 = 1` and `Γ_2 = 2π/√27`.
    pub target: f64,
    pub legs: Vec<GammaLeg>,
    /// Largest relative difference between two legs.
    pub max_gap: f64,
}

/// Thinnest covering density of `R^d` for `d ≤ 2`.
pub fn thinnest_density(d: usize) -> Option<f64> {
    match d {
        1 => Some(1.0),
        2 => Some(2.0 * std::f64::consts::PI / 27f64.sqrt()),
        _ => None,
    }
}

/// Tabulates `r^d N̂(r)`, `(lim N^{1/d} ρ̂)^d`, the best named lattice density over
/// `V_d`, and `σ̂^{-d/s}`, all estimates of `Γ_d / V_d`.
pub fn gamma_chain_check(d: usize, opts: &GammaChainOptions) -> Result<GammaChain> {
    let target = thinnest_density(d).ok_or_else(|| Error::Unsupported(format!("Γ_d is tabulated only for d ≤ 2, got {d}")))?
        / unit_ball_volume(d);
    let cube = DomainSet::cube(d);
    let count = covering_count(d, opts.r, &opts.cover)?;
    let cover = estimate_covering_constant(&cube, &opts.n_list, &opts.cover)?;
    let mut lattices = vec![Lattice::integer(d)?];
    if d >= 2 {
        lattices.push(Lattice::a_lattice(d)?);
        lattices.push(Lattice::a_dual_lattice(d)?);
    }
    let best_lattice = lattices.iter().map(lattice_density).fold(f64::INFINITY, f64::min);
    let sigma = estimate_sigma(&cube, opts.s, &opts.n_list, &opts.solver)?;
    let legs = vec![
        GammaLeg { name: "covering_number".into(), value: opts.r.powi(d as i32) * count.upper as f64 },
        GammaLeg { name: "covering_radius".into(), value: cover.fit.limit.powi(d as i32) },
        GammaLeg { name: "lattice".into(), value: best_lattice / unit_ball_volume(d) },
        GammaLeg { name: "polarization".into(), value: sigma.fit.limit.powf(-(d as f64) / opts.s) },
    ];
    let mut max_gap = 0.0f64;
    for a in &legs {
        for b in &legs {
            max_gap = max_gap.max((a.value - b.value).abs() / a.value.min(b.value));
        }
    }
    Ok(GammaChain { d, target, legs, max_gap })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEX_DENSITY: f64 = 1.2091995761561452;

    #[test]
    fn closed_forms() {
        let z1 = Lattice::integer(1).unwrap();
        assert!((lattice_covering_radius(&z1).upper - 0.5).abs() < 1e-12);
        assert!((lattice_density(&z1) - 1.0).abs() < 1e-12);
        let z2 = Lattice::integer(2).unwrap();
        assert!((lattice_covering_radius(&z2).upper - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((lattice_density(&z2) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let hex = Lattice::hexagonal();
        // Circumradius of the unit equilateral triangle.
        assert!((lattice_covering_radius(&hex).upper - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((lattice_density(&hex) - 2.0 * std::f64::consts::PI / 27f64.sqrt()).abs() < 1e-12);
        assert!((lattice_density(&hex) - HEX_DENSITY).abs() < 1e-12);
    }

    #[test]
    fn three_dimensional_lattices() {
        // Body-centred cubic: Z^3 ∪ (Z^3 + ½1), deep hole at (½, ¼, 0) with R = √5/4.
        let bcc = Lattice::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.5, 0.5, 0.5]]).unwrap();
        let r = lattice_covering_radius(&bcc);
        assert!(r.exact && (r.upper - 5f64.sqrt() / 4.0).abs() < 1e-12);
        let bcc_density = 4.0 / 3.0 * std::f64::consts::PI * (5f64.sqrt() / 4.0).powi(3) * 2.0;
        assert!((lattice_density(&bcc) - bcc_density).abs() < 1e-10);
        // A_3* is body-centred cubic and A_3 face-centred cubic, whose density is 2π/3.
        assert!((lattice_density(&Lattice::a_dual_lattice(3).unwrap()) - bcc_density).abs() < 1e-9);
        assert!((lattice_density(&Lattice::a_lattice(3).unwrap()) - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-9);
        assert!((lattice_density(&Lattice::a_lattice(2).unwrap()) - HEX_DENSITY).abs() < 1e-10);
        assert!((lattice_density(&Lattice::a_dual_lattice(2).unwrap()) - HEX_DENSITY).abs() < 1e-10);
    }

    #[test]
    fn higher_dimensions_bracket() {
        let z4 = Lattice::integer(4).unwrap();
        let r = lattice_covering_radius(&z4);
        assert!(r.lower <= 1.0 + 1e-12 && r.upper >= 1.0 - 1e-12 && r.upper - r.lower < 1e-9, "{r:?}");
        for d in [4, 5] {
            let r = lattice_covering_radius(&Lattice::a_dual_lattice(d).unwrap());
            assert!(r.lower <= r.upper + 1e-12 && r.upper - r.lower < 1e-6, "{d} {r:?}");
        }
    }

    #[test]
    fn scaling_law() {
        let hex = Lattice::hexagonal();
        let t = 3.7;
        let scaled = hex.scaled(t);
        assert!((lattice_covering_radius(&scaled).upper - t * lattice_covering_radius(&hex).upper).abs() < 1e-12);
        assert!((lattice_density(&scaled) - lattice_density(&hex)).abs() < 1e-12);
    }

    #[test]
    fn lll_preserves_lattice() {
        let skew = Lattice::new(vec![vec![1.0, 0.0], vec![7.5, 0.75f64.sqrt()]]).unwrap();
        let red = Lattice::new(skew.lll()).unwrap();
        assert!((red.det() - skew.det()).abs() < 1e-12);
        assert!((lattice_density(&skew) - HEX_DENSITY).abs() < 1e-10);
    }

    #[test]
    fn counting_converges() {
        let z2 = Lattice::integer(2).unwrap();
        let est = density_by_counting(&z2, &[10.0]).unwrap();
        assert!((est[0] - 441.0 / 400.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let radii = [10.0, 20.0, 40.0];
        let est = density_by_counting(&Lattice::hexagonal(), &radii).unwrap();
        // Boundary rows contribute O(R) points, so R times the relative error stays bounded.
        let scaled: Vec<f64> = est.iter().zip(radii).map(|(e, r)| (e - HEX_DENSITY).abs() / HEX_DENSITY * r).collect();
        assert!(scaled.iter().all(|&k| k <= 1.0), "{scaled:?}");
        assert!(scaled[2] / 40.0 < scaled[0] / 10.0);
    }

    #[test]
    fn hexagonal_is_thinnest_among_random_lattices() {
        let hex = lattice_density(&Lattice::hexagonal());
        for l in random_planar_lattices(100, 3) {
            let rho = lattice_density(&l);
            assert!(rho >= 1.0);
            assert!(hex <= rho + 1e-12);
        }
    }

    #[test]
    fn gamma_chain_in_one_dimension() {
        let opts = GammaChainOptions { n_list: vec![4, 6, 8, 12], s: 8.0, ..GammaChainOptions::default() };
        let g = gamma_chain_check(1, &opts).unwrap();
        assert_eq!(g.target, 0.5);
        for leg in &g.legs {
            assert!((leg.value - 0.5).abs() <= 0.15 * 0.5, "{g:?}");
        }
        assert!(gamma_chain_check(3, &opts).is_err());
    }

    #[test]
    fn singular_basis_rejected() {
        assert!(Lattice::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
    }

    #[test]
    fn covering_numbers() {
        let opts = CoverOptions::default();
        assert_eq!(covering_count(1, 0.1, &opts).unwrap().upper, 5);
        let c = covering_count(2, 0.75, &opts).unwrap();
        assert_eq!((c.lower, c.upper), (1, 1));
        let c = covering_count(2, 0.3, &opts).unwrap();
        assert!(c.lower <= c.upper);
    }
}
