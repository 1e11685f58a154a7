//! Polarization `P_s(A; ω) = min_{y∈A} Σ_j |y - x_j|^{-s}` and its maximization over
//! N-point configurations.

mod init;
mod inner;
mod solver;

pub use inner::{inner_min, inner_min_with, InnerMin, InnerOptions};
pub use solver::{evaluate, maximize_polarization, polarization_curve};


use serde::{Deserialize, Serialize};

use crate::geometry::{dist, Configuration, DomainSet};

/// Options of the outer maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Independent multi-start runs.
    pub restarts: usize,
    /// Ascent iterations per restart.
    pub budget: usize,
    /// Relative certification tolerance of the inner minimum.
    pub tol: f64,
    pub seed: u64,
    /// Mesh fill override; `None` uses the domain default for N points.
    pub fill: Option<f64>,
    /// Cell budget of the certifying branch-and-bound.
    pub max_cells: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { restarts: 16, budget: 2000, tol: 1e-4, seed: 0, fill: None, max_cells: 400_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub restarts: usize,
    pub iterations: usize,
    pub mesh_fill: f64,
    pub seed: u64,
    pub cells: usize,
    /// True when the configuration came from a closed form rather than the ascent.
    pub closed_form: bool,
}

/// A configuration together with its certified polarization value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationResult {
    pub domain: DomainSet,
    pub s: f64,
    pub n: usize,
    /// `P_s(A; config)`, the potential at `witness`.
    pub value: f64,
    pub log_value: f64,
    /// Near-global minimizer of the potential over the domain.
    pub witness: Vec<f64>,
    /// Certified interval `(lower, upper)` for the inner minimum.
    pub bracket: (f64, f64),
    pub log_bracket: (f64, f64),
    pub certified: bool,
    pub config: Configuration,
    pub stats: SolverStats,
}

impl PolarizationResult {
    /// `min_j |y* - x_j|`.
    pub fn witness_gap(&self) -> f64 {
        self.config.points().map(|x| dist(x, &self.witness)).fold(f64::INFINITY, f64::min)
    }

    /// `min_j |y* - x_j| · N^{1/d}`.
    pub fn scaled_witness_gap(&self) -> f64 {
        self.witness_gap() * (self.n as f64).powf(1.0 / self.domain.dim() as f64)
    }
}
