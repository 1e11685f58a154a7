//! Numerical tools for optimal Riesz s-polarization (Chebyshev) configurations.
//!
//! The crate computes `P_s(A; ω) = min_{y ∈ A} Σ_j |y - x_j|^{-s}` with a certified
//! branch-and-bound inner minimization, maximizes it over N-point configurations,
//! and measures what the optimal configurations look like: covering radius,
//! separation, weak separation, boundary repulsion and equidistribution.
//! It also extrapolates the large-N and large-s limits and computes covering
//! densities of lattices.
//!
//! Supported domains are the unit cube, balls, ellipsoids, spheres and spherical caps
//! (see [`DomainSet`]). Distances are chordal (ambient Euclidean) everywhere.

pub mod asymptotics;
pub mod covering;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod meb;
pub mod polarization;
pub mod quad;
pub mod riesz;
pub mod simplex_qp;
mod square;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{Configuration, DomainSet, Mesh, Point};
pub use polarization::{PolarizationResult, SolverOptions};
pub use riesz::RieszParam;
