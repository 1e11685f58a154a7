use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::DomainSet;
use crate::error::{Error, Result};

/// A point of `R^ℓ` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("point coordinates must be finite".into()));
        }
        Ok(Point(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

/// An N-point multiset in `R^ℓ`, stored as a flat coordinate array.
///
/// Repeated points are allowed; `len()` counts multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Configuration {
    dim: usize,
    coords: Vec<f64>,
}

impl Configuration {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("configuration dimension must be positive".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("configuration coordinates must be finite".into()));
        }
        Ok(Configuration { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.as_ref().len())
            .ok_or_else(|| Error::InvalidArgument("empty configuration".into()))?;
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            coords.extend_from_slice(p);
        }
        Configuration::new(dim, coords)
    }

    /// Number of points, counting multiplicity.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Ambient dimension of the points.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: p.len() });
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub fn to_points(&self) -> Vec<Vec<f64>> {
        self.points().map(|p| p.to_vec()).collect()
    }

    /// Sorts the points lexicographically; the canonical ordering used for ties.
    pub fn canonicalize(&mut self) {
        let mut pts = self.to_points();
        pts.sort_by(|a, b| lex_cmp(a, b));
        self.coords = pts.concat();
    }

    pub fn canonical(&self) -> Configuration {
        let mut c = self.clone();
        c.canonicalize();
        c
    }

    /// Fails unless every point lies in `domain` up to `tol`.
    pub fn check_in(&self, domain: &DomainSet, tol: f64) -> Result<()> {
        if self.dim != domain.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: domain.ambient_dim(), got: self.dim });
        }
        if self.points().all(|p| domain.contains_unchecked(p, tol)) {
            Ok(())
        } else {
            Err(Error::NotInDomain)
        }
    }
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

impl TryFrom<Vec<Vec<f64>>> for Configuration {
    type Error = Error;
    fn try_from(v: Vec<Vec<f64>>) -> Result<Self> {
        Configuration::from_points(&v)
    }
}

impl From<Configuration> for Vec<Vec<f64>> {
    fn from(c: Configuration) -> Self {
        c.to_points()
    }
}
