//! Full-dimensional convex polytopes given by vertices.
//!
//! A [`Polytope`] is built once from a point cloud and is immutable
//! afterwards. Facets carry their outer unit normal, offset `h_P(normal)`,
//! the ids of the vertices they contain and their `(n-1)`-dimensional
//! measure, which is all the cone volume measure needs:
//!
//! ```text
//! V_P = Σ_i (offset_i · measure_i / n) δ_{normal_i}
//! ```
//!
//! Tolerances are relative to the diameter of the body.

mod hull;
pub mod io;
mod random;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::linalg::{dot, norm};
use crate::measure::{Atom, DiscreteMeasure};
use crate::scalar::Real;

pub use random::{random_polytope, random_unit, RandomOptions};

/// One facet of a polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet<T> {
    /// Outer unit normal.
    pub normal: Vec<T>,
    /// Support value in the direction of `normal`.
    pub offset: T,
    /// Indices into [`Polytope::vertices`], ascending.
    pub vertex_ids: Vec<usize>,
    /// `(n-1)`-dimensional measure.
    pub measure: T,
}

/// Limits and tolerances for hull construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullOptions {
    /// Coplanarity tolerance relative to the diameter.
    pub coplanar_tol: f64,
    pub max_points: usize,
    pub max_dim: usize,
}

impl Default for HullOptions {
    fn default() -> Self {
        Self {
            coplanar_tol: 1e-9,
            max_points: 500,
            max_dim: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope<T> {
    dim: usize,
    vertices: Vec<Vec<T>>,
    facets: Vec<Facet<T>>,
    volume: T,
    diameter: T,
    tol: T,
}

/// Convex hull of `points` in dimension `dim`.
pub fn hull_from_vertices<T: Real>(points: &[Vec<T>], dim: usize) -> Result<Polytope<T>> {
    Polytope::from_points(points, dim, &HullOptions::default())
}

impl<T: Real> Polytope<T> {
    /// Convex hull of `points`; the dimension is taken from the first point.
    pub fn from_vertices(points: &[Vec<T>]) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Dimension("no points".into()))?;
        Self::from_points(points, dim, &HullOptions::default())
    }

    pub fn from_points(points: &[Vec<T>], dim: usize, opts: &HullOptions) -> Result<Self> {
        hull::validate(points, dim, opts)?;
        let rel = T::tol(opts.coplanar_tol);
        let h = hull::build(points, dim, rel)?;
        if !(h.volume > T::zero()) {
            return Err(Error::Dimension("hull has zero volume".into()));
        }
        Ok(Self {
            dim,
            vertices: h.vertices,
            facets: h.facets,
            volume: h.volume,
            diameter: h.diameter,
            tol: rel * h.diameter,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<T>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet<T>] {
        &self.facets
    }

    pub fn volume(&self) -> T {
        self.volume
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    /// Absolute tolerance used for incidence tests (`1e-9 · diameter` by default).
    pub fn tolerance(&self) -> T {
        self.tol
    }

    /// `(n-1)`-measure of the boundary.
    pub fn surface_area(&self) -> T {
        self.facets.iter().map(|f| f.measure).sum()
    }

    /// `h_P(u) = max_v ⟨v, u⟩`.
    pub fn support(&self, u: &[T]) -> T {
        self.vertices
            .iter()
            .map(|v| dot(v, u))
            .fold(T::neg_infinity(), T::max)
    }

    /// Ids of the vertices on the face `F(P, u)`.
    pub fn face_ids(&self, u: &[T]) -> Vec<usize> {
        let h = self.support(u);
        let scale = norm(u);
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| dot(v, u) >= h - self.tol * scale)
            .map(|(i, _)| i)
            .collect()
    }

    /// Vertices of the face `F(P, u)`.
    pub fn face(&self, u: &[T]) -> Vec<Vec<T>> {
        self.face_ids(u).into_iter().map(|i| self.vertices[i].clone()).collect()
    }

    /// Index of the facet whose normal is within `angle_tol` radians of `u`.
    pub fn facet_with_normal(&self, u: &[T], angle_tol: T) -> Option<usize> {
        let u = crate::linalg::normalized(u)?;
        // chord length, since cos(angle_tol) rounds to one for tiny angles
        let chord = |f: &Facet<T>| crate::linalg::distance(&f.normal, &u);
        self.facets
            .iter()
            .enumerate()
            .filter(|(_, f)| chord(f) <= angle_tol)
            .min_by(|a, b| {
                chord(a.1)
                    .partial_cmp(&chord(b.1))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|(i, _)| i)
    }

    /// True iff every facet offset exceeds the incidence tolerance.
    pub fn contains_origin_interior(&self) -> bool {
        self.facets.iter().all(|f| f.offset > self.tol)
    }

    /// True iff `x` satisfies every facet inequality up to `slack`.
    pub fn contains(&self, x: &[T], slack: T) -> bool {
        self.facets.iter().all(|f| dot(&f.normal, x) <= f.offset + slack)
    }

    /// One atom per facet with weight `offset · measure / n`.
    pub fn cone_volume_measure(&self) -> Result<DiscreteMeasure<T>> {
        if !self.contains_origin_interior() {
            return Err(precondition("origin is not interior to the polytope"));
        }
        let n = T::count(self.dim);
        let atoms = self
            .facets
            .iter()
            .map(|f| Atom {
                u: f.normal.clone(),
                w: f.offset * f.measure / n,
            })
            .collect();
        DiscreteMeasure::new(self.dim, atoms)
    }

    /// Pairs of vertices joined by an edge, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let nv = self.vertices.len();
        let mut of_vertex: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (f, facet) in self.facets.iter().enumerate() {
            for &v in &facet.vertex_ids {
                of_vertex[v].push(f);
            }
        }
        let mut out = Vec::new();
        for i in 0..nv {
            for j in i + 1..nv {
                let shared: Vec<&[T]> = of_vertex[i]
                    .iter()
                    .filter(|f| of_vertex[j].contains(f))
                    .map(|&f| &self.facets[f].normal[..])
                    .collect();
                if shared.len() + 1 < self.dim {
                    continue;
                }
                let rank = crate::linalg::orthonormal_span(&shared, T::tol(1e-7)).len();
                if rank + 1 >= self.dim {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Hull of the images of the vertices under `f`.
    pub fn map_vertices(&self, f: impl Fn(&[T]) -> Vec<T>) -> Result<Self> {
        let pts: Vec<Vec<T>> = self.vertices.iter().map(|v| f(v)).collect();
        let dim = pts[0].len();
        Self::from_points(&pts, dim, &HullOptions::default())
    }

    /// `Σ measure_i · normal_i`, which vanishes for a closed polytope.
    pub fn minkowski_sum_of_normals(&self) -> Vec<T> {
        let mut s = vec![T::zero(); self.dim];
        for f in &self.facets {
            for (a, &x) in s.iter_mut().zip(&f.normal) {
                *a += f.measure * x;
            }
        }
        s
    }
}
