//! JSON interchange: `{"dim": n, "vertices": [[..], ..]}` in, the same plus
//! `facets` and `volume` out.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{Facet, HullOptions, Polytope};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct PolytopeInput<T> {
    pub dim: usize,
    pub vertices: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct PolytopeOutput<T> {
    pub dim: usize,
    pub vertices: Vec<Vec<T>>,
    pub facets: Vec<Facet<T>>,
    pub volume: T,
}

impl<T: Real> PolytopeInput<T> {
    pub fn build(&self) -> Result<Polytope<T>> {
        self.build_with(&HullOptions::default())
    }

    pub fn build_with(&self, opts: &HullOptions) -> Result<Polytope<T>> {
        if let Some(bad) = self.vertices.iter().find(|v| v.len() != self.dim) {
            return Err(Error::Dimension(format!(
                "vertex of length {} in a {}-dimensional input",
                bad.len(),
                self.dim
            )));
        }
        Polytope::from_points(&self.vertices, self.dim, opts)
    }
}

impl<T: Real> From<&Polytope<T>> for PolytopeOutput<T> {
    fn from(p: &Polytope<T>) -> Self {
        Self {
            dim: p.dim(),
            vertices: p.vertices().to_vec(),
            facets: p.facets().to_vec(),
            volume: p.volume(),
        }
    }
}

impl<T: Real> From<&Polytope<T>> for PolytopeInput<T> {
    fn from(p: &Polytope<T>) -> Self {
        Self {
            dim: p.dim(),
            vertices: p.vertices().to_vec(),
        }
    }
}
