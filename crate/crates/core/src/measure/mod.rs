//! Finitely supported measures on the unit sphere.
//!
//! Subspace questions about a discrete measure only ever depend on which
//! atoms a subspace contains, and the smallest subspace containing a given
//! set of atoms is the span of those atoms. The candidates for the
//! subspace concentration condition are therefore the *flats* of the
//! support: spans of atom subsets, closed under adding every atom that
//! already lies in the span. Two flats with the same atoms have the same
//! projector, so flats are deduplicated by their atom sets.

mod scc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    coordinates, distance, distance_to_span, norm, orthonormal_complement, orthonormal_span,
    pairwise_sum, scale,
};
use crate::lp;
use crate::scalar::Real;

pub use scc::{
    check_scc, check_scc_essential, check_scc_with, SccCheck, SccOptions, SccReport, SccStatus,
    Verdict,
};

/// Largest support handled by the subspace enumeration.
pub const MAX_ATOMS: usize = 64;
/// Largest ambient dimension handled by the subspace enumeration.
pub const MAX_DIM: usize = 6;

/// Relative tolerance on the projector residual for subspace membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A point mass `w` at the unit vector `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct Atom<T> {
    pub u: Vec<T>,
    pub w: T,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
struct RawMeasure<T> {
    dim: usize,
    atoms: Vec<Atom<T>>,
}

/// Validated discrete measure: unit directions, pairwise distinct, positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawMeasure<T>",
    bound(deserialize = "T: Real", serialize = "T: Serialize")
)]
pub struct DiscreteMeasure<T> {
    dim: usize,
    atoms: Vec<Atom<T>>,
}

impl<T: Real> TryFrom<RawMeasure<T>> for DiscreteMeasure<T> {
    type Error = Error;

    fn try_from(r: RawMeasure<T>) -> Result<Self> {
        Self::new(r.dim, r.atoms)
    }
}

impl<T: Real> DiscreteMeasure<T> {
    /// Validates and renormalises directions within `1e-9` of unit length.
    pub fn new(dim: usize, atoms: Vec<Atom<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("dimension must be positive".into()));
        }
        if atoms.is_empty() {
            return Err(Error::Domain("measure has no atoms".into()));
        }
        let unit_tol = T::tol(1e-9);
        let mut out: Vec<Atom<T>> = Vec::with_capacity(atoms.len());
        for (i, a) in atoms.into_iter().enumerate() {
            if a.u.len() != dim {
                return Err(Error::Dimension(format!(
                    "atom {i} has length {}, expected {dim}",
                    a.u.len()
                )));
            }
            if !(a.w > T::zero()) || !a.w.is_finite() {
                return Err(Error::Domain(format!("atom {i} has weight {}", a.w)));
            }
            let r = norm(&a.u);
            if !((r - T::one()).abs() <= unit_tol) {
                return Err(Error::Domain(format!("atom {i} direction has norm {r}")));
            }
            let u = scale(&a.u, r.recip());
            if let Some(j) = out.iter().position(|b| distance(&b.u, &u) <= unit_tol) {
                return Err(Error::Domain(format!("atoms {j} and {i} share a direction")));
            }
            out.push(Atom { u, w: a.w });
        }
        Ok(Self { dim, atoms: out })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn directions(&self) -> Vec<Vec<T>> {
        self.atoms.iter().map(|a| a.u.clone()).collect()
    }

    pub fn total_mass(&self) -> T {
        let w: Vec<T> = self.atoms.iter().map(|a| a.w).collect();
        pairwise_sum(&w)
    }

    /// Weight of the atom at `u` (within `angle_tol` radians), if any.
    pub fn weight_at(&self, u: &[T], angle_tol: T) -> Option<T> {
        let un = norm(u);
        self.atoms
            .iter()
            .find(|a| distance(&a.u, &scale(u, un.recip())) <= angle_tol)
            .map(|a| a.w)
    }

    /// Sum of two measures. Atoms in a common direction are merged.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::Dimension("measures of different dimension".into()));
        }
        let mut atoms = self.atoms.clone();
        let tol = T::tol(1e-9);
        for b in &other.atoms {
            match atoms.iter_mut().find(|a| distance(&a.u, &b.u) <= tol) {
                Some(a) => a.w += b.w,
                None => atoms.push(b.clone()),
            }
        }
        Self::new(self.dim, atoms)
    }

    /// Every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                u: a.u.clone(),
                w: a.w * c,
            })
            .collect();
        Self::new(self.dim, atoms)
    }

    /// Image under a map of the directions (normally orthogonal).
    pub fn map_directions(&self, f: impl Fn(&[T]) -> Vec<T>) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                u: f(&a.u),
                w: a.w,
            })
            .collect();
        Self::new(self.dim, atoms)
    }
}

/// A closed vector `v ≠ 0` with `⟨u, v⟩ ≥ 0` for every `u` in `dirs`,
/// i.e. a closed hemisphere containing them, or `None`.
///
/// Solved as the LP `max ⟨Σu, v⟩` subject to `⟨u, v⟩ ≥ 0` and
/// `-1 ≤ v_k ≤ 1`. A positive optimum is a witness; a zero optimum
/// means every feasible `v` is orthogonal to all of `dirs`, which leaves
/// a witness only when they fail to span.
pub fn hemisphere_witness<T: Real>(dirs: &[Vec<T>], dim: usize) -> Result<Option<Vec<T>>> {
    if dirs.is_empty() {
        return Ok(Some(crate::linalg::unit_vector(dim, 0)));
    }
    let m = dirs.len();
    let mut c = vec![T::zero(); 2 * dim];
    for u in dirs {
        for k in 0..dim {
            c[k] += u[k];
            c[dim + k] -= u[k];
        }
    }
    let mut a = Vec::with_capacity(m + 2 * dim);
    let mut b = Vec::with_capacity(m + 2 * dim);
    for u in dirs {
        let mut row = vec![T::zero(); 2 * dim];
        for k in 0..dim {
            row[k] = -u[k];
            row[dim + k] = u[k];
        }
        a.push(row);
        b.push(T::zero());
    }
    for k in 0..2 * dim {
        let mut row = vec![T::zero(); 2 * dim];
        row[k] = T::one();
        a.push(row);
        b.push(T::one());
    }
    let sol = lp::maximize(&c, &a, &b)?
        .ok_or_else(|| Error::Internal("bounded hemisphere LP reported unbounded".into()))?;
    if sol.objective > T::tol(1e-9) * T::count(m) {
        let v: Vec<T> = (0..dim).map(|k| sol.x[k] - sol.x[dim + k]).collect();
        if let Some(v) = crate::linalg::normalized(&v) {
            return Ok(Some(v));
        }
    }
    let refs: Vec<&[T]> = dirs.iter().map(|u| &u[..]).collect();
    let span = orthonormal_span(&refs, T::tol(MEMBERSHIP_TOL));
    if span.len() < dim {
        return Ok(orthonormal_complement(&span, dim).into_iter().next());
    }
    Ok(None)
}

/// Closed-hemisphere witness for the support of `mu`, if one exists.
pub fn is_hemisphere_concentrated<T: Real>(mu: &DiscreteMeasure<T>) -> Result<Option<Vec<T>>> {
    hemisphere_witness(&mu.directions(), mu.dim())
}

/// A flat of the support: a subspace spanned by the atoms it contains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct Subspace<T> {
    /// Orthonormal basis.
    pub basis: Vec<Vec<T>>,
    /// Indices of the atoms lying in the subspace, ascending.
    pub atom_ids: Vec<usize>,
}

impl<T> Subspace<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn closure<T: Real>(dirs: &[Vec<T>], generators: &[&[T]]) -> (Vec<Vec<T>>, u64) {
    let tol = T::tol(MEMBERSHIP_TOL);
    let basis = orthonormal_span(generators, tol);
    let mut mask = 0u64;
    for (i, u) in dirs.iter().enumerate() {
        if distance_to_span(u, &basis) <= tol {
            mask |= 1 << i;
        }
    }
    (basis, mask)
}

fn check_limits(n: usize, m: usize) -> Result<()> {
    if m > MAX_ATOMS {
        return Err(Error::Capacity(format!("{m} atoms exceed the limit of {MAX_ATOMS}")));
    }
    if n > MAX_DIM {
        return Err(Error::Capacity(format!("dimension {n} exceeds the limit of {MAX_DIM}")));
    }
    Ok(())
}

/// All proper nonzero flats of the support, sorted by dimension and then
/// by atom set.
pub fn candidate_subspaces<T: Real>(mu: &DiscreteMeasure<T>) -> Result<Vec<Subspace<T>>> {
    let n = mu.dim();
    let dirs = mu.directions();
    check_limits(n, dirs.len())?;
    let mut seen = std::collections::HashSet::new();
    let mut out: Vec<(Vec<Vec<T>>, u64)> = Vec::new();
    let mut level: Vec<(Vec<Vec<T>>, u64)> = Vec::new();
    for u in &dirs {
        let (b, mask) = closure(&dirs, &[&u[..]]);
        if b.len() < n && seen.insert(mask) {
            level.push((b, mask));
        }
    }
    while !level.is_empty() {
        let mut next = Vec::new();
        for (basis, mask) in &level {
            if basis.len() + 1 >= n {
                continue;
            }
            for (j, u) in dirs.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    continue;
                }
                let mut gens: Vec<&[T]> = basis.iter().map(|b| &b[..]).collect();
                gens.push(u);
                let (b, m) = closure(&dirs, &gens);
                if b.len() < n && seen.insert(m) {
                    next.push((b, m));
                }
            }
        }
        out.append(&mut level);
        level = next;
    }
    let mut subs: Vec<Subspace<T>> = out
        .into_iter()
        .map(|(basis, mask)| Subspace {
            basis,
            atom_ids: (0..dirs.len()).filter(|&i| mask >> i & 1 == 1).collect(),
        })
        .collect();
    subs.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.atom_ids.cmp(&b.atom_ids)));
    Ok(subs)
}

/// Whether the atoms of `mu` inside `sub` fail to lie in a closed
/// hemisphere of `sub`.
pub fn is_essential<T: Real>(mu: &DiscreteMeasure<T>, sub: &Subspace<T>) -> Result<bool> {
    let local: Vec<Vec<T>> = sub
        .atom_ids
        .iter()
        .map(|&i| coordinates(&mu.atoms()[i].u, &sub.basis))
        .collect();
    Ok(hemisphere_witness(&local, sub.dim())?.is_none())
}
