use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{orthonormal_complement, orthonormal_span, pairwise_sum};
use crate::scalar::Real;

use super::{candidate_subspaces, is_essential, DiscreteMeasure, Subspace, MEMBERSHIP_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SccStatus {
    Strict,
    EqualityWithComplement,
    EqualityWithoutComplement,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
}

/// The condition `μ(L ∩ S^{n-1}) ≤ (dim L / n) μ(S^{n-1})` on one subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct SccReport<T> {
    pub subspace_basis: Vec<Vec<T>>,
    pub dim: usize,
    pub atom_ids: Vec<usize>,
    pub mass_in: T,
    pub bound: T,
    /// `bound - mass_in`.
    pub slack: T,
    pub status: SccStatus,
    /// Complementary subspace carrying the remaining mass, in the equality case.
    pub complement_basis: Option<Vec<Vec<T>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct SccCheck<T> {
    pub verdict: Verdict,
    pub total_mass: T,
    pub equality_tol: T,
    pub reports: Vec<SccReport<T>>,
}

impl<T> SccCheck<T> {
    pub fn satisfied(&self) -> bool {
        self.verdict == Verdict::Satisfied
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SccOptions {
    /// `|slack|` below this times the total mass counts as equality.
    pub equality_tol: f64,
    /// Keep only essential subspaces.
    pub essential_only: bool,
}

impl Default for SccOptions {
    fn default() -> Self {
        Self {
            equality_tol: 1e-8,
            essential_only: false,
        }
    }
}

/// Checks every candidate subspace.
pub fn check_scc<T: Real>(mu: &DiscreteMeasure<T>) -> Result<SccCheck<T>> {
    check_scc_with(mu, &SccOptions::default())
}

/// Checks the essential candidate subspaces only.
pub fn check_scc_essential<T: Real>(mu: &DiscreteMeasure<T>) -> Result<SccCheck<T>> {
    check_scc_with(
        mu,
        &SccOptions {
            essential_only: true,
            ..SccOptions::default()
        },
    )
}

pub fn check_scc_with<T: Real>(mu: &DiscreteMeasure<T>, opts: &SccOptions) -> Result<SccCheck<T>> {
    let total = mu.total_mass();
    let tol = T::tol(opts.equality_tol) * total;
    let mut reports = Vec::new();
    for sub in candidate_subspaces(mu)? {
        if opts.essential_only && !is_essential(mu, &sub)? {
            continue;
        }
        reports.push(report(mu, &sub, total, tol));
    }
    let ok = reports.iter().all(|r| {
        !matches!(
            r.status,
            SccStatus::Violated | SccStatus::EqualityWithoutComplement
        )
    });
    Ok(SccCheck {
        verdict: if ok { Verdict::Satisfied } else { Verdict::Violated },
        total_mass: total,
        equality_tol: tol,
        reports,
    })
}

fn report<T: Real>(mu: &DiscreteMeasure<T>, sub: &Subspace<T>, total: T, tol: T) -> SccReport<T> {
    let n = mu.dim();
    let d = sub.dim();
    let w: Vec<T> = sub.atom_ids.iter().map(|&i| mu.atoms()[i].w).collect();
    let mass_in = pairwise_sum(&w);
    let bound = T::count(d) / T::count(n) * total;
    let slack = bound - mass_in;
    let (status, complement_basis) = if slack < -tol {
        (SccStatus::Violated, None)
    } else if slack > tol {
        (SccStatus::Strict, None)
    } else {
        match complement(mu, sub) {
            Some(c) => (SccStatus::EqualityWithComplement, Some(c)),
            None => (SccStatus::EqualityWithoutComplement, None),
        }
    };
    SccReport {
        subspace_basis: sub.basis.clone(),
        dim: d,
        atom_ids: sub.atom_ids.clone(),
        mass_in,
        bound,
        slack,
        status,
        complement_basis,
    }
}

/// A subspace `L̃` with `L ∩ L̃ = {0}`, `dim L + dim L̃ = n` and
/// `supp μ ⊂ L ∪ L̃`. It must contain every atom outside `L`, so it exists
/// iff the span of those atoms meets `L` trivially; it is then padded to
/// the right dimension. In the equality case its mass is automatically
/// `(n - dim L)/n` of the total.
fn complement<T: Real>(mu: &DiscreteMeasure<T>, sub: &Subspace<T>) -> Option<Vec<Vec<T>>> {
    let n = mu.dim();
    let d = sub.dim();
    let tol = T::tol(MEMBERSHIP_TOL);
    let rest: Vec<&[T]> = mu
        .atoms()
        .iter()
        .enumerate()
        .filter(|(i, _)| !sub.atom_ids.contains(i))
        .map(|(_, a)| &a.u[..])
        .collect();
    if rest.is_empty() {
        return None;
    }
    let r = orthonormal_span(&rest, tol);
    if r.len() + d > n {
        return None;
    }
    let mut joint: Vec<&[T]> = sub.basis.iter().map(|b| &b[..]).collect();
    joint.extend(r.iter().map(|b| &b[..]));
    let joint_basis = orthonormal_span(&joint, tol);
    if joint_basis.len() != d + r.len() {
        return None;
    }
    let mut out = r;
    let pad = orthonormal_complement(&joint_basis, n);
    out.extend(pad.into_iter().take(n - d - out.len()));
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    fn atom(u: &[f64], w: f64) -> Atom<f64> {
        Atom { u: u.to_vec(), w }
    }

    #[test]
    fn cube_is_all_equality() {
        let mut atoms = Vec::new();
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut u = vec![0.0; 3];
                u[k] = s;
                atoms.push(atom(&u, 4.0 / 3.0));
            }
        }
        let mu = DiscreteMeasure::new(3, atoms).unwrap();
        let c = check_scc(&mu).unwrap();
        assert!(c.satisfied());
        assert_eq!(c.reports.len(), 6);
        for r in &c.reports {
            assert_eq!(r.status, SccStatus::EqualityWithComplement);
            assert_eq!(r.complement_basis.as_ref().unwrap().len(), 3 - r.dim);
        }
        assert_eq!(check_scc_essential(&mu).unwrap(), c);
    }

    #[test]
    fn heavy_atom_violates() {
        let s = 0.5f64.sqrt();
        let mu = DiscreteMeasure::new(
            2,
            vec![atom(&[1.0, 0.0], 0.9), atom(&[-s, s], 0.05), atom(&[-s, -s], 0.05)],
        )
        .unwrap();
        let c = check_scc(&mu).unwrap();
        assert_eq!(c.verdict, Verdict::Violated);
        assert_eq!(c.reports[0].status, SccStatus::Violated);
        assert_eq!(c.reports[0].atom_ids, vec![0]);
    }

    #[test]
    fn equality_without_complement() {
        // half the mass on the e1 axis, but the other atoms span the whole plane
        let s = 0.6f64;
        let t = 0.8f64;
        let mu = DiscreteMeasure::new(
            2,
            vec![atom(&[1.0, 0.0], 1.0), atom(&[-1.0, 0.0], 1.0), atom(&[s, t], 1.0), atom(&[-s, -t], 0.5), atom(&[0.0, 1.0], 0.5)],
        )
        .unwrap();
        let c = check_scc(&mu).unwrap();
        let axis = c.reports.iter().find(|r| r.atom_ids == vec![0, 1]).unwrap();
        assert!(axis.slack.abs() < 1e-12);
        assert_eq!(axis.status, SccStatus::EqualityWithoutComplement);
        assert_eq!(c.verdict, Verdict::Violated);
    }

    #[test]
    fn inessential_plane_is_excluded() {
        let s = 0.5f64.sqrt();
        let mu = DiscreteMeasure::new(
            3,
            vec![
                atom(&[1.0, 0.0, 0.0], 1.0),
                atom(&[0.0, 1.0, 0.0], 1.0),
                atom(&[s, s, 0.0], 1.0),
                atom(&[0.0, 0.0, 1.0], 1.0),
                atom(&[-s, 0.0, -s], 1.0),
            ],
        );
        let mu = mu.unwrap();
        let all = check_scc(&mu).unwrap();
        let ess = check_scc_essential(&mu).unwrap();
        let plane = vec![0usize, 1, 2];
        assert!(all.reports.iter().any(|r| r.atom_ids == plane));
        assert!(!ess.reports.iter().any(|r| r.atom_ids == plane));
        for r in &ess.reports {
            assert!(all.reports.iter().any(|q| q.atom_ids == r.atom_ids));
        }
    }
}
