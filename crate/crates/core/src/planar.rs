//! Planar polygons with prescribed cone volumes, and the pentagon family
//! `μ_ε` built on five fixed normals.
//!
//! For normals `u_1, …, u_m` in counter-clockwise order with consecutive
//! angles `δ_i` (from `u_i` to `u_{i+1}`), the edge lengths of
//! `{x : ⟨x, u_i⟩ ≤ h_i}` are, while all of them stay positive,
//!
//! ```text
//! ℓ_i = (h_{i-1} - h_i cos δ_{i-1}) / sin δ_{i-1} + (h_{i+1} - h_i cos δ_i) / sin δ_i
//! ```
//!
//! and the cone volumes are `h_i ℓ_i / 2`. The solver runs damped Newton on
//! `h_i ℓ_i(h) / (2 t_i) = 1`, rejecting any step on which an edge length
//! or a support number stops being positive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Error, Result};
use crate::linalg::solve;
use crate::measure::{Atom, DiscreteMeasure};
use crate::scalar::Real;

/// `u₁ … u₅` with `u₄ = -u₁`, `⟨u₁,u₂⟩ = 1/√2`, `⟨u₄,u₃⟩ = ⟨u₄,u₅⟩ = 2/√5`.
///
/// The inner products fix the configuration up to an isometry; this is one
/// realisation, listed clockwise.
pub fn pentagon_directions<T: Real>() -> Vec<Vec<T>> {
    let h = T::FRAC_1_SQRT_2();
    let r5 = T::lit(5.0).sqrt().recip();
    let two = T::lit(2.0);
    vec![
        vec![T::zero(), T::one()],
        vec![h, h],
        vec![r5, -two * r5],
        vec![T::zero(), -T::one()],
        vec![-r5, -two * r5],
    ]
}

fn check_config<T: Real>(alpha: T, beta: T) -> Result<()> {
    if !(alpha > beta && beta > T::zero()) {
        return Err(domain(format!("need alpha > beta > 0, got ({alpha}, {beta})")));
    }
    let s = alpha.sqrt() + beta.sqrt();
    if (s - T::one()).abs() > T::tol(1e-12) {
        return Err(domain(format!("need sqrt(alpha) + sqrt(beta) = 1, got {s}")));
    }
    Ok(())
}

/// The probability measure with `(1-ε)α` at `u₁`, `(1-ε)β` at `u₄` and a
/// third of the rest at each of `u₂, u₃, u₅`.
pub fn mu_epsilon<T: Real>(alpha: T, beta: T, eps: T) -> Result<DiscreteMeasure<T>> {
    check_config(alpha, beta)?;
    if !(eps > T::zero() && eps <= T::lit(0.5)) {
        return Err(domain(format!("eps must lie in (0, 1/2], got {eps}")));
    }
    let keep = T::one() - eps;
    let rest = (T::one() - keep * (alpha + beta)) / T::lit(3.0);
    let w = [keep * alpha, rest, rest, keep * beta, rest];
    let atoms = pentagon_directions::<T>()
        .into_iter()
        .zip(w)
        .map(|(u, w)| Atom { u, w })
        .collect();
    DiscreteMeasure::new(2, atoms)
}

/// Smallest `ε` with `(1-ε)(α+β) < 1/2`, i.e. `1 - 1/(2(α+β))`.
pub fn theorem_b_threshold<T: Real>(alpha: T, beta: T) -> T {
    T::one() - T::one() / (T::lit(2.0) * (alpha + beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Solved,
    InfeasibleNegativeSupport,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct FeasibilityRecord<T> {
    pub epsilon: Option<T>,
    pub target: DiscreteMeasure<T>,
    pub outcome: Outcome,
    /// Support numbers in the order of the input normals.
    pub support_numbers: Option<Vec<T>>,
    pub edge_lengths: Option<Vec<T>>,
    /// `max_i |c_i / t_i - 1|` at the best iterate found.
    pub residual: T,
    pub iterations: usize,
    pub restarts: usize,
    /// `ℓ₁ / ℓ₄` for pentagon instances.
    pub trapezoid_ratio: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub seed: u64,
    /// Jittered restarts after the first attempt.
    pub restarts: usize,
    pub max_iterations: usize,
    /// Newton stops once the residual is below this.
    pub tol: f64,
    /// A stalled attempt still counts as solved below this residual.
    pub accept_tol: f64,
    /// Relative size of the restart jitter.
    pub jitter: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 10,
            max_iterations: 200,
            tol: 1e-13,
            accept_tol: 1e-10,
            jitter: 0.3,
        }
    }
}

/// Angular data of the normal fan, in counter-clockwise order.
struct Fan<T> {
    /// `perm[k]` is the input index of the `k`-th normal counter-clockwise.
    perm: Vec<usize>,
    cot: Vec<T>,
    csc: Vec<T>,
}

impl<T: Real> Fan<T> {
    fn new(normals: &[Vec<T>]) -> Result<Self> {
        let m = normals.len();
        if m < 3 {
            return Err(precondition("need at least three normals"));
        }
        for u in normals {
            if u.len() != 2 {
                return Err(Error::Dimension("normals must be planar".into()));
            }
        }
        let gap = |a: &[T], b: &[T]| (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
        let gaps: Vec<T> = (0..m).map(|i| gap(&normals[i], &normals[(i + 1) % m])).collect();
        let total: T = gaps.iter().copied().sum();
        let two_pi = T::PI() + T::PI();
        let close = |x: T, y: T| (x - y).abs() < T::tol(1e-9);
        let margin = T::tol(1e-12);
        let perm: Vec<usize> = if gaps.iter().all(|&g| g > margin && g < T::PI() - margin) && close(total, two_pi) {
            (0..m).collect()
        } else if gaps.iter().all(|&g| g < -margin && g > margin - T::PI()) && close(total, -two_pi) {
            (0..m).rev().collect()
        } else {
            return Err(precondition(
                "normals must be in strict angular order with every gap below π",
            ));
        };
        let mut cot = Vec::with_capacity(m);
        let mut csc = Vec::with_capacity(m);
        for k in 0..m {
            let (a, b) = (&normals[perm[k]], &normals[perm[(k + 1) % m]]);
            let d = gap(a, b);
            cot.push(d.cos() / d.sin());
            csc.push(d.sin().recip());
        }
        Ok(Self { perm, cot, csc })
    }

    fn lengths(&self, h: &[T]) -> Vec<T> {
        let m = h.len();
        (0..m)
            .map(|i| {
                let p = (i + m - 1) % m;
                let q = (i + 1) % m;
                (h[p] * self.csc[p] - h[i] * self.cot[p]) + (h[q] * self.csc[i] - h[i] * self.cot[i])
            })
            .collect()
    }

    /// `∂ℓ_i / ∂h_j`.
    #[allow(clippy::needless_range_loop)]
    fn length_jacobian(&self, m: usize) -> Vec<Vec<T>> {
        let mut j = vec![vec![T::zero(); m]; m];
        for i in 0..m {
            let p = (i + m - 1) % m;
            let q = (i + 1) % m;
            j[i][i] -= self.cot[p] + self.cot[i];
            j[i][p] += self.csc[p];
            j[i][q] += self.csc[i];
        }
        j
    }
}

fn residual<T: Real>(h: &[T], l: &[T], t: &[T]) -> Vec<T> {
    h.iter()
        .zip(l)
        .zip(t)
        .map(|((&h, &l), &t)| h * l / (T::lit(2.0) * t) - T::one())
        .collect()
}

fn max_abs<T: Real>(r: &[T]) -> T {
    r.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

fn sq_norm<T: Real>(r: &[T]) -> T {
    r.iter().map(|&x| x * x).sum()
}

fn admissible<T: Real>(h: &[T], l: &[T]) -> bool {
    h.iter().chain(l).all(|&x| x > T::zero() && x.is_finite())
}

struct Attempt<T> {
    h: Vec<T>,
    residual: T,
    iterations: usize,
    converged: bool,
    collapsed: bool,
}

fn newton<T: Real>(fan: &Fan<T>, t: &[T], mut h: Vec<T>, opts: &SolverOptions) -> Attempt<T> {
    let m = t.len();
    let lj = fan.length_jacobian(m);
    let mut l = fan.lengths(&h);
    let mut r = residual(&h, &l, t);
    let mut collapsed = false;
    for it in 0..opts.max_iterations {
        let res = max_abs(&r);
        if res <= T::tol(opts.tol) {
            return Attempt { h, residual: res, iterations: it, converged: true, collapsed: false };
        }
        // J_ij = (δ_ij ℓ_i + h_i ∂ℓ_i/∂h_j) / 2, right-hand side t - c.
        let jac: Vec<Vec<T>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|k| {
                        let d = if i == k { l[i] } else { T::zero() };
                        (d + h[i] * lj[i][k]) / T::lit(2.0)
                    })
                    .collect()
            })
            .collect();
        let rhs: Vec<T> = (0..m).map(|i| -r[i] * t[i]).collect();
        let Some(step) = solve(jac, rhs, T::epsilon()) else {
            return Attempt { h, residual: res, iterations: it, converged: false, collapsed };
        };
        let base = sq_norm(&r);
        let mut lam = T::one();
        let mut accepted = false;
        collapsed = false;
        for _ in 0..40 {
            let trial: Vec<T> = h.iter().zip(&step).map(|(&x, &d)| x + lam * d).collect();
            let tl = fan.lengths(&trial);
            if !admissible(&trial, &tl) {
                collapsed = true;
            } else {
                let tr = residual(&trial, &tl, t);
                if sq_norm(&tr) < base {
                    h = trial;
                    l = tl;
                    r = tr;
                    accepted = true;
                    break;
                }
            }
            lam /= T::lit(2.0);
        }
        if !accepted {
            let res = max_abs(&r);
            return Attempt {
                converged: res <= T::tol(opts.accept_tol),
                h,
                residual: res,
                iterations: it + 1,
                collapsed,
            };
        }
    }
    let res = max_abs(&r);
    Attempt {
        converged: res <= T::tol(opts.accept_tol),
        h,
        residual: res,
        iterations: opts.max_iterations,
        collapsed,
    }
}

/// Support numbers of the polygon with normals `normals` (consecutive in
/// angle, either orientation) whose cone volumes are `targets`.
pub fn polygon_from_cone_volumes<T: Real>(
    normals: &[Vec<T>],
    targets: &[T],
    opts: &SolverOptions,
) -> Result<FeasibilityRecord<T>> {
    if normals.len() != targets.len() {
        return Err(Error::Dimension("one target per normal".into()));
    }
    if targets.iter().any(|&t| !(t > T::zero()) || !t.is_finite()) {
        return Err(domain("targets must be positive"));
    }
    let fan = Fan::new(normals)?;
    let m = normals.len();
    let t: Vec<T> = fan.perm.iter().map(|&i| targets[i]).collect();
    let area: T = t.iter().copied().sum();
    let rescale = |h: Vec<T>| -> Option<Vec<T>> {
        let l = fan.lengths(&h);
        if !admissible(&h, &l) {
            return None;
        }
        let a: T = h.iter().zip(&l).map(|(&x, &y)| x * y).sum::<T>() / T::lit(2.0);
        let s = (area / a).sqrt();
        Some(h.into_iter().map(|x| x * s).collect())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<Attempt<T>> = None;
    let mut any_collapse = false;
    let mut iterations = 0;
    let mut used = 0;
    for attempt in 0..=opts.restarts {
        let start = if attempt == 0 {
            rescale(vec![T::one(); m])
        } else {
            (0..16).find_map(|_| {
                let h = (0..m)
                    .map(|_| T::one() + T::lit(opts.jitter * rng.random_range(-1.0..1.0)))
                    .collect();
                rescale(h)
            })
        };
        let Some(start) = start else { continue };
        used = attempt;
        let a = newton(&fan, &t, start, opts);
        iterations += a.iterations;
        any_collapse |= a.collapsed;
        let better = best.as_ref().is_none_or(|b| a.residual < b.residual);
        let done = a.converged;
        if better {
            best = Some(a);
        }
        if done {
            break;
        }
    }
    let best = best.ok_or_else(|| Error::Internal("no admissible start".into()))?;
    let mut h_in = vec![T::zero(); m];
    for (k, &i) in fan.perm.iter().enumerate() {
        h_in[i] = best.h[k];
    }
    let l = fan.lengths(&best.h);
    let mut l_in = vec![T::zero(); m];
    for (k, &i) in fan.perm.iter().enumerate() {
        l_in[i] = l[k];
    }
    let outcome = if best.converged {
        Outcome::Solved
    } else if any_collapse {
        Outcome::InfeasibleNegativeSupport
    } else {
        Outcome::Diverged
    };
    let atoms = normals
        .iter()
        .zip(targets)
        .map(|(u, &w)| Atom { u: u.clone(), w })
        .collect();
    Ok(FeasibilityRecord {
        epsilon: None,
        target: DiscreteMeasure::new(2, atoms)?,
        outcome,
        support_numbers: (outcome == Outcome::Solved).then_some(h_in),
        edge_lengths: (outcome == Outcome::Solved).then_some(l_in),
        residual: best.residual,
        iterations,
        restarts: used,
        trapezoid_ratio: None,
    })
}

/// Vertices of `{x : ⟨x, u_i⟩ ≤ h_i}`, the one ending edge `i` (counter-clockwise) first.
pub fn polygon_vertices<T: Real>(normals: &[Vec<T>], h: &[T]) -> Result<Vec<Vec<T>>> {
    let fan = Fan::new(normals)?;
    let m = normals.len();
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let (i, j) = (fan.perm[k], fan.perm[(k + 1) % m]);
        let (a, b) = (&normals[i], &normals[j]);
        let det = a[0] * b[1] - a[1] * b[0];
        out.push(vec![(h[i] * b[1] - h[j] * a[1]) / det, (a[0] * h[j] - b[0] * h[i]) / det]);
    }
    Ok(out)
}

/// One point of the pentagon scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct ScanRecord<T> {
    pub eps: T,
    pub record: FeasibilityRecord<T>,
    /// `(1-ε)(α+β) < 1/2`.
    pub theorem_b_regime: bool,
    /// Area of the trapezoid spanned by edges 1 and 4.
    pub v_t: Option<T>,
    /// Area of the polygon outside that trapezoid.
    pub v_complement: Option<T>,
    /// `v_complement ≤ ε + 1e-8`.
    pub restarea_holds: Option<bool>,
    /// `√V({u₁}) + √V({u₄}) ≤ √V` on the solved polygon.
    pub corollary2_holds: Option<bool>,
    /// `(α/β)^{1/4}`, the reference value for `ℓ₁/ℓ₄`.
    pub ratio_reference: T,
}

/// Solves `μ_ε` for one `ε`; the restart seed is derived from `opts.seed`
/// and `ε`, so results do not depend on grid order.
pub fn pentagon_scan_point<T: Real>(alpha: T, beta: T, eps: T, opts: &SolverOptions) -> Result<ScanRecord<T>> {
    let mu = mu_epsilon(alpha, beta, eps)?;
    let dirs = pentagon_directions::<T>();
    let w: Vec<T> = mu.atoms().iter().map(|a| a.w).collect();
    let point_opts = SolverOptions {
        seed: opts.seed ^ eps.as_f64().to_bits(),
        ..*opts
    };
    let mut record = polygon_from_cone_volumes(&dirs, &w, &point_opts)?;
    record.epsilon = Some(eps);
    let regime = (T::one() - eps) * (alpha + beta) < T::lit(0.5);
    let mut out = ScanRecord {
        eps,
        record,
        theorem_b_regime: regime,
        v_t: None,
        v_complement: None,
        restarea_holds: None,
        corollary2_holds: None,
        ratio_reference: (alpha / beta).powf(T::lit(0.25)),
    };
    if let (Some(h), Some(l)) = (&out.record.support_numbers, &out.record.edge_lengths) {
        let two = T::lit(2.0);
        let area: T = h.iter().zip(l).map(|(&x, &y)| x * y).sum::<T>() / two;
        let vt = (h[0] + h[3]) * (l[0] + l[3]) / two;
        let rest = area - vt;
        out.record.trapezoid_ratio = Some(l[0] / l[3]);
        out.v_t = Some(vt);
        out.v_complement = Some(rest);
        out.restarea_holds = Some(rest <= eps + T::tol(1e-8));
        let (c1, c4) = (h[0] * l[0] / two, h[3] * l[3] / two);
        out.corollary2_holds = Some(c1.sqrt() + c4.sqrt() <= area.sqrt() * (T::one() + T::tol(1e-12)));
    }
    Ok(out)
}

pub fn pentagon_scan<T: Real>(alpha: T, beta: T, eps_grid: &[T], opts: &SolverOptions) -> Result<Vec<ScanRecord<T>>> {
    eps_grid
        .iter()
        .map(|&e| pentagon_scan_point(alpha, beta, e, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon_inner_products() {
        let u = pentagon_directions::<f64>();
        let d = |a: &[f64], b: &[f64]| a[0] * b[0] + a[1] * b[1];
        assert!((d(&u[0], &u[1]) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((d(&u[3], &u[2]) - 2.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((d(&u[3], &u[4]) - 2.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((u[3][0] + u[0][0]).abs() < 1e-15 && (u[3][1] + u[0][1]).abs() < 1e-15);
    }

    #[test]
    fn mu_epsilon_weights() {
        let mu = mu_epsilon(0.49f64, 0.09, 0.2).unwrap();
        let w: Vec<f64> = mu.atoms().iter().map(|a| a.w).collect();
        assert!((w[0] - 0.392).abs() < 1e-15);
        assert!((w[3] - 0.072).abs() < 1e-15);
        for k in [1, 2, 4] {
            assert!((w[k] - 0.536 / 3.0).abs() < 1e-15);
        }
        assert!((mu.total_mass() - 1.0).abs() < 1e-15);
        assert!((theorem_b_threshold(0.49f64, 0.09) - (1.0 - 1.0 / 1.16)).abs() < 1e-15);
        assert!(mu_epsilon(0.5f64, 0.09, 0.2).is_err());
        assert!(mu_epsilon(0.49f64, 0.09, 0.0).is_err());
    }

    #[test]
    fn unit_square() {
        let n = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        let r = polygon_from_cone_volumes(&n, &[1.0f64; 4], &SolverOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::Solved);
        for h in r.support_numbers.unwrap() {
            assert!((h - 1.0).abs() < 1e-14);
        }
        assert!(r.residual < 1e-14);
    }

    #[test]
    fn clockwise_square_and_vertices() {
        let n = vec![vec![0.0, -1.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        let r = polygon_from_cone_volumes(&n, &[1.0f64, 1.0, 1.0, 1.0], &SolverOptions::default()).unwrap();
        let h = r.support_numbers.unwrap();
        let v = polygon_vertices(&n, &h).unwrap();
        for p in v {
            assert!((p[0].abs() - 1.0).abs() < 1e-14 && (p[1].abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn unordered_normals_are_rejected() {
        let n = vec![vec![1.0f64, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        assert!(matches!(
            polygon_from_cone_volumes(&n, &[1.0; 4], &SolverOptions::default()),
            Err(Error::Precondition(_))
        ));
        let half = vec![vec![1.0f64, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]];
        assert!(polygon_from_cone_volumes(&half, &[1.0; 3], &SolverOptions::default()).is_err());
    }

    #[test]
    fn theorem_b_regime_instance_is_solved() {
        let s = pentagon_scan_point(0.49f64, 0.09, 0.3, &SolverOptions::default()).unwrap();
        assert!(s.theorem_b_regime);
        assert_eq!(s.record.outcome, Outcome::Solved);
        assert!(s.restarea_holds.unwrap() && s.corollary2_holds.unwrap());
    }
}
