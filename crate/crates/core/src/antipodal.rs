//! Bodies whose cone volume measure has atoms at an antipodal pair `±u`.
//!
//! With `α = V_K({u})` and `β = V_K({-u})` every such body satisfies
//! `V(K) ≥ φ(α, β, n)`. Equality holds exactly when the two facets
//! `F(K, ±u)` are homothetic, `K` is their convex hull, and
//!
//! ```text
//! h_K(u) / h_K(-u) = (α/β) ρ₀(α/β, n)^{-2(n-1)}.
//! ```
//!
//! [`verify_theorem1`] measures all of this on a concrete polytope, and
//! [`extremal_body`] builds the equality bodies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Error, Result};
use crate::linalg::{axpy, centroid, coordinates, distance, dot, norm, normalized, orthonormal_complement, scale, sub};
use crate::measure::{check_scc_essential, DiscreteMeasure, SccCheck};
use crate::phi::{phi, rho0};
use crate::polytope::{random_polytope, random_unit, Polytope, RandomOptions};
use crate::scalar::Real;

/// Angular tolerance (radians) for matching directions.
pub const ANGLE_TOL: f64 = 1e-9;

/// Slack below `-SLACK_TOL · V` contradicts the inequality; slack below
/// `SLACK_TOL · V` counts as equality.
pub const SLACK_TOL: f64 = 1e-8;

/// Homothety residual, relative to the facet diameter.
pub const HOMOTHETY_TOL: f64 = 1e-7;

/// Relative tolerance on the hull volume and on the height ratio.
pub const HULL_TOL: f64 = 1e-8;
pub const HEIGHT_RATIO_TOL: f64 = 1e-6;

/// Atoms of a measure at `u` and `-u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct AntipodalPair<T> {
    pub u: Vec<T>,
    pub alpha: T,
    pub beta: T,
    /// Atom indices of `u` and `-u`.
    pub plus: usize,
    pub minus: usize,
}

/// True if the first coordinate of `u` that is clearly nonzero is positive.
fn is_canonical<T: Real>(u: &[T]) -> bool {
    let eps = T::tol(1e-12);
    for &x in u {
        if x > eps {
            return true;
        }
        if x < -eps {
            return false;
        }
    }
    true
}

/// All pairs of atoms of `mu` in opposite directions, represented by the
/// member whose first nonzero coordinate is positive.
pub fn antipodal_pairs<T: Real>(mu: &DiscreteMeasure<T>) -> Vec<AntipodalPair<T>> {
    let tol = T::tol(ANGLE_TOL);
    let atoms = mu.atoms();
    let mut out = Vec::new();
    for (i, a) in atoms.iter().enumerate() {
        if !is_canonical(&a.u) {
            continue;
        }
        let neg = scale(&a.u, -T::one());
        if let Some(j) = atoms.iter().position(|b| distance(&b.u, &neg) <= tol) {
            out.push(AntipodalPair {
                u: a.u.clone(),
                alpha: a.w,
                beta: atoms[j].w,
                plus: i,
                minus: j,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct EqualityDiagnostics<T> {
    pub facets_homothetic: bool,
    /// Largest vertex mismatch after the best homothety, relative to the
    /// diameter of `F(K, u)`.
    pub homothety_residual: T,
    pub homothety_scale: T,
    pub hull_equals_body: bool,
    /// `V([F(K, u), F(K, -u)])`.
    pub hull_volume: T,
    /// `h_K(u) / h_K(-u)`.
    pub height_ratio_observed: T,
    /// `(α/β) ρ₀^{-2(n-1)}`.
    pub height_ratio_predicted: T,
    pub height_ratio_matches: bool,
}

impl<T> EqualityDiagnostics<T> {
    pub fn all_hold(&self) -> bool {
        self.facets_homothetic && self.hull_equals_body && self.height_ratio_matches
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct AntipodalReport<T> {
    pub direction: Vec<T>,
    pub n: usize,
    pub alpha: T,
    pub beta: T,
    pub rho0: T,
    pub body_volume: T,
    pub phi_value: T,
    /// `body_volume - phi_value`.
    pub slack: T,
    /// `slack / body_volume`.
    pub relative_slack: T,
    /// `slack ≥ -SLACK_TOL · V`.
    pub inequality_holds: bool,
    /// `slack ≤ SLACK_TOL · V`.
    pub equality: bool,
    pub equality_diagnostics: EqualityDiagnostics<T>,
}

/// Compares `V(P)` with `φ(α, β, n)` for the facets of `P` normal to `±u`.
pub fn verify_theorem1<T: Real>(p: &Polytope<T>, u: &[T]) -> Result<AntipodalReport<T>> {
    let n = p.dim();
    if u.len() != n {
        return Err(Error::Dimension(format!("direction of length {} in dimension {n}", u.len())));
    }
    let u = normalized(u).ok_or_else(|| domain("zero direction"))?;
    if !p.contains_origin_interior() {
        return Err(precondition("origin is not interior to the polytope"));
    }
    let tol = T::tol(ANGLE_TOL);
    let neg = scale(&u, -T::one());
    let ip = p
        .facet_with_normal(&u, tol)
        .ok_or_else(|| precondition("u is not a facet normal"))?;
    let im = p
        .facet_with_normal(&neg, tol)
        .ok_or_else(|| precondition("-u is not a facet normal"))?;
    let (fp, fm) = (&p.facets()[ip], &p.facets()[im]);
    let nn = T::count(n);
    let alpha = fp.offset * fp.measure / nn;
    let beta = fm.offset * fm.measure / nn;
    let r = phi(alpha, beta, n)?;
    let v = p.volume();
    let slack = v - r.phi;
    let stol = T::tol(SLACK_TOL) * v;

    let top: Vec<Vec<T>> = fp.vertex_ids.iter().map(|&i| p.vertices()[i].clone()).collect();
    let bottom: Vec<Vec<T>> = fm.vertex_ids.iter().map(|&i| p.vertices()[i].clone()).collect();
    let (homothety_residual, homothety_scale) = homothety(&top, &bottom, &u);
    let mut both = top.clone();
    both.extend(bottom.iter().cloned());
    let hull_volume = Polytope::from_vertices(&both).map(|h| h.volume()).unwrap_or(T::zero());
    let observed = fp.offset / fm.offset;
    let predicted = alpha / beta * r.rho0.powi(-2 * (n as i32 - 1));
    let diagnostics = EqualityDiagnostics {
        facets_homothetic: homothety_residual <= T::tol(HOMOTHETY_TOL),
        homothety_residual,
        homothety_scale,
        hull_equals_body: (hull_volume - v).abs() <= T::tol(HULL_TOL) * v,
        hull_volume,
        height_ratio_observed: observed,
        height_ratio_predicted: predicted,
        height_ratio_matches: (observed - predicted).abs() <= T::tol(HEIGHT_RATIO_TOL) * predicted,
    };
    Ok(AntipodalReport {
        direction: u,
        n,
        alpha,
        beta,
        rho0: r.rho0,
        body_volume: v,
        phi_value: r.phi,
        slack,
        relative_slack: slack / v,
        inequality_holds: slack >= -stol,
        equality: slack <= stol,
        equality_diagnostics: diagnostics,
    })
}

/// Best positive homothety taking `bottom` onto `top` inside `u⊥`:
/// centroids aligned, scale from the ratio of radii of gyration, then the
/// largest nearest-vertex mismatch in either direction. Returns the
/// mismatch relative to the diameter of `top`, and the scale.
fn homothety<T: Real>(top: &[Vec<T>], bottom: &[Vec<T>], u: &[T]) -> (T, T) {
    let basis = orthonormal_complement(&[u.to_vec()], u.len());
    let proj = |pts: &[Vec<T>]| -> Vec<Vec<T>> { pts.iter().map(|x| coordinates(x, &basis)).collect() };
    let (x, y) = (proj(top), proj(bottom));
    let xr: Vec<&[T]> = x.iter().map(|v| &v[..]).collect();
    let yr: Vec<&[T]> = y.iter().map(|v| &v[..]).collect();
    let (cx, cy) = (centroid(&xr), centroid(&yr));
    let gyr = |pts: &[Vec<T>], c: &[T]| {
        pts.iter().map(|p| dot(&sub(p, c), &sub(p, c))).sum::<T>() / T::count(pts.len())
    };
    let s = (gyr(&x, &cx) / gyr(&y, &cy)).sqrt();
    let mapped: Vec<Vec<T>> = y.iter().map(|p| axpy(&cx, s, &sub(p, &cy))).collect();
    let nearest = |p: &[T], set: &[Vec<T>]| {
        set.iter().map(|q| distance(p, q)).fold(T::infinity(), T::min)
    };
    let mut worst = T::zero();
    for p in &mapped {
        worst = worst.max(nearest(p, &x));
    }
    for p in &x {
        worst = worst.max(nearest(p, &mapped));
    }
    let mut diam = T::zero();
    for (i, p) in x.iter().enumerate() {
        for q in &x[i + 1..] {
            diam = diam.max(distance(p, q));
        }
    }
    if x.len() != y.len() {
        worst = worst.max(T::one());
    }
    (worst / diam.max(T::min_positive_value()), s)
}

/// Volume of the convex hull of two parallel homothetic `(n-1)`-bodies of
/// measures `area_top`, `area_bottom` at heights `a` and `-b`:
///
/// ```text
/// ((a + b)/n) Σ_{i=0}^{n-1} area_top^{i/(n-1)} area_bottom^{(n-1-i)/(n-1)}
/// ```
pub fn hull_of_parallel_facets_volume<T: Real>(area_top: T, area_bottom: T, a: T, b: T, n: usize) -> Result<T> {
    if n < 2 {
        return Err(domain(format!("n must be at least 2, got {n}")));
    }
    for (name, x) in [("area_top", area_top), ("a", a), ("b", b)] {
        if !(x > T::zero()) || !x.is_finite() {
            return Err(domain(format!("{name} must be positive, got {x}")));
        }
    }
    if !(area_bottom >= T::zero()) || !area_bottom.is_finite() {
        return Err(domain(format!("area_bottom must be nonnegative, got {area_bottom}")));
    }
    let m = T::count(n - 1);
    let (st, sb) = (area_top.powf(m.recip()), area_bottom.powf(m.recip()));
    let sum: T = (0..n).map(|i| st.powi(i as i32) * sb.powi((n - 1 - i) as i32)).sum();
    Ok((a + b) / T::count(n) * sum)
}

/// Equality body for `(α, β)` over `base` with scale `c = 1`.
///
/// See [`extremal_body_scaled`].
pub fn extremal_body<T: Real>(base: &Polytope<T>, alpha: T, beta: T, u: &[T]) -> Result<Polytope<T>> {
    extremal_body_scaled(base, alpha, beta, u, T::one())
}

/// `K = [F₊, F₋]` with `F₊ = λ₊ base + a u` and `F₋ = λ₋ base - b u`,
/// where, for `ρ = ρ₀(α/β, n)`,
///
/// ```text
/// |F₊|^{1/(n-1)} = ρ c,   |F₋|^{1/(n-1)} = c/ρ,   a = nα/|F₊|,   b = nβ/|F₋|.
/// ```
///
/// Its cone volume measure has atoms `α` at `u` and `β` at `-u`, and
/// `V(K) = φ(α, β, n)` for every `c > 0`. The base lives in coordinates of
/// `u⊥` (an orthonormal basis completing `u`) and must have its vertex
/// centroid at the origin.
pub fn extremal_body_scaled<T: Real>(base: &Polytope<T>, alpha: T, beta: T, u: &[T], c: T) -> Result<Polytope<T>> {
    let n = base.dim() + 1;
    if u.len() != n {
        return Err(Error::Dimension(format!(
            "base of dimension {} needs a direction of length {n}",
            base.dim()
        )));
    }
    if !(c > T::zero()) || !c.is_finite() {
        return Err(domain(format!("scale must be positive, got {c}")));
    }
    let u = normalized(u).ok_or_else(|| domain("zero direction"))?;
    let refs: Vec<&[T]> = base.vertices().iter().map(|v| &v[..]).collect();
    let cen = centroid(&refs);
    if norm(&cen) > T::tol(1e-9) * base.diameter() {
        return Err(precondition("base vertex centroid is not at the origin"));
    }
    let rho = rho0(alpha / beta, n)?.rho0;
    let m = T::count(n - 1);
    let unit = base.volume().powf(m.recip());
    let (lp, lm) = (rho * c / unit, c / (rho * unit));
    let (area_p, area_m) = ((rho * c).powi(n as i32 - 1), (c / rho).powi(n as i32 - 1));
    let nn = T::count(n);
    let (a, b) = (nn * alpha / area_p, nn * beta / area_m);
    let frame = orthonormal_complement(std::slice::from_ref(&u), n);
    let lift = |x: &[T], lam: T, h: T| {
        let mut p = scale(&u, h);
        for (k, e) in frame.iter().enumerate() {
            p = axpy(&p, lam * x[k], e);
        }
        p
    };
    let mut pts = Vec::with_capacity(2 * refs.len());
    for x in &refs {
        pts.push(lift(x, lp, a));
        pts.push(lift(x, lm, -b));
    }
    Polytope::from_vertices(&pts)
}

/// The planar equality trapezoid: base segment of length one on the first
/// axis, `u = e₂`, scale fixed by `a + b = 2`.
pub fn trapezoid_equality<T: Real>(alpha: T, beta: T) -> Result<Polytope<T>> {
    let half = T::lit(0.5);
    let base = Polytope::from_vertices(&[vec![-half], vec![half]])?;
    let rho = rho0(alpha / beta, 2)?.rho0;
    let c = alpha / rho + beta * rho;
    extremal_body_scaled(&base, alpha, beta, &[T::zero(), T::one()], c)
}

/// `P_r = [-r u₁ - r W, u₁ + W]` with `u₁ = e₁` and `W = [-1, 1]^{n-1}` in
/// `u₁⊥`, together with the essential-subspace check of its cone volume measure.
pub fn truncated_pyramid<T: Real>(n: usize, r: T) -> Result<(Polytope<T>, SccCheck<T>)> {
    if !(2..=5).contains(&n) {
        return Err(domain(format!("n must be in 2..=5, got {n}")));
    }
    if !(r > T::zero() && r <= T::one()) {
        return Err(domain(format!("r must lie in (0, 1], got {r}")));
    }
    let mut pts = Vec::with_capacity(1 << n);
    for mask in 0..(1usize << (n - 1)) {
        let w: Vec<T> = (0..n - 1)
            .map(|k| if mask >> k & 1 == 1 { T::one() } else { -T::one() })
            .collect();
        let mut top = vec![T::one()];
        top.extend(w.iter().copied());
        let mut bottom = vec![-r];
        bottom.extend(w.iter().map(|&x| -r * x));
        pts.push(top);
        pts.push(bottom);
    }
    let p = Polytope::from_vertices(&pts)?;
    let check = check_scc_essential(&p.cone_volume_measure()?)?;
    Ok((p, check))
}

/// `P ∩ {x : -b ≤ ⟨x, u⟩ ≤ a}` for `0 < a < h_P(u)`, `0 < b < h_P(-u)`.
///
/// Vertices inside the slab are kept and every edge crossing a slab plane
/// contributes its crossing point, projected onto the plane.
pub fn slab_body<T: Real>(p: &Polytope<T>, u: &[T], a: T, b: T) -> Result<Polytope<T>> {
    let u = normalized(u).ok_or_else(|| domain("zero direction"))?;
    let (hu, hm) = (p.support(&u), p.support(&scale(&u, -T::one())));
    if !(a > T::zero() && a < hu && b > T::zero() && b < hm) {
        return Err(domain(format!(
            "slab [-{b}, {a}] must lie strictly inside [-{hm}, {hu}]"
        )));
    }
    let verts = p.vertices();
    let height: Vec<T> = verts.iter().map(|v| dot(v, &u)).collect();
    let mut pts: Vec<Vec<T>> = verts
        .iter()
        .zip(&height)
        .filter(|(_, &h)| h >= -b && h <= a)
        .map(|(v, _)| v.clone())
        .collect();
    for (i, j) in p.edges() {
        for t in [a, -b] {
            let (hi, hj) = (height[i] - t, height[j] - t);
            if (hi < T::zero()) != (hj < T::zero()) && hi != hj {
                let s = hi / (hi - hj);
                let x = axpy(&verts[i], s, &sub(&verts[j], &verts[i]));
                let x = axpy(&x, t - dot(&x, &u), &u);
                pts.push(x);
            }
        }
    }
    Polytope::from_vertices(&pts)
}

/// A random body with facets normal to `±u`, from [`slab_body`].
#[derive(Debug, Clone, PartialEq)]
pub struct SlabBody<T> {
    pub polytope: Polytope<T>,
    pub u: Vec<T>,
    pub a: T,
    pub b: T,
}

/// Hull of `m` random unit vectors (origin interior) cut by a random slab
/// whose planes sit at 20% to 90% of the support in each direction.
pub fn random_slab_body<T: Real>(n: usize, m: usize, seed: u64) -> Result<SlabBody<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = RandomOptions {
        symmetric: false,
        require_origin_interior: true,
    };
    let p: Polytope<T> = random_polytope(n, m, rng.random(), opts)?;
    let u: Vec<T> = random_unit(&mut rng, n).into_iter().map(T::lit).collect();
    let a = p.support(&u) * T::lit(rng.random_range(0.2..0.9));
    let b = p.support(&scale(&u, -T::one())) * T::lit(rng.random_range(0.2..0.9));
    let polytope = slab_body(&p, &u, a, b)?;
    Ok(SlabBody { polytope, u, a, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::SccStatus;

    fn cube3() -> Polytope<f64> {
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for mask in 0..8usize {
            pts.push((0..3).map(|k| if mask >> k & 1 == 1 { 1.0 } else { -1.0 }).collect());
        }
        Polytope::from_vertices(&pts).unwrap()
    }

    #[test]
    fn cube_pairs_and_equality() {
        let c = cube3();
        let pairs = antipodal_pairs(&c.cone_volume_measure().unwrap());
        assert_eq!(pairs.len(), 3);
        for p in &pairs {
            assert!((p.alpha - 4.0 / 3.0).abs() < 1e-14 && (p.beta - 4.0 / 3.0).abs() < 1e-14);
        }
        let r = verify_theorem1(&c, &[1.0, 0.0, 0.0]).unwrap();
        assert!(r.slack.abs() <= 1e-10 * 8.0);
        assert!(r.equality && r.equality_diagnostics.all_hold());
        assert!((r.equality_diagnostics.height_ratio_observed - 1.0).abs() < 1e-14);
    }

    #[test]
    fn missing_facet_is_a_precondition_error() {
        let s = 1.0 / 3f64.sqrt();
        assert!(matches!(verify_theorem1(&cube3(), &[s, s, s]), Err(Error::Precondition(_))));
    }

    #[test]
    fn parallel_facet_formula_cases() {
        assert!((hull_of_parallel_facets_volume(2.0f64, 2.0, 1.0, 0.5, 4).unwrap() - 3.0).abs() < 1e-14);
        let t = hull_of_parallel_facets_volume(3.0f64, 1.0, 1.0, 2.0, 2).unwrap();
        assert!((t - 6.0).abs() < 1e-14);
        let cone = hull_of_parallel_facets_volume(4.0f64, 0.0, 1.0, 1.0, 3).unwrap();
        assert!((cone - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_vertices() {
        let t = trapezoid_equality(2.0f64 / 3.0, 8.0 / 3.0).unwrap();
        assert!((t.volume() - 6.0).abs() < 1e-12);
        let mut want = [[-2.0, -4.0 / 3.0], [2.0, -4.0 / 3.0], [1.0, 2.0 / 3.0], [-1.0, 2.0 / 3.0]];
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut got: Vec<Vec<f64>> = t.vertices().to_vec();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g[0] - w[0]).abs() < 1e-12 && (g[1] - w[1]).abs() < 1e-12, "{got:?}");
        }
    }

    #[test]
    fn square_base_with_equal_weights_is_a_box() {
        let base = Polytope::from_vertices(&[vec![-1.0f64, -1.0], vec![1.0, -1.0], vec![1.0, 1.0], vec![-1.0, 1.0]]).unwrap();
        let k = extremal_body(&base, 0.5, 0.5, &[0.0, 0.0, 1.0]).unwrap();
        let r = verify_theorem1(&k, &[0.0, 0.0, 1.0]).unwrap();
        assert!(r.equality && r.equality_diagnostics.all_hold());
        assert!((k.support(&[0.0, 0.0, 1.0]) - k.support(&[0.0, 0.0, -1.0])).abs() < 1e-14);
    }

    #[test]
    fn off_centre_base_is_rejected() {
        let base = Polytope::from_vertices(&[vec![0.0f64, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            extremal_body(&base, 1.0, 2.0, &[0.0, 0.0, 1.0]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pyramid_top_atom() {
        let (p, check) = truncated_pyramid(3, 0.1f64).unwrap();
        let mu = p.cone_volume_measure().unwrap();
        let top = mu.weight_at(&[1.0, 0.0, 0.0], 1e-9).unwrap();
        assert!((top - 4.0 / 3.0).abs() < 1e-13);
        assert!(!check.satisfied());
        let (_, prism) = truncated_pyramid(3, 1.0f64).unwrap();
        assert!(prism.satisfied());
        assert!(prism.reports.iter().all(|r| r.status == SccStatus::EqualityWithComplement));
    }

    #[test]
    fn slab_body_has_both_facets() {
        let s: SlabBody<f64> = random_slab_body(3, 20, 5).unwrap();
        let r = verify_theorem1(&s.polytope, &s.u).unwrap();
        assert!(r.inequality_holds);
        assert!(r.slack > 0.0);
    }
}
