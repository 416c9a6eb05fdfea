//! The auxiliary function
//!
//! ```text
//! f(ρ) = α + β + Σ_{i=1}^{n-1} (α ρ^{-2i} + β ρ^{2i}),
//! ```
//!
//! its unique minimiser `ρ₀(α/β, n)` and its minimum `φ(α, β, n)`, which is
//! the sharp lower bound for the volume of a body whose cone volume measure
//! has atoms `α` at `u` and `β` at `-u`.
//!
//! # Numerics
//!
//! With `γ = α/β > 1` and `L = ln γ` the minimiser is written `ρ₀ = γ^τ`.
//! The sign of `f'` is the sign of
//!
//! ```text
//! h(ρ) = Σ i (ρ^{2i} γ^{-1/2} - γ^{1/2} ρ^{-2i}) = Σ i s(2iτ - 1/2),
//! s(x) = γ^x - γ^{-x},
//! ```
//!
//! and the root is always bracketed by `τ ∈ [3/(8n-4), 1/(2n)]`. The solver
//! works in the offset `δ = τ - 3/(8n-4)`. At `δ = 0` the weighted arguments
//! `Σ i (2iτ - 1/2)` vanish identically, so `h` is split into that linear
//! part (carried analytically as `2 Σi² δ`) and the odd remainder
//! `sinh(y) - y`, which is evaluated by series. This keeps the sign of `h`
//! at the lower bracket end resolvable even for `γ` within `1e-12` of one,
//! where the direct sum cancels to noise.
//!
//! Every power of `ρ` and `γ` is taken through `exp` of a logarithm, so
//! `γ` up to `1e10` at `n = 10` stays in range.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::pairwise_sum;
use crate::scalar::Real;

/// Iteration cap for the root finder.
pub const MAX_ITERATIONS: usize = 200;

/// Below this distance from one the ratio `γ` is treated as exactly one.
pub const GAMMA_ONE_CUTOFF: f64 = 1e-12;

/// Minimiser of `f` for the ratio `γ = α/β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rho0<T> {
    pub gamma: T,
    pub n: usize,
    pub rho0: T,
    /// `ln ρ₀ / ln γ`; `None` when `γ = 1`.
    pub tau: Option<T>,
    pub bracket_lo: T,
    pub bracket_hi: T,
    pub iterations: usize,
    /// `h(ρ₀)`.
    pub residual: T,
}

/// Value of `φ(α, β, n)` with its minimiser and solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiResult<T> {
    pub phi: T,
    pub rho0: T,
    pub bracket_lo: T,
    pub bracket_hi: T,
    pub iterations: usize,
    /// `h(ρ₀)` for `γ = α/β`.
    pub residual: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NearOne,
    LargeGamma,
}

/// Exact `φ` against an asymptotic approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport<T> {
    pub exact: T,
    pub approx: T,
    /// `exact - approx`, computed without forming the two large sums.
    pub residual: T,
    /// Size of the claimed remainder order (`√(αβ) ε³` near one,
    /// `α^{(n-2)/n} β^{2/n}` for large ratios).
    pub remainder_scale: T,
    pub regime: Regime,
    pub rho0: T,
    /// Leading-order asymptotic of `ρ₀` in this regime.
    pub rho0_approx: T,
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(domain(format!("n must be at least {min}, got {n}")))
    } else {
        Ok(())
    }
}

fn check_positive<T: Real>(name: &str, x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive and finite, got {x}")))
    }
}

/// `ln γ`, via `ln_1p` near one.
fn log_ratio<T: Real>(gamma: T) -> T {
    let d = gamma - T::one();
    if d.abs() < T::lit(0.5) {
        d.ln_1p()
    } else {
        gamma.ln()
    }
}

/// `e^y - e^{-y}` with an `expm1` path for small arguments.
fn two_sinh<T: Real>(y: T) -> T {
    if y.abs() < T::lit(0.5) {
        // Evaluate on |y| so the result is exactly odd.
        let e = y.abs().exp_m1();
        (e + e / (e + T::one())).copysign(y)
    } else {
        y.exp() - (-y).exp()
    }
}

/// `sinh(y) - y`, by series for `|y| < 1`.
fn sinh_minus_identity<T: Real>(y: T) -> T {
    if y.abs() >= T::one() {
        return y.sinh() - y;
    }
    let y2 = y * y;
    let mut term = y * y2 / T::lit(6.0);
    let mut sum = term;
    let mut k = 1usize;
    while term.abs() > T::epsilon() * sum.abs() && k < 20 {
        term = term * y2 / T::count((2 * k + 2) * (2 * k + 3));
        sum += term;
        k += 1;
    }
    sum
}

/// `cosh(y) - 1` without cancellation.
fn cosh_minus_one<T: Real>(y: T) -> T {
    let s = (y / T::lit(2.0)).sinh();
    T::lit(2.0) * s * s
}

/// Evaluates `f(ρ)`.
pub fn f_eval<T: Real>(alpha: T, beta: T, n: usize, rho: T) -> Result<T> {
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_positive("rho", rho)?;
    check_n(n, 2)?;
    let m = n - 1;
    let lr2 = T::lit(2.0) * rho.ln();
    let la = alpha.ln();
    let lb = beta.ln();
    let worst = (la.abs() + lb.abs()) + T::count(m) * lr2.abs();
    if worst < T::max_value().ln() - T::lit(8.0) {
        // Horner in ρ² and ρ⁻²: Σ_{i=1}^{m} y^i = y(1 + y(1 + ...)).
        let geo = |y: T| {
            let mut acc = T::zero();
            for _ in 0..m {
                acc = y * (T::one() + acc);
            }
            acc
        };
        let r2 = rho * rho;
        Ok(alpha + beta + alpha * geo(r2.recip()) + beta * geo(r2))
    } else {
        let mut terms = Vec::with_capacity(2 * m + 2);
        terms.push(alpha);
        terms.push(beta);
        for i in 1..=m {
            let k = T::count(i) * lr2;
            terms.push((la - k).exp());
            terms.push((lb + k).exp());
        }
        terms.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Ok(pairwise_sum(&terms))
    }
}

/// `s(x) = γ^x - γ^{-x}`.
pub fn s_eval<T: Real>(gamma: T, x: T) -> Result<T> {
    if !(gamma > T::one()) || !gamma.is_finite() {
        return Err(domain(format!("gamma must exceed 1, got {gamma}")));
    }
    Ok(two_sinh(x * log_ratio(gamma)))
}

/// `h(ρ) = Σ_{i=1}^{n-1} i (ρ^{2i}/√γ - √γ/ρ^{2i})`, which has the sign of `f'`.
pub fn h_eval<T: Real>(gamma: T, n: usize, rho: T) -> Result<T> {
    if !(gamma > T::one()) || !gamma.is_finite() {
        return Err(domain(format!("gamma must exceed 1, got {gamma}")));
    }
    check_positive("rho", rho)?;
    check_n(n, 2)?;
    let half_l = log_ratio(gamma) / T::lit(2.0);
    let t = rho.ln();
    let terms: Vec<T> = (1..n)
        .map(|i| T::count(i) * two_sinh(T::count(2 * i) * t - half_l))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `(lo, hi) = (γ^{3/(8n-4)}, γ^{1/(2n)})`, which strictly bracket `ρ₀` for `n ≥ 3`.
pub fn rho0_bounds<T: Real>(gamma: T, n: usize) -> Result<(T, T)> {
    if !(gamma > T::one()) || !gamma.is_finite() {
        return Err(domain(format!("gamma must exceed 1, got {gamma}")));
    }
    check_n(n, 3)?;
    let l = log_ratio(gamma);
    let (tlo, thi) = tau_bracket::<T>(n);
    Ok(((tlo * l).exp(), (thi * l).exp()))
}

fn tau_bracket<T: Real>(n: usize) -> (T, T) {
    (
        T::lit(3.0) / T::count(8 * n - 4),
        T::one() / T::count(2 * n),
    )
}

/// Root of `h` in the offset `δ = τ - 3/(8n-4)`, for `L = ln γ > 0`, `n ≥ 3`.
struct TauSolve<T> {
    tau: T,
    iterations: usize,
}

fn solve_tau<T: Real>(l: T, n: usize) -> Result<TauSolve<T>> {
    debug_assert!(n >= 3 && l > T::zero());
    let two = T::lit(2.0);
    let s2 = T::count((n - 1) * n * (2 * n - 1)) / T::lit(6.0);
    let base: Vec<T> = (1..n)
        .map(|i| (T::count(3 * i) - T::count(2 * n - 1)) / T::count(4 * n - 2))
        .collect();
    let (tau_lo, _) = tau_bracket::<T>(n);
    let delta_hi = T::count(n - 2) / T::count(4 * n * (2 * n - 1));

    // G(δ) = h / (2L) = 2 Σi² δ + Σ i (sinh(y_i) - y_i) / L, y_i = L (x_i + 2iδ).
    let eval = |delta: T| -> (T, T) {
        let mut g = Vec::with_capacity(n);
        let mut dg = Vec::with_capacity(n);
        g.push(two * s2 * delta);
        for (k, &x0) in base.iter().enumerate() {
            let i = T::count(k + 1);
            let y = l * (x0 + two * i * delta);
            g.push(i * sinh_minus_identity(y) / l);
            dg.push(two * i * i * y.cosh());
        }
        (pairwise_sum(&g), pairwise_sum(&dg))
    };

    let (g_lo, _) = eval(T::zero());
    let (g_hi, _) = eval(delta_hi);
    if !(g_lo < T::zero() && g_hi > T::zero()) {
        return Err(Error::Internal(format!(
            "bracket sign check failed for n = {n}, ln γ = {l}: h(lo) ~ {g_lo}, h(hi) ~ {g_hi}"
        )));
    }

    let (mut lo, mut hi) = (T::zero(), delta_hi);
    // Linearised start.
    let mut x = (-g_lo / (two * s2)).min(delta_hi / two).max(T::zero());
    let tol = T::lit(4.0) * T::epsilon();
    for it in 1..=MAX_ITERATIONS {
        let (g, dg) = eval(x);
        if g == T::zero() {
            return Ok(TauSolve { tau: tau_lo + x, iterations: it });
        }
        if g < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - g / dg;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = (lo + hi) / two;
        }
        let scale = tau_lo + x;
        if (next - x).abs() <= tol * scale || (hi - lo) <= tol * scale {
            return Ok(TauSolve { tau: tau_lo + next, iterations: it });
        }
        x = next;
    }
    Err(Error::NoConvergence {
        what: format!("rho0 root for n = {n}, ln γ = {l}"),
        iterations: MAX_ITERATIONS,
    })
}

/// `τ` for ratio `γ ≥ 1` given `L = ln γ ≥ 0`.
fn tau_from_log<T: Real>(l: T, n: usize) -> Result<(T, usize)> {
    if n == 2 {
        return Ok((T::lit(0.25), 0));
    }
    let s = solve_tau(l, n)?;
    Ok((s.tau, s.iterations))
}

/// The minimiser `ρ₀(γ, n)` of `f` for `γ = α/β`.
pub fn rho0<T: Real>(gamma: T, n: usize) -> Result<Rho0<T>> {
    check_positive("gamma", gamma)?;
    check_n(n, 2)?;
    if (gamma - T::one()).abs() < T::lit(GAMMA_ONE_CUTOFF) {
        return Ok(Rho0 {
            gamma,
            n,
            rho0: T::one(),
            tau: None,
            bracket_lo: T::one(),
            bracket_hi: T::one(),
            iterations: 0,
            residual: T::zero(),
        });
    }
    let flip = gamma < T::one();
    let g = if flip { gamma.recip() } else { gamma };
    let l = log_ratio(g);
    let (tau, iterations) = tau_from_log(l, n)?;
    let (blo, bhi) = if n == 2 {
        (tau, tau)
    } else {
        tau_bracket::<T>(n)
    };
    let mut rho = (tau * l).exp();
    let mut lo = (blo * l).exp();
    let mut hi = (bhi * l).exp();
    if flip {
        rho = rho.recip();
        let t = lo.recip();
        lo = hi.recip();
        hi = t;
    }
    let residual = if flip {
        -h_eval(g, n, rho.recip())?
    } else {
        h_eval(g, n, rho)?
    };
    Ok(Rho0 {
        gamma,
        n,
        rho0: rho,
        tau: Some(tau),
        bracket_lo: lo,
        bracket_hi: hi,
        iterations,
        residual,
    })
}

/// `τ(γ) = ln ρ₀(γ, n) / ln γ` for `γ > 1`.
pub fn tau<T: Real>(gamma: T, n: usize) -> Result<T> {
    if !(gamma > T::one()) || !gamma.is_finite() {
        return Err(domain(format!("gamma must exceed 1, got {gamma}")));
    }
    check_n(n, 2)?;
    Ok(tau_from_log(log_ratio(gamma), n)?.0)
}

/// `(n-1) s(2nτ - 1/2) - n s(2(n-1)τ - 1/2) - s(1/2)` with `τ = ln ρ / ln γ`.
///
/// Closed-form resummation of `h`: it equals `h(ρ) (ρ² - 1)² / ρ²`, so it
/// has the sign of `h` and vanishes exactly at `ρ₀`.
pub fn rho0_poly_residual<T: Real>(gamma: T, n: usize, rho: T) -> Result<T> {
    if !(gamma > T::one()) || !gamma.is_finite() {
        return Err(domain(format!("gamma must exceed 1, got {gamma}")));
    }
    check_n(n, 3)?;
    check_positive("rho", rho)?;
    if rho == T::one() {
        return Err(domain("rho = 1 lies on the pole of the resummed equation"));
    }
    let l = log_ratio(gamma);
    let t = rho.ln();
    let half_l = l / T::lit(2.0);
    let nn = T::count(n);
    let n1 = T::count(n - 1);
    // s(kτ - 1/2) = two_sinh(k t - L/2)
    let a = n1 * two_sinh(T::lit(2.0) * nn * t - half_l);
    let b = nn * two_sinh(T::lit(2.0) * n1 * t - half_l);
    let c = two_sinh(half_l);
    Ok(a - b - c)
}

/// Internal evaluation shared by [`phi`] and the expansions.
struct PhiParts<T> {
    /// `√(αβ)`
    geo: T,
    /// `√(αβ) Σ (γ^{x_i} + γ^{-x_i})`, i.e. `φ - α - β`.
    excess: T,
    /// `√(αβ) Σ (γ^{x_i} + γ^{-x_i} - 2)`.
    excess_over_amgm: T,
    rho0: Rho0<T>,
}

fn phi_parts<T: Real>(alpha: T, beta: T, n: usize) -> Result<PhiParts<T>> {
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_n(n, 2)?;
    // Canonical order keeps φ exactly symmetric.
    let (big, small) = if alpha >= beta { (alpha, beta) } else { (beta, alpha) };
    let geo = big.sqrt() * small.sqrt();
    let gamma = big / small;
    let m = T::count(n - 1);
    let two = T::lit(2.0);
    if gamma - T::one() < T::lit(GAMMA_ONE_CUTOFF) {
        let r = rho0(alpha / beta, n)?;
        let excess = m * (alpha + beta);
        return Ok(PhiParts {
            geo,
            excess,
            excess_over_amgm: excess - two * m * geo,
            rho0: r,
        });
    }
    let l = log_ratio(gamma);
    let (tau, iterations) = tau_from_log(l, n)?;
    let mut cosh2 = Vec::with_capacity(n);
    let mut over = Vec::with_capacity(n);
    for i in 1..n {
        // α ρ^{-2i} + β ρ^{2i} = √(αβ) (γ^{1/2 - 2iτ} + γ^{-(1/2 - 2iτ)})
        let y = l * (T::lit(0.5) - two * T::count(i) * tau);
        cosh2.push(two * y.cosh());
        over.push(two * cosh_minus_one(y));
    }
    let excess = geo * pairwise_sum(&cosh2);
    let excess_over_amgm = geo * pairwise_sum(&over);
    let rho = (tau * l).exp();
    let (blo, bhi) = if n == 2 { (tau, tau) } else { tau_bracket::<T>(n) };
    let mut r = Rho0 {
        gamma: alpha / beta,
        n,
        rho0: rho,
        tau: Some(tau),
        bracket_lo: (blo * l).exp(),
        bracket_hi: (bhi * l).exp(),
        iterations,
        residual: h_eval(gamma, n, rho)?,
    };
    if alpha < beta {
        r.rho0 = rho.recip();
        let lo = r.bracket_hi.recip();
        r.bracket_hi = r.bracket_lo.recip();
        r.bracket_lo = lo;
        r.residual = -r.residual;
        r.tau = Some(tau);
    }
    Ok(PhiParts {
        geo,
        excess,
        excess_over_amgm,
        rho0: r,
    })
}

/// `φ(α, β, n) = min_ρ f(ρ)`.
pub fn phi<T: Real>(alpha: T, beta: T, n: usize) -> Result<PhiResult<T>> {
    let parts = phi_parts(alpha, beta, n)?;
    Ok(PhiResult {
        phi: alpha.max(beta) + alpha.min(beta) + parts.excess,
        rho0: parts.rho0.rho0,
        bracket_lo: parts.rho0.bracket_lo,
        bracket_hi: parts.rho0.bracket_hi,
        iterations: parts.rho0.iterations,
        residual: parts.rho0.residual,
    })
}

/// Two-sided bounds `lo ≤ φ(α, β, n) < hi` for `α ≥ β > 0`, `n ≥ 3`:
/// `lo = α + β + 2(n-1)√(αβ)` and `hi = α + β + 2(n-1) α^{(n-1)/n} β^{1/n}`.
pub fn phi_bounds<T: Real>(alpha: T, beta: T, n: usize) -> Result<(T, T)> {
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_n(n, 3)?;
    if alpha < beta {
        return Err(domain("phi_bounds expects alpha >= beta; swap the arguments"));
    }
    let m = T::count(n - 1);
    let nn = T::count(n);
    let two = T::lit(2.0);
    let lo = alpha + beta + two * m * alpha.sqrt() * beta.sqrt();
    let cross = ((m / nn) * alpha.ln() + beta.ln() / nn).exp();
    let hi = alpha + beta + two * m * cross;
    Ok((lo, hi))
}

/// Quadratic coefficient `c_n` in
/// `φ(α, β, n) = α + β + 2(n-1)√(αβ) + c_n √(αβ) ε² + O(√(αβ) ε³)`
/// for `α/β = 1 + ε`.
///
/// `c_n = Σ_{i=1}^{n-1} (1/2 - 3i/(4n-2))² = (n-1)(n-2) / (8(2n-1))`.
pub fn near_one_quadratic_coefficient<T: Real>(n: usize) -> T {
    T::count((n - 1) * (n - 2)) / T::count(8 * (2 * n - 1))
}

/// Expansion of `φ` for `α/β = 1 + ε`, `ε ∈ (0, 1)`.
pub fn phi_expansion_near1<T: Real>(alpha: T, beta: T, n: usize) -> Result<ExpansionReport<T>> {
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_n(n, 2)?;
    let eps = alpha / beta - T::one();
    if !(eps > T::zero() && eps < T::one()) {
        return Err(domain(format!("alpha/beta - 1 must lie in (0, 1), got {eps}")));
    }
    let parts = phi_parts(alpha, beta, n)?;
    let c = near_one_quadratic_coefficient::<T>(n);
    let two = T::lit(2.0);
    let m = T::count(n - 1);
    let quad = c * parts.geo * eps * eps;
    let amgm = alpha + beta + two * m * parts.geo;
    let exact = amgm + parts.excess_over_amgm;
    let approx = amgm + quad;
    let rho_approx = if n == 2 {
        (log_ratio(alpha / beta) / T::lit(4.0)).exp()
    } else {
        (tau_bracket::<T>(n).0 * log_ratio(alpha / beta)).exp()
    };
    Ok(ExpansionReport {
        exact,
        approx,
        residual: parts.excess_over_amgm - quad,
        remainder_scale: parts.geo * eps * eps * eps,
        regime: Regime::NearOne,
        rho0: parts.rho0.rho0,
        rho0_approx: rho_approx,
    })
}

/// Expansion of `φ` for large `α/β`:
/// `φ ≈ α + β + n (n-1)^{-(n-1)/n} α^{(n-1)/n} β^{1/n}`, remainder
/// `O(α^{(n-2)/n} β^{2/n})`. Requires `α > β`.
pub fn phi_expansion_large<T: Real>(alpha: T, beta: T, n: usize) -> Result<ExpansionReport<T>> {
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_n(n, 2)?;
    if !(alpha > beta) {
        return Err(domain("phi_expansion_large expects alpha > beta"));
    }
    let parts = phi_parts(alpha, beta, n)?;
    let nn = T::count(n);
    let m = T::count(n - 1);
    let (la, lb) = (alpha.ln(), beta.ln());
    let coef = nn * (-(m / nn) * m.ln()).exp();
    let lead = coef * ((m / nn) * la + lb / nn).exp();
    let scale = (((nn - T::lit(2.0)) / nn) * la + (T::lit(2.0) / nn) * lb).exp();
    let rho_approx = ((log_ratio(alpha / beta) - m.ln()) / (T::lit(2.0) * nn)).exp();
    Ok(ExpansionReport {
        exact: alpha + beta + parts.excess,
        approx: alpha + beta + lead,
        residual: parts.excess - lead,
        remainder_scale: scale,
        regime: Regime::LargeGamma,
        rho0: parts.rho0.rho0,
        rho0_approx: rho_approx,
    })
}
