//! Small dense linear algebra on `Vec`/slice vectors.
//!
//! Everything here works in dimension at most a few dozen, so plain
//! row-major `Vec<Vec<T>>` matrices are used throughout.

use crate::scalar::Real;

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// `a + s * b`
pub fn axpy<T: Real>(a: &[T], s: T, b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + s * y).collect()
}

pub fn distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

/// Returns `a / |a|`, or `None` for a (numerically) zero vector.
pub fn normalized<T: Real>(a: &[T]) -> Option<Vec<T>> {
    let r = norm(a);
    if r > T::min_positive_value() && r.is_finite() {
        Some(scale(a, r.recip()))
    } else {
        None
    }
}

pub fn centroid<T: Real>(points: &[&[T]]) -> Vec<T> {
    let dim = points[0].len();
    let mut c = vec![T::zero(); dim];
    for p in points {
        for (ci, &x) in c.iter_mut().zip(p.iter()) {
            *ci += x;
        }
    }
    let k = T::count(points.len());
    c.iter_mut().for_each(|x| *x /= k);
    c
}

pub fn unit_vector<T: Real>(dim: usize, axis: usize) -> Vec<T> {
    let mut e = vec![T::zero(); dim];
    e[axis] = T::one();
    e
}

/// Removes from `v` its components along the orthonormal `basis`.
/// Two passes of modified Gram-Schmidt.
pub fn reject<T: Real>(v: &[T], basis: &[Vec<T>]) -> Vec<T> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = dot(&r, b);
            for (ri, &bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
    }
    r
}

/// Extends an orthonormal `basis` by `v` if `v` has a component of
/// relative size above `tol` outside the current span.
pub fn try_extend_basis<T: Real>(basis: &mut Vec<Vec<T>>, v: &[T], tol: T) -> bool {
    let scale = norm(v);
    if scale <= T::min_positive_value() {
        return false;
    }
    let r = reject(v, basis);
    let rn = norm(&r);
    if rn > tol * scale {
        basis.push(scale_vec(r, rn.recip()));
        true
    } else {
        false
    }
}

fn scale_vec<T: Real>(mut v: Vec<T>, s: T) -> Vec<T> {
    v.iter_mut().for_each(|x| *x *= s);
    v
}

/// Orthonormal basis of the span of `vectors` (relative rank tolerance `tol`).
pub fn orthonormal_span<T: Real>(vectors: &[&[T]], tol: T) -> Vec<Vec<T>> {
    let mut basis = Vec::new();
    for v in vectors {
        try_extend_basis(&mut basis, v, tol);
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal `basis` in dimension `dim`.
pub fn orthonormal_complement<T: Real>(basis: &[Vec<T>], dim: usize) -> Vec<Vec<T>> {
    let mut full: Vec<Vec<T>> = basis.to_vec();
    let mut extra = Vec::new();
    // Pick coordinate axes in order of how far they stick out of the span.
    let mut axes: Vec<(usize, T)> = (0..dim)
        .map(|k| {
            let e = unit_vector::<T>(dim, k);
            (k, norm(&reject(&e, basis)))
        })
        .collect();
    axes.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    for (k, _) in axes {
        if full.len() == dim {
            break;
        }
        let e = unit_vector::<T>(dim, k);
        let before = full.len();
        if try_extend_basis(&mut full, &e, T::tol(1e-6)) {
            extra.push(full[before].clone());
        }
    }
    extra
}

/// Residual distance of `v` from the subspace with orthonormal `basis`.
pub fn distance_to_span<T: Real>(v: &[T], basis: &[Vec<T>]) -> T {
    norm(&reject(v, basis))
}

/// Unit normal of the hyperplane through `points` (exactly `dim` points in
/// `dim` dimensions), or `None` if they are affinely dependent relative
/// to `tol`. The sign is arbitrary.
pub fn hyperplane_normal<T: Real>(points: &[&[T]], tol: T) -> Option<Vec<T>> {
    let dim = points[0].len();
    debug_assert_eq!(points.len(), dim);
    let mut basis = Vec::with_capacity(dim);
    for p in &points[1..] {
        let d = sub(p, points[0]);
        if !try_extend_basis(&mut basis, &d, tol) {
            return None;
        }
    }
    orthonormal_complement(&basis, dim).into_iter().next()
}

/// `k`-dimensional volume of the simplex spanned by `k + 1` points in any
/// ambient dimension.
pub fn simplex_volume<T: Real>(points: &[&[T]]) -> T {
    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut vol = T::one();
    for (k, p) in points[1..].iter().enumerate() {
        let d = sub(p, points[0]);
        let r = reject(&d, &basis);
        let rn = norm(&r);
        if rn <= T::min_positive_value() {
            return T::zero();
        }
        vol = vol * rn / T::count(k + 1);
        basis.push(scale_vec(r, rn.recip()));
    }
    vol
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below `tol` times the largest entry.
pub fn solve<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>, tol: T) -> Option<Vec<T>> {
    let n = b.len();
    let amax = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |m, &x| m.max(x.abs()));
    if amax <= T::zero() || !amax.is_finite() {
        return None;
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if a[piv][col].abs() <= tol * amax {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == T::zero() {
                continue;
            }
            let (top, rest) = a.split_at_mut(row);
            for (x, &v) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Applies the row-major matrix `m` to `v`.
pub fn mat_vec<T: Real>(m: &[Vec<T>], v: &[T]) -> Vec<T> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Coordinates of `v` in the orthonormal `basis`.
pub fn coordinates<T: Real>(v: &[T], basis: &[Vec<T>]) -> Vec<T> {
    basis.iter().map(|b| dot(v, b)).collect()
}

/// Inverse of [`coordinates`]: `Σ c_k basis_k`.
pub fn combine<T: Real>(coords: &[T], basis: &[Vec<T>], dim: usize) -> Vec<T> {
    let mut out = vec![T::zero(); dim];
    for (&c, b) in coords.iter().zip(basis) {
        for (o, &bi) in out.iter_mut().zip(b) {
            *o += c * bi;
        }
    }
    out
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        1 => xs[0],
        n if n <= 8 => xs.iter().copied().sum(),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}
