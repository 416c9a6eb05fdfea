use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::Polytope;

/// How [`random_polytope`] samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RandomOptions {
    /// Add `-v` for every sampled `v`.
    pub symmetric: bool,
    /// Resample until the origin is interior (at most 64 attempts).
    pub require_origin_interior: bool,
}

const ATTEMPTS: usize = 64;

/// A uniformly random unit vector.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-6 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Hull of `m` uniform points on the unit sphere of `ℝⁿ`, deterministic
/// in `seed`.
pub fn random_polytope<T: Real>(n: usize, m: usize, seed: u64, opts: RandomOptions) -> Result<Polytope<T>> {
    if m < n + 1 {
        return Err(Error::Domain(format!("need at least {} points, got {m}", n + 1)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ATTEMPTS {
        let mut pts: Vec<Vec<T>> = Vec::with_capacity(if opts.symmetric { 2 * m } else { m });
        for _ in 0..m {
            let v = random_unit(&mut rng, n);
            if opts.symmetric {
                pts.push(v.iter().map(|&x| T::lit(-x)).collect());
            }
            pts.push(v.into_iter().map(T::lit).collect());
        }
        let p = match Polytope::from_vertices(&pts) {
            Ok(p) => p,
            Err(Error::Dimension(_)) => continue,
            Err(e) => return Err(e),
        };
        if !opts.require_origin_interior || p.contains_origin_interior() {
            return Ok(p);
        }
    }
    Err(Error::NoConvergence {
        what: format!("random polytope with interior origin (n = {n}, m = {m})"),
        iterations: ATTEMPTS,
    })
}
