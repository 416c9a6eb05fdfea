//! `start:stop:step` grids.

use anyhow::{bail, Context, Result};

fn decimals(s: &str) -> usize {
    let mantissa = s.split(['e', 'E']).next().unwrap_or(s);
    mantissa.split_once('.').map_or(0, |(_, f)| f.len())
}

/// A single number or an inclusive `start:stop:step` grid. Grid points are
/// `start + k·step`, rounded to the number of decimals written in the spec.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<f64> {
        let x: f64 = s.trim().parse().with_context(|| format!("not a number: {s:?}"))?;
        if !x.is_finite() {
            bail!("not finite: {s:?}");
        }
        Ok(x)
    };
    match parts.as_slice() {
        [x] => Ok(vec![num(x)?]),
        [a, b, s] => {
            let (start, stop, step) = (num(a)?, num(b)?, num(s)?);
            if step <= 0.0 {
                bail!("step must be positive in {spec:?}");
            }
            if stop < start {
                bail!("stop precedes start in {spec:?}");
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                bail!("grid {spec:?} has {count} points");
            }
            let d = parts.iter().map(|p| decimals(p.trim())).max().unwrap_or(0).min(15) as i32;
            let f = 10f64.powi(d);
            Ok((0..count).map(|k| ((start + k as f64 * step) * f).round() / f).collect())
        }
        _ => bail!("expected a number or start:stop:step, got {spec:?}"),
    }
}

pub fn parse_int_grid(spec: &str) -> Result<Vec<usize>> {
    parse_grid(spec)?
        .into_iter()
        .map(|x| {
            if x >= 0.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                bail!("expected a non-negative integer, got {x}")
            }
        })
        .collect()
}

pub fn parse_vector(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad coordinate {s:?}")))
        .collect()
}
