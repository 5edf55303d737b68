//! Inversion of a strictly increasing function on a bracket.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct InvertOptions {
    /// Bracket width at which bisection hands over to Newton steps.
    pub bisect_width: f64,
    /// Absolute step size at which Newton iteration stops.
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for InvertOptions {
    fn default() -> Self {
        InvertOptions {
            bisect_width: 1e-6,
            x_tol: 1e-15,
            max_iter: 200,
        }
    }
}

/// Solves `f(x) = target` for increasing `f` on `[lo, hi]`.
///
/// `f` may return `-inf`/`+inf` at the bracket ends (coordinate singularities);
/// only interior points are ever evaluated. `slope` is `df/dx`. Newton steps
/// that leave the current bracket fall back to bisection.
pub fn invert_increasing<F, D>(
    f: F,
    slope: D,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    opts: InvertOptions,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
    D: Fn(f64) -> Result<f64>,
{
    let mut iter = 0;
    while hi - lo > opts.bisect_width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
        if iter > opts.max_iter {
            return Err(Error::RootNotConverged { target, lo, hi });
        }
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..opts.max_iter {
        let fx = f(x)? - target;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = slope(x)?;
        let mut next = if d > 0.0 && d.is_finite() { x - fx / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= opts.x_tol * (1.0 + x.abs()) || hi - lo <= opts.x_tol * (1.0 + x.abs()) {
            return Ok(x);
        }
    }
    Err(Error::RootNotConverged { target, lo, hi })
}
