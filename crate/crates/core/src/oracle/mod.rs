//! Reference solutions used to check the bracketing solvers.
//!
//! Nothing here carries the tolerance guarantee; these are ground truths
//! (closed forms, high-precision quadrature inversion) and a classical
//! fixed-step comparator.

pub mod quad;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::{ReducedProblem, SeparableProblem};

/// Exact solution of a built-in problem.
#[derive(Clone)]
pub struct ReferenceSolution {
    y_of_x: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Right end of the interval the solution extends to.
    pub valid_until: f64,
}

impl std::fmt::Debug for ReferenceSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReferenceSolution").field("valid_until", &self.valid_until).finish_non_exhaustive()
    }
}

impl ReferenceSolution {
    pub fn y(&self, x: f64) -> f64 {
        (self.y_of_x)(x)
    }
}

/// Names accepted by [`builtin_reference`].
pub const BUILTIN_NAMES: [&str; 2] = ["linear", "riccati"];

/// `y' = y + 1` from `y0`: `y = (1 + y0)·e^x - 1`.
pub fn linear_reference(y0: f64, b: f64) -> Result<(SeparableProblem, ReferenceSolution)> {
    let prob = SeparableProblem::new(|y| y + 1.0, |y| 1.0 / (y + 1.0), y0, b)?;
    let sol = ReferenceSolution {
        y_of_x: Arc::new(move |x: f64| (1.0 + y0) * x.exp() - 1.0),
        valid_until: f64::INFINITY,
    };
    Ok((prob, sol))
}

/// `y' = y²` from `y0 > 0`: `y = 1/(1/y0 - x)`, blowing up at `x = 1/y0`.
pub fn riccati_reference(y0: f64, b: f64) -> Result<(SeparableProblem, ReferenceSolution)> {
    if y0 <= 0.0 {
        return Err(Error::InvalidArgument(format!("riccati needs y0 > 0, got {y0}")));
    }
    let c = 1.0 / y0;
    let prob = SeparableProblem::new(|y| y * y, |y| 1.0 / (y * y), y0, b)?.with_extension_limit(c);
    let sol = ReferenceSolution {
        y_of_x: Arc::new(move |x: f64| 1.0 / (c - x)),
        valid_until: c,
    };
    Ok((prob, sol))
}

/// The two reference problems with their exact solutions.
///
/// `"linear"`: `y' = y + 1`, `y(0) = 0`, `y = e^x - 1`.
/// `"riccati"`: `y' = y²`, `y(0) = 0.5`, `y = 1/(2 - x)`, valid until 2.
/// The returned problems have target `b = 1`.
pub fn builtin_reference(name: &str) -> Result<(SeparableProblem, ReferenceSolution)> {
    match name {
        "linear" => linear_reference(0.0, 1.0),
        "riccati" => riccati_reference(0.5, 1.0),
        other => Err(Error::InvalidArgument(format!("unknown built-in problem '{other}'"))),
    }
}

/// Solves `∫_{y0}^{Y} p(y) dy = b` for `Y` by adaptive quadrature inside a
/// safeguarded Newton/bisection iteration on `Y`.
///
/// `p` must be positive and finite on `[y0, Y]`. The result is within
/// `precision` of the root.
pub fn invert_integral<F>(p: &F, y0: f64, b: f64, precision: f64) -> Result<f64>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    if !(b >= 0.0 && b.is_finite()) || precision.is_nan() || precision <= 0.0 {
        return Err(Error::Oracle(format!("bad inversion request b = {b}, precision = {precision}")));
    }
    if b == 0.0 {
        return Ok(y0);
    }
    let p0 = p(y0);
    if !(p0 > 0.0 && p0.is_finite()) {
        return Err(Error::Oracle(format!("p(y0) = {p0} is not positive")));
    }

    // Each F(Y) is integrated from y0 afresh so errors never accumulate.
    // dY = dF / p(Y), so the quadrature tolerance scales with p at Y.
    let residual = |y: f64| -> Result<f64> {
        let py = p(y);
        if !(py > 0.0 && py.is_finite()) {
            return Err(Error::Oracle(format!("p({y}) = {py} is not positive")));
        }
        let tol = (1e-3 * precision * py).max(1e-16 * b);
        Ok(quad::integrate(p, y0, y, tol)? - b)
    };

    // Expand the bracket geometrically.
    let mut lo = y0;
    let mut step = b / p0;
    let mut hi = y0 + step;
    let mut expansions = 0;
    loop {
        match residual(hi) {
            Ok(r) if r >= 0.0 => break,
            Ok(_) => {
                lo = hi;
                step *= 2.0;
                hi = lo + step;
            }
            Err(e) => return Err(Error::Oracle(format!("bracket expansion failed: {e}"))),
        }
        expansions += 1;
        if expansions > 200 || !hi.is_finite() {
            return Err(Error::Oracle(format!("could not bracket the root of ∫p = {b}")));
        }
    }

    let mut y = 0.5 * (lo + hi);
    for _ in 0..200 {
        let r = residual(y)?;
        if r == 0.0 {
            return Ok(y);
        }
        if r > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let newton = y - r / p(y);
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let moved = (next - y).abs();
        y = next;
        if moved < 1e-3 * precision || hi - lo < precision {
            return Ok(y);
        }
    }
    Err(Error::Oracle("root iteration did not converge".into()))
}

/// Classical fourth-order Runge–Kutta on `y' = 1/p(y)` with `steps` uniform
/// steps over `[0, b]`. No tolerance guarantee; used only for contrast.
pub fn classical_step_solver(rp: &ReducedProblem, b: f64, steps: usize) -> Result<f64> {
    if steps < 1 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let f = |y: f64| 1.0 / rp.p(y);
    let h = b / steps as f64;
    let mut y = rp.y0();
    for k in 0..steps {
        let k1 = f(y);
        let k2 = f(y + 0.5 * h * k1);
        let k3 = f(y + 0.5 * h * k2);
        let k4 = f(y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !y.is_finite() {
            return Err(Error::Divergence { step: k + 1, x: h * (k + 1) as f64 });
        }
    }
    Ok(y)
}
