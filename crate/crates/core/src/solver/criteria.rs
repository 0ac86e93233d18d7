//! Refinement indices bounding the number of [`algorithm1`](super::algorithm1) iterations.
//!
//! With `p0 = p(y0)`, `pa = p` at the node before the reference node and
//! `pb = p` at the reference node (all on the first grid, step `h1`):
//!
//! * sufficient: `j >= 1 + (p0 - pa) / (2 pb)`, reference node `n2`;
//!   simplified: `j >= (1 + p0 / pb) / 2`.
//! * necessary: `j > 1 + (p0 - pa - 2 pb) / (2 pa)`, reference node `n3`;
//!   simplified: `j > 1 + (p0 - 3 pb) / (2 pa)`.

use crate::error::{Error, Result};
use crate::quadrature::{eval, node};

fn positive(at: f64, value: f64) -> Result<f64> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidIntegrand { at, value })
    }
}

fn to_index(x: f64) -> u64 {
    if x <= 1.0 {
        1
    } else {
        x as u64
    }
}

/// Right-hand side of the sufficient criterion.
pub fn sufficient_rhs(p0: f64, pa: f64, pb: f64, simplified: bool) -> f64 {
    if simplified {
        0.5 * (1.0 + p0 / pb)
    } else {
        1.0 + 0.5 * ((p0 - pa) / pb)
    }
}

/// Right-hand side of the necessary criterion.
pub fn necessary_rhs(p0: f64, pa: f64, pb: f64, simplified: bool) -> f64 {
    if simplified {
        1.0 + 0.5 * (p0 - 3.0 * pb) / pa
    } else {
        1.0 + 0.5 * (p0 - pa - 2.0 * pb) / pa
    }
}

/// Smallest `j >= 1` with `j >= rhs` (an integral right-hand side is its
/// own answer).
pub fn sufficient_index(p0: f64, pa: f64, pb: f64, simplified: bool) -> u64 {
    to_index(sufficient_rhs(p0, pa, pb, simplified).ceil())
}

/// Smallest `j >= 1` with `j > rhs`.
pub fn necessary_index(p0: f64, pa: f64, pb: f64, simplified: bool) -> u64 {
    to_index(necessary_rhs(p0, pa, pb, simplified).floor() + 1.0)
}

/// `j_s`: the smallest refinement index that guarantees [`algorithm1`](super::algorithm1) stops,
/// from a first scan at step `h1` that crossed the target at node `n2_1`.
pub fn compute_js<F>(p: &F, y0: f64, h1: f64, n2_1: u64, simplified: bool) -> Result<u64>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    if n2_1 < 1 {
        return Err(Error::InvalidArgument("n2 must be at least 1".into()));
    }
    let p0 = eval(p, y0)?;
    let pa = eval(p, node(y0, h1, n2_1 - 1))?;
    let yb = node(y0, h1, n2_1);
    let pb = positive(yb, eval(p, yb)?)?;
    Ok(sufficient_index(p0, pa, pb, simplified))
}

/// `j_n`: the smallest refinement index that the iteration could possibly stop
/// at, from the trapezoidal crossing `n3_1` of a first scan at step `h1`.
pub fn compute_jn<F>(p: &F, y0: f64, h1: f64, n3_1: u64, simplified: bool) -> Result<u64>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    if n3_1 < 1 {
        return Err(Error::InvalidArgument("n3 must be at least 1".into()));
    }
    let p0 = eval(p, y0)?;
    let ya = node(y0, h1, n3_1 - 1);
    let pa = positive(ya, eval(p, ya)?)?;
    let yb = node(y0, h1, n3_1);
    let pb = positive(yb, eval(p, yb)?)?;
    Ok(necessary_index(p0, pa, pb, simplified))
}

pub(crate) fn js_checked(p0: f64, pa: f64, pb: f64, yb: f64, simplified: bool) -> Result<u64> {
    positive(yb, pb)?;
    Ok(sufficient_index(p0, pa, pb, simplified))
}

pub(crate) fn jn_checked(p0: f64, pa: Option<f64>, pb: f64, yb: f64, simplified: bool) -> Result<u64> {
    // n3 = 0: the criterion has no reference interval and imposes nothing.
    let Some(pa) = pa else { return Ok(1) };
    positive(yb, pb)?;
    positive(yb, pa)?;
    Ok(necessary_index(p0, pa, pb, simplified))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{find_n3, scan_to_target};

    fn linear(y: f64) -> f64 {
        1.0 / (1.0 + y)
    }

    fn riccati(y: f64) -> f64 {
        1.0 / (y * y)
    }

    #[test]
    fn ceiling_semantics() {
        // rhs exactly 3 → 3 for the inclusive criterion, 4 for the strict one
        assert_eq!(sufficient_index(5.0, 1.0, 1.0, false), 3);
        assert_eq!(necessary_index(8.0, 1.0, 0.5, false), 5);
        assert_eq!(necessary_index(7.0, 1.0, 1.0, false), 4);
        assert_eq!(sufficient_index(5.1, 1.0, 1.0, false), 4);
    }

    #[test]
    fn constant_integrand_gives_one() {
        assert_eq!(compute_js(&|_| 2.0, 0.0, 0.1, 10, false).unwrap(), 1);
        assert_eq!(compute_jn(&|_| 2.0, 0.0, 0.1, 10, false).unwrap(), 1);
    }

    #[test]
    fn simplified_criteria_are_stronger() {
        for (p0, pa, pb) in [(4.0, 0.17, 0.16), (1.0, 0.4, 0.39), (3.0, 3.0, 3.0)] {
            assert!(sufficient_rhs(p0, pa, pb, true) >= sufficient_rhs(p0, pa, pb, false));
            assert!(necessary_rhs(p0, pa, pb, true) >= necessary_rhs(p0, pa, pb, false));
        }
    }

    #[test]
    fn linear_problem_at_one() {
        let h1 = 2e-4;
        let n2 = scan_to_target(&linear, 0.0, h1, 1.0, u64::MAX).unwrap().n2;
        assert_eq!(compute_js(&linear, 0.0, h1, n2, false).unwrap(), 2);
        let n3 = find_n3(&linear, 0.0, h1, 1.0, u64::MAX).unwrap();
        assert_eq!(compute_jn(&linear, 0.0, h1, n3, false).unwrap(), 1);
    }

    #[test]
    fn riccati_problem_at_one_point_six() {
        let h1 = 2e-4;
        let x = 0.05 * 32.0;
        let n2 = scan_to_target(&riccati, 0.5, h1, x, u64::MAX).unwrap().n2;
        assert_eq!(n2, 10_013);
        assert_eq!(compute_js(&riccati, 0.5, h1, n2, false).unwrap(), 14);
        // n3 = 9999 sits at y = 2.4998, just below the exact y(1.6) = 2.5,
        // where the necessary right-hand side is 11.9962.
        let n3 = find_n3(&riccati, 0.5, h1, x, u64::MAX).unwrap();
        assert_eq!(n3, 9_999);
        let y3 = 0.5 + h1 * 9_999.0;
        let (p0, pa, pb) = (4.0, riccati(y3 - h1), riccati(y3));
        assert!((necessary_rhs(p0, pa, pb, false) - 11.9962).abs() < 1e-4);
        assert_eq!(compute_jn(&riccati, 0.5, h1, n3, false).unwrap(), 12);
    }

    #[test]
    fn invalid_integrand_is_rejected() {
        let p = |y: f64| if y > 0.5 { -1.0 } else { 1.0 };
        assert!(matches!(compute_js(&p, 0.0, 0.1, 8, false), Err(Error::InvalidIntegrand { .. })));
        assert!(compute_js(&linear, 0.0, 0.1, 0, false).is_err());
        assert!(compute_jn(&linear, 0.0, 0.1, 0, false).is_err());
    }
}
