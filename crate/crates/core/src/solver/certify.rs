use serde::{Deserialize, Serialize};

use super::Bracket;
use crate::problem::ReducedProblem;
use crate::quadrature::{correction_from, node, ExactSum};

/// Independent re-check of a [`Bracket`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub passed: bool,
    /// `n1 < n2` and the stored endpoints sit on the grid.
    pub ordered: bool,
    /// `Σ_t(n1) <= target`.
    pub lower_ok: bool,
    /// `target <= Σ_l(n2)`.
    pub upper_ok: bool,
    pub width_ok: bool,
    pub lower_trapezoidal: f64,
    pub upper_lower_sum: f64,
    pub target: f64,
    pub width: f64,
    pub width_bound: f64,
}

/// Recomputes `Σ_l(n1) + A(n1) <= target <= Σ_l(n2)` and the width bound
/// with correctly rounded summation, sharing no accumulator with the scan
/// that produced the bracket.
///
/// Failure is a result, not an error: a non-finite `p` value fails the
/// certificate.
pub fn certify(rp: &ReducedProblem, br: &Bracket) -> Certificate {
    let y0 = rp.y0();
    let h = br.h;
    let on_grid = br.y_lo == node(y0, h, br.n1) && br.y_hi == node(y0, h, br.n2);
    let ordered = br.n1 < br.n2 && on_grid && h > 0.0;

    let width = (br.n2.saturating_sub(br.n1)) as f64 * h;
    // h = h1/j, so j·h may land one ulp above h1.
    let width_ok = ordered && width <= br.width_bound * (1.0 + 4.0 * f64::EPSILON);

    let mut lower_trapezoidal = f64::NAN;
    let mut upper_lower_sum = f64::NAN;
    if ordered {
        let p0 = rp.p(y0);
        let mut sum = ExactSum::new();
        let mut finite = p0.is_finite();
        let mut i = 0;
        if br.n1 == 0 {
            lower_trapezoidal = 0.0;
        }
        while finite && i < br.n2 {
            i += 1;
            let v = rp.p(node(y0, h, i));
            finite = v.is_finite();
            sum.add(h * v);
            if i == br.n1 {
                lower_trapezoidal = sum.value() + correction_from(h, p0, v);
            }
        }
        if finite {
            upper_lower_sum = sum.value();
        } else {
            lower_trapezoidal = f64::NAN;
        }
    }

    let lower_ok = lower_trapezoidal <= br.target;
    let upper_ok = br.target <= upper_lower_sum;
    Certificate {
        passed: ordered && lower_ok && upper_ok && width_ok,
        ordered,
        lower_ok,
        upper_ok,
        width_ok,
        lower_trapezoidal,
        upper_lower_sum,
        target: br.target,
        width,
        width_bound: br.width_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{algorithm1, algorithm2, SolverOptions, Variant};

    fn linear(b: f64) -> ReducedProblem {
        ReducedProblem::new(|y| 1.0 / (1.0 + y), 0.0, b).unwrap()
    }

    fn opts() -> SolverOptions {
        SolverOptions::new(1e-4).h1_factor(2.0).variant(Variant::Midpoint)
    }

    #[test]
    fn solver_brackets_certify() {
        for b in [0.05, 0.6, 1.0] {
            let rp = linear(b);
            let r1 = algorithm1(&rp, &opts()).unwrap();
            let r2 = algorithm2(&rp, &opts()).unwrap();
            assert!(certify(&rp, &r1.bracket).passed);
            assert!(certify(&rp, &r2.bracket).passed);
        }
    }

    #[test]
    fn collapsed_bracket_fails() {
        let rp = linear(1.0);
        let mut br = algorithm1(&rp, &opts()).unwrap().bracket;
        br.n2 = br.n1;
        br.y_hi = br.y_lo;
        let c = certify(&rp, &br);
        assert!(!c.passed && !c.ordered);
    }

    #[test]
    fn shifted_bracket_fails_lower_comparison() {
        let rp = linear(1.0);
        let mut br = algorithm1(&rp, &opts()).unwrap().bracket;
        let shift = (10.0 / br.h) as u64;
        br = Bracket::new(0.0, br.h, br.n1 + shift, br.n2 + shift, br.target, br.width_bound);
        let c = certify(&rp, &br);
        assert!(c.ordered && c.width_ok && c.upper_ok);
        assert!(!c.lower_ok && !c.passed);
    }

    #[test]
    fn widened_bracket_fails_width() {
        let rp = linear(1.0);
        let br = algorithm1(&rp, &opts()).unwrap().bracket;
        let wide = Bracket::new(0.0, br.h, br.n1 - 10, br.n2, br.target, br.width_bound);
        let c = certify(&rp, &wide);
        assert!(c.lower_ok && c.upper_ok);
        assert!(!c.width_ok && !c.passed);
    }

    #[test]
    fn off_grid_endpoint_fails() {
        let rp = linear(1.0);
        let mut br = algorithm1(&rp, &opts()).unwrap().bracket;
        br.y_hi += 1e-6;
        assert!(!certify(&rp, &br).passed);
    }
}
