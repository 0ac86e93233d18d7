//! Bracketing solvers for `∫_{y0}^{y(b)} p(y) dy = b`.
//!
//! Both algorithms look for node indices `n1 < n2` on a grid of step `h`
//! such that the trapezoidal sum through `n1` stays at or below `b` while
//! the lower sum through `n2` reaches it. For a positive, decreasing, convex
//! `p` this pins `y(b)` strictly inside `[y0 + h·n1, y0 + h·n2]`.
//!
//! * [`algorithm1`] tries refinements `h = h1/j` for `j = 1, 2, …` and backs
//!   off `j` nodes from the crossing until the trapezoidal test passes.
//! * [`algorithm2`] scans once at `h1`, and if that is not enough jumps
//!   straight to the sufficient index `j_s` for a second and final scan.
//! * [`mesh_solve`] runs the two-pass scheme once for the last abscissa and
//!   reads every intermediate mesh node off the same final scan.
//!
//! The enclosure is exact-arithmetic. All sums are compensated and each
//! report carries `float_residual`, a bound on the rounding of the lower
//! sum that decided the bracket.

mod certify;
mod cost;
pub mod criteria;
mod mesh;
mod scan;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ReducedProblem;
use crate::quadrature::{node, DEFAULT_NODE_CAP};

pub use certify::{certify, Certificate};
pub use cost::{bisection_cost_model, CostSummary};
pub use criteria::{compute_jn, compute_js};
pub use crate::quadrature::find_n3;
pub use mesh::{mesh_solve, MeshNode, MeshReport};

use scan::{scan_targets, Crossing};

/// Which point of the final bracket is returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Left,
    Right,
    Midpoint,
}

impl Variant {
    /// Worst-case distance to `y(b)` as a fraction of the bracket width.
    pub fn tolerance_fraction(self) -> f64 {
        match self {
            Variant::Midpoint => 0.5,
            Variant::Left | Variant::Right => 1.0,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Left => "left",
            Variant::Right => "right",
            Variant::Midpoint => "midpoint",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Variant::Left),
            "right" => Ok(Variant::Right),
            "midpoint" | "mid" => Ok(Variant::Midpoint),
            other => Err(Error::InvalidArgument(format!("unknown variant '{other}'"))),
        }
    }
}

/// Solver configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub eps: f64,
    pub variant: Variant,
    /// First step is `h1 = h1_factor * eps`.
    pub h1_factor: f64,
    pub node_cap: u64,
    /// Use the simplified sufficient criterion in the second pass.
    pub simplified_js: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            eps: 1e-4,
            variant: Variant::Right,
            h1_factor: 1.0,
            node_cap: DEFAULT_NODE_CAP,
            simplified_js: false,
        }
    }
}

impl SolverOptions {
    pub fn new(eps: f64) -> Self {
        Self { eps, ..Self::default() }
    }

    pub fn variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn h1_factor(mut self, factor: f64) -> Self {
        self.h1_factor = factor;
        self
    }

    pub fn node_cap(mut self, cap: u64) -> Self {
        self.node_cap = cap;
        self
    }

    pub fn simplified_js(mut self, on: bool) -> Self {
        self.simplified_js = on;
        self
    }

    /// Initial step, which is also the guaranteed bracket width.
    pub fn h1(&self) -> f64 {
        self.h1_factor * self.eps
    }

    /// Guaranteed bound on `|y_b - y(b)|` for the configured variant.
    pub fn guaranteed_tolerance(&self) -> f64 {
        self.h1() * self.variant.tolerance_fraction()
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.h1_factor > 0.0 && self.h1_factor.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "h1_factor must be positive, got {}",
                self.h1_factor
            )));
        }
        if self.node_cap < 1 {
            return Err(Error::InvalidArgument("node_cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// Enclosure `[y0 + h·n1, y0 + h·n2]` of the solution at `target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub h: f64,
    pub n1: u64,
    pub n2: u64,
    pub y_lo: f64,
    pub y_hi: f64,
    /// Right-hand side the bracket encloses the solution for.
    pub target: f64,
    /// Width the bracket is required not to exceed (the first step `h1`).
    pub width_bound: f64,
}

impl Bracket {
    pub(crate) fn new(y0: f64, h: f64, n1: u64, n2: u64, target: f64, width_bound: f64) -> Self {
        Self {
            h,
            n1,
            n2,
            y_lo: node(y0, h, n1),
            y_hi: node(y0, h, n2),
            target,
            width_bound,
        }
    }

    pub fn pick(&self, variant: Variant) -> f64 {
        match variant {
            Variant::Left => self.y_lo,
            Variant::Right => self.y_hi,
            Variant::Midpoint => (self.y_lo + self.y_hi) / 2.0,
        }
    }
}

/// Trace of one refinement level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub j: u64,
    pub h: f64,
    pub n2: u64,
    /// Largest node count whose trapezoidal sum stays at or below `b`.
    pub n3: u64,
    /// Trapezoidal sum through `n2 - j` (0 when the back-off passes the origin).
    pub backstep_trapezoidal: f64,
    pub accepted: bool,
    pub evals: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub y_b: f64,
    pub variant: Variant,
    pub bracket: Bracket,
    pub j_used: u64,
    pub j_n: u64,
    pub j_s: u64,
    pub evals: u64,
    pub float_residual: f64,
    pub h1: f64,
    pub iterations: Vec<IterationRecord>,
}

/// Result of testing one crossing at refinement `j`.
struct Level {
    record: IterationRecord,
    bracket: Bracket,
}

fn level(rp: &ReducedProblem, j: u64, h: f64, h1: f64, c: &Crossing, evals: u64) -> Level {
    let (n1, trap, accepted) = match c.back {
        Some(back) => (back.index, back.trapezoidal, back.trapezoidal <= c.target),
        // Backing off j nodes would pass the origin: [y0, y0 + h·n2] is
        // already no wider than j·h = h1.
        None => (0, 0.0, true),
    };
    Level {
        record: IterationRecord {
            j,
            h,
            n2: c.n2,
            n3: c.n3.map_or(0, |t| t.n3),
            backstep_trapezoidal: trap,
            accepted,
            evals,
        },
        bracket: Bracket::new(rp.y0(), h, n1, c.n2, c.target, h1),
    }
}

/// `(j_n, j_s)` from a crossing on the first grid.
fn diagnostics(rp: &ReducedProblem, h1: f64, p0: f64, c: &Crossing, simplified: bool) -> Result<(u64, u64)> {
    let js = criteria::js_checked(p0, c.before.p, c.at.p, node(rp.y0(), h1, c.n2), simplified)?;
    let jn = match c.n3 {
        Some(t) => criteria::jn_checked(p0, t.p_before, t.p_at, node(rp.y0(), h1, t.n3), false)?,
        None => 1,
    };
    Ok((jn, js))
}

/// Iterates `j = 1, 2, …` with step `h1/j` until the trapezoidal sum `j`
/// nodes behind the lower-sum crossing is at or below `b`.
///
/// Terminates no later than `j_s`. The returned value is within
/// `h1_factor·eps` of `y(b)` (half that for the midpoint), in exact
/// arithmetic.
pub fn algorithm1(rp: &ReducedProblem, opts: &SolverOptions) -> Result<SolveReport> {
    opts.validate()?;
    let p = rp.p_fn();
    let h1 = opts.h1();
    let b = rp.b();
    let mut iterations = Vec::new();
    let mut evals = 0;
    let mut diag = (1, 1);

    for j in 1u64.. {
        let h = h1 / j as f64;
        let scan = scan_targets(p, rp.y0(), h, &[b], j, true, opts.node_cap)?;
        evals += scan.evals;
        let c = &scan.crossings[0];
        if j == 1 {
            diag = diagnostics(rp, h1, scan.p0, c, false)?;
        }
        let lv = level(rp, j, h, h1, c, scan.evals);
        iterations.push(lv.record);
        if lv.record.accepted {
            return Ok(SolveReport {
                y_b: lv.bracket.pick(opts.variant),
                variant: opts.variant,
                bracket: lv.bracket,
                j_used: j,
                j_n: diag.0,
                j_s: diag.1,
                evals,
                float_residual: scan.residual,
                h1,
                iterations,
            });
        }
    }
    unreachable!("refinement index overflow")
}

/// Two-pass solve: one scan at `h1`, and if its one-node back-off fails the
/// trapezoidal test, a single scan at `h1/j_s`.
///
/// Same guarantee as [`algorithm1`] with at most two scans.
pub fn algorithm2(rp: &ReducedProblem, opts: &SolverOptions) -> Result<SolveReport> {
    opts.validate()?;
    let p = rp.p_fn();
    let h1 = opts.h1();
    let b = rp.b();

    let first = scan_targets(p, rp.y0(), h1, &[b], 1, true, opts.node_cap)?;
    let c = &first.crossings[0];
    let (j_n, j_s) = diagnostics(rp, h1, first.p0, c, false)?;
    let lv = level(rp, 1, h1, h1, c, first.evals);
    let mut iterations = vec![lv.record];
    if lv.record.accepted {
        return Ok(SolveReport {
            y_b: lv.bracket.pick(opts.variant),
            variant: opts.variant,
            bracket: lv.bracket,
            j_used: 1,
            j_n,
            j_s,
            evals: first.evals,
            float_residual: first.residual,
            h1,
            iterations,
        });
    }

    let j = if opts.simplified_js {
        diagnostics(rp, h1, first.p0, c, true)?.1
    } else {
        j_s
    }
    .max(2);
    let h = h1 / j as f64;
    let second = scan_targets(p, rp.y0(), h, &[b], j, true, opts.node_cap)?;
    let lv = level(rp, j, h, h1, &second.crossings[0], second.evals);
    iterations.push(lv.record);
    Ok(SolveReport {
        y_b: lv.bracket.pick(opts.variant),
        variant: opts.variant,
        bracket: lv.bracket,
        j_used: j,
        j_n,
        j_s,
        evals: first.evals + second.evals,
        float_residual: second.residual,
        h1,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(b: f64) -> ReducedProblem {
        ReducedProblem::new(|y| 1.0 / (1.0 + y), 0.0, b).unwrap()
    }

    fn riccati(b: f64) -> ReducedProblem {
        ReducedProblem::new(|y| 1.0 / (y * y), 0.5, b).unwrap()
    }

    fn table_opts() -> SolverOptions {
        SolverOptions::new(1e-4).h1_factor(2.0).variant(Variant::Midpoint)
    }

    #[test]
    fn algorithm1_linear_at_0_6() {
        let r = algorithm1(&linear(0.05 * 12.0), &table_opts()).unwrap();
        assert_eq!(r.j_used, 2);
        assert_eq!(format!("{:.4}", r.y_b), "0.8221");
        assert!((r.y_b - (0.6f64.exp() - 1.0)).abs() < 1e-4);
        assert_eq!(r.iterations.len(), 2);
        assert!(!r.iterations[0].accepted && r.iterations[1].accepted);
    }

    #[test]
    fn algorithm1_riccati_at_1_6() {
        let r = algorithm1(&riccati(0.05 * 32.0), &table_opts()).unwrap();
        assert_eq!(r.j_used, 14);
        assert_eq!(r.j_s, 14);
        assert_eq!(format!("{:.4}", r.y_b), "2.5001");
        assert!(r.j_n <= r.j_used && r.j_used <= r.j_s);
    }

    #[test]
    fn constant_integrand_stops_immediately() {
        let rp = ReducedProblem::new(|_| 1.0, 0.0, 1.0).unwrap();
        let opts = SolverOptions::new(0.1).variant(Variant::Left);
        let r = algorithm1(&rp, &opts).unwrap();
        assert_eq!(r.j_used, 1);
        assert!((r.y_b - 1.0).abs() < 0.1);
        let r2 = algorithm2(&rp, &opts).unwrap();
        assert_eq!(r2.j_used, 1);
        assert_eq!(r2.iterations.len(), 1);
    }

    #[test]
    fn algorithm2_divides_step_by_js() {
        let r = algorithm2(&linear(1.0), &table_opts()).unwrap();
        assert_eq!(r.j_used, 2);
        let r = algorithm2(&riccati(0.05 * 32.0), &table_opts()).unwrap();
        assert_eq!(r.j_used, 14);
        assert_eq!(format!("{:.4}", r.y_b), "2.5001");
        assert!(((2.5 - r.y_b).abs() * 1e4 - 0.857).abs() < 0.001);
    }

    #[test]
    fn simplified_criterion_refines_at_least_as_much() {
        let plain = algorithm2(&riccati(1.5), &table_opts()).unwrap();
        let simple = algorithm2(&riccati(1.5), &table_opts().simplified_js(true)).unwrap();
        assert!(simple.j_used >= plain.j_used);
        assert!((simple.y_b - 2.0).abs() < 1e-4);
    }

    #[test]
    fn variants_pick_bracket_points() {
        let rp = linear(0.7);
        for v in [Variant::Left, Variant::Right, Variant::Midpoint] {
            let r = algorithm1(&rp, &table_opts().variant(v)).unwrap();
            let br = r.bracket;
            let expected = match v {
                Variant::Left => br.y_lo,
                Variant::Right => br.y_hi,
                Variant::Midpoint => (br.y_lo + br.y_hi) / 2.0,
            };
            assert_eq!(r.y_b, expected);
        }
    }

    #[test]
    fn tiny_target_takes_degenerate_bracket() {
        // b far below one step: the crossing is at node 1, backing off j
        // nodes would pass the origin.
        let rp = linear(1e-9);
        let r = algorithm1(&rp, &SolverOptions::new(1e-3)).unwrap();
        assert_eq!(r.bracket.n1, 0);
        assert_eq!(r.bracket.n2, 1);
        assert!(r.y_b - 1e-9 < 1e-3);
    }

    #[test]
    fn options_are_validated() {
        assert!(algorithm1(&linear(1.0), &SolverOptions::new(0.0)).is_err());
        assert!(algorithm2(&linear(1.0), &SolverOptions::new(1e-3).h1_factor(-1.0)).is_err());
    }

    #[test]
    fn cap_exceeded_propagates() {
        let rp = riccati(1.9);
        let err = algorithm1(&rp, &table_opts().node_cap(1000)).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: 1000, .. }));
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("midpoint".parse::<Variant>().unwrap(), Variant::Midpoint);
        assert_eq!("left".parse::<Variant>().unwrap(), Variant::Left);
        assert!("centre".parse::<Variant>().is_err());
        assert_eq!(Variant::Right.to_string(), "right");
    }
}
