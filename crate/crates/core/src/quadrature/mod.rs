//! Lower-rectangular and trapezoidal sums on the uniform grid `y0 + h*i`.
//!
//! For a positive, decreasing, convex integrand `p` the lower rectangular
//! sum under-estimates `∫ p` and the trapezoidal sum over-estimates it. The
//! two differ by the correction term `A = (h/2)(p(y0) - p(y0 + h*N))`, and
//! every trapezoidal value here is computed as `lower + correction` from the
//! same cached endpoint evaluations, so that identity holds to the last bit.
//!
//! All accumulation is compensated (see [`summation`]). Node positions are
//! always `y0 + h * i`, never built by repeated addition.

pub mod summation;

use crate::error::{Error, Result};
pub use summation::{compensated_error_bound, CompensatedSum, ExactSum};

/// Default cap on the number of grid nodes a single scan may visit.
pub const DEFAULT_NODE_CAP: u64 = 100_000_000;

/// Position of node `i` on the grid anchored at `y0` with step `h`.
#[inline]
pub fn node(y0: f64, h: f64, i: u64) -> f64 {
    y0 + h * i as f64
}

#[inline]
pub(crate) fn eval<F>(p: &F, y: f64) -> Result<f64>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let v = p(y);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { what: "p", at: y, value: v })
    }
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("step h must be positive and finite, got {h}")))
    }
}

fn check_target(target: f64) -> Result<()> {
    if target > 0.0 && target.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("target must be positive and finite, got {target}")))
    }
}

/// Accumulated grid sums after `n` subintervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSum {
    pub h: f64,
    pub n: u64,
    /// Lower rectangular sum `Σ_{i=1..n} h·p(y0 + h·i)`.
    pub lower: f64,
    /// Cached `p(y0)`.
    pub p_first: f64,
    /// Cached `p(y0 + h·n)`.
    pub p_last: f64,
    /// Number of `p` evaluations spent so far.
    pub evals: u64,
}

impl GridSum {
    /// The correction `A_{h,n}` between the two rules.
    #[inline]
    pub fn correction(&self) -> f64 {
        correction_from(self.h, self.p_first, self.p_last)
    }

    #[inline]
    pub fn trapezoidal(&self) -> f64 {
        self.lower + self.correction()
    }
}

#[inline]
pub(crate) fn correction_from(h: f64, p_first: f64, p_last: f64) -> f64 {
    0.5 * h * (p_first - p_last)
}

/// One visited grid node, as produced by [`GridScanner::advance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeState {
    pub index: u64,
    pub p: f64,
    /// Lower sum through this node.
    pub lower: f64,
    /// Trapezoidal sum through this node.
    pub trapezoidal: f64,
}

/// Streaming walk along the grid, one `p` evaluation per node.
///
/// Memory use does not depend on how far the scan runs.
pub struct GridScanner<'a, F: ?Sized> {
    p: &'a F,
    y0: f64,
    h: f64,
    p0: f64,
    sum: CompensatedSum,
    index: u64,
    last_p: f64,
    evals: u64,
    cap: u64,
}

impl<'a, F> GridScanner<'a, F>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    pub fn new(p: &'a F, y0: f64, h: f64, cap: u64) -> Result<Self> {
        check_step(h)?;
        let p0 = eval(p, y0)?;
        Ok(Self {
            p,
            y0,
            h,
            p0,
            sum: CompensatedSum::new(),
            index: 0,
            last_p: p0,
            evals: 1,
            cap,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn p_first(&self) -> f64 {
        self.p0
    }

    pub fn evals(&self) -> u64 {
        self.evals
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// State at the origin (no subintervals yet).
    pub fn origin(&self) -> NodeState {
        NodeState { index: 0, p: self.p0, lower: 0.0, trapezoidal: 0.0 }
    }

    /// Rounding bound for the lower sum accumulated so far.
    pub fn residual_bound(&self) -> f64 {
        compensated_error_bound(self.sum.value(), self.sum.terms())
    }

    pub fn snapshot(&self) -> GridSum {
        GridSum {
            h: self.h,
            n: self.index,
            lower: self.sum.value(),
            p_first: self.p0,
            p_last: self.last_p,
            evals: self.evals,
        }
    }

    /// Evaluates the next node. `target` only labels the cap error.
    pub fn advance(&mut self, target: f64) -> Result<NodeState> {
        if self.index >= self.cap {
            return Err(Error::CapExceeded { cap: self.cap, target });
        }
        self.index += 1;
        let v = eval(self.p, node(self.y0, self.h, self.index))?;
        self.evals += 1;
        self.last_p = v;
        self.sum.add(self.h * v);
        let lower = self.sum.value();
        Ok(NodeState {
            index: self.index,
            p: v,
            lower,
            trapezoidal: lower + correction_from(self.h, self.p0, v),
        })
    }
}

/// Accumulates `n` subintervals and returns the full [`GridSum`].
pub fn grid_sum<F>(p: &F, y0: f64, h: f64, n: u64) -> Result<GridSum>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let mut scan = GridScanner::new(p, y0, h, u64::MAX)?;
    for _ in 0..n {
        scan.advance(f64::NAN)?;
    }
    Ok(scan.snapshot())
}

/// Lower rectangular sum `Σ_{i=1..n} h·p(y0 + h·i)`.
pub fn lower_sum<F>(p: &F, y0: f64, h: f64, n: u64) -> Result<f64>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    grid_sum(p, y0, h, n).map(|g| g.lower)
}

/// Correction term `(h/2)(p(y0) - p(y0 + h·n))`.
pub fn correction<F>(p: &F, y0: f64, h: f64, n: u64) -> Result<f64>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    check_step(h)?;
    let first = eval(p, y0)?;
    let last = if n == 0 { first } else { eval(p, node(y0, h, n))? };
    Ok(correction_from(h, first, last))
}

/// Trapezoidal sum, computed as lower sum plus correction.
pub fn trapezoidal_sum<F>(p: &F, y0: f64, h: f64, n: u64) -> Result<f64>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    grid_sum(p, y0, h, n).map(|g| g.trapezoidal())
}

/// Outcome of [`scan_to_target`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanResult {
    /// Smallest node count whose lower sum reaches the target.
    pub n2: u64,
    pub sum_at_n2: f64,
    pub sum_before: f64,
    pub grid: GridSum,
}

/// Streams the lower sum until it first reaches `target` (ties count as
/// reached) and returns the minimal node count together with the partial
/// sums on either side of the crossing.
pub fn scan_to_target<F>(p: &F, y0: f64, h: f64, target: f64, node_cap: u64) -> Result<ScanResult>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    check_target(target)?;
    let mut scan = GridScanner::new(p, y0, h, node_cap)?;
    let mut before = 0.0;
    loop {
        let st = scan.advance(target)?;
        if st.lower >= target {
            return Ok(ScanResult {
                n2: st.index,
                sum_at_n2: st.lower,
                sum_before: before,
                grid: scan.snapshot(),
            });
        }
        before = st.lower;
    }
}

/// Largest `N` whose trapezoidal sum stays at or below `target`.
///
/// Streams until the trapezoidal value first exceeds the target and steps
/// back one node; returns 0 when even one subinterval overshoots.
pub fn find_n3<F>(p: &F, y0: f64, h: f64, target: f64, node_cap: u64) -> Result<u64>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    check_target(target)?;
    let mut scan = GridScanner::new(p, y0, h, node_cap)?;
    loop {
        let st = scan.advance(target)?;
        if st.trapezoidal > target {
            return Ok(st.index - 1);
        }
    }
}
