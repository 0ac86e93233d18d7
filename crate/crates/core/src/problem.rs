//! Separable initial value problems `y' = f(y)·g(x)`, `y(0) = y0`, and their
//! reduction to the autonomous integral equation `∫_{y0}^{y(b)} p(y) dy = b'`.
//!
//! The method requires four integrating conditions:
//!
//! * (A) `τ(z) = ∫_0^z g` is available exactly,
//! * (B) `g(z) > 0` for `z > 0`,
//! * (C) `f(y0) > 0` and `f` increasing on `[y0, ∞)`,
//! * (D) `p = 1/f` convex on `[y0, ∞)`.
//!
//! [`validate_conditions`] screens them by sampling. Sampling is a heuristic:
//! a pass means no violation was seen at the sampled points, not that the
//! conditions hold. It assumes the second difference of `p` is continuous.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Shared real-valued callback.
///
/// Callbacks must be pure: the same input always yields the same output.
/// The enclosure relies on re-evaluation being consistent.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Default number of sample points used by the condition screen.
pub const DEFAULT_SAMPLES: usize = 1001;

const CONSISTENCY_RTOL: f64 = 1e-12;
const ANTIDERIVATIVE_RTOL: f64 = 1e-6;

#[derive(Clone)]
pub struct SeparableProblem {
    f: RealFn,
    p: RealFn,
    g: Option<RealFn>,
    tau: Option<RealFn>,
    y0: f64,
    b: f64,
    extension_limit: Option<f64>,
}

impl fmt::Debug for SeparableProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparableProblem")
            .field("y0", &self.y0)
            .field("b", &self.b)
            .field("has_g", &self.g.is_some())
            .field("extension_limit", &self.extension_limit)
            .finish_non_exhaustive()
    }
}

impl SeparableProblem {
    /// Problem with `g ≡ 1`, given both `f` and its reciprocal `p`.
    pub fn new<F, P>(f: F, p: P, y0: f64, b: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        P: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !y0.is_finite() {
            return Err(Error::InvalidArgument(format!("y0 must be finite, got {y0}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("b must be positive and finite, got {b}")));
        }
        Ok(Self {
            f: Arc::new(f),
            p: Arc::new(p),
            g: None,
            tau: None,
            y0,
            b,
            extension_limit: None,
        })
    }

    /// Problem with `g ≡ 1` and `p` taken as `1/f`.
    pub fn from_f<F>(f: F, y0: f64, b: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let f: RealFn = Arc::new(f);
        let recip = Arc::clone(&f);
        let mut prob = Self::new(|_| 0.0, move |y| 1.0 / recip(y), y0, b)?;
        prob.f = f;
        Ok(prob)
    }

    /// Attaches an `x`-dependent factor `g` with its exact antiderivative
    /// `τ(z) = ∫_0^z g(x) dx`.
    pub fn with_g<G, T>(mut self, g: G, tau: T) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        T: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.g = Some(Arc::new(g));
        self.tau = Some(Arc::new(tau));
        self
    }

    /// Value of `∫_{y0}^{∞} p`, when the user knows it to be finite.
    pub fn with_extension_limit(mut self, c: f64) -> Self {
        self.extension_limit = Some(c);
        self
    }

    pub fn with_target(&self, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("b must be positive and finite, got {b}")));
        }
        let mut out = self.clone();
        out.b = b;
        Ok(out)
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn extension_limit(&self) -> Option<f64> {
        self.extension_limit
    }

    pub fn has_g(&self) -> bool {
        self.g.is_some()
    }

    pub fn f(&self, y: f64) -> f64 {
        (self.f)(y)
    }

    pub fn p(&self, y: f64) -> f64 {
        (self.p)(y)
    }

    pub fn p_fn(&self) -> RealFn {
        Arc::clone(&self.p)
    }

    /// Maps an abscissa `x` to the reduced time `τ(x)` (identity when `g ≡ 1`).
    pub fn reduce_abscissa(&self, x: f64) -> f64 {
        match &self.tau {
            Some(tau) => tau(x),
            None => x,
        }
    }

    /// Reduces to the autonomous problem. See [`reduce`].
    pub fn reduce(&self) -> Result<ReducedProblem> {
        reduce(self)
    }
}

/// `∫_{y0}^{y(b)} p(y) dy = b` with `p` positive, decreasing and convex.
#[derive(Clone)]
pub struct ReducedProblem {
    p: RealFn,
    y0: f64,
    b_reduced: f64,
}

impl fmt::Debug for ReducedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReducedProblem")
            .field("y0", &self.y0)
            .field("b_reduced", &self.b_reduced)
            .finish_non_exhaustive()
    }
}

impl ReducedProblem {
    pub fn new<P>(p: P, y0: f64, b: f64) -> Result<Self>
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_shared(Arc::new(p), y0, b)
    }

    pub fn from_shared(p: RealFn, y0: f64, b: f64) -> Result<Self> {
        if !y0.is_finite() {
            return Err(Error::InvalidArgument(format!("y0 must be finite, got {y0}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("b must be positive and finite, got {b}")));
        }
        let p0 = p(y0);
        if !p0.is_finite() {
            return Err(Error::Evaluation { what: "p", at: y0, value: p0 });
        }
        if p0 <= 0.0 {
            return Err(Error::InvalidIntegrand { at: y0, value: p0 });
        }
        Ok(Self { p, y0, b_reduced: b })
    }

    /// Same integrand and origin, different right-hand side.
    pub fn with_target(&self, b: f64) -> Result<Self> {
        Self::from_shared(Arc::clone(&self.p), self.y0, b)
    }

    #[inline]
    pub fn p(&self, y: f64) -> f64 {
        (self.p)(y)
    }

    pub fn p_fn(&self) -> &(dyn Fn(f64) -> f64 + Send + Sync) {
        &*self.p
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn b(&self) -> f64 {
        self.b_reduced
    }
}

impl From<ReducedProblem> for SeparableProblem {
    fn from(rp: ReducedProblem) -> Self {
        let p = Arc::clone(&rp.p);
        Self {
            f: Arc::new(move |y| 1.0 / p(y)),
            p: rp.p,
            g: None,
            tau: None,
            y0: rp.y0,
            b: rp.b_reduced,
            extension_limit: None,
        }
    }
}

/// Eliminates `g` through `τ`: the reduced target is `τ(b)`, or `b` when
/// `g ≡ 1`. `p` and `y0` are carried through unchanged.
///
/// No condition screening happens here; call [`validate_conditions`] first
/// unless the caller already knows the conditions hold.
pub fn reduce(prob: &SeparableProblem) -> Result<ReducedProblem> {
    let b_reduced = prob.reduce_abscissa(prob.b);
    if !(b_reduced > 0.0 && b_reduced.is_finite()) {
        return Err(Error::InvalidReduction { tau_b: b_reduced });
    }
    if let Some(limit) = prob.extension_limit {
        if b_reduced >= limit {
            return Err(Error::Unsolvable { b: b_reduced, limit });
        }
    }
    ReducedProblem::from_shared(Arc::clone(&prob.p), prob.y0, b_reduced)
}

/// Result of one sampled condition check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionOutcome {
    Pass,
    /// First sample point where the condition was seen to fail.
    Fail { at: f64 },
}

impl ConditionOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, ConditionOutcome::Pass)
    }
}

/// Per-condition outcome of [`validate_conditions`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// `p(y)·f(y) = 1` at the sampled points.
    pub consistency: ConditionOutcome,
    /// (A): `τ(0) = 0` and `τ' ≈ g` by finite differences.
    pub antiderivative: ConditionOutcome,
    /// (B): `g > 0` on `(0, b]`.
    pub g_positive: ConditionOutcome,
    /// (C): `f(y0) > 0` and `f` increasing.
    pub f_increasing: ConditionOutcome,
    /// (D): convexity of `p` via second differences.
    pub p_convex: ConditionOutcome,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        [
            self.consistency,
            self.antiderivative,
            self.g_positive,
            self.f_increasing,
            self.p_convex,
        ]
        .iter()
        .all(ConditionOutcome::passed)
    }
}

fn finite(what: &'static str, at: f64, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Evaluation { what, at, value })
    }
}

fn first_failure<I: IntoIterator<Item = (f64, bool)>>(checks: I) -> ConditionOutcome {
    checks
        .into_iter()
        .find(|&(_, ok)| !ok)
        .map_or(ConditionOutcome::Pass, |(at, _)| ConditionOutcome::Fail { at })
}

/// Fourth-order central difference, shrunk so it never samples below zero.
fn derivative(tau: &dyn Fn(f64) -> f64, z: f64) -> f64 {
    let d = (1e-3 * z.max(1.0)).min(z / 2.0);
    let near = tau(z + d) - tau(z - d);
    let far = tau(z + 2.0 * d) - tau(z - 2.0 * d);
    (8.0 * near - far) / (12.0 * d)
}

/// Screens the integrating conditions at `samples` evenly spaced points of
/// `[y0, y_max]` (and of `(0, b]` for the `g` conditions).
pub fn validate_conditions(
    prob: &SeparableProblem,
    samples: usize,
    y_max: f64,
) -> Result<ConditionReport> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    if !(y_max > prob.y0 && y_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "y_max = {y_max} must exceed y0 = {}",
            prob.y0
        )));
    }

    let span = y_max - prob.y0;
    let ys: Vec<f64> = (0..samples)
        .map(|i| prob.y0 + span * i as f64 / (samples - 1) as f64)
        .collect();
    let mut fs = Vec::with_capacity(samples);
    let mut ps = Vec::with_capacity(samples);
    for &y in &ys {
        fs.push(finite("f", y, prob.f(y))?);
        ps.push(finite("p", y, prob.p(y))?);
    }

    let consistency = first_failure(
        ys.iter()
            .zip(fs.iter().zip(&ps))
            .map(|(&y, (&f, &p))| (y, (p * f - 1.0).abs() <= CONSISTENCY_RTOL)),
    );

    let f_increasing = if fs[0] > 0.0 {
        first_failure(ys.windows(2).zip(fs.windows(2)).map(|(y, f)| (y[1], f[1] > f[0])))
    } else {
        ConditionOutcome::Fail { at: prob.y0 }
    };

    let p_convex = first_failure(
        ys.windows(3)
            .zip(ps.windows(3))
            .map(|(y, p)| (y[1], p[0] - 2.0 * p[1] + p[2] > 0.0)),
    );

    let (antiderivative, g_positive) = match (&prob.g, &prob.tau) {
        (Some(g), Some(tau)) => {
            let zs: Vec<f64> = (1..=samples).map(|i| prob.b * i as f64 / samples as f64).collect();
            let mut gs = Vec::with_capacity(samples);
            let mut ds = Vec::with_capacity(samples);
            let t0 = finite("tau", 0.0, tau(0.0))?;
            let scale = finite("tau", prob.b, tau(prob.b))?.abs().max(1.0);
            for &z in &zs {
                gs.push(finite("g", z, g(z))?);
                let d = derivative(&**tau, z);
                ds.push(finite("tau", z, d)?);
            }
            let g_scale = gs.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            let anti = if t0.abs() > 1e-12 * scale {
                ConditionOutcome::Fail { at: 0.0 }
            } else {
                first_failure(zs.iter().zip(gs.iter().zip(&ds)).map(|(&z, (&g, &d))| {
                    let tol = ANTIDERIVATIVE_RTOL * g.abs().max(d.abs()).max(g_scale) + 1e-300;
                    (z, (d - g).abs() <= tol)
                }))
            };
            let pos = first_failure(zs.iter().zip(&gs).map(|(&z, &g)| (z, g > 0.0)));
            (anti, pos)
        }
        _ => (ConditionOutcome::Pass, ConditionOutcome::Pass),
    };

    Ok(ConditionReport { consistency, antiderivative, g_positive, f_increasing, p_convex })
}
