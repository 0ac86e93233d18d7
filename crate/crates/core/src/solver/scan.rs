use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::quadrature::{GridScanner, NodeState};

/// Where the lower sum first reaches one target during a multi-target scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Crossing {
    pub target: f64,
    pub n2: u64,
    /// Node `n2` (lower sum reaches the target here).
    pub at: NodeState,
    /// Node `n2 - 1`.
    pub before: NodeState,
    /// Node `n2 - backstep`, absent when `n2 < backstep`.
    pub back: Option<NodeState>,
    /// Largest `N` with trapezoidal sum `<= target`, with `p` at `N` and at
    /// `N - 1` (the latter absent for `N = 0`).
    pub n3: Option<TrapezoidCrossing>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TrapezoidCrossing {
    pub n3: u64,
    pub p_at: f64,
    pub p_before: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct MultiScan {
    pub h: f64,
    pub p0: f64,
    pub crossings: Vec<Crossing>,
    pub evals: u64,
    pub residual: f64,
}

/// One streaming pass over the grid that resolves every target at once.
///
/// Keeps a ring of the last `max(backstep, 2) + 1` node states, so memory is
/// independent of how far the scan runs. `targets` must be positive and
/// non-decreasing.
pub(crate) fn scan_targets<F>(
    p: &F,
    y0: f64,
    h: f64,
    targets: &[f64],
    backstep: u64,
    track_n3: bool,
    cap: u64,
) -> Result<MultiScan>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    if targets.is_empty() {
        return Err(Error::InvalidArgument("no targets to scan for".into()));
    }
    if targets.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidArgument("targets must be positive and finite".into()));
    }
    if targets.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("targets must be sorted".into()));
    }

    let mut scan = GridScanner::new(p, y0, h, cap)?;
    let keep = backstep.max(2) as usize + 1;
    let mut ring: VecDeque<NodeState> = VecDeque::with_capacity(keep + 1);
    ring.push_back(scan.origin());

    let n = targets.len();
    let mut crossings: Vec<Option<Crossing>> = vec![None; n];
    let mut n3s: Vec<Option<TrapezoidCrossing>> = vec![None; n];
    let mut k2 = 0;
    let mut k3 = if track_n3 { 0 } else { n };

    while k2 < n || k3 < n {
        let st = scan.advance(targets[k2.min(k3)])?;

        while k3 < n && st.trapezoidal > targets[k3] {
            let last = ring.len() - 1;
            let prev = ring[last];
            n3s[k3] = Some(TrapezoidCrossing {
                n3: prev.index,
                p_at: prev.p,
                p_before: (prev.index >= 1).then(|| ring[last - 1].p),
            });
            k3 += 1;
        }

        ring.push_back(st);
        if ring.len() > keep {
            ring.pop_front();
        }

        while k2 < n && st.lower >= targets[k2] {
            let last = ring.len() - 1;
            crossings[k2] = Some(Crossing {
                target: targets[k2],
                n2: st.index,
                at: st,
                before: ring[last - 1],
                back: (st.index >= backstep).then(|| ring[last - backstep as usize]),
                n3: None,
            });
            k2 += 1;
        }
    }

    let crossings = crossings
        .into_iter()
        .zip(n3s)
        .map(|(c, n3)| {
            let mut c = c.expect("every target resolved");
            c.n3 = n3;
            c
        })
        .collect();

    Ok(MultiScan {
        h,
        p0: scan.p_first(),
        crossings,
        evals: scan.evals(),
        residual: scan.residual_bound(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{find_n3, lower_sum, scan_to_target, trapezoidal_sum};

    fn recip(y: f64) -> f64 {
        1.0 / (1.0 + y)
    }

    #[test]
    fn agrees_with_single_target_scans() {
        let targets = [0.05, 0.3, 0.3, 0.9, 1.0];
        let h = 1e-3;
        let multi = scan_targets(&recip, 0.0, h, &targets, 3, true, 1_000_000).unwrap();
        for c in &multi.crossings {
            let single = scan_to_target(&recip, 0.0, h, c.target, 1_000_000).unwrap();
            assert_eq!(c.n2, single.n2);
            assert_eq!(c.at.lower, single.sum_at_n2);
            assert_eq!(c.before.lower, single.sum_before);
            let back = c.back.unwrap();
            assert_eq!(back.index, c.n2 - 3);
            assert_eq!(back.lower, lower_sum(&recip, 0.0, h, c.n2 - 3).unwrap());
            assert_eq!(back.trapezoidal, trapezoidal_sum(&recip, 0.0, h, c.n2 - 3).unwrap());
            let n3 = c.n3.unwrap();
            assert_eq!(n3.n3, find_n3(&recip, 0.0, h, c.target, 1_000_000).unwrap());
            assert_eq!(n3.p_at, recip(h * n3.n3 as f64));
            assert_eq!(n3.p_before, Some(recip(h * (n3.n3 - 1) as f64)));
        }
        assert_eq!(multi.evals, multi.crossings[4].n2 + 1);
    }

    #[test]
    fn backstep_past_origin_is_absent() {
        let multi = scan_targets(&recip, 0.0, 0.1, &[0.15], 5, false, 100).unwrap();
        assert_eq!(multi.crossings[0].n2, 2);
        assert!(multi.crossings[0].back.is_none());
        let multi = scan_targets(&recip, 0.0, 0.1, &[0.15], 2, false, 100).unwrap();
        assert_eq!(multi.crossings[0].back.unwrap().index, 0);
    }

    #[test]
    fn constant_integrand_tracks_n3_past_n2() {
        let multi = scan_targets(&|_| 1.0, 0.0, 0.25, &[1.0], 1, true, 100).unwrap();
        let c = multi.crossings[0];
        assert_eq!(c.n2, 4);
        assert_eq!(c.n3.unwrap().n3, 4);
        assert_eq!(multi.evals, 6);
    }

    #[test]
    fn rejects_unsorted_targets() {
        assert!(scan_targets(&recip, 0.0, 0.1, &[0.5, 0.2], 1, false, 100).is_err());
        assert!(scan_targets(&recip, 0.0, 0.1, &[], 1, false, 100).is_err());
    }
}
