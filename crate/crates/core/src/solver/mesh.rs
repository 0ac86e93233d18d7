use serde::{Deserialize, Serialize};

use super::scan::scan_targets;
use super::{diagnostics, level, Bracket, SolverOptions};
use crate::error::{Error, Result};
use crate::problem::ReducedProblem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshNode {
    /// Reduced abscissa.
    pub x: f64,
    pub y: f64,
    pub bracket: Bracket,
    /// Trapezoidal test at `n2 - j` held for this node.
    pub accepted: bool,
    /// Necessary and sufficient indices for this node alone, from the
    /// first scan.
    pub j_n: u64,
    pub j_s: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshReport {
    pub nodes: Vec<MeshNode>,
    /// Single refinement index shared by the whole mesh.
    pub j_used: u64,
    /// Sufficient index at the last mesh point.
    pub j_s: u64,
    pub evals: u64,
    pub float_residual: f64,
}

/// Solves at every mesh abscissa with one refinement index chosen for the
/// last one.
///
/// The first scan at `h1` resolves all nodes; if the one-node back-off
/// passes everywhere the mesh is done at `j = 1`. Otherwise `j = j_s(b)` and
/// a single scan at `h1/j` reads off each node's crossing. Since `j_s` is
/// monotone along the mesh, each node inherits the endpoint guarantee.
///
/// `mesh` holds reduced abscissas: strictly increasing, positive, ending
/// exactly at `rp.b()`.
pub fn mesh_solve(rp: &ReducedProblem, mesh: &[f64], opts: &SolverOptions) -> Result<MeshReport> {
    opts.validate()?;
    if mesh.is_empty() {
        return Err(Error::InvalidArgument("mesh is empty".into()));
    }
    if mesh.windows(2).any(|w| w[1] <= w[0]) || mesh[0] <= 0.0 {
        return Err(Error::InvalidArgument("mesh must be positive and strictly increasing".into()));
    }
    let last = mesh[mesh.len() - 1];
    if last != rp.b() {
        return Err(Error::InvalidArgument(format!(
            "mesh ends at {last} but the problem target is {}",
            rp.b()
        )));
    }

    let p = rp.p_fn();
    let h1 = opts.h1();
    let first = scan_targets(p, rp.y0(), h1, mesh, 1, true, opts.node_cap)?;
    let diag = first
        .crossings
        .iter()
        .map(|c| diagnostics(rp, h1, first.p0, c, false))
        .collect::<Result<Vec<_>>>()?;
    let j_s = diag[diag.len() - 1].1;

    let coarse: Vec<_> = first
        .crossings
        .iter()
        .map(|c| level(rp, 1, h1, h1, c, first.evals))
        .collect();
    if coarse.iter().all(|lv| lv.record.accepted) {
        return Ok(MeshReport {
            nodes: coarse
                .iter()
                .zip(&diag)
                .map(|(lv, &(j_n, j_s))| MeshNode {
                    x: lv.bracket.target,
                    y: lv.bracket.pick(opts.variant),
                    bracket: lv.bracket,
                    accepted: true,
                    j_n,
                    j_s,
                })
                .collect(),
            j_used: 1,
            j_s,
            evals: first.evals,
            float_residual: first.residual,
        });
    }

    let j = if opts.simplified_js {
        let c = &first.crossings[first.crossings.len() - 1];
        diagnostics(rp, h1, first.p0, c, true)?.1
    } else {
        j_s
    }
    .max(2);
    let h = h1 / j as f64;
    let second = scan_targets(p, rp.y0(), h, mesh, j, false, opts.node_cap)?;
    let nodes = second
        .crossings
        .iter()
        .zip(&diag)
        .map(|(c, &(j_n, j_s))| {
            let lv = level(rp, j, h, h1, c, second.evals);
            MeshNode {
                x: c.target,
                y: lv.bracket.pick(opts.variant),
                bracket: lv.bracket,
                accepted: lv.record.accepted,
                j_n,
                j_s,
            }
        })
        .collect();

    Ok(MeshReport {
        nodes,
        j_used: j,
        j_s,
        evals: first.evals + second.evals,
        float_residual: second.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{algorithm2, Variant};

    fn riccati(b: f64) -> ReducedProblem {
        ReducedProblem::new(|y| 1.0 / (y * y), 0.5, b).unwrap()
    }

    fn mesh(step: f64, count: usize) -> Vec<f64> {
        (1..=count).map(|k| step * k as f64).collect()
    }

    #[test]
    fn table4_sample_rows() {
        let xs = mesh(0.05, 32);
        let opts = SolverOptions::new(1e-4).h1_factor(2.0).variant(Variant::Midpoint);
        let r = mesh_solve(&riccati(xs[31]), &xs, &opts).unwrap();
        assert_eq!(r.j_used, 14);
        assert_eq!(r.nodes.len(), 32);
        let row = |x: f64| r.nodes.iter().find(|n| (n.x - x).abs() < 1e-12).unwrap();
        assert_eq!(format!("{:.4}", row(0.5).y), "0.6666");
        assert!(((2.0 / 3.0 - row(0.5).y).abs() * 1e4 - 0.810).abs() < 0.02);
        assert_eq!(format!("{:.4}", row(xs[28]).y), "1.8182");
        assert!(r.nodes.iter().all(|n| n.accepted));
    }

    #[test]
    fn single_node_mesh_matches_algorithm2() {
        let rp = riccati(1.2);
        let opts = SolverOptions::new(1e-4).h1_factor(2.0);
        let m = mesh_solve(&rp, &[1.2], &opts).unwrap();
        let a = algorithm2(&rp, &opts).unwrap();
        assert_eq!(m.nodes[0].y, a.y_b);
        assert_eq!(m.j_used, a.j_used);
        assert_eq!(m.evals, a.evals);
    }

    #[test]
    fn evaluations_stay_within_two_scans() {
        let xs = mesh(0.05, 32);
        let opts = SolverOptions::new(1e-4).h1_factor(2.0);
        let m = mesh_solve(&riccati(xs[31]), &xs, &opts).unwrap();
        let a = algorithm2(&riccati(xs[31]), &opts).unwrap();
        assert_eq!(m.evals, a.evals);
    }

    #[test]
    fn rejects_malformed_mesh() {
        let opts = SolverOptions::new(1e-3);
        let rp = riccati(1.0);
        assert!(mesh_solve(&rp, &[], &opts).is_err());
        assert!(mesh_solve(&rp, &[0.5, 0.4, 1.0], &opts).is_err());
        assert!(mesh_solve(&rp, &[0.5, 0.9], &opts).is_err());
        assert!(mesh_solve(&rp, &[0.0, 1.0], &opts).is_err());
    }
}
