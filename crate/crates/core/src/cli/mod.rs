//! Experiment runner behind the `solve` binary.

mod config;

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    preset, resolve, Algorithm, CliArgs, ConfigError, ExperimentConfig, MeshSpec, OutputFormat, Overrides,
    PRESETS,
};

use crate::error::Result;
use crate::oracle::{classical_step_solver, linear_reference, riccati_reference, ReferenceSolution};
use crate::problem::ReducedProblem;
use crate::solver::{
    algorithm1, algorithm2, bisection_cost_model, certify, mesh_solve, Bracket, SolverOptions,
};

/// One mesh node of a finished experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub x: f64,
    pub y: f64,
    /// `|y(x) - y|·10⁴` against the closed form.
    pub err_e4: Option<f64>,
    /// Refinement index that produced the answer.
    pub j_used: u64,
    pub j_n: u64,
    pub j_s: u64,
    /// `p` evaluations spent on this row. Mesh runs share one count.
    pub evals: u64,
    pub certified: bool,
    pub y_lo: f64,
    pub y_hi: f64,
    /// Cost of two bisection schedules relative to jumping straight to `j_s`.
    pub bisection_ratio_1: f64,
    pub bisection_ratio_2: f64,
    pub rk4_err_e4: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn all_certified(&self) -> bool {
        self.rows.iter().all(|r| r.certified && r.error.is_none())
    }
}

fn reference(cfg: &ExperimentConfig, b: f64) -> Result<(ReducedProblem, ReferenceSolution)> {
    let (prob, sol) = match cfg.problem.as_str() {
        "riccati" => riccati_reference(cfg.y0.unwrap_or(0.5), b)?,
        _ => linear_reference(cfg.y0.unwrap_or(0.0), b)?,
    };
    Ok((prob.reduce()?, sol))
}

struct Solved {
    x: f64,
    y: f64,
    bracket: Bracket,
    j_used: u64,
    j_n: u64,
    j_s: u64,
    evals: u64,
}

fn finish(cfg: &ExperimentConfig, rp: &ReducedProblem, sol: &ReferenceSolution, s: Solved) -> Row {
    let rp_x = rp.with_target(s.x);
    let certified = rp_x.as_ref().map(|rp| certify(rp, &s.bracket).passed).unwrap_or(false);
    let cost = bisection_cost_model(s.j_n, s.j_s, s.x, cfg.eps);
    let exact = sol.y(s.x);
    let rk4_err_e4 = cfg.contrast_steps.and_then(|n| {
        let rp = rp_x.as_ref().ok()?;
        classical_step_solver(rp, s.x, n).ok().map(|y| (exact - y).abs() * 1e4)
    });
    Row {
        x: s.x,
        y: s.y,
        err_e4: Some((exact - s.y).abs() * 1e4),
        j_used: s.j_used,
        j_n: s.j_n,
        j_s: s.j_s,
        evals: s.evals,
        certified,
        y_lo: s.bracket.y_lo,
        y_hi: s.bracket.y_hi,
        bisection_ratio_1: cost.ratio_1,
        bisection_ratio_2: cost.ratio_2,
        rk4_err_e4,
        error: None,
    }
}

fn failed_row(x: f64, message: String) -> Row {
    Row {
        x,
        y: f64::NAN,
        err_e4: None,
        j_used: 0,
        j_n: 0,
        j_s: 0,
        evals: 0,
        certified: false,
        y_lo: f64::NAN,
        y_hi: f64::NAN,
        bisection_ratio_1: f64::NAN,
        bisection_ratio_2: f64::NAN,
        rk4_err_e4: None,
        error: Some(message),
    }
}

/// Runs every mesh node. Per-node algorithms run in parallel; rows always
/// come back in mesh order. A failing node yields an error row and the run
/// carries on.
pub fn run_experiment(cfg: &ExperimentConfig) -> std::result::Result<Report, ConfigError> {
    cfg.validate()?;
    let xs = cfg.mesh.points();
    let b = xs[xs.len() - 1];
    let (rp, sol) = reference(cfg, b).map_err(|e| ConfigError::Field {
        field: "problem".into(),
        message: e.to_string(),
    })?;
    let opts = SolverOptions::new(cfg.eps).h1_factor(cfg.h1_factor).variant(cfg.variant);

    let rows = match cfg.algorithm {
        Algorithm::One | Algorithm::Two => xs
            .par_iter()
            .map(|&x| {
                let solved = rp.with_target(x).and_then(|rp_x| {
                    if cfg.algorithm == Algorithm::One {
                        algorithm1(&rp_x, &opts)
                    } else {
                        algorithm2(&rp_x, &opts)
                    }
                });
                match solved {
                    Ok(r) => finish(cfg, &rp, &sol, Solved {
                        x,
                        y: r.y_b,
                        bracket: r.bracket,
                        j_used: r.j_used,
                        j_n: r.j_n,
                        j_s: r.j_s,
                        evals: r.evals,
                    }),
                    Err(e) => failed_row(x, e.to_string()),
                }
            })
            .collect(),
        Algorithm::Mesh => match mesh_solve(&rp, &xs, &opts) {
            Ok(m) => m
                .nodes
                .iter()
                .map(|n| {
                    finish(cfg, &rp, &sol, Solved {
                        x: n.x,
                        y: n.y,
                        bracket: n.bracket,
                        j_used: m.j_used,
                        j_n: n.j_n,
                        j_s: n.j_s,
                        evals: m.evals,
                    })
                })
                .collect(),
            Err(e) => xs.iter().map(|&x| failed_row(x, e.to_string())).collect(),
        },
    };
    Ok(Report { config: cfg.clone(), rows })
}

fn opt(v: Option<f64>, f: impl Fn(f64) -> String) -> String {
    v.map(f).unwrap_or_default()
}

fn write_table(report: &Report, out: &mut dyn Write) -> io::Result<()> {
    let contrast = report.config.contrast_steps.is_some();
    write!(out, "{:>6}  {:>9}  {:>8}  {:>3}  {:>3}  {:>3}  {:>10}  {:>9}", "x", "y", "err·1e4", "j", "j_n", "j_s", "evals", "certified")?;
    if contrast {
        write!(out, "  {:>12}", "rk4 err·1e4")?;
    }
    writeln!(out)?;
    for r in &report.rows {
        if let Some(e) = &r.error {
            writeln!(out, "{:>6.2}  error: {e}", r.x)?;
            continue;
        }
        write!(
            out,
            "{:>6.2}  {:>9.4}  {:>8}  {:>3}  {:>3}  {:>3}  {:>10}  {:>9}",
            r.x,
            r.y,
            opt(r.err_e4, |e| format!("{e:.3}")),
            r.j_used,
            r.j_n,
            r.j_s,
            r.evals,
            if r.certified { "yes" } else { "NO" }
        )?;
        if contrast {
            write!(out, "  {:>12}", opt(r.rk4_err_e4, |e| format!("{e:.3e}")))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

const CSV_HEADER: &str = "x,y,y_display,err_e4,j_used,j_n,j_s,evals,certified,y_lo,y_hi,bisection_ratio_1,bisection_ratio_2,rk4_err_e4,error";

fn write_csv(report: &Report, out: &mut dyn Write) -> io::Result<()> {
    out.write_all(CSV_HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for r in &report.rows {
        // Rust's shortest round-trip formatting keeps full precision.
        let error = r.error.as_deref().map(|e| format!("\"{}\"", e.replace('"', "\"\""))).unwrap_or_default();
        let line = format!(
            "{},{},{:.4},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.x,
            r.y,
            r.y,
            opt(r.err_e4, |e| e.to_string()),
            r.j_used,
            r.j_n,
            r.j_s,
            r.evals,
            r.certified,
            r.y_lo,
            r.y_hi,
            r.bisection_ratio_1,
            r.bisection_ratio_2,
            opt(r.rk4_err_e4, |e| e.to_string()),
            error
        );
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

fn write_jsonl(report: &Report, out: &mut dyn Write) -> io::Result<()> {
    for r in &report.rows {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Renders `report` in `format` to `out`.
pub fn emit_to(report: &Report, format: OutputFormat, out: &mut dyn Write) -> io::Result<()> {
    match format {
        OutputFormat::Table => write_table(report, out),
        OutputFormat::Csv => write_csv(report, out),
        OutputFormat::Jsonl => write_jsonl(report, out),
    }?;
    out.flush()
}

/// Renders `report` to the configured path, or standard output.
pub fn emit(report: &Report, format: OutputFormat, path: Option<&std::path::Path>) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut f = io::BufWriter::new(std::fs::File::create(p)?);
            emit_to(report, format, &mut f)
        }
        None => emit_to(report, format, &mut io::stdout().lock()),
    }
}

/// Exit code: 0 when every row is certified, 1 otherwise, 2 on a bad
/// configuration or unwritable output.
pub fn run(args: CliArgs) -> i32 {
    let cfg = match args.into_config() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return 2;
        }
    };
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return 2;
        }
    };
    if let Err(e) = emit(&report, cfg.output, cfg.out_path.as_deref()) {
        eprintln!("cannot write output: {e}");
        return 2;
    }
    for r in &report.rows {
        if let Some(e) = &r.error {
            eprintln!("x = {}: {e}", r.x);
        } else if !r.certified {
            eprintln!("x = {}: certificate failed", r.x);
        }
    }
    if report.all_certified() {
        0
    } else {
        1
    }
}
