use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::oracle::BUILTIN_NAMES;
use crate::solver::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Iterative refinement, run separately at each mesh node.
    One,
    /// Two-pass solve, run separately at each mesh node.
    Two,
    /// Two-pass solve of the whole mesh at once.
    Mesh,
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "one" | "1" => Ok(Self::One),
            "two" | "2" => Ok(Self::Two),
            "mesh" => Ok(Self::Mesh),
            _ => Err(format!("unknown algorithm '{s}' (one, two, mesh)")),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::One => "one",
            Self::Two => "two",
            Self::Mesh => "mesh",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Csv,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "jsonl" => Ok(Self::Jsonl),
            _ => Err(format!("unknown output format '{s}' (table, csv, jsonl)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MeshSpec {
    /// `x_k = step·k` for `k = 1..=count`.
    Uniform { step: f64, count: usize },
    Explicit(Vec<f64>),
}

impl MeshSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            MeshSpec::Uniform { step, count } => (1..=*count).map(|k| step * k as f64).collect(),
            MeshSpec::Explicit(xs) => xs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Built-in problem name.
    pub problem: String,
    /// Initial value; `None` keeps the built-in default.
    pub y0: Option<f64>,
    pub mesh: MeshSpec,
    pub eps: f64,
    pub h1_factor: f64,
    pub algorithm: Algorithm,
    pub variant: Variant,
    pub output: OutputFormat,
    pub out_path: Option<PathBuf>,
    /// Step count for the fourth-order Runge–Kutta comparison column.
    pub contrast_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("field '{field}': {message}")]
    Field { field: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn field(name: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field: name.into(), message: message.into() }
}

pub const PRESETS: [&str; 4] = ["table1", "table2", "table3", "table4"];

/// Reference experiment set-ups, one per preset name.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let (problem, count, algorithm) = match name {
        "table1" => ("linear", 20, Algorithm::One),
        "table2" => ("riccati", 32, Algorithm::One),
        "table3" => ("linear", 20, Algorithm::Mesh),
        "table4" => ("riccati", 32, Algorithm::Mesh),
        _ => return None,
    };
    Some(ExperimentConfig {
        problem: problem.into(),
        y0: None,
        mesh: MeshSpec::Uniform { step: 0.05, count },
        eps: 1e-4,
        h1_factor: 2.0,
        algorithm,
        variant: Variant::Midpoint,
        output: OutputFormat::Table,
        out_path: None,
        contrast_steps: None,
    })
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        preset("table1").expect("table1 preset exists")
    }
}

/// Partial settings from one source (file or flags); later sources win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<String>,
    pub problem: Option<String>,
    pub y0: Option<f64>,
    pub eps: Option<f64>,
    pub h1_factor: Option<f64>,
    pub algorithm: Option<Algorithm>,
    pub variant: Option<Variant>,
    pub mesh_step: Option<f64>,
    pub mesh_count: Option<usize>,
    pub mesh: Option<Vec<f64>>,
    pub output: Option<OutputFormat>,
    pub out_path: Option<PathBuf>,
    pub contrast_steps: Option<usize>,
}

impl Overrides {
    fn merge(&mut self, other: Overrides) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(preset, problem, y0, eps, h1_factor, algorithm, variant, mesh_step, mesh_count, output, out_path, contrast_steps);
        if other.mesh.is_some() {
            self.mesh = other.mesh;
            self.mesh_step = None;
            self.mesh_count = None;
        } else if other.mesh_step.is_some() || other.mesh_count.is_some() {
            self.mesh = None;
        }
    }

    /// Parses a flat `key = value` file. `#` starts a comment.
    pub fn parse_str(text: &str, file: &str) -> Result<Self, ConfigError> {
        let mut out = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Parse { file: file.into(), line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', found '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            out.set(key, value).map_err(err)?;
        }
        Ok(out)
    }

    pub fn parse_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse_str(&text, &path.display().to_string())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("'{key}': cannot parse '{v}'"))
        }
        match key.replace('-', "_").as_str() {
            "preset" => self.preset = Some(value.into()),
            "problem" => self.problem = Some(value.into()),
            "y0" => self.y0 = Some(num(key, value)?),
            "eps" => self.eps = Some(num(key, value)?),
            "h1_factor" => self.h1_factor = Some(num(key, value)?),
            "algorithm" => self.algorithm = Some(value.parse()?),
            "variant" => self.variant = Some(value.parse().map_err(|e| format!("'{key}': {e}"))?),
            "mesh_step" => self.mesh_step = Some(num(key, value)?),
            "mesh_count" => self.mesh_count = Some(num(key, value)?),
            "mesh" => {
                let xs = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| num(key, s))
                    .collect::<Result<Vec<f64>, _>>()?;
                self.mesh = Some(xs);
            }
            "output" => self.output = Some(value.parse()?),
            "out_path" => self.out_path = Some(PathBuf::from(value)),
            "contrast_steps" => self.contrast_steps = Some(num(key, value)?),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }
}

/// Combines sources in order (preset, then each override set) and validates.
pub fn resolve(sources: Vec<Overrides>) -> Result<ExperimentConfig, ConfigError> {
    let mut all = Overrides::default();
    for s in sources {
        all.merge(s);
    }
    let mut cfg = match &all.preset {
        Some(name) => preset(name).ok_or_else(|| {
            field("preset", format!("unknown preset '{name}' (expected one of {})", PRESETS.join(", ")))
        })?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = all.problem {
        cfg.problem = v;
    }
    if all.y0.is_some() {
        cfg.y0 = all.y0;
    }
    if let Some(v) = all.eps {
        cfg.eps = v;
    }
    if let Some(v) = all.h1_factor {
        cfg.h1_factor = v;
    }
    if let Some(v) = all.algorithm {
        cfg.algorithm = v;
    }
    if let Some(v) = all.variant {
        cfg.variant = v;
    }
    if let Some(xs) = all.mesh {
        cfg.mesh = MeshSpec::Explicit(xs);
    } else if all.mesh_step.is_some() || all.mesh_count.is_some() {
        let (step0, count0) = match cfg.mesh {
            MeshSpec::Uniform { step, count } => (step, count),
            MeshSpec::Explicit(_) => (0.05, 20),
        };
        cfg.mesh = MeshSpec::Uniform {
            step: all.mesh_step.unwrap_or(step0),
            count: all.mesh_count.unwrap_or(count0),
        };
    }
    if let Some(v) = all.output {
        cfg.output = v;
    }
    if all.out_path.is_some() {
        cfg.out_path = all.out_path;
    }
    if all.contrast_steps.is_some() {
        cfg.contrast_steps = all.contrast_steps;
    }
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !BUILTIN_NAMES.contains(&self.problem.as_str()) {
            return Err(field(
                "problem",
                format!("unknown problem '{}' (expected one of {})", self.problem, BUILTIN_NAMES.join(", ")),
            ));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(field("eps", format!("must be positive, got {}", self.eps)));
        }
        if !(self.h1_factor > 0.0 && self.h1_factor.is_finite()) {
            return Err(field("h1_factor", format!("must be positive, got {}", self.h1_factor)));
        }
        if let Some(y0) = self.y0 {
            if !y0.is_finite() || (self.problem == "riccati" && y0 <= 0.0) || (self.problem == "linear" && y0 <= -1.0) {
                return Err(field("y0", format!("{y0} is outside the problem's domain")));
            }
        }
        if let MeshSpec::Uniform { step, .. } = self.mesh {
            if !(step > 0.0 && step.is_finite()) {
                return Err(field("mesh_step", format!("must be positive, got {step}")));
            }
        }
        let xs = self.mesh.points();
        if xs.is_empty() {
            return Err(field("mesh", "mesh is empty"));
        }
        if xs[0] <= 0.0 || xs.windows(2).any(|w| w[1] <= w[0]) || xs.iter().any(|x| !x.is_finite()) {
            return Err(field("mesh", "points must be positive, finite and strictly increasing"));
        }
        if self.problem == "riccati" {
            let limit = 1.0 / self.y0.unwrap_or(0.5);
            let last = xs[xs.len() - 1];
            if last >= limit {
                return Err(field("mesh", format!("last point {last} is past the blow-up at {limit}")));
            }
        }
        if self.contrast_steps == Some(0) {
            return Err(field("contrast_steps", "must be at least 1"));
        }
        Ok(())
    }
}

/// Command-line flags; each overrides the config file and preset.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "solve", about = "Guaranteed-tolerance solutions of separable initial value problems")]
pub struct CliArgs {
    /// Flat key = value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// table1, table2, table3 or table4.
    #[arg(long)]
    pub preset: Option<String>,
    /// Built-in problem: linear or riccati.
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub y0: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub h1_factor: Option<f64>,
    #[arg(long, value_enum)]
    pub algorithm: Option<Algorithm>,
    /// left, right or midpoint.
    #[arg(long)]
    pub variant: Option<Variant>,
    #[arg(long)]
    pub mesh_step: Option<f64>,
    #[arg(long)]
    pub mesh_count: Option<usize>,
    /// Comma-separated mesh points, replacing step/count.
    #[arg(long, value_delimiter = ',')]
    pub mesh: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out_path: Option<PathBuf>,
    /// Add a fixed-step Runge–Kutta comparison with this many steps per node.
    #[arg(long)]
    pub contrast_steps: Option<usize>,
}

impl CliArgs {
    pub fn into_config(self) -> Result<ExperimentConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => Overrides::parse_file(path)?,
            None => Overrides::default(),
        };
        let flags = Overrides {
            preset: self.preset,
            problem: self.problem,
            y0: self.y0,
            eps: self.eps,
            h1_factor: self.h1_factor,
            algorithm: self.algorithm,
            variant: self.variant,
            mesh_step: self.mesh_step,
            mesh_count: self.mesh_count,
            mesh: self.mesh,
            output: self.output,
            out_path: self.out_path,
            contrast_steps: self.contrast_steps,
        };
        // A preset named on the command line is the base; the file's own
        // settings still apply on top of it.
        let base = Overrides { preset: flags.preset.clone(), ..Default::default() };
        resolve(vec![file, base, Overrides { preset: None, ..flags }])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_expand() {
        let t2 = preset("table2").unwrap();
        assert_eq!(t2.problem, "riccati");
        assert_eq!(t2.mesh.points().len(), 32);
        assert_eq!(t2.mesh.points()[31], 0.05 * 32.0);
        assert_eq!(preset("table3").unwrap().algorithm, Algorithm::Mesh);
        assert!(preset("table5").is_none());
    }

    #[test]
    fn file_parsing_reports_lines() {
        let text = "# experiment\npreset = table2\n\neps = 1e-3 # looser\nalgorithm=two\n";
        let o = Overrides::parse_str(text, "x.cfg").unwrap();
        assert_eq!(o.eps, Some(1e-3));
        assert_eq!(o.algorithm, Some(Algorithm::Two));
        let err = Overrides::parse_str("eps = 1e-4\nbogus\n", "x.cfg").unwrap_err();
        assert_eq!(err.to_string(), "x.cfg:2: expected 'key = value', found 'bogus'");
        let err = Overrides::parse_str("eps = tiny", "x.cfg").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
        assert!(Overrides::parse_str("colour = red", "x.cfg").is_err());
    }

    #[test]
    fn later_sources_win() {
        let file = Overrides::parse_str("preset = table1\neps = 1e-3\nmesh = 0.1, 0.2", "f").unwrap();
        let flags = Overrides { eps: Some(1e-5), ..Default::default() };
        let cfg = resolve(vec![file, flags]).unwrap();
        assert_eq!(cfg.eps, 1e-5);
        assert_eq!(cfg.mesh, MeshSpec::Explicit(vec![0.1, 0.2]));
        let flags = Overrides { mesh_count: Some(3), ..Default::default() };
        let cfg = resolve(vec![Overrides::parse_str("mesh = 0.1", "f").unwrap(), flags]).unwrap();
        assert_eq!(cfg.mesh, MeshSpec::Uniform { step: 0.05, count: 3 });
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = |o: Overrides| resolve(vec![o]).unwrap_err();
        assert!(matches!(bad(Overrides { mesh_count: Some(0), ..Default::default() }),
            ConfigError::Field { ref field, .. } if field == "mesh"));
        bad(Overrides { eps: Some(0.0), ..Default::default() });
        bad(Overrides { preset: Some("table9".into()), ..Default::default() });
        bad(Overrides { problem: Some("logistic".into()), ..Default::default() });
        bad(Overrides { preset: Some("table2".into()), mesh_count: Some(40), ..Default::default() });
        bad(Overrides { mesh: Some(vec![0.2, 0.1]), ..Default::default() });
    }
}
