//! Run configuration: a JSON document with every key named explicitly.
//! Unknown keys are parse errors; semantic problems are collected and
//! reported together.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use gcs::dynamics::ChartKind;
use gcs::io::ComplexPair;
use gcs::schedule::Segment;
use gcs::{KernelMode, Spin, Tolerances};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Moment map, isotropy subalgebras and the informative verdict.
    Analyze,
    /// Quantum vs classical evolution with the van Hove phase.
    Evolve,
    /// Resolution of the identity on a Haar quadrature grid.
    Identity,
    /// Berry connection profile and the Dirac condition.
    Berry,
    /// Discrete-time coherent-state path integral.
    Pathint,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Evolve => "evolve",
            Command::Identity => "identity",
            Command::Berry => "berry",
            Command::Pathint => "pathint",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<Spin>,
    /// Generator file, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `√(2/3)|1,1⟩ + √(1/3)|1,−1⟩` in spin 1.
    Matsumoto,
    /// `|j, j⟩`.
    HighestWeight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiducialConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<ComplexPair>>,
    /// Fiducial file, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

/// Section parameters `(θ, φ)` of a point on the su(2) orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub rep: RepConfig,
    pub fiducial: FiducialConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<Segment>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_point: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_point: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartKind>,
    /// Euler-grid orders `[n_β, n_α, n_γ]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice_counts: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_mode: Option<KernelMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

pub const DEFAULT_DT: f64 = 1e-3;

impl RunConfig {
    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.unwrap_or_default()
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(DEFAULT_DT)
    }

    pub fn chart(&self) -> ChartKind {
        self.chart.unwrap_or(ChartKind::North)
    }

    pub fn kernel_mode(&self) -> KernelMode {
        self.kernel_mode.unwrap_or(KernelMode::Exact)
    }

    /// Every semantic violation for `command`, in a fixed order. File
    /// references are resolved against `base`.
    pub fn violations(&self, command: Command, base: &Path) -> Vec<String> {
        let mut v = Vec::new();
        if let Some(c) = self.command {
            if c != command {
                v.push(format!("config names command '{c}' but '{command}' was requested"));
            }
        }

        match (&self.rep.spin, &self.rep.generators) {
            (Some(_), Some(_)) | (None, None) => {
                v.push("rep: give exactly one of 'spin' or 'generators'".into())
            }
            (None, Some(p)) => check_file(&mut v, "rep.generators", base, p),
            _ => {}
        }
        if self.rep.spin.is_none() && command != Command::Analyze {
            v.push(format!("rep: '{command}' needs an su(2) spin representation ('spin')"));
        }

        let f = &self.fiducial;
        let sources = [f.preset.is_some(), f.amplitudes.is_some(), f.file.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            v.push("fiducial: give exactly one of 'preset', 'amplitudes' or 'file'".into());
        }
        if let Some(p) = &f.file {
            check_file(&mut v, "fiducial.file", base, p);
        }
        if let Some(a) = &f.amplitudes {
            if a.is_empty() {
                v.push("fiducial.amplitudes: must not be empty".into());
            }
            if a.iter().flatten().any(|x| !x.is_finite()) {
                v.push("fiducial.amplitudes: entries must be finite".into());
            }
            if let Some(j) = self.rep.spin {
                if a.len() != j.dim() {
                    v.push(format!("fiducial.amplitudes: spin {j} needs {} amplitudes, got {}", j.dim(), a.len()));
                }
            }
        }
        if let (Some(Preset::Matsumoto), Some(j)) = (f.preset, self.rep.spin) {
            if j.twice() != 2 {
                v.push(format!("fiducial.preset: 'matsumoto' is a spin-1 state, rep is spin {j}"));
            }
        }
        if f.preset.is_some() && self.rep.spin.is_none() {
            v.push("fiducial.preset: presets need a spin representation".into());
        }

        match (&self.schedule, &self.schedule_file) {
            (Some(_), Some(_)) => v.push("give at most one of 'schedule' or 'schedule_file'".into()),
            (None, Some(p)) => check_file(&mut v, "schedule_file", base, p),
            (None, None) if matches!(command, Command::Evolve | Command::Pathint) => {
                v.push(format!("'{command}' needs 'schedule' or 'schedule_file'"))
            }
            _ => {}
        }
        if let Some(s) = &self.schedule {
            if s.is_empty() {
                v.push("schedule: must have at least one segment".into());
            }
        }

        positive(&mut v, "dt", self.dt);
        positive(&mut v, "t_final", self.t_final);
        for (name, p) in [("initial_point", self.initial_point), ("final_point", self.final_point)] {
            if let Some(p) = p {
                if !(0.0..=std::f64::consts::PI).contains(&p.theta) {
                    v.push(format!("{name}.theta: must lie in [0, pi], got {}", p.theta));
                }
                if !p.phi.is_finite() {
                    v.push(format!("{name}.phi: must be finite"));
                }
            }
        }
        if let Some(q) = self.quadrature {
            if q.contains(&0) {
                v.push(format!("quadrature: orders must be at least 1, got {q:?}"));
            }
        }
        match &self.slice_counts {
            Some(n) if n.is_empty() => v.push("slice_counts: must not be empty".into()),
            Some(n) if n.contains(&0) => v.push("slice_counts: entries must be at least 1".into()),
            None if command == Command::Pathint => v.push("'pathint' needs 'slice_counts'".into()),
            _ => {}
        }
        if let Some(k) = self.theta_points {
            if k < 3 {
                v.push(format!("theta_points: need at least 3, got {k}"));
            }
        }
        if let Some(tol) = &self.tolerances {
            let map = serde_json::to_value(tol).expect("tolerances serialize");
            for (key, value) in map.as_object().expect("tolerances are an object") {
                let x = value.as_f64().unwrap_or(f64::NAN);
                if !(x > 0.0 && x.is_finite()) {
                    v.push(format!("tolerances.{key}: must be positive and finite, got {value}"));
                }
            }
        }
        v
    }
}

fn check_file(v: &mut Vec<String>, key: &str, base: &Path, p: &Path) {
    let full = base.join(p);
    if !full.is_file() {
        v.push(format!("{key}: file '{}' does not exist", full.display()));
    }
}

fn positive(v: &mut Vec<String>, key: &str, x: Option<f64>) {
    if let Some(x) = x {
        if !(x > 0.0 && x.is_finite()) {
            v.push(format!("{key}: must be positive and finite, got {x}"));
        }
    }
}

/// Parses a config document. Errors carry the line and column of the
/// offending token; unknown keys are named.
pub fn parse_config_str(path: &Path, text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Reads, parses and validates a config for `command`.
pub fn parse_config(path: &Path, command: Command) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let config = parse_config_str(path, &text)?;
    let violations = config.violations(command, base_dir(path));
    if !violations.is_empty() {
        return Err(CliError::Validation { path: path.to_path_buf(), violations });
    }
    Ok(config)
}

/// Directory that relative paths in a config resolve against.
pub fn base_dir(config_path: &Path) -> &Path {
    match config_path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}
