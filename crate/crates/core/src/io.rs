//! File formats: generator files, fiducial files, schedule files and
//! per-step trajectory output (JSON lines and CSV). Complex numbers are
//! always `[re, im]` pairs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::coherent::FiducialVector;
use crate::dynamics::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::lie::{self, LieAlgebraRep};
use crate::linalg::{CMat, CVec, C64};
use crate::schedule::{HamiltonianSchedule, Segment};
use crate::spin::Spin;
use crate::tolerance::Tolerances;

pub type ComplexPair = [f64; 2];

pub fn to_pair(z: C64) -> ComplexPair {
    [z.re, z.im]
}

pub fn from_pair(p: ComplexPair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn matrix_to_rows(m: &CMat) -> Vec<Vec<ComplexPair>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| to_pair(m[(i, j)])).collect()).collect()
}

pub fn vector_to_pairs(v: &CVec) -> Vec<ComplexPair> {
    v.iter().map(|&z| to_pair(z)).collect()
}

pub fn vector_from_pairs(p: &[ComplexPair]) -> CVec {
    CVec::from_iterator(p.len(), p.iter().map(|&x| from_pair(x)))
}

pub fn serialize_complex<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    to_pair(*z).serialize(s)
}

pub fn serialize_complex_slice<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|&z| to_pair(z)))
}

pub fn serialize_matrix<S: serde::Serializer>(m: &CMat, s: S) -> std::result::Result<S::Ok, S::Error> {
    matrix_to_rows(m).serialize(s)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse { path: path.display().to_string(), message: e.to_string() })
}

/// `{ "label", "dimension", "generators": [[[re, im], …], …] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorFile {
    pub label: String,
    pub dimension: usize,
    pub generators: Vec<Vec<Vec<ComplexPair>>>,
}

impl GeneratorFile {
    pub fn from_rep(rep: &LieAlgebraRep) -> Self {
        GeneratorFile {
            label: rep.label().to_string(),
            dimension: rep.d(),
            generators: rep.generators().iter().map(matrix_to_rows).collect(),
        }
    }

    pub fn matrices(&self) -> Result<Vec<CMat>> {
        let d = self.dimension;
        self.generators
            .iter()
            .enumerate()
            .map(|(k, rows)| {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Dimension(format!("generator {k} is not {d}x{d}")));
                }
                Ok(CMat::from_fn(d, d, |i, j| from_pair(rows[i][j])))
            })
            .collect()
    }

    pub fn into_rep(self, tol: &Tolerances) -> Result<LieAlgebraRep> {
        let mats = self.matrices()?;
        lie::validate_algebra(&self.label, mats, tol)
    }
}

pub fn load_generator_file(path: &Path, tol: &Tolerances) -> Result<LieAlgebraRep> {
    let file: GeneratorFile = parse_json(path, &read(path)?)?;
    file.into_rep(tol)
}

/// How a representation is named in config and fiducial files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepSpec {
    Spin {
        spin: Spin,
    },
    /// Path to a generator file.
    Generators {
        generators: PathBuf,
    },
    /// Bare path (fiducial-file shorthand).
    Path(PathBuf),
}

impl RepSpec {
    /// Builds the representation; relative paths resolve against `base`.
    pub fn build(&self, base: &Path, tol: &Tolerances) -> Result<LieAlgebraRep> {
        match self {
            RepSpec::Spin { spin } => Ok(lie::build_spin_rep(*spin)),
            RepSpec::Generators { generators: p } | RepSpec::Path(p) => {
                load_generator_file(&base.join(p), tol)
            }
        }
    }
}

/// `{ "rep": …, "amplitudes": [[re, im], …] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiducialFile {
    pub rep: RepSpec,
    pub amplitudes: Vec<ComplexPair>,
}

/// Loads a fiducial file. Amplitudes are normalized; a correction larger
/// than the normalization tolerance is logged as a warning.
pub fn load_fiducial_file(path: &Path, tol: &Tolerances) -> Result<(LieAlgebraRep, FiducialVector)> {
    let file: FiducialFile = parse_json(path, &read(path)?)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let rep = file.rep.build(base, tol)?;
    let (fid, deviation) = FiducialVector::renormalized(&rep, vector_from_pairs(&file.amplitudes))?;
    if deviation > tol.normalization {
        warn!("{}: amplitudes renormalized (|norm - 1| = {deviation:.3e})", path.display());
    }
    Ok((rep, fid))
}

/// A JSON array of `{ "until": t, "h": [h1, …, hn] }` segments.
pub fn parse_schedule(path: &Path, text: &str) -> Result<HamiltonianSchedule> {
    let segments: Vec<Segment> = parse_json(path, text)?;
    HamiltonianSchedule::from_segments(&segments)
}

pub fn load_schedule_file(path: &Path) -> Result<HamiltonianSchedule> {
    parse_schedule(path, &read(path)?)
}

/// One line of trajectory output.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrajectoryStep {
    pub time: f64,
    pub mu: Vec<f64>,
    pub theta: f64,
    pub phi: f64,
    pub action: f64,
    pub fidelity: f64,
    pub phase_residual: f64,
}

pub fn trajectory_steps(rec: &TrajectoryRecord) -> Vec<TrajectoryStep> {
    (0..rec.times.len())
        .map(|k| TrajectoryStep {
            time: rec.times[k],
            mu: rec.mu[k].0.clone(),
            theta: rec.section_params[k].0,
            phi: rec.section_params[k].1,
            action: rec.action[k],
            fidelity: rec.fidelity[k],
            phase_residual: rec.phase_residual[k],
        })
        .collect()
}

pub fn write_trajectory_jsonl<W: Write>(rec: &TrajectoryRecord, mut out: W) -> std::io::Result<()> {
    for step in trajectory_steps(rec) {
        serde_json::to_writer(&mut out, &step)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_trajectory_csv<W: Write>(rec: &TrajectoryRecord, mut out: W) -> std::io::Result<()> {
    let n = rec.mu.first().map_or(0, |m| m.0.len());
    let mu_cols: Vec<String> = (1..=n).map(|a| format!("mu{a}")).collect();
    writeln!(out, "time,{},theta,phi,action,fidelity,phase_residual", mu_cols.join(","))?;
    for s in trajectory_steps(rec) {
        let mu: Vec<String> = s.mu.iter().map(|x| format!("{x:e}")).collect();
        writeln!(
            out,
            "{:e},{},{:e},{:e},{:e},{:e},{:e}",
            s.time,
            mu.join(","),
            s.theta,
            s.phi,
            s.action,
            s.fidelity,
            s.phase_residual
        )?;
    }
    Ok(())
}
