//! Reports: the deterministic JSON document, plain-text summaries and CSV
//! tables.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use gcs::Tolerances;

use crate::commands::Payload;
use crate::config::{Command, RunConfig};
use crate::error::CliError;

pub const REPORT_FILE: &str = "report.json";
pub const TIMING_FILE: &str = "timing.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

/// Everything a run produced except wall time, so that identical inputs
/// give byte-identical documents.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub config: RunConfig,
    pub tolerances: Tolerances,
    pub result: Payload,
}

impl Report {
    pub fn new(command: Command, config: RunConfig, result: Payload) -> Self {
        let tolerances = config.tolerances();
        Report { tool: "gcs", version: env!("CARGO_PKG_VERSION"), command, config, tolerances, result }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn fmt_complex(z: [f64; 2]) -> String {
    if z[1] == 0.0 {
        format!("{:.6}", z[0])
    } else {
        format!("{:.6}{:+.6}i", z[0], z[1])
    }
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "gcs {} {}", report.version, report.command);
    match &report.result {
        Payload::Analyze(a) => {
            let _ = writeln!(w, "representation  {} (d = {}, n = {})", a.representation.label, a.representation.dimension, a.representation.algebra_dimension);
            let amps: Vec<String> = a.fiducial.iter().map(|&z| fmt_complex(z)).collect();
            let _ = writeln!(w, "fiducial        [{}]", amps.join(", "));
            let mu: Vec<String> = a.isotropy.mu.0.iter().map(|x| format!("{x:.12}")).collect();
            let _ = writeln!(w, "moment          ({})", mu.join(", "));
            let _ = writeln!(w, "isotropy dims   state {}, moment {}", a.isotropy_dims[0], a.isotropy_dims[1]);
            let _ = writeln!(w, "informative     {}", a.isotropy.informative);
        }
        Payload::Evolve(e) => {
            let _ = writeln!(w, "representation  {}", e.representation.label);
            let _ = writeln!(w, "informative     {}", e.informative);
            if e.canonicalized {
                let _ = writeln!(w, "fiducial rotated to a canonical moment");
            }
            let _ = writeln!(w, "steps           {}", e.summary.steps);
            let _ = writeln!(w, "max 1 - fidelity {:.3e}", e.summary.max_fidelity_deficit);
            let _ = writeln!(w, "max |phase res|  {:.3e}", e.summary.max_abs_phase_residual);
            let _ = writeln!(w, "final action    {:.12}", e.summary.final_action);
        }
        Payload::Identity(i) => {
            let o = i.check.orders;
            let _ = writeln!(w, "representation  {}", i.representation.label);
            let _ = writeln!(w, "orders          ({}, {}, {}), {} nodes, exact = {}", o.beta, o.alpha, o.gamma, i.quadrature_nodes, i.check.exact);
            let _ = writeln!(w, "constant        {:.15}", i.check.constant);
            let _ = writeln!(w, "deviation       {:.3e}", i.check.deviation);
        }
        Payload::Berry(b) => {
            let _ = writeln!(w, "representation  {}", b.representation.label);
            let _ = writeln!(w, "coefficient     {:.12}", b.verdict.coefficient);
            let _ = writeln!(w, "fit residual    {:.3e}", b.profile.fit_residual);
            let _ = writeln!(w, "nearest n/2     {}", b.verdict.nearest_admissible);
            let _ = writeln!(w, "admissible      {}", b.verdict.admissible);
        }
        Payload::Pathint(p) => {
            let c = &p.convergence;
            let _ = writeln!(w, "representation  {}", p.representation.label);
            let _ = writeln!(w, "kernel          {:?}, {} nodes, T = {}", c.kernel_mode, p.quadrature_nodes, p.t_total);
            let _ = writeln!(w, "exact           |A| = {:.12}, arg A = {:.12}", c.exact_amplitude.norm(), c.exact_amplitude.arg());
            let _ = writeln!(w, "{:>6}  {:>16}  {:>16}  {:>12}", "N", "|A_N|", "arg A_N", "error");
            for ((n, a), e) in c.slice_counts.iter().zip(&c.amplitudes).zip(&c.errors) {
                let _ = writeln!(w, "{n:>6}  {:>16.12}  {:>16.12}  {e:>12.3e}", a.norm(), a.arg());
            }
            if let Some(order) = p.empirical_order {
                let _ = writeln!(w, "empirical order {order:.3}");
            }
        }
    }
    out
}

/// Command-specific table. Evolve writes the per-step trajectory.
pub fn write_csv<W: Write>(report: &Report, mut out: W) -> std::io::Result<()> {
    match &report.result {
        Payload::Analyze(a) => {
            let n = a.isotropy.mu.0.len();
            let cols: Vec<String> = (1..=n).map(|i| format!("mu{i}")).collect();
            writeln!(out, "label,dim_state,dim_moment,informative,{}", cols.join(","))?;
            let mu: Vec<String> = a.isotropy.mu.0.iter().map(|x| format!("{x:e}")).collect();
            writeln!(
                out,
                "{},{},{},{},{}",
                a.representation.label,
                a.isotropy_dims[0],
                a.isotropy_dims[1],
                a.isotropy.informative,
                mu.join(",")
            )
        }
        Payload::Evolve(e) => gcs::io::write_trajectory_csv(&e.trajectory, out),
        Payload::Identity(i) => {
            writeln!(out, "row,col,re,im")?;
            let b = &i.check.operator;
            for r in 0..b.nrows() {
                for c in 0..b.ncols() {
                    writeln!(out, "{r},{c},{:e},{:e}", b[(r, c)].re, b[(r, c)].im)?;
                }
            }
            Ok(())
        }
        Payload::Berry(b) => {
            writeln!(out, "theta,a_phi,fit")?;
            for (t, a) in b.profile.theta_grid.iter().zip(&b.profile.a_phi) {
                writeln!(out, "{t:e},{a:e},{:e}", b.profile.coefficient * (t.cos() - 1.0))?;
            }
            Ok(())
        }
        Payload::Pathint(p) => {
            let c = &p.convergence;
            writeln!(out, "n,re,im,abs,arg,error")?;
            for ((n, a), e) in c.slice_counts.iter().zip(&c.amplitudes).zip(&c.errors) {
                writeln!(out, "{n},{:e},{:e},{:e},{:e},{e:e}", a.re, a.im, a.norm(), a.arg())?;
            }
            Ok(())
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(io_err(path))
}

/// Writes `report.json`, the format-specific extras and `timing.json` under
/// `dir`.
pub fn write_outputs(report: &Report, dir: &Path, format: Format, wall_seconds: f64) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_file(&dir.join(REPORT_FILE), report.to_json().as_bytes())?;
    match format {
        Format::Json => {
            if let Payload::Evolve(e) = &report.result {
                let path = dir.join("trajectory.jsonl");
                let mut buf = Vec::new();
                gcs::io::write_trajectory_jsonl(&e.trajectory, &mut buf).map_err(io_err(&path))?;
                write_file(&path, &buf)?;
            }
        }
        Format::Csv => {
            let name = match report.command {
                Command::Evolve => "trajectory.csv".to_string(),
                c => format!("{c}.csv"),
            };
            let path = dir.join(name);
            let mut buf = Vec::new();
            write_csv(report, &mut buf).map_err(io_err(&path))?;
            write_file(&path, &buf)?;
        }
        Format::Text => write_file(&dir.join("report.txt"), render_text(report).as_bytes())?,
    }
    let timing = serde_json::json!({ "command": report.command, "wall_time_seconds": wall_seconds });
    write_file(&dir.join(TIMING_FILE), format!("{timing}\n").as_bytes())
}
