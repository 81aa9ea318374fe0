//! Dispatch from a validated config to the library operations.

use std::path::Path;

use log::{info, warn};
use serde::Serialize;

use gcs::coherent::{self, is_canonical};
use gcs::dynamics::{self, SectionChart};
use gcs::io::{self, ComplexPair};
use gcs::pathint::{self, default_theta_grid};
use gcs::{
    BerryProfile, ConvergenceRecord, DiracVerdict, Error, FiducialVector, HamiltonianSchedule,
    IdentityCheckResult, IsotropyReport, LieAlgebraRep, MomentVector, QuadratureOrders, Result,
    Tolerances, TrajectoryRecord, VanHoveSetup,
};

use crate::config::{Command, Point, Preset, RunConfig};

/// Inputs shared by every command, built from the config.
pub struct Resolved {
    pub rep: LieAlgebraRep,
    pub fiducial: FiducialVector,
    pub schedule: Option<HamiltonianSchedule>,
    pub tol: Tolerances,
}

pub fn resolve(config: &RunConfig, base: &Path) -> Result<Resolved> {
    let tol = config.tolerances();
    let rep = match (&config.rep.spin, &config.rep.generators) {
        (Some(j), _) => gcs::build_spin_rep(*j),
        (None, Some(p)) => io::load_generator_file(&base.join(p), &tol)?,
        (None, None) => return Err(Error::InvalidInput("no representation given".into())),
    };
    let f = &config.fiducial;
    let fiducial = if let Some(preset) = f.preset {
        match preset {
            Preset::Matsumoto => FiducialVector::matsumoto(&rep)?,
            Preset::HighestWeight => FiducialVector::highest_weight(&rep)?,
        }
    } else if let Some(a) = &f.amplitudes {
        let (fid, deviation) = FiducialVector::renormalized(&rep, io::vector_from_pairs(a))?;
        if deviation > tol.normalization {
            warn!("fiducial amplitudes renormalized (|norm - 1| = {deviation:.3e})");
        }
        fid
    } else if let Some(p) = &f.file {
        let (file_rep, fid) = io::load_fiducial_file(&base.join(p), &tol)?;
        if file_rep.label() != rep.label() || file_rep.d() != rep.d() {
            return Err(Error::InvalidInput(format!(
                "fiducial file is for '{}' (d = {}), config rep is '{}' (d = {})",
                file_rep.label(),
                file_rep.d(),
                rep.label(),
                rep.d()
            )));
        }
        FiducialVector::new(&rep, fid.amplitudes().clone(), &tol)?
    } else {
        return Err(Error::InvalidInput("no fiducial given".into()));
    };
    let schedule = match (&config.schedule, &config.schedule_file) {
        (Some(segments), _) => Some(HamiltonianSchedule::from_segments(segments)?),
        (None, Some(p)) => Some(io::load_schedule_file(&base.join(p))?),
        (None, None) => None,
    };
    if let Some(s) = &schedule {
        if s.n() != rep.n() {
            return Err(Error::Dimension(format!(
                "schedule has {} coefficients per segment, algebra has n = {}",
                s.n(),
                rep.n()
            )));
        }
    }
    Ok(Resolved { rep, fiducial, schedule, tol })
}

#[derive(Debug, Clone, Serialize)]
pub struct RepSummary {
    pub label: String,
    pub dimension: usize,
    pub algebra_dimension: usize,
}

impl RepSummary {
    fn of(rep: &LieAlgebraRep) -> Self {
        RepSummary { label: rep.label().to_string(), dimension: rep.d(), algebra_dimension: rep.n() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeResult {
    pub representation: RepSummary,
    pub fiducial: Vec<ComplexPair>,
    /// `(dim Lie(H_|0⟩), dim Lie(H_0))`.
    pub isotropy_dims: [usize; 2],
    pub isotropy: IsotropyReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveSummary {
    pub steps: usize,
    pub max_fidelity_deficit: f64,
    pub max_abs_phase_residual: f64,
    pub final_action: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveResult {
    pub representation: RepSummary,
    pub informative: bool,
    /// Whether the fiducial was rotated so that its moment points along +3.
    pub canonicalized: bool,
    pub fiducial: Vec<ComplexPair>,
    pub summary: EvolveSummary,
    pub trajectory: TrajectoryRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityResult {
    pub representation: RepSummary,
    pub quadrature_nodes: usize,
    pub required_orders: QuadratureOrders,
    pub check: IdentityCheckResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct BerryResult {
    pub representation: RepSummary,
    pub canonical_mu: MomentVector,
    pub profile: BerryProfile,
    pub verdict: DiracVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathintResult {
    pub representation: RepSummary,
    pub quadrature_nodes: usize,
    pub t_total: f64,
    /// Log-log slope of error against N; absent when an error is exactly zero.
    pub empirical_order: Option<f64>,
    pub convergence: ConvergenceRecord,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Analyze(AnalyzeResult),
    Evolve(EvolveResult),
    Identity(IdentityResult),
    Berry(BerryResult),
    Pathint(PathintResult),
}

pub fn execute(command: Command, config: &RunConfig, base: &Path) -> Result<Payload> {
    let r = resolve(config, base)?;
    info!("{command}: {} (d = {}, n = {})", r.rep.label(), r.rep.d(), r.rep.n());
    match command {
        Command::Analyze => analyze(&r).map(Payload::Analyze),
        Command::Evolve => evolve(config, &r).map(Payload::Evolve),
        Command::Identity => identity(config, &r).map(Payload::Identity),
        Command::Berry => berry(config, &r).map(Payload::Berry),
        Command::Pathint => path_integral(config, &r).map(Payload::Pathint),
    }
}

fn analyze(r: &Resolved) -> Result<AnalyzeResult> {
    let isotropy = gcs::classify_informative(&r.rep, &r.fiducial, &r.tol)?;
    Ok(AnalyzeResult {
        representation: RepSummary::of(&r.rep),
        fiducial: io::vector_to_pairs(r.fiducial.amplitudes()),
        isotropy_dims: [isotropy.subalg_state.dim, isotropy.subalg_moment.dim],
        isotropy,
    })
}

fn schedule_of(r: &Resolved) -> Result<&HamiltonianSchedule> {
    r.schedule.as_ref().ok_or_else(|| Error::InvalidInput("a schedule is required".into()))
}

fn evolve(config: &RunConfig, r: &Resolved) -> Result<EvolveResult> {
    let schedule = schedule_of(r)?;
    let informative = gcs::classify_informative(&r.rep, &r.fiducial, &r.tol)?.informative;
    if !informative {
        warn!("fiducial is not informative; fidelity and phase diagnostics depend on the section choice");
    }
    let mu = gcs::moment_map(&r.rep, &r.fiducial, &r.tol)?;
    let (fiducial, canonicalized) = if is_canonical(&mu, &r.tol) {
        (r.fiducial.clone(), false)
    } else {
        (coherent::canonicalize_su2(&r.rep, &r.fiducial, &r.tol)?.fiducial, true)
    };
    let Point { theta, phi } = config.initial_point.unwrap_or(Point { theta: 0.0, phi: 0.0 });
    let setup = VanHoveSetup {
        t_final: config.t_final.unwrap_or(schedule.end()),
        dt: config.dt(),
        initial: (theta, phi),
        chart: SectionChart { kind: config.chart(), cap: r.tol.chart_cap },
    };
    let trajectory = gcs::van_hove_check(&r.rep, &fiducial, schedule, &setup, &r.tol)?;
    let summary = EvolveSummary {
        steps: trajectory.times.len() - 1,
        max_fidelity_deficit: trajectory.max_fidelity_deficit(),
        max_abs_phase_residual: trajectory.max_abs_phase_residual(),
        final_action: *trajectory.action.last().unwrap_or(&0.0),
    };
    Ok(EvolveResult {
        representation: RepSummary::of(&r.rep),
        informative,
        canonicalized,
        fiducial: io::vector_to_pairs(fiducial.amplitudes()),
        summary,
        trajectory,
    })
}

fn quadrature_orders(config: &RunConfig, rep: &LieAlgebraRep) -> Result<(QuadratureOrders, QuadratureOrders)> {
    let required = QuadratureOrders::exact_for(rep.require_spin()?);
    let orders = config.quadrature.map_or(required, |[b, a, g]| QuadratureOrders::new(b, a, g));
    Ok((orders, required))
}

fn identity(config: &RunConfig, r: &Resolved) -> Result<IdentityResult> {
    let (orders, required) = quadrature_orders(config, &r.rep)?;
    let quad = gcs::haar_quadrature(&r.rep, orders)?;
    let check = gcs::identity_resolution(&r.rep, &r.fiducial, &quad)?;
    Ok(IdentityResult { representation: RepSummary::of(&r.rep), quadrature_nodes: quad.len(), required_orders: required, check })
}

fn berry(config: &RunConfig, r: &Resolved) -> Result<BerryResult> {
    let canonical = coherent::canonicalize_su2(&r.rep, &r.fiducial, &r.tol)?;
    let count = config.theta_points.unwrap_or(pathint::DIRAC_THETA_POINTS);
    let grid = default_theta_grid(count, r.tol.chart_cap);
    let profile = gcs::berry_connection(&r.rep, &canonical.fiducial, &grid, &r.tol)?;
    let verdict = DiracVerdict::from_coefficient(profile.coefficient, &r.tol);
    Ok(BerryResult { representation: RepSummary::of(&r.rep), canonical_mu: canonical.mu, profile, verdict })
}

fn path_integral(config: &RunConfig, r: &Resolved) -> Result<PathintResult> {
    let schedule = schedule_of(r)?;
    let (orders, _) = quadrature_orders(config, &r.rep)?;
    let quad = gcs::haar_quadrature(&r.rep, orders)?;
    let t_total = config.t_final.unwrap_or(schedule.end());
    let chart = config.chart();
    let element = |p: Option<Point>| {
        let Point { theta, phi } = p.unwrap_or(Point { theta: 0.0, phi: 0.0 });
        dynamics::section_element(&r.rep, theta, phi, chart)
    };
    let g_initial = element(config.initial_point)?;
    let g_final = element(config.final_point)?;
    let slice_counts = config.slice_counts.clone().unwrap_or_default();
    let convergence = gcs::discrete_propagator(
        &r.rep,
        &r.fiducial,
        schedule,
        t_total,
        &g_initial,
        &g_final,
        &slice_counts,
        &quad,
        config.kernel_mode(),
        &r.tol,
    )?;
    let empirical_order = (convergence.errors.len() >= 2 && convergence.errors.iter().all(|&e| e > 0.0))
        .then(|| convergence.empirical_order());
    Ok(PathintResult {
        representation: RepSummary::of(&r.rep),
        quadrature_nodes: quad.len(),
        t_total,
        empirical_order,
        convergence,
    })
}
