//! Quantum propagation and classical co-adjoint flow side by side, the action
//! along a gauge-fixed section of the orbit, and the van Hove phase check:
//! for an informative fiducial, `U(t)|ĝ(0)⟩ = e^{iS(t)} |ĝ(t)⟩`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coherent::{self, FiducialVector, MomentVector};
use crate::error::{Error, Result};
use crate::lie::{self, GroupElement, LieAlgebraRep};
use crate::linalg::{self, CMat, CVec};
use crate::par;
use crate::schedule::{HamiltonianSchedule, TimeGrid};
use crate::tolerance::Tolerances;

fn check_schedule(rep: &LieAlgebraRep, schedule: &HamiltonianSchedule) -> Result<()> {
    if schedule.n() != rep.n() {
        return Err(Error::Dimension(format!(
            "schedule has {} coefficients per segment, algebra has n = {}",
            schedule.n(),
            rep.n()
        )));
    }
    Ok(())
}

/// States `ψ(t_k)` on the schedule grid.
#[derive(Debug, Clone)]
pub struct QuantumTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVec>,
}

/// Exact stepping `ψ_{k+1} = exp(−i Ĥ_k Δt_k) ψ_k` over the schedule span.
pub fn propagate_quantum(
    rep: &LieAlgebraRep,
    schedule: &HamiltonianSchedule,
    psi0: &CVec,
    dt: f64,
) -> Result<QuantumTrajectory> {
    check_schedule(rep, schedule)?;
    if psi0.len() != rep.d() {
        return Err(Error::Dimension(format!("psi0 has {} components, d = {}", psi0.len(), rep.d())));
    }
    let grid = schedule.grid(dt)?;
    Ok(propagate_on_grid(rep, schedule, psi0, &grid))
}

fn propagate_on_grid(
    rep: &LieAlgebraRep,
    schedule: &HamiltonianSchedule,
    psi0: &CVec,
    grid: &TimeGrid,
) -> QuantumTrajectory {
    let mut states = Vec::with_capacity(grid.times.len());
    states.push(psi0.clone());
    // Steps within one segment share length, so one exponential per segment.
    let mut cached: Option<(usize, f64, CMat)> = None;
    for k in 0..grid.steps() {
        let seg = grid.segment[k];
        let step = grid.step_len(k);
        let stale = match &cached {
            Some((s, len, _)) => *s != seg || (len - step).abs() > 1e-15 * step.max(1.0),
            None => true,
        };
        if stale {
            let h = rep.combination(&schedule.coefficients()[seg]);
            cached = Some((seg, step, linalg::unitary_exp(&h, step)));
        }
        let u = &cached.as_ref().unwrap().2;
        let next = u * states.last().unwrap();
        states.push(next);
    }
    QuantumTrajectory { times: grid.times.clone(), states }
}

/// Exact propagator `T exp(−i ∫_a^b Ĥ dt)`.
pub fn propagator(rep: &LieAlgebraRep, schedule: &HamiltonianSchedule, a: f64, b: f64) -> CMat {
    let mut u = CMat::identity(rep.d(), rep.d());
    let bp = schedule.breakpoints();
    for (k, h) in schedule.coefficients().iter().enumerate() {
        let lo = bp[k].max(a);
        let hi = bp[k + 1].min(b);
        if hi > lo {
            u = linalg::unitary_exp(&rep.combination(h), hi - lo) * u;
        }
    }
    u
}

/// Generator of the co-adjoint flow `μ̇ = A μ`, `A_ac = Σ_b f_abc h_b`.
fn flow_matrix(rep: &LieAlgebraRep, h: &[f64]) -> DMatrix<f64> {
    let n = rep.n();
    DMatrix::from_fn(n, n, |a, c| (0..n).map(|b| rep.f(a, b, c) * h[b]).sum())
}

fn rk4_step(a: &DMatrix<f64>, mu: &DVector<f64>, dt: f64) -> DVector<f64> {
    let k1 = a * mu;
    let k2 = a * (mu + &k1 * (0.5 * dt));
    let k3 = a * (mu + &k2 * (0.5 * dt));
    let k4 = a * (mu + &k3 * dt);
    mu + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// Classical moments on the grid plus RK4 half-step values at each step midpoint.
#[derive(Debug, Clone)]
pub struct CoadjointFlow {
    pub times: Vec<f64>,
    pub mu: Vec<MomentVector>,
    pub midpoints: Vec<MomentVector>,
}

/// Integrates `μ̇_a = f_abc h_b μ_c` (for su(2): `μ̇ = h × μ`) with classical RK4.
pub fn flow_coadjoint(
    rep: &LieAlgebraRep,
    schedule: &HamiltonianSchedule,
    mu0: &MomentVector,
    dt: f64,
) -> Result<CoadjointFlow> {
    check_schedule(rep, schedule)?;
    if mu0.0.len() != rep.n() {
        return Err(Error::Dimension("mu0 has the wrong length".into()));
    }
    let grid = schedule.grid(dt)?;
    Ok(flow_on_grid(rep, schedule, mu0, &grid))
}

fn flow_on_grid(
    rep: &LieAlgebraRep,
    schedule: &HamiltonianSchedule,
    mu0: &MomentVector,
    grid: &TimeGrid,
) -> CoadjointFlow {
    let to_moment = |v: &DVector<f64>| MomentVector(v.iter().copied().collect());
    let mut mu = DVector::from_column_slice(mu0.as_slice());
    let mut out = Vec::with_capacity(grid.times.len());
    let mut mids = Vec::with_capacity(grid.steps());
    out.push(mu0.clone());
    let mut cached: Option<(usize, DMatrix<f64>)> = None;
    for k in 0..grid.steps() {
        let seg = grid.segment[k];
        if cached.as_ref().map(|c| c.0) != Some(seg) {
            cached = Some((seg, flow_matrix(rep, &schedule.coefficients()[seg])));
        }
        let a = &cached.as_ref().unwrap().1;
        let step = grid.step_len(k);
        mids.push(to_moment(&rk4_step(a, &mu, 0.5 * step)));
        mu = rk4_step(a, &mu, step);
        out.push(to_moment(&mu));
    }
    CoadjointFlow { times: grid.times.clone(), mu: out, midpoints: mids }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartKind {
    North,
    South,
}

impl ChartKind {
    fn name(self) -> &'static str {
        match self {
            ChartKind::North => "north",
            ChartKind::South => "south",
        }
    }
}

/// A polar chart of the su(2) orbit with an excluded cap of half-angle `cap`
/// around the pole it cannot cover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionChart {
    pub kind: ChartKind,
    pub cap: f64,
}

impl SectionChart {
    pub fn north() -> Self {
        SectionChart { kind: ChartKind::North, cap: 1e-3 }
    }

    pub fn south() -> Self {
        SectionChart { kind: ChartKind::South, cap: 1e-3 }
    }

    fn check(&self, theta: f64, time: f64) -> Result<()> {
        let inside = match self.kind {
            ChartKind::North => theta <= PI - self.cap,
            ChartKind::South => theta >= self.cap,
        };
        if inside {
            Ok(())
        } else {
            Err(Error::ChartExit { chart: self.kind.name(), theta, time })
        }
    }
}

/// A section representative `ĝ(θ, φ)` together with its parameters.
#[derive(Debug, Clone)]
pub struct SectionPoint {
    pub element: GroupElement,
    pub theta: f64,
    pub phi: f64,
}

/// `ĝ(θ, φ)`: north chart `exp(−iφJ_3) exp(−iθJ_2) exp(+iφJ_3)`,
/// south chart `exp(−iφJ_3) exp(−iθJ_2) exp(−iφJ_3)`.
pub fn section_element(
    rep: &LieAlgebraRep,
    theta: f64,
    phi: f64,
    chart: ChartKind,
) -> Result<GroupElement> {
    rep.require_su2()?;
    // exp(−iφJ3) exp(−iθJ2) exp(iφJ3) = exp(−iθ(cos φ J2 − sin φ J1)).
    let north = lie::exp_element(rep, &[-theta * phi.sin(), theta * phi.cos(), 0.0])?;
    Ok(match chart {
        ChartKind::North => north,
        ChartKind::South => north.compose(&lie::exp_element(rep, &[0.0, 0.0, 2.0 * phi])?),
    })
}

/// Polar angles of a moment: `θ = arccos(μ_3/‖μ‖)`, `φ = atan2(μ_2, μ_1)`
/// (`φ := 0` on the axis).
pub fn polar_angles(mu: &MomentVector) -> (f64, f64) {
    let [m1, m2, m3] = [mu.0[0], mu.0[1], mu.0[2]];
    let norm = mu.norm();
    let theta = (m3 / norm).clamp(-1.0, 1.0).acos();
    let phi = if m1 == 0.0 && m2 == 0.0 { 0.0 } else { m2.atan2(m1) };
    (theta, phi)
}

/// Gauge-fixed representative of the orbit point `mu` (fiducial canonical).
pub fn section_su2(
    rep: &LieAlgebraRep,
    mu: &MomentVector,
    chart: &SectionChart,
    tol: &Tolerances,
) -> Result<SectionPoint> {
    section_at_time(rep, mu, chart, tol, f64::NAN)
}

fn section_at_time(
    rep: &LieAlgebraRep,
    mu: &MomentVector,
    chart: &SectionChart,
    tol: &Tolerances,
    time: f64,
) -> Result<SectionPoint> {
    rep.require_su2()?;
    let norm = mu.norm();
    if norm <= tol.degenerate_orbit {
        return Err(Error::DegenerateOrbit { op: "section_su2", norm });
    }
    let (theta, phi) = polar_angles(mu);
    chart.check(theta, time)?;
    Ok(SectionPoint { element: section_element(rep, theta, phi, chart.kind)?, theta, phi })
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Section representatives along a classical trajectory.
#[derive(Debug, Clone)]
pub struct SectionPath {
    pub times: Vec<f64>,
    pub points: Vec<SectionPoint>,
    /// Representatives at step midpoints (second-order Berry term).
    pub midpoints: Vec<SectionPoint>,
}

/// Polar angle of the point on the great arc `a → b` nearest the pole the
/// chart excludes, with its fractional position along the arc. `None` when
/// the nearest point is an endpoint (already covered by the pointwise check).
fn arc_closest_to_excluded(a: &[f64], b: &[f64], kind: ChartKind) -> Option<(f64, f64)> {
    let unit = |v: &[f64]| {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / r, v[1] / r, v[2] / r]
    };
    let cross = |u: [f64; 3], v: [f64; 3]| {
        [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
    };
    let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let (a, b) = (unit(a), unit(b));
    let pole = match kind {
        ChartKind::North => [0.0, 0.0, -1.0],
        ChartKind::South => [0.0, 0.0, 1.0],
    };
    let n = cross(a, b);
    let nn = dot(n, n).sqrt();
    if nn < 1e-15 {
        return None;
    }
    let n = [n[0] / nn, n[1] / nn, n[2] / nn];
    let pn = dot(pole, n);
    let q = [pole[0] - pn * n[0], pole[1] - pn * n[1], pole[2] - pn * n[2]];
    let ql = dot(q, q).sqrt();
    if ql < 1e-15 || dot(cross(a, q), n) <= 0.0 || dot(cross(q, b), n) <= 0.0 {
        return None;
    }
    let q = [q[0] / ql, q[1] / ql, q[2] / ql];
    let to_pole = dot(q, pole).clamp(-1.0, 1.0).acos();
    let theta = match kind {
        ChartKind::North => PI - to_pole,
        ChartKind::South => to_pole,
    };
    let total = dot(a, b).clamp(-1.0, 1.0).acos();
    let frac = if total > 0.0 { dot(a, q).clamp(-1.0, 1.0).acos() / total } else { 0.0 };
    Some((theta, frac))
}

impl SectionPath {
    pub fn from_flow(
        rep: &LieAlgebraRep,
        flow: &CoadjointFlow,
        chart: &SectionChart,
        tol: &Tolerances,
    ) -> Result<Self> {
        let points = flow
            .mu
            .iter()
            .zip(&flow.times)
            .map(|(mu, &t)| section_at_time(rep, mu, chart, tol, t))
            .collect::<Result<Vec<_>>>()?;
        let midpoints = flow
            .midpoints
            .iter()
            .zip(flow.times.windows(2))
            .map(|(mu, w)| section_at_time(rep, mu, chart, tol, 0.5 * (w[0] + w[1])))
            .collect::<Result<Vec<_>>>()?;
        // Grid points alone can step over the excluded cap; check the arcs too.
        for (k, w) in flow.mu.windows(2).enumerate() {
            let (t0, t1) = (flow.times[k], flow.times[k + 1]);
            let tm = 0.5 * (t0 + t1);
            let mid = &flow.midpoints[k];
            for (a, b, ta, tb) in [(&w[0], mid, t0, tm), (mid, &w[1], tm, t1)] {
                if let Some((theta, frac)) = arc_closest_to_excluded(&a.0, &b.0, chart.kind) {
                    chart.check(theta, ta + frac * (tb - ta))?;
                }
            }
        }
        Ok(SectionPath { times: flow.times.clone(), points, midpoints })
    }

    /// Largest parameter jump between neighbours, `max(|Δθ|, sin θ |Δφ|)`.
    /// The `sin θ` weight makes the metric blind to the arbitrary `φ` at the pole.
    fn check_smooth(&self, tol: &Tolerances) -> Result<()> {
        for (k, w) in self.points.windows(2).enumerate() {
            let dtheta = (w[1].theta - w[0].theta).abs();
            let dphi = wrap_angle(w[1].phi - w[0].phi).abs() * w[0].theta.sin().max(w[1].theta.sin());
            let jump = dtheta.max(dphi);
            if jump > tol.max_section_jump {
                return Err(Error::NonsmoothPath { jump, t0: self.times[k], t1: self.times[k + 1] });
            }
        }
        Ok(())
    }
}

/// Accumulated action `S(t_k) = Σ [Berry − H] Δt` along a section path:
/// `Berry·Δt = i⟨0|ĝ_mid⁻¹ (ĝ_{k+1} − ĝ_k)|0⟩`, `H = ⟨0|ĝ_mid⁻¹ Ĥ ĝ_mid|0⟩`.
pub fn action_along_path(
    rep: &LieAlgebraRep,
    schedule: &HamiltonianSchedule,
    fiducial: &FiducialVector,
    path: &SectionPath,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    check_schedule(rep, schedule)?;
    path.check_smooth(tol)?;
    let zero = fiducial.amplitudes();
    let states: Vec<CVec> = path.points.iter().map(|p| p.element.apply(zero)).collect();
    let mut action = Vec::with_capacity(states.len());
    action.push(0.0);
    let mut s = 0.0;
    for k in 0..path.midpoints.len() {
        let step = path.times[k + 1] - path.times[k];
        let mid_state = path.midpoints[k].element.apply(zero);
        let chord = &states[k + 1] - &states[k];
        let increment = linalg::I * linalg::inner(&mid_state, &chord);
        // Re⟨m|Δu⟩ = Re⟨m − ū|Δu⟩ + (‖u_{k+1}‖² − ‖u_k‖²)/2 with ū the chord
        // midpoint. The first term is the O(Δt³) midpoint discretization error
        // and is bounded by ‖m − ū‖‖Δu‖; what remains flags lost normalization.
        let centre = (&states[k] + &states[k + 1]) * linalg::C64::new(0.5, 0.0);
        let discretization = (&mid_state - &centre).norm() * chord.norm();
        if increment.im.abs() > tol.berry_residue * step + discretization {
            return Err(Error::BerryResidue { residue: increment.im.abs(), time: path.times[k] });
        }
        let t_mid = 0.5 * (path.times[k] + path.times[k + 1]);
        let h = rep.combination(schedule.h_at(t_mid));
        let energy = linalg::inner(&mid_state, &(h * &mid_state)).re;
        s += increment.re - energy * step;
        action.push(s);
    }
    Ok(action)
}

/// Paired quantum and classical trajectories with the van Hove diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    #[serde(skip)]
    pub psi: Vec<CVec>,
    pub mu: Vec<MomentVector>,
    /// `(θ, φ)` of the section representative.
    pub section_params: Vec<(f64, f64)>,
    pub action: Vec<f64>,
    /// `|⟨ĝ(t)·0|ψ(t)⟩|`.
    pub fidelity: Vec<f64>,
    /// `arg⟨ĝ(t)·0|ψ(t)⟩ − S(t)` wrapped to `(−π, π]`.
    pub phase_residual: Vec<f64>,
}

impl TrajectoryRecord {
    pub fn max_fidelity_deficit(&self) -> f64 {
        self.fidelity.iter().fold(0.0, |acc, f| acc.max(1.0 - f))
    }

    pub fn max_abs_phase_residual(&self) -> f64 {
        self.phase_residual.iter().fold(0.0, |acc, r| acc.max(r.abs()))
    }

    /// Fidelity interpolated linearly at time `t`.
    pub fn fidelity_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&x| x < t).min(self.times.len() - 1);
        if k == 0 || self.times[k] == t {
            return self.fidelity[k];
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        (1.0 - w) * self.fidelity[k - 1] + w * self.fidelity[k]
    }
}

/// Parameters of one van Hove run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanHoveSetup {
    pub t_final: f64,
    pub dt: f64,
    /// Section parameters `(θ₀, φ₀)` of the initial representative.
    pub initial: (f64, f64),
    pub chart: SectionChart,
}

impl VanHoveSetup {
    pub fn new(t_final: f64, dt: f64) -> Self {
        VanHoveSetup { t_final, dt, initial: (0.0, 0.0), chart: SectionChart::north() }
    }

    pub fn with_initial(mut self, theta: f64, phi: f64) -> Self {
        self.initial = (theta, phi);
        self
    }
}

/// Runs the quantum and classical evolutions from `ĝ(θ₀, φ₀)|0⟩` and compares
/// them through the section.
pub fn van_hove_check(
    rep: &LieAlgebraRep,
    fiducial: &FiducialVector,
    schedule: &HamiltonianSchedule,
    setup: &VanHoveSetup,
    tol: &Tolerances,
) -> Result<TrajectoryRecord> {
    rep.require_su2()?;
    check_schedule(rep, schedule)?;
    let mu_fid = coherent::moment_map(rep, fiducial, tol)?;
    let norm = mu_fid.norm();
    if norm <= tol.degenerate_orbit {
        return Err(Error::DegenerateOrbit { op: "van_hove_check", norm });
    }
    let transverse = mu_fid.0[0].powi(2) + mu_fid.0[1].powi(2);
    if transverse > tol.canonical || mu_fid.0[2] < 0.0 {
        return Err(Error::CanonicalizationRequired { transverse });
    }
    let schedule = schedule.truncated(setup.t_final)?;
    let grid = schedule.grid(setup.dt)?;

    let (theta0, phi0) = setup.initial;
    setup.chart.check(theta0, schedule.start())?;
    let g0 = section_element(rep, theta0, phi0, setup.chart.kind)?;
    let psi0 = g0.apply(fiducial.amplitudes());
    let mu0 = coherent::moment_of_state(rep, &psi0, tol)?;

    let quantum = propagate_on_grid(rep, &schedule, &psi0, &grid);
    let flow = flow_on_grid(rep, &schedule, &mu0, &grid);
    let path = SectionPath::from_flow(rep, &flow, &setup.chart, tol)?;
    let action = action_along_path(rep, &schedule, fiducial, &path, tol)?;

    let mut fidelity = Vec::with_capacity(grid.times.len());
    let mut phase_residual = Vec::with_capacity(grid.times.len());
    for (k, point) in path.points.iter().enumerate() {
        // At t = 0 use the exact initial representative rather than the
        // one reconstructed from μ₀ (they agree up to roundoff).
        let classical = if k == 0 { psi0.clone() } else { point.element.apply(fiducial.amplitudes()) };
        let overlap = linalg::inner(&classical, &quantum.states[k]);
        fidelity.push(overlap.norm());
        phase_residual.push(wrap_angle(overlap.arg() - action[k]));
    }
    Ok(TrajectoryRecord {
        times: grid.times,
        psi: quantum.states,
        mu: flow.mu,
        section_params: path.points.iter().map(|p| (p.theta, p.phi)).collect(),
        action,
        fidelity,
        phase_residual,
    })
}

/// One independent van Hove job for [`van_hove_batch`].
#[derive(Debug, Clone)]
pub struct VanHoveJob {
    pub fiducial: FiducialVector,
    pub schedule: HamiltonianSchedule,
    pub setup: VanHoveSetup,
}

/// Independent van Hove runs evaluated in parallel; results in job order.
pub fn van_hove_batch(
    rep: &LieAlgebraRep,
    jobs: &[VanHoveJob],
    tol: &Tolerances,
) -> Vec<Result<TrajectoryRecord>> {
    par::map_slice(jobs, |job| van_hove_check(rep, &job.fiducial, &job.schedule, &job.setup, tol))
}

/// `max_k ‖μ_quantum(t_k) − μ_classical(t_k)‖` for one initial state.
pub fn ehrenfest_deviation(
    rep: &LieAlgebraRep,
    schedule: &HamiltonianSchedule,
    psi0: &CVec,
    dt: f64,
    tol: &Tolerances,
) -> Result<f64> {
    check_schedule(rep, schedule)?;
    let grid = schedule.grid(dt)?;
    let mu0 = coherent::moment_of_state(rep, psi0, tol)?;
    let quantum = propagate_on_grid(rep, schedule, psi0, &grid);
    let flow = flow_on_grid(rep, schedule, &mu0, &grid);
    let mut worst = 0.0f64;
    for (psi, mu_c) in quantum.states.iter().zip(&flow.mu) {
        let (mu_q, _) = rep.expectations(psi);
        let d: f64 = mu_q.iter().zip(&mu_c.0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// One (initial state, schedule) pair for [`ehrenfest_sweep`].
#[derive(Debug, Clone)]
pub struct EhrenfestCase {
    pub psi0: CVec,
    pub schedule: HamiltonianSchedule,
}

/// Ehrenfest deviations for many independent cases, computed in parallel.
pub fn ehrenfest_sweep(
    rep: &LieAlgebraRep,
    cases: &[EhrenfestCase],
    dt: f64,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    par::map_slice(cases, |c| ehrenfest_deviation(rep, &c.schedule, &c.psi0, dt, tol))
        .into_iter()
        .collect()
}
