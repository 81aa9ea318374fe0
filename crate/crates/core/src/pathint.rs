//! Resolution of the identity by Haar quadrature, the monopole form of the
//! Berry connection on the su(2) orbit, and discrete-time coherent-state
//! path integrals built from that resolution.

use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::coherent::{self, FiducialVector};
use crate::dynamics::{self, ChartKind};
use crate::io;
use crate::error::{Error, Result};
use crate::lie::{GroupElement, LieAlgebraRep};
use crate::linalg::{self, CMat, CVec, C64};
use crate::par;
use crate::quadrature::{HaarQuadrature, QuadratureOrders};
use crate::schedule::HamiltonianSchedule;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheckResult {
    /// `B = Σ_i w_i |g_i ψ⟩⟨g_i ψ|`.
    #[serde(serialize_with = "io::serialize_matrix")]
    pub operator: CMat,
    /// Best constant `c` with `B ≈ c I`, i.e. `tr(B)/d`.
    pub constant: f64,
    /// `‖B − c I‖_max`.
    pub deviation: f64,
    pub orders: QuadratureOrders,
    /// Whether the orders meet the exactness threshold for this spin.
    pub exact: bool,
}

pub fn identity_resolution(
    rep: &LieAlgebraRep,
    psi: &FiducialVector,
    quad: &HaarQuadrature,
) -> Result<IdentityCheckResult> {
    let spin = rep.require_spin()?;
    if spin != quad.spin {
        return Err(Error::Dimension(format!("quadrature built for spin {}, rep is spin {spin}", quad.spin)));
    }
    let exact = quad.is_exact();
    if !exact {
        warn!(
            "quadrature orders {:?} below the exactness threshold {:?}; deviation measures the defect",
            quad.orders.as_array(),
            QuadratureOrders::exact_for(spin).as_array()
        );
    }
    let zero = psi.amplitudes();
    let operator = quad.integrate_matrix(|g| {
        let v = g.apply(zero);
        &v * v.adjoint()
    });
    let d = rep.d();
    let constant = operator.trace().re / d as f64;
    let deviation = linalg::max_abs(&(&operator - CMat::identity(d, d) * C64::new(constant, 0.0)));
    Ok(IdentityCheckResult { operator, constant, deviation, orders: quad.orders, exact })
}

#[derive(Debug, Clone, Serialize)]
pub struct BerryProfile {
    pub theta_grid: Vec<f64>,
    /// `A_φ(θ) = i⟨0|ĝ⁻¹ ∂_φ ĝ|0⟩` at `φ = 0`.
    pub a_phi: Vec<f64>,
    /// Least-squares `c` in `A_φ(θ) = c (cos θ − 1)`.
    pub coefficient: f64,
    /// `max_θ |A_φ(θ) − c (cos θ − 1)|`.
    pub fit_residual: f64,
}

/// Uniform grid of `count` polar angles strictly inside `(cap, π − cap)`.
pub fn default_theta_grid(count: usize, cap: f64) -> Vec<f64> {
    let (lo, hi) = (cap, PI - cap);
    (1..=count).map(|k| lo + (hi - lo) * k as f64 / (count + 1) as f64).collect()
}

/// Berry connection of the north-chart section, by central finite differences
/// in `φ`, fitted to the monopole profile `c (cos θ − 1)`.
pub fn berry_connection(
    rep: &LieAlgebraRep,
    psi_canonical: &FiducialVector,
    theta_grid: &[f64],
    tol: &Tolerances,
) -> Result<BerryProfile> {
    rep.require_su2()?;
    let mu = coherent::moment_map(rep, psi_canonical, tol)?;
    let transverse = mu.0[0].powi(2) + mu.0[1].powi(2);
    if transverse > tol.canonical {
        return Err(Error::CanonicalizationRequired { transverse });
    }
    if theta_grid.is_empty() {
        return Err(Error::InvalidInput("theta grid is empty".into()));
    }
    if let Some(&bad) = theta_grid.iter().find(|&&t| !(t > tol.chart_cap && t < PI - tol.chart_cap)) {
        return Err(Error::InvalidInput(format!(
            "theta {bad} outside ({}, π − {})",
            tol.chart_cap, tol.chart_cap
        )));
    }
    let zero = psi_canonical.amplitudes();
    let h = tol.fd_step;
    let a_phi = theta_grid
        .iter()
        .map(|&theta| {
            let g = dynamics::section_element(rep, theta, 0.0, ChartKind::North)?;
            let plus = dynamics::section_element(rep, theta, h, ChartKind::North)?;
            let minus = dynamics::section_element(rep, theta, -h, ChartKind::North)?;
            let derivative = (plus.matrix() - minus.matrix()) / C64::new(2.0 * h, 0.0);
            let local = g.matrix().adjoint() * derivative;
            let z = linalg::I * linalg::inner(zero, &(local * zero));
            Ok(z.re)
        })
        .collect::<Result<Vec<f64>>>()?;
    let basis: Vec<f64> = theta_grid.iter().map(|t| t.cos() - 1.0).collect();
    let coefficient = a_phi.iter().zip(&basis).map(|(a, x)| a * x).sum::<f64>()
        / basis.iter().map(|x| x * x).sum::<f64>();
    let fit_residual = a_phi
        .iter()
        .zip(&basis)
        .fold(0.0f64, |acc, (a, x)| acc.max((a - coefficient * x).abs()));
    Ok(BerryProfile { theta_grid: theta_grid.to_vec(), a_phi, coefficient, fit_residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiracVerdict {
    pub coefficient: f64,
    /// Nearest integer or half-integer.
    pub nearest_admissible: f64,
    pub gap: f64,
    pub admissible: bool,
}

impl DiracVerdict {
    pub fn from_coefficient(coefficient: f64, tol: &Tolerances) -> Self {
        let nearest_admissible = (2.0 * coefficient).round() / 2.0;
        let gap = (coefficient - nearest_admissible).abs();
        DiracVerdict { coefficient, nearest_admissible, gap, admissible: 2.0 * gap <= 2.0 * tol.dirac }
    }
}

/// Number of polar angles used by [`dirac_check`].
pub const DIRAC_THETA_POINTS: usize = 33;

/// Canonicalizes `psi`, measures the monopole coefficient of its Berry
/// connection and tests it against the half-integer condition.
pub fn dirac_check(
    rep: &LieAlgebraRep,
    psi: &FiducialVector,
    tol: &Tolerances,
) -> Result<(BerryProfile, DiracVerdict)> {
    let canonical = coherent::canonicalize_su2(rep, psi, tol)?;
    let grid = default_theta_grid(DIRAC_THETA_POINTS, tol.chart_cap);
    let profile = berry_connection(rep, &canonical.fiducial, &grid, tol)?;
    let verdict = DiracVerdict::from_coefficient(profile.coefficient, tol);
    Ok((profile, verdict))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMode {
    /// `K_ij = ⟨g_i ψ| exp(−iĤε) |g_j ψ⟩`.
    Exact,
    /// `K_ij = ⟨g_i ψ|g_j ψ⟩ exp(−iε ⟨g_i ψ|Ĥ|g_j ψ⟩ / ⟨g_i ψ|g_j ψ⟩)`.
    FirstOrder,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRecord {
    pub slice_counts: Vec<usize>,
    #[serde(serialize_with = "io::serialize_complex_slice")]
    pub amplitudes: Vec<C64>,
    #[serde(serialize_with = "io::serialize_complex")]
    pub exact_amplitude: C64,
    pub errors: Vec<f64>,
    pub kernel_mode: KernelMode,
}

impl ConvergenceRecord {
    /// Least-squares slope of `log error` against `log N`, negated: the
    /// empirical convergence order in `1/N`.
    pub fn empirical_order(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .slice_counts
            .iter()
            .zip(&self.errors)
            .map(|(&n, &e)| ((n as f64).ln(), e.ln()))
            .collect();
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / m, sy / m);
        let cov: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let var: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        -cov / var
    }
}

/// Upper bound on `N · M²` (slices × squared grid size) for one amplitude.
pub const MAX_PATH_INTEGRAL_COST: f64 = 2e10;
/// Upper bound on the grid size `M`; kernels are stored densely.
pub const MAX_GRID_POINTS: usize = 10_000;

struct Slice {
    start: f64,
    end: f64,
}

/// Boundary data and grid shared by all slice counts.
struct PathIntegralGrid<'a> {
    rep: &'a LieAlgebraRep,
    schedule: &'a HamiltonianSchedule,
    states: Vec<CVec>,
    weights: Vec<f64>,
    initial: CVec,
    final_state: CVec,
    mode: KernelMode,
    cutoff: f64,
    insertion: f64,
}

impl PathIntegralGrid<'_> {
    fn slice_operator(&self, slice: &Slice) -> CMat {
        match self.mode {
            KernelMode::Exact => dynamics::propagator(self.rep, self.schedule, slice.start, slice.end),
            KernelMode::FirstOrder => self.rep.combination(&self.schedule.average_h(slice.start, slice.end)),
        }
    }

    /// The segment containing the whole slice, if there is one.
    fn single_segment(&self, slice: &Slice) -> Option<usize> {
        let a = self.schedule.segment_at(slice.start);
        let bp = self.schedule.breakpoints();
        (slice.end <= bp[a + 1] * (1.0 + 1e-14) + 1e-14).then_some(a)
    }

    fn kernel_entry(&self, bra: &CVec, ket: &CVec, op: &CMat, eps: f64) -> C64 {
        match self.mode {
            KernelMode::Exact => linalg::inner(bra, &(op * ket)),
            KernelMode::FirstOrder => {
                let overlap = linalg::inner(bra, ket);
                if overlap.norm() <= self.cutoff {
                    return linalg::ZERO;
                }
                let energy = linalg::inner(bra, &(op * ket));
                overlap * (-linalg::I * eps * energy / overlap).exp()
            }
        }
    }

    /// Dense `M × M` kernel, assembled row by row in parallel.
    fn kernel(&self, op: &CMat, eps: f64) -> CMat {
        let m = self.states.len();
        let acted: Vec<CVec> = match self.mode {
            KernelMode::Exact => self.states.iter().map(|s| op * s).collect(),
            KernelMode::FirstOrder => Vec::new(),
        };
        let rows = par::map_range(m, |i| {
            (0..m)
                .map(|j| match self.mode {
                    KernelMode::Exact => linalg::inner(&self.states[i], &acted[j]),
                    KernelMode::FirstOrder => self.kernel_entry(&self.states[i], &self.states[j], op, eps),
                })
                .collect::<Vec<C64>>()
        });
        CMat::from_fn(m, m, |i, j| rows[i][j])
    }

    fn amplitude(&self, slices: usize, t_total: f64) -> C64 {
        let eps = t_total / slices as f64;
        let slice = |k: usize| Slice { start: eps * k as f64, end: eps * (k + 1) as f64 };
        let op0 = self.slice_operator(&slice(0));
        if slices == 1 {
            return self.kernel_entry(&self.final_state, &self.initial, &op0, eps);
        }
        let m = self.states.len();
        let mut v = CVec::from_iterator(
            m,
            (0..m).map(|i| self.kernel_entry(&self.states[i], &self.initial, &op0, eps)),
        );
        let weighted = |v: &CVec| {
            CVec::from_iterator(m, v.iter().zip(&self.weights).map(|(x, w)| x * (w * self.insertion)))
        };
        // Kernels depend only on the slice operator; slices inside one segment share it.
        let mut cache: Option<(Option<usize>, CMat)> = None;
        for k in 1..slices - 1 {
            let s = slice(k);
            let seg = self.single_segment(&s);
            let reuse = seg.is_some() && matches!(&cache, Some((key, _)) if *key == seg);
            if !reuse {
                let op = self.slice_operator(&s);
                cache = Some((seg, self.kernel(&op, eps)));
            }
            v = &cache.as_ref().unwrap().1 * weighted(&v);
        }
        let last = self.slice_operator(&slice(slices - 1));
        let row = CVec::from_iterator(
            m,
            (0..m).map(|j| self.kernel_entry(&self.final_state, &self.states[j], &last, eps)),
        );
        row.dot(&weighted(&v))
    }
}

/// Discrete-time coherent-state path integral
/// `A_N = ⟨g_f ψ| (K W)^{N−1} K |g_i ψ⟩ · d^{N−1}` for each `N` in `slice_counts`,
/// over `[0, t_total]`, compared with the exact amplitude.
#[allow(clippy::too_many_arguments)]
pub fn discrete_propagator(
    rep: &LieAlgebraRep,
    psi: &FiducialVector,
    schedule: &HamiltonianSchedule,
    t_total: f64,
    g_initial: &GroupElement,
    g_final: &GroupElement,
    slice_counts: &[usize],
    quad: &HaarQuadrature,
    mode: KernelMode,
    tol: &Tolerances,
) -> Result<ConvergenceRecord> {
    let spin = rep.require_spin()?;
    if schedule.n() != rep.n() {
        return Err(Error::Dimension("schedule does not match the algebra".into()));
    }
    if !quad.is_exact() || quad.spin != spin {
        return Err(Error::QuadratureUnderresolved {
            orders: quad.orders.as_array(),
            required: QuadratureOrders::exact_for(spin).as_array(),
        });
    }
    if slice_counts.is_empty() || slice_counts.contains(&0) {
        return Err(Error::InvalidInput("slice counts must be at least 1".into()));
    }
    let schedule = schedule.truncated(t_total)?;
    let m = quad.len();
    if m > MAX_GRID_POINTS {
        return Err(Error::CostLimit { what: "grid points", cost: m as f64, limit: MAX_GRID_POINTS as f64 });
    }
    for &n in slice_counts {
        let cost = n as f64 * (m as f64).powi(2);
        if cost > MAX_PATH_INTEGRAL_COST {
            return Err(Error::CostLimit { what: "N * M^2", cost, limit: MAX_PATH_INTEGRAL_COST });
        }
    }
    let zero = psi.amplitudes();
    let grid = PathIntegralGrid {
        rep,
        schedule: &schedule,
        states: par::map_slice(&quad.nodes, |g| g.apply(zero)),
        weights: quad.weights.clone(),
        initial: g_initial.apply(zero),
        final_state: g_final.apply(zero),
        mode,
        cutoff: tol.overlap_cutoff,
        // 1/c with c = 1/d from the identity resolution.
        insertion: rep.d() as f64,
    };
    let exact_amplitude = {
        let u = dynamics::propagator(rep, &schedule, schedule.start(), t_total);
        linalg::inner(&grid.final_state, &(u * &grid.initial))
    };
    let amplitudes: Vec<C64> = slice_counts.iter().map(|&n| grid.amplitude(n, t_total)).collect();
    let errors = amplitudes.iter().map(|a| (a - exact_amplitude).norm()).collect();
    Ok(ConvergenceRecord {
        slice_counts: slice_counts.to_vec(),
        amplitudes,
        exact_amplitude,
        errors,
        kernel_mode: mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::build_spin_rep;
    use crate::quadrature::haar_quadrature;

    fn spin(s: &str) -> LieAlgebraRep {
        build_spin_rep(s.parse().unwrap())
    }

    #[test]
    fn dirac_rounding() {
        let tol = Tolerances::default();
        let v = DiracVerdict::from_coefficient(1.0 / 3.0, &tol);
        assert_eq!(v.nearest_admissible, 0.5);
        assert!(!v.admissible);
        let v = DiracVerdict::from_coefficient(1.5 + 5e-9, &tol);
        assert!(v.admissible);
        let v = DiracVerdict::from_coefficient(1.0 + 3e-8, &tol);
        assert!(!v.admissible);
    }

    #[test]
    fn berry_needs_canonical_state() {
        let rep = spin("1");
        let tol = Tolerances::default();
        let psi = FiducialVector::matsumoto(&rep).unwrap();
        let g = crate::lie::exp_element(&rep, &[0.2, 0.0, 0.0]).unwrap();
        let tilted = FiducialVector::new(&rep, g.apply(psi.amplitudes()), &tol).unwrap();
        let grid = default_theta_grid(5, tol.chart_cap);
        assert!(matches!(
            berry_connection(&rep, &tilted, &grid, &tol),
            Err(Error::CanonicalizationRequired { .. })
        ));
        assert!(berry_connection(&rep, &psi, &[0.0], &tol).is_err());
    }

    #[test]
    fn underresolved_quadrature_is_a_hard_error_for_path_integrals() {
        let rep = spin("1");
        let tol = Tolerances::default();
        let psi = FiducialVector::highest_weight(&rep).unwrap();
        let quad = haar_quadrature(&rep, QuadratureOrders::new(2, 3, 3)).unwrap();
        let sched = HamiltonianSchedule::constant(vec![0.0, 0.0, 1.0], 1.0).unwrap();
        let id = GroupElement::identity(&rep);
        let err = discrete_propagator(&rep, &psi, &sched, 1.0, &id, &id, &[1], &quad, KernelMode::Exact, &tol);
        assert!(matches!(err, Err(Error::QuadratureUnderresolved { .. })));
        // identity_resolution only warns.
        let res = identity_resolution(&rep, &psi, &quad).unwrap();
        assert!(!res.exact);
    }

    #[test]
    fn theta_grid_avoids_caps() {
        let g = default_theta_grid(10, 1e-3);
        assert_eq!(g.len(), 10);
        assert!(g.iter().all(|&t| t > 1e-3 && t < PI - 1e-3));
    }
}
