//! Numerical thresholds shared by every operation.

use serde::{Deserialize, Serialize};

/// Central tolerance record. Defaults are the contract values; the CLI lets a
/// run override individual fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Max-abs deviation of a generator from Hermitian.
    pub hermiticity: f64,
    /// Projection residual above which a commutator is declared outside the span.
    pub closure: f64,
    /// Jacobi identity on the structure constants.
    pub jacobi: f64,
    /// Residual allowed when re-expressing a conjugated generator in the basis.
    pub projection: f64,
    /// ‖g†g − I‖_max.
    pub unitarity: f64,
    /// Accepted |‖ψ‖ − 1| before a state is rejected.
    pub normalization: f64,
    /// Imaginary residue allowed on an expectation value of a Hermitian generator.
    pub imaginary_residue: f64,
    /// Rank threshold relative to the largest singular value.
    pub rank_relative: f64,
    /// Singular values within this factor of the threshold are ambiguous.
    pub rank_guard: f64,
    /// Distance allowed between a state-isotropy vector and the moment-isotropy span.
    pub containment: f64,
    /// Moment norm below which the co-adjoint orbit is a point.
    pub degenerate_orbit: f64,
    /// Half-angle of the polar cap excluded from each section chart (rad).
    pub chart_cap: f64,
    /// Largest allowed jump of section parameters between grid points (rad).
    pub max_section_jump: f64,
    /// Imaginary residue of a Berry increment, per unit time step.
    pub berry_residue: f64,
    /// μ1² + μ2² above which a state is not canonical.
    pub canonical: f64,
    /// Central finite-difference step for the Berry connection.
    pub fd_step: f64,
    /// Half-integer gap tolerance for the Dirac condition.
    pub dirac: f64,
    /// Coherent-state overlaps at or below this are treated as zero in the
    /// first-order path-integral kernel.
    pub overlap_cutoff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-12,
            closure: 1e-8,
            jacobi: 1e-10,
            projection: 1e-10,
            unitarity: 1e-10,
            normalization: 1e-8,
            imaginary_residue: 1e-12,
            rank_relative: 1e-9,
            rank_guard: 10.0,
            containment: 1e-8,
            degenerate_orbit: 1e-12,
            chart_cap: 1e-3,
            max_section_jump: 0.5,
            berry_residue: 1e-8,
            canonical: 1e-16,
            fd_step: 1e-6,
            dirac: 1e-8,
            overlap_cutoff: 1e-14,
        }
    }
}
