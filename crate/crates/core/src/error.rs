use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the toolkit can report.
///
/// Variants fall into two families: bad inputs (malformed matrices, wrong
/// dimensions, unparseable files) and domain outcomes, where the numerics
/// ran but the mathematical object requested does not exist or cannot be
/// decided (a point-like orbit, a path leaving its chart, an ambiguous rank).
/// [`Error::is_domain`] separates the two.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin {0}: must be a positive integer or half-integer")]
    InvalidSpin(String),

    #[error("HERMITICITY_FAILURE: generator {index} deviates from Hermitian by {deviation:.3e}")]
    HermiticityFailure { index: usize, deviation: f64 },

    #[error("CLOSURE_FAILURE: [T_{a}, T_{b}] leaves the generator span (residual {residual:.3e})")]
    ClosureFailure { a: usize, b: usize, residual: f64 },

    #[error("JACOBI_FAILURE: structure constants violate the Jacobi identity by {deviation:.3e}")]
    JacobiFailure { deviation: f64 },

    #[error("generators are linearly dependent (Gram matrix is singular)")]
    DependentGenerators,

    #[error("PROJECTION_RESIDUAL: conjugated generator leaves the algebra (residual {residual:.3e})")]
    ProjectionResidual { residual: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("NORMALIZATION: state norm is {norm}, expected 1")]
    Normalization { norm: f64 },

    #[error("{op}: RANK_AMBIGUOUS: singular value {singular_value:.3e} lies within the guard band of threshold {threshold:.3e}")]
    RankAmbiguous {
        op: &'static str,
        singular_value: f64,
        threshold: f64,
    },

    #[error("CONTAINMENT_VIOLATION: state-isotropy direction leaves the moment isotropy (distance {distance:.3e})")]
    ContainmentViolation { distance: f64 },

    #[error("{op}: DEGENERATE_ORBIT: moment vector has norm {norm:.3e}")]
    DegenerateOrbit { op: &'static str, norm: f64 },

    #[error("CHART_EXIT: polar angle {theta} entered the excluded cap of the {chart} chart at t = {time}")]
    ChartExit { chart: &'static str, theta: f64, time: f64 },

    #[error("NONSMOOTH_PATH: section parameters jump by {jump:.3} rad between t = {t0} and t = {t1}")]
    NonsmoothPath { jump: f64, t0: f64, t1: f64 },

    #[error("BERRY_RESIDUE: Berry increment has imaginary residue {residue:.3e} at t = {time}")]
    BerryResidue { residue: f64, time: f64 },

    #[error("CANONICALIZATION_REQUIRED: transverse moment mu1^2 + mu2^2 = {transverse:.3e}")]
    CanonicalizationRequired { transverse: f64 },

    #[error("QUADRATURE_UNDERRESOLVED: orders {orders:?} below the exactness threshold {required:?}")]
    QuadratureUnderresolved { orders: [usize; 3], required: [usize; 3] },

    #[error("COST_LIMIT: {what} = {cost:.3e} exceeds the limit {limit:.3e}")]
    CostLimit { what: &'static str, cost: f64, limit: f64 },

    #[error("representation '{0}' is not an su(2) spin representation")]
    NotSu2(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    /// True for outcomes of a well-posed computation (as opposed to bad input).
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::RankAmbiguous { .. }
                | Error::ContainmentViolation { .. }
                | Error::DegenerateOrbit { .. }
                | Error::ChartExit { .. }
                | Error::NonsmoothPath { .. }
                | Error::BerryResidue { .. }
                | Error::ProjectionResidual { .. }
        )
    }
}
