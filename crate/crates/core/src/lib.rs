//! Generalized (Perelomov) coherent states over compact Lie groups.
//!
//! The crate builds unitary representations of a Lie algebra, decides whether
//! a fiducial vector is *informative* (its state isotropy equals the isotropy
//! of its moment functional), and checks trajectory by trajectory whether the
//! quantum evolution of a coherent state equals the classically evolved state
//! times `e^{iS}`, `S` the classical action. It also evaluates discrete-time
//! coherent-state path integrals on Haar quadrature grids.
//!
//! Conventions: `ħ = 1`, Hermitian generators with `[T_a, T_b] = i f_abc T_c`,
//! group elements `exp(−i θ·T)`, su(2) bases ordered `m = j, …, −j`.

pub mod coherent;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod lie;
pub mod linalg;
pub mod par;
pub mod pathint;
pub mod quadrature;
pub mod schedule;
pub mod spin;
pub mod tolerance;

pub use coherent::{
    canonicalize_su2, classify_informative, coherent_state, isotropy_moment, isotropy_state,
    moment_map, FiducialVector, IsotropyReport, IsotropySubalgebra, MomentVector,
};
pub use dynamics::{
    action_along_path, flow_coadjoint, propagate_quantum, section_su2, van_hove_check,
    SectionChart, TrajectoryRecord, VanHoveSetup,
};
pub use error::{Error, Result};
pub use lie::{build_spin_rep, conjugate_generator, exp_element, validate_algebra, GroupElement, LieAlgebraRep};
pub use pathint::{
    berry_connection, dirac_check, discrete_propagator, identity_resolution, BerryProfile,
    ConvergenceRecord, DiracVerdict, IdentityCheckResult, KernelMode,
};
pub use quadrature::{haar_quadrature, HaarQuadrature, QuadratureOrders};
pub use schedule::HamiltonianSchedule;
pub use spin::Spin;
pub use tolerance::Tolerances;
