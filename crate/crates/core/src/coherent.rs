//! Coherent-state families built on a fiducial vector: the moment functional
//! `μ_a = ⟨0|T_a|0⟩`, the two isotropy subalgebras and the informative test.
//!
//! Isotropy is decided at the Lie-algebra level. `Lie(H_|0⟩)` is the set of
//! directions `v` for which `|0⟩` is an eigenvector of `v·T`; `Lie(H_0)` is the
//! set of directions whose co-adjoint action fixes `μ`. The first is always a
//! subalgebra of the second; a fiducial is informative when they coincide.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{self, GroupElement, LieAlgebraRep};
use crate::linalg::{self, AmbiguousRank, CVec, C64};
use crate::tolerance::Tolerances;

/// A unit vector `|0⟩` of the representation space.
#[derive(Debug, Clone, PartialEq)]
pub struct FiducialVector {
    amplitudes: CVec,
    rep_label: String,
}

impl FiducialVector {
    /// Accepts amplitudes whose norm is within `tol.normalization` of one and
    /// rescales them to unit norm.
    pub fn new(rep: &LieAlgebraRep, amplitudes: CVec, tol: &Tolerances) -> Result<Self> {
        let (fid, deviation) = Self::renormalized(rep, amplitudes)?;
        if deviation > tol.normalization {
            return Err(Error::Normalization { norm: 1.0 + deviation });
        }
        Ok(fid)
    }

    /// Normalizes arbitrary non-zero amplitudes; also returns `|‖ψ‖ − 1|` of
    /// the input so callers can warn about large corrections.
    pub fn renormalized(rep: &LieAlgebraRep, amplitudes: CVec) -> Result<(Self, f64)> {
        if amplitudes.len() != rep.d() {
            return Err(Error::Dimension(format!(
                "fiducial has {} amplitudes, representation has d = {}",
                amplitudes.len(),
                rep.d()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("fiducial amplitudes must be finite".into()));
        }
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::Normalization { norm });
        }
        let fid = FiducialVector {
            amplitudes: amplitudes.unscale(norm),
            rep_label: rep.label().to_string(),
        };
        Ok((fid, (norm - 1.0).abs()))
    }

    /// `|m = j⟩` of a spin representation.
    pub fn highest_weight(rep: &LieAlgebraRep) -> Result<Self> {
        rep.require_spin()?;
        let mut amps = CVec::zeros(rep.d());
        amps[0] = linalg::ONE;
        Ok(FiducialVector { amplitudes: amps, rep_label: rep.label().to_string() })
    }

    /// `√(2/3)|1,1⟩ + √(1/3)|1,−1⟩` in spin 1.
    pub fn matsumoto(rep: &LieAlgebraRep) -> Result<Self> {
        let spin = rep.require_spin()?;
        if spin.twice() != 2 {
            return Err(Error::InvalidInput(format!(
                "the Matsumoto preset lives in spin 1, not spin {spin}"
            )));
        }
        let amps = CVec::from_vec(vec![
            C64::new((2.0f64 / 3.0).sqrt(), 0.0),
            linalg::ZERO,
            C64::new((1.0f64 / 3.0).sqrt(), 0.0),
        ]);
        Ok(FiducialVector { amplitudes: amps, rep_label: rep.label().to_string() })
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn rep_label(&self) -> &str {
        &self.rep_label
    }

    /// Multiplies by a global phase `e^{iχ}`.
    pub fn with_phase(&self, chi: f64) -> Self {
        FiducialVector {
            amplitudes: &self.amplitudes * C64::from_polar(1.0, chi),
            rep_label: self.rep_label.clone(),
        }
    }
}

/// The moment functional as coefficients `μ_a = ⟨0|T_a|0⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MomentVector(pub Vec<f64>);

impl MomentVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Norm in the trace metric `μᵀ G⁻¹ μ`, invariant under the co-adjoint
    /// action for any generator basis.
    pub fn invariant_norm(&self, rep: &LieAlgebraRep) -> f64 {
        let mu = DVector::from_column_slice(&self.0);
        let solved = rep
            .gram()
            .clone()
            .cholesky()
            .expect("Gram matrix is positive definite")
            .solve(&mu);
        mu.dot(&solved).sqrt()
    }
}

/// `μ_a = Re⟨ψ|T_a|ψ⟩` for any unit state.
pub fn moment_of_state(rep: &LieAlgebraRep, psi: &CVec, tol: &Tolerances) -> Result<MomentVector> {
    if psi.len() != rep.d() {
        return Err(Error::Dimension(format!("state has {} components, d = {}", psi.len(), rep.d())));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > tol.normalization {
        return Err(Error::Normalization { norm });
    }
    let (mu, residue) = rep.expectations(psi);
    let scale = mu.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    if residue > tol.imaginary_residue * scale {
        return Err(Error::InvalidInput(format!(
            "expectation value has imaginary residue {residue:.3e}; generators are not Hermitian"
        )));
    }
    Ok(MomentVector(mu))
}

pub fn moment_map(rep: &LieAlgebraRep, psi: &FiducialVector, tol: &Tolerances) -> Result<MomentVector> {
    moment_of_state(rep, psi.amplitudes(), tol)
}

/// An isotropy subalgebra as an orthonormal set of coefficient vectors.
#[derive(Debug, Clone, Serialize)]
pub struct IsotropySubalgebra {
    pub basis: Vec<Vec<f64>>,
    pub dim: usize,
    /// Spectrum of the defining linear map, for diagnostics.
    pub singular_values: Vec<f64>,
}

impl IsotropySubalgebra {
    fn from_null_space(ns: linalg::NullSpace) -> Self {
        let basis: Vec<Vec<f64>> = ns.basis.iter().map(|v| v.iter().copied().collect()).collect();
        IsotropySubalgebra { dim: basis.len(), basis, singular_values: ns.singular_values }
    }

    /// Euclidean distance from `v` to the span of the basis.
    pub fn distance_to_span(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        let mut r = v.clone();
        for b in &self.basis {
            let b = DVector::from_column_slice(b);
            r -= &b * b.dot(&v);
        }
        r.norm()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IsotropyReport {
    /// `Lie(H_|0⟩)`.
    pub subalg_state: IsotropySubalgebra,
    /// `Lie(H_0)`.
    pub subalg_moment: IsotropySubalgebra,
    pub containment_ok: bool,
    pub informative: bool,
    pub mu: MomentVector,
}

fn ambiguous(op: &'static str) -> impl Fn(AmbiguousRank) -> Error {
    move |e| Error::RankAmbiguous { op, singular_value: e.singular_value, threshold: e.threshold }
}

/// Null space of `v ↦ (I − |ψ⟩⟨ψ|)(v·T)|ψ⟩`, realified to a `2d × n` matrix.
pub fn isotropy_state(
    rep: &LieAlgebraRep,
    psi: &FiducialVector,
    tol: &Tolerances,
) -> Result<IsotropySubalgebra> {
    let psi = psi.amplitudes();
    let d = rep.d();
    let mut a = DMatrix::<f64>::zeros(2 * d, rep.n());
    for (col, t) in rep.generators().iter().enumerate() {
        let t_psi = t * psi;
        let expect = linalg::inner(psi, &t_psi);
        let orth = t_psi - psi * expect;
        a.set_column(col, &linalg::realify(&orth));
    }
    let ns = linalg::null_space(&a, tol.rank_relative, tol.rank_guard)
        .map_err(ambiguous("isotropy_state"))?;
    Ok(IsotropySubalgebra::from_null_space(ns))
}

/// The matrix `M_ba = f_abc μ_c` whose kernel is `Lie(H_0)`.
pub fn moment_stabilizer_matrix(rep: &LieAlgebraRep, mu: &MomentVector) -> DMatrix<f64> {
    let n = rep.n();
    DMatrix::from_fn(n, n, |b, a| (0..n).map(|c| rep.f(a, b, c) * mu.0[c]).sum())
}

pub fn isotropy_moment(
    rep: &LieAlgebraRep,
    psi: &FiducialVector,
    tol: &Tolerances,
) -> Result<IsotropySubalgebra> {
    let mu = moment_map(rep, psi, tol)?;
    let m = moment_stabilizer_matrix(rep, &mu);
    let ns = linalg::null_space(&m, tol.rank_relative, tol.rank_guard)
        .map_err(ambiguous("isotropy_moment"))?;
    Ok(IsotropySubalgebra::from_null_space(ns))
}

/// Runs both isotropy computations and decides whether `psi` is informative.
pub fn classify_informative(
    rep: &LieAlgebraRep,
    psi: &FiducialVector,
    tol: &Tolerances,
) -> Result<IsotropyReport> {
    let mu = moment_map(rep, psi, tol)?;
    let subalg_state = isotropy_state(rep, psi, tol)?;
    let subalg_moment = isotropy_moment(rep, psi, tol)?;
    for v in &subalg_state.basis {
        let distance = subalg_moment.distance_to_span(v);
        if distance > tol.containment {
            return Err(Error::ContainmentViolation { distance });
        }
    }
    let informative = subalg_state.dim == subalg_moment.dim;
    Ok(IsotropyReport { subalg_state, subalg_moment, containment_ok: true, informative, mu })
}

/// `|g⟩ = g|0⟩`.
pub fn coherent_state(psi: &FiducialVector, g: &GroupElement) -> CVec {
    g.apply(psi.amplitudes())
}

/// A fiducial rotated so that its moment points along `+3`.
#[derive(Debug, Clone)]
pub struct Canonicalized {
    pub fiducial: FiducialVector,
    /// The rotation applied: `canonical = rotation · original`.
    pub rotation: GroupElement,
    pub mu: MomentVector,
}

/// Rotates an su(2) fiducial by the geodesic rotation (about `μ̂ × ê₃`) that
/// brings its moment to the `+3` axis.
pub fn canonicalize_su2(
    rep: &LieAlgebraRep,
    psi: &FiducialVector,
    tol: &Tolerances,
) -> Result<Canonicalized> {
    rep.require_su2()?;
    let mu = moment_map(rep, psi, tol)?;
    let norm = mu.norm();
    if norm <= tol.degenerate_orbit {
        return Err(Error::DegenerateOrbit { op: "canonicalize", norm });
    }
    let [m1, m2, m3] = [mu.0[0] / norm, mu.0[1] / norm, mu.0[2] / norm];
    // μ̂ × ê₃ = (m2, −m1, 0). exp(−iθ n·J) rotates moments by +θ about n.
    let transverse = m1.hypot(m2);
    let angle = m3.clamp(-1.0, 1.0).acos();
    let theta = if transverse > 0.0 {
        [angle * m2 / transverse, -angle * m1 / transverse, 0.0]
    } else if m3 < 0.0 {
        [std::f64::consts::PI, 0.0, 0.0]
    } else {
        [0.0, 0.0, 0.0]
    };
    let rotation = lie::exp_element(rep, &theta)?;
    let fiducial = FiducialVector {
        amplitudes: rotation.apply(psi.amplitudes()),
        rep_label: psi.rep_label.clone(),
    };
    let mu = moment_map(rep, &fiducial, tol)?;
    Ok(Canonicalized { fiducial, rotation, mu })
}

/// True when `μ_1² + μ_2²` is within the canonical tolerance.
pub fn is_canonical(mu: &MomentVector, tol: &Tolerances) -> bool {
    mu.0.len() == 3 && mu.0[0].powi(2) + mu.0[1].powi(2) <= tol.canonical && mu.0[2] >= 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_spin_rep, exp_element};
    use std::f64::consts::PI;

    fn spin(s: &str) -> LieAlgebraRep {
        build_spin_rep(s.parse().unwrap())
    }

    fn basis_state(rep: &LieAlgebraRep, i: usize) -> FiducialVector {
        let mut v = CVec::zeros(rep.d());
        v[i] = linalg::ONE;
        FiducialVector::new(rep, v, &Tolerances::default()).unwrap()
    }

    #[test]
    fn matsumoto_moment() {
        let rep = spin("1");
        let tol = Tolerances::default();
        let mu = moment_map(&rep, &FiducialVector::matsumoto(&rep).unwrap(), &tol).unwrap();
        assert!(mu.0[0].abs() < 1e-12 && mu.0[1].abs() < 1e-12);
        assert!((mu.0[2] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn highest_and_middle_weight_moments() {
        let tol = Tolerances::default();
        for s in ["1/2", "1", "3/2", "2"] {
            let rep = spin(s);
            let mu = moment_map(&rep, &FiducialVector::highest_weight(&rep).unwrap(), &tol).unwrap();
            assert!((mu.0[2] - rep.spin().unwrap().value()).abs() < 1e-14);
        }
        let rep = spin("1");
        let mu = moment_map(&rep, &basis_state(&rep, 1), &tol).unwrap();
        assert!(mu.norm() < 1e-15);
    }

    #[test]
    fn normalization_is_enforced() {
        let rep = spin("1/2");
        let tol = Tolerances::default();
        let v = CVec::from_vec(vec![C64::new(1.0 + 1e-6, 0.0), linalg::ZERO]);
        assert!(matches!(FiducialVector::new(&rep, v.clone(), &tol), Err(Error::Normalization { .. })));
        let (fid, dev) = FiducialVector::renormalized(&rep, v).unwrap();
        assert!((dev - 1e-6).abs() < 1e-12);
        assert!((fid.amplitudes().norm() - 1.0).abs() < 1e-15);
        let unnormalized = CVec::from_vec(vec![C64::new(2.0, 0.0), linalg::ZERO]);
        assert!(matches!(
            moment_of_state(&rep, &unnormalized, &tol),
            Err(Error::Normalization { .. })
        ));
    }

    #[test]
    fn matsumoto_is_not_informative() {
        let rep = spin("1");
        let report =
            classify_informative(&rep, &FiducialVector::matsumoto(&rep).unwrap(), &Tolerances::default())
                .unwrap();
        assert_eq!(report.subalg_state.dim, 0);
        assert_eq!(report.subalg_moment.dim, 1);
        assert!(!report.informative);
        let axis = &report.subalg_moment.basis[0];
        assert!(axis[0].abs() < 1e-12 && axis[1].abs() < 1e-12 && (axis[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn highest_weight_is_informative() {
        for s in ["1/2", "1", "3/2"] {
            let rep = spin(s);
            let report = classify_informative(
                &rep,
                &FiducialVector::highest_weight(&rep).unwrap(),
                &Tolerances::default(),
            )
            .unwrap();
            assert_eq!((report.subalg_state.dim, report.subalg_moment.dim), (1, 1), "spin {s}");
            assert!(report.informative);
            assert!((report.subalg_state.basis[0][2] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weight_spin_one() {
        let rep = spin("1");
        let report = classify_informative(&rep, &basis_state(&rep, 1), &Tolerances::default()).unwrap();
        assert_eq!((report.subalg_state.dim, report.subalg_moment.dim), (1, 3));
        assert!(!report.informative);
    }

    #[test]
    fn coherent_state_phase_convention() {
        // exp(−iθJ3) multiplies |1,m⟩ by e^{−imθ}; the rotation written e^{iθJ3}
        // elsewhere corresponds to −θ here.
        let rep = spin("1");
        let psi = FiducialVector::matsumoto(&rep).unwrap();
        let theta = 0.7;
        let g = exp_element(&rep, &[0.0, 0.0, theta]).unwrap();
        let out = coherent_state(&psi, &g);
        let expected = [
            C64::from_polar((2.0f64 / 3.0).sqrt(), -theta),
            linalg::ZERO,
            C64::from_polar((1.0f64 / 3.0).sqrt(), theta),
        ];
        for (a, b) in out.iter().zip(expected) {
            assert!((a - b).norm() < 1e-14);
        }
        let id = GroupElement::identity(&rep);
        assert_eq!(coherent_state(&psi, &id), *psi.amplitudes());
    }

    #[test]
    fn canonicalization_moves_moment_to_north_pole() {
        let rep = spin("1");
        let tol = Tolerances::default();
        let psi = FiducialVector::matsumoto(&rep).unwrap();
        for theta in [[0.4, -1.1, 0.3], [PI, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 2.0, 0.0]] {
            let tilted = FiducialVector::new(
                &rep,
                exp_element(&rep, &theta).unwrap().apply(psi.amplitudes()),
                &tol,
            )
            .unwrap();
            let c = canonicalize_su2(&rep, &tilted, &tol).unwrap();
            assert!(is_canonical(&c.mu, &tol), "{:?}", c.mu);
            assert!((c.mu.0[2] - 1.0 / 3.0).abs() < 1e-12);
        }
        let rep = spin("1");
        assert!(matches!(
            canonicalize_su2(&rep, &basis_state(&rep, 1), &tol),
            Err(Error::DegenerateOrbit { .. })
        ));
    }
}
