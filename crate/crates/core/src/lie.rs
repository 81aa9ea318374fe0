//! Unitary representations of compact Lie algebras.
//!
//! Conventions: generators `T_a` are Hermitian, `[T_a, T_b] = i f_abc T_c`,
//! and a group element with coordinates `θ` is `exp(−i θ_a T_a)`. Every sign
//! elsewhere in the crate follows from these three choices.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64, I, ONE, ZERO};
use crate::spin::Spin;
use crate::tolerance::Tolerances;

/// Real structure constants `f[a][b][c]`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    n: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn zeros(n: usize) -> Self {
        StructureConstants { n, data: vec![0.0; n * n * n] }
    }

    /// Totally antisymmetric ε_abc (su(2) in the J_1, J_2, J_3 basis).
    pub fn levi_civita() -> Self {
        let mut f = Self::zeros(3);
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            f.set_antisymmetric(a, b, c, 1.0);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }

    /// Sets `f_abc = value` and mirrors `f_bac = −value`.
    pub fn set_antisymmetric(&mut self, a: usize, b: usize, c: usize, value: f64) {
        let n = self.n;
        self.data[(a * n + b) * n + c] = value;
        self.data[(b * n + a) * n + c] = -value;
    }

    /// max over (a,b,c,e) of |Σ_d f_abd f_dce + f_bcd f_dae + f_cad f_dbe|.
    pub fn jacobi_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for e in 0..n {
                        let s: f64 = (0..n)
                            .map(|d| {
                                self.get(a, b, d) * self.get(d, c, e)
                                    + self.get(b, c, d) * self.get(d, a, e)
                                    + self.get(c, a, d) * self.get(d, b, e)
                            })
                            .sum();
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &StructureConstants) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
    }
}

/// Generators of a unitary irrep together with their structure constants.
#[derive(Debug, Clone)]
pub struct LieAlgebraRep {
    label: String,
    dim: usize,
    generators: Vec<CMat>,
    structure_constants: StructureConstants,
    gram: DMatrix<f64>,
    gram_chol: Cholesky<f64, Dyn>,
    spin: Option<Spin>,
}

impl LieAlgebraRep {
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Dimension `n` of the Lie algebra.
    pub fn n(&self) -> usize {
        self.generators.len()
    }

    /// Dimension `d` of the representation space.
    pub fn d(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn generator(&self, a: usize) -> &CMat {
        &self.generators[a]
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.structure_constants
    }

    pub fn f(&self, a: usize, b: usize, c: usize) -> f64 {
        self.structure_constants.get(a, b, c)
    }

    /// Trace Gram matrix `G_ab = tr(T_a† T_b)`.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `Some(j)` when built by [`build_spin_rep`].
    pub fn spin(&self) -> Option<Spin> {
        self.spin
    }

    /// Spin of an su(2) representation, or an error naming the rep.
    pub fn require_spin(&self) -> Result<Spin> {
        self.spin.ok_or_else(|| Error::NotSu2(self.label.clone()))
    }

    /// True when the algebra is su(2) in the (J_1, J_2, J_3) basis.
    pub fn is_su2(&self) -> bool {
        self.n() == 3
            && self
                .structure_constants
                .max_abs_diff(&StructureConstants::levi_civita())
                < 1e-10
    }

    pub fn require_su2(&self) -> Result<()> {
        if self.is_su2() {
            Ok(())
        } else {
            Err(Error::NotSu2(self.label.clone()))
        }
    }

    /// `Σ_a v_a T_a`.
    pub fn combination(&self, v: &[f64]) -> CMat {
        assert_eq!(v.len(), self.n(), "coefficient vector has wrong length");
        let mut m = CMat::zeros(self.dim, self.dim);
        for (t, &c) in self.generators.iter().zip(v) {
            if c != 0.0 {
                m += t * C64::new(c, 0.0);
            }
        }
        m
    }

    /// Expresses a Hermitian matrix in the generator basis by trace-inner-product
    /// projection. Returns the coefficients and the max-abs residual
    /// `‖X − Σ x_c T_c‖_max`.
    pub fn project(&self, x: &CMat) -> (Vec<f64>, f64) {
        let rhs = DVector::from_iterator(
            self.n(),
            self.generators.iter().map(|t| t.adjoint().component_mul(&x.transpose()).sum().re),
        );
        // tr(T† X) = Σ_ij conj(T_ji) X_ji; computed above as Σ (T†)_ij (Xᵀ)_ij.
        let coeffs = self.gram_chol.solve(&rhs);
        let coeffs: Vec<f64> = coeffs.iter().copied().collect();
        let residual = linalg::max_abs(&(x - self.combination(&coeffs)));
        (coeffs, residual)
    }

    /// Expectation values `Re⟨ψ|T_a|ψ⟩` and the largest imaginary residue.
    pub fn expectations(&self, psi: &CVec) -> (Vec<f64>, f64) {
        let mut residue = 0.0f64;
        let mu = self
            .generators
            .iter()
            .map(|t| {
                let z = linalg::inner(psi, &(t * psi));
                residue = residue.max(z.im.abs());
                z.re
            })
            .collect();
        (mu, residue)
    }
}

/// A group element realized as a unitary matrix in one representation.
#[derive(Debug, Clone)]
pub struct GroupElement {
    matrix: CMat,
    rep_label: String,
}

impl GroupElement {
    /// Wraps a matrix after checking unitarity.
    pub fn new(matrix: CMat, rep: &LieAlgebraRep, tol: &Tolerances) -> Result<Self> {
        if matrix.nrows() != rep.d() || matrix.ncols() != rep.d() {
            return Err(Error::Dimension(format!(
                "group element is {}x{}, representation has d = {}",
                matrix.nrows(),
                matrix.ncols(),
                rep.d()
            )));
        }
        let deviation = linalg::unitarity_defect(&matrix);
        if deviation > tol.unitarity {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(GroupElement { matrix, rep_label: rep.label().to_string() })
    }

    pub(crate) fn from_unitary(matrix: CMat, rep_label: &str) -> Self {
        GroupElement { matrix, rep_label: rep_label.to_string() }
    }

    pub fn identity(rep: &LieAlgebraRep) -> Self {
        Self::from_unitary(CMat::identity(rep.d(), rep.d()), rep.label())
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn rep_label(&self) -> &str {
        &self.rep_label
    }

    pub fn inverse(&self) -> Self {
        Self::from_unitary(self.matrix.adjoint(), &self.rep_label)
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &GroupElement) -> Self {
        Self::from_unitary(&self.matrix * &other.matrix, &self.rep_label)
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        &self.matrix * v
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.matrix)
    }
}

/// Spin-`j` irrep of su(2): basis `m = j, …, −j`, generators `(J_1, J_2, J_3)`.
pub fn build_spin_rep(j: Spin) -> LieAlgebraRep {
    let d = j.dim();
    let jv = j.value();
    let mut j3 = CMat::zeros(d, d);
    let mut jplus = CMat::zeros(d, d);
    for i in 0..d {
        let m = j.weight(i);
        j3[(i, i)] = C64::new(m, 0.0);
        if i > 0 {
            // ⟨m+1| J_+ |m⟩ sits at row i−1 (weight m+1), column i (weight m).
            jplus[(i - 1, i)] = C64::new((jv * (jv + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let jminus = jplus.adjoint();
    let j1 = (&jplus + &jminus) * C64::new(0.5, 0.0);
    let j2 = (&jplus - &jminus) * (ONE / (I * 2.0));
    let generators = vec![j1, j2, j3];
    let gram = gram_matrix(&generators);
    let gram_chol = Cholesky::new(gram.clone()).expect("spin generators are independent");
    LieAlgebraRep {
        label: format!("su2-spin-{j}"),
        dim: d,
        generators,
        structure_constants: StructureConstants::levi_civita(),
        gram,
        gram_chol,
        spin: Some(j),
    }
}

fn gram_matrix(generators: &[CMat]) -> DMatrix<f64> {
    let n = generators.len();
    DMatrix::from_fn(n, n, |a, b| {
        (generators[a].adjoint() * &generators[b]).trace().re
    })
}

/// Validates user-supplied Hermitian generators and derives their structure
/// constants by projecting `[T_a, T_b]/i` onto the generator span.
pub fn validate_algebra(
    label: &str,
    generators: Vec<CMat>,
    tol: &Tolerances,
) -> Result<LieAlgebraRep> {
    let n = generators.len();
    if n == 0 {
        return Err(Error::InvalidInput("at least one generator is required".into()));
    }
    let d = generators[0].nrows();
    for (k, t) in generators.iter().enumerate() {
        if t.nrows() != d || t.ncols() != d {
            return Err(Error::Dimension(format!(
                "generator {k} is {}x{}, expected {d}x{d}",
                t.nrows(),
                t.ncols()
            )));
        }
        if t.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput(format!("generator {k} has non-finite entries")));
        }
        let deviation = linalg::hermiticity_defect(t);
        if deviation > tol.hermiticity {
            return Err(Error::HermiticityFailure { index: k, deviation });
        }
    }

    let gram = gram_matrix(&generators);
    let gram_chol = Cholesky::new(gram.clone()).ok_or(Error::DependentGenerators)?;
    // A nearly singular Gram matrix means a (numerically) dependent basis.
    let eig_min = gram.clone().symmetric_eigenvalues().min();
    if eig_min <= 1e-12 * gram.trace().max(1.0) {
        return Err(Error::DependentGenerators);
    }

    let mut rep = LieAlgebraRep {
        label: label.to_string(),
        dim: d,
        generators,
        structure_constants: StructureConstants::zeros(n),
        gram,
        gram_chol,
        spin: None,
    };

    let minus_i = -I;
    let mut f = StructureConstants::zeros(n);
    for a in 0..n {
        for b in (a + 1)..n {
            let bracket = linalg::commutator(&rep.generators[a], &rep.generators[b]) * minus_i;
            let (coeffs, residual) = rep.project(&bracket);
            if residual > tol.closure {
                return Err(Error::ClosureFailure { a, b, residual });
            }
            for (c, &value) in coeffs.iter().enumerate() {
                f.set_antisymmetric(a, b, c, value);
            }
        }
    }
    let deviation = f.jacobi_defect();
    if deviation > tol.jacobi {
        return Err(Error::JacobiFailure { deviation });
    }
    rep.structure_constants = f;
    Ok(rep)
}

/// Max over (a, b) of `‖[T_a, T_b] − i f_abc T_c‖_max`.
pub fn closure_defect(rep: &LieAlgebraRep) -> f64 {
    let n = rep.n();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let lhs = linalg::commutator(rep.generator(a), rep.generator(b));
            let coeffs: Vec<f64> = (0..n).map(|c| rep.f(a, b, c)).collect();
            let rhs = rep.combination(&coeffs) * I;
            worst = worst.max(linalg::max_abs(&(lhs - rhs)));
        }
    }
    worst
}

/// `exp(−i Σ_a θ_a T_a)`.
pub fn exp_element(rep: &LieAlgebraRep, theta: &[f64]) -> Result<GroupElement> {
    if theta.len() != rep.n() {
        return Err(Error::Dimension(format!(
            "theta has {} components, algebra has n = {}",
            theta.len(),
            rep.n()
        )));
    }
    if theta.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("theta must be finite".into()));
    }
    let h = rep.combination(theta);
    Ok(GroupElement::from_unitary(linalg::unitary_exp(&h, 1.0), rep.label()))
}

/// Coefficients `w` with `g⁻¹ (v·T) g = w·T`.
pub fn conjugate_generator(
    rep: &LieAlgebraRep,
    g: &GroupElement,
    v: &[f64],
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    if v.len() != rep.n() {
        return Err(Error::Dimension(format!("v has {} components, n = {}", v.len(), rep.n())));
    }
    let x = rep.combination(v);
    let conj = g.matrix().adjoint() * x * g.matrix();
    let (w, residual) = rep.project(&conj);
    let scale = linalg::max_abs(&conj).max(1.0);
    if residual > tol.projection * scale {
        return Err(Error::ProjectionResidual { residual });
    }
    Ok(w)
}

/// Matrix `C` with `g⁻¹ T_a g = Σ_b C_ab T_b`. Moments transform as
/// `μ(g·ψ) = C μ(ψ)`.
pub fn adjoint_matrix(
    rep: &LieAlgebraRep,
    g: &GroupElement,
    tol: &Tolerances,
) -> Result<DMatrix<f64>> {
    let n = rep.n();
    let mut c = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for a in 0..n {
        e.fill(0.0);
        e[a] = 1.0;
        let row = conjugate_generator(rep, g, &e, tol)?;
        for b in 0..n {
            c[(a, b)] = row[b];
        }
    }
    Ok(c)
}

/// Co-adjoint action on a moment vector: the moment of `g·ψ` given that of `ψ`.
pub fn coadjoint_action(
    rep: &LieAlgebraRep,
    g: &GroupElement,
    mu: &[f64],
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let c = adjoint_matrix(rep, g, tol)?;
    let out = c * DVector::from_column_slice(mu);
    Ok(out.iter().copied().collect())
}

/// Pauli matrices divided by two, the defining spin-1/2 generators.
pub fn pauli_halves() -> Vec<CMat> {
    let h = C64::new(0.5, 0.0);
    vec![
        CMat::from_row_slice(2, 2, &[ZERO, h, h, ZERO]),
        CMat::from_row_slice(2, 2, &[ZERO, -I * 0.5, I * 0.5, ZERO]),
        CMat::from_row_slice(2, 2, &[h, ZERO, ZERO, -h]),
    ]
}

/// Gell-Mann matrices divided by two (defining rep of su(3)).
pub fn gell_mann_halves() -> Vec<CMat> {
    let r = |re: f64| C64::new(re, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let mk = |entries: [C64; 9]| CMat::from_row_slice(3, 3, &entries) * r(0.5);
    let s3 = 1.0 / 3f64.sqrt();
    vec![
        mk([ZERO, ONE, ZERO, ONE, ZERO, ZERO, ZERO, ZERO, ZERO]),
        mk([ZERO, im(-1.0), ZERO, im(1.0), ZERO, ZERO, ZERO, ZERO, ZERO]),
        mk([ONE, ZERO, ZERO, ZERO, -ONE, ZERO, ZERO, ZERO, ZERO]),
        mk([ZERO, ZERO, ONE, ZERO, ZERO, ZERO, ONE, ZERO, ZERO]),
        mk([ZERO, ZERO, im(-1.0), ZERO, ZERO, ZERO, im(1.0), ZERO, ZERO]),
        mk([ZERO, ZERO, ZERO, ZERO, ZERO, ONE, ZERO, ONE, ZERO]),
        mk([ZERO, ZERO, ZERO, ZERO, ZERO, im(-1.0), ZERO, im(1.0), ZERO]),
        mk([r(s3), ZERO, ZERO, ZERO, r(s3), ZERO, ZERO, ZERO, r(-2.0 * s3)]),
    ]
}
