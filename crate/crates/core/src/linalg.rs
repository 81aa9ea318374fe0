//! Dense complex linear algebra used throughout: spectral exponentials of
//! Hermitian matrices and SVD-based null spaces with an explicit rank guard.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// ‖A − A†‖_max.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// ‖U†U − I‖_max.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - CMat::identity(n, n)))
}

/// `exp(−i·t·H)` for Hermitian `H`, via its spectral decomposition.
pub fn unitary_exp(h: &CMat, t: f64) -> CMat {
    let n = h.nrows();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    // Symmetrize so roundoff in the input does not leak into the eigenvectors.
    let herm = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut scaled = eig.eigenvectors.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lambda * t);
        for r in 0..n {
            scaled[(r, k)] *= phase;
        }
    }
    scaled * eig.eigenvectors.adjoint()
}

/// ⟨a|b⟩ (antilinear in the first slot).
pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.dotc(b)
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Stack real and imaginary parts of a complex column: ℂᵈ → ℝ²ᵈ.
pub fn realify(v: &CVec) -> DVector<f64> {
    let d = v.len();
    DVector::from_fn(2 * d, |i, _| if i < d { v[i].re } else { v[i - d].im })
}

/// Orthonormal basis of an (approximate) null space, and the spectrum it was
/// cut from.
#[derive(Debug, Clone)]
pub struct NullSpace {
    pub basis: Vec<DVector<f64>>,
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

/// Failure of [`null_space`]: a singular value falls inside the guard band.
#[derive(Debug, Clone, Copy)]
pub struct AmbiguousRank {
    pub singular_value: f64,
    pub threshold: f64,
}

/// Null space of a real `m × n` matrix.
///
/// The threshold is `relative · σ_max`; a singular value in
/// `[threshold / guard, threshold · guard]` makes the rank undecidable and is
/// reported instead of silently classified. A zero matrix has full null space.
pub fn null_space(
    a: &DMatrix<f64>,
    relative: f64,
    guard: f64,
) -> Result<NullSpace, AmbiguousRank> {
    let (m, n) = a.shape();
    if n == 0 {
        return Ok(NullSpace { basis: vec![], singular_values: vec![], threshold: 0.0 });
    }
    // Pad to at least n rows so the SVD returns a complete right basis.
    let rows = m.max(n);
    let mut padded = DMatrix::<f64>::zeros(rows, n);
    padded.view_mut((0, 0), (m, n)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let threshold = relative * sigma_max;

    let mut basis = Vec::new();
    for (k, &s) in sigma.iter().enumerate() {
        if sigma_max > 0.0 && s >= threshold / guard && s <= threshold * guard {
            return Err(AmbiguousRank { singular_value: s, threshold });
        }
        if sigma_max == 0.0 || s < threshold / guard {
            basis.push(canonical_sign(v_t.row(k).transpose()));
        }
    }
    Ok(NullSpace { basis, singular_values: sigma, threshold })
}

/// Flip sign so the largest-magnitude component is positive; makes bases
/// reproducible across runs and platforms.
fn canonical_sign(v: DVector<f64>) -> DVector<f64> {
    let pivot = v.iter().copied().fold(0.0, |best: f64, x| if x.abs() > best.abs() + 1e-12 { x } else { best });
    if pivot < 0.0 {
        -v
    } else {
        v
    }
}
