//! Independently derived reference values, frozen.

use std::f64::consts::PI;

use gcs::coherent::{canonicalize_su2, FiducialVector};
use gcs::dynamics::{self, ChartKind};
use gcs::io::GeneratorFile;
use gcs::lie::{self, gell_mann_halves};
use gcs::linalg::{CVec, C64};
use gcs::pathint::default_theta_grid;
use gcs::*;

fn spin(s: &str) -> LieAlgebraRep {
    build_spin_rep(s.parse().unwrap())
}

fn basis_state(rep: &LieAlgebraRep, i: usize) -> FiducialVector {
    let mut v = CVec::zeros(rep.d());
    v[i] = C64::new(1.0, 0.0);
    FiducialVector::new(rep, v, &Tolerances::default()).unwrap()
}

fn state(rep: &LieAlgebraRep, amps: &[(f64, f64)]) -> FiducialVector {
    let v = CVec::from_iterator(amps.len(), amps.iter().map(|&(r, i)| C64::new(r, i)));
    FiducialVector::renormalized(rep, v).unwrap().0
}

/// Schur orthogonality `∫ conj(D_mn) D_m'n' dg = δ_mm' δ_nn' / d` on the
/// Euler grid at the exactness threshold.
#[test]
fn quadrature_reproduces_schur_orthogonality() {
    for s in ["1/2", "1", "3/2", "2"] {
        let rep = spin(s);
        let d = rep.d();
        let quad = haar_quadrature(&rep, QuadratureOrders::exact_for(s.parse().unwrap())).unwrap();
        let total: f64 = quad.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-14, "weights sum to {total}");
        let mut worst = 0.0f64;
        for (m, n) in [(0, 0), (0, d - 1), (d / 2, d / 2)] {
            for mp in 0..d {
                for np in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for (g, w) in quad.nodes.iter().zip(&quad.weights) {
                        let u = g.matrix();
                        acc += u[(m, n)].conj() * u[(mp, np)] * *w;
                    }
                    let expect = if (m, n) == (mp, np) { 1.0 / d as f64 } else { 0.0 };
                    worst = worst.max((acc - C64::new(expect, 0.0)).norm());
                }
            }
        }
        assert!(worst < 1e-13, "spin {s}: orthogonality defect {worst:e}");
    }
}

#[test]
fn identity_resolution_constant_is_one_over_d() {
    for s in ["1/2", "1", "3/2", "2"] {
        let rep = spin(s);
        let quad = haar_quadrature(&rep, QuadratureOrders::exact_for(s.parse().unwrap())).unwrap();
        let d = rep.d();
        let amps: Vec<(f64, f64)> = (0..d).map(|k| (1.0 + k as f64, 0.3 * k as f64 - 0.5)).collect();
        for psi in [FiducialVector::highest_weight(&rep).unwrap(), basis_state(&rep, d - 1), state(&rep, &amps)] {
            let r = identity_resolution(&rep, &psi, &quad).unwrap();
            assert!(r.exact);
            assert!((r.constant - 1.0 / d as f64).abs() < 1e-14);
            assert!(r.deviation < 1e-13, "spin {s}: deviation {:e}", r.deviation);
        }
    }
    // Below the threshold the defect is visible for a generic state: one β
    // node cannot integrate cos²β, and four γ nodes on [0, 4π) alias the
    // Δn = 2 phase.
    let rep = spin("1");
    let psi = state(&rep, &[(0.5, 0.1), (0.6, -0.2), (0.3, 0.4)]);
    for orders in [QuadratureOrders::new(1, 5, 5), QuadratureOrders::new(3, 5, 4)] {
        let coarse = haar_quadrature(&rep, orders).unwrap();
        let r = identity_resolution(&rep, &psi, &coarse).unwrap();
        assert!(!r.exact && r.deviation > 1e-3, "{orders:?}: deviation {:e}", r.deviation);
        assert!((r.constant - 1.0 / 3.0).abs() < 1e-14);
    }
}

/// Along `(k, 2k−1, 2k−1)` the defect never grows and vanishes from the
/// threshold on; doubling every order past it changes nothing.
#[test]
fn identity_defect_along_the_diagonal() {
    for s in ["1", "3/2", "2"] {
        let rep = spin(s);
        let d = rep.d();
        let amps: Vec<(f64, f64)> = (0..d).map(|k| ((k as f64 + 0.5).sin(), (2.0 * k as f64).cos())).collect();
        let psi = state(&rep, &amps);
        let exact = QuadratureOrders::exact_for(s.parse().unwrap());
        let mut last = f64::INFINITY;
        for k in 1..=exact.beta {
            let o = QuadratureOrders::new(k, 2 * k - 1, 2 * k - 1);
            let dev = identity_resolution(&rep, &psi, &haar_quadrature(&rep, o).unwrap()).unwrap().deviation;
            assert!(dev <= last + 1e-14, "spin {s}, {o:?}: {dev:e} after {last:e}");
            last = dev;
        }
        assert!(last < 1e-13);
        let base = identity_resolution(&rep, &psi, &haar_quadrature(&rep, exact).unwrap()).unwrap();
        let doubled = QuadratureOrders::new(2 * exact.beta, 2 * exact.alpha, 2 * exact.gamma);
        let fine = identity_resolution(&rep, &psi, &haar_quadrature(&rep, doubled).unwrap()).unwrap();
        assert!(gcs::linalg::max_abs(&(&base.operator - &fine.operator)) < 1e-12);
    }
}

/// For `|j, m⟩` the north-chart connection is `A_φ = m (cos θ − 1)`.
#[test]
fn berry_coefficient_of_weight_states_is_m() {
    let tol = Tolerances::default();
    let grid = default_theta_grid(17, tol.chart_cap);
    for s in ["1/2", "1", "3/2", "2"] {
        let rep = spin(s);
        let j: f64 = s.parse::<Spin>().unwrap().value();
        for i in 0..rep.d() {
            let m = j - i as f64;
            if m <= 0.0 {
                continue;
            }
            let profile = berry_connection(&rep, &basis_state(&rep, i), &grid, &tol).unwrap();
            assert!((profile.coefficient - m).abs() < 1e-9, "spin {s}, m = {m}: {}", profile.coefficient);
            assert!(profile.fit_residual < 1e-8);
        }
    }
}

/// `cos χ|1,1⟩ + sin χ|1,−1⟩` has `μ = (0, 0, cos 2χ)`, hence coefficient
/// `|cos 2χ|` after canonicalization; it is admissible only at `cos 2χ ∈ {1/2, 1}`.
#[test]
fn dirac_sweep_over_mixing_angle() {
    let tol = Tolerances::default();
    let rep = spin("1");
    for k in 0..=12 {
        let chi = k as f64 * PI / 24.0;
        let psi = state(&rep, &[(chi.cos(), 0.0), (0.0, 0.0), (chi.sin(), 0.0)]);
        let expect = (2.0 * chi).cos().abs();
        if expect < 1e-9 {
            assert!(matches!(dirac_check(&rep, &psi, &tol), Err(Error::DegenerateOrbit { .. })));
            continue;
        }
        let (_, verdict) = dirac_check(&rep, &psi, &tol).unwrap();
        assert!((verdict.coefficient - expect).abs() < 1e-8, "chi = {chi}: {}", verdict.coefficient);
        let admissible = [0.5, 1.0].iter().any(|a| (expect - a).abs() < 1e-9);
        assert_eq!(verdict.admissible, admissible, "chi = {chi}");
    }
}

/// Highest weight under `Ĥ = J_3` from tilt `θ₀`: `S(t) = −j t` whatever `θ₀`.
#[test]
fn highest_weight_action_is_minus_j_t() {
    let tol = Tolerances::default();
    for (s, j) in [("1/2", 0.5), ("1", 1.0), ("3/2", 1.5)] {
        let rep = spin(s);
        let psi = FiducialVector::highest_weight(&rep).unwrap();
        let sched = HamiltonianSchedule::constant(vec![0.0, 0.0, 1.0], 2.0 * PI).unwrap();
        for theta0 in [0.4, PI / 3.0, 2.0] {
            let setup = VanHoveSetup::new(2.0 * PI, 2e-3).with_initial(theta0, 0.7);
            let rec = van_hove_check(&rep, &psi, &sched, &setup, &tol).unwrap();
            // Midpoint rule: O(t dt²) drift.
            for (t, s_t) in rec.times.iter().zip(&rec.action).step_by(97) {
                assert!((s_t + j * t).abs() < 5e-5, "spin {s}, θ₀ = {theta0}, t = {t}: S = {s_t}");
            }
            assert!(rec.max_fidelity_deficit() < 1e-10);
        }
    }
}

/// Matsumoto state under `J_3`: `|⟨0|e^{−iJ_3 t}|0⟩| = √(5/9 + 4/9 cos 2t)`.
#[test]
fn matsumoto_fidelity_curve() {
    let tol = Tolerances::default();
    let rep = spin("1");
    let psi = FiducialVector::matsumoto(&rep).unwrap();
    let sched = HamiltonianSchedule::constant(vec![0.0, 0.0, 1.0], PI).unwrap();
    let rec = van_hove_check(&rep, &psi, &sched, &VanHoveSetup::new(PI, 1e-2), &tol).unwrap();
    for (t, f) in rec.times.iter().zip(&rec.fidelity) {
        let expect = (5.0 / 9.0 + 4.0 / 9.0 * (2.0 * t).cos()).sqrt();
        assert!((f - expect).abs() < 1e-12, "t = {t}");
    }
    for mu in &rec.mu {
        assert!((mu.0[2] - 1.0 / 3.0).abs() < 1e-12 && mu.0[0].abs() < 1e-12 && mu.0[1].abs() < 1e-12);
    }
}

/// Exact kernels telescope: `A_N` equals the exact amplitude for every `N`,
/// including tilted endpoints and a two-segment schedule.
#[test]
fn exact_kernel_is_slice_count_independent() {
    let tol = Tolerances::default();
    let rep = spin("1");
    let quad = haar_quadrature(&rep, QuadratureOrders::exact_for("1".parse().unwrap())).unwrap();
    let sched = HamiltonianSchedule::new(vec![0.0, 0.4, 1.0], vec![vec![0.3, 0.0, 1.0], vec![-0.2, 0.5, 0.1]]).unwrap();
    let psi = state(&rep, &[(0.7, 0.0), (0.2, 0.3), (0.1, -0.5)]);
    let gi = dynamics::section_element(&rep, 0.3, 0.5, ChartKind::North).unwrap();
    let gf = dynamics::section_element(&rep, 1.1, -0.4, ChartKind::South).unwrap();
    let rec = discrete_propagator(&rep, &psi, &sched, 1.0, &gi, &gf, &[1, 2, 3, 5, 8], &quad, KernelMode::Exact, &tol)
        .unwrap();
    let u = dynamics::propagator(&rep, &sched, 0.0, 1.0);
    let expect = gf.apply(psi.amplitudes()).dotc(&(u * gi.apply(psi.amplitudes())));
    assert!((rec.exact_amplitude - expect).norm() < 1e-14);
    for e in &rec.errors {
        assert!(*e < 1e-12, "error {e:e}");
    }
}

/// su(3) fundamental from a generator file: `|1⟩` is stabilized up to phase
/// by a u(2) (dimension 4), and so is its moment; `(|1⟩ + |2⟩)/√2` has the
/// same moment-isotropy dimension but a smaller state isotropy.
#[test]
fn su3_fundamental_isotropy() {
    let tol = Tolerances::default();
    let rep = validate_algebra("su3", gell_mann_halves(), &tol).unwrap();
    let text = serde_json::to_string(&GeneratorFile::from_rep(&rep)).unwrap();
    let rep: LieAlgebraRep = serde_json::from_str::<GeneratorFile>(&text).unwrap().into_rep(&tol).unwrap();
    let e1 = basis_state(&rep, 0);
    let r = classify_informative(&rep, &e1, &tol).unwrap();
    assert_eq!((r.subalg_state.dim, r.subalg_moment.dim), (4, 4));
    assert!(r.informative);
    let mu = &r.mu.0;
    assert!((mu[2] - 0.5).abs() < 1e-14 && (mu[7] - 0.5 / 3f64.sqrt()).abs() < 1e-14);

    // Every unit vector of C^3 lies on the orbit of |1⟩, so this one is informative too.
    let sup = state(&rep, &[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
    let r = classify_informative(&rep, &sup, &tol).unwrap();
    assert_eq!((r.subalg_state.dim, r.subalg_moment.dim), (4, 4));

    // su(3) structure constants recovered from the matrices.
    assert!((rep.f(0, 1, 2) - 1.0).abs() < 1e-12);
    assert!((rep.f(3, 4, 7) - 3f64.sqrt() / 2.0).abs() < 1e-12);
    assert!((rep.f(1, 3, 5) - 0.5).abs() < 1e-12);
    assert!((rep.f(0, 3, 6) - 0.5).abs() < 1e-12);
}

/// The canonicalizing rotation maps the moment onto `+3` with its norm kept.
#[test]
fn canonicalization_of_a_generic_state() {
    let tol = Tolerances::default();
    let rep = spin("3/2");
    let psi = state(&rep, &[(0.2, 0.1), (-0.5, 0.3), (0.4, 0.0), (0.1, -0.6)]);
    let mu = moment_map(&rep, &psi, &tol).unwrap();
    let c = canonicalize_su2(&rep, &psi, &tol).unwrap();
    assert!(c.mu.0[0].abs() < 1e-12 && c.mu.0[1].abs() < 1e-12);
    assert!((c.mu.0[2] - mu.norm()).abs() < 1e-12);
    let back = lie::coadjoint_action(&rep, &c.rotation, &mu.0, &tol).unwrap();
    for (a, b) in back.iter().zip(&c.mu.0) {
        assert!((a - b).abs() < 1e-12);
    }
}
