//! Product quadrature for the normalized Haar measure on SU(2).
//!
//! Euler parametrization `g(α, β, γ) = exp(−iαJ_3) exp(−iβJ_2) exp(−iγJ_3)`
//! with `α ∈ [0, 2π)`, `β ∈ [0, π]`, `γ ∈ [0, 4π)` and
//! `dμ = sin β dα dβ dγ / 16π²`. Gauss–Legendre in `cos β`, uniform grids in
//! `α` and `γ`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{GroupElement, LieAlgebraRep};
use crate::linalg::{self, CMat};
use crate::par;
use crate::spin::Spin;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending in `x`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Euler-grid orders `(n_β, n_α, n_γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureOrders {
    pub beta: usize,
    pub alpha: usize,
    pub gamma: usize,
}

impl QuadratureOrders {
    pub fn new(beta: usize, alpha: usize, gamma: usize) -> Self {
        QuadratureOrders { beta, alpha, gamma }
    }

    /// Smallest orders for which every matrix element of `|g⟩⟨g|` is
    /// integrated exactly in spin `j`: `(2j+1, 4j+1, 4j+1)`.
    pub fn exact_for(j: Spin) -> Self {
        let t = j.twice() as usize;
        QuadratureOrders { beta: t + 1, alpha: 2 * t + 1, gamma: 2 * t + 1 }
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.beta, self.alpha, self.gamma]
    }

    pub fn meets(&self, required: &QuadratureOrders) -> bool {
        self.beta >= required.beta && self.alpha >= required.alpha && self.gamma >= required.gamma
    }

    pub fn node_count(&self) -> usize {
        self.beta * self.alpha * self.gamma
    }
}

/// Nodes (as explicit unitaries) and normalized positive weights.
#[derive(Debug, Clone)]
pub struct HaarQuadrature {
    pub nodes: Vec<GroupElement>,
    pub weights: Vec<f64>,
    /// Euler angles `(α, β, γ)` of each node.
    pub angles: Vec<[f64; 3]>,
    pub orders: QuadratureOrders,
    pub spin: Spin,
}

impl HaarQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.orders.meets(&QuadratureOrders::exact_for(self.spin))
    }

    /// Σ_i w_i f(g_i) with a fixed (thread-count independent) summation order.
    pub fn integrate_matrix<F>(&self, f: F) -> CMat
    where
        F: Fn(&GroupElement) -> CMat + Sync + Send,
    {
        let d = self.nodes.first().map_or(0, |g| g.matrix().nrows());
        par::blocked_sum(
            self.len(),
            || CMat::zeros(d, d),
            |i| f(&self.nodes[i]) * linalg::C64::new(self.weights[i], 0.0),
            |a, b| a + b,
        )
    }
}

/// Builds the Euler-grid Haar rule for a spin representation.
pub fn haar_quadrature(rep: &LieAlgebraRep, orders: QuadratureOrders) -> Result<HaarQuadrature> {
    let spin = rep.require_spin()?;
    if orders.beta < 1 || orders.alpha < 1 || orders.gamma < 1 {
        return Err(Error::InvalidInput(format!(
            "quadrature orders must be at least 1, got {:?}",
            orders.as_array()
        )));
    }
    let (xs, ws) = gauss_legendre(orders.beta);
    let j2 = rep.generator(1);
    let j3 = rep.generator(2);
    let norm = 1.0 / (2.0 * orders.alpha as f64 * orders.gamma as f64);

    let mut grid = Vec::with_capacity(orders.node_count());
    for (ib, (&x, &wb)) in xs.iter().zip(&ws).enumerate() {
        let beta = x.clamp(-1.0, 1.0).acos();
        for ia in 0..orders.alpha {
            let alpha = 2.0 * PI * ia as f64 / orders.alpha as f64;
            for ig in 0..orders.gamma {
                let gamma = 4.0 * PI * ig as f64 / orders.gamma as f64;
                grid.push(([alpha, beta, gamma], wb * norm, ib));
            }
        }
    }
    let label = rep.label().to_string();
    let nodes = par::map_slice(&grid, |(angles, _, _)| {
        let [alpha, beta, gamma] = *angles;
        let m = linalg::unitary_exp(j3, alpha)
            * linalg::unitary_exp(j2, beta)
            * linalg::unitary_exp(j3, gamma);
        GroupElement::from_unitary(m, &label)
    });
    Ok(HaarQuadrature {
        nodes,
        weights: grid.iter().map(|g| g.1).collect(),
        angles: grid.iter().map(|g| g.0).collect(),
        orders,
        spin,
    })
}
