//! Legendre–Gauss–Lobatto quadrature.
//!
//! The N_q-point LGL rule has nodes ±1 together with the zeros of P'_{N_q−1},
//! weights w_j = 2 / (N_q (N_q−1) [P_{N_q−1}(x_j)]²), and degree of exactness
//! 2N_q−3. It is the rule behind every integral in this crate.

use num_complex::Complex64;

use crate::legendre::{legendre_and_deriv, legendre_eval};
use crate::{Error, Result};

/// Newton tolerance on the node update; weights square the polynomial value,
/// so nodes must be at machine precision.
const NODE_TOL: f64 = 1e-15;
const MAX_NEWTON: usize = 100;

/// An immutable LGL rule on the reference interval [−1, 1].
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫_a^b f(x) dx by affine change of variables onto the reference rule.
    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Result<Complex64>
    where
        F: FnMut(f64) -> Complex64,
    {
        if !(a < b) {
            return Err(Error::InvalidInput(format!(
                "degenerate interval [{a}, {b}]: need a < b"
            )));
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        Ok(half * acc)
    }

    /// Real-valued convenience wrapper around [`QuadratureRule::integrate`].
    pub fn integrate_real<F>(&self, a: f64, b: f64, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        Ok(self
            .integrate(a, b, |x| Complex64::new(f(x), 0.0))?
            .re)
    }
}

/// Build the N_q-point LGL rule.
///
/// Interior nodes are found by Newton iteration on P'_{N_q−1}, seeded at the
/// Chebyshev–Gauss–Lobatto points cos(πj/(N_q−1)); the iteration is globally
/// convergent in practice for this seeding.
pub fn lgl_rule(n_q: usize) -> Result<QuadratureRule> {
    if n_q < 2 {
        return Err(Error::InvalidInput(format!("LGL rule needs N_q >= 2, got {n_q}")));
    }
    let deg = n_q - 1; // polynomial degree: interior nodes are zeros of P'_deg
    let mut nodes = vec![0.0; n_q];
    nodes[0] = -1.0;
    nodes[n_q - 1] = 1.0;

    let nn = (deg * (deg + 1)) as f64;
    for j in 1..n_q - 1 {
        // seed, ordered increasing in x
        let mut x = -(std::f64::consts::PI * j as f64 / deg as f64).cos();
        let mut converged = false;
        for _ in 0..MAX_NEWTON {
            let (p, dp) = legendre_and_deriv(deg, x);
            // zeros of dp; d(dp)/dx from the Legendre ODE:
            // (1−x²) P'' = 2x P' − n(n+1) P
            let step = dp * (1.0 - x * x) / (2.0 * x * dp - nn * p);
            x -= step;
            if step.abs() < NODE_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "LGL node search failed to converge for N_q={n_q}, node {j}"
            )));
        }
        nodes[j] = x;
    }

    // Newton already lands symmetric to ~1e-16; make the symmetry exact.
    for j in 0..n_q / 2 {
        let s = 0.5 * (nodes[j] - nodes[n_q - 1 - j]);
        nodes[j] = s;
        nodes[n_q - 1 - j] = -s;
    }

    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Numerical(format!(
            "LGL nodes not strictly increasing for N_q={n_q}"
        )));
    }

    let scale = 2.0 / (n_q as f64 * deg as f64);
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let p = legendre_eval(deg, x);
            scale / (p * p)
        })
        .collect();

    Ok(QuadratureRule { nodes, weights })
}
