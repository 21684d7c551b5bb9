//! Prolate spheroidal wave functions by the Legendre–Galerkin method.
//!
//! ψ_n(·;c) is expanded in normalized Legendre polynomials,
//! ψ_n(x;c) ≈ Σ_j B_{jn} P̄_j(x), and the coefficients are eigenvectors of a
//! symmetric matrix D that couples only Legendre indices of equal parity:
//!
//!   D_jj     = j(j+1) + c²·(2j(j+1)−1) / ((2j+3)(2j−1))
//!   D_j,j+2  = c²·(j+1)(j+2) / ((2j+3)·√((2j+1)(2j+5)))
//!
//! so the problem splits into two symmetric tridiagonal eigenproblems (even
//! and odd indices), solved by implicit-shift QL. The Sturm–Liouville
//! eigenvalues χ_n are the N+1 smallest eigenvalues; the prolate eigenvalues
//! λ_n of the restricted Fourier operator F^c g = ∫ e^{icxy} g(y) dy follow
//! from
//!
//!   λ_n ≈ √2·B_{0n}/ψ_n(0;c)            (n even, λ_n real)
//!   λ_n ≈ i·c·√(2/3)·B_{1n}/ψ_n'(0;c)   (n odd, λ_n imaginary)

use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::legendre::{legendre_deriv, normalized_legendre_upto};
use crate::linalg::{symmetric_tridiagonal_eigen, tridiagonal_inverse_iteration};
use crate::{Error, Result};

/// The first N+1 prolate spheroidal wave functions at bandwidth c, as columns
/// of Legendre coefficients, together with both eigenvalue families.
///
/// Immutable after construction; evaluation methods are pure, so the basis is
/// safe to share across threads.
#[derive(Debug, Clone)]
pub struct PswfBasis {
    bandwidth: f64,
    count: usize,      // N+1 functions, indices 0..=N
    truncation: usize, // N_t Legendre coefficients per function
    /// column-major: coeffs[j + n*truncation] = B_{jn}
    coeffs: Vec<f64>,
    chi: Vec<f64>,
    lambda: Vec<Complex64>,
}

/// Galerkin matrix D for bandwidth `c`, dense symmetric `n_t` × `n_t`
/// (row-major); only the main diagonal and the ±2 off-diagonals are non-zero.
pub fn assemble_galerkin(c: f64, n_t: usize) -> Result<Vec<f64>> {
    if !(c > 0.0) {
        return Err(Error::InvalidInput(format!("bandwidth must be positive, got {c}")));
    }
    if n_t < 2 {
        return Err(Error::InvalidInput(format!("truncation must be >= 2, got {n_t}")));
    }
    let mut d = vec![0.0; n_t * n_t];
    for j in 0..n_t {
        d[j * n_t + j] = galerkin_diag(c, j);
        if j + 2 < n_t {
            let v = galerkin_coupling(c, j);
            d[j * n_t + (j + 2)] = v;
            d[(j + 2) * n_t + j] = v;
        }
    }
    Ok(d)
}

fn galerkin_diag(c: f64, j: usize) -> f64 {
    let jf = j as f64;
    jf * (jf + 1.0)
        + c * c * (2.0 * jf * (jf + 1.0) - 1.0) / ((2.0 * jf + 3.0) * (2.0 * jf - 1.0))
}

fn galerkin_coupling(c: f64, j: usize) -> f64 {
    let jf = j as f64;
    c * c * (jf + 1.0) * (jf + 2.0)
        / ((2.0 * jf + 3.0) * ((2.0 * jf + 1.0) * (2.0 * jf + 5.0)).sqrt())
}

/// Compute the first `n + 1` PSWFs at bandwidth `c` with `n_t` Legendre
/// coefficients. Requires the truncation margin `n_t >= 2n + 30`.
pub fn solve_pswf(c: f64, n: usize, n_t: usize) -> Result<PswfBasis> {
    if !(c > 0.0) {
        return Err(Error::InvalidInput(format!("bandwidth must be positive, got {c}")));
    }
    if n_t < 2 * n + 30 {
        return Err(Error::InvalidInput(format!(
            "truncation N_t={n_t} too small: need N_t >= 2N+30 = {}",
            2 * n + 30
        )));
    }

    // parity split: D couples only indices of equal parity
    let count_even = n_t.div_ceil(2);
    let count_odd = n_t / 2;
    let (chi_even, vec_even) = solve_parity_block(c, 0, count_even)?;
    let (chi_odd, vec_odd) = solve_parity_block(c, 1, count_odd)?;

    let count = n + 1;
    let mut coeffs = vec![0.0; n_t * count];
    let mut chi = vec![0.0; count];
    for m in 0..count {
        // the k-th eigenvalue of the parity-(m mod 2) block is χ_m globally
        let k = m / 2;
        let (vals, vecs, block, parity) = if m % 2 == 0 {
            (&chi_even, &vec_even, count_even, 0usize)
        } else {
            (&chi_odd, &vec_odd, count_odd, 1usize)
        };
        if k >= block {
            return Err(Error::Numerical(format!(
                "parity block too small for eigenpair {m}"
            )));
        }
        chi[m] = vals[k];
        let col = &vecs[k * block..(k + 1) * block];
        let dst = &mut coeffs[m * n_t..(m + 1) * n_t];
        for (i, &v) in col.iter().enumerate() {
            dst[parity + 2 * i] = v;
        }
        // sign convention: largest-magnitude Legendre coefficient positive
        let mut extremum = 0.0f64;
        for &v in dst.iter() {
            if v.abs() > extremum.abs() {
                extremum = v;
            }
        }
        if extremum < 0.0 {
            for v in dst.iter_mut() {
                *v = -*v;
            }
        }
        // unit Euclidean norm (equivalent to unit L2 by Legendre orthonormality)
        let nrm = dst.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in dst.iter_mut() {
            *v /= nrm;
        }
    }

    for m in 1..count {
        if chi[m] <= chi[m - 1] {
            return Err(Error::Numerical(format!(
                "Sturm-Liouville eigenvalues not strictly increasing at n={m}"
            )));
        }
    }

    let mut basis = PswfBasis {
        bandwidth: c,
        count,
        truncation: n_t,
        coeffs,
        chi,
        lambda: Vec::new(),
    };
    basis.lambda = prolate_eigenvalues(&basis)?;
    Ok(basis)
}

/// Solve one parity block: tridiagonal QL for the smallest eigenpairs, then an
/// inverse-iteration polish so the exponentially small head coefficients B_{0n}
/// and B_{1n} keep relative accuracy (they carry the tiny prolate eigenvalues).
fn solve_parity_block(c: f64, parity: usize, size: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let diag: Vec<f64> = (0..size).map(|k| galerkin_diag(c, 2 * k + parity)).collect();
    let off: Vec<f64> = (0..size.saturating_sub(1))
        .map(|k| galerkin_coupling(c, 2 * k + parity))
        .collect();
    let (vals, mut vecs) = symmetric_tridiagonal_eigen(&diag, &off)?;
    for k in 0..size {
        let v = &mut vecs[k * size..(k + 1) * size];
        for _ in 0..2 {
            tridiagonal_inverse_iteration(&diag, &off, vals[k], v)?;
        }
    }
    Ok((vals, vecs))
}

/// Prolate eigenvalues λ_n from the coefficient matrix, parity formula per
/// index. Real for even n, purely imaginary for odd n, all non-zero.
pub fn prolate_eigenvalues(basis: &PswfBasis) -> Result<Vec<Complex64>> {
    let mut lambda = Vec::with_capacity(basis.count);
    for m in 0..basis.count {
        let col = basis.coeff_column(m);
        let lam = if m % 2 == 0 {
            let denom = basis.eval(m, 0.0);
            if denom.abs() < 1e-300 {
                return Err(Error::Numerical(format!(
                    "psi_{m}(0) vanished; basis is corrupted"
                )));
            }
            Complex64::new(2.0f64.sqrt() * col[0] / denom, 0.0)
        } else {
            let denom = basis.deriv_at_zero(m);
            if denom.abs() < 1e-300 {
                return Err(Error::Numerical(format!(
                    "psi_{m}'(0) vanished; basis is corrupted"
                )));
            }
            Complex64::new(0.0, (2.0f64 / 3.0).sqrt() * basis.bandwidth * col[1] / denom)
        };
        lambda.push(lam);
    }
    Ok(lambda)
}

impl PswfBasis {
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Number of functions (N+1).
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Sturm–Liouville eigenvalues χ_0 < χ_1 < …
    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    /// Prolate eigenvalues λ_n of F^c.
    pub fn lambda(&self) -> &[Complex64] {
        &self.lambda
    }

    /// Legendre coefficients of ψ_n.
    pub fn coeff_column(&self, n: usize) -> &[f64] {
        assert!(n < self.count, "PSWF index {n} out of range (count {})", self.count);
        &self.coeffs[n * self.truncation..(n + 1) * self.truncation]
    }

    /// ψ_n(x) = Σ_j B_{jn} P̄_j(x).
    ///
    /// Panics if `n >= count`.
    pub fn eval(&self, n: usize, x: f64) -> f64 {
        let col = self.coeff_column(n);
        let mut leg = vec![0.0; self.truncation];
        normalized_legendre_upto(x, &mut leg);
        col.iter().zip(&leg).map(|(b, p)| b * p).sum()
    }

    /// Evaluate ψ_0..ψ_{count−1} at each point; row-major `count × points.len()`.
    pub fn eval_matrix(&self, points: &[f64]) -> Vec<f64> {
        self.eval_matrix_up_to(self.count, points)
    }

    /// Evaluate the first `dim` functions at each point; row-major
    /// `dim × points.len()`. Shares one Legendre recurrence per point.
    pub fn eval_matrix_up_to(&self, dim: usize, points: &[f64]) -> Vec<f64> {
        assert!(dim <= self.count);
        let n_t = self.truncation;
        let mut out = vec![0.0; dim * points.len()];
        let mut leg = vec![0.0; n_t];
        for (a, &x) in points.iter().enumerate() {
            normalized_legendre_upto(x, &mut leg);
            for n in 0..dim {
                let col = &self.coeffs[n * n_t..(n + 1) * n_t];
                let mut acc = 0.0;
                for j in 0..n_t {
                    acc += col[j] * leg[j];
                }
                out[n * points.len() + a] = acc;
            }
        }
        out
    }

    /// ∂_x ψ_n(0) = Σ_j B_{jn} √(j+1/2) P'_j(0). Zero for even n by parity.
    pub fn deriv_at_zero(&self, n: usize) -> f64 {
        let col = self.coeff_column(n);
        col.iter()
            .enumerate()
            .map(|(j, b)| b * (j as f64 + 0.5).sqrt() * legendre_deriv(j, 0.0))
            .sum()
    }

    /// Dump `(n, χ_n, Re λ_n, Im λ_n)` rows as CSV for debugging.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "n,chi,lambda_re,lambda_im")?;
        for n in 0..self.count {
            writeln!(
                f,
                "{},{},{},{}",
                n, self.chi[n], self.lambda[n].re, self.lambda[n].im
            )?;
        }
        Ok(())
    }
}

/// Default basis size for bandwidth `c`: comfortably past the spectral plunge
/// at 2c/π so the prolate eigenvalue tail reaches the double-precision floor.
pub fn default_basis_size(c: f64) -> usize {
    (2.0 * c / std::f64::consts::PI).ceil() as usize + 40
}
