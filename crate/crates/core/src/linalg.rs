//! Self-contained dense eigensolvers.
//!
//! Two kernels cover everything the crate needs:
//! * [`symmetric_tridiagonal_eigen`] — implicit-shift QL with eigenvector
//!   accumulation, for the parity-split prolate Galerkin matrices;
//! * [`hermitian_eigen`] — cyclic Jacobi with complex rotations, for the
//!   (possibly noisy) Hermitian data matrices of dimension ≤ ~120.
//!
//! Matrices are flat slices; eigenvectors come back column-major
//! (`v[i + k*n]` = component i of eigenvector k).

use num_complex::Complex64;

use crate::{Error, Result};

const QL_MAX_ITER: usize = 60;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and orthonormal eigenvectors of the symmetric
/// tridiagonal matrix with diagonal `diag` and off-diagonal `off`
/// (`off.len() == diag.len() - 1`).
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty tridiagonal matrix".into()));
    }
    if off.len() + 1 != n {
        return Err(Error::InvalidInput(format!(
            "off-diagonal length {} does not match dimension {}",
            off.len(),
            n
        )));
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);

    // column-major identity
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i + i * n] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            // locate a negligible subdiagonal element
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::Numerical(format!(
                    "tridiagonal QL failed to converge at index {l}"
                )));
            }
            // implicit shift from the 2x2 at l
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // deflate: skip the transformation that became trivial
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k + (i + 1) * n];
                    z[k + (i + 1) * n] = s * z[k + i * n] + c * f;
                    z[k + i * n] = c * z[k + i * n] - s * f;
                }
                if i == l {
                    d[l] -= p;
                    e[l] = g;
                    e[m] = 0.0;
                }
            }
        }
    }

    // sort ascending, permuting eigenvector columns
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut vecs = vec![0.0; n * n];
    for (new_k, &old_k) in order.iter().enumerate() {
        vecs[new_k * n..(new_k + 1) * n].copy_from_slice(&z[old_k * n..(old_k + 1) * n]);
    }
    Ok((vals, vecs))
}

/// One inverse-iteration pass v ← (T − σI)⁻¹ v on a symmetric tridiagonal
/// matrix, then normalize. Restores componentwise relative accuracy of
/// strongly graded eigenvectors whose small entries the QL sweep only gets to
/// absolute precision.
pub fn tridiagonal_inverse_iteration(
    diag: &[f64],
    off: &[f64],
    sigma: f64,
    v: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    // shift slightly off the Ritz value so the factorization stays regular
    let shift = sigma * (1.0 + 64.0 * f64::EPSILON) + 1e-300;
    let mut a = vec![0.0; n]; // subdiagonal
    let mut b: Vec<f64> = diag.iter().map(|&x| x - shift).collect();
    let mut c = vec![0.0; n]; // superdiagonal
    let mut d2 = vec![0.0; n]; // second superdiagonal (fill-in from pivoting)
    a[1..n].copy_from_slice(off);
    c[..n - 1].copy_from_slice(off);
    let mut x = v.to_vec();
    // LU with partial pivoting on the 3-band
    for i in 0..n - 1 {
        if a[i + 1].abs() > b[i].abs() {
            x.swap(i, i + 1);
            std::mem::swap(&mut b[i], &mut a[i + 1]);
            // after swap: row i holds (b, c, d2) from the pivot row
            std::mem::swap(&mut c[i], &mut b[i + 1]);
            if i + 2 < n {
                d2[i] = c[i + 1];
                c[i + 1] = 0.0;
            }
        }
        if b[i] == 0.0 {
            b[i] = f64::EPSILON;
        }
        let m = a[i + 1] / b[i];
        b[i + 1] -= m * c[i];
        if i + 2 < n {
            c[i + 1] -= m * d2[i];
        }
        x[i + 1] -= m * x[i];
    }
    if b[n - 1] == 0.0 {
        b[n - 1] = f64::EPSILON;
    }
    // back substitution
    x[n - 1] /= b[n - 1];
    if n >= 2 {
        x[n - 2] = (x[n - 2] - c[n - 2] * x[n - 1]) / b[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - c[i] * x[i + 1] - d2[i] * x[i + 2]) / b[i];
    }
    let norm = x.iter().map(|t| t * t).sum::<f64>().sqrt();
    if !norm.is_finite() || norm == 0.0 {
        return Err(Error::Numerical("inverse iteration produced a degenerate vector".into()));
    }
    for (vi, xi) in v.iter_mut().zip(&x) {
        *vi = xi / norm;
    }
    Ok(())
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix
/// given row-major in `a` (dimension `n`), by cyclic Jacobi with complex
/// rotations. Dependency-free and accurate at the dimensions used here.
pub fn hermitian_eigen(a: &[Complex64], n: usize) -> Result<(Vec<f64>, Vec<Complex64>)> {
    if a.len() != n * n {
        return Err(Error::InvalidInput(format!(
            "matrix buffer {} does not match dimension {n}",
            a.len()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let mut h = a.to_vec();
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i + i * n] = Complex64::new(1.0, 0.0);
    }

    let frob: f64 = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let tol = f64::EPSILON * frob.max(f64::MIN_POSITIVE);

    let mut converged = frob == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    s += h[p * n + q].norm_sqr();
                }
            }
            s.sqrt()
        };
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = h[p * n + q];
                let babs = b.norm();
                if babs <= tol * 1e-3 {
                    continue;
                }
                let phase = b / babs;
                let app = h[p * n + p].re;
                let aqq = h[q * n + q].re;
                let tau = (aqq - app) / (2.0 * babs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let w = phase * s; // J_pq = w, J_qp = -conj(w), J_pp = J_qq = c

                // H <- J^H H J: columns first, then rows
                for k in 0..n {
                    let hkp = h[k * n + p];
                    let hkq = h[k * n + q];
                    h[k * n + p] = c * hkp - w.conj() * hkq;
                    h[k * n + q] = w * hkp + c * hkq;
                }
                for k in 0..n {
                    let hpk = h[p * n + k];
                    let hqk = h[q * n + k];
                    h[p * n + k] = c * hpk - w * hqk;
                    h[q * n + k] = w.conj() * hpk + c * hqk;
                }
                // clean the rounding residue on the zeroed pair
                h[p * n + q] = Complex64::new(0.0, 0.0);
                h[q * n + p] = Complex64::new(0.0, 0.0);
                h[p * n + p] = Complex64::new(h[p * n + p].re, 0.0);
                h[q * n + q] = Complex64::new(h[q * n + q].re, 0.0);

                // V <- V J (columns p, q)
                for k in 0..n {
                    let vkp = v[k + p * n];
                    let vkq = v[k + q * n];
                    v[k + p * n] = c * vkp - w.conj() * vkq;
                    v[k + q * n] = w * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        // final check: the sweeps above converge quadratically; reaching the
        // cap with a large residual signals corrupt input
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| h[p * n + q].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off > tol * 1e3 {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver did not converge: off-diagonal {off:e}"
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h[j * n + j].re.partial_cmp(&h[i * n + i].re).unwrap());
    let vals: Vec<f64> = order.iter().map(|&k| h[k * n + k].re).collect();
    let mut vecs = vec![Complex64::new(0.0, 0.0); n * n];
    for (new_k, &old_k) in order.iter().enumerate() {
        vecs[new_k * n..(new_k + 1) * n].copy_from_slice(&v[old_k * n..(old_k + 1) * n]);
    }
    Ok((vals, vecs))
}

/// Largest eigenvalue magnitude of a Hermitian matrix (spectral norm).
pub fn hermitian_spectral_norm(a: &[Complex64], n: usize) -> Result<f64> {
    let (vals, _) = hermitian_eigen(a, n)?;
    Ok(vals.iter().fold(0.0f64, |m, &x| m.max(x.abs())))
}
