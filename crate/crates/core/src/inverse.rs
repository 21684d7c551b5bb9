//! Regularized sampling indicators.
//!
//! For a sampling point z with probe region R(z,ε) = (z−ε, z+ε) and averaged
//! indicator E_z = 1_R/(2ε), the probe coefficients are
//! φ_l = λ_l ⟨E_z, ψ_l⟩ and the regularized solution of A g ≈ φ is
//! g = Σ_n f_α(μ_n²) μ_n ⟨φ, ζ_n⟩ ζ_n. The indicators evaluated per z:
//!
//! * LSM: raw value ⟨S g, 1_R⟩ = Σ_j conj(λ_j) g_j ∫_R ψ_j, reported with its
//!   reciprocal I(z), which converges to the local harmonic average
//!   (⟨1/q, E_z⟩)⁻¹ inside the support and to 0 outside;
//! * GLSM: (|R|·⟨A g, g⟩)⁻¹, same limit;
//! * FM range test: partial sums of Σ |⟨φ, ζ_n⟩|²/μ_n, bounded inside and
//!   divergent outside;
//! * differential: difference of LSM reciprocals for a shifted operator
//!   Ñ = N_inf + N against the background N_inf, usable when q changes sign.

use num_complex::Complex64;

use crate::forward::{ContrastProfile, DataMatrix};
use crate::run_indexed;
use crate::legendre::normalized_legendre_upto;
use crate::pswf::PswfBasis;
use crate::quadrature::QuadratureRule;
use crate::{Error, Result};

/// Regularizing filter f_α: (0, ∞) → R with |x·f_α(x)| ≤ 1 and
/// f_α(x) → 1/x pointwise as α → 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularizationFilter {
    /// f(x) = 1/x for x ≥ α, else 0.
    SpectralCutoff { alpha: f64 },
    /// f(x) = 1/(x + α).
    Tikhonov { alpha: f64 },
}

impl RegularizationFilter {
    pub fn spectral_cutoff(alpha: f64) -> Result<Self> {
        if alpha < 0.0 {
            return Err(Error::InvalidInput(format!("cutoff threshold must be >= 0, got {alpha}")));
        }
        Ok(Self::SpectralCutoff { alpha })
    }

    pub fn tikhonov(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidInput(format!(
                "Tikhonov parameter must be positive, got {alpha}"
            )));
        }
        Ok(Self::Tikhonov { alpha })
    }

    /// f_α(x).
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Self::SpectralCutoff { alpha } => {
                if x >= alpha && x > 0.0 {
                    1.0 / x
                } else {
                    0.0
                }
            }
            Self::Tikhonov { alpha } => 1.0 / (x + alpha),
        }
    }
}

/// Probe region R(z,ε) = (z−ε, z+ε), strictly inside (−1, 1).
#[derive(Debug, Clone, Copy)]
pub struct ProbeRegion {
    z: f64,
    epsilon: f64,
}

impl ProbeRegion {
    pub fn new(z: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
        }
        if z - epsilon <= -1.0 || z + epsilon >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "probe region ({}, {}) is not strictly inside (-1, 1)",
                z - epsilon,
                z + epsilon
            )));
        }
        Ok(Self { z, epsilon })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// |R| = 2ε.
    pub fn width(&self) -> f64 {
        2.0 * self.epsilon
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.z - self.epsilon, self.z + self.epsilon)
    }
}

/// An indicator value with the blow-up case kept as an explicit flag rather
/// than a floating special value, so serialized output stays parseable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Indicator {
    Finite(f64),
    Infinite,
}

impl Indicator {
    fn reciprocal_re(raw: Complex64) -> Self {
        if raw == Complex64::new(0.0, 0.0) {
            Indicator::Infinite
        } else {
            Indicator::Finite((1.0 / raw).re)
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Indicator::Finite(v) => Some(v),
            Indicator::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Indicator::Infinite)
    }
}

/// ∫_R ψ_j for j < dim, computed through the Legendre expansion: one
/// recurrence per node, then m = Bᵀ·(∫_R P̄).
fn region_psi_integrals(
    basis: &PswfBasis,
    dim: usize,
    region: &ProbeRegion,
    rule: &QuadratureRule,
) -> Vec<f64> {
    let n_t = basis.truncation();
    let mut leg_int = vec![0.0; n_t];
    let mut leg = vec![0.0; n_t];
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        let s = region.z + region.epsilon * x;
        normalized_legendre_upto(s, &mut leg);
        let wx = w * region.epsilon;
        for t in 0..n_t {
            leg_int[t] += wx * leg[t];
        }
    }
    (0..dim)
        .map(|j| {
            basis
                .coeff_column(j)
                .iter()
                .zip(&leg_int)
                .map(|(b, l)| b * l)
                .sum()
        })
        .collect()
}

/// Probe coefficients φ_l = λ_l ⟨E_z, ψ_l⟩_{R(z,ε)} for l < dim, the region
/// integral taken on the affinely mapped rule.
pub fn phi_coeffs(
    region: &ProbeRegion,
    basis: &PswfBasis,
    dim: usize,
    rule: &QuadratureRule,
) -> Result<Vec<Complex64>> {
    if dim > basis.count() {
        return Err(Error::InvalidInput(format!(
            "index set dimension {dim} exceeds basis count {}",
            basis.count()
        )));
    }
    let m = region_psi_integrals(basis, dim, region, rule);
    let inv_width = 1.0 / region.width();
    Ok((0..dim)
        .map(|l| basis.lambda()[l] * (m[l] * inv_width))
        .collect())
}

/// g = Σ_n f_α(μ_n²) μ_n ⟨φ, ζ_n⟩ ζ_n in PSWF coordinates.
pub fn regularized_solve(
    a: &DataMatrix,
    phi: &[Complex64],
    filter: &RegularizationFilter,
) -> Vec<Complex64> {
    assert_eq!(phi.len(), a.dim(), "probe vector length must equal the matrix dimension");
    let dim = a.dim();
    let mut g = vec![Complex64::new(0.0, 0.0); dim];
    for n in 0..dim {
        let mu = a.eigenvalues()[n];
        let weight = filter.apply(mu * mu) * mu;
        if weight == 0.0 {
            continue;
        }
        let zeta = a.eigenvector(n);
        let coeff: Complex64 = phi
            .iter()
            .zip(zeta)
            .map(|(p, z)| p * z.conj())
            .sum();
        let scale = weight * coeff;
        for (gi, zi) in g.iter_mut().zip(zeta) {
            *gi += scale * zi;
        }
    }
    g
}

/// LSM raw value ⟨S g, 1_R⟩ = Σ_j conj(λ_j) g_j ∫_R ψ_j and its reciprocal
/// indicator I(z) (the real part of 1/raw; ∞ sentinel when raw is exactly 0).
pub fn lsm_indicator(
    g: &[Complex64],
    basis: &PswfBasis,
    region: &ProbeRegion,
    rule: &QuadratureRule,
) -> (Complex64, Indicator) {
    let m = region_psi_integrals(basis, g.len(), region, rule);
    let raw: Complex64 = g
        .iter()
        .zip(&m)
        .enumerate()
        .map(|(j, (gj, mj))| basis.lambda()[j].conj() * gj * *mj)
        .sum();
    (raw, Indicator::reciprocal_re(raw))
}

/// GLSM indicator (|R|·⟨A g, g⟩)⁻¹; real since A is Hermitian.
pub fn glsm_indicator(g: &[Complex64], a: &DataMatrix, region: &ProbeRegion) -> Indicator {
    let ag = a.apply(g);
    let quad: Complex64 = ag.iter().zip(g).map(|(x, y)| x * y.conj()).sum();
    let denom = region.width() * quad.re;
    if denom == 0.0 {
        Indicator::Infinite
    } else {
        Indicator::Finite(1.0 / denom)
    }
}

/// Partial sum Σ_{n < n_terms} |⟨φ, ζ_n⟩|²/μ_n of the factorization-method
/// range series.
pub fn fm_partial_sum(a: &DataMatrix, phi: &[Complex64], n_terms: usize) -> f64 {
    assert!(n_terms <= a.dim());
    (0..n_terms)
        .map(|n| {
            let zeta = a.eigenvector(n);
            let coeff: Complex64 = phi.iter().zip(zeta).map(|(p, z)| p * z.conj()).sum();
            coeff.norm_sqr() / a.eigenvalues()[n]
        })
        .sum()
}

/// Differential indicator: solve against Ñ = N_inf + N (as `a_tilde`) and
/// against the background N_inf, and return the difference of LSM
/// reciprocals. ∞ sentinel propagates from either side.
pub fn differential_indicator(
    a_tilde: &DataMatrix,
    a_inf: &DataMatrix,
    region: &ProbeRegion,
    basis: &PswfBasis,
    dim: usize,
    filter: &RegularizationFilter,
    rule: &QuadratureRule,
) -> Result<Indicator> {
    if a_tilde.dim() != dim || a_inf.dim() != dim {
        return Err(Error::InvalidInput("matrix dimensions disagree with the index set".into()));
    }
    if a_tilde.c() != a_inf.c() {
        return Err(Error::InvalidInput("shifted and background matrices must share c".into()));
    }
    let phi = phi_coeffs(region, basis, dim, rule)?;
    let g_tilde = regularized_solve(a_tilde, &phi, filter);
    let g_inf = regularized_solve(a_inf, &phi, filter);
    let (_, i_tilde) = lsm_indicator(&g_tilde, basis, region, rule);
    let (_, i_inf) = lsm_indicator(&g_inf, basis, region, rule);
    Ok(match (i_tilde, i_inf) {
        (Indicator::Finite(a), Indicator::Finite(b)) => Indicator::Finite(a - b),
        _ => Indicator::Infinite,
    })
}

/// Reference contrast used for the per-z exact columns of a scan.
#[derive(Clone, Copy)]
pub enum Reference<'a> {
    None,
    /// q itself is positive on its support.
    Plain(&'a ContrastProfile),
    /// Sign-changing q with positive shift: q̃ = q_inf·1_{(−d,d)} + q.
    Shifted {
        contrast: &'a ContrastProfile,
        q_inf: f64,
        d_radius: f64,
    },
}

/// Everything a scan needs besides the grid; all references immutable, so the
/// per-z work parallelizes without shared state.
pub struct ScanContext<'a> {
    pub basis: &'a PswfBasis,
    pub rule: &'a QuadratureRule,
    pub matrix: &'a DataMatrix,
    /// Background matrix for the sign-changing mode; enables `i_diff`.
    pub background: Option<&'a DataMatrix>,
    pub filter: RegularizationFilter,
    /// Number of leading eigenpairs in the FM partial sum.
    pub fm_terms: usize,
    pub reference: Reference<'a>,
}

/// One sampling point of a scan.
#[derive(Debug, Clone)]
pub struct ScanRecord {
    pub z: f64,
    /// ⟨S g, 1_R⟩
    pub raw: Complex64,
    pub i_lsm: Indicator,
    pub i_glsm: Indicator,
    pub fm_sum: f64,
    /// Only in sign-changing mode.
    pub i_diff: Option<Indicator>,
    /// (⟨1/q, E_z⟩)⁻¹ where q (or q̃) is positive on R(z,ε); None elsewhere.
    pub q_avg_ref: Option<f64>,
    pub q_exact: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ScanResult {
    pub epsilon: f64,
    pub records: Vec<ScanRecord>,
}

/// Evaluate every indicator on the sampling grid; parallel over z when the
/// `parallel` feature is enabled. Records come back in grid order either way.
pub fn scan(ctx: &ScanContext, zs: &[f64], epsilon: f64) -> Result<ScanResult> {
    scan_impl(ctx, zs, epsilon, true)
}

/// Sequential variant of [`scan`]; the benchmark suite compares the two.
pub fn scan_serial(ctx: &ScanContext, zs: &[f64], epsilon: f64) -> Result<ScanResult> {
    scan_impl(ctx, zs, epsilon, false)
}

fn scan_impl(ctx: &ScanContext, zs: &[f64], epsilon: f64, parallel: bool) -> Result<ScanResult> {
    let dim = ctx.matrix.dim();
    if dim > ctx.basis.count() {
        return Err(Error::InvalidInput(format!(
            "matrix dimension {dim} exceeds basis count {}",
            ctx.basis.count()
        )));
    }
    if ctx.fm_terms > dim {
        return Err(Error::InvalidInput(format!(
            "fm_terms {} exceeds matrix dimension {dim}",
            ctx.fm_terms
        )));
    }
    if let Some(bg) = ctx.background {
        if bg.dim() != dim || bg.c() != ctx.matrix.c() {
            return Err(Error::InvalidInput(
                "background matrix must share dimension and bandwidth with the data matrix".into(),
            ));
        }
    }
    let offending: Vec<f64> = zs
        .iter()
        .copied()
        .filter(|&z| z - epsilon <= -1.0 || z + epsilon >= 1.0)
        .collect();
    if !offending.is_empty() {
        return Err(Error::InvalidInput(format!(
            "probe regions leave (-1, 1) for sampling points {offending:?} with epsilon {epsilon}"
        )));
    }

    let records = run_indexed(zs.len(), parallel, |i| {
        let z = zs[i];
        let region = ProbeRegion { z, epsilon };
        let m = region_psi_integrals(ctx.basis, dim, &region, ctx.rule);
        let inv_width = 1.0 / region.width();
        let phi: Vec<Complex64> = (0..dim)
            .map(|l| ctx.basis.lambda()[l] * (m[l] * inv_width))
            .collect();
        let g = regularized_solve(ctx.matrix, &phi, &ctx.filter);
        let raw: Complex64 = g
            .iter()
            .zip(&m)
            .enumerate()
            .map(|(j, (gj, mj))| ctx.basis.lambda()[j].conj() * gj * *mj)
            .sum();
        let i_lsm = Indicator::reciprocal_re(raw);
        let i_glsm = glsm_indicator(&g, ctx.matrix, &region);
        let fm_sum = fm_partial_sum(ctx.matrix, &phi, ctx.fm_terms);
        let i_diff = ctx.background.map(|bg| {
            let g_inf = regularized_solve(bg, &phi, &ctx.filter);
            let raw_inf: Complex64 = g_inf
                .iter()
                .zip(&m)
                .enumerate()
                .map(|(j, (gj, mj))| ctx.basis.lambda()[j].conj() * gj * *mj)
                .sum();
            match (i_lsm, Indicator::reciprocal_re(raw_inf)) {
                (Indicator::Finite(a), Indicator::Finite(b)) => Indicator::Finite(a - b),
                _ => Indicator::Infinite,
            }
        });
        let q_avg_ref = harmonic_reference(&ctx.reference, &region, ctx.rule);
        let q_exact = match ctx.reference {
            Reference::None => None,
            Reference::Plain(p) => Some(p.eval(z)),
            Reference::Shifted { contrast, .. } => Some(contrast.eval(z)),
        };
        ScanRecord {
            z,
            raw,
            i_lsm,
            i_glsm,
            fm_sum,
            i_diff,
            q_avg_ref,
            q_exact,
        }
    });

    Ok(ScanResult {
        epsilon,
        records,
    })
}

/// (⟨1/q, E_z⟩)⁻¹ for the reference contrast (q̃ in the shifted case), split at
/// the contrast's smooth-segment edges; None wherever the reference is not
/// strictly positive on the region.
fn harmonic_reference(
    reference: &Reference,
    region: &ProbeRegion,
    rule: &QuadratureRule,
) -> Option<f64> {
    let (contrast, shift) = match reference {
        Reference::None => return None,
        Reference::Plain(p) => (*p, None),
        Reference::Shifted { contrast, q_inf, d_radius } => (*contrast, Some((*q_inf, *d_radius))),
    };
    let (lo, hi) = region.bounds();
    let segments = contrast.segments();
    let mut edges = vec![lo];
    for &(a, b) in &segments {
        for e in [a, b] {
            if e > lo && e < hi {
                edges.push(e);
            }
        }
    }
    if let Some((_, d)) = shift {
        for e in [-d, d] {
            if e > lo && e < hi {
                edges.push(e);
            }
        }
    }
    edges.push(hi);
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut integral = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a < 1e-14 {
            continue;
        }
        let mid = 0.5 * (a + b);
        // one smooth branch of the reference covers the whole subinterval;
        // classify it by the midpoint so boundary nodes use one-sided limits
        let seg = segments.iter().position(|&(sa, sb)| mid > sa && mid < sb);
        let base = match shift {
            Some((q_inf, d)) if mid.abs() < d => q_inf,
            _ => 0.0,
        };
        let half = 0.5 * (b - a);
        for (&x, &wq) in rule.nodes().iter().zip(rule.weights()) {
            let s = mid + half * x;
            let v = base + seg.map_or(0.0, |i| contrast.smooth_eval(i, s));
            if v <= 0.0 {
                return None;
            }
            integral += half * wq / v;
        }
    }
    Some(region.width() / integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::assemble_data_matrix;
    use crate::pswf::{default_basis_size, solve_pswf};
    use crate::quadrature::lgl_rule;
    use proptest::prelude::*;

    fn test_basis(c: f64) -> PswfBasis {
        let n = default_basis_size(c);
        solve_pswf(c, n, 2 * n + 30).unwrap()
    }

    #[test]
    fn filter_contract() {
        let filters = [
            RegularizationFilter::spectral_cutoff(1e-8).unwrap(),
            RegularizationFilter::tikhonov(1e-8).unwrap(),
        ];
        for f in &filters {
            for i in 0..=180 {
                let mu = 10f64.powf(-16.0 + 0.1 * i as f64);
                assert!((mu * f.apply(mu)).abs() <= 1.0 + 1e-15);
            }
        }
        // pointwise convergence to 1/mu as alpha drops, per filter family
        for &mu in &[1e-6, 1e-3, 1.0, 50.0] {
            let mut prev = [f64::INFINITY; 2];
            for k in 2..=12 {
                let alpha = 10f64.powi(-k);
                let errs = [
                    (RegularizationFilter::spectral_cutoff(alpha).unwrap().apply(mu) - 1.0 / mu)
                        .abs()
                        * mu,
                    (RegularizationFilter::tikhonov(alpha).unwrap().apply(mu) - 1.0 / mu).abs()
                        * mu,
                ];
                for (e, p) in errs.iter().zip(prev.iter()) {
                    assert!(*e <= *p + 1e-12);
                }
                prev = errs;
            }
            let tail = (RegularizationFilter::tikhonov(1e-12).unwrap().apply(mu) - 1.0 / mu).abs()
                * mu;
            assert!(tail < 1e-5, "mu={mu}: residual {tail}");
        }
        assert!(RegularizationFilter::tikhonov(0.0).is_err());
        assert!(RegularizationFilter::spectral_cutoff(-1.0).is_err());
    }

    #[test]
    fn probe_region_validation() {
        assert!(ProbeRegion::new(0.9, 0.05).is_ok());
        assert!(ProbeRegion::new(0.96, 0.05).is_err());
        assert!(ProbeRegion::new(0.0, 0.0).is_err());
        let r = ProbeRegion::new(0.2, 0.05).unwrap();
        assert_eq!(r.width(), 0.1);
        assert_eq!(r.bounds(), (0.15000000000000002, 0.25));
    }

    #[test]
    fn phi_parity_at_origin() {
        let basis = test_basis(20.0);
        let rule = lgl_rule(100).unwrap();
        let region = ProbeRegion::new(0.0, 0.05).unwrap();
        let phi = phi_coeffs(&region, &basis, 30, &rule).unwrap();
        for l in (1..30).step_by(2) {
            assert!(phi[l].norm() < 1e-12, "odd coefficient {l} = {}", phi[l]);
        }
        assert!(phi[0].norm() > 1e-3);
    }

    #[test]
    fn phi_small_epsilon_limit() {
        // <E_z, psi_l> -> psi_l(z) as eps -> 0
        let basis = test_basis(20.0);
        let rule = lgl_rule(100).unwrap();
        let z = 0.2;
        let region = ProbeRegion::new(z, 1e-5).unwrap();
        let phi = phi_coeffs(&region, &basis, 20, &rule).unwrap();
        for (l, p) in phi.iter().enumerate() {
            let avg = p / basis.lambda()[l];
            assert!(
                (avg.re - basis.eval(l, z)).abs() < 1e-6,
                "l={l}: {} vs {}",
                avg.re,
                basis.eval(l, z)
            );
        }
    }

    #[test]
    fn phi_refinement_stable() {
        let basis = test_basis(20.0);
        let region = ProbeRegion::new(0.2, 0.05).unwrap();
        let a = phi_coeffs(&region, &basis, 30, &lgl_rule(100).unwrap()).unwrap();
        let b = phi_coeffs(&region, &basis, 30, &lgl_rule(1000).unwrap()).unwrap();
        for l in 0..30 {
            assert!((a[l] - b[l]).norm() < 1e-10);
        }
    }

    #[test]
    fn regularized_solve_diagonal_oracle() {
        // diagonal matrix: cutoff below all mu^2 inverts mode by mode
        let dim = 6;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mus = [2.0, 1.0, 0.5, 0.25, 0.125, 0.0625];
        for (i, &mu) in mus.iter().enumerate() {
            entries[i * dim + i] = Complex64::new(mu, 0.0);
        }
        let a = DataMatrix::from_entries(5.0, dim, entries).unwrap();
        let phi: Vec<Complex64> = (0..dim)
            .map(|i| Complex64::new(0.3 + i as f64, 0.1 * i as f64))
            .collect();
        let g = regularized_solve(
            &a,
            &phi,
            &RegularizationFilter::spectral_cutoff(1e-9).unwrap(),
        );
        // eigenvectors of a diagonal matrix are coordinate axes, so g_j = phi_j / mu_j
        for j in 0..dim {
            assert!(
                (g[j] - phi[j] / mus[j]).norm() < 1e-12,
                "j={j}: {} vs {}",
                g[j],
                phi[j] / mus[j]
            );
        }

        // cutoff above mu_0^2 kills everything
        let g0 = regularized_solve(&a, &phi, &RegularizationFilter::spectral_cutoff(5.0).unwrap());
        assert!(g0.iter().all(|z| z.norm() == 0.0));

        // huge Tikhonov drives the norm to zero
        let g_tik = regularized_solve(&a, &phi, &RegularizationFilter::tikhonov(1e12).unwrap());
        let norm: f64 = g_tik.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm < 1e-10);
    }

    #[test]
    fn sentinel_reciprocity() {
        let basis = test_basis(10.0);
        let rule = lgl_rule(100).unwrap();
        let region = ProbeRegion::new(0.1, 0.05).unwrap();
        let g = vec![Complex64::new(0.0, 0.0); 10];
        let (raw, ind) = lsm_indicator(&g, &basis, &region, &rule);
        assert_eq!(raw, Complex64::new(0.0, 0.0));
        assert!(ind.is_infinite());

        let dim = 4;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0 + i as f64, 0.0);
        }
        let a = DataMatrix::from_entries(10.0, dim, entries).unwrap();
        assert!(glsm_indicator(&vec![Complex64::new(0.0, 0.0); dim], &a, &region).is_infinite());
        assert_eq!(fm_partial_sum(&a, &vec![Complex64::new(0.0, 0.0); dim], dim), 0.0);
    }

    #[test]
    fn glsm_positive_for_definite_matrix() {
        let dim = 5;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(2.0 - 0.3 * i as f64, 0.0);
        }
        let a = DataMatrix::from_entries(10.0, dim, entries).unwrap();
        let region = ProbeRegion::new(0.0, 0.05).unwrap();
        let g: Vec<Complex64> = (0..dim).map(|i| Complex64::new(1.0, i as f64)).collect();
        match glsm_indicator(&g, &a, &region) {
            Indicator::Finite(v) => assert!(v > 0.0),
            Indicator::Infinite => panic!("unexpected sentinel"),
        }
    }

    #[test]
    fn fm_equals_glsm_quadratic_form_under_full_cutoff() {
        // identity ||g^FM||^2 = sum |<phi, zeta_n>|^2 / mu_n: with every mode
        // kept, <A g, g> equals the FM sum
        let dim = 6;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0 / (1.0 + i as f64), 0.0);
            for j in i + 1..dim {
                let z = Complex64::new(0.01 * (i + j) as f64, 0.005 * (j - i) as f64);
                entries[i * dim + j] = z;
                entries[j * dim + i] = z.conj();
            }
        }
        let a = DataMatrix::from_entries(10.0, dim, entries).unwrap();
        let phi: Vec<Complex64> = (0..dim)
            .map(|i| Complex64::new(0.2 * i as f64 - 0.3, 0.1))
            .collect();
        let g = regularized_solve(&a, &phi, &RegularizationFilter::spectral_cutoff(0.0).unwrap());
        let ag = a.apply(&g);
        let quad: Complex64 = ag.iter().zip(&g).map(|(x, y)| x * y.conj()).sum();
        let fm = fm_partial_sum(&a, &phi, dim);
        assert!((quad.re - fm).abs() < 1e-12 * fm.abs().max(1.0));
        assert!(quad.im.abs() < 1e-12);
    }

    #[test]
    fn fm_interior_exterior_contrast() {
        let c = 10.0;
        let basis = test_basis(c);
        let rule = lgl_rule(100).unwrap();
        let profile = ContrastProfile::constant(0.66).unwrap();
        let dim = 20;
        let a = assemble_data_matrix(&profile, &basis, dim, &rule).unwrap();
        let n_terms = a.eigenvalues().iter().take_while(|&&mu| mu > 1e-13).count();
        let eps = 0.05;
        let fm_at = |z: f64| {
            let region = ProbeRegion::new(z, eps).unwrap();
            let phi = phi_coeffs(&region, &basis, dim, &rule).unwrap();
            fm_partial_sum(&a, &phi, n_terms)
        };
        let interior = fm_at(0.0);
        let exterior = fm_at(0.9);
        assert!(
            exterior > 10.0 * interior,
            "exterior {exterior} vs interior {interior}"
        );
    }

    #[test]
    fn blow_up_dichotomy_in_cutoff() {
        // raw value at an interior z is stable as the cutoff drops; at an
        // exterior z it keeps growing
        let c = 40.0;
        let basis = test_basis(c);
        let rule = lgl_rule(100).unwrap();
        let profile = ContrastProfile::constant(0.66).unwrap();
        let dim = 54;
        let a = assemble_data_matrix(&profile, &basis, dim, &rule).unwrap();
        let eps = 0.05;
        let raw_at = |z: f64, mu_floor: f64| {
            let region = ProbeRegion::new(z, eps).unwrap();
            let phi = phi_coeffs(&region, &basis, dim, &rule).unwrap();
            let filter = RegularizationFilter::spectral_cutoff(mu_floor * mu_floor).unwrap();
            let g = regularized_solve(&a, &phi, &filter);
            let (raw, _) = lsm_indicator(&g, &basis, &region, &rule);
            raw.norm()
        };
        let interior_hi = raw_at(0.0, 1e-8);
        let interior_lo = raw_at(0.0, 1e-12);
        assert!(
            (interior_hi - interior_lo).abs() < 0.01 * interior_hi,
            "interior raw moved from {interior_hi} to {interior_lo}"
        );
        let exterior_hi = raw_at(0.9, 1e-8);
        let exterior_lo = raw_at(0.9, 1e-12);
        assert!(
            exterior_lo > 10.0 * exterior_hi,
            "exterior raw {exterior_hi} -> {exterior_lo}"
        );
    }

    #[test]
    fn differential_zero_for_empty_scatterer() {
        let c = 10.0;
        let basis = test_basis(c);
        let rule = lgl_rule(100).unwrap();
        let dim = 16;
        let a_inf =
            crate::forward::assemble_background_matrix(1.0, 0.8, &basis, dim, &rule).unwrap();
        // empty scatterer: tilde operator equals the background
        let region = ProbeRegion::new(0.3, 0.05).unwrap();
        let filter = RegularizationFilter::spectral_cutoff(1e-26).unwrap();
        let ind =
            differential_indicator(&a_inf, &a_inf, &region, &basis, dim, &filter, &rule).unwrap();
        match ind {
            Indicator::Finite(v) => assert!(v.abs() < 1e-10, "I_diff = {v}"),
            Indicator::Infinite => panic!("unexpected sentinel"),
        }
    }

    #[test]
    fn differential_tracks_shifted_harmonic_difference() {
        // constant positive q inside D: I_diff approximates
        // <1/(q_inf+q), E_z>^-1 - <1/q_inf, E_z>^-1 at interior z, up to the
        // truncation ceiling of the retained spectrum
        let c = 20.0;
        let basis = test_basis(c);
        let rule = lgl_rule(100).unwrap();
        let dim = 37;
        let q_inf = 1.0;
        let d_radius = 0.8;
        let q_val = 0.5;
        let contrast = ContrastProfile::piecewise(vec![(-0.5, 0.5, q_val)]).unwrap();
        let a_q = assemble_data_matrix(&contrast, &basis, dim, &rule).unwrap();
        let a_inf =
            crate::forward::assemble_background_matrix(q_inf, d_radius, &basis, dim, &rule)
                .unwrap();
        let a_tilde = a_inf.add(&a_q).unwrap();
        let region = ProbeRegion::new(0.0, 0.1).unwrap();
        let filter = RegularizationFilter::spectral_cutoff(1e-26).unwrap();
        let ind = differential_indicator(&a_tilde, &a_inf, &region, &basis, dim, &filter, &rule)
            .unwrap();
        let got = ind.finite().expect("finite interior differential");
        let want = (q_inf + q_val) - q_inf; // harmonic average of constants
        assert!(got > 0.0, "sign flipped: {got}");
        assert!(
            (got - want).abs() < 0.3 * want,
            "I_diff = {got} vs shifted harmonic difference {want}"
        );
    }

    #[test]
    fn scan_reference_columns() {
        let c = 10.0;
        let basis = test_basis(c);
        let rule = lgl_rule(100).unwrap();
        let r = 0.66;
        let profile = ContrastProfile::constant(r).unwrap();
        let dim = 16;
        let a = assemble_data_matrix(&profile, &basis, dim, &rule).unwrap();
        let ctx = ScanContext {
            basis: &basis,
            rule: &rule,
            matrix: &a,
            background: None,
            filter: RegularizationFilter::spectral_cutoff(1e-26).unwrap(),
            fm_terms: dim,
            reference: Reference::Plain(&profile),
        };
        let zs = [0.0, 0.3, -0.55, 0.9];
        let out = scan(&ctx, &zs, 0.05).unwrap();
        assert_eq!(out.records.len(), 4);
        // constant q: harmonic average equals 2r at interior points
        for rec in &out.records[..3] {
            let q_avg = rec.q_avg_ref.unwrap();
            assert!((q_avg - 2.0 * r).abs() < 1e-12, "q_avg_ref {q_avg}");
            assert_eq!(rec.q_exact.unwrap(), 2.0 * r);
        }
        // z = 0.9 is outside the support
        assert!(out.records[3].q_avg_ref.is_none());
        assert_eq!(out.records[3].q_exact.unwrap(), 0.0);

        // inc-dec: harmonic mean < value at the peak
        let p2 = ContrastProfile::inc_dec(r).unwrap();
        let a2 = assemble_data_matrix(&p2, &basis, dim, &rule).unwrap();
        let ctx2 = ScanContext {
            matrix: &a2,
            reference: Reference::Plain(&p2),
            ..ctx
        };
        let out2 = scan(&ctx2, &[0.0], 0.05).unwrap();
        let q_avg = out2.records[0].q_avg_ref.unwrap();
        assert!(q_avg < p2.eval(0.0));
        // oracle: direct quadrature of E_0/q on the split halves
        let quad_rule = lgl_rule(400).unwrap();
        let left = quad_rule
            .integrate_real(-0.05, 0.0, |s| 1.0 / (2.0 * r - 2.0 * s.abs()))
            .unwrap();
        let right = quad_rule
            .integrate_real(0.0, 0.05, |s| 1.0 / (2.0 * r - 2.0 * s.abs()))
            .unwrap();
        let oracle = 0.1 / (left + right);
        assert!((q_avg - oracle).abs() < 1e-10, "{q_avg} vs {oracle}");
    }

    #[test]
    fn scan_rejects_bad_grid_and_handles_empty() {
        let c = 10.0;
        let basis = test_basis(c);
        let rule = lgl_rule(60).unwrap();
        let profile = ContrastProfile::constant(0.5).unwrap();
        let a = assemble_data_matrix(&profile, &basis, 10, &rule).unwrap();
        let ctx = ScanContext {
            basis: &basis,
            rule: &rule,
            matrix: &a,
            background: None,
            filter: RegularizationFilter::spectral_cutoff(1e-26).unwrap(),
            fm_terms: 10,
            reference: Reference::None,
        };
        let err = scan(&ctx, &[0.0, 0.97], 0.05).unwrap_err();
        assert!(err.to_string().contains("0.97"), "{err}");
        let empty = scan(&ctx, &[], 0.05).unwrap();
        assert!(empty.records.is_empty());
    }

    #[test]
    fn scan_parallel_matches_serial() {
        let c = 10.0;
        let basis = test_basis(c);
        let rule = lgl_rule(100).unwrap();
        let profile = ContrastProfile::oscillatory(0.66, 4).unwrap();
        let dim = 16;
        let a = assemble_data_matrix(&profile, &basis, dim, &rule).unwrap();
        let ctx = ScanContext {
            basis: &basis,
            rule: &rule,
            matrix: &a,
            background: None,
            filter: RegularizationFilter::spectral_cutoff(1e-26).unwrap(),
            fm_terms: dim,
            reference: Reference::Plain(&profile),
        };
        let zs: Vec<f64> = (0..41).map(|i| -0.8 + 0.04 * i as f64).collect();
        let a_out = scan(&ctx, &zs, 0.05).unwrap();
        let b_out = scan_serial(&ctx, &zs, 0.05).unwrap();
        for (x, y) in a_out.records.iter().zip(&b_out.records) {
            assert_eq!(x.z, y.z);
            assert_eq!(x.raw, y.raw);
            assert_eq!(x.i_lsm, y.i_lsm);
            assert_eq!(x.fm_sum, y.fm_sum);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn filter_contract_random(
            alpha_exp in -12.0f64..-1.0,
            mu_exp in -16.0f64..2.0,
        ) {
            let alpha = 10f64.powf(alpha_exp);
            let mu = 10f64.powf(mu_exp);
            for f in [
                RegularizationFilter::spectral_cutoff(alpha).unwrap(),
                RegularizationFilter::tikhonov(alpha).unwrap(),
            ] {
                prop_assert!((mu * f.apply(mu)).abs() <= 1.0 + 1e-15);
            }
        }
    }
}
