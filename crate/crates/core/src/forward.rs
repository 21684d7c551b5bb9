//! Contrast profiles, closed-form forward data, and the Galerkin data matrix.
//!
//! The measured data for a contrast q supported inside (−1, 1) is
//! u(t) = ∫ e^{i2cts} q(s) ds, and the data operator is
//! (N g)(t) = ∫ u((t−s)/2) g(s) ds. Its Galerkin matrix in the PSWF basis,
//! A_{jl} = ⟨N ψ_j, ψ_l⟩, is Hermitian and strongly compressed: the factorization
//! N = S*_Ω T_Ω S_Ω gives A_{jl} = conj(λ_j) λ_l ∫_Ω q ψ_j ψ_l, so
//! |A_{jl}| ≤ |λ_j||λ_l|·sup|q|.
//!
//! u is evaluated analytically (closed form per profile family), not tabulated,
//! so the kernel-route assembly carries no interpolation error. The factorized
//! route is kept as an independent cross-check.

use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::Distribution;

use crate::linalg::{hermitian_eigen, hermitian_spectral_norm};
use crate::run_indexed;
use crate::pswf::PswfBasis;
use crate::quadrature::QuadratureRule;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum ProfileKind {
    /// q = 2r on (−r, r)
    Constant,
    /// q = 2r − 2|s| on (−r, r)
    IncDec,
    /// q = 0.5r + 0.5|s| on (−r, r)
    DecInc,
    /// q = 0.5r − 0.25r·cos(mπs/r) on (−r, r)
    Oscillatory { m: u32 },
    /// two blocks of value 2r and width r, inner edges at ±gap/2
    TwoComponent { gap: f64 },
    /// disjoint constant pieces (a, b, value), sorted
    Piecewise { pieces: Vec<(f64, f64, f64)> },
}

/// A synthetic contrast q with support strictly inside (−1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastProfile {
    kind: ProfileKind,
    r: f64,
}

impl ContrastProfile {
    pub fn constant(r: f64) -> Result<Self> {
        Self::simple(ProfileKind::Constant, r)
    }

    pub fn inc_dec(r: f64) -> Result<Self> {
        Self::simple(ProfileKind::IncDec, r)
    }

    pub fn dec_inc(r: f64) -> Result<Self> {
        Self::simple(ProfileKind::DecInc, r)
    }

    pub fn oscillatory(r: f64, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("oscillation count m must be >= 1".into()));
        }
        Self::simple(ProfileKind::Oscillatory { m }, r)
    }

    /// Two constant blocks of value 2r and width r with inner edges at ±gap/2.
    pub fn two_component(r: f64, gap: f64) -> Result<Self> {
        if !(r > 0.0) || !(gap > 0.0) {
            return Err(Error::InvalidInput(format!(
                "two-component profile needs r > 0 and gap > 0, got r={r}, gap={gap}"
            )));
        }
        if gap / 2.0 + r >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "two-component support reaches {} >= 1",
                gap / 2.0 + r
            )));
        }
        Ok(Self { kind: ProfileKind::TwoComponent { gap }, r })
    }

    /// Piecewise-constant profile from disjoint pieces (a, b, value).
    pub fn piecewise(mut pieces: Vec<(f64, f64, f64)>) -> Result<Self> {
        pieces.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut r: f64 = 0.0;
        for (i, &(a, b, _)) in pieces.iter().enumerate() {
            if !(a < b) {
                return Err(Error::InvalidInput(format!("piece [{a}, {b}] is degenerate")));
            }
            if a <= -1.0 || b >= 1.0 {
                return Err(Error::InvalidInput(format!(
                    "piece [{a}, {b}] is not strictly inside (-1, 1)"
                )));
            }
            if i > 0 && a < pieces[i - 1].1 {
                return Err(Error::InvalidInput(format!(
                    "pieces overlap at {a}"
                )));
            }
            r = r.max(a.abs()).max(b.abs());
        }
        Ok(Self { kind: ProfileKind::Piecewise { pieces }, r })
    }

    fn simple(kind: ProfileKind, r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidInput(format!(
                "support radius must lie in (0, 1), got {r}"
            )));
        }
        Ok(Self { kind, r })
    }

    /// Support radius: q vanishes outside (−radius, radius).
    pub fn support_radius(&self) -> f64 {
        match &self.kind {
            ProfileKind::TwoComponent { gap } => gap / 2.0 + self.r,
            _ => self.r,
        }
    }

    /// q(s); zero outside the declared support.
    pub fn eval(&self, s: f64) -> f64 {
        let r = self.r;
        match &self.kind {
            ProfileKind::Constant => {
                if s.abs() < r {
                    2.0 * r
                } else {
                    0.0
                }
            }
            ProfileKind::IncDec => {
                if s.abs() < r {
                    2.0 * r - 2.0 * s.abs()
                } else {
                    0.0
                }
            }
            ProfileKind::DecInc => {
                if s.abs() < r {
                    0.5 * r + 0.5 * s.abs()
                } else {
                    0.0
                }
            }
            ProfileKind::Oscillatory { m } => {
                if s.abs() < r {
                    0.5 * r - 0.25 * r * (*m as f64 * std::f64::consts::PI * s / r).cos()
                } else {
                    0.0
                }
            }
            ProfileKind::TwoComponent { gap } => {
                let lo = gap / 2.0;
                let hi = gap / 2.0 + r;
                if s.abs() > lo && s.abs() < hi {
                    2.0 * r
                } else {
                    0.0
                }
            }
            ProfileKind::Piecewise { pieces } => pieces
                .iter()
                .filter(|&&(a, b, _)| s > a && s < b)
                .map(|&(_, _, v)| v)
                .sum(),
        }
    }

    /// sup |q| over the support (analytic).
    pub fn sup_abs(&self) -> f64 {
        let r = self.r;
        match &self.kind {
            ProfileKind::Constant | ProfileKind::IncDec | ProfileKind::TwoComponent { .. } => {
                2.0 * r
            }
            ProfileKind::DecInc => r,
            ProfileKind::Oscillatory { .. } => 0.75 * r,
            ProfileKind::Piecewise { pieces } => {
                pieces.iter().fold(0.0f64, |m, &(_, _, v)| m.max(v.abs()))
            }
        }
    }

    /// Smooth extension of segment `segment` evaluated at `s`, including the
    /// segment endpoints. Quadrature rules sample segment boundaries, where the
    /// open-support [`ContrastProfile::eval`] already returns 0; integrating
    /// the smooth extension per segment keeps those samples exact.
    pub fn smooth_eval(&self, segment: usize, s: f64) -> f64 {
        let r = self.r;
        match &self.kind {
            ProfileKind::Constant | ProfileKind::TwoComponent { .. } => 2.0 * r,
            ProfileKind::IncDec => 2.0 * r - 2.0 * s.abs(),
            ProfileKind::DecInc => 0.5 * r + 0.5 * s.abs(),
            ProfileKind::Oscillatory { m } => {
                0.5 * r - 0.25 * r * (*m as f64 * std::f64::consts::PI * s / r).cos()
            }
            ProfileKind::Piecewise { pieces } => pieces[segment].2,
        }
    }

    /// Maximal intervals on which q is smooth (|s| kinks and block edges split
    /// the support); integrands involving q are integrated per segment so the
    /// quadrature stays spectral.
    pub fn segments(&self) -> Vec<(f64, f64)> {
        let r = self.r;
        match &self.kind {
            ProfileKind::Constant | ProfileKind::Oscillatory { .. } => vec![(-r, r)],
            ProfileKind::IncDec | ProfileKind::DecInc => vec![(-r, 0.0), (0.0, r)],
            ProfileKind::TwoComponent { gap } => {
                let lo = gap / 2.0;
                vec![(-lo - r, -lo), (lo, lo + r)]
            }
            ProfileKind::Piecewise { pieces } => {
                pieces.iter().map(|&(a, b, _)| (a, b)).collect()
            }
        }
    }

    /// u(t) = ∫ e^{i2cts} q(s) ds by the closed form of each family.
    pub fn forward(&self, c: f64, t: f64) -> Complex64 {
        let k = 2.0 * c * t;
        let r = self.r;
        match &self.kind {
            // 2r ∫_{-r}^{r} e^{iks} ds = 4r² sinc(kr)
            ProfileKind::Constant => Complex64::new(4.0 * r * r * sinc(k * r), 0.0),
            // 2 ∫_0^r (2r−2s) cos(ks) ds = 4 (1−cos kr)/k²
            ProfileKind::IncDec => Complex64::new(4.0 * r * r * cos_deficit(k * r), 0.0),
            // 2 ∫_0^r (r/2 + s/2) cos(ks) ds = 2r sin(kr)/k + (cos(kr)−1)/k²
            ProfileKind::DecInc => {
                Complex64::new(2.0 * r * r * sinc(k * r) - r * r * cos_deficit(k * r), 0.0)
            }
            // r² sinc(kr) − (r²/4)[sinc((ω−k)r) + sinc((ω+k)r)], ω = mπ/r
            ProfileKind::Oscillatory { m } => {
                let omega = *m as f64 * std::f64::consts::PI / r;
                let v = r * r * sinc(k * r)
                    - 0.25 * r * r * (sinc((omega - k) * r) + sinc((omega + k) * r));
                Complex64::new(v, 0.0)
            }
            ProfileKind::TwoComponent { gap } => {
                let lo = gap / 2.0;
                let v = 2.0 * r;
                constant_piece_transform(k, lo, lo + r, v)
                    + constant_piece_transform(k, -lo - r, -lo, v)
            }
            ProfileKind::Piecewise { pieces } => pieces
                .iter()
                .map(|&(a, b, v)| constant_piece_transform(k, a, b, v))
                .sum(),
        }
    }
}

/// sin(x)/x, series for small |x|.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// (1 − cos x)/x², series for small |x|.
fn cos_deficit(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        0.5 - x2 / 24.0 + x2 * x2 / 720.0
    } else {
        (1.0 - x.cos()) / (x * x)
    }
}

/// ∫_a^b v e^{iks} ds = v (b−a) e^{ik(a+b)/2} sinc(k(b−a)/2).
fn constant_piece_transform(k: f64, a: f64, b: f64, v: f64) -> Complex64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    v * (b - a) * sinc(k * half) * Complex64::from_polar(1.0, k * mid)
}

/// Standalone form of [`ContrastProfile::forward`], matching the operation
/// signature used throughout the tests.
pub fn forward_data(profile: &ContrastProfile, c: f64, t: f64) -> Complex64 {
    profile.forward(c, t)
}

/// Hermitian Galerkin matrix of the data operator in PSWF coordinates, with
/// its eigendecomposition.
#[derive(Debug, Clone)]
pub struct DataMatrix {
    c: f64,
    dim: usize,
    /// row-major Hermitian entries
    entries: Vec<Complex64>,
    /// eigenvalues, descending
    mu: Vec<f64>,
    /// eigenvectors, column-major (column n = ζ_n in PSWF coordinates)
    zeta: Vec<Complex64>,
    noise_level: f64,
    seed: Option<u64>,
}

impl DataMatrix {
    /// Wrap Hermitian entries (row-major, `dim × dim`); symmetrizes the
    /// rounding residue and eigendecomposes.
    pub fn from_entries(c: f64, dim: usize, mut entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim || dim == 0 {
            return Err(Error::InvalidInput(format!(
                "entry buffer {} does not match dimension {dim}",
                entries.len()
            )));
        }
        hermitianize(&mut entries, dim);
        let (mu, zeta) = hermitian_eigen(&entries, dim)?;
        Ok(DataMatrix {
            c,
            dim,
            entries,
            mu,
            zeta,
            noise_level: 0.0,
            seed: None,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, j: usize, l: usize) -> Complex64 {
        self.entries[j * self.dim + l]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// μ_n, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.mu
    }

    /// ζ_n in PSWF coordinates.
    pub fn eigenvector(&self, n: usize) -> &[Complex64] {
        &self.zeta[n * self.dim..(n + 1) * self.dim]
    }

    pub fn noise_level(&self) -> f64 {
        self.noise_level
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// ‖A‖₂ = max |μ_n|.
    pub fn spectral_norm(&self) -> f64 {
        self.mu.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    /// A g.
    pub fn apply(&self, g: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(g.len(), self.dim);
        (0..self.dim)
            .map(|j| (0..self.dim).map(|l| self.entries[j * self.dim + l] * g[l]).sum())
            .collect()
    }

    /// Entrywise sum (Ñ = N_inf + N); bandwidths and dimensions must match.
    pub fn add(&self, other: &DataMatrix) -> Result<DataMatrix> {
        if self.dim != other.dim {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        if self.c != other.c {
            return Err(Error::InvalidInput(format!(
                "bandwidth mismatch: {} vs {}",
                self.c, other.c
            )));
        }
        let entries: Vec<Complex64> = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        DataMatrix::from_entries(self.c, self.dim, entries)
    }

    /// Serialize as `{stem}_re.csv`, `{stem}_im.csv` and `{stem}_header.json`.
    pub fn write_csv(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (suffix, part) in [("re", true), ("im", false)] {
            let mut f = std::io::BufWriter::new(std::fs::File::create(
                dir.join(format!("{stem}_{suffix}.csv")),
            )?);
            for j in 0..self.dim {
                let row: Vec<String> = (0..self.dim)
                    .map(|l| {
                        let z = self.entries[j * self.dim + l];
                        format!("{}", if part { z.re } else { z.im })
                    })
                    .collect();
                writeln!(f, "{}", row.join(","))?;
            }
        }
        let header = MatrixHeader {
            c: self.c,
            dim: self.dim,
            delta: self.noise_level,
            seed: self.seed,
        };
        std::fs::write(
            dir.join(format!("{stem}_header.json")),
            serde_json::to_string_pretty(&header).expect("header serialization"),
        )?;
        Ok(())
    }

    /// Load a matrix written by [`DataMatrix::write_csv`].
    pub fn read_csv(dir: &Path, stem: &str) -> Result<DataMatrix> {
        let header: MatrixHeader = serde_json::from_str(&std::fs::read_to_string(
            dir.join(format!("{stem}_header.json")),
        )?)
        .map_err(|e| Error::InvalidInput(format!("bad matrix header: {e}")))?;
        let parse = |suffix: &str| -> Result<Vec<f64>> {
            let text = std::fs::read_to_string(dir.join(format!("{stem}_{suffix}.csv")))?;
            let mut out = Vec::with_capacity(header.dim * header.dim);
            for line in text.lines() {
                for tok in line.split(',') {
                    out.push(tok.trim().parse::<f64>().map_err(|e| {
                        Error::InvalidInput(format!("bad matrix entry {tok:?}: {e}"))
                    })?);
                }
            }
            Ok(out)
        };
        let re = parse("re")?;
        let im = parse("im")?;
        if re.len() != header.dim * header.dim || im.len() != re.len() {
            return Err(Error::InvalidInput("matrix CSV dimensions disagree with header".into()));
        }
        let entries: Vec<Complex64> = re
            .iter()
            .zip(&im)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        let mut m = DataMatrix::from_entries(header.c, header.dim, entries)?;
        m.noise_level = header.delta;
        m.seed = header.seed;
        Ok(m)
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct MatrixHeader {
    c: f64,
    dim: usize,
    delta: f64,
    seed: Option<u64>,
}

fn hermitianize(a: &mut [Complex64], n: usize) {
    for j in 0..n {
        for l in j..n {
            let avg = 0.5 * (a[j * n + l] + a[l * n + j].conj());
            a[j * n + l] = avg;
            a[l * n + j] = avg.conj();
        }
        a[j * n + j] = Complex64::new(a[j * n + j].re, 0.0);
    }
}

/// Kernel-route assembly: A_{jl} = ∫∫ u((t−s)/2) ψ_j(s) ψ_l(t) ds dt with both
/// integrals on the supplied rule and u evaluated analytically.
pub fn assemble_data_matrix(
    profile: &ContrastProfile,
    basis: &PswfBasis,
    dim: usize,
    rule: &QuadratureRule,
) -> Result<DataMatrix> {
    let (psi, u) = assembly_tables(profile, basis, dim, rule)?;
    let entries = kernel_entries(basis, dim, rule, &psi, &u, true);
    DataMatrix::from_entries(basis.bandwidth(), dim, entries)
}

/// Sequential variant of [`assemble_data_matrix`]; the benchmark suite compares
/// the two.
pub fn assemble_data_matrix_serial(
    profile: &ContrastProfile,
    basis: &PswfBasis,
    dim: usize,
    rule: &QuadratureRule,
) -> Result<DataMatrix> {
    let (psi, u) = assembly_tables(profile, basis, dim, rule)?;
    let entries = kernel_entries(basis, dim, rule, &psi, &u, false);
    DataMatrix::from_entries(basis.bandwidth(), dim, entries)
}

fn assembly_tables(
    profile: &ContrastProfile,
    basis: &PswfBasis,
    dim: usize,
    rule: &QuadratureRule,
) -> Result<(Vec<f64>, Vec<Complex64>)> {
    if dim == 0 || dim > basis.count() {
        return Err(Error::InvalidInput(format!(
            "index set dimension {dim} exceeds basis count {}",
            basis.count()
        )));
    }
    if profile.support_radius() >= 1.0 {
        return Err(Error::InvalidInput("contrast support reaches the domain boundary".into()));
    }
    let nodes = rule.nodes();
    let nq = nodes.len();
    let psi = basis.eval_matrix_up_to(dim, nodes);
    let c = basis.bandwidth();
    let mut u = vec![Complex64::new(0.0, 0.0); nq * nq];
    for b in 0..nq {
        for a in 0..nq {
            u[b * nq + a] = profile.forward(c, 0.5 * (nodes[b] - nodes[a]));
        }
    }
    Ok((psi, u))
}

fn kernel_entries(
    _basis: &PswfBasis,
    dim: usize,
    rule: &QuadratureRule,
    psi: &[f64],
    u: &[Complex64],
    parallel: bool,
) -> Vec<Complex64> {
    let nq = rule.nodes().len();
    let w = rule.weights();

    // inner s-integral: G[b][j] = sum_a w_a u((t_b - s_a)/2) psi_j(s_a)
    let inner_row = |b: usize| -> Vec<Complex64> {
        let urow = &u[b * nq..(b + 1) * nq];
        (0..dim)
            .map(|j| {
                let pj = &psi[j * nq..(j + 1) * nq];
                (0..nq).map(|a| w[a] * urow[a] * pj[a]).sum()
            })
            .collect()
    };
    let g: Vec<Vec<Complex64>> = run_indexed(nq, parallel, inner_row);

    // outer t-integral against psi_l
    let outer_row = |j: usize| -> Vec<Complex64> {
        (0..dim)
            .map(|l| {
                let pl = &psi[l * nq..(l + 1) * nq];
                (0..nq).map(|b| w[b] * pl[b] * g[b][j]).sum()
            })
            .collect()
    };
    let rows: Vec<Vec<Complex64>> = run_indexed(dim, parallel, outer_row);
    rows.into_iter().flatten().collect()
}

/// Factorized-route assembly from N = S*_Ω T_Ω S_Ω:
/// A_{jl} = conj(λ_j) λ_l ∫_Ω q ψ_j ψ_l, with the support integral taken per
/// smooth segment of q. Independent cross-check of the kernel route.
pub fn assemble_data_matrix_factorized(
    profile: &ContrastProfile,
    basis: &PswfBasis,
    dim: usize,
    rule: &QuadratureRule,
) -> Result<DataMatrix> {
    if dim == 0 || dim > basis.count() {
        return Err(Error::InvalidInput(format!(
            "index set dimension {dim} exceeds basis count {}",
            basis.count()
        )));
    }
    let nq = rule.nodes().len();
    let mut t = vec![0.0f64; dim * dim];
    for (idx, (a, b)) in profile.segments().into_iter().enumerate() {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let pts: Vec<f64> = rule.nodes().iter().map(|&x| mid + half * x).collect();
        let psi = basis.eval_matrix_up_to(dim, &pts);
        let q: Vec<f64> = pts.iter().map(|&s| profile.smooth_eval(idx, s)).collect();
        for j in 0..dim {
            for l in j..dim {
                let mut acc = 0.0;
                for i in 0..nq {
                    acc += rule.weights()[i] * q[i] * psi[j * nq + i] * psi[l * nq + i];
                }
                let v = half * acc;
                t[j * dim + l] += v;
                if l != j {
                    t[l * dim + j] += v;
                }
            }
        }
    }
    let lam = basis.lambda();
    let entries: Vec<Complex64> = (0..dim * dim)
        .map(|idx| {
            let (j, l) = (idx / dim, idx % dim);
            lam[j].conj() * lam[l] * t[idx]
        })
        .collect();
    DataMatrix::from_entries(basis.bandwidth(), dim, entries)
}

/// Data matrix of the constant background q_inf·1_{(−d_radius, d_radius)}.
/// Diagonalized by ψ(·; c·d_radius) up to Galerkin truncation, which makes it
/// a useful extra oracle.
pub fn assemble_background_matrix(
    q_inf: f64,
    d_radius: f64,
    basis: &PswfBasis,
    dim: usize,
    rule: &QuadratureRule,
) -> Result<DataMatrix> {
    if !(q_inf > 0.0) {
        return Err(Error::InvalidInput(format!("q_inf must be positive, got {q_inf}")));
    }
    if !(d_radius > 0.0 && d_radius < 1.0) {
        return Err(Error::InvalidInput(format!(
            "background radius must lie in (0, 1), got {d_radius}"
        )));
    }
    let profile = ContrastProfile::piecewise(vec![(-d_radius, d_radius, q_inf)])?;
    assemble_data_matrix(&profile, basis, dim, rule)
}

/// Add a Hermitian Gaussian perturbation scaled so that
/// ‖A^δ − A‖₂ = δ·‖A‖₂ exactly (relative calibration). Deterministic given
/// `seed`; δ = 0 returns the matrix unchanged bit-for-bit.
pub fn add_noise(a: &DataMatrix, delta: f64, seed: u64) -> Result<DataMatrix> {
    if delta < 0.0 {
        return Err(Error::InvalidInput(format!("noise level must be >= 0, got {delta}")));
    }
    if delta == 0.0 {
        let mut out = a.clone();
        out.seed = Some(seed);
        return Ok(out);
    }
    let n = a.dim;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let normal = rand_distr::StandardNormal;
    let mut e = vec![Complex64::new(0.0, 0.0); n * n];
    for z in e.iter_mut() {
        let re: f64 = normal.sample(&mut rng);
        let im: f64 = normal.sample(&mut rng);
        *z = Complex64::new(re, im);
    }
    hermitianize(&mut e, n);
    let h_norm = hermitian_spectral_norm(&e, n)?;
    if h_norm == 0.0 {
        return Err(Error::Numerical("degenerate noise draw".into()));
    }
    let scale = delta * a.spectral_norm() / h_norm;
    let entries: Vec<Complex64> = a
        .entries
        .iter()
        .zip(&e)
        .map(|(x, p)| x + scale * p)
        .collect();
    let mut out = DataMatrix::from_entries(a.c, n, entries)?;
    out.noise_level = delta;
    out.seed = Some(seed);
    Ok(out)
}
