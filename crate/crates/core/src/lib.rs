//! Prolate-based linear sampling for restricted Fourier data.
//!
//! Given band-limited measurements u(t) = ∫ e^{i2cts} q(s) ds of an unknown
//! contrast q supported inside (−1, 1), this crate assembles the data operator
//! (N g)(t) = ∫ u((t−s)/2) g(s) ds in a prolate spheroidal wave function (PSWF)
//! basis and recovers both the support of q and its local harmonic average
//! through regularized sampling indicators.
//!
//! The pipeline is:
//! 1. [`pswf::solve_pswf`] — PSWFs ψ_n(·;c), Sturm–Liouville eigenvalues χ_n and
//!    prolate eigenvalues λ_n by a Legendre–Galerkin method,
//! 2. [`forward`] — synthetic contrasts, closed-form data u, and the Hermitian
//!    Galerkin matrix A_{jl} = ⟨N ψ_j, ψ_l⟩ with optional calibrated noise,
//! 3. [`inverse`] — regularization filters, probe functions φ_z, and the LSM /
//!    GLSM / range-test / differential indicators evaluated on a sampling grid,
//! 4. [`runner`] — the experiment driver behind the `prolate-lsm` binary,
//!    emitting `scan.csv` and `summary.json`.
//!
//! Everything is double precision. All integrals use the Legendre–Gauss–Lobatto
//! rule from [`quadrature`].

// `!(x > 0.0)` style guards reject NaN along with the out-of-range values;
// index-based loops are kept where they mirror the underlying matrix algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod forward;
pub mod inverse;
pub mod legendre;
pub mod linalg;
pub mod pswf;
pub mod quadrature;
pub mod runner;

pub use forward::{ContrastProfile, DataMatrix};
pub use inverse::{Indicator, ProbeRegion, RegularizationFilter, ScanResult};
pub use pswf::PswfBasis;
pub use quadrature::QuadratureRule;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Caller passed arguments that violate an operation's preconditions.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An iterative kernel failed to converge; indicates a bug or a corrupted
    /// intermediate, not bad user input.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Experiment configuration is malformed or violates an invariant.
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Map an index range, in parallel when the `parallel` feature is enabled and
/// `parallel` is true; output order is the index order either way.
#[cfg(feature = "parallel")]
pub(crate) fn run_indexed<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn run_indexed<T, F>(n: usize, _parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
