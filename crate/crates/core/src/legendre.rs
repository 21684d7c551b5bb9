//! Legendre polynomials P_n, their derivatives, and the normalized variant
//! P̄_n = P_n·√(n+1/2) with ∫_{−1}^{1} P̄_m P̄_n dx = δ_mn.

/// Evaluate P_n(x) by the three-term recurrence
/// (n+1) P_{n+1} = (2n+1) x P_n − n P_{n−1}.
pub fn legendre_eval(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if n == 1 {
        return x;
    }
    let mut p_prev = 1.0;
    let mut p_curr = x;
    for k in 1..n {
        let p_next = ((2 * k + 1) as f64 * x * p_curr - k as f64 * p_prev) / (k + 1) as f64;
        p_prev = p_curr;
        p_curr = p_next;
    }
    p_curr
}

/// Evaluate P'_n(x) from the Bonnet relation
/// (1−x²) P'_n = n (P_{n−1} − x P_n), with the exact endpoint values
/// P'_n(±1) = (±1)^{n+1} n(n+1)/2.
pub fn legendre_deriv(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if (x - 1.0).abs() < 1e-14 {
        return (n * (n + 1)) as f64 / 2.0;
    }
    if (x + 1.0).abs() < 1e-14 {
        let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
        return sign * (n * (n + 1)) as f64 / 2.0;
    }
    let p_n = legendre_eval(n, x);
    let p_nm1 = legendre_eval(n - 1, x);
    n as f64 * (p_nm1 - x * p_n) / (1.0 - x * x)
}

/// Evaluate P_n(x) and P'_n(x) in one pass of the recurrence.
pub fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p_curr = x;
    for k in 1..n {
        let p_next = ((2 * k + 1) as f64 * x * p_curr - k as f64 * p_prev) / (k + 1) as f64;
        p_prev = p_curr;
        p_curr = p_next;
    }
    let dp = if (x - 1.0).abs() < 1e-14 {
        (n * (n + 1)) as f64 / 2.0
    } else if (x + 1.0).abs() < 1e-14 {
        let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
        sign * (n * (n + 1)) as f64 / 2.0
    } else {
        n as f64 * (p_prev - x * p_curr) / (1.0 - x * x)
    };
    (p_curr, dp)
}

/// P̄_n(x) = P_n(x)·√(n+1/2).
pub fn normalized_legendre(n: usize, x: f64) -> f64 {
    legendre_eval(n, x) * (n as f64 + 0.5).sqrt()
}

/// Fill `out[j] = P̄_j(x)` for j = 0..out.len().
///
/// One recurrence pass; this is the hot path for every PSWF evaluation.
pub fn normalized_legendre_upto(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let mut p_prev = 1.0;
    out[0] = p_prev * 0.5f64.sqrt();
    if n == 1 {
        return;
    }
    let mut p_curr = x;
    out[1] = p_curr * 1.5f64.sqrt();
    for k in 1..n - 1 {
        let p_next = ((2 * k + 1) as f64 * x * p_curr - k as f64 * p_prev) / (k + 1) as f64;
        p_prev = p_curr;
        p_curr = p_next;
        out[k + 1] = p_curr * (k as f64 + 1.5).sqrt();
    }
}
