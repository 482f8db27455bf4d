//! Log-space factorials, harmonic numbers and Hermite functions.
//!
//! Everything here stays finite for the occupation numbers used across the
//! crate (n up to a few hundred) by working with logarithms or with the
//! normalized Hermite-function recurrence instead of raw polynomials.

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ln(π)`.
pub const LN_PI: f64 = 1.144_729_885_849_400_2;

/// `ln(eπ) = 1 + ln π`, the common right-hand side of the rearranged
/// entropic uncertainty relations.
pub const LN_E_PI: f64 = 1.0 + LN_PI;

/// `ln(n!)`, exact summation for small n and Stirling series beyond.
pub fn ln_factorial(n: u32) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 256 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    // Stirling series for ln Γ(x); error < 1e-15 at x > 256.
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// n-th harmonic number, with `harmonic(0) = 0`.
pub fn harmonic(n: u32) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Normalized Hermite function ψ_n(x) = H_n(x) e^{-x²/2} / sqrt(√π 2^n n!).
///
/// Uses the three-term recurrence on the normalized functions, which never
/// forms H_n(x) or 2^n n! explicitly.
pub fn hermite_function(n: u32, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Physicist's Hermite polynomial H_n(x) by direct recurrence.
///
/// Only meant for small n; large n overflows, use [`hermite_function`].
pub fn hermite_polynomial(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `x ln x` with the convention `0 ln 0 = 0`.
#[inline]
pub fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Numerically safe `ln(e^a + e^b)`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}
