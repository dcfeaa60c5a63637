//! Gauss-Legendre quadrature: a fixed 32-point rule plus an adaptive
//! composite driver that bisects until the relative change is below a
//! requested tolerance.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const RULE_DEGREE: usize = 32;

/// Nodes and weights of the degree-n Gauss-Legendre rule on [-1, 1].
///
/// Roots of the Legendre polynomial are found by Newton iteration from the
/// Chebyshev initial guess; this is accurate to machine precision for the
/// small degrees used here.
fn gauss_legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut pairs = Vec::with_capacity(n);
    for k in 1..=n {
        // initial guess for the k-th root (descending order)
        let mut x = (std::f64::consts::PI * (k as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_value_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_value_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        pairs.push((x, w));
    }
    pairs
}

/// Evaluate P_n and its derivative at x by the three-term recurrence.
fn legendre_value_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for i in 1..n {
        let i = i as f64;
        let p_next = ((2.0 * i + 1.0) * x * p - i * p_prev) / (i + 1.0);
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

fn rule32() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_rule(RULE_DEGREE))
}

/// Single-panel 32-point Gauss-Legendre estimate of the integral of f over [a, b].
pub fn gauss32<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in rule32() {
        acc += w * f(mid + half * x);
    }
    half * acc
}

/// Adaptive composite integration of f over [a, b].
///
/// Panels are bisected until the two-half estimate agrees with the
/// single-panel estimate to relative accuracy `rel_tol` (with a small
/// absolute floor so that zero integrals terminate).
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::InvalidParameter(format!(
            "integration interval [{a}, {b}] is invalid"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let whole = gauss32(f, a, b);
    if !whole.is_finite() {
        return Err(Error::NonFinite(format!(
            "integrand produced a non-finite value on [{a}, {b}]"
        )));
    }
    // tolerance scale: the non-cancelled mass of the integrand, so that
    // near-zero integrals (orthogonality cases) terminate immediately
    let magnitude = gauss32(&|x| f(x).abs(), a, b).max(1e-300);
    let mut total = 0.0;
    // explicit stack of (lo, hi, estimate, depth)
    let mut stack = vec![(a, b, whole, 0u32)];
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gauss32(f, lo, mid);
        let right = gauss32(f, mid, hi);
        if !(left.is_finite() && right.is_finite()) {
            return Err(Error::NonFinite(format!(
                "integrand produced a non-finite value on [{lo}, {hi}]"
            )));
        }
        let refined = left + right;
        let err = (refined - est).abs();
        if err <= rel_tol * refined.abs().max(magnitude) || depth >= 24 {
            total += refined;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(total)
}

/// Exact integral of x^k over [a, b].
pub fn monomial_integral(k: usize, a: f64, b: f64) -> f64 {
    let p = (k + 1) as f64;
    (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / p
}
