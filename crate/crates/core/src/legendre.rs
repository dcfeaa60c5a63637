//! Shifted Legendre polynomials, Fourier-Legendre coefficients, optimal
//! linear-fit errors, and the closed-form approximation lower bounds they
//! yield for piecewise-linear fits.
//!
//! Standard Legendre coefficients are generated exactly (integer numerators
//! over a power-of-two denominator) up to degree 30 and then converted to
//! floating point; the change of variables onto an arbitrary interval is
//! done in f64.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, monomial_integral};

/// Numerical-stability cap for the monomial representation.
pub const MAX_DEGREE: usize = 30;

/// Degree-i Legendre polynomial rescaled to `[a, a + len]`.
///
/// The family is orthogonal with `∫ P̃_i P̃_j = len / (2i + 1) δ_ij`. The
/// monomial coefficients back the closed-form polynomial path; evaluation
/// goes through the recurrence instead.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedLegendre {
    degree: usize,
    a: f64,
    len: f64,
    coeffs: Vec<f64>,
}

/// Exact binomial coefficient in i128 (safe for the degrees used here).
fn binomial(n: u64, k: u64) -> i128 {
    let k = k.min(n - k.min(n));
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// Monomial coefficients (ascending) of the standard Legendre polynomial P_n
/// on [-1, 1]: `P_n(x) = 2^-n Σ_k (-1)^k C(n,k) C(2n-2k, n) x^(n-2k)`.
fn standard_legendre_coeffs(n: usize) -> Vec<f64> {
    let mut coeffs = vec![0.0; n + 1];
    let scale = 2f64.powi(-(n as i32));
    for k in 0..=(n / 2) {
        let num = binomial(n as u64, k as u64) * binomial((2 * n - 2 * k) as u64, n as u64);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[n - 2 * k] = sign * num as f64 * scale;
    }
    coeffs
}

impl ShiftedLegendre {
    /// P_i composed with the affine map taking `[a, a + len]` onto [-1, 1].
    pub fn new(degree: usize, a: f64, len: f64) -> Result<ShiftedLegendre> {
        if degree > MAX_DEGREE {
            return Err(Error::InvalidParameter(format!(
                "degree {degree} beyond the monomial-basis cap {MAX_DEGREE}"
            )));
        }
        if !(len > 0.0 && len.is_finite() && a.is_finite()) {
            return Err(Error::InvalidParameter("interval length must be positive".into()));
        }
        let std = standard_legendre_coeffs(degree);
        // compose with s = alpha t + beta
        let alpha = 2.0 / len;
        let beta = -2.0 * a / len - 1.0;
        let mut coeffs = vec![0.0; degree + 1];
        for (j, &cj) in std.iter().enumerate() {
            if cj == 0.0 {
                continue;
            }
            // cj (alpha t + beta)^j expanded binomially
            for m in 0..=j {
                let c = binomial(j as u64, m as u64) as f64;
                coeffs[m] += cj * c * alpha.powi(m as i32) * beta.powi((j - m) as i32);
            }
        }
        Ok(ShiftedLegendre { degree, a, len, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.a + self.len)
    }

    /// Ascending monomial coefficients.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Evaluate by mapping onto [-1, 1] and running the three-term
    /// recurrence, which stays accurate where the monomial form cancels.
    pub fn eval(&self, x: f64) -> f64 {
        let s = 2.0 * (x - self.a) / self.len - 1.0;
        if self.degree == 0 {
            return 1.0;
        }
        let mut p_prev = 1.0;
        let mut p = s;
        for i in 1..self.degree {
            let i = i as f64;
            let next = ((2.0 * i + 1.0) * s * p - i * p_prev) / (i + 1.0);
            p_prev = p;
            p = next;
        }
        p
    }
}

/// Fourier-Legendre coefficient `ã_i = (2i+1)/len ∫ P̃_i f` on `[a, a+len]`,
/// computed by adaptive quadrature (relative accuracy 1e-10).
pub fn fl_coefficient<F: Fn(f64) -> f64>(f: F, i: usize, a: f64, len: f64) -> Result<f64> {
    let p = ShiftedLegendre::new(i, a, len)?;
    let integral = integrate(&|x| p.eval(x) * f(x), a, a + len, 1e-10)?;
    Ok((2.0 * i as f64 + 1.0) / len * integral)
}

/// Closed-form Fourier-Legendre coefficient for a polynomial given by
/// ascending monomial coefficients.
pub fn fl_coefficient_poly(poly: &[f64], i: usize, a: f64, len: f64) -> Result<f64> {
    let p = ShiftedLegendre::new(i, a, len)?;
    let mut integral = 0.0;
    for (q, &dq) in poly.iter().enumerate() {
        if dq == 0.0 {
            continue;
        }
        for (m, &cm) in p.coeffs().iter().enumerate() {
            if cm != 0.0 {
                integral += dq * cm * monomial_integral(q + m, a, a + len);
            }
        }
    }
    Ok((2.0 * i as f64 + 1.0) / len * integral)
}

/// Squared error of the optimal linear approximation of f on `[a, a+len]`,
/// in Parseval form: `∫f² - len (ã₀² + ã₁²/3)`.
pub fn linear_fit_error<F: Fn(f64) -> f64>(f: F, a: f64, len: f64) -> Result<f64> {
    let norm2 = integrate(&|x| f(x) * f(x), a, a + len, 1e-10)?;
    let a0 = fl_coefficient(&f, 0, a, len)?;
    let a1 = fl_coefficient(&f, 1, a, len)?;
    Ok((norm2 - len * (a0 * a0 + a1 * a1 / 3.0)).max(0.0))
}

/// Per-interval coefficient table with the induced linear-fit error and the
/// Parseval tail left after `coefficients.len()` terms.
#[derive(Debug, Clone)]
pub struct LegendreReport {
    pub a: f64,
    pub len: f64,
    pub coefficients: Vec<f64>,
    pub linear_fit_error: f64,
    pub tail_estimate: f64,
}

pub fn legendre_report<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    len: f64,
    max_degree: usize,
) -> Result<LegendreReport> {
    let mut coefficients = Vec::with_capacity(max_degree + 1);
    for i in 0..=max_degree {
        coefficients.push(fl_coefficient(&f, i, a, len)?);
    }
    let norm2 = integrate(&|x| f(x) * f(x), a, a + len, 1e-10)?;
    let partial: f64 = coefficients
        .iter()
        .enumerate()
        .map(|(i, &c)| c * c / (2.0 * i as f64 + 1.0))
        .sum();
    let linear: f64 = coefficients
        .iter()
        .take(2)
        .enumerate()
        .map(|(i, &c)| c * c / (2.0 * i as f64 + 1.0))
        .sum();
    Ok(LegendreReport {
        a,
        len,
        coefficients,
        linear_fit_error: (norm2 - len * linear).max(0.0),
        tail_estimate: (norm2 - len * partial).max(0.0),
    })
}

/// Lower bound `p₂² / (180 n⁴)` on the n-piece fit error of a quadratic with
/// leading coefficient p₂ on [0, 1].
pub fn quad_lower_bound(p2: f64, n: u32) -> f64 {
    assert!(n >= 1, "piece count must be at least 1");
    let nf = n as f64;
    p2 * p2 / (180.0 * nf.powi(4))
}

/// Lower bound `5 λ² / (4096 n⁴)` for λ-strongly convex (or concave) C²
/// targets on [0, 1].
pub fn strongly_convex_lower_bound(lambda: f64, n: u32) -> f64 {
    assert!(n >= 1, "piece count must be at least 1");
    let nf = n as f64;
    5.0 * lambda * lambda / (4096.0 * nf.powi(4))
}

/// Interval form of the strong-convexity coefficient bound: `ã₂ ≥ 5 λ len²/64`.
pub fn strongly_convex_a2_bound(lambda: f64, len: f64) -> f64 {
    5.0 * lambda * len * len / 64.0
}

/// `(5/4096) λ² σ_λ⁵ / (2m)^(4l)` with σ_λ supplied by the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C2Bound {
    pub value: f64,
    /// Set when `(2m)^(4l)` overflowed and the bound collapsed to zero.
    pub saturated: bool,
}

pub fn c2_lower_bound(lambda: f64, sigma_lambda: f64, m: u32, l: u32) -> Result<C2Bound> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter("lambda must be positive".into()));
    }
    if !(0.0..=1.0).contains(&sigma_lambda) {
        return Err(Error::InvalidParameter("sigma_lambda must lie in [0, 1]".into()));
    }
    if m < 1 || l < 1 {
        return Err(Error::InvalidParameter("width and depth must be at least 1".into()));
    }
    let denom = (2.0 * m as f64).powi(4 * l as i32);
    let numer = 5.0 / 4096.0 * lambda * lambda * sigma_lambda.powi(5);
    let value = numer / denom;
    if value.is_finite() && (value > 0.0 || numer == 0.0) {
        Ok(C2Bound { value, saturated: false })
    } else {
        Ok(C2Bound { value: 0.0, saturated: true })
    }
}

/// `Σ lengths[j]^p` for positive lengths summing to 1; always at least
/// `1 / n^(p-1)` by the power-mean inequality, which is asserted.
pub fn partition_power_bound(lengths: &[f64], p: f64) -> Result<f64> {
    if lengths.is_empty() || lengths.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidParameter("lengths must be positive".into()));
    }
    let sum: f64 = lengths.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "lengths sum to {sum}, expected 1"
        )));
    }
    let value: f64 = lengths.iter().map(|&l| l.powf(p)).sum();
    let floor = 1.0 / (lengths.len() as f64).powf(p - 1.0);
    assert!(value >= floor - 1e-12, "power sum {value} below floor {floor}");
    Ok(value)
}
