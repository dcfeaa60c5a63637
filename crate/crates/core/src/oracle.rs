//! Brute-force oracle for optimal n-piece piecewise-linear fits on [0, 1].
//!
//! Candidate knots are restricted to a uniform grid; each piece is fitted by
//! its interval-optimal (possibly discontinuous at the knots) linear function
//! obtained from the degree-0/1 Legendre projection. The dynamic program
//! therefore returns an upper bound on the true infimum over all n-piece
//! fits, converging to it as the grid is refined (use nested resolutions,
//! e.g. powers of two multiples, when comparing runs).
//!
//! Piece costs come from prefix moments of f on the grid, so the whole table
//! costs O(grid) evaluations of f plus O(grid^2 * n) arithmetic.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pwl::{PiecewiseLinear1D, Segment};
use crate::quadrature::gauss32;

/// Result of the dynamic program: the minimal summed squared error, the
/// chosen interior knots, and the fitted function itself.
#[derive(Debug, Clone)]
pub struct OracleFit {
    pub error: f64,
    pub breakpoints: Vec<f64>,
    pub fit: PiecewiseLinear1D,
}

/// Optimal n-piece fit of f on [0, 1] with knots on a uniform grid of
/// `grid_resolution` cells.
///
/// With `continuous = false` (the default family) every piece is fitted
/// independently and the fit may jump at knots. With `continuous = true`
/// the knots from the unconstrained program are kept and a globally
/// continuous least-squares fit is computed on them, which can only
/// increase the error.
pub fn optimal_pwl_oracle<F>(
    f: F,
    n: usize,
    grid_resolution: usize,
    continuous: bool,
) -> Result<OracleFit>
where
    F: Fn(f64) -> f64 + Sync,
{
    if n < 1 {
        return Err(Error::InvalidParameter("piece count must be at least 1".into()));
    }
    if grid_resolution < 10 * n {
        return Err(Error::InvalidParameter(format!(
            "grid resolution {grid_resolution} too coarse for {n} pieces (need at least {})",
            10 * n
        )));
    }
    let g = grid_resolution;
    let knots: Vec<f64> = (0..=g).map(|i| i as f64 / g as f64).collect();

    // prefix moments of f, x f, f^2 at the knots
    let cells: Vec<(f64, f64, f64)> = (0..g)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (knots[i], knots[i + 1]);
            (
                gauss32(&|x| f(x), a, b),
                gauss32(&|x| x * f(x), a, b),
                gauss32(&|x| f(x) * f(x), a, b),
            )
        })
        .collect();
    let mut m0 = vec![0.0; g + 1];
    let mut m1 = vec![0.0; g + 1];
    let mut m2 = vec![0.0; g + 1];
    for i in 0..g {
        m0[i + 1] = m0[i] + cells[i].0;
        m1[i + 1] = m1[i] + cells[i].1;
        m2[i + 1] = m2[i] + cells[i].2;
    }
    if m2.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("function produced non-finite values on [0, 1]".into()));
    }

    // squared error and linear coefficients of the best fit on [knots[i], knots[j]]
    let piece = |i: usize, j: usize| -> (f64, f64, f64) {
        let (u, v) = (knots[i], knots[j]);
        let len = v - u;
        let i0 = m0[j] - m0[i];
        let i1 = m1[j] - m1[i];
        let i2 = m2[j] - m2[i];
        let a0 = i0 / len;
        let p1 = (2.0 / len) * i1 - (2.0 * u / len + 1.0) * i0;
        let a1 = 3.0 / len * p1;
        let err = (i2 - len * (a0 * a0 + a1 * a1 / 3.0)).max(0.0);
        let slope = 2.0 * a1 / len;
        let intercept = a0 - a1 * (2.0 * u / len + 1.0);
        (err, slope, intercept)
    };
    let cost = |i: usize, j: usize| piece(i, j).0;

    // best[j] = error of covering [0, knots[j]] with p pieces
    let mut best: Vec<f64> = (0..=g).map(|j| if j == 0 { 0.0 } else { cost(0, j) }).collect();
    let mut prev: Vec<Vec<u32>> = vec![vec![0; g + 1]];
    for p in 2..=n {
        let prior = &best;
        let row: Vec<(f64, u32)> = (0..=g)
            .into_par_iter()
            .map(|j| {
                if j < p {
                    // not enough cells; pieces must be nonempty
                    return (f64::INFINITY, 0);
                }
                let mut arg = p - 1;
                let mut val = f64::INFINITY;
                for i in (p - 1)..j {
                    let c = prior[i] + cost(i, j);
                    if c < val {
                        val = c;
                        arg = i;
                    }
                }
                (val, arg as u32)
            })
            .collect();
        best = row.iter().map(|&(v, _)| v).collect();
        prev.push(row.iter().map(|&(_, a)| a).collect());
    }

    // backtrack the partition
    let mut cuts = Vec::with_capacity(n - 1);
    let mut j = g;
    for p in (2..=n).rev() {
        let i = prev[p - 1][j] as usize;
        cuts.push(i);
        j = i;
    }
    cuts.reverse();

    let mut bounds = Vec::with_capacity(n + 1);
    bounds.push(0usize);
    bounds.extend_from_slice(&cuts);
    bounds.push(g);
    let breakpoints: Vec<f64> = cuts.iter().map(|&i| knots[i]).collect();

    if continuous {
        return continuous_fit(&f, &bounds, &knots, breakpoints);
    }

    let mut segments = Vec::with_capacity(n);
    let mut error = 0.0;
    for w in bounds.windows(2) {
        let (err, slope, intercept) = piece(w[0], w[1]);
        error += err;
        segments.push(Segment { slope, intercept });
    }
    let fit = PiecewiseLinear1D::new((0.0, 1.0), breakpoints.clone(), segments, false)?;
    Ok(OracleFit { error, breakpoints, fit })
}

/// Globally continuous least-squares fit on a fixed partition, via the hat
/// basis and a tridiagonal normal system.
fn continuous_fit<F: Fn(f64) -> f64 + Sync>(
    f: &F,
    bounds: &[usize],
    knots: &[f64],
    breakpoints: Vec<f64>,
) -> Result<OracleFit> {
    let xs: Vec<f64> = bounds.iter().map(|&i| knots[i]).collect();
    let n = xs.len() - 1;
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();

    // normal equations: tridiagonal Gram matrix of hat functions
    let mut diag = vec![0.0; n + 1];
    let mut off = vec![0.0; n]; // off[k] couples c_k and c_{k+1}
    let mut rhs = vec![0.0; n + 1];
    for k in 0..n {
        diag[k] += h[k] / 3.0;
        diag[k + 1] += h[k] / 3.0;
        off[k] = h[k] / 6.0;
        let (a, b) = (xs[k], xs[k + 1]);
        rhs[k] += gauss32(&|x| f(x) * (b - x) / h[k], a, b);
        rhs[k + 1] += gauss32(&|x| f(x) * (x - a) / h[k], a, b);
    }

    // Thomas algorithm
    let mut c_prime = vec![0.0; n + 1];
    let mut d_prime = vec![0.0; n + 1];
    c_prime[0] = off[0] / diag[0];
    d_prime[0] = rhs[0] / diag[0];
    for k in 1..=n {
        let m = diag[k] - off[k - 1] * c_prime[k - 1];
        c_prime[k] = if k < n { off[k] / m } else { 0.0 };
        d_prime[k] = (rhs[k] - off[k - 1] * d_prime[k - 1]) / m;
    }
    let mut values = vec![0.0; n + 1];
    values[n] = d_prime[n];
    for k in (0..n).rev() {
        values[k] = d_prime[k] - c_prime[k] * values[k + 1];
    }

    let mut segments = Vec::with_capacity(n);
    let mut error = 0.0;
    for k in 0..n {
        let slope = (values[k + 1] - values[k]) / h[k];
        let intercept = values[k] - slope * xs[k];
        segments.push(Segment { slope, intercept });
        error += crate::quadrature::integrate(
            &|x| {
                let r = f(x) - (slope * x + intercept);
                r * r
            },
            xs[k],
            xs[k + 1],
            1e-10,
        )?;
    }
    let fit = PiecewiseLinear1D::new((0.0, 1.0), breakpoints.clone(), segments, true)?;
    Ok(OracleFit { error, breakpoints, fit })
}
