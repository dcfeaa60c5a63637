//! Explicit ReLU architectures: triangle waves, soft thresholds, bit
//! extractors, an approximate bounded multiplier, an exact weighted adder, a
//! shell-based ball indicator, and exact L1-radial networks.

use crate::error::{Error, Result};
use crate::network::{Activation, Layer, Network};

/// Default cap on extracted bits for [`multiplier`].
pub const DEFAULT_BIT_CAP: usize = 48;

/// Input skew for the multiplier's bit-extracted port.
///
/// The port is rescaled by `x' = (x + M) / (2 M SKEW)` instead of onto the
/// full unit interval. With SKEW = 10/9 the common test points x = 0 and
/// x = ±M/2 land on fifths-denominator rationals (9/20, 27/40, 9/40), which
/// stay at distance at least 2^-k/5 from every k-bit dyadic switch point, so
/// bit extraction is exact there for any k.
const INPUT_SKEW: f64 = 10.0 / 9.0;

/// The two-neuron hat `phi(x) = [2x]+ - [4x - 2]+`, composed with itself
/// `i` times: depth i+1, width 2, and `phi^i(x) = 0` for all `x <= 0`.
pub fn triangle_wave(i: u32) -> Result<Network> {
    if i < 1 {
        return Err(Error::InvalidParameter("composition count must be at least 1".into()));
    }
    let mut layers = Vec::with_capacity(i as usize + 1);
    layers.push(Layer::from_rows(
        vec![(vec![2.0], 0.0), (vec![4.0], -2.0)],
        Activation::Relu,
    )?);
    for _ in 1..i {
        // previous pair (a, b) encodes t = a - b
        layers.push(Layer::from_rows(
            vec![(vec![2.0, -2.0], 0.0), (vec![4.0, -4.0], -2.0)],
            Activation::Relu,
        )?);
    }
    layers.push(Layer::from_rows(vec![(vec![1.0, -1.0], 0.0)], Activation::Identity)?);
    let net = Network::new(1, layers)?;
    debug_assert_eq!(net.depth(), i as usize + 1);
    debug_assert_eq!(net.width(), 2);
    Ok(net)
}

/// Soft step `sigma_delta(x) = [x/(2d) - 1/(4d) + 1/2]+ - [x/(2d) - 1/(4d) - 1/2]+`:
/// 0 below `0.5 - delta`, 1 above `0.5 + delta`, linear between.
pub fn soft_threshold(delta: f64) -> Result<Network> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter("threshold softness must be positive".into()));
    }
    let s = 1.0 / (2.0 * delta);
    let c = -1.0 / (4.0 * delta);
    let layers = vec![
        Layer::from_rows(vec![(vec![s], c + 0.5), (vec![s], c - 0.5)], Activation::Relu)?,
        Layer::from_rows(vec![(vec![1.0, -1.0], 0.0)], Activation::Identity)?,
    ];
    Network::new(1, layers)
}

/// Extractor for the i-th binary digit: `sigma_delta(phi^i(x - 2^-(i+1)))`.
///
/// Exact whenever the input is at distance more than `delta * 2^-i` from
/// every multiple of `2^-i`; depth i+2, width 2.
pub fn bit_extractor(i: u32, delta: f64) -> Result<Network> {
    if i < 1 {
        return Err(Error::InvalidParameter("bit index must be at least 1".into()));
    }
    let shift = -(2f64.powi(-(i as i32) - 1));
    let net = triangle_wave(i)?
        .affine_pre_scalar(1.0, shift)?
        .stack(&soft_threshold(delta)?)?;
    debug_assert_eq!(net.depth(), i as usize + 2);
    debug_assert_eq!(net.width(), 2);
    Ok(net)
}

/// Sizing and rescaling data for a constructed multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierParams {
    pub magnitude: f64,
    pub epsilon: f64,
    /// Extracted bits k.
    pub bits: usize,
    /// Softness of each bit extractor.
    pub sigma_delta: f64,
    /// Structural width bound `4 ceil(log2(M/eps)) + 13`.
    pub width_bound: usize,
    /// Structural depth bound `2 ceil(log2(M/eps)) + 9`.
    pub depth_bound: usize,
}

impl MultiplierParams {
    pub fn compute(magnitude: f64, epsilon: f64, bit_cap: usize) -> Result<MultiplierParams> {
        if !(magnitude > 0.0 && magnitude.is_finite()) {
            return Err(Error::InvalidParameter("magnitude bound must be positive".into()));
        }
        if !(epsilon > 0.0 && epsilon < magnitude) {
            return Err(Error::InvalidParameter(format!(
                "accuracy must satisfy 0 < eps < M, got eps={epsilon}, M={magnitude}"
            )));
        }
        let log_ratio = ceil_log2(magnitude / epsilon);
        let mut bits = 2 * ceil_log2(4.0 * magnitude / epsilon).max(1) as usize;
        // truncation after k bits costs 2 M^2 SKEW 2^-k, which must fit in
        // half the error budget; only extremely coarse eps needs more bits
        while 2.0 * magnitude * magnitude * INPUT_SKEW * 2f64.powi(-(bits as i32))
            > epsilon / 2.0
        {
            bits += 2;
        }
        if bits > bit_cap {
            return Err(Error::InvalidParameter(format!(
                "accuracy eps={epsilon} needs {bits} bits, above the cap {bit_cap}"
            )));
        }
        let sigma_delta = epsilon / (8.0 * magnitude * 2f64.powi(bits as i32));
        if sigma_delta < f64::MIN_POSITIVE {
            return Err(Error::BudgetUnderflow(format!(
                "bit-extractor softness {sigma_delta} underflows"
            )));
        }
        let width_bound = 4 * log_ratio.max(0) as usize + 13;
        let depth_bound = 2 * log_ratio.max(0) as usize + 9;
        Ok(MultiplierParams {
            magnitude,
            epsilon,
            bits,
            sigma_delta,
            width_bound,
            depth_bound,
        })
    }

    /// The bit-extracted port's internal coordinate `x' in [0, 1)`.
    pub fn rescaled(&self, x: f64) -> f64 {
        (x + self.magnitude) / (2.0 * self.magnitude * INPUT_SKEW)
    }

    /// Whether the first input is outside the documented bad set: `x'` must
    /// be at distance more than `sigma_delta` from every k-bit dyadic point.
    /// The bad set has measure at most `2 k sigma_delta` in `x'`.
    pub fn in_good_set(&self, x: f64) -> bool {
        let xp = self.rescaled(x);
        let grid = 2f64.powi(self.bits as i32);
        let nearest = (xp * grid).round() / grid;
        (xp - nearest).abs() > self.sigma_delta
    }
}

fn ceil_log2(x: f64) -> i64 {
    (x.log2() - 1e-12).ceil() as i64
}

/// Approximate two-input product on `[-M, M]^2` with `|net(x,y) - xy| <= eps`
/// outside the bad set of [`MultiplierParams::in_good_set`].
///
/// The first input is rescaled to `[0, 1)` and its k most significant bits
/// are extracted by triangle-wave cascades; the penultimate layer forms the
/// partial products `[2^-i y' + x_i - 1]+ = 2^-i x_i y'` against the
/// positive and negative parts of the second input, and the readout
/// recombines them with the exact linear correction terms.
pub fn multiplier(magnitude: f64, epsilon: f64) -> Result<Network> {
    multiplier_capped(magnitude, epsilon, DEFAULT_BIT_CAP)
}

pub fn multiplier_capped(magnitude: f64, epsilon: f64, bit_cap: usize) -> Result<Network> {
    let params = MultiplierParams::compute(magnitude, epsilon, bit_cap)?;
    let net = multiplier_with_bits(magnitude, params.bits, params.sigma_delta)?;
    if net.width() > params.width_bound || net.depth() > params.depth_bound {
        return Err(Error::Validation(format!(
            "constructed size {}x{} exceeds the bounds {}x{}",
            net.width(),
            net.depth(),
            params.width_bound,
            params.depth_bound
        )));
    }
    Ok(net)
}

/// Cascade bookkeeping while assembling the multiplier stack.
enum BitState {
    /// Triangle pair (a, b) encoding t = a - b.
    Phi(usize, usize),
    /// Soft-threshold pair (a, b) encoding the bit as a - b.
    Sigma(usize, usize),
    /// Collapsed nonnegative bit value.
    Bit(usize),
}

/// Multiplier with an explicit bit count and extractor softness.
pub fn multiplier_with_bits(magnitude: f64, bits: usize, sigma_delta: f64) -> Result<Network> {
    let m = magnitude;
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter("magnitude bound must be positive".into()));
    }
    if bits < 1 {
        return Err(Error::InvalidParameter("need at least one extracted bit".into()));
    }
    if !(sigma_delta > 0.0 && sigma_delta < 0.5) {
        return Err(Error::InvalidParameter("extractor softness must lie in (0, 0.5)".into()));
    }
    let k = bits;
    // x' = g x + h in [0, 1); p = [y]+ / M, q = [-y]+ / M
    let g = 1.0 / (2.0 * m * INPUT_SKEW);
    let h = 1.0 / (2.0 * INPUT_SKEW);
    let ss = 1.0 / (2.0 * sigma_delta);
    let sc = -1.0 / (4.0 * sigma_delta);

    let mut layers: Vec<Layer> = Vec::with_capacity(k + 3);
    let mut state: Vec<BitState> = Vec::with_capacity(k);

    // layer 1: first triangle step of every cascade, plus p and q
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(2 * k + 2);
    for i in 1..=k {
        let shift = 2f64.powi(-(i as i32) - 1);
        rows.push((vec![2.0 * g, 0.0], 2.0 * (h - shift)));
        rows.push((vec![4.0 * g, 0.0], 4.0 * (h - shift) - 2.0));
        state.push(BitState::Phi(2 * (i - 1), 2 * (i - 1) + 1));
    }
    rows.push((vec![0.0, 1.0 / m], 0.0));
    rows.push((vec![0.0, -1.0 / m], 0.0));
    let mut p_idx = 2 * k;
    let mut q_idx = 2 * k + 1;
    let mut prev_width = rows.len();
    layers.push(Layer::from_rows(rows, Activation::Relu)?);

    // layers 2..=k+1: advance each cascade, carry finished bits and p, q
    for j in 2..=(k + 1) {
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut next_state: Vec<BitState> = Vec::with_capacity(k);
        for (idx, st) in state.iter().enumerate() {
            let i = idx + 1;
            match st {
                BitState::Phi(a, b) if j <= i => {
                    // next triangle step
                    let mut r1 = vec![0.0; prev_width];
                    r1[*a] = 2.0;
                    r1[*b] = -2.0;
                    let mut r2 = vec![0.0; prev_width];
                    r2[*a] = 4.0;
                    r2[*b] = -4.0;
                    next_state.push(BitState::Phi(rows.len(), rows.len() + 1));
                    rows.push((r1, 0.0));
                    rows.push((r2, -2.0));
                }
                BitState::Phi(a, b) => {
                    // soft threshold of the finished cascade (j == i + 1)
                    let mut r1 = vec![0.0; prev_width];
                    r1[*a] = ss;
                    r1[*b] = -ss;
                    let r2 = r1.clone();
                    next_state.push(BitState::Sigma(rows.len(), rows.len() + 1));
                    rows.push((r1, sc + 0.5));
                    rows.push((r2, sc - 0.5));
                }
                BitState::Sigma(a, b) => {
                    // collapse the pair into a single nonnegative bit
                    let mut r = vec![0.0; prev_width];
                    r[*a] = 1.0;
                    r[*b] = -1.0;
                    next_state.push(BitState::Bit(rows.len()));
                    rows.push((r, 0.0));
                }
                BitState::Bit(v) => {
                    let mut r = vec![0.0; prev_width];
                    r[*v] = 1.0;
                    next_state.push(BitState::Bit(rows.len()));
                    rows.push((r, 0.0));
                }
            }
        }
        let mut rp = vec![0.0; prev_width];
        rp[p_idx] = 1.0;
        let mut rq = vec![0.0; prev_width];
        rq[q_idx] = 1.0;
        p_idx = rows.len();
        rows.push((rp, 0.0));
        q_idx = rows.len();
        rows.push((rq, 0.0));
        state = next_state;
        prev_width = rows.len();
        layers.push(Layer::from_rows(rows, Activation::Relu)?);
    }

    // penultimate layer: partial products against p and q, plus carries
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(2 * k + 2);
    for (idx, st) in state.iter().enumerate() {
        let i = idx + 1;
        let scale = 2f64.powi(-(i as i32));
        for &port in &[p_idx, q_idx] {
            let mut r = vec![0.0; prev_width];
            r[port] = scale;
            match st {
                BitState::Sigma(a, b) => {
                    r[*a] = 1.0;
                    r[*b] = -1.0;
                }
                BitState::Bit(v) => r[*v] = 1.0,
                BitState::Phi(..) => unreachable!("cascades finish inside the stack"),
            }
            rows.push((r, -1.0));
        }
    }
    let mut rp = vec![0.0; prev_width];
    rp[p_idx] = 1.0;
    let mut rq = vec![0.0; prev_width];
    rq[q_idx] = 1.0;
    let p_out = rows.len();
    rows.push((rp, 0.0));
    let q_out = rows.len();
    rows.push((rq, 0.0));
    let penult_width = rows.len();
    layers.push(Layer::from_rows(rows, Activation::Relu)?);

    // readout: x y = 2 M^2 SKEW (B p - B q) - M^2 p + M^2 q with
    // B = sum of extracted bits of x'
    let bank = 2.0 * m * m * INPUT_SKEW;
    let mut r = vec![0.0; penult_width];
    for i in 0..k {
        r[2 * i] = bank;
        r[2 * i + 1] = -bank;
    }
    r[p_out] = -m * m;
    r[q_out] = m * m;
    layers.push(Layer::new(penult_width, 1, r, vec![0.0], Activation::Identity)?);

    Network::new(2, layers)
}

/// Single-input square `x -> x*x` as a multiplier with both ports tied.
pub fn square(magnitude: f64, epsilon: f64) -> Result<Network> {
    multiplier(magnitude, epsilon)?.affine_pre(&[vec![1.0], vec![1.0]], &[0.0, 0.0])
}

/// Square with an explicit bit count (the staircase resolution knob).
pub fn square_with_bits(magnitude: f64, bits: usize, sigma_delta: f64) -> Result<Network> {
    multiplier_with_bits(magnitude, bits, sigma_delta)?
        .affine_pre(&[vec![1.0], vec![1.0]], &[0.0, 0.0])
}

/// Exact weighted addition `(x, y) -> alpha x + beta y` with one hidden
/// layer of exactly four neurons:
/// `alpha [x]+ - alpha [-x]+ + beta [y]+ - beta [-y]+`.
pub fn affine_adder(alpha: f64, beta: f64) -> Result<Network> {
    let layers = vec![
        Layer::from_rows(
            vec![
                (vec![1.0, 0.0], 0.0),
                (vec![-1.0, 0.0], 0.0),
                (vec![0.0, 1.0], 0.0),
                (vec![0.0, -1.0], 0.0),
            ],
            Activation::Relu,
        )?,
        Layer::from_rows(vec![(vec![alpha, -alpha, beta, -beta], 0.0)], Activation::Identity)?,
    ];
    Network::new(2, layers)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BallIndicatorOptions {
    /// Return `1 - output`, i.e. approximately 1 inside the unit ball.
    /// The plain construction is approximately 1 *outside* and 0 inside.
    pub complement: bool,
}

/// Three-layer shell indicator for the Euclidean unit ball.
///
/// Layer 1 interpolates `min{x^2, 4}` per coordinate on uniform knots with
/// per-coordinate error well below `delta / d`; layer 2 applies the exact
/// unit ramp to `(sum - 1) / shell_eps`. For `||x||^2 >= 1 + shell_eps` the
/// output lies in `(1 - sqrt(delta/2), 1 + sqrt(delta/2))` and for
/// `||x||^2 <= 1 - shell_eps` in `(-sqrt(delta/2), sqrt(delta/2))`; only the
/// shell in between is unconstrained.
pub fn ball_indicator(
    d: usize,
    delta: f64,
    shell_eps: f64,
    opts: BallIndicatorOptions,
) -> Result<Network> {
    if d < 1 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter("delta must lie in (0, 1)".into()));
    }
    if !(shell_eps > 2.0 * delta && shell_eps < 1.0) {
        return Err(Error::InvalidParameter(
            "shell width must satisfy 2*delta < shell_eps < 1".into(),
        ));
    }
    // uniform-knot interpolant of min{x^2, 4} on [-2, 2], constant outside
    let w = (8.0 * d as f64 / delta).ceil() as usize;
    let spacing = 4.0 / (w - 1) as f64;
    let knots: Vec<f64> = (0..w).map(|j| -2.0 + spacing * j as f64).collect();
    let clipped_square = |x: f64| (x * x).min(4.0);
    // slope changes at each knot (zero slope on both tails)
    let mut gammas = Vec::with_capacity(w);
    let mut prev_slope = 0.0;
    for j in 0..w {
        let slope = if j + 1 < w {
            (clipped_square(knots[j + 1]) - clipped_square(knots[j])) / spacing
        } else {
            0.0
        };
        gammas.push(slope - prev_slope);
        prev_slope = slope;
    }
    let left_value = 4.0; // interpolant value on the left tail

    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d * w);
    for i in 0..d {
        for &t in &knots {
            let mut r = vec![0.0; d];
            r[i] = 1.0;
            rows.push((r, -t));
        }
    }
    let layer1 = Layer::from_rows(rows, Activation::Relu)?;

    // u = (sum_i l(x_i) - 1) / shell_eps, optionally negated for the
    // complement (the unit ramp satisfies ramp(-u) = 1 - ramp(u))
    let c_mu = 1.0 / shell_eps;
    let sign = if opts.complement { -1.0 } else { 1.0 };
    let base_bias = c_mu * (d as f64 * left_value - 1.0);
    let mut ramp_row = vec![0.0; d * w];
    for i in 0..d {
        for (j, &gamma) in gammas.iter().enumerate() {
            ramp_row[i * w + j] = sign * c_mu * gamma;
        }
    }
    let layer2 = Layer::from_rows(
        vec![
            (ramp_row.clone(), sign * base_bias + 0.5),
            (ramp_row, sign * base_bias - 0.5),
        ],
        Activation::Relu,
    )?;
    let readout = Layer::from_rows(vec![(vec![1.0, -1.0], 0.0)], Activation::Identity)?;
    let net = Network::new(d, vec![layer1, layer2, readout])?;
    debug_assert_eq!(net.depth(), 3);
    debug_assert!(net.width() <= (8.0 * (d * d) as f64 / delta).ceil() as usize + d);
    Ok(net)
}

/// A piecewise-linear profile on `[0, inf)`:
/// `f(z) = constant + initial_slope * z + sum_j jump_j [z - knot_j]+`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPwl {
    pub constant: f64,
    pub initial_slope: f64,
    /// `(knot, slope jump)` with strictly increasing nonnegative knots.
    pub knots: Vec<(f64, f64)>,
}

impl RadialPwl {
    pub fn new(constant: f64, initial_slope: f64, knots: Vec<(f64, f64)>) -> Result<RadialPwl> {
        let mut prev = -1.0;
        for &(t, _) in &knots {
            if !(t >= 0.0 && t.is_finite() && t > prev) {
                return Err(Error::InvalidParameter(
                    "knots must be finite, nonnegative, and strictly increasing".into(),
                ));
            }
            prev = t;
        }
        Ok(RadialPwl { constant, initial_slope, knots })
    }

    pub fn eval(&self, z: f64) -> f64 {
        let mut acc = self.constant + self.initial_slope * z;
        for &(t, jump) in &self.knots {
            acc += jump * (z - t).max(0.0);
        }
        acc
    }
}

/// Exact three-layer network computing `f(||x||_1)` for piecewise-linear f.
///
/// Hidden layer 1 is `{[x_i]+, [-x_i]+}` (width exactly 2d); hidden layer 2
/// applies the profile's hinges to the norm plus pass-through neurons (the
/// norm is nonnegative, so `[n]+ = n` and `[n + 1]+ = n + 1` are exact, the
/// latter carrying the constant term).
pub fn l1_radial(f: &RadialPwl, d: usize) -> Result<Network> {
    if d < 1 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(2 * d);
    for i in 0..d {
        let mut pos = vec![0.0; d];
        pos[i] = 1.0;
        let mut neg = vec![0.0; d];
        neg[i] = -1.0;
        rows.push((pos, 0.0));
        rows.push((neg, 0.0));
    }
    let layer1 = Layer::from_rows(rows, Activation::Relu)?;

    let ones = vec![1.0; 2 * d];
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for &(t, _) in &f.knots {
        rows.push((ones.clone(), -t));
    }
    rows.push((ones.clone(), 0.0)); // pass-through of the norm
    let with_constant = f.constant != 0.0;
    if with_constant {
        rows.push((ones.clone(), 1.0));
    }
    let layer2 = Layer::from_rows(rows, Activation::Relu)?;

    let mut readout = Vec::with_capacity(layer2.out_dim());
    for &(_, jump) in &f.knots {
        readout.push(jump);
    }
    if with_constant {
        readout.push(f.initial_slope - f.constant);
        readout.push(f.constant);
    } else {
        readout.push(f.initial_slope);
    }
    let layer3 = Layer::new(layer2.out_dim(), 1, readout, vec![0.0], Activation::Identity)?;
    let net = Network::new(d, vec![layer1, layer2, layer3])?;
    debug_assert_eq!(net.depth(), 3);
    debug_assert_eq!(net.layers()[0].out_dim(), 2 * d);
    Ok(net)
}
