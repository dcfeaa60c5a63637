//! Exact piecewise-linear views of network restrictions to lines.
//!
//! [`restrict_to_line`] propagates breakpoints through the layers: every
//! neuron's pre-activation stays an affine function of the line parameter on
//! each segment, each ReLU splits segments at sign-change roots (solved
//! analytically per segment), and adjacent segments with identical affines
//! are merged at the end. The result is the exact restriction of the network
//! to the line, up to floating-point rounding.

use crate::error::{Error, Result};
use crate::network::{Activation, Network};
use crate::quadrature;

/// Endpoint-merge tolerance for breakpoint handling.
const TIE_TOL: f64 = 1e-12;

/// One linear piece `t -> slope * t + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub slope: f64,
    pub intercept: f64,
}

impl Segment {
    pub fn eval(&self, t: f64) -> f64 {
        self.slope * t + self.intercept
    }
}

/// A scalar piecewise-linear function on a closed interval.
///
/// `segments.len() == breakpoints.len() + 1`; breakpoints are strictly
/// increasing and interior to the domain. Fits produced by the
/// dynamic-programming oracle may be discontinuous and carry
/// `continuous = false`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear1D {
    domain: (f64, f64),
    breakpoints: Vec<f64>,
    segments: Vec<Segment>,
    continuous: bool,
}

impl PiecewiseLinear1D {
    pub fn new(
        domain: (f64, f64),
        breakpoints: Vec<f64>,
        segments: Vec<Segment>,
        continuous: bool,
    ) -> Result<PiecewiseLinear1D> {
        if !(domain.0 < domain.1) {
            return Err(Error::InvalidParameter(format!(
                "empty domain [{}, {}]",
                domain.0, domain.1
            )));
        }
        if segments.len() != breakpoints.len() + 1 {
            return Err(Error::Validation(format!(
                "{} segments with {} breakpoints",
                segments.len(),
                breakpoints.len()
            )));
        }
        let mut prev = domain.0;
        for &b in &breakpoints {
            if !(b > prev && b < domain.1) {
                return Err(Error::Validation(format!(
                    "breakpoint {b} not strictly inside ({prev}, {})",
                    domain.1
                )));
            }
            prev = b;
        }
        if continuous {
            for (i, &b) in breakpoints.iter().enumerate() {
                let left = segments[i].eval(b);
                let right = segments[i + 1].eval(b);
                let scale = left.abs().max(right.abs()).max(1.0);
                // steep segments amplify the rounding of the breakpoint
                // itself; budget for it explicitly
                let slope_term = (segments[i].slope.abs() + segments[i + 1].slope.abs())
                    * (b.abs() + 1.0)
                    * 4.0
                    * f64::EPSILON;
                if (left - right).abs() > 1e-9 * scale + slope_term {
                    return Err(Error::Validation(format!(
                        "discontinuity {} at breakpoint {b}",
                        (left - right).abs()
                    )));
                }
            }
        }
        Ok(PiecewiseLinear1D { domain, breakpoints, segments, continuous })
    }

    /// Constant or affine function on an interval.
    pub fn affine(domain: (f64, f64), slope: f64, intercept: f64) -> PiecewiseLinear1D {
        PiecewiseLinear1D {
            domain,
            breakpoints: Vec::new(),
            segments: vec![Segment { slope, intercept }],
            continuous: true,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn continuous(&self) -> bool {
        self.continuous
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// Index of the segment containing t (breakpoints belong to the left piece).
    fn segment_index(&self, t: f64) -> usize {
        self.breakpoints.partition_point(|&b| b < t)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.segments[self.segment_index(t)].eval(t)
    }
}

/// An affine line `t -> u + t v` with a unit direction and parameter range.
#[derive(Debug, Clone, PartialEq)]
pub struct LineRestriction {
    base: Vec<f64>,
    direction: Vec<f64>,
    range: (f64, f64),
}

impl LineRestriction {
    /// Normalizes the direction; rejects zero directions and empty ranges.
    pub fn new(base: Vec<f64>, direction: Vec<f64>, range: (f64, f64)) -> Result<LineRestriction> {
        if base.len() != direction.len() {
            return Err(Error::DimensionMismatch(
                "base point and direction have different dimensions".into(),
            ));
        }
        let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("direction must be a nonzero vector".into()));
        }
        if !(range.0 < range.1) {
            return Err(Error::InvalidParameter("line range must be nonempty".into()));
        }
        let direction = direction.iter().map(|v| v / norm).collect();
        Ok(LineRestriction { base, direction, range })
    }

    /// The canonical parametrization of an axis interval in one dimension.
    pub fn axis_1d(range: (f64, f64)) -> LineRestriction {
        LineRestriction::new(vec![0.0], vec![1.0], range).expect("unit axis")
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn point(&self, t: f64) -> Vec<f64> {
        self.base
            .iter()
            .zip(&self.direction)
            .map(|(u, v)| u + t * v)
            .collect()
    }
}

/// Exact restriction of a scalar-output network to a line.
pub fn restrict_to_line(net: &Network, line: &LineRestriction) -> Result<PiecewiseLinear1D> {
    if net.input_dim() != line.base.len() {
        return Err(Error::DimensionMismatch(format!(
            "line lives in dimension {}, network expects {}",
            line.base.len(),
            net.input_dim()
        )));
    }
    if net.output_dim() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "restriction needs a scalar output, network produces {}",
            net.output_dim()
        )));
    }
    let (lo, hi) = line.range;
    let tol = TIE_TOL * (hi - lo).max(1.0);

    // state: interior breakpoints plus, per segment, the pre-activation
    // affine (slope, intercept) of every neuron in the pending layer
    let mut breaks: Vec<f64> = Vec::new();
    let mut seg: Vec<Vec<(f64, f64)>> = vec![line
        .direction
        .iter()
        .zip(&line.base)
        .map(|(&v, &u)| (v, u))
        .collect()];
    let mut pending_relu = false;

    for layer in net.layers() {
        let mut new_breaks: Vec<f64> = Vec::with_capacity(breaks.len());
        let mut new_seg: Vec<Vec<(f64, f64)>> = Vec::with_capacity(seg.len());
        for (s, affines) in seg.iter().enumerate() {
            let span_lo = if s == 0 { lo } else { breaks[s - 1] };
            let span_hi = if s == breaks.len() { hi } else { breaks[s] };
            let mut cuts: Vec<f64> = Vec::new();
            if pending_relu {
                for &(slope, intercept) in affines {
                    if slope != 0.0 {
                        let root = -intercept / slope;
                        if root > span_lo + tol && root < span_hi - tol {
                            cuts.push(root);
                        }
                    }
                }
                cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
                cuts.dedup_by(|a, b| (*a - *b).abs() <= tol);
            }
            let mut piece_lo = span_lo;
            for piece in 0..=cuts.len() {
                let piece_hi = if piece == cuts.len() { span_hi } else { cuts[piece] };
                let mid = 0.5 * (piece_lo + piece_hi);
                // next layer affine, fused with the pending clamp
                let mut rows = Vec::with_capacity(layer.out_dim());
                for r in 0..layer.out_dim() {
                    let wrow = layer.row(r);
                    let mut slope = 0.0;
                    let mut intercept = layer.bias()[r];
                    for (m, &(a, c)) in affines.iter().enumerate() {
                        let active = !pending_relu || a * mid + c > 0.0;
                        if active {
                            slope += wrow[m] * a;
                            intercept += wrow[m] * c;
                        }
                    }
                    rows.push((slope, intercept));
                }
                new_seg.push(rows);
                if piece < cuts.len() {
                    new_breaks.push(cuts[piece]);
                }
                piece_lo = piece_hi;
            }
            if s < breaks.len() {
                new_breaks.push(breaks[s]);
            }
        }
        breaks = new_breaks;
        seg = new_seg;
        pending_relu = layer.activation() == Activation::Relu;
    }

    // the readout is linear, so no clamp is pending; take the scalar output
    // and merge adjacent pieces with identical affines
    let mut breakpoints: Vec<f64> = Vec::new();
    let mut segments: Vec<Segment> = Vec::new();
    for (s, affines) in seg.iter().enumerate() {
        let (slope, intercept) = affines[0];
        if let Some(last) = segments.last() {
            let scale = last.slope.abs().max(slope.abs()).max(1.0);
            let cscale = last.intercept.abs().max(intercept.abs()).max(1.0);
            if (last.slope - slope).abs() <= TIE_TOL * scale
                && (last.intercept - intercept).abs() <= TIE_TOL * cscale
            {
                continue; // same affine: drop the breakpoint
            }
            breakpoints.push(breaks[s - 1]);
        }
        segments.push(Segment { slope, intercept });
    }
    PiecewiseLinear1D::new((lo, hi), breakpoints, segments, true)
}

/// Upper bound `(2m)^l` on segment counts of line restrictions of networks
/// with width m and depth l.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionBound {
    pub value: u128,
    pub saturated: bool,
}

impl RegionBound {
    /// Whether `count` respects the bound (a saturated bound admits anything).
    pub fn admits(&self, count: usize) -> bool {
        self.saturated || (count as u128) <= self.value
    }
}

/// `(2m)^l`, saturating on overflow.
pub fn region_bound(m: usize, l: usize) -> Result<RegionBound> {
    if m < 1 || l < 1 {
        return Err(Error::InvalidParameter("width and depth must be at least 1".into()));
    }
    let base = 2u128.checked_mul(m as u128);
    let mut value: u128 = 1;
    let mut saturated = false;
    if let Some(base) = base {
        for _ in 0..l {
            match value.checked_mul(base) {
                Some(v) => value = v,
                None => {
                    saturated = true;
                    break;
                }
            }
        }
    } else {
        saturated = true;
    }
    if saturated {
        value = u128::MAX;
    }
    Ok(RegionBound { value, saturated })
}

/// Mean squared deviation of `f` from the piecewise-linear function over
/// `interval`, weighted by the uniform density on the function's domain.
///
/// With domain `[0, 1]` this is the plain integral of the squared residual
/// over `interval`.
pub fn l2_error<F: Fn(f64) -> f64>(
    pwl: &PiecewiseLinear1D,
    f: F,
    interval: (f64, f64),
) -> Result<f64> {
    let (a, b) = interval;
    let (lo, hi) = pwl.domain;
    if a < lo - TIE_TOL || b > hi + TIE_TOL || a > b {
        return Err(Error::InvalidParameter(format!(
            "interval [{a}, {b}] not contained in domain [{lo}, {hi}]"
        )));
    }
    let density = 1.0 / (hi - lo);
    let mut total = 0.0;
    let mut piece_lo = a;
    while piece_lo < b - TIE_TOL {
        // segment just to the right of piece_lo
        let idx = pwl.breakpoints.partition_point(|&bp| bp <= piece_lo + TIE_TOL);
        let seg_hi = if idx == pwl.breakpoints.len() { hi } else { pwl.breakpoints[idx] };
        let piece_hi = seg_hi.min(b);
        let seg = pwl.segments[idx];
        let g = |t: f64| {
            let r = f(t) - seg.eval(t);
            r * r
        };
        total += quadrature::integrate(&g, piece_lo, piece_hi, 1e-10)?;
        piece_lo = piece_hi;
    }
    Ok(total * density)
}
