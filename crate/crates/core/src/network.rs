//! Layered feed-forward ReLU networks.
//!
//! A [`Network`] is an ordered list of affine layers, each followed by either
//! a ReLU or the identity. Interior layers are always ReLU; the final layer
//! is a purely linear readout. Depth counts weight layers including the final
//! linear one (a "2-layer" network is one hidden layer plus the readout), and
//! width is the largest layer size.
//!
//! Networks are immutable; combinators ([`Network::stack`], [`parallel`],
//! [`Network::propagate_pad`], [`Network::affine_pre`],
//! [`Network::affine_post`]) return new values and preserve pointwise
//! semantics exactly up to floating-point rounding.

use crate::error::{Error, Result};

/// Per-layer nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
}

/// One affine layer `x -> act(Wx + b)` with row-major weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    in_dim: usize,
    out_dim: usize,
    /// Row-major `out_dim x in_dim`.
    weights: Vec<f64>,
    bias: Vec<f64>,
    activation: Activation,
}

impl Layer {
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
        activation: Activation,
    ) -> Result<Layer> {
        if weights.len() != in_dim * out_dim {
            return Err(Error::DimensionMismatch(format!(
                "layer weights have {} entries, expected {}x{}",
                weights.len(),
                out_dim,
                in_dim
            )));
        }
        if bias.len() != out_dim {
            return Err(Error::DimensionMismatch(format!(
                "layer bias has {} entries, expected {}",
                bias.len(),
                out_dim
            )));
        }
        Ok(Layer { in_dim, out_dim, weights, bias, activation })
    }

    /// Build a layer from `(row weights, bias)` pairs.
    pub fn from_rows(rows: Vec<(Vec<f64>, f64)>, activation: Activation) -> Result<Layer> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("layer needs at least one row".into()));
        }
        let in_dim = rows[0].0.len();
        let out_dim = rows.len();
        let mut weights = Vec::with_capacity(in_dim * out_dim);
        let mut bias = Vec::with_capacity(out_dim);
        for (row, b) in rows {
            if row.len() != in_dim {
                return Err(Error::DimensionMismatch("ragged layer rows".into()));
            }
            weights.extend_from_slice(&row);
            bias.push(b);
        }
        Layer::new(in_dim, out_dim, weights, bias, activation)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.weights[r * self.in_dim..(r + 1) * self.in_dim]
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// `act(Wx + b)` into `out` (len `out_dim`).
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.in_dim);
        debug_assert_eq!(out.len(), self.out_dim);
        for r in 0..self.out_dim {
            let row = &self.weights[r * self.in_dim..(r + 1) * self.in_dim];
            let mut acc = self.bias[r];
            for (w, xi) in row.iter().zip(x) {
                acc += w * xi;
            }
            out[r] = match self.activation {
                Activation::Relu => acc.max(0.0),
                Activation::Identity => acc,
            };
        }
    }
}

/// A feed-forward ReLU network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    input_dim: usize,
    layers: Vec<Layer>,
}

impl Network {
    /// Validates the layer chain: adjacent dimensions must match, interior
    /// layers must be ReLU, and the final layer must be a linear readout.
    ///
    /// Every constructor in this crate produces a zero final bias. A nonzero
    /// final bias can only arise through [`Network::affine_post`] and is
    /// rejected by the serializer.
    pub fn new(input_dim: usize, layers: Vec<Layer>) -> Result<Network> {
        if input_dim == 0 {
            return Err(Error::InvalidParameter("input dimension must be positive".into()));
        }
        if layers.is_empty() {
            return Err(Error::InvalidParameter("network needs at least one layer".into()));
        }
        let mut prev = input_dim;
        for (i, layer) in layers.iter().enumerate() {
            if layer.in_dim != prev {
                return Err(Error::DimensionMismatch(format!(
                    "layer {} expects input {} but previous layer produces {}",
                    i, layer.in_dim, prev
                )));
            }
            let last = i + 1 == layers.len();
            match (last, layer.activation) {
                (false, Activation::Relu) | (true, Activation::Identity) => {}
                (false, Activation::Identity) => {
                    return Err(Error::Validation(format!(
                        "interior layer {i} must use relu"
                    )));
                }
                (true, Activation::Relu) => {
                    return Err(Error::Validation("final layer must be linear".into()));
                }
            }
            prev = layer.out_dim;
        }
        Ok(Network { input_dim, layers })
    }

    /// Depth-1 identity map on `dim` coordinates.
    pub fn identity(dim: usize) -> Network {
        let mut weights = vec![0.0; dim * dim];
        for i in 0..dim {
            weights[i * dim + i] = 1.0;
        }
        Network {
            input_dim: dim,
            layers: vec![Layer::new(dim, dim, weights, vec![0.0; dim], Activation::Identity)
                .expect("identity layer")],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map(|l| l.out_dim).unwrap_or(0)
    }

    /// Number of weight layers, the final linear layer included.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Largest layer size.
    pub fn width(&self) -> usize {
        self.layers.iter().map(|l| l.out_dim).max().unwrap_or(0)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Weight count plus hidden-layer bias count (the linear readout carries
    /// no bias in the standard convention).
    pub fn num_params(&self) -> usize {
        let weights: usize = self.layers.iter().map(|l| l.weights.len()).sum();
        let biases: usize = self.layers[..self.layers.len() - 1]
            .iter()
            .map(|l| l.bias.len())
            .sum();
        weights + biases
    }

    /// Forward pass.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch(format!(
                "input has {} coordinates, network expects {}",
                x.len(),
                self.input_dim
            )));
        }
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers {
            next.clear();
            next.resize(layer.out_dim, 0.0);
            layer.forward_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    /// Forward pass for scalar-output networks.
    pub fn evaluate_scalar(&self, x: &[f64]) -> Result<f64> {
        let out = self.evaluate(x)?;
        if out.len() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected scalar output, network produces {}",
                out.len()
            )));
        }
        Ok(out[0])
    }

    /// Composition `second(first(x))`.
    ///
    /// The identity readout of `first` is merged algebraically into the first
    /// layer of `second`, so `depth = depth(first) + depth(second) - 1` and
    /// the width is the maximum of the two widths.
    pub fn stack(&self, second: &Network) -> Result<Network> {
        if self.output_dim() != second.input_dim {
            return Err(Error::DimensionMismatch(format!(
                "stack: first produces {} outputs, second expects {}",
                self.output_dim(),
                second.input_dim
            )));
        }
        let readout = self.layers.last().expect("nonempty");
        let head = &second.layers[0];
        // merged layer computes head(W_r x + b_r)
        let mut weights = vec![0.0; head.out_dim * readout.in_dim];
        let mut bias = head.bias.clone();
        for r in 0..head.out_dim {
            let hrow = head.row(r);
            for c in 0..readout.in_dim {
                let mut acc = 0.0;
                for (m, h) in hrow.iter().enumerate() {
                    acc += h * readout.weights[m * readout.in_dim + c];
                }
                weights[r * readout.in_dim + c] = acc;
            }
            let mut acc = 0.0;
            for (m, h) in hrow.iter().enumerate() {
                acc += h * readout.bias[m];
            }
            bias[r] += acc;
        }
        let merged = Layer::new(readout.in_dim, head.out_dim, weights, bias, head.activation)?;
        let mut layers: Vec<Layer> = self.layers[..self.layers.len() - 1].to_vec();
        layers.push(merged);
        layers.extend_from_slice(&second.layers[1..]);
        Network::new(self.input_dim, layers)
    }

    /// Pointwise-equal network of exactly `target_depth` layers.
    ///
    /// Each output value v is carried through the extra layers as the pair
    /// `([v]+, [-v]+)`, recombined by the new readout; padded layers have
    /// width `2 * output_dim`.
    pub fn propagate_pad(&self, target_depth: usize) -> Result<Network> {
        if target_depth < self.depth() {
            return Err(Error::InvalidParameter(format!(
                "cannot pad depth {} down to {}",
                self.depth(),
                target_depth
            )));
        }
        if target_depth == self.depth() {
            return Ok(self.clone());
        }
        let extra = target_depth - self.depth();
        let out = self.output_dim();
        let readout = self.layers.last().expect("nonempty");
        let mut layers: Vec<Layer> = self.layers[..self.layers.len() - 1].to_vec();

        // first carry layer: [v]+ and [-v]+ of the old readout values
        let mut w = vec![0.0; 2 * out * readout.in_dim];
        let mut b = vec![0.0; 2 * out];
        for r in 0..out {
            for c in 0..readout.in_dim {
                let v = readout.weights[r * readout.in_dim + c];
                w[2 * r * readout.in_dim + c] = v;
                w[(2 * r + 1) * readout.in_dim + c] = -v;
            }
            b[2 * r] = readout.bias[r];
            b[2 * r + 1] = -readout.bias[r];
        }
        layers.push(Layer::new(readout.in_dim, 2 * out, w, b, Activation::Relu)?);

        // subsequent carry layers keep each (a, b) pair alive
        for _ in 1..extra {
            let mut w = vec![0.0; (2 * out) * (2 * out)];
            for r in 0..out {
                w[2 * r * 2 * out + 2 * r] = 1.0;
                w[2 * r * 2 * out + 2 * r + 1] = -1.0;
                w[(2 * r + 1) * 2 * out + 2 * r] = -1.0;
                w[(2 * r + 1) * 2 * out + 2 * r + 1] = 1.0;
            }
            layers.push(Layer::new(2 * out, 2 * out, w, vec![0.0; 2 * out], Activation::Relu)?);
        }

        // new readout recombines v = a - b
        let mut w = vec![0.0; out * 2 * out];
        for r in 0..out {
            w[r * 2 * out + 2 * r] = 1.0;
            w[r * 2 * out + 2 * r + 1] = -1.0;
        }
        layers.push(Layer::new(2 * out, out, w, vec![0.0; out], Activation::Identity)?);
        Network::new(self.input_dim, layers)
    }

    /// `net(Ax + b)` with unchanged depth; the affine map is absorbed into
    /// the first layer. `a` has one row per current input coordinate and
    /// `a[i].len()` columns giving the new input dimension.
    pub fn affine_pre(&self, a: &[Vec<f64>], b: &[f64]) -> Result<Network> {
        if a.len() != self.input_dim || b.len() != self.input_dim {
            return Err(Error::DimensionMismatch(format!(
                "affine_pre: map produces {} coordinates, network expects {}",
                a.len(),
                self.input_dim
            )));
        }
        let new_in = a.first().map(|r| r.len()).unwrap_or(0);
        if new_in == 0 || a.iter().any(|r| r.len() != new_in) {
            return Err(Error::DimensionMismatch("affine_pre: ragged or empty map".into()));
        }
        let first = &self.layers[0];
        let mut weights = vec![0.0; first.out_dim * new_in];
        let mut bias = first.bias.clone();
        for r in 0..first.out_dim {
            let frow = first.row(r);
            for c in 0..new_in {
                let mut acc = 0.0;
                for (i, arow) in a.iter().enumerate() {
                    acc += frow[i] * arow[c];
                }
                weights[r * new_in + c] = acc;
            }
            let mut acc = 0.0;
            for (i, bi) in b.iter().enumerate() {
                acc += frow[i] * bi;
            }
            bias[r] += acc;
        }
        let mut layers = self.layers.clone();
        layers[0] = Layer::new(new_in, first.out_dim, weights, bias, first.activation)?;
        Network::new(new_in, layers)
    }

    /// Scalar-input convenience for [`Network::affine_pre`]: `net(a*x + b)`.
    pub fn affine_pre_scalar(&self, a: f64, b: f64) -> Result<Network> {
        self.affine_pre(&[vec![a]], &[b])
    }

    /// `C * net(x) + d` with unchanged depth; the map is absorbed into the
    /// readout. A nonzero `d` leaves a bias on the readout, which is valid
    /// for in-memory composition but rejected by the serializer.
    pub fn affine_post(&self, c: &[Vec<f64>], d: &[f64]) -> Result<Network> {
        let out = self.output_dim();
        let new_out = c.len();
        if new_out == 0 || d.len() != new_out {
            return Err(Error::DimensionMismatch("affine_post: empty map or bias mismatch".into()));
        }
        if c.iter().any(|r| r.len() != out) {
            return Err(Error::DimensionMismatch(format!(
                "affine_post: map expects {} network outputs",
                out
            )));
        }
        let readout = self.layers.last().expect("nonempty");
        let mut weights = vec![0.0; new_out * readout.in_dim];
        let mut bias = vec![0.0; new_out];
        for r in 0..new_out {
            for col in 0..readout.in_dim {
                let mut acc = 0.0;
                for m in 0..out {
                    acc += c[r][m] * readout.weights[m * readout.in_dim + col];
                }
                weights[r * readout.in_dim + col] = acc;
            }
            let mut acc = d[r];
            for m in 0..out {
                acc += c[r][m] * readout.bias[m];
            }
            bias[r] = acc;
        }
        let mut layers = self.layers.clone();
        let n = layers.len();
        layers[n - 1] =
            Layer::new(readout.in_dim, new_out, weights, bias, Activation::Identity)?;
        Network::new(self.input_dim, layers)
    }
}

/// Side-by-side combination of networks over a shared input space.
///
/// Each part reads the global coordinates listed in its slice map; outputs
/// are concatenated in order. Shorter parts are brought to the common depth
/// with [`Network::propagate_pad`], so the result width is the sum of the
/// (padded) part widths.
pub fn parallel(parts: &[(&Network, &[usize])], input_dim: usize) -> Result<Network> {
    if parts.is_empty() {
        return Err(Error::InvalidParameter("parallel needs at least one network".into()));
    }
    for (net, slice) in parts {
        if slice.len() != net.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "slice map has {} coordinates, network expects {}",
                slice.len(),
                net.input_dim()
            )));
        }
        if let Some(&bad) = slice.iter().find(|&&i| i >= input_dim) {
            return Err(Error::DimensionMismatch(format!(
                "slice index {bad} out of range for input dimension {input_dim}"
            )));
        }
    }
    let depth = parts.iter().map(|(n, _)| n.depth()).max().unwrap();
    let padded: Vec<Network> = parts
        .iter()
        .map(|(n, _)| n.propagate_pad(depth))
        .collect::<Result<_>>()?;

    let mut layers = Vec::with_capacity(depth);
    for j in 0..depth {
        let first = j == 0;
        let in_dim = if first {
            input_dim
        } else {
            padded.iter().map(|n| n.layers()[j - 1].out_dim()).sum()
        };
        let out_dim: usize = padded.iter().map(|n| n.layers()[j].out_dim()).sum();
        let activation = padded[0].layers()[j].activation();
        let mut weights = vec![0.0; out_dim * in_dim];
        let mut bias = Vec::with_capacity(out_dim);
        let mut row_off = 0;
        let mut col_off = 0;
        for (p, net) in padded.iter().enumerate() {
            let layer = &net.layers()[j];
            for r in 0..layer.out_dim() {
                let row = layer.row(r);
                if first {
                    let slice = parts[p].1;
                    for (c, &g) in slice.iter().enumerate() {
                        weights[(row_off + r) * in_dim + g] += row[c];
                    }
                } else {
                    for c in 0..layer.in_dim() {
                        weights[(row_off + r) * in_dim + col_off + c] = row[c];
                    }
                }
                bias.push(layer.bias()[r]);
            }
            row_off += layer.out_dim();
            if !first {
                col_off += layer.in_dim();
            }
        }
        layers.push(Layer::new(in_dim, out_dim, weights, bias, activation)?);
    }
    Network::new(input_dim, layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::triangle_wave;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn phi() -> Network {
        triangle_wave(1).unwrap()
    }

    /// A small random network for combinator checks.
    fn random_net(rng: &mut ChaCha8Rng, input: usize, hidden: &[usize], out: usize) -> Network {
        let mut layers = Vec::new();
        let mut prev = input;
        for &h in hidden {
            let weights: Vec<f64> = (0..h * prev).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let bias: Vec<f64> = (0..h).map(|_| rng.gen_range(-0.5..0.5)).collect();
            layers.push(Layer::new(prev, h, weights, bias, Activation::Relu).unwrap());
            prev = h;
        }
        let weights: Vec<f64> = (0..out * prev).map(|_| rng.gen_range(-1.0..1.0)).collect();
        layers.push(Layer::new(prev, out, weights, vec![0.0; out], Activation::Identity).unwrap());
        Network::new(input, layers).unwrap()
    }

    #[test]
    fn relu_of_negative_is_zero() {
        let net = Network::new(
            1,
            vec![
                Layer::from_rows(vec![(vec![1.0], 0.0)], Activation::Relu).unwrap(),
                Layer::from_rows(vec![(vec![1.0], 0.0)], Activation::Identity).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(net.evaluate_scalar(&[-3.0]).unwrap(), 0.0);
    }

    #[test]
    fn phi_at_half_is_one() {
        assert_eq!(phi().evaluate_scalar(&[0.5]).unwrap(), 1.0);
    }

    #[test]
    fn phi_composed_at_quarter() {
        let net = phi().stack(&phi()).unwrap();
        assert_eq!(net.evaluate_scalar(&[0.25]).unwrap(), 1.0);
        assert_eq!(net.depth(), 3);
    }

    #[test]
    fn stack_with_identity_is_pointwise_equal() {
        let net = phi();
        let stacked = net.stack(&Network::identity(1)).unwrap();
        for i in 0..100 {
            let x = -1.0 + 0.03 * i as f64;
            assert!(
                (net.evaluate_scalar(&[x]).unwrap() - stacked.evaluate_scalar(&[x]).unwrap())
                    .abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn stack_of_k_phis_has_depth_k_plus_one() {
        let mut net = phi();
        for _ in 1..5 {
            net = net.stack(&phi()).unwrap();
        }
        assert_eq!(net.depth(), 6);
        assert_eq!(net.width(), 2);
    }

    #[test]
    fn stack_dimension_mismatch_rejected() {
        let two_out = Network::identity(2);
        assert!(phi().stack(&two_out).is_err());
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        assert!(phi().evaluate(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn parallel_singleton_matches() {
        let net = phi();
        let par = parallel(&[(&net, &[0])], 1).unwrap();
        for i in 0..50 {
            let x = 0.02 * i as f64;
            assert!(
                (net.evaluate_scalar(&[x]).unwrap() - par.evaluate_scalar(&[x]).unwrap()).abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn parallel_of_copies_sums_width() {
        let net = phi();
        let slices: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
        let parts: Vec<(&Network, &[usize])> =
            slices.iter().map(|s| (&net, s.as_slice())).collect();
        let par = parallel(&parts, 4).unwrap();
        assert_eq!(par.width(), 8);
        assert_eq!(par.output_dim(), 4);
    }

    #[test]
    fn parallel_two_phis_on_separate_coordinates() {
        let net = phi();
        let par = parallel(&[(&net, &[0]), (&net, &[1])], 2).unwrap();
        let out = par.evaluate(&[0.5, 0.25]).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-12);
        assert!((out[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn parallel_rejects_empty() {
        assert!(parallel(&[], 1).is_err());
    }

    #[test]
    fn pad_preserves_values_on_grid() {
        let net = phi();
        let padded = net.propagate_pad(5).unwrap();
        assert_eq!(padded.depth(), 5);
        for i in 0..100 {
            let x = -0.5 + 0.02 * i as f64;
            assert!(
                (net.evaluate_scalar(&[x]).unwrap() - padded.evaluate_scalar(&[x]).unwrap())
                    .abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn pad_width_is_twice_output_dim() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let net = random_net(&mut rng, 3, &[5], 3);
        let padded = net.propagate_pad(4).unwrap();
        for layer in &padded.layers()[1..3] {
            assert_eq!(layer.out_dim(), 6);
        }
    }

    #[test]
    fn pad_to_same_depth_is_noop() {
        let net = phi();
        let padded = net.propagate_pad(net.depth()).unwrap();
        assert_eq!(net, padded);
    }

    #[test]
    fn pad_below_depth_rejected() {
        assert!(phi().propagate_pad(1).is_err());
    }

    #[test]
    fn affine_pre_shift() {
        // evaluating phi(x - 0.25) at x = 0.5 equals phi(0.25)
        let shifted = phi().affine_pre_scalar(1.0, -0.25).unwrap();
        assert!((shifted.evaluate_scalar(&[0.5]).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(shifted.depth(), phi().depth());
    }

    #[test]
    fn affine_post_constant_map() {
        let net = phi().affine_post(&[vec![0.0]], &[7.0]).unwrap();
        for i in 0..20 {
            let x = -1.0 + 0.1 * i as f64;
            assert_eq!(net.evaluate_scalar(&[x]).unwrap(), 7.0);
        }
    }

    #[test]
    fn affine_pre_identity_is_noop() {
        let net = phi().affine_pre(&[vec![1.0]], &[0.0]).unwrap();
        for i in 0..50 {
            let x = 0.02 * i as f64;
            assert_eq!(
                net.evaluate_scalar(&[x]).unwrap(),
                phi().evaluate_scalar(&[x]).unwrap()
            );
        }
    }

    #[test]
    fn combinators_match_composed_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let f = random_net(&mut rng, 2, &[4, 3], 2);
        let g = random_net(&mut rng, 2, &[5], 1);
        let stacked = f.stack(&g).unwrap();
        assert_eq!(stacked.depth(), f.depth() + g.depth() - 1);
        assert_eq!(stacked.width(), f.width().max(g.width()));
        for _ in 0..100 {
            let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let reference = g.evaluate(&f.evaluate(&x).unwrap()).unwrap();
            let got = stacked.evaluate(&x).unwrap();
            assert!((reference[0] - got[0]).abs() < 1e-9);
        }

        let parts: Vec<(&Network, &[usize])> = vec![(&f, &[0, 1]), (&g, &[1, 0])];
        let par = parallel(&parts, 2).unwrap();
        assert_eq!(par.output_dim(), 3);
        assert_eq!(par.depth(), f.depth().max(g.depth()));
        for _ in 0..100 {
            let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let fx = f.evaluate(&x).unwrap();
            let gx = g.evaluate(&[x[1], x[0]]).unwrap();
            let got = par.evaluate(&x).unwrap();
            assert!((got[0] - fx[0]).abs() < 1e-9);
            assert!((got[1] - fx[1]).abs() < 1e-9);
            assert!((got[2] - gx[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn evaluate_is_continuous() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = random_net(&mut rng, 2, &[6, 4], 1);
        // crude Lipschitz estimate from the product of layer norms
        let lip: f64 = net
            .layers()
            .iter()
            .map(|l| l.weights().iter().map(|w| w.abs()).sum::<f64>())
            .product();
        for _ in 0..200 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let h = 1e-6;
            let y0 = net.evaluate_scalar(&x).unwrap();
            let y1 = net.evaluate_scalar(&[x[0] + h, x[1]]).unwrap();
            assert!((y1 - y0).abs() <= lip * h + 1e-12);
        }
    }

    #[test]
    fn rejects_nonzero_interior_identity() {
        let layers = vec![
            Layer::from_rows(vec![(vec![1.0], 0.0)], Activation::Identity).unwrap(),
            Layer::from_rows(vec![(vec![1.0], 0.0)], Activation::Identity).unwrap(),
        ];
        assert!(Network::new(1, layers).is_err());
    }

    #[test]
    fn rejects_relu_readout() {
        let layers = vec![Layer::from_rows(vec![(vec![1.0], 0.0)], Activation::Relu).unwrap()];
        assert!(Network::new(1, layers).is_err());
    }
}
