//! Learning the unit-ball indicator with shallow vs deeper networks.
//!
//! Data points are drawn with a uniformly random direction and a norm
//! uniform on `[0, r_max]`, labeled by `1{||x|| <= 1}`. Training is plain
//! mini-batch SGD with classical momentum under the squared loss, with a
//! multiplicatively decaying learning rate clamped at a floor. Everything is
//! deterministic given the seeds; sweep cells may run concurrently and the
//! output ordering is canonical.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Radially uniform labeled dataset specification.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub dim: usize,
    pub n_train: usize,
    pub n_valid: usize,
    /// Norms are uniform on `[0, r_max]`; must exceed 1 so both classes appear.
    pub r_max: f64,
    pub seed: u64,
}

/// Row-major features (`n x dim`) with 0/1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub features: Vec<f64>,
    pub labels: Vec<f64>,
}

impl Split {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub dim: usize,
    pub train: Split,
    pub valid: Split,
}

/// Deterministic dataset: `x = r u` with u uniform on the sphere (normalized
/// Gaussian) and r uniform on `[0, r_max]`; label `1{r <= 1}`.
pub fn generate_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    if spec.dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !(spec.r_max > 1.0) {
        return Err(Error::InvalidParameter(
            "norm range must extend beyond 1 so both classes are represented".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut draw = |n: usize| -> Split {
        let mut features = Vec::with_capacity(n * spec.dim);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let mut u: Vec<f64> = (0..spec.dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            let r: f64 = rng.gen_range(0.0..spec.r_max);
            for v in &mut u {
                features.push(*v / norm * r);
            }
            labels.push(if r <= 1.0 { 1.0 } else { 0.0 });
        }
        Split { features, labels }
    };
    let train = draw(spec.n_train);
    let valid = draw(spec.n_valid);
    Ok(Dataset { dim: spec.dim, train, valid })
}

/// A ReLU multi-layer perceptron with a scalar linear output (no output
/// bias), trainable by SGD with classical momentum.
#[derive(Debug, Clone)]
pub struct Mlp {
    dims: Vec<usize>, // input, hidden..., 1
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>, // empty vec for the output layer
    vel_w: Vec<Vec<f64>>,
    vel_b: Vec<Vec<f64>>,
}

impl Mlp {
    /// He-style init: zero biases, Gaussian weights with std `sqrt(2/fan_in)`.
    pub fn new(input_dim: usize, hidden: &[usize], rng: &mut ChaCha8Rng) -> Mlp {
        let mut dims = vec![input_dim];
        dims.extend_from_slice(hidden);
        dims.push(1);
        let mut weights: Vec<Vec<f64>> = Vec::new();
        let mut biases: Vec<Vec<f64>> = Vec::new();
        for l in 0..dims.len() - 1 {
            let (fan_in, fan_out) = (dims[l], dims[l + 1]);
            let std = (2.0 / fan_in as f64).sqrt();
            weights.push(
                (0..fan_in * fan_out)
                    .map(|_| rng.sample::<f64, _>(StandardNormal) * std)
                    .collect(),
            );
            let last = l + 2 == dims.len();
            biases.push(if last { Vec::new() } else { vec![0.0; fan_out] });
        }
        let vel_w = weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let vel_b = biases.iter().map(|b| vec![0.0; b.len()]).collect();
        Mlp { dims, weights, biases, vel_w, vel_b }
    }

    pub fn num_params(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    /// Flattened parameters, layer by layer (weights then bias).
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }

    pub fn set_params(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.num_params());
        let mut at = 0;
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            let wn = w.len();
            w.copy_from_slice(&flat[at..at + wn]);
            at += wn;
            let bn = b.len();
            b.copy_from_slice(&flat[at..at + bn]);
            at += bn;
        }
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let mut cur = x.to_vec();
        for l in 0..self.weights.len() {
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            let last = l + 1 == self.weights.len();
            let mut next = vec![0.0; n_out];
            for r in 0..n_out {
                let row = &self.weights[l][r * n_in..(r + 1) * n_in];
                let mut acc = if last { 0.0 } else { self.biases[l][r] };
                for (w, v) in row.iter().zip(&cur) {
                    acc += w * v;
                }
                // subgradient at exactly 0 is taken as 0
                next[r] = if last { acc } else { acc.max(0.0) };
            }
            cur = next;
        }
        cur[0]
    }

    /// Mean squared loss over a row-major batch.
    pub fn batch_loss(&self, xs: &[f64], ys: &[f64]) -> f64 {
        let d = self.dims[0];
        let mut acc = 0.0;
        for (i, y) in ys.iter().enumerate() {
            let p = self.forward(&xs[i * d..(i + 1) * d]);
            acc += (p - y) * (p - y);
        }
        acc / ys.len() as f64
    }

    pub fn rmse(&self, xs: &[f64], ys: &[f64]) -> f64 {
        self.batch_loss(xs, ys).sqrt()
    }

    /// Mean squared loss and its gradient in the flat parameter layout.
    pub fn batch_gradient(&self, xs: &[f64], ys: &[f64]) -> (f64, Vec<f64>) {
        let layers = self.weights.len();
        let batch = ys.len();
        let d = self.dims[0];
        let mut grad_w: Vec<Vec<f64>> = self.weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let mut grad_b: Vec<Vec<f64>> = self.biases.iter().map(|b| vec![0.0; b.len()]).collect();
        let mut loss = 0.0;
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(layers + 1);
        for i in 0..batch {
            // forward, keeping post-activation values
            acts.clear();
            acts.push(xs[i * d..(i + 1) * d].to_vec());
            for l in 0..layers {
                let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
                let last = l + 1 == layers;
                let mut next = vec![0.0; n_out];
                for r in 0..n_out {
                    let row = &self.weights[l][r * n_in..(r + 1) * n_in];
                    let mut acc = if last { 0.0 } else { self.biases[l][r] };
                    for (w, v) in row.iter().zip(&acts[l]) {
                        acc += w * v;
                    }
                    next[r] = if last { acc } else { acc.max(0.0) };
                }
                acts.push(next);
            }
            let pred = acts[layers][0];
            let err = pred - ys[i];
            loss += err * err;

            // backward
            let mut delta = vec![2.0 * err / batch as f64];
            for l in (0..layers).rev() {
                let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
                let last = l + 1 == layers;
                let mut delta_prev = vec![0.0; n_in];
                for r in 0..n_out {
                    let dr = delta[r];
                    if dr == 0.0 {
                        continue;
                    }
                    let row_at = r * n_in;
                    for c in 0..n_in {
                        grad_w[l][row_at + c] += dr * acts[l][c];
                        delta_prev[c] += dr * self.weights[l][row_at + c];
                    }
                    if !last {
                        grad_b[l][r] += dr;
                    }
                }
                if l > 0 {
                    // gate by the ReLU of the previous layer
                    for (dp, a) in delta_prev.iter_mut().zip(&acts[l]) {
                        if *a <= 0.0 {
                            *dp = 0.0;
                        }
                    }
                }
                delta = delta_prev;
            }
        }
        let mut flat = Vec::with_capacity(self.num_params());
        for (w, b) in grad_w.iter().zip(&grad_b) {
            flat.extend_from_slice(w);
            flat.extend_from_slice(b);
        }
        (loss / batch as f64, flat)
    }

    /// One classical-momentum step: `v <- mu v + g`, `theta <- theta - lr v`.
    pub fn sgd_step(&mut self, xs: &[f64], ys: &[f64], lr: f64, momentum: f64) -> f64 {
        let (loss, grad) = self.batch_gradient(xs, ys);
        let mut at = 0;
        for l in 0..self.weights.len() {
            for (w, v) in self.weights[l].iter_mut().zip(self.vel_w[l].iter_mut()) {
                *v = momentum * *v + grad[at];
                *w -= lr * *v;
                at += 1;
            }
            for (b, v) in self.biases[l].iter_mut().zip(self.vel_b[l].iter_mut()) {
                *v = momentum * *v + grad[at];
                *b -= lr * *v;
                at += 1;
            }
        }
        loss
    }

    /// FNV-1a over the parameter bit patterns.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for p in self.params() {
            for byte in p.to_bits().to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }
}

/// Training schedule; the defaults mirror the reference setup (batches of
/// 100, momentum 0.95, learning rate 0.1 decaying by 0.95 every 1000
/// batches down to 1e-4).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub hidden: Vec<usize>,
    pub batch_size: usize,
    pub momentum: f64,
    pub lr0: f64,
    pub lr_decay: f64,
    pub decay_period: usize,
    pub lr_floor: f64,
    pub max_batches: usize,
    /// RMSE curves are recorded every this many batches.
    pub eval_window: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn with_hidden(hidden: Vec<usize>, max_batches: usize, seed: u64) -> TrainConfig {
        TrainConfig {
            hidden,
            batch_size: 100,
            momentum: 0.95,
            lr0: 0.1,
            lr_decay: 0.95,
            decay_period: 1000,
            lr_floor: 1e-4,
            max_batches,
            eval_window: 200,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = !self.hidden.is_empty()
            && self.hidden.iter().all(|&h| h > 0)
            && self.batch_size > 0
            && self.momentum >= 0.0
            && self.momentum < 1.0
            && self.lr0 > 0.0
            && self.lr_decay > 0.0
            && self.lr_decay <= 1.0
            && self.decay_period > 0
            && self.lr_floor > 0.0
            && self.max_batches > 0
            && self.eval_window > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("training configuration out of range".into()))
        }
    }

    pub fn learning_rate(&self, batch: usize) -> f64 {
        (self.lr0 * self.lr_decay.powi((batch / self.decay_period) as i32)).max(self.lr_floor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub batch: usize,
    pub train_rmse: f64,
    pub valid_rmse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainRun {
    pub config: TrainConfig,
    pub curves: Vec<CurvePoint>,
    pub final_valid_rmse: f64,
    pub params: usize,
    pub digest: u64,
}

/// Mini-batch SGD with momentum on the squared loss; deterministic given the
/// config seed. Aborts with a diagnostic if the training RMSE exceeds 1e3.
pub fn train(data: &Dataset, config: &TrainConfig) -> Result<TrainRun> {
    config.validate()?;
    if data.train.is_empty() || data.valid.is_empty() {
        return Err(Error::InvalidParameter("dataset has an empty split".into()));
    }
    let d = data.dim;
    let n = data.train.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut net = Mlp::new(d, &config.hidden, &mut rng);

    // fixed subsample for the train-side curve
    let probe = n.min(10_000);
    let mut order: Vec<usize> = (0..n).collect();
    let mut curves = Vec::new();
    let mut batch_index = 0usize;
    let mut xs = vec![0.0; config.batch_size * d];
    let mut ys = vec![0.0; config.batch_size];

    'epochs: loop {
        order.shuffle(&mut rng);
        for chunk in order.chunks_exact(config.batch_size) {
            for (bi, &si) in chunk.iter().enumerate() {
                xs[bi * d..(bi + 1) * d].copy_from_slice(&data.train.features[si * d..(si + 1) * d]);
                ys[bi] = data.train.labels[si];
            }
            let lr = config.learning_rate(batch_index);
            let loss = net.sgd_step(&xs, &ys, lr, config.momentum);
            batch_index += 1;
            if !loss.is_finite() || loss.sqrt() > 1e3 {
                return Err(Error::Diverged(format!(
                    "batch {batch_index}: rmse {}",
                    loss.sqrt()
                )));
            }
            if batch_index % config.eval_window == 0 || batch_index == config.max_batches {
                let train_rmse = net.rmse(
                    &data.train.features[..probe * d],
                    &data.train.labels[..probe],
                );
                let valid_rmse = net.rmse(&data.valid.features, &data.valid.labels);
                curves.push(CurvePoint { batch: batch_index, train_rmse, valid_rmse });
            }
            if batch_index == config.max_batches {
                break 'epochs;
            }
        }
    }
    let final_valid_rmse = curves.last().map(|c| c.valid_rmse).unwrap_or(f64::NAN);
    Ok(TrainRun {
        config: config.clone(),
        curves,
        final_valid_rmse,
        params: net.num_params(),
        digest: net.digest(),
    })
}

/// One architecture/seed cell of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub hidden: Vec<usize>,
    pub seed: u64,
    pub final_valid_rmse: f64,
    pub params: usize,
    pub run: TrainRun,
}

impl SweepCell {
    pub fn label(&self) -> String {
        let widths: Vec<String> = self.hidden.iter().map(|w| w.to_string()).collect();
        format!("{}layer-{}", self.hidden.len() + 1, widths.join("-"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub dim: usize,
    pub scale: f64,
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    /// Architectures in sweep order: the two-hidden-layer network first,
    /// then the single-hidden-layer widths in increasing order.
    pub fn architectures(dim_scale: f64) -> Vec<Vec<usize>> {
        let w = |base: f64| ((base * dim_scale).round() as usize).max(1);
        vec![
            vec![w(100.0), w(20.0)],
            vec![w(100.0)],
            vec![w(200.0)],
            vec![w(400.0)],
            vec![w(800.0)],
        ]
    }

    /// Validation-RMSE improvements between successive single-hidden-layer
    /// widths for one seed (positive = doubling the width helped).
    pub fn width_doubling_improvements(&self, seed: u64) -> Vec<f64> {
        let mut shallow: Vec<&SweepCell> = self
            .cells
            .iter()
            .filter(|c| c.hidden.len() == 1 && c.seed == seed)
            .collect();
        shallow.sort_by_key(|c| c.hidden[0]);
        shallow
            .windows(2)
            .map(|w| w[0].final_valid_rmse - w[1].final_valid_rmse)
            .collect()
    }
}

/// Train the five reference architectures for every seed.
///
/// `scale` shrinks the sample counts and widths proportionally (scale 1 is
/// the full setup: 5e5 train / 5e4 validation samples, hidden sizes 100/20
/// and 100..800). Cells run concurrently; the output order is canonical
/// (architecture-major, then seed).
pub fn depth_vs_width_sweep(
    dim: usize,
    scale: f64,
    seeds: &[u64],
    max_batches: usize,
) -> Result<SweepTable> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::InvalidParameter("scale must lie in (0, 1]".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("need at least one seed".into()));
    }
    let archs = SweepTable::architectures(scale);
    let mut cells: Vec<SweepCell> = Vec::new();
    for &seed in seeds {
        let spec = DatasetSpec {
            dim,
            n_train: ((5e5 * scale).round() as usize).max(1000),
            n_valid: ((5e4 * scale).round() as usize).max(1000),
            r_max: 2.0,
            seed,
        };
        let data = generate_dataset(&spec)?;
        let seed_cells: Vec<SweepCell> = archs
            .par_iter()
            .enumerate()
            .map(|(ai, hidden)| {
                let mut config =
                    TrainConfig::with_hidden(hidden.clone(), max_batches, seed ^ ((ai as u64) << 32));
                config.batch_size = config.batch_size.min(spec.n_train);
                let run = train(&data, &config)?;
                Ok(SweepCell {
                    hidden: hidden.clone(),
                    seed,
                    final_valid_rmse: run.final_valid_rmse,
                    params: run.params,
                    run,
                })
            })
            .collect::<Result<_>>()?;
        cells.extend(seed_cells);
    }
    cells.sort_by(|a, b| (a.hidden.len(), &a.hidden, a.seed).cmp(&(b.hidden.len(), &b.hidden, b.seed)));
    Ok(SweepTable { dim, scale, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_is_deterministic_and_balanced() {
        let spec = DatasetSpec { dim: 10, n_train: 20_000, n_valid: 1000, r_max: 2.0, seed: 3 };
        let a = generate_dataset(&spec).unwrap();
        let b = generate_dataset(&spec).unwrap();
        assert_eq!(a, b);
        // P(label = 1) = 1 / r_max; 3 sigma binomial band
        let ones: f64 = a.train.labels.iter().sum();
        let p = ones / spec.n_train as f64;
        let sigma = (0.5 * 0.5 / spec.n_train as f64).sqrt();
        assert!((p - 0.5).abs() <= 3.0 * sigma, "p = {p}");
        // norms within range
        for i in 0..1000 {
            let x = &a.train.features[i * 10..(i + 1) * 10];
            let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm <= 2.0 + 1e-9);
        }
    }

    #[test]
    fn momentum_two_step_hand_check() {
        // one-parameter model w -> w*x, squared loss against (x, y) = (1, 1)
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut net = Mlp::new(1, &[], &mut rng);
        assert_eq!(net.num_params(), 1);
        net.set_params(&[0.5]);
        net.sgd_step(&[1.0], &[1.0], 0.1, 0.95);
        // g0 = 2(0.5 - 1) = -1; v1 = -1; w1 = 0.5 + 0.1 = 0.6
        assert!((net.params()[0] - 0.6).abs() < 1e-15);
        net.sgd_step(&[1.0], &[1.0], 0.1, 0.95);
        // g1 = 2(0.6 - 1) = -0.8; v2 = 0.95*(-1) - 0.8 = -1.75; w2 = 0.775
        assert!((net.params()[0] - 0.775).abs() < 1e-15);
    }

    #[test]
    fn gradients_match_finite_differences() {
        // randomize every parameter: with zero-initialized biases the
        // pre-activations of inputs in the dead cone sit exactly on the
        // ReLU kink, where one-sided slopes legitimately disagree
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut net = Mlp::new(3, &[4, 4], &mut rng);
        for trial in 0..20 {
            let params: Vec<f64> =
                (0..net.num_params()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            net.set_params(&params);
            let xs: Vec<f64> = (0..15).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let ys: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (_, grad) = net.batch_gradient(&xs, &ys);
            let h = 1e-5;
            let mut worst: f64 = 0.0;
            for i in 0..params.len() {
                let mut plus = params.clone();
                plus[i] += h;
                net.set_params(&plus);
                let lp = net.batch_loss(&xs, &ys);
                let mut minus = params.clone();
                minus[i] -= h;
                net.set_params(&minus);
                let lm = net.batch_loss(&xs, &ys);
                let fd = (lp - lm) / (2.0 * h);
                let denom = grad[i].abs().max(fd.abs()).max(1e-6);
                worst = worst.max((grad[i] - fd).abs() / denom);
            }
            net.set_params(&params);
            assert!(worst <= 1e-5, "trial {trial}: max relative error {worst}");
        }
    }

    #[test]
    fn zero_labels_converge_fast() {
        let spec = DatasetSpec { dim: 4, n_train: 2_000, n_valid: 1000, r_max: 2.0, seed: 5 };
        let mut data = generate_dataset(&spec).unwrap();
        for l in data.train.labels.iter_mut().chain(data.valid.labels.iter_mut()) {
            *l = 0.0;
        }
        let mut config = TrainConfig::with_hidden(vec![8], 200, 1);
        config.eval_window = 50;
        let run = train(&data, &config).unwrap();
        assert!(run.final_valid_rmse < 0.05, "rmse {}", run.final_valid_rmse);
    }

    #[test]
    fn one_dimensional_threshold_is_learnable() {
        // linearly separable 1-d data: x uniform on [-2, 2], label 1{x <= 0}
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut make = |n: usize| {
            let features: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let labels: Vec<f64> =
                features.iter().map(|&x| if x <= 0.0 { 1.0 } else { 0.0 }).collect();
            Split { features, labels }
        };
        let data = Dataset { dim: 1, train: make(5_000), valid: make(2_000) };
        // a tiny 1-d net wants a gentler rate than the full-scale schedule
        let mut config = TrainConfig::with_hidden(vec![8], 3_000, 5);
        config.lr0 = 0.02;
        let run = train(&data, &config).unwrap();
        assert!(run.final_valid_rmse < 0.1, "rmse {}", run.final_valid_rmse);
    }

    #[test]
    fn training_is_reproducible() {
        let spec = DatasetSpec { dim: 3, n_train: 2_000, n_valid: 500, r_max: 2.0, seed: 11 };
        let data = generate_dataset(&spec).unwrap();
        let config = TrainConfig::with_hidden(vec![6], 400, 9);
        let a = train(&data, &config).unwrap();
        let b = train(&data, &config).unwrap();
        assert_eq!(a.curves, b.curves);
        assert_eq!(a.digest, b.digest);
    }

    #[test]
    fn learning_rate_schedule() {
        let config = TrainConfig::with_hidden(vec![4], 10, 0);
        assert_eq!(config.learning_rate(0), 0.1);
        assert_eq!(config.learning_rate(999), 0.1);
        assert!((config.learning_rate(1000) - 0.095).abs() < 1e-12);
        assert_eq!(config.learning_rate(1_000_000), 1e-4);
    }

    #[test]
    fn smoothed_training_curve_mostly_decreases() {
        // average the training curve over disjoint 50-evaluation windows;
        // the block means must be non-increasing in at least 90% of pairs
        let spec = DatasetSpec { dim: 5, n_train: 20_000, n_valid: 2000, r_max: 2.0, seed: 13 };
        let data = generate_dataset(&spec).unwrap();
        let config = TrainConfig::with_hidden(vec![16], 50_000, 3);
        let run = train(&data, &config).unwrap();
        let rmse: Vec<f64> = run.curves.iter().map(|c| c.train_rmse).collect();
        let block = 50;
        let means: Vec<f64> = rmse
            .chunks_exact(block)
            .map(|c| c.iter().sum::<f64>() / block as f64)
            .collect();
        let pairs = means.len() - 1;
        let declines = means.windows(2).filter(|w| w[1] <= w[0] + 1e-9).count();
        assert!(
            declines as f64 >= 0.9 * pairs as f64,
            "only {declines}/{pairs} declines"
        );
    }

    #[test]
    fn full_scale_parameter_counts() {
        // at scale 1 and d = 100 the widest shallow net carries ~80K
        // parameters against ~10K for the deeper one
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let archs = SweepTable::architectures(1.0);
        assert_eq!(archs[0], vec![100, 20]);
        assert_eq!(archs[4], vec![800]);
        let deep = Mlp::new(100, &archs[0], &mut rng).num_params();
        let wide = Mlp::new(100, &archs[4], &mut rng).num_params();
        assert!((10_000..14_000).contains(&deep), "deep params {deep}");
        assert!((78_000..84_000).contains(&wide), "wide params {wide}");
    }

    #[test]
    fn sweep_single_cell_matches_train() {
        let table = depth_vs_width_sweep(4, 0.002, &[1], 300).unwrap();
        assert_eq!(table.cells.len(), 5);
        for c in &table.cells {
            assert!(c.final_valid_rmse.is_finite());
        }
        // canonical order: 2-hidden-layer cell sorted after the shallow ones?
        // order is architecture-major: depth-2 entries (one hidden layer) first
        assert_eq!(table.cells[0].hidden.len(), 1);
        assert_eq!(table.cells[4].hidden.len(), 2);
    }
}
