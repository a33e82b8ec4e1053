//! A small feed-forward network engine: 1-D valid convolutions, dense
//! layers, tanh / identity activations and an MSE loss.
//!
//! Every per-sample tensor is a flat `f64` buffer. Convolution layers read
//! their input as `in_channels` contiguous sequences and write `filters`
//! contiguous sequences, so "flatten" between layers is a no-op.

mod adam;
mod train;

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::rng::substream;
use crate::{Error, Result};

pub use adam::{Adam, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
pub use train::{train, EpochRecord, Samples, TrainConfig, TrainHistory};

/// Filters in the first convolution of both architectures.
pub const CONV1_FILTERS: usize = 128;
/// Filters in the second convolution of the reflected-channel network.
pub const CONV2_FILTERS: usize = 64;
pub const KERNEL: usize = 4;
pub const STRIDE: usize = 1;
pub const DE_HIDDEN: usize = 200;
pub const RE_HIDDEN: [usize; 2] = [600, 900];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerKind {
    Conv1d { filters: usize, kernel: usize, stride: usize, in_channels: usize },
    Dense { units: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn conv(filters: usize, in_channels: usize) -> Self {
        LayerSpec {
            kind: LayerKind::Conv1d { filters, kernel: KERNEL, stride: STRIDE, in_channels },
            activation: Activation::Tanh,
        }
    }

    pub fn dense(units: usize) -> Self {
        LayerSpec { kind: LayerKind::Dense { units }, activation: Activation::Linear }
    }
}

/// How the second convolution of the reflected-channel network reads the
/// 128 feature maps of the first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReCnnLayout {
    /// One long single-channel sequence of length `128·η`. This is the
    /// layout the closed-form complexity counts assume; it makes the first
    /// dense layer very wide.
    Flattened,
    /// 128 input channels of length `η` each (conventional multi-channel
    /// convolution).
    Channels,
}

/// Trainable tensors of one layer.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerParams {
    pub spec: LayerSpec,
    pub in_len: usize,
    pub out_len: usize,
    /// Conv: `filters × (in_channels·kernel)`; dense: `units × in_len`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl LayerParams {
    fn conv_geometry(&self) -> Option<ConvGeometry> {
        match self.spec.kind {
            LayerKind::Conv1d { filters, kernel, stride, in_channels } => {
                let seq_len = self.in_len / in_channels;
                Some(ConvGeometry {
                    filters,
                    kernel,
                    stride,
                    in_channels,
                    seq_len,
                    out_seq: conv_out_len(seq_len, kernel, stride),
                })
            }
            LayerKind::Dense { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct ConvGeometry {
    filters: usize,
    kernel: usize,
    stride: usize,
    in_channels: usize,
    seq_len: usize,
    out_seq: usize,
}

impl ConvGeometry {
    fn patch_len(&self) -> usize {
        self.in_channels * self.kernel
    }

    /// Patch matrix (out_seq × in_channels·kernel) of one sample.
    fn im2col(&self, x: &[f64], patches: &mut [f64]) {
        let pl = self.patch_len();
        for o in 0..self.out_seq {
            let row = &mut patches[o * pl..(o + 1) * pl];
            for c in 0..self.in_channels {
                let src = &x[c * self.seq_len + o * self.stride..][..self.kernel];
                row[c * self.kernel..(c + 1) * self.kernel].copy_from_slice(src);
            }
        }
    }

    fn col2im_add(&self, dpatches: &[f64], dx: &mut [f64]) {
        let pl = self.patch_len();
        for o in 0..self.out_seq {
            let row = &dpatches[o * pl..(o + 1) * pl];
            for c in 0..self.in_channels {
                let dst = &mut dx[c * self.seq_len + o * self.stride..][..self.kernel];
                for (d, s) in dst.iter_mut().zip(&row[c * self.kernel..(c + 1) * self.kernel]) {
                    *d += s;
                }
            }
        }
    }
}

/// `⌊(n − kernel)/stride⌋ + 1`.
pub fn conv_out_len(n: usize, kernel: usize, stride: usize) -> usize {
    (n - kernel) / stride + 1
}

/// Gradients with the same layout as the network's parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Gradients {
            layers: net.layers.iter().map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.biases.len()])).collect(),
        }
    }

    /// Flat parameter index, in declaration order.
    pub fn get(&self, index: usize) -> f64 {
        let mut i = index;
        for (w, b) in &self.layers {
            if i < w.len() {
                return w[i];
            }
            i -= w.len();
            if i < b.len() {
                return b[i];
            }
            i -= b.len();
        }
        panic!("gradient index {index} out of range")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    input_len: usize,
    layers: Vec<LayerParams>,
}

impl Network {
    /// Glorot-uniform weights, zero biases. The same `seed` always gives the
    /// same initial network.
    pub fn new(input_len: usize, specs: &[LayerSpec], seed: u64) -> Result<Self> {
        let mut net = Network::zeroed(input_len, specs)?;
        let mut rng = substream(seed, 0x6e6e_696e_6974, 0);
        for layer in &mut net.layers {
            let (fan_in, fan_out) = match layer.spec.kind {
                LayerKind::Conv1d { filters, kernel, in_channels, .. } => (in_channels * kernel, filters * kernel),
                LayerKind::Dense { units } => (layer.in_len, units),
            };
            let limit = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
            for w in &mut layer.weights {
                *w = rng.random_range(-limit..limit);
            }
        }
        Ok(net)
    }

    /// Shapes checked, every parameter zero.
    pub fn zeroed(input_len: usize, specs: &[LayerSpec]) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::InvalidConfig("network needs at least one layer"));
        }
        let mut layers = Vec::with_capacity(specs.len());
        let mut len = input_len;
        for spec in specs {
            let (out_len, n_w, n_b) = match spec.kind {
                LayerKind::Conv1d { filters, kernel, stride, in_channels } => {
                    if filters == 0 || kernel == 0 || stride == 0 || in_channels == 0 {
                        return Err(Error::InvalidConfig("convolution counts must be at least 1"));
                    }
                    if !len.is_multiple_of(in_channels) {
                        return Err(Error::InvalidConfig("convolution input not divisible into channels"));
                    }
                    let seq = len / in_channels;
                    if kernel > seq {
                        return Err(Error::InvalidArgument("convolution input shorter than kernel", seq as f64));
                    }
                    (filters * conv_out_len(seq, kernel, stride), filters * in_channels * kernel, filters)
                }
                LayerKind::Dense { units } => {
                    if units == 0 {
                        return Err(Error::InvalidConfig("dense units must be at least 1"));
                    }
                    (units, units * len, units)
                }
            };
            layers.push(LayerParams {
                spec: *spec,
                in_len: len,
                out_len,
                weights: vec![0.0; n_w],
                biases: vec![0.0; n_b],
            });
            len = out_len;
        }
        Ok(Network { input_len, layers })
    }

    /// Rebuilds a network from stored specs and tensors.
    pub fn from_parts(input_len: usize, specs: &[LayerSpec], tensors: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        let mut net = Network::zeroed(input_len, specs)?;
        if tensors.len() != net.layers.len() {
            return Err(Error::LengthMismatch { expected: net.layers.len(), actual: tensors.len() });
        }
        for (layer, (w, b)) in net.layers.iter_mut().zip(tensors) {
            if w.len() != layer.weights.len() {
                return Err(Error::LengthMismatch { expected: layer.weights.len(), actual: w.len() });
            }
            if b.len() != layer.biases.len() {
                return Err(Error::LengthMismatch { expected: layer.biases.len(), actual: b.len() });
            }
            layer.weights = w;
            layer.biases = b;
        }
        Ok(net)
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn output_len(&self) -> usize {
        self.layers.last().map_or(self.input_len, |l| l.out_len)
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [LayerParams] {
        &mut self.layers
    }

    pub fn specs(&self) -> Vec<LayerSpec> {
        self.layers.iter().map(|l| l.spec).collect()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    fn param_slot(&mut self, index: usize) -> &mut f64 {
        let mut i = index;
        for layer in &mut self.layers {
            if i < layer.weights.len() {
                return &mut layer.weights[i];
            }
            i -= layer.weights.len();
            if i < layer.biases.len() {
                return &mut layer.biases[i];
            }
            i -= layer.biases.len();
        }
        panic!("parameter index {index} out of range")
    }

    /// Flat parameter index, in declaration order (weights then biases, layer by layer).
    pub fn param(&mut self, index: usize) -> f64 {
        *self.param_slot(index)
    }

    pub fn set_param(&mut self, index: usize, value: f64) {
        *self.param_slot(index) = value;
    }

    /// Output for one input vector.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.forward_batch(input, 1)
    }

    /// Outputs for `n` inputs stored back to back.
    pub fn forward_batch(&self, inputs: &[f64], n: usize) -> Result<Vec<f64>> {
        self.check_inputs(inputs, n)?;
        let mut x = inputs.to_vec();
        for layer in &self.layers {
            x = layer_forward(layer, &x, n);
        }
        Ok(x)
    }

    /// Mean squared error over every output of every sample in the batch.
    pub fn loss(&self, inputs: &[f64], targets: &[f64], n: usize) -> Result<f64> {
        let out = self.forward_batch(inputs, n)?;
        self.check_targets(targets, n)?;
        Ok(mse(&out, targets))
    }

    /// Batch MSE and its gradient with respect to every parameter.
    pub fn loss_and_grad(&self, inputs: &[f64], targets: &[f64], n: usize) -> Result<(f64, Gradients)> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        self.check_inputs(inputs, n)?;
        self.check_targets(targets, n)?;

        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len() + 1);
        acts.push(inputs.to_vec());
        for layer in &self.layers {
            let next = layer_forward(layer, acts.last().expect("non-empty"), n);
            acts.push(next);
        }
        let out = acts.last().expect("non-empty");
        let loss = mse(out, targets);

        let scale = 2.0 / out.len() as f64;
        let mut delta: Vec<f64> = out.iter().zip(targets).map(|(y, t)| scale * (y - t)).collect();
        let mut grads = Gradients::zeros_like(self);
        for (idx, layer) in self.layers.iter().enumerate().rev() {
            let y = &acts[idx + 1];
            if layer.spec.activation == Activation::Tanh {
                for (d, &a) in delta.iter_mut().zip(y) {
                    *d *= 1.0 - a * a;
                }
            }
            let need_dx = idx > 0;
            let (gw, gb) = &mut grads.layers[idx];
            let dx = layer_backward(layer, &acts[idx], &delta, n, gw, gb, need_dx);
            delta = dx;
        }
        Ok((loss, grads))
    }

    fn check_inputs(&self, inputs: &[f64], n: usize) -> Result<()> {
        if inputs.len() != n * self.input_len {
            return Err(Error::LengthMismatch { expected: n * self.input_len, actual: inputs.len() });
        }
        Ok(())
    }

    fn check_targets(&self, targets: &[f64], n: usize) -> Result<()> {
        let want = n * self.output_len();
        if targets.len() != want {
            return Err(Error::LengthMismatch { expected: want, actual: targets.len() });
        }
        Ok(())
    }
}

fn mse(out: &[f64], targets: &[f64]) -> f64 {
    if out.is_empty() {
        return 0.0;
    }
    out.iter().zip(targets).map(|(y, t)| (y - t) * (y - t)).sum::<f64>() / out.len() as f64
}

/// `c = alpha·a·b + beta·c` with explicit strides (row, column) for each operand.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (isize, isize),
    b: &[f64],
    (rsb, csb): (isize, isize),
    beta: f64,
    c: &mut [f64],
    (rsc, csc): (isize, isize),
) {
    if m == 0 || n == 0 {
        return;
    }
    // SAFETY: every caller passes slices that cover the full strided extent
    // of an m×k, k×n and m×n matrix respectively.
    unsafe {
        matrixmultiply::dgemm(m, k, n, 1.0, a.as_ptr(), rsa, csa, b.as_ptr(), rsb, csb, beta, c.as_mut_ptr(), rsc, csc);
    }
}

fn layer_forward(layer: &LayerParams, x: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * layer.out_len];
    match layer.conv_geometry() {
        None => {
            let (units, inl) = (layer.out_len, layer.in_len);
            for row in out.chunks_exact_mut(units) {
                row.copy_from_slice(&layer.biases);
            }
            // out (n×units) += x (n×in) · Wᵀ
            gemm(
                n,
                inl,
                units,
                x,
                (inl as isize, 1),
                &layer.weights,
                (1, inl as isize),
                1.0,
                &mut out,
                (units as isize, 1),
            );
        }
        Some(g) => {
            let pl = g.patch_len();
            let mut patches = vec![0.0; g.out_seq * pl];
            for (xs, ys) in x.chunks_exact(layer.in_len).zip(out.chunks_exact_mut(layer.out_len)) {
                g.im2col(xs, &mut patches);
                for (f, row) in ys.chunks_exact_mut(g.out_seq).enumerate() {
                    row.fill(layer.biases[f]);
                }
                // ys (filters×out_seq) += W (filters×pl) · patchesᵀ
                gemm(
                    g.filters,
                    pl,
                    g.out_seq,
                    &layer.weights,
                    (pl as isize, 1),
                    &patches,
                    (1, pl as isize),
                    1.0,
                    ys,
                    (g.out_seq as isize, 1),
                );
            }
        }
    }
    if layer.spec.activation == Activation::Tanh {
        for v in &mut out {
            *v = libm::tanh(*v);
        }
    }
    out
}

/// Accumulates parameter gradients for `delta` (gradient at the layer's
/// pre-activation) and returns the gradient at the layer input.
fn layer_backward(
    layer: &LayerParams,
    x: &[f64],
    delta: &[f64],
    n: usize,
    gw: &mut [f64],
    gb: &mut [f64],
    need_dx: bool,
) -> Vec<f64> {
    let mut dx = if need_dx { vec![0.0; n * layer.in_len] } else { Vec::new() };
    match layer.conv_geometry() {
        None => {
            let (units, inl) = (layer.out_len, layer.in_len);
            // gW (units×in) = δᵀ (units×n) · x (n×in)
            gemm(units, n, inl, delta, (1, units as isize), x, (inl as isize, 1), 1.0, gw, (inl as isize, 1));
            for row in delta.chunks_exact(units) {
                for (b, d) in gb.iter_mut().zip(row) {
                    *b += d;
                }
            }
            if need_dx {
                // dx (n×in) = δ (n×units) · W (units×in)
                gemm(
                    n,
                    units,
                    inl,
                    delta,
                    (units as isize, 1),
                    &layer.weights,
                    (inl as isize, 1),
                    0.0,
                    &mut dx,
                    (inl as isize, 1),
                );
            }
        }
        Some(g) => {
            let pl = g.patch_len();
            let mut patches = vec![0.0; g.out_seq * pl];
            let mut dpatches = if need_dx { vec![0.0; g.out_seq * pl] } else { Vec::new() };
            for s in 0..n {
                let xs = &x[s * layer.in_len..(s + 1) * layer.in_len];
                let ds = &delta[s * layer.out_len..(s + 1) * layer.out_len];
                g.im2col(xs, &mut patches);
                // gW (filters×pl) += δ_s (filters×out_seq) · patches (out_seq×pl)
                gemm(
                    g.filters,
                    g.out_seq,
                    pl,
                    ds,
                    (g.out_seq as isize, 1),
                    &patches,
                    (pl as isize, 1),
                    1.0,
                    gw,
                    (pl as isize, 1),
                );
                for (f, row) in ds.chunks_exact(g.out_seq).enumerate() {
                    gb[f] += row.iter().sum::<f64>();
                }
                if need_dx {
                    // dpatches (out_seq×pl) = δ_sᵀ (out_seq×filters) · W (filters×pl)
                    gemm(
                        g.out_seq,
                        g.filters,
                        pl,
                        ds,
                        (1, g.out_seq as isize),
                        &layer.weights,
                        (pl as isize, 1),
                        0.0,
                        &mut dpatches,
                        (pl as isize, 1),
                    );
                    g.col2im_add(&dpatches, &mut dx[s * layer.in_len..(s + 1) * layer.in_len]);
                }
            }
        }
    }
    dx
}

/// Direct-channel network: conv(128, 4×1, tanh) → dense(200) → dense(output).
pub fn de_cnn_specs(output_len: usize) -> Vec<LayerSpec> {
    vec![LayerSpec::conv(CONV1_FILTERS, 1), LayerSpec::dense(DE_HIDDEN), LayerSpec::dense(output_len)]
}

/// Reflected-channel network: conv(128) → conv(64) → dense(600) → dense(900) → dense(output).
pub fn re_cnn_specs(output_len: usize, layout: ReCnnLayout) -> Vec<LayerSpec> {
    let second_in = match layout {
        ReCnnLayout::Flattened => 1,
        ReCnnLayout::Channels => CONV1_FILTERS,
    };
    vec![
        LayerSpec::conv(CONV1_FILTERS, 1),
        LayerSpec::conv(CONV2_FILTERS, second_in),
        LayerSpec::dense(RE_HIDDEN[0]),
        LayerSpec::dense(RE_HIDDEN[1]),
        LayerSpec::dense(output_len),
    ]
}

pub fn build_de_cnn(input_len: usize, output_len: usize, seed: u64) -> Result<Network> {
    if input_len < KERNEL {
        return Err(Error::InvalidArgument("input shorter than kernel", input_len as f64));
    }
    Network::new(input_len, &de_cnn_specs(output_len), seed)
}

pub fn build_re_cnn(input_len: usize, output_len: usize, layout: ReCnnLayout, seed: u64) -> Result<Network> {
    if input_len < KERNEL {
        return Err(Error::InvalidArgument("input shorter than kernel", input_len as f64));
    }
    Network::new(input_len, &re_cnn_specs(output_len, layout), seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn de_cnn_shapes_and_parameter_count() {
        let net = build_de_cnn(16, 16, 0).unwrap();
        assert_eq!(net.layers()[0].out_len, CONV1_FILTERS * 13);
        assert_eq!(net.output_len(), 16);
        // 128·(4+1) + (128·13+1)·200 + (200+1)·16
        assert_eq!(net.param_count(), 640 + 333_000 + 3_216);
        assert_eq!(net.param_count(), 336_856);
    }

    #[test]
    fn re_cnn_shapes() {
        let eta2 = conv_out_len(64, 4, 1);
        let net = build_re_cnn(64, 64, ReCnnLayout::Flattened, 0).unwrap();
        let second = &net.layers()[1];
        assert_eq!(second.in_len, 128 * eta2);
        assert_eq!(second.out_len, 64 * conv_out_len(128 * eta2, 4, 1));
        assert_eq!(net.output_len(), 64);

        let net = build_re_cnn(64, 64, ReCnnLayout::Channels, 0).unwrap();
        assert_eq!(net.layers()[1].out_len, 64 * (eta2 - 3));
    }

    #[test]
    fn short_inputs_rejected() {
        assert!(build_de_cnn(3, 4, 0).is_err());
        assert!(build_re_cnn(3, 4, ReCnnLayout::Channels, 0).is_err());
        assert!(Network::zeroed(4, &[LayerSpec::conv(2, 3)]).is_err());
    }

    #[test]
    fn zero_network_outputs_zero() {
        let net = Network::zeroed(10, &de_cnn_specs(6)).unwrap();
        let out = net.forward(&[0.3; 10]).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_network_matches_matrix_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let specs = [LayerSpec::dense(5), LayerSpec::dense(3)];
        let net = Network::new(4, &specs, 9).unwrap();
        let x = random_vec(4, &mut rng);
        let (l0, l1) = (&net.layers()[0], &net.layers()[1]);
        let h: Vec<f64> =
            (0..5).map(|u| l0.biases[u] + (0..4).map(|i| l0.weights[u * 4 + i] * x[i]).sum::<f64>()).collect();
        let y: Vec<f64> =
            (0..3).map(|u| l1.biases[u] + (0..5).map(|i| l1.weights[u * 5 + i] * h[i]).sum::<f64>()).collect();
        let out = net.forward(&x).unwrap();
        for (a, b) in out.iter().zip(&y) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn conv_layer_matches_direct_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = LayerSpec {
            kind: LayerKind::Conv1d { filters: 3, kernel: 4, stride: 2, in_channels: 2 },
            activation: Activation::Linear,
        };
        let net = Network::new(2 * 11, &[spec], 5).unwrap();
        let x = random_vec(22, &mut rng);
        let out = net.forward(&x).unwrap();
        let l = &net.layers()[0];
        let out_seq = conv_out_len(11, 4, 2);
        for f in 0..3 {
            for o in 0..out_seq {
                let mut acc = l.biases[f];
                for c in 0..2 {
                    for k in 0..4 {
                        acc += l.weights[f * 8 + c * 4 + k] * x[c * 11 + o * 2 + k];
                    }
                }
                assert!((out[f * out_seq + o] - acc).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn forward_is_deterministic_and_batch_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = build_re_cnn(8, 4, ReCnnLayout::Channels, 1).unwrap();
        let xs = random_vec(3 * 8, &mut rng);
        let batch = net.forward_batch(&xs, 3).unwrap();
        assert_eq!(batch, net.forward_batch(&xs, 3).unwrap());
        for s in 0..3 {
            let single = net.forward(&xs[s * 8..(s + 1) * 8]).unwrap();
            for (a, b) in single.iter().zip(&batch[s * 4..(s + 1) * 4]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let net1 = build_re_cnn(8, 4, ReCnnLayout::Channels, 1).unwrap();
        let hidden = layer_forward(&net1.layers()[0], &xs[..8], 1);
        assert!(hidden.iter().all(|v| v.abs() < 1.0));
    }

    #[test]
    fn perfect_prediction_has_zero_loss_and_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let net = build_de_cnn(8, 4, 2).unwrap();
        let xs = random_vec(2 * 8, &mut rng);
        let targets = net.forward_batch(&xs, 2).unwrap();
        let (loss, grads) = net.loss_and_grad(&xs, &targets, 2).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grads.layers.iter().all(|(w, b)| w.iter().chain(b).all(|&g| g == 0.0)));
    }

    fn gradient_check(net: &mut Network, n: usize, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs = random_vec(n * net.input_len(), &mut rng);
        let ts = random_vec(n * net.output_len(), &mut rng);
        let (loss, grads) = net.loss_and_grad(&xs, &ts, n).unwrap();
        assert!(loss >= 0.0);
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let i = rng.random_range(0..net.param_count());
            let orig = net.param(i);
            net.set_param(i, orig + h);
            let up = net.loss(&xs, &ts, n).unwrap();
            net.set_param(i, orig - h);
            let down = net.loss(&xs, &ts, n).unwrap();
            net.set_param(i, orig);
            let numeric = (up - down) / (2.0 * h);
            let analytic = grads.get(i);
            let denom = analytic.abs().max(numeric.abs()).max(1e-8);
            worst = worst.max((analytic - numeric).abs() / denom);
        }
        worst
    }

    #[test]
    fn gradients_match_finite_differences_small_nets() {
        let specs = [
            LayerSpec::conv(3, 1),
            LayerSpec {
                kind: LayerKind::Conv1d { filters: 2, kernel: 4, stride: 1, in_channels: 3 },
                activation: Activation::Tanh,
            },
            LayerSpec::dense(5),
            LayerSpec::dense(3),
        ];
        let mut net = Network::new(12, &specs, 8).unwrap();
        assert!(gradient_check(&mut net, 3, 100, 9) <= 1e-4);
    }
}
