use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{Adam, Network};
use crate::rng::substream;
use crate::{Error, Result};

/// Input/target pairs stored row-major.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Samples {
    pub input_len: usize,
    pub target_len: usize,
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
}

impl Samples {
    pub fn new(input_len: usize, target_len: usize) -> Self {
        Samples { input_len, target_len, inputs: Vec::new(), targets: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.inputs.len().checked_div(self.input_len).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn push(&mut self, input: &[f64], target: &[f64]) -> Result<()> {
        if input.len() != self.input_len {
            return Err(Error::LengthMismatch { expected: self.input_len, actual: input.len() });
        }
        if target.len() != self.target_len {
            return Err(Error::LengthMismatch { expected: self.target_len, actual: target.len() });
        }
        self.inputs.extend_from_slice(input);
        self.targets.extend_from_slice(target);
        Ok(())
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.input_len..(i + 1) * self.input_len]
    }

    pub fn target(&self, i: usize) -> &[f64] {
        &self.targets[i * self.target_len..(i + 1) * self.target_len]
    }

    fn gather(&self, idx: &[usize]) -> Samples {
        let mut out = Samples::new(self.input_len, self.target_len);
        for &i in idx {
            out.inputs.extend_from_slice(self.input(i));
            out.targets.extend_from_slice(self.target(i));
        }
        out
    }

    /// Random (training, validation) split; the validation part holds
    /// `round(fraction·n)` samples, at least one when `n ≥ 2`.
    pub fn split(&self, fraction: f64, seed: u64) -> Result<(Samples, Samples)> {
        if !(0.0..1.0).contains(&fraction) {
            return Err(Error::InvalidArgument("validation fraction outside [0, 1)", fraction));
        }
        let n = self.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut substream(seed, 0x0073_706c_6974, 0));
        let mut n_val = libm::round(fraction * n as f64) as usize;
        if fraction > 0.0 && n >= 2 {
            n_val = n_val.clamp(1, n - 1);
        }
        let (val, train) = idx.split_at(n_val);
        Ok((self.gather(train), self.gather(val)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 2e-4,
            batch_size: 200,
            max_epochs: 200,
            patience: 5,
            validation_fraction: 0.1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidArgument("learning rate", self.learning_rate));
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.patience == 0 {
            return Err(Error::InvalidConfig("batch size, epochs and patience must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochRecord {
    pub train_mse: f64,
    pub val_mse: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainHistory {
    /// Validation MSE of the untrained network.
    pub initial_val_mse: f64,
    pub epochs: Vec<EpochRecord>,
    /// 1-based epoch whose weights were kept; 0 means the initial weights.
    pub best_epoch: usize,
    pub best_val_mse: f64,
    pub stopped_early: bool,
}

fn dataset_mse(net: &Network, data: &Samples, chunk: usize) -> Result<f64> {
    let n = data.len();
    let mut total = 0.0;
    let mut start = 0;
    while start < n {
        let end = (start + chunk).min(n);
        let b = end - start;
        let out = net.forward_batch(&data.inputs[start * data.input_len..end * data.input_len], b)?;
        let t = &data.targets[start * data.target_len..end * data.target_len];
        total += out.iter().zip(t).map(|(y, t)| (y - t) * (y - t)).sum::<f64>();
        start = end;
    }
    Ok(total / (n * data.target_len) as f64)
}

/// Minibatch Adam with early stopping on validation MSE.
///
/// An epoch counts as an improvement only when its validation MSE is
/// strictly below the best so far (starting from the untrained network).
/// Training stops after `patience` epochs in a row without improvement or
/// at `max_epochs`, and the best weights are restored. When `val` is empty
/// the training set doubles as the validation set.
pub fn train(net: &mut Network, train: &Samples, val: &Samples, cfg: &TrainConfig) -> Result<TrainHistory> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for data in [train, val] {
        if data.input_len != net.input_len() || data.target_len != net.output_len() {
            return Err(Error::LengthMismatch { expected: net.input_len(), actual: data.input_len });
        }
    }
    let val = if val.is_empty() { train } else { val };
    let chunk = cfg.batch_size;

    let mut opt = Adam::new(net, cfg.learning_rate);
    let mut rng = substream(cfg.seed, 0x0074_7261_696e, 0);
    let initial = dataset_mse(net, val, chunk)?;
    let mut best = initial;
    let mut best_net = net.clone();
    let mut history = TrainHistory {
        initial_val_mse: initial,
        epochs: Vec::new(),
        best_epoch: 0,
        best_val_mse: initial,
        stopped_early: false,
    };
    let mut since_best = 0;

    let n = train.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut xb = Vec::new();
    let mut tb = Vec::new();
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut sum = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            xb.clear();
            tb.clear();
            for &i in batch {
                xb.extend_from_slice(train.input(i));
                tb.extend_from_slice(train.target(i));
            }
            let (loss, grads) = net.loss_and_grad(&xb, &tb, batch.len())?;
            sum += loss * batch.len() as f64;
            opt.step(net, &grads);
        }
        let val_mse = dataset_mse(net, val, chunk)?;
        history.epochs.push(EpochRecord { train_mse: sum / n as f64, val_mse });
        if val_mse < best {
            best = val_mse;
            best_net = net.clone();
            history.best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                history.stopped_early = true;
                break;
            }
        }
    }
    history.best_val_mse = best;
    *net = best_net;
    Ok(history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neuralnet::{build_de_cnn, LayerSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear_task(n: usize, seed: u64) -> Samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..3 * 6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut s = Samples::new(6, 3);
        for _ in 0..n {
            let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let t: Vec<f64> = (0..3).map(|r| (0..6).map(|c| w[r * 6 + c] * x[c]).sum()).collect();
            s.push(&x, &t).unwrap();
        }
        s
    }

    #[test]
    fn learns_linear_map() {
        let data = linear_task(400, 1);
        let (tr, va) = data.split(0.1, 2).unwrap();
        assert_eq!(va.len(), 40);
        let mut net = Network::new(6, &[LayerSpec::dense(16), LayerSpec::dense(3)], 3).unwrap();
        let cfg = TrainConfig { learning_rate: 1e-2, batch_size: 32, max_epochs: 200, ..TrainConfig::default() };
        let h = train(&mut net, &tr, &va, &cfg).unwrap();
        assert!(h.best_val_mse * 10.0 <= h.initial_val_mse, "{} vs {}", h.best_val_mse, h.initial_val_mse);
    }

    #[test]
    fn frozen_validation_stops_after_patience() {
        let data = linear_task(50, 4);
        let mut net = build_de_cnn(6, 3, 0).unwrap();
        let before = net.clone();
        let cfg = TrainConfig { learning_rate: 0.0, ..TrainConfig::default() };
        let h = train(&mut net, &data, &data, &cfg).unwrap();
        assert_eq!(h.epochs.len(), cfg.patience);
        assert!(h.stopped_early);
        assert_eq!(h.best_epoch, 0);
        assert_eq!(net, before);
    }

    #[test]
    fn restores_best_weights() {
        let data = linear_task(200, 5);
        let (tr, va) = data.split(0.2, 6).unwrap();
        let mut net = Network::new(6, &[LayerSpec::dense(3)], 7).unwrap();
        // A large step size makes validation MSE bounce around.
        let cfg = TrainConfig { learning_rate: 0.5, batch_size: 8, max_epochs: 30, ..TrainConfig::default() };
        let h = train(&mut net, &tr, &va, &cfg).unwrap();
        let seen = h.epochs.iter().map(|e| e.val_mse).fold(h.initial_val_mse, f64::min);
        assert_eq!(h.best_val_mse, seen);
        let now = dataset_mse(&net, &va, 200).unwrap();
        assert!((now - seen).abs() <= 1e-12 * seen.max(1.0));
    }

    #[test]
    fn same_seed_same_weights() {
        let data = linear_task(120, 8);
        let run = || {
            let mut net = build_de_cnn(6, 3, 11).unwrap();
            let cfg =
                TrainConfig { learning_rate: 1e-3, batch_size: 16, max_epochs: 5, seed: 12, ..TrainConfig::default() };
            train(&mut net, &data, &Samples::new(6, 3), &cfg).unwrap();
            net
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn empty_training_set_rejected() {
        let mut net = build_de_cnn(6, 3, 0).unwrap();
        let empty = Samples::new(6, 3);
        assert!(matches!(train(&mut net, &empty, &empty, &TrainConfig::default()), Err(Error::EmptyDataset)));
    }

    #[test]
    fn split_sizes() {
        let data = linear_task(10, 1);
        let (a, b) = data.split(0.1, 0).unwrap();
        assert_eq!((a.len(), b.len()), (9, 1));
        let (a, b) = data.split(0.0, 0).unwrap();
        assert_eq!((a.len(), b.len()), (10, 0));
        assert!(data.split(1.0, 0).is_err());
    }
}
