//! Little-endian binary files for datasets and trained networks.
//!
//! Dataset: `"ISACDS1"`, then `stage, pair, V, U, input_len, target_len` as
//! u32, row-major f64 inputs, row-major f64 targets, and the standardization
//! statistics (per-feature mean, per-feature std, δ).
//!
//! Model: `"ISACNN1"`, u32 version, u32 stage, pair, input_len and layer
//! count, one six-u32 record per layer (kind, activation, filters/units,
//! kernel, stride, in_channels), every layer's weights then biases as f64,
//! and a trailer with the scaler statistics and δ.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use irs_isac_core::estimator::TrainedModel;
use irs_isac_core::features::{SampleSet, Standardizer};
use irs_isac_core::neuralnet::{Activation, LayerKind, LayerSpec, Network, Samples};
use irs_isac_core::{PairType, Stage};

pub const DATASET_MAGIC: &[u8; 7] = b"ISACDS1";
pub const MODEL_MAGIC: &[u8; 7] = b"ISACNN1";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("unsupported model file version {0}")]
    UnsupportedVersion(u32),
    #[error("corrupt file: {0}")]
    Corrupt(String),
}

impl From<irs_isac_core::Error> for FormatError {
    fn from(e: irs_isac_core::Error) -> Self {
        FormatError::Corrupt(e.to_string())
    }
}

pub type FormatResult<T> = Result<T, FormatError>;

fn put_u32(w: &mut impl Write, v: u32) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_f64s(w: &mut impl Write, vs: &[f64]) -> io::Result<()> {
    for v in vs {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn put_len(w: &mut impl Write, n: usize) -> FormatResult<()> {
    let v = u32::try_from(n).map_err(|_| FormatError::Corrupt(format!("{n} does not fit in 32 bits")))?;
    Ok(put_u32(w, v)?)
}

fn get_u32(r: &mut impl Read) -> FormatResult<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_f64s(r: &mut impl Read, n: usize) -> FormatResult<Vec<f64>> {
    let mut buf = vec![0u8; n.checked_mul(8).ok_or_else(|| FormatError::Corrupt("length overflow".into()))?];
    r.read_exact(&mut buf)?;
    Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}

fn expect_magic(r: &mut impl Read, magic: &'static [u8; 7]) -> FormatResult<()> {
    let mut b = [0u8; 7];
    r.read_exact(&mut b)?;
    if &b != magic {
        return Err(FormatError::BadMagic { expected: std::str::from_utf8(magic).expect("ascii") });
    }
    Ok(())
}

fn expect_end(r: &mut impl Read) -> FormatResult<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(FormatError::Corrupt("trailing bytes".into())),
    }
}

pub fn write_dataset(w: &mut impl Write, set: &SampleSet, scaler: &Standardizer, delta: f64) -> FormatResult<()> {
    w.write_all(DATASET_MAGIC)?;
    put_u32(w, set.stage.index())?;
    put_u32(w, set.pair.index())?;
    put_len(w, set.v_count)?;
    put_len(w, set.u_count)?;
    put_len(w, set.samples.input_len)?;
    put_len(w, set.samples.target_len)?;
    put_f64s(w, &set.samples.inputs)?;
    put_f64s(w, &set.samples.targets)?;
    put_f64s(w, &scaler.mean)?;
    put_f64s(w, &scaler.std)?;
    put_f64s(w, &[delta])?;
    Ok(())
}

pub fn read_dataset(r: &mut impl Read) -> FormatResult<(SampleSet, Standardizer, f64)> {
    expect_magic(r, DATASET_MAGIC)?;
    let stage = Stage::from_index(get_u32(r)?)?;
    let pair = PairType::from_index(get_u32(r)?)?;
    let v = get_u32(r)? as usize;
    let u = get_u32(r)? as usize;
    let input_len = get_u32(r)? as usize;
    let target_len = get_u32(r)? as usize;
    let n = v * u;
    let mut samples = Samples::new(input_len, target_len);
    samples.inputs = get_f64s(r, n * input_len)?;
    samples.targets = get_f64s(r, n * target_len)?;
    let mean = get_f64s(r, input_len)?;
    let std = get_f64s(r, input_len)?;
    let delta = get_f64s(r, 1)?[0];
    expect_end(r)?;
    Ok((SampleSet { stage, pair, v_count: v, u_count: u, samples }, Standardizer { mean, std }, delta))
}

fn layer_record(spec: &LayerSpec) -> [u32; 6] {
    let act = match spec.activation {
        Activation::Tanh => 0,
        Activation::Linear => 1,
    };
    match spec.kind {
        LayerKind::Conv1d { filters, kernel, stride, in_channels } => {
            [0, act, filters as u32, kernel as u32, stride as u32, in_channels as u32]
        }
        LayerKind::Dense { units } => [1, act, units as u32, 0, 0, 0],
    }
}

fn parse_layer(rec: [u32; 6]) -> FormatResult<LayerSpec> {
    let activation = match rec[1] {
        0 => Activation::Tanh,
        1 => Activation::Linear,
        other => return Err(FormatError::Corrupt(format!("unknown activation {other}"))),
    };
    let kind = match rec[0] {
        0 => LayerKind::Conv1d {
            filters: rec[2] as usize,
            kernel: rec[3] as usize,
            stride: rec[4] as usize,
            in_channels: rec[5] as usize,
        },
        1 => LayerKind::Dense { units: rec[2] as usize },
        other => return Err(FormatError::Corrupt(format!("unknown layer kind {other}"))),
    };
    Ok(LayerSpec { kind, activation })
}

pub fn write_model(w: &mut impl Write, model: &TrainedModel) -> FormatResult<()> {
    w.write_all(MODEL_MAGIC)?;
    put_u32(w, MODEL_VERSION)?;
    put_u32(w, model.stage.index())?;
    put_u32(w, model.pair.index())?;
    put_len(w, model.net.input_len())?;
    put_len(w, model.net.layers().len())?;
    for layer in model.net.layers() {
        for v in layer_record(&layer.spec) {
            put_u32(w, v)?;
        }
    }
    for layer in model.net.layers() {
        put_f64s(w, &layer.weights)?;
        put_f64s(w, &layer.biases)?;
    }
    put_len(w, model.scaler.mean.len())?;
    put_f64s(w, &model.scaler.mean)?;
    put_f64s(w, &model.scaler.std)?;
    put_f64s(w, &[model.delta])?;
    Ok(())
}

pub fn read_model(r: &mut impl Read) -> FormatResult<TrainedModel> {
    expect_magic(r, MODEL_MAGIC)?;
    let version = get_u32(r)?;
    if version != MODEL_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let stage = Stage::from_index(get_u32(r)?)?;
    let pair = PairType::from_index(get_u32(r)?)?;
    let input_len = get_u32(r)? as usize;
    let n_layers = get_u32(r)? as usize;
    let mut specs = Vec::with_capacity(n_layers.min(64));
    for _ in 0..n_layers {
        let mut rec = [0u32; 6];
        for v in &mut rec {
            *v = get_u32(r)?;
        }
        specs.push(parse_layer(rec)?);
    }
    let shapes = Network::zeroed(input_len, &specs)?;
    let mut tensors = Vec::with_capacity(n_layers);
    for layer in shapes.layers() {
        let w = get_f64s(r, layer.weights.len())?;
        let b = get_f64s(r, layer.biases.len())?;
        tensors.push((w, b));
    }
    let net = Network::from_parts(input_len, &specs, tensors)?;
    let n_features = get_u32(r)? as usize;
    if n_features != input_len {
        return Err(FormatError::Corrupt(format!("scaler has {n_features} features, network expects {input_len}")));
    }
    let mean = get_f64s(r, n_features)?;
    let std = get_f64s(r, n_features)?;
    let delta = get_f64s(r, 1)?[0];
    expect_end(r)?;
    Ok(TrainedModel { stage, pair, net, scaler: Standardizer { mean, std }, delta })
}

pub fn save_model(path: &Path, model: &TrainedModel) -> FormatResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_model(&mut w, model)?;
    w.flush()?;
    Ok(())
}

pub fn load_model(path: &Path) -> FormatResult<TrainedModel> {
    read_model(&mut BufReader::new(File::open(path)?))
}

pub fn save_dataset(path: &Path, set: &SampleSet, scaler: &Standardizer, delta: f64) -> FormatResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_dataset(&mut w, set, scaler, delta)?;
    w.flush()?;
    Ok(())
}

pub fn load_dataset(path: &Path) -> FormatResult<(SampleSet, Standardizer, f64)> {
    read_dataset(&mut BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use irs_isac_core::neuralnet::{build_re_cnn, ReCnnLayout};

    fn model() -> TrainedModel {
        let net = build_re_cnn(8, 6, ReCnnLayout::Channels, 3).unwrap();
        TrainedModel {
            stage: Stage::Two,
            pair: PairType::Raw,
            net,
            scaler: Standardizer { mean: (0..8).map(|i| i as f64).collect(), std: vec![0.5; 8] },
            delta: 1e4,
        }
    }

    #[test]
    fn model_round_trip() {
        let m = model();
        let mut buf = Vec::new();
        write_model(&mut buf, &m).unwrap();
        let back = read_model(&mut buf.as_slice()).unwrap();
        assert_eq!(back, m);
        let x = [0.1, -0.2, 0.3, 0.0, 1.0, 0.5, -0.7, 0.2];
        assert_eq!(back.net.forward(&x).unwrap(), m.net.forward(&x).unwrap());
    }

    #[test]
    fn model_header_checks() {
        let mut buf = Vec::new();
        write_model(&mut buf, &model()).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_model(&mut bad.as_slice()), Err(FormatError::BadMagic { .. })));
        let mut v2 = buf.clone();
        v2[7] = 2;
        assert!(matches!(read_model(&mut v2.as_slice()), Err(FormatError::UnsupportedVersion(2))));
        let short = &buf[..buf.len() - 3];
        assert!(read_model(&mut &short[..]).is_err());
        let mut long = buf.clone();
        long.push(0);
        assert!(read_model(&mut long.as_slice()).is_err());
    }

    #[test]
    fn dataset_round_trip() {
        let mut samples = Samples::new(3, 2);
        for i in 0..6 {
            let x = i as f64;
            samples.push(&[x, x + 0.5, -x], &[x * 1e-5, 2.0]).unwrap();
        }
        let set = SampleSet { stage: Stage::Three, pair: PairType::LsBased, v_count: 3, u_count: 2, samples };
        let scaler = Standardizer::fit(&set.samples).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &set, &scaler, 1e4).unwrap();
        assert_eq!(&buf[..7], DATASET_MAGIC);
        let (back, sc, delta) = read_dataset(&mut buf.as_slice()).unwrap();
        assert_eq!((back, sc, delta), (set, scaler, 1e4));
        buf[3] = 0;
        assert!(read_dataset(&mut buf.as_slice()).is_err());
    }
}
