//! CNN input/target vectors, training-set augmentation and generation,
//! standardization and the inverse output mapping.
//!
//! Real vectors always hold every real part first, then every imaginary
//! part. Matrices are vectorized column by column.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::airsim::StageObservation;
use crate::channels::{realize, ChannelRealization};
use crate::cxmat::CMat;
use crate::estimator::{simulate_all, ChannelEstimator};
use crate::lsbase::LsBaseline;
use crate::neuralnet::Samples;
use crate::protocol::{build_plan, db_to_linear, PilotPlan, SystemConfig};
use crate::rng::{complex_normal, substream};
use crate::{Error, PairType, Result, Stage};

/// Floor applied to per-feature standard deviations.
pub const STD_FLOOR: f64 = 1e-12;

const DATASET_DOMAIN: u64 = 0x6461_7461;

/// `[ℜ(z₀), ℜ(z₁), …, ℑ(z₀), ℑ(z₁), …]`.
pub fn complex_to_real<I>(values: I) -> Vec<f64>
where
    I: IntoIterator<Item = Complex64>,
{
    let values: Vec<Complex64> = values.into_iter().collect();
    let mut out = Vec::with_capacity(2 * values.len());
    out.extend(values.iter().map(|z| z.re));
    out.extend(values.iter().map(|z| z.im));
    out
}

/// Inverse of [`complex_to_real`].
pub fn real_to_complex(values: &[f64]) -> Result<Vec<Complex64>> {
    if !values.len().is_multiple_of(2) {
        return Err(Error::LengthMismatch { expected: values.len() + 1, actual: values.len() });
    }
    let (re, im) = values.split_at(values.len() / 2);
    Ok(re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect())
}

/// Input length for a (stage, pair type) under `config`.
pub fn input_len(stage: Stage, pair: PairType, config: &SystemConfig) -> usize {
    let (m, l) = (config.m, config.l);
    let n = config.subframes(stage);
    match (stage, pair) {
        (Stage::One, PairType::Raw) => 4 * m * n,
        (Stage::One, PairType::LsBased) => 4 * m,
        (Stage::Two, PairType::Raw) => 2 * m * (n + 1),
        (Stage::Three, PairType::Raw) => 2 * m * (n + l + 2),
        (Stage::Two | Stage::Three, PairType::LsBased) => 2 * m * l,
    }
}

/// Target length: `4M` for stage 1, `2ML` otherwise.
pub fn target_len(stage: Stage, config: &SystemConfig) -> usize {
    match stage {
        Stage::One => 4 * config.m,
        Stage::Two | Stage::Three => 2 * config.m * config.l,
    }
}

/// Estimates from earlier stages that later inputs depend on.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Priors {
    pub b: Option<CMat>,
    pub f: Option<CMat>,
    pub gu: Option<CMat>,
}

fn need<'a>(value: &'a Option<CMat>, name: &'static str) -> Result<&'a CMat> {
    value.as_ref().ok_or(Error::MissingPrior(name))
}

fn stacked_blocks(obs: &StageObservation) -> impl Iterator<Item = Complex64> + '_ {
    obs.y.iter().flat_map(|y| y.as_slice().iter().copied())
}

/// Builds the network input for `stage` from its observation.
///
/// Raw inputs stack the received blocks and append the earlier estimates
/// (`f̂` for stage 2; `f̂`, `b̂ᵀ`, `vec Ĝ_u` for stage 3). LS-based inputs are
/// the least-squares estimate of the stage's target channel.
pub fn build_input(
    stage: Stage,
    pair: PairType,
    obs: &StageObservation,
    priors: &Priors,
    ls: &LsBaseline,
) -> Result<Vec<f64>> {
    obs.expect_stage(stage)?;
    let values: Vec<Complex64> = match (stage, pair) {
        (Stage::One, PairType::Raw) => stacked_blocks(obs).collect(),
        (Stage::One, PairType::LsBased) => {
            let (b, f) = ls.stage1(obs)?;
            b.as_slice().iter().chain(f.as_slice()).copied().collect()
        }
        (Stage::Two, PairType::Raw) => {
            let f = need(&priors.f, "f")?;
            stacked_blocks(obs).chain(f.as_slice().iter().copied()).collect()
        }
        (Stage::Two, PairType::LsBased) => ls.stage2(obs, need(&priors.f, "f")?)?.vec_col_major().collect(),
        (Stage::Three, PairType::Raw) => {
            let (b, f, gu) = (need(&priors.b, "b")?, need(&priors.f, "f")?, need(&priors.gu, "G_u")?);
            stacked_blocks(obs)
                .chain(f.as_slice().iter().copied())
                .chain(b.as_slice().iter().copied())
                .chain(gu.vec_col_major())
                .collect()
        }
        (Stage::Three, PairType::LsBased) => ls
            .stage3(obs, need(&priors.b, "b")?, need(&priors.f, "f")?, need(&priors.gu, "G_u")?)?
            .vec_col_major()
            .collect(),
    };
    Ok(complex_to_real(values))
}

/// Ground-truth target: `[bᵀ, f]` for stage 1, `vec G_u` for stage 2,
/// `vec G_t` for stage 3.
pub fn build_target(stage: Stage, chans: &ChannelRealization) -> Vec<f64> {
    match stage {
        Stage::One => complex_to_real(chans.b.as_slice().iter().chain(chans.f.as_slice()).copied()),
        Stage::Two => complex_to_real(chans.gu.vec_col_major()),
        Stage::Three => complex_to_real(chans.gt.vec_col_major()),
    }
}

/// Channel estimate recovered from a network output.
#[derive(Clone, Debug, PartialEq)]
pub enum StageEstimate {
    Direct { b: CMat, f: CMat },
    ReflectedComm(CMat),
    ReflectedSens(CMat),
}

/// Divides by `delta` and reassembles the complex channel(s).
pub fn postprocess(stage: Stage, output: &[f64], delta: f64, m: usize, l: usize) -> Result<StageEstimate> {
    let want = match stage {
        Stage::One => 4 * m,
        _ => 2 * m * l,
    };
    if output.len() != want {
        return Err(Error::LengthMismatch { expected: want, actual: output.len() });
    }
    let scaled: Vec<f64> = output.iter().map(|v| v / delta).collect();
    let z = real_to_complex(&scaled)?;
    Ok(match stage {
        Stage::One => StageEstimate::Direct { b: CMat::column(&z[..m]), f: CMat::row_vector(&z[m..]) },
        Stage::Two => StageEstimate::ReflectedComm(CMat::from_col_major(l, m, &z)?),
        Stage::Three => StageEstimate::ReflectedSens(CMat::from_col_major(m, l, &z)?),
    })
}

fn noisy_copy<R: rand::Rng + ?Sized>(mat: &CMat, snr_linear: f64, rng: &mut R) -> CMat {
    let n = mat.as_slice().len();
    if n == 0 {
        return mat.clone();
    }
    let p = mat.frobenius_sq() / n as f64;
    let var = p / snr_linear;
    let mut out = mat.clone();
    for z in out.as_mut_slice() {
        *z += complex_normal(rng, var);
    }
    out
}

/// `u` variants of one realization. Element 0 is the original; the others
/// add CN(0, σ²_ch) to every entry of b, f, G_u and G_t, where
/// `σ²_ch = mean|entry|² / 10^(snr_ch_db/10)` for that channel. The link
/// matrices (A, g, H) of the copies are left as in the original.
pub fn augment<R: rand::Rng + ?Sized>(
    chans: &ChannelRealization,
    u: usize,
    snr_ch_db: f64,
    rng: &mut R,
) -> Result<Vec<ChannelRealization>> {
    if u == 0 {
        return Err(Error::InvalidConfig("U must be at least 1"));
    }
    let snr = db_to_linear(snr_ch_db);
    let mut out = Vec::with_capacity(u);
    out.push(chans.clone());
    for _ in 1..u {
        let mut copy = chans.clone();
        copy.b = noisy_copy(&chans.b, snr, rng);
        copy.f = noisy_copy(&chans.f, snr, rng);
        copy.gu = noisy_copy(&chans.gu, snr, rng);
        copy.gt = noisy_copy(&chans.gt, snr, rng);
        out.push(copy);
    }
    Ok(out)
}

/// Raw (unstandardized) training pairs for one (stage, pair type).
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub stage: Stage,
    pub pair: PairType,
    pub v_count: usize,
    pub u_count: usize,
    pub samples: Samples,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Generates `v·u` pairs. Original `v` is drawn from its own random stream,
/// augmented `u` times, and every variant runs through the pilot protocol
/// at SNR `snr_grid_db[v % len]`. Earlier-stage estimates needed by the
/// input come from `priors_from`. The target is always the original
/// (un-augmented) channel.
#[allow(clippy::too_many_arguments)]
pub fn make_dataset(
    stage: Stage,
    pair: PairType,
    config: &SystemConfig,
    snr_grid_db: &[f64],
    v: usize,
    u: usize,
    seed: u64,
    priors_from: &dyn ChannelEstimator,
) -> Result<SampleSet> {
    if snr_grid_db.is_empty() {
        return Err(Error::InvalidConfig("SNR grid must not be empty"));
    }
    let plan = build_plan(config)?;
    let ls = LsBaseline::new(&plan)?;
    let mut samples = Samples::new(input_len(stage, pair, config), target_len(stage, config));
    for vi in 0..v {
        let part = original_pairs(stage, pair, config, &plan, &ls, snr_grid_db, u, seed, vi, priors_from)?;
        samples.inputs.extend_from_slice(&part.inputs);
        samples.targets.extend_from_slice(&part.targets);
    }
    Ok(SampleSet { stage, pair, v_count: v, u_count: u, samples })
}

/// The `u` pairs generated from original `vi` by [`make_dataset`]. Each
/// original uses its own random stream, so originals can be generated in
/// any order (or in parallel) and concatenated.
#[allow(clippy::too_many_arguments)]
pub fn original_pairs(
    stage: Stage,
    pair: PairType,
    config: &SystemConfig,
    plan: &PilotPlan,
    ls: &LsBaseline,
    snr_grid_db: &[f64],
    u: usize,
    seed: u64,
    vi: usize,
    priors_from: &dyn ChannelEstimator,
) -> Result<Samples> {
    if snr_grid_db.is_empty() {
        return Err(Error::InvalidConfig("SNR grid must not be empty"));
    }
    let mut samples = Samples::new(input_len(stage, pair, config), target_len(stage, config));
    let mut rng = substream(seed, DATASET_DOMAIN, vi as u64);
    let chans = realize(config, &mut rng);
    let target = build_target(stage, &chans);
    let snr = snr_grid_db[vi % snr_grid_db.len()];
    for variant in augment(&chans, u, config.snr_ch_db, &mut rng)? {
        let obs = simulate_all(config, plan, &variant, snr, &mut rng)?;
        let priors = priors_before(stage, priors_from, &obs)?;
        let input = build_input(stage, pair, &obs[stage.index() as usize - 1], &priors, ls)?;
        samples.push(&input, &target)?;
    }
    Ok(samples)
}

/// Runs `est` through the stages before `stage`.
pub fn priors_before(stage: Stage, est: &dyn ChannelEstimator, obs: &[StageObservation; 3]) -> Result<Priors> {
    let mut priors = Priors::default();
    if stage == Stage::One {
        return Ok(priors);
    }
    let (b, f) = est.direct(&obs[0])?;
    if stage == Stage::Three {
        priors.gu = Some(est.reflected_comm(&obs[1], &f)?);
    }
    priors.b = Some(b);
    priors.f = Some(f);
    Ok(priors)
}

/// Per-feature standardization statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Population mean and standard deviation of every input feature.
    pub fn fit(samples: &Samples) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let d = samples.input_len;
        let mut mean = vec![0.0; d];
        for i in 0..n {
            for (m, x) in mean.iter_mut().zip(samples.input(i)) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut var = vec![0.0; d];
        for i in 0..n {
            for ((s, x), m) in var.iter_mut().zip(samples.input(i)).zip(&mean) {
                *s += (x - m) * (x - m);
            }
        }
        let std = var.iter().map(|s| libm::sqrt(s / n as f64).max(STD_FLOOR)).collect();
        Ok(Standardizer { mean, std })
    }

    pub fn identity(d: usize) -> Self {
        Standardizer { mean: vec![0.0; d], std: vec![1.0; d] }
    }

    pub fn apply(&self, input: &mut [f64]) -> Result<()> {
        if input.len() != self.mean.len() {
            return Err(Error::LengthMismatch { expected: self.mean.len(), actual: input.len() });
        }
        for ((x, m), s) in input.iter_mut().zip(&self.mean).zip(&self.std) {
            *x = (*x - m) / s;
        }
        Ok(())
    }

    /// Standardized inputs and δ-scaled targets.
    pub fn prepare(&self, samples: &Samples, delta: f64) -> Result<Samples> {
        let mut out = samples.clone();
        for row in out.inputs.chunks_exact_mut(samples.input_len.max(1)) {
            self.apply(row)?;
        }
        out.targets.iter_mut().for_each(|t| *t *= delta);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airsim::observe;
    use crate::estimator::LsEstimator;

    fn setup(m: usize, l: usize) -> (SystemConfig, LsBaseline) {
        let cfg = SystemConfig::new(m, l);
        let ls = LsBaseline::new(&build_plan(&cfg).unwrap()).unwrap();
        (cfg, ls)
    }

    #[test]
    fn table_lengths() {
        let (cfg, _) = setup(4, 8);
        assert_eq!(input_len(Stage::One, PairType::Raw, &cfg), 16);
        assert_eq!(input_len(Stage::Three, PairType::Raw, &cfg), 144);
        assert_eq!(input_len(Stage::Two, PairType::Raw, &cfg), 2 * 4 * 9);
        assert_eq!(target_len(Stage::One, &cfg), 16);
        assert_eq!(target_len(Stage::Three, &cfg), 64);
    }

    #[test]
    fn built_inputs_have_table_lengths() {
        for (m, l) in [(2, 4), (4, 8), (3, 5)] {
            let (cfg, ls) = setup(m, l);
            let plan = ls.plan().clone();
            let mut rng = substream(1, 0, 0);
            let ch = realize(&cfg, &mut rng);
            let obs = simulate_all(&cfg, &plan, &ch, 10.0, &mut rng).unwrap();
            let priors = priors_before(Stage::Three, &LsEstimator::new(ls.clone()), &obs).unwrap();
            for stage in Stage::ALL {
                for pair in [PairType::Raw, PairType::LsBased] {
                    let x = build_input(stage, pair, &obs[stage.index() as usize - 1], &priors, &ls).unwrap();
                    assert_eq!(x.len(), input_len(stage, pair, &cfg), "{stage:?} {pair:?}");
                }
                assert_eq!(build_target(stage, &ch).len(), target_len(stage, &cfg));
            }
        }
    }

    #[test]
    fn zero_observation_gives_zero_input() {
        let (cfg, ls) = setup(4, 8);
        let zero = ChannelRealization::zeros(4, 8);
        let mut rng = substream(0, 0, 0);
        let obs = observe(Stage::One, &cfg, ls.plan(), &zero, 10.0, &mut rng).unwrap();
        let obs = StageObservation { sigma2: 0.0, y: obs.y.iter().map(|y| y.scale(0.0)).collect(), ..obs };
        let x = build_input(Stage::One, PairType::Raw, &obs, &Priors::default(), &ls).unwrap();
        assert_eq!(x.len(), 16);
        assert!(x.iter().all(|&v| v == 0.0));
        assert!(build_target(Stage::Two, &zero).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn missing_prior_reported() {
        let (cfg, ls) = setup(2, 4);
        let mut rng = substream(0, 0, 0);
        let ch = realize(&cfg, &mut rng);
        let obs = simulate_all(&cfg, ls.plan(), &ch, 10.0, &mut rng).unwrap();
        let err = build_input(Stage::Two, PairType::Raw, &obs[1], &Priors::default(), &ls);
        assert_eq!(err, Err(Error::MissingPrior("f")));
        assert!(build_input(Stage::Two, PairType::Raw, &obs[0], &Priors::default(), &ls).is_err());
    }

    #[test]
    fn target_round_trip() {
        let (cfg, _) = setup(4, 8);
        let ch = realize(&cfg, &mut substream(5, 0, 0));
        let delta = cfg.delta;
        for stage in Stage::ALL {
            let t: Vec<f64> = build_target(stage, &ch).iter().map(|v| v * delta).collect();
            match postprocess(stage, &t, delta, 4, 8).unwrap() {
                StageEstimate::Direct { b, f } => {
                    assert!(b.max_abs_diff(&ch.b) <= 1e-15 && f.max_abs_diff(&ch.f) <= 1e-15);
                }
                StageEstimate::ReflectedComm(gu) => assert!(gu.max_abs_diff(&ch.gu) <= 1e-15),
                StageEstimate::ReflectedSens(gt) => assert!(gt.max_abs_diff(&ch.gt) <= 1e-15),
            }
        }
        assert!(postprocess(Stage::One, &[0.0; 15], delta, 4, 8).is_err());
        match postprocess(Stage::One, &[0.0; 16], delta, 4, 8).unwrap() {
            StageEstimate::Direct { b, f } => {
                assert_eq!((b.shape(), f.shape()), ((4, 1), (1, 4)));
                assert_eq!(b.frobenius(), 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn augmentation_snr() {
        let cfg = SystemConfig::new(4, 8);
        let mut rng = substream(9, 0, 0);
        let ch = realize(&cfg, &mut rng);
        let copies = augment(&ch, 10_000, 30.0, &mut rng).unwrap();
        assert_eq!(copies[0], ch);
        let mut noise = [0.0f64; 4];
        for c in &copies[1..] {
            assert!(c.b.max_abs_diff(&ch.b) > 0.0);
            for (k, (x, y)) in [(&c.b, &ch.b), (&c.f, &ch.f), (&c.gu, &ch.gu), (&c.gt, &ch.gt)].iter().enumerate() {
                noise[k] += x.sub(y).unwrap().frobenius_sq() / x.as_slice().len() as f64;
            }
        }
        for (k, truth) in [&ch.b, &ch.f, &ch.gu, &ch.gt].iter().enumerate() {
            let p = truth.frobenius_sq() / truth.as_slice().len() as f64;
            let snr_db = 10.0 * libm::log10(p / (noise[k] / 9_999.0));
            assert!((snr_db - 30.0).abs() <= 1.0, "channel {k}: {snr_db}");
        }
        assert_eq!(augment(&ch, 1, 30.0, &mut rng).unwrap().len(), 1);
        assert!(augment(&ch, 0, 30.0, &mut rng).is_err());
    }

    #[test]
    fn dataset_counts_and_determinism() {
        let cfg = SystemConfig::new(2, 4);
        let ls = LsEstimator::new(LsBaseline::new(&build_plan(&cfg).unwrap()).unwrap());
        let a = make_dataset(Stage::Three, PairType::Raw, &cfg, &[10.0, 20.0], 10, 10, 3, &ls).unwrap();
        assert_eq!(a.len(), 100);
        assert_eq!(a.samples.input_len, input_len(Stage::Three, PairType::Raw, &cfg));
        let b = make_dataset(Stage::Three, PairType::Raw, &cfg, &[10.0, 20.0], 10, 10, 3, &ls).unwrap();
        assert_eq!(a, b);
        let one = make_dataset(Stage::One, PairType::LsBased, &cfg, &[10.0], 4, 2, 3, &ls).unwrap();
        // every variant of an original shares its target
        assert_eq!(one.samples.target(0), one.samples.target(1));
        assert_ne!(one.samples.input(0), one.samples.input(1));
    }

    #[test]
    fn standardizer_properties() {
        let cfg = SystemConfig::new(2, 4);
        let ls = LsEstimator::new(LsBaseline::new(&build_plan(&cfg).unwrap()).unwrap());
        let set = make_dataset(Stage::One, PairType::LsBased, &cfg, &[10.0], 50, 4, 1, &ls).unwrap();
        let st = Standardizer::fit(&set.samples).unwrap();
        let prepared = st.prepare(&set.samples, 1e4).unwrap();
        let again = Standardizer::fit(&prepared).unwrap();
        for (m, s) in again.mean.iter().zip(&again.std) {
            assert!(m.abs() <= 1e-10);
            assert!((s - 1.0).abs() <= 1e-6);
        }
        let twice = again.prepare(&prepared, 1.0).unwrap();
        for (a, b) in twice.inputs.iter().zip(&prepared.inputs) {
            assert!((a - b).abs() <= 1e-9);
        }
        assert!(
            (prepared.targets[0] - set.samples.targets[0] * 1e4).abs()
                <= 1e-18_f64.max(1e-12 * prepared.targets[0].abs())
        );

        let mut flat = Samples::new(2, 1);
        flat.push(&[1.0, 1e-4], &[1e-4]).unwrap();
        flat.push(&[1.0, 3e-4], &[1e-4]).unwrap();
        let st = Standardizer::fit(&flat).unwrap();
        assert_eq!(st.std[0], STD_FLOOR);
        let p = st.prepare(&flat, 1e4).unwrap();
        assert!((p.targets[0] - 1.0).abs() < 1e-12);
        assert!(p.inputs.iter().all(|v| v.is_finite()));
    }
}
