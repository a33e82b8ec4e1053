//! Dataset generation, training chains, Monte-Carlo NMSE evaluation and
//! figure sweeps.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;

use irs_isac_core::channels::realize;
use irs_isac_core::costmodel::{cnn_cost, input_gen_cost, Architecture, CostReport};
use irs_isac_core::estimator::{
    estimate_chain, simulate_all, ChannelEstimator, DlEstimator, LsEstimator, TrainedModel,
};
use irs_isac_core::features::{input_len, original_pairs, target_len, SampleSet, Standardizer};
use irs_isac_core::lsbase::LsBaseline;
use irs_isac_core::metrics::nmse;
use irs_isac_core::neuralnet::{build_de_cnn, build_re_cnn, train, ReCnnLayout, Samples, TrainHistory};
use irs_isac_core::protocol::{build_plan, PilotPlan, SystemConfig};
use irs_isac_core::rng::{derive_seed, substream};
use irs_isac_core::{PairType, Stage};

use crate::config::{EstimatorKind, ExperimentConfig};
use crate::format::load_model;

const DOMAIN_DATA: u64 = 1;
const DOMAIN_SPLIT: u64 = 2;
const DOMAIN_INIT: u64 = 3;
const DOMAIN_SHUFFLE: u64 = 4;
const DOMAIN_EVAL_CHANNEL: u64 = 5;
const DOMAIN_EVAL_NOISE: u64 = 6;

/// Seed for one (stage, pair, training-SNR slot) task inside `domain`.
fn task_seed(seed: u64, domain: u64, stage: Stage, pair: PairType, slot: usize) -> u64 {
    derive_seed(seed, domain, ((stage.index() as u64) << 40) | ((pair.index() as u64) << 32) | slot as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Channel {
    B,
    F,
    Gu,
    Gt,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::B, Channel::F, Channel::Gu, Channel::Gt];
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::B => "b",
            Channel::F => "f",
            Channel::Gu => "Gu",
            Channel::Gt => "Gt",
        })
    }
}

/// Generates a training set, originals in parallel, concatenated in index order.
#[allow(clippy::too_many_arguments)]
pub fn generate_dataset(
    sys: &SystemConfig,
    plan: &PilotPlan,
    stage: Stage,
    pair: PairType,
    snr_grid_db: &[f64],
    v: usize,
    u: usize,
    seed: u64,
    priors_from: &dyn ChannelEstimator,
) -> anyhow::Result<SampleSet> {
    let ls = LsBaseline::new(plan)?;
    let parts = (0..v)
        .into_par_iter()
        .map(|vi| original_pairs(stage, pair, sys, plan, &ls, snr_grid_db, u, seed, vi, priors_from))
        .collect::<Result<Vec<_>, _>>()?;
    let mut samples = Samples::new(input_len(stage, pair, sys), target_len(stage, sys));
    for part in parts {
        samples.inputs.extend_from_slice(&part.inputs);
        samples.targets.extend_from_slice(&part.targets);
    }
    Ok(SampleSet { stage, pair, v_count: v, u_count: u, samples })
}

/// Seeded dataset for one stage of a training chain.
#[allow(clippy::too_many_arguments)]
pub fn chain_dataset(
    cfg: &ExperimentConfig,
    sys: &SystemConfig,
    plan: &PilotPlan,
    stage: Stage,
    pair: PairType,
    snr_grid_db: &[f64],
    slot: usize,
    priors_from: &dyn ChannelEstimator,
) -> anyhow::Result<SampleSet> {
    let seed = task_seed(cfg.seed, DOMAIN_DATA, stage, pair, slot);
    generate_dataset(sys, plan, stage, pair, snr_grid_db, cfg.v, cfg.u, seed, priors_from)
}

/// Splits, standardizes (statistics from the training part only), builds
/// the stage's network and trains it.
pub fn train_model(
    cfg: &ExperimentConfig,
    set: &SampleSet,
    delta: f64,
    slot: usize,
) -> anyhow::Result<(TrainedModel, TrainHistory)> {
    let (stage, pair) = (set.stage, set.pair);
    let split_seed = task_seed(cfg.seed, DOMAIN_SPLIT, stage, pair, slot);
    let (train_raw, val_raw) = set.samples.split(cfg.training.validation_fraction, split_seed)?;
    let scaler = Standardizer::fit(&train_raw)?;
    let train_set = scaler.prepare(&train_raw, delta)?;
    let val_set = scaler.prepare(&val_raw, delta)?;
    let init_seed = task_seed(cfg.seed, DOMAIN_INIT, stage, pair, slot);
    let (n_in, n_out) = (set.samples.input_len, set.samples.target_len);
    let mut net = match stage {
        Stage::One => build_de_cnn(n_in, n_out, init_seed)?,
        Stage::Two | Stage::Three => build_re_cnn(n_in, n_out, ReCnnLayout::from(cfg.re_layout), init_seed)?,
    };
    let tcfg = cfg.train_config(task_seed(cfg.seed, DOMAIN_SHUFFLE, stage, pair, slot));
    let history = train(&mut net, &train_set, &val_set, &tcfg)?;
    Ok((TrainedModel { stage, pair, net, scaler, delta }, history))
}

pub struct StageReport {
    pub stage: Stage,
    pub history: TrainHistory,
}

/// Trains stages 1 to 3 in order for one pair type. Each stage's dataset
/// takes its earlier-stage estimates from the models already trained.
pub fn train_chain(
    cfg: &ExperimentConfig,
    sys: &SystemConfig,
    plan: &PilotPlan,
    pair: PairType,
    snr_grid_db: &[f64],
    slot: usize,
) -> anyhow::Result<(DlEstimator, Vec<StageReport>)> {
    let mut dl = DlEstimator::new(sys, plan)?;
    let mut reports = Vec::new();
    for stage in Stage::ALL {
        let set = chain_dataset(cfg, sys, plan, stage, pair, snr_grid_db, slot, &dl)?;
        let (model, history) =
            train_model(cfg, &set, sys.delta, slot).with_context(|| format!("training stage {}", stage.index()))?;
        dl.set_model(model);
        reports.push(StageReport { stage, history });
    }
    Ok((dl, reports))
}

/// Estimators for one curve, keyed by the SNR they were trained at. A
/// single entry serves every test SNR.
pub struct EstimatorBank {
    pub label: String,
    pub by_snr: Vec<(f64, Box<dyn ChannelEstimator>)>,
}

impl EstimatorBank {
    pub fn single(label: impl Into<String>, est: Box<dyn ChannelEstimator>) -> Self {
        EstimatorBank { label: label.into(), by_snr: vec![(f64::NAN, est)] }
    }

    /// The estimator trained nearest to `snr_db` (first one on ties).
    pub fn pick(&self, snr_db: f64) -> &dyn ChannelEstimator {
        if self.by_snr.len() == 1 {
            return self.by_snr[0].1.as_ref();
        }
        let mut best = 0;
        for (i, (s, _)) in self.by_snr.iter().enumerate() {
            if (s - snr_db).abs() < (self.by_snr[best].0 - snr_db).abs() {
                best = i;
            }
        }
        self.by_snr[best].1.as_ref()
    }
}

/// Trains the estimator for `kind` following `cfg.pooled`.
pub fn build_bank(
    cfg: &ExperimentConfig,
    sys: &SystemConfig,
    plan: &PilotPlan,
    kind: EstimatorKind,
    train_grid: &[f64],
) -> anyhow::Result<EstimatorBank> {
    let label = kind.label();
    let Some(pair) = kind.pair() else {
        return Ok(EstimatorBank::single(label, Box::new(LsEstimator::from_plan(plan)?)));
    };
    if cfg.pooled {
        let (dl, _) = train_chain(cfg, sys, plan, pair, train_grid, 0)?;
        return Ok(EstimatorBank::single(label, Box::new(dl)));
    }
    let mut by_snr: Vec<(f64, Box<dyn ChannelEstimator>)> = Vec::new();
    for (slot, &snr) in train_grid.iter().enumerate() {
        let (dl, _) = train_chain(cfg, sys, plan, pair, &[snr], slot + 1)?;
        by_snr.push((snr, Box::new(dl)));
    }
    Ok(EstimatorBank { label: label.to_string(), by_snr })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NmseRow {
    pub snr_db: f64,
    pub estimator: String,
    pub channel: Channel,
    pub nmse: f64,
}

/// Average NMSE of every bank over `trials` Monte-Carlo draws per SNR.
///
/// Trial `t` uses the same channel draw at every SNR, and at a given SNR
/// every estimator sees the same received signals. Trials run in parallel
/// and are summed in trial order.
pub fn evaluate(
    sys: &SystemConfig,
    plan: &PilotPlan,
    banks: &[EstimatorBank],
    snr_grid_db: &[f64],
    trials: usize,
    seed: u64,
) -> anyhow::Result<Vec<NmseRow>> {
    anyhow::ensure!(trials >= 1, "at least one trial is needed");
    let mut rows = Vec::new();
    for (si, &snr) in snr_grid_db.iter().enumerate() {
        let picked: Vec<&dyn ChannelEstimator> = banks.iter().map(|b| b.pick(snr)).collect();
        let per_trial = (0..trials)
            .into_par_iter()
            .map(|t| -> anyhow::Result<Vec<[f64; 4]>> {
                let chans = realize(sys, &mut substream(seed, DOMAIN_EVAL_CHANNEL, t as u64));
                let mut rng = substream(seed, DOMAIN_EVAL_NOISE, ((si as u64) << 32) | t as u64);
                let obs = simulate_all(sys, plan, &chans, snr, &mut rng)?;
                picked
                    .iter()
                    .map(|est| {
                        let e = estimate_chain(*est, &obs)?;
                        Ok([
                            nmse(&e.b, &chans.b)?,
                            nmse(&e.f, &chans.f)?,
                            nmse(&e.gu, &chans.gu)?,
                            nmse(&e.gt, &chans.gt)?,
                        ])
                    })
                    .collect()
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        for (bi, bank) in banks.iter().enumerate() {
            let mut sums = [0.0; 4];
            for trial in &per_trial {
                for (s, v) in sums.iter_mut().zip(trial[bi]) {
                    *s += v;
                }
            }
            for (ch, s) in Channel::ALL.iter().zip(sums) {
                rows.push(NmseRow {
                    snr_db: snr,
                    estimator: bank.label.clone(),
                    channel: *ch,
                    nmse: s / trials as f64,
                });
            }
        }
    }
    Ok(rows)
}

/// Floats in CSV cells: shortest round-trip form, '.' decimal separator.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// A CSV table with a header row and LF line endings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn nmse_csv(rows: &[NmseRow]) -> Csv {
    let mut csv = Csv::new(&["snr_db", "channel", "estimator", "nmse"]);
    for r in rows {
        csv.push(vec![fmt_f64(r.snr_db), r.channel.to_string(), r.estimator.clone(), fmt_f64(r.nmse)]);
    }
    csv
}

pub fn history_csv(history: &TrainHistory) -> Csv {
    let mut csv = Csv::new(&["epoch", "train_mse", "val_mse"]);
    csv.push(vec!["0".into(), String::new(), fmt_f64(history.initial_val_mse)]);
    for (i, e) in history.epochs.iter().enumerate() {
        csv.push(vec![(i + 1).to_string(), fmt_f64(e.train_mse), fmt_f64(e.val_mse)]);
    }
    csv
}

/// Per-estimate cost of one stage: LS is the LS estimate itself; a DL
/// estimator adds its network to its own input generation.
pub fn stage_cost(stage: Stage, kind: EstimatorKind, m: usize, l: usize) -> anyhow::Result<CostReport> {
    let span = match stage {
        Stage::One => 1,
        _ => l,
    };
    let sys = SystemConfig::new(m, l);
    Ok(match kind.pair() {
        None => input_gen_cost(stage, PairType::LsBased, m, l, span)?,
        Some(pair) => {
            let arch = if stage == Stage::One { Architecture::De } else { Architecture::Re };
            input_gen_cost(stage, pair, m, l, span)?
                + cnn_cost(arch, input_len(stage, pair, &sys), target_len(stage, &sys))?
        }
    })
}

const KINDS: [EstimatorKind; 3] = [EstimatorKind::Ls, EstimatorKind::DlType1, EstimatorKind::DlType2];

fn stage_tag(stage: Stage) -> &'static str {
    match stage {
        Stage::One => "S1",
        Stage::Two => "S2",
        Stage::Three => "S3",
    }
}

/// Cost sweeps over L at M = 4 and over M at L = 15.
pub fn complexity_points() -> Vec<(&'static str, usize, usize)> {
    let mut pts: Vec<(&'static str, usize, usize)> = (4..=30).step_by(2).map(|l| ("vs-L", 4, l)).collect();
    pts.extend((2..=8).map(|m| ("vs-M", m, 15)));
    pts
}

/// Every stage cost on the sweep grid: columns context, M, L, adds, mults.
/// Contexts whose closed forms give a non-integer count are suffixed
/// with `~fractional`.
pub fn complexity_csv() -> anyhow::Result<Csv> {
    let mut csv = Csv::new(&["context", "M", "L", "adds", "mults"]);
    for (sweep, m, l) in complexity_points() {
        for stage in Stage::ALL {
            for kind in KINDS {
                let c = stage_cost(stage, kind, m, l)?;
                let mut ctx = format!("{sweep}/{}/{}", stage_tag(stage), kind.label());
                if c.is_fractional() {
                    ctx.push_str("~fractional");
                }
                csv.push(vec![ctx, m.to_string(), l.to_string(), fmt_f64(c.adds), fmt_f64(c.mults)]);
            }
        }
    }
    Ok(csv)
}

fn figure_csv() -> Csv {
    Csv::new(&["x", "curve", "value"])
}

/// Applies the full-scale settings used by `--full`.
pub fn full_scale(cfg: &mut ExperimentConfig) {
    cfg.system.l = 30;
    cfg.v = 1000;
    cfg.u = 10;
    cfg.t_on = 1000;
}

/// Runs one figure sweep and returns its CSV (columns x, curve, value).
pub fn reproduce_figure(id: u32, cfg: &ExperimentConfig, full: bool) -> anyhow::Result<Csv> {
    match id {
        5 => figure_snr(cfg),
        6 => figure_dimension(cfg, full, Sweep::L),
        7 => figure_dimension(cfg, full, Sweep::M),
        8 => figure_complexity(),
        other => anyhow::bail!("unknown figure {other}; expected 5, 6, 7 or 8"),
    }
}

fn figure_snr(cfg: &ExperimentConfig) -> anyhow::Result<Csv> {
    let sys = cfg.system()?;
    let plan = build_plan(&sys)?;
    let banks = KINDS
        .iter()
        .map(|&k| build_bank(cfg, &sys, &plan, k, &cfg.train_snr_grid_db))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let rows = evaluate(&sys, &plan, &banks, &cfg.test_snr_grid_db, cfg.t_on, cfg.seed)?;
    let mut csv = figure_csv();
    for r in rows {
        csv.push(vec![fmt_f64(r.snr_db), format!("{}/{}", r.channel, r.estimator), fmt_f64(r.nmse)]);
    }
    Ok(csv)
}

#[derive(Clone, Copy)]
enum Sweep {
    L,
    M,
}

/// SNR conditions of the dimension sweeps; each is used for both training
/// and testing.
pub const DIMENSION_SNRS_DB: [f64; 2] = [0.0, 10.0];

fn figure_dimension(cfg: &ExperimentConfig, full: bool, sweep: Sweep) -> anyhow::Result<Csv> {
    let (values, channels): (Vec<usize>, &[Channel]) = match (sweep, full) {
        (Sweep::L, false) => (vec![4, 8, 12], &[Channel::Gu, Channel::Gt]),
        (Sweep::L, true) => (vec![10, 15, 20, 25, 30], &[Channel::Gu, Channel::Gt]),
        (Sweep::M, false) => (vec![2, 4, 6], &Channel::ALL),
        (Sweep::M, true) => (vec![2, 4, 6, 8], &Channel::ALL),
    };
    let mut csv = figure_csv();
    for &x in &values {
        let mut point = cfg.clone();
        match sweep {
            Sweep::L => {
                point.system.m = 4;
                point.system.l = x;
            }
            Sweep::M => {
                point.system.m = x;
                point.system.l = if full { 15 } else { 8 };
            }
        }
        point.system.c_s2 = None;
        point.system.c_s3 = None;
        let sys = point.system()?;
        let plan = build_plan(&sys)?;
        for snr in DIMENSION_SNRS_DB {
            let banks = KINDS
                .iter()
                .map(|&k| build_bank(&point, &sys, &plan, k, &[snr]))
                .collect::<anyhow::Result<Vec<_>>>()?;
            for r in evaluate(&sys, &plan, &banks, &[snr], point.t_on, point.seed)? {
                if channels.contains(&r.channel) {
                    csv.push(vec![
                        x.to_string(),
                        format!("{}/{}/snr{}", r.channel, r.estimator, fmt_f64(snr)),
                        fmt_f64(r.nmse),
                    ]);
                }
            }
        }
    }
    Ok(csv)
}

fn figure_complexity() -> anyhow::Result<Csv> {
    let mut csv = figure_csv();
    for (sweep, m, l) in complexity_points() {
        let x = if sweep == "vs-L" { l } else { m };
        for stage in Stage::ALL {
            for kind in KINDS {
                let c = stage_cost(stage, kind, m, l)?;
                let base = format!("{sweep}/{}/{}", stage_tag(stage), kind.label());
                csv.push(vec![x.to_string(), format!("{base}/adds"), fmt_f64(c.adds)]);
                csv.push(vec![x.to_string(), format!("{base}/mults"), fmt_f64(c.mults)]);
            }
        }
    }
    Ok(csv)
}

pub fn model_path(dir: &Path, stage: Stage, pair: PairType) -> PathBuf {
    dir.join(format!("model_s{}_p{}.isacnn", stage.index(), pair.index()))
}

pub fn dataset_path(dir: &Path, stage: Stage, pair: PairType) -> PathBuf {
    dir.join(format!("dataset_s{}_p{}.isacds", stage.index(), pair.index()))
}

pub fn history_path(dir: &Path, stage: Stage, pair: PairType) -> PathBuf {
    dir.join(format!("history_s{}_p{}.csv", stage.index(), pair.index()))
}

/// A DL estimator holding the saved models of every stage before `before`.
/// A missing model file is an error.
pub fn load_chain(
    dir: &Path,
    sys: &SystemConfig,
    plan: &PilotPlan,
    pair: PairType,
    before: usize,
) -> anyhow::Result<DlEstimator> {
    let mut dl = DlEstimator::new(sys, plan)?;
    for stage in Stage::ALL.into_iter().take(before) {
        let path = model_path(dir, stage, pair);
        let model = load_model(&path).with_context(|| format!("loading {}", path.display()))?;
        anyhow::ensure!(
            model.stage == stage && model.pair == pair,
            "{} holds a stage {} / pair {} model",
            path.display(),
            model.stage.index(),
            model.pair.index()
        );
        anyhow::ensure!(
            model.net.input_len() == input_len(stage, pair, sys),
            "{} does not match the configured M and L",
            path.display()
        );
        dl.set_model(model);
    }
    Ok(dl)
}

pub fn write_csv(path: &Path, csv: &Csv) -> anyhow::Result<()> {
    std::fs::write(path, csv.render()).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.system.m = 2;
        cfg.system.l = 4;
        cfg.v = 8;
        cfg.u = 2;
        cfg.t_on = 10;
        cfg.training.max_epochs = 2;
        cfg.training.batch_size = 8;
        cfg
    }

    #[test]
    fn csv_rendering() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.push(vec![fmt_f64(0.5), fmt_f64(1e-20)]);
        assert_eq!(csv.render(), "a,b\n0.5,1e-20\n");
    }

    #[test]
    fn bank_picks_nearest_snr() {
        let sys = SystemConfig::new(2, 4);
        let plan = build_plan(&sys).unwrap();
        let mk = || Box::new(LsEstimator::from_plan(&plan).unwrap()) as Box<dyn ChannelEstimator>;
        let bank = EstimatorBank { label: "x".into(), by_snr: vec![(0.0, mk()), (10.0, mk())] };
        let p = |s| bank.pick(s) as *const dyn ChannelEstimator as *const u8;
        assert_eq!(p(2.0), bank.by_snr[0].1.as_ref() as *const dyn ChannelEstimator as *const u8);
        assert_eq!(p(7.0), bank.by_snr[1].1.as_ref() as *const dyn ChannelEstimator as *const u8);
    }

    #[test]
    fn parallel_dataset_matches_sequential() {
        let cfg = tiny();
        let sys = cfg.system().unwrap();
        let plan = build_plan(&sys).unwrap();
        let ls = LsEstimator::from_plan(&plan).unwrap();
        let par = generate_dataset(&sys, &plan, Stage::Two, PairType::Raw, &[10.0], 6, 3, 4, &ls).unwrap();
        let seq =
            irs_isac_core::features::make_dataset(Stage::Two, PairType::Raw, &sys, &[10.0], 6, 3, 4, &ls).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn evaluation_is_deterministic_and_ls_equals_untrained_dl() {
        let cfg = tiny();
        let sys = cfg.system().unwrap();
        let plan = build_plan(&sys).unwrap();
        let banks = vec![
            EstimatorBank::single("ls", Box::new(LsEstimator::from_plan(&plan).unwrap())),
            EstimatorBank::single("dl", Box::new(DlEstimator::new(&sys, &plan).unwrap())),
        ];
        let a = evaluate(&sys, &plan, &banks, &[0.0, 10.0], 20, 1).unwrap();
        let b = evaluate(&sys, &plan, &banks, &[0.0, 10.0], 20, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2 * 2 * 4);
        for (x, y) in a[..4].iter().zip(&a[4..8]) {
            assert_eq!(x.nmse, y.nmse);
        }
    }

    #[test]
    fn small_chain_trains() {
        let cfg = tiny();
        let sys = cfg.system().unwrap();
        let plan = build_plan(&sys).unwrap();
        let (dl, reports) = train_chain(&cfg, &sys, &plan, PairType::LsBased, &[10.0], 0).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(Stage::ALL.iter().all(|&s| dl.model(s).is_some()));
        assert!(reports.iter().all(|r| !r.history.epochs.is_empty()));
    }

    #[test]
    fn figure8_and_complexity_tables() {
        let csv = reproduce_figure(8, &tiny(), false).unwrap();
        assert_eq!(csv.header, ["x", "curve", "value"]);
        assert_eq!(csv.rows.len(), complexity_points().len() * 3 * 3 * 2);
        assert_eq!(csv.render(), reproduce_figure(8, &tiny(), false).unwrap().render());
        let cx = complexity_csv().unwrap();
        assert_eq!(cx.header, ["context", "M", "L", "adds", "mults"]);
        assert!(reproduce_figure(4, &tiny(), false).is_err());
    }

    #[test]
    fn ls_stage_cost_is_input_cost() {
        let c = stage_cost(Stage::One, EstimatorKind::Ls, 3, 8).unwrap();
        assert_eq!(c.adds, 164.0);
        let dl = stage_cost(Stage::One, EstimatorKind::DlType1, 4, 8).unwrap();
        assert_eq!((dl.adds, dl.mults), (344_536.0, 342_656.0));
    }
}
