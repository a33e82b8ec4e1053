//! Stage-chained estimators: the LS baseline and the CNN-based estimator
//! behind one trait.

use rand::Rng;

use crate::airsim::{observe, StageObservation};
use crate::channels::ChannelRealization;
use crate::cxmat::CMat;
use crate::features::{build_input, postprocess, Priors, StageEstimate, Standardizer};
use crate::lsbase::LsBaseline;
use crate::neuralnet::Network;
use crate::protocol::{PilotPlan, SystemConfig};
use crate::{Error, PairType, Result, Stage};

pub trait ChannelEstimator: Sync {
    /// `(b̂, f̂)` from the stage-1 observation.
    fn direct(&self, obs: &StageObservation) -> Result<(CMat, CMat)>;
    /// `Ĝ_u` from the stage-2 observation and `f̂`.
    fn reflected_comm(&self, obs: &StageObservation, f_hat: &CMat) -> Result<CMat>;
    /// `Ĝ_t` from the stage-3 observation and all earlier estimates.
    fn reflected_sens(&self, obs: &StageObservation, b_hat: &CMat, f_hat: &CMat, gu_hat: &CMat) -> Result<CMat>;
}

/// Simulates all three stages of one realization, in stage order, from `rng`.
pub fn simulate_all<R: Rng + ?Sized>(
    config: &SystemConfig,
    plan: &PilotPlan,
    chans: &ChannelRealization,
    snr_db: f64,
    rng: &mut R,
) -> Result<[StageObservation; 3]> {
    Ok([
        observe(Stage::One, config, plan, chans, snr_db, rng)?,
        observe(Stage::Two, config, plan, chans, snr_db, rng)?,
        observe(Stage::Three, config, plan, chans, snr_db, rng)?,
    ])
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainEstimates {
    pub b: CMat,
    pub f: CMat,
    pub gu: CMat,
    pub gt: CMat,
}

/// Runs the three stages in order, feeding each stage's estimates forward.
pub fn estimate_chain(est: &dyn ChannelEstimator, obs: &[StageObservation; 3]) -> Result<ChainEstimates> {
    let (b, f) = est.direct(&obs[0])?;
    let gu = est.reflected_comm(&obs[1], &f)?;
    let gt = est.reflected_sens(&obs[2], &b, &f, &gu)?;
    Ok(ChainEstimates { b, f, gu, gt })
}

#[derive(Clone, Debug)]
pub struct LsEstimator {
    ls: LsBaseline,
}

impl LsEstimator {
    pub fn new(ls: LsBaseline) -> Self {
        LsEstimator { ls }
    }

    pub fn from_plan(plan: &PilotPlan) -> Result<Self> {
        Ok(LsEstimator { ls: LsBaseline::new(plan)? })
    }
}

impl ChannelEstimator for LsEstimator {
    fn direct(&self, obs: &StageObservation) -> Result<(CMat, CMat)> {
        self.ls.stage1(obs)
    }

    fn reflected_comm(&self, obs: &StageObservation, f_hat: &CMat) -> Result<CMat> {
        self.ls.stage2(obs, f_hat)
    }

    fn reflected_sens(&self, obs: &StageObservation, b_hat: &CMat, f_hat: &CMat, gu_hat: &CMat) -> Result<CMat> {
        self.ls.stage3(obs, b_hat, f_hat, gu_hat)
    }
}

/// A trained network plus everything needed to map raw inputs to channels.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    pub stage: Stage,
    pub pair: PairType,
    pub net: Network,
    pub scaler: Standardizer,
    pub delta: f64,
}

impl TrainedModel {
    fn estimate(
        &self,
        obs: &StageObservation,
        priors: &Priors,
        ls: &LsBaseline,
        m: usize,
        l: usize,
    ) -> Result<StageEstimate> {
        let mut x = build_input(self.stage, self.pair, obs, priors, ls)?;
        self.scaler.apply(&mut x)?;
        let out = self.net.forward(&x)?;
        postprocess(self.stage, &out, self.delta, m, l)
    }
}

/// CNN estimator. Stages without a model fall back to LS.
#[derive(Clone, Debug)]
pub struct DlEstimator {
    ls: LsBaseline,
    m: usize,
    l: usize,
    models: [Option<TrainedModel>; 3],
}

impl DlEstimator {
    pub fn new(config: &SystemConfig, plan: &PilotPlan) -> Result<Self> {
        Ok(DlEstimator { ls: LsBaseline::new(plan)?, m: config.m, l: config.l, models: [None, None, None] })
    }

    pub fn set_model(&mut self, model: TrainedModel) {
        let i = model.stage.index() as usize - 1;
        self.models[i] = Some(model);
    }

    pub fn model(&self, stage: Stage) -> Option<&TrainedModel> {
        self.models[stage.index() as usize - 1].as_ref()
    }
}

fn unexpected(stage: Stage) -> Error {
    Error::WrongStage { expected: stage.index(), actual: 0 }
}

impl ChannelEstimator for DlEstimator {
    fn direct(&self, obs: &StageObservation) -> Result<(CMat, CMat)> {
        match self.model(Stage::One) {
            None => self.ls.stage1(obs),
            Some(model) => match model.estimate(obs, &Priors::default(), &self.ls, self.m, self.l)? {
                StageEstimate::Direct { b, f } => Ok((b, f)),
                _ => Err(unexpected(Stage::One)),
            },
        }
    }

    fn reflected_comm(&self, obs: &StageObservation, f_hat: &CMat) -> Result<CMat> {
        match self.model(Stage::Two) {
            None => self.ls.stage2(obs, f_hat),
            Some(model) => {
                let priors = Priors { f: Some(f_hat.clone()), ..Priors::default() };
                match model.estimate(obs, &priors, &self.ls, self.m, self.l)? {
                    StageEstimate::ReflectedComm(gu) => Ok(gu),
                    _ => Err(unexpected(Stage::Two)),
                }
            }
        }
    }

    fn reflected_sens(&self, obs: &StageObservation, b_hat: &CMat, f_hat: &CMat, gu_hat: &CMat) -> Result<CMat> {
        match self.model(Stage::Three) {
            None => self.ls.stage3(obs, b_hat, f_hat, gu_hat),
            Some(model) => {
                let priors = Priors { b: Some(b_hat.clone()), f: Some(f_hat.clone()), gu: Some(gu_hat.clone()) };
                match model.estimate(obs, &priors, &self.ls, self.m, self.l)? {
                    StageEstimate::ReflectedSens(gt) => Ok(gt),
                    _ => Err(unexpected(Stage::Three)),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::realize;
    use crate::features::{build_target, input_len, target_len};
    use crate::metrics::nmse;
    use crate::neuralnet::{LayerSpec, Network};
    use crate::protocol::build_plan;
    use crate::rng::substream;

    #[test]
    fn ls_chain_exact_at_high_snr() {
        let cfg = SystemConfig::new(4, 8);
        let plan = build_plan(&cfg).unwrap();
        let est = LsEstimator::from_plan(&plan).unwrap();
        let mut rng = substream(2, 0, 0);
        let ch = realize(&cfg, &mut rng);
        let obs = simulate_all(&cfg, &plan, &ch, 200.0, &mut rng).unwrap();
        let e = estimate_chain(&est, &obs).unwrap();
        for (a, t) in [(&e.b, &ch.b), (&e.f, &ch.f), (&e.gu, &ch.gu), (&e.gt, &ch.gt)] {
            assert!(nmse(a, t).unwrap() <= 1e-15);
        }
    }

    #[test]
    fn dl_without_models_equals_ls() {
        let cfg = SystemConfig::new(2, 4);
        let plan = build_plan(&cfg).unwrap();
        let dl = DlEstimator::new(&cfg, &plan).unwrap();
        let ls = LsEstimator::from_plan(&plan).unwrap();
        let mut rng = substream(3, 0, 0);
        let ch = realize(&cfg, &mut rng);
        let obs = simulate_all(&cfg, &plan, &ch, 10.0, &mut rng).unwrap();
        assert_eq!(estimate_chain(&dl, &obs).unwrap(), estimate_chain(&ls, &obs).unwrap());
    }

    #[test]
    fn identity_network_reproduces_ls_input() {
        // A single linear layer set to the identity turns the LS-based
        // stage-1 input straight back into the LS estimate.
        let cfg = SystemConfig::new(2, 4);
        let plan = build_plan(&cfg).unwrap();
        let n = input_len(Stage::One, PairType::LsBased, &cfg);
        assert_eq!(n, target_len(Stage::One, &cfg));
        let mut net = Network::zeroed(n, &[LayerSpec::dense(n)]).unwrap();
        for i in 0..n {
            net.layers_mut()[0].weights[i * n + i] = 1.0;
        }
        let model = TrainedModel {
            stage: Stage::One,
            pair: PairType::LsBased,
            net,
            scaler: Standardizer::identity(n),
            delta: 1.0,
        };
        let mut dl = DlEstimator::new(&cfg, &plan).unwrap();
        dl.set_model(model);
        let ls = LsEstimator::from_plan(&plan).unwrap();
        let mut rng = substream(4, 0, 0);
        let ch = realize(&cfg, &mut rng);
        let obs = simulate_all(&cfg, &plan, &ch, 5.0, &mut rng).unwrap();
        let (b1, f1) = dl.direct(&obs[0]).unwrap();
        let (b2, f2) = ls.direct(&obs[0]).unwrap();
        assert!(b1.max_abs_diff(&b2) < 1e-15 && f1.max_abs_diff(&f2) < 1e-15);
        assert_eq!(build_target(Stage::One, &ch).len(), n);
    }
}
