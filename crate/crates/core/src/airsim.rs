//! Noisy received pilot blocks for each stage.
//!
//! The residual self-interference term is never added; it is assumed to be
//! compensated before channel estimation starts.

use alloc::vec::Vec;

use rand::Rng;

use crate::channels::ChannelRealization;
use crate::cxmat::CMat;
use crate::protocol::{db_to_linear, PilotPlan, SystemConfig};
use crate::rng::complex_normal;
use crate::{Error, Result, Stage};

#[derive(Clone, Debug, PartialEq)]
pub struct StageObservation {
    pub stage: Stage,
    /// One 1×P block per sub-frame, in sub-frame order.
    pub y: Vec<CMat>,
    /// Noise variance per received sample (linear).
    pub sigma2: f64,
    pub snr_db: f64,
}

impl StageObservation {
    pub(crate) fn expect_stage(&self, stage: Stage) -> Result<()> {
        if self.stage != stage {
            return Err(Error::WrongStage { expected: stage.index(), actual: self.stage.index() });
        }
        Ok(())
    }
}

/// Nominal received signal power of a stage:
/// stage 1 `P_B ρ₂ + P_U ρ₄`, stage 2 `P_U(ρ₄ + ρ₁ρ₅)`,
/// stage 3 `P_B(ρ₂ + ρ₁ρ₃) + P_U(ρ₄ + ρ₁ρ₅)`.
pub fn received_power(stage: Stage, config: &SystemConfig) -> f64 {
    let geo = &config.geometry;
    let rho = |j| geo.rho(j);
    let (pb, pu) = (config.p_bs_linear(), config.p_ue_linear());
    match stage {
        Stage::One => pb * rho(2) + pu * rho(4),
        Stage::Two => pu * (rho(4) + rho(1) * rho(5)),
        Stage::Three => pb * (rho(2) + rho(1) * rho(3)) + pu * (rho(4) + rho(1) * rho(5)),
    }
}

/// σ² such that the stage runs at `snr_db`.
pub fn noise_variance(stage: Stage, config: &SystemConfig, snr_db: f64) -> f64 {
    received_power(stage, config) / db_to_linear(snr_db)
}

fn add_noise<R: Rng + ?Sized>(mut y: CMat, sigma2: f64, rng: &mut R) -> CMat {
    if sigma2 > 0.0 {
        for z in y.as_mut_slice() {
            *z += complex_normal(rng, sigma2);
        }
    }
    y
}

/// `y_c = bᴴX₁ + fZ₁ + n_c` for `c_count` sub-frames.
pub fn receive_stage1<R: Rng + ?Sized>(
    plan: &PilotPlan,
    chans: &ChannelRealization,
    sigma2: f64,
    c_count: usize,
    rng: &mut R,
) -> Result<Vec<CMat>> {
    let clean = chans.b.hermitian().matmul(&plan.x_s1)?.add(&chans.f.matmul(&plan.z_s1)?)?;
    Ok((0..c_count).map(|_| add_noise(clean.clone(), sigma2, rng)).collect())
}

/// `y_c = (f + v_c G_u) Z₂ + n_c`, one block per row of `V₂`.
pub fn receive_stage2<R: Rng + ?Sized>(
    plan: &PilotPlan,
    chans: &ChannelRealization,
    sigma2: f64,
    rng: &mut R,
) -> Result<Vec<CMat>> {
    let mut out = Vec::with_capacity(plan.v_s2.rows());
    for c in 0..plan.v_s2.rows() {
        let v = plan.v_s2.row_mat(c);
        let eff = chans.f.add(&v.matmul(&chans.gu)?)?;
        out.push(add_noise(eff.matmul(&plan.z_s2)?, sigma2, rng));
    }
    Ok(out)
}

/// `y_c = (bᴴ + v_c G_tᴴ) X₃ + (f + v_c G_u) Z₃ + n_c`, one block per row of `V₃`.
pub fn receive_stage3<R: Rng + ?Sized>(
    plan: &PilotPlan,
    chans: &ChannelRealization,
    sigma2: f64,
    rng: &mut R,
) -> Result<Vec<CMat>> {
    let bh = chans.b.hermitian();
    let gth = chans.gt.hermitian();
    let mut out = Vec::with_capacity(plan.v_s3.rows());
    for c in 0..plan.v_s3.rows() {
        let v = plan.v_s3.row_mat(c);
        let sensing = bh.add(&v.matmul(&gth)?)?.matmul(&plan.x_s3)?;
        let comm = chans.f.add(&v.matmul(&chans.gu)?)?.matmul(&plan.z_s3)?;
        out.push(add_noise(sensing.add(&comm)?, sigma2, rng));
    }
    Ok(out)
}

/// Simulates one stage at `snr_db`, deriving σ² from the stage's nominal
/// received power.
pub fn observe<R: Rng + ?Sized>(
    stage: Stage,
    config: &SystemConfig,
    plan: &PilotPlan,
    chans: &ChannelRealization,
    snr_db: f64,
    rng: &mut R,
) -> Result<StageObservation> {
    let sigma2 = noise_variance(stage, config, snr_db);
    observe_with_variance(stage, config, plan, chans, sigma2, snr_db, rng)
}

/// As [`observe`] but with an explicit noise variance.
pub fn observe_with_variance<R: Rng + ?Sized>(
    stage: Stage,
    config: &SystemConfig,
    plan: &PilotPlan,
    chans: &ChannelRealization,
    sigma2: f64,
    snr_db: f64,
    rng: &mut R,
) -> Result<StageObservation> {
    let y = match stage {
        Stage::One => receive_stage1(plan, chans, sigma2, config.subframes(Stage::One), rng)?,
        Stage::Two => receive_stage2(plan, chans, sigma2, rng)?,
        Stage::Three => receive_stage3(plan, chans, sigma2, rng)?,
    };
    Ok(StageObservation { stage, y, sigma2, snr_db })
}
