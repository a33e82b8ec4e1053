//! Scenario configuration and the three-stage pilot plan.

use crate::channels::Geometry;
use crate::cxmat::{dft_matrix, CMat};
use crate::{Error, Result, Stage};

/// Every scalar of a scenario.
///
/// Sub-frame boundaries are cumulative: stage 1 occupies sub-frames
/// `1..=c_s1`, stage 2 `c_s1+1..=c_s2`, stage 3 `c_s2+1..=c_s3`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig {
    /// BS transmit antennas (also the UE antenna count).
    pub m: usize,
    /// IRS elements.
    pub l: usize,
    pub c_s1: usize,
    pub c_s2: usize,
    pub c_s3: usize,
    pub p_s1: usize,
    pub p_s2: usize,
    pub p_s3: usize,
    pub p_bs_dbm: f64,
    pub p_ue_dbm: f64,
    pub geometry: Geometry,
    /// SNR of the synthetic noise used for dataset augmentation.
    pub snr_ch_db: f64,
    /// Output scale factor applied to network targets.
    pub delta: f64,
    pub seed: u64,
}

impl SystemConfig {
    /// Minimal-overhead layout for `m` antennas and `l` IRS elements:
    /// one stage-1 sub-frame and `l` sub-frames each for stages 2 and 3.
    pub fn new(m: usize, l: usize) -> Self {
        SystemConfig {
            m,
            l,
            c_s1: 1,
            c_s2: l + 1,
            c_s3: 2 * l + 1,
            p_s1: 2 * m,
            p_s2: m,
            p_s3: m,
            p_bs_dbm: 20.0,
            p_ue_dbm: 15.0,
            geometry: Geometry::default(),
            snr_ch_db: 30.0,
            delta: 1e4,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.l == 0 {
            return Err(Error::InvalidConfig("M and L must be at least 1"));
        }
        if self.p_s1 != 2 * self.m || self.p_s2 != self.m || self.p_s3 != self.m {
            return Err(Error::InvalidConfig("pilot lengths must be P1 = 2M, P2 = P3 = M"));
        }
        if self.c_s1 < 1 {
            return Err(Error::InvalidConfig("stage 1 needs at least one sub-frame"));
        }
        if self.c_s2 < self.c_s1 + self.l || self.c_s3 < self.c_s2 + self.l {
            return Err(Error::InvalidConfig("stages 2 and 3 need at least L sub-frames each"));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidConfig("delta must be positive"));
        }
        if !self.p_bs_dbm.is_finite() || !self.p_ue_dbm.is_finite() || !self.snr_ch_db.is_finite() {
            return Err(Error::InvalidConfig("powers and SNR must be finite"));
        }
        self.geometry.validate()
    }

    /// Number of sub-frames in `stage`.
    pub fn subframes(&self, stage: Stage) -> usize {
        match stage {
            Stage::One => self.c_s1,
            Stage::Two => self.c_s2 - self.c_s1,
            Stage::Three => self.c_s3 - self.c_s2,
        }
    }

    /// Time slots per sub-frame in `stage`.
    pub fn pilot_len(&self, stage: Stage) -> usize {
        match stage {
            Stage::One => self.p_s1,
            Stage::Two => self.p_s2,
            Stage::Three => self.p_s3,
        }
    }

    /// BS transmit power in mW.
    pub fn p_bs_linear(&self) -> f64 {
        dbm_to_mw(self.p_bs_dbm)
    }

    /// UE transmit power in mW.
    pub fn p_ue_linear(&self) -> f64 {
        dbm_to_mw(self.p_ue_dbm)
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    libm::pow(10.0, dbm / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Which transmitters are active during a stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageSwitches {
    pub bs_tx_on: bool,
    pub irs_on: bool,
}

/// Pilot matrices and IRS schedules for all three stages.
///
/// `x_*` are BS pilots (scaled by √P_B), `z_*` UE pilots (scaled by √P_U).
/// Row `c` of `v_s2` / `v_s3` is the IRS phase vector of the c-th sub-frame
/// of that stage.
#[derive(Clone, Debug, PartialEq)]
pub struct PilotPlan {
    pub x_s1: CMat,
    pub z_s1: CMat,
    pub z_s2: CMat,
    pub x_s3: CMat,
    pub z_s3: CMat,
    pub v_s2: CMat,
    pub v_s3: CMat,
}

impl PilotPlan {
    pub fn switches(stage: Stage) -> StageSwitches {
        match stage {
            Stage::One => StageSwitches { bs_tx_on: true, irs_on: false },
            Stage::Two => StageSwitches { bs_tx_on: false, irs_on: true },
            Stage::Three => StageSwitches { bs_tx_on: true, irs_on: true },
        }
    }
}

/// Builds the DFT-based pilot plan.
///
/// Stage 1 splits a 2M×2M DFT (entries of modulus 1/√M) into the BS rows
/// `0..M` and the UE rows `M..2M`, which makes the two pilots orthogonal.
/// Stages 2 and 3 use M×M DFT pilots. IRS schedules are the first L
/// columns of an N-point DFT, N being the stage's sub-frame count.
pub fn build_plan(config: &SystemConfig) -> Result<PilotPlan> {
    config.validate()?;
    let m = config.m;
    let unit = 1.0 / libm::sqrt(m as f64);
    let amp_bs = libm::sqrt(config.p_bs_linear());
    let amp_ue = libm::sqrt(config.p_ue_linear());

    let r = dft_matrix(2 * m, config.p_s1, unit);
    let x_s1 = r.row_block(0, m).scale(amp_bs);
    let z_s1 = r.row_block(m, 2 * m).scale(amp_ue);

    let square = dft_matrix(m, config.p_s2, unit);
    let z_s2 = square.scale(amp_ue);
    let square3 = dft_matrix(m, config.p_s3, unit);
    let x_s3 = square3.scale(amp_bs);
    let z_s3 = square3.scale(amp_ue);

    let schedule = |n: usize| dft_matrix(n, n, 1.0).col_block(0, config.l);
    let v_s2 = schedule(config.subframes(Stage::Two));
    let v_s3 = schedule(config.subframes(Stage::Three));

    Ok(PilotPlan { x_s1, z_s1, z_s2, x_s3, z_s3, v_s2, v_s3 })
}
