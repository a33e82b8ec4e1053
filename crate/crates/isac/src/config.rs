//! JSON experiment configuration.

use serde::{Deserialize, Serialize};

use irs_isac_core::channels::Geometry;
use irs_isac_core::neuralnet::{ReCnnLayout, TrainConfig};
use irs_isac_core::protocol::SystemConfig;
use irs_isac_core::PairType;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimatorKind {
    #[serde(rename = "ls")]
    Ls,
    #[serde(rename = "dl-type1")]
    DlType1,
    #[serde(rename = "dl-type2")]
    DlType2,
}

impl EstimatorKind {
    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::Ls => "ls",
            EstimatorKind::DlType1 => "dl-type1",
            EstimatorKind::DlType2 => "dl-type2",
        }
    }

    pub fn pair(self) -> Option<PairType> {
        match self {
            EstimatorKind::Ls => None,
            EstimatorKind::DlType1 => Some(PairType::Raw),
            EstimatorKind::DlType2 => Some(PairType::LsBased),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Flattened,
    Channels,
}

impl From<Layout> for ReCnnLayout {
    fn from(l: Layout) -> Self {
        match l {
            Layout::Flattened => ReCnnLayout::Flattened,
            Layout::Channels => ReCnnLayout::Channels,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub d: [f64; 5],
    pub gamma: [f64; 5],
    pub rho0_db: f64,
    pub d0: f64,
    pub theta_bt: f64,
    pub theta_ti: f64,
    pub theta_ib: f64,
    pub spacing_ratio: f64,
    pub k_ib: f64,
    pub k_comm: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        let g = Geometry::default();
        GeometrySection {
            d: g.d,
            gamma: g.gamma,
            rho0_db: g.rho0_db,
            d0: g.d0,
            theta_bt: g.theta_bt,
            theta_ti: g.theta_ti,
            theta_ib: g.theta_ib,
            spacing_ratio: g.spacing_ratio,
            k_ib: g.k_ib,
            k_comm: g.k_comm,
        }
    }
}

impl From<&GeometrySection> for Geometry {
    fn from(g: &GeometrySection) -> Self {
        Geometry {
            d: g.d,
            gamma: g.gamma,
            rho0_db: g.rho0_db,
            d0: g.d0,
            theta_bt: g.theta_bt,
            theta_ti: g.theta_ti,
            theta_ib: g.theta_ib,
            spacing_ratio: g.spacing_ratio,
            k_ib: g.k_ib,
            k_comm: g.k_comm,
        }
    }
}

/// Scenario parameters. Omitted sub-frame boundaries default to the
/// minimal layout `C¹ = 1, C² = C¹ + L, C³ = C² + L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub m: usize,
    pub l: usize,
    pub c_s1: usize,
    pub c_s2: Option<usize>,
    pub c_s3: Option<usize>,
    pub p_bs_dbm: f64,
    pub p_ue_dbm: f64,
    pub snr_ch_db: f64,
    pub delta: f64,
    pub geometry: GeometrySection,
}

impl Default for SystemSection {
    fn default() -> Self {
        SystemSection {
            m: 4,
            l: 8,
            c_s1: 1,
            c_s2: None,
            c_s3: None,
            p_bs_dbm: 20.0,
            p_ue_dbm: 15.0,
            snr_ch_db: 30.0,
            delta: 1e4,
            geometry: GeometrySection::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingSection {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub validation_fraction: f64,
}

impl Default for TrainingSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        TrainingSection {
            learning_rate: t.learning_rate,
            batch_size: t.batch_size,
            max_epochs: t.max_epochs,
            patience: t.patience,
            validation_fraction: t.validation_fraction,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSection,
    pub train_snr_grid_db: Vec<f64>,
    pub test_snr_grid_db: Vec<f64>,
    /// Original channel draws per training set.
    pub v: usize,
    /// Variants (original plus augmented copies) per draw.
    pub u: usize,
    /// Monte-Carlo trials per evaluation point.
    pub t_on: usize,
    pub estimator: EstimatorKind,
    pub figure: Option<u32>,
    pub output: String,
    pub training: TrainingSection,
    /// Input layout of the second reflected-network convolution.
    pub re_layout: Layout,
    /// One model on data pooled over the training SNR grid (true) or one
    /// model per training SNR, used at the nearest test SNR (false).
    pub pooled: bool,
    pub seed: u64,
}

/// `start, start+step, …` up to and including `end`.
pub fn snr_range(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

impl Default for ExperimentConfig {
    /// Desk-scale version of the SNR sweep scenario.
    fn default() -> Self {
        ExperimentConfig {
            system: SystemSection::default(),
            train_snr_grid_db: snr_range(10.0, 20.0, 5.0),
            test_snr_grid_db: snr_range(-10.0, 20.0, 2.5),
            v: 200,
            u: 5,
            t_on: 1000,
            estimator: EstimatorKind::DlType2,
            figure: None,
            output: "out".to_string(),
            training: TrainingSection::default(),
            re_layout: Layout::Channels,
            pooled: true,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(!self.train_snr_grid_db.is_empty(), "train_snr_grid_db must not be empty");
        anyhow::ensure!(!self.test_snr_grid_db.is_empty(), "test_snr_grid_db must not be empty");
        anyhow::ensure!(self.t_on >= 1, "t_on must be at least 1");
        anyhow::ensure!(self.v >= 1 && self.u >= 1, "v and u must be at least 1");
        self.system()?.validate()?;
        self.train_config(0).validate()?;
        Ok(())
    }

    pub fn system(&self) -> anyhow::Result<SystemConfig> {
        let s = &self.system;
        let mut cfg = SystemConfig::new(s.m, s.l);
        cfg.c_s1 = s.c_s1;
        cfg.c_s2 = s.c_s2.unwrap_or(s.c_s1 + s.l);
        cfg.c_s3 = s.c_s3.unwrap_or(cfg.c_s2 + s.l);
        cfg.p_bs_dbm = s.p_bs_dbm;
        cfg.p_ue_dbm = s.p_ue_dbm;
        cfg.snr_ch_db = s.snr_ch_db;
        cfg.delta = s.delta;
        cfg.geometry = Geometry::from(&s.geometry);
        cfg.seed = self.seed;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        let t = &self.training;
        TrainConfig {
            learning_rate: t.learning_rate,
            batch_size: t.batch_size,
            max_epochs: t.max_epochs,
            patience: t.patience,
            validation_fraction: t.validation_fraction,
            seed,
        }
    }
}
