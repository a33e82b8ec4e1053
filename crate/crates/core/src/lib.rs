//! Three-stage channel estimation for an IRS-assisted ISAC MISO uplink.
//!
//! The crate is `no_std` (with `alloc`) and covers everything that is pure
//! computation: complex linear algebra, channel generation, the pilot
//! protocol, received-signal simulation, the least-squares baseline, CNN
//! input/output construction, a small convolutional network engine with
//! Adam, and closed-form complexity counts. File formats, the experiment
//! harness and the CLI live in the `irs-isac` companion crate.
//!
//! Stage layout:
//!
//! * stage 1: IRS off, BS and UE transmit. Estimates the direct channels
//!   `b` (BS-target-BS) and `f` (UE-BS).
//! * stage 2: BS silent, IRS on. Estimates `G_u = diag(g) H`.
//! * stage 3: BS and IRS on. Estimates `G_t = A diag(g^H)`.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(any(feature = "std", test))]
extern crate std;

pub mod airsim;
pub mod channels;
pub mod costmodel;
pub mod cxmat;
mod error;
pub mod estimator;
pub mod features;
pub mod lsbase;
pub mod metrics;
pub mod neuralnet;
pub mod protocol;
pub mod rng;

pub use error::{Error, Result};

pub use cxmat::CMat;
pub use num_complex::Complex64;

/// Estimation stage of the pilot protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    One,
    Two,
    Three,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::One, Stage::Two, Stage::Three];

    pub fn index(self) -> u32 {
        match self {
            Stage::One => 1,
            Stage::Two => 2,
            Stage::Three => 3,
        }
    }

    pub fn from_index(i: u32) -> Result<Self> {
        match i {
            1 => Ok(Stage::One),
            2 => Ok(Stage::Two),
            3 => Ok(Stage::Three),
            other => Err(Error::InvalidArgument("stage must be 1, 2 or 3", other as f64)),
        }
    }
}

/// Input-output pair type.
///
/// `Raw` inputs are built straight from the received pilots (plus earlier
/// stage estimates); `LsBased` inputs are the least-squares estimate of the
/// channel the stage targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairType {
    Raw,
    LsBased,
}

impl PairType {
    pub fn index(self) -> u32 {
        match self {
            PairType::Raw => 1,
            PairType::LsBased => 2,
        }
    }

    pub fn from_index(i: u32) -> Result<Self> {
        match i {
            1 => Ok(PairType::Raw),
            2 => Ok(PairType::LsBased),
            other => Err(Error::InvalidArgument("pair type must be 1 or 2", other as f64)),
        }
    }
}
