//! Closed-form real addition / multiplication counts for input generation
//! and CNN inference.
//!
//! Counts are evaluated exactly as the closed forms are written, even when
//! a formula yields a non-integer for some parameters; [`CostReport::is_fractional`]
//! flags those cases.

use crate::neuralnet::{conv_out_len, CONV1_FILTERS, CONV2_FILTERS, DE_HIDDEN, KERNEL, RE_HIDDEN, STRIDE};
use crate::{Error, PairType, Result, Stage};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Architecture {
    De,
    Re,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostReport {
    pub adds: f64,
    pub mults: f64,
}

impl CostReport {
    pub const ZERO: CostReport = CostReport { adds: 0.0, mults: 0.0 };

    pub fn is_fractional(&self) -> bool {
        libm::trunc(self.adds) != self.adds || libm::trunc(self.mults) != self.mults
    }

    pub fn total(&self) -> f64 {
        self.adds + self.mults
    }
}

impl core::ops::Add for CostReport {
    type Output = CostReport;

    fn add(self, rhs: CostReport) -> CostReport {
        CostReport { adds: self.adds + rhs.adds, mults: self.mults + rhs.mults }
    }
}

/// Inverse of a complex q×q matrix.
pub fn inverse_cost(q: usize) -> CostReport {
    let q = q as f64;
    CostReport {
        adds: 2.0 / 3.0 * q * (3.0 * q * q + 3.0 * q - 1.0),
        mults: 1.0 / 3.0 * q * (4.0 * q * q + 15.0 * q - 1.0),
    }
}

/// Cost of building one CNN input. `span` is the stage's sub-frame count
/// (`C¹`, `C² − C¹` or `C³ − C²`). Raw inputs need no processing.
pub fn input_gen_cost(stage: Stage, pair: PairType, m: usize, l: usize, span: usize) -> Result<CostReport> {
    if m == 0 || l == 0 || span == 0 {
        return Err(Error::InvalidConfig("M, L and the sub-frame span must be at least 1"));
    }
    if pair == PairType::Raw {
        return Ok(CostReport::ZERO);
    }
    let (m, l, c) = (m as f64, l as f64, span as f64);
    let (m2, m3, l2) = (m * m, m * m * m, l * l);
    let report = match stage {
        Stage::One => CostReport {
            adds: 10.0 / 3.0 * c * m * (2.0 * m2 - 1.0) - 2.0 * m,
            mults: 2.0 / 3.0 * c * m * (52.0 * m2 + 39.0 * m - 1.0) + 4.0 * m + 2.0,
        },
        Stage::Two => CostReport {
            adds: 2.0 / 3.0 * c * (9.0 * m3 + 3.0 * m2 - 4.0 * m + 6.0 * l2 - 3.0 * l)
                + 2.0 / 3.0 * l * (3.0 * l2 - 1.0),
            mults: 1.0 / 3.0 * c * (22.0 * m3 + 39.0 * m2 - m + 24.0 * l2) + 1.0 / 3.0 * (4.0 * l2 + 15.0 * l + 1.0),
        },
        Stage::Three => CostReport {
            adds: 2.0 / 3.0 * c * (9.0 * m3 + 6.0 * m2 - 4.0 * m + 3.0 * m * l + 6.0 * l2 - 3.0 * l)
                + 2.0 / 3.0 * (3.0 * l2 - 1.0),
            mults: 1.0 / 3.0 * c * (22.0 * m3 + 51.0 * m2 - m + 12.0 * m * l + 24.0 * l2)
                + 1.0 / 3.0 * l * (4.0 * l2 + 15.0 * l - 1.0),
        },
    };
    Ok(report)
}

/// Inference cost of one network, one addition charged per activation.
pub fn cnn_cost(arch: Architecture, input_len: usize, output_len: usize) -> Result<CostReport> {
    if input_len < KERNEL {
        return Err(Error::InvalidArgument("input shorter than kernel", input_len as f64));
    }
    let fz = KERNEL as f64;
    let fn2 = CONV1_FILTERS as f64;
    let eta_f2 = conv_out_len(input_len, KERNEL, STRIDE) as f64;
    let out = output_len as f64;
    let report = match arch {
        Architecture::De => {
            let eta3 = DE_HIDDEN as f64;
            CostReport {
                adds: fn2 * eta_f2 * (fz + eta3 + 1.0) + out * (eta3 + 1.0) + eta3,
                mults: fn2 * eta_f2 * (fz + eta3) + eta3 * out,
            }
        }
        Architecture::Re => {
            let fn3 = CONV2_FILTERS as f64;
            let eta_f3 = conv_out_len(CONV1_FILTERS * conv_out_len(input_len, KERNEL, STRIDE), KERNEL, STRIDE) as f64;
            let (eta4, eta5, eta6) = (RE_HIDDEN[0] as f64, RE_HIDDEN[1] as f64, out);
            let conv_adds = fn2 * eta_f2 * (fz + 1.0) + fn3 * eta_f3 * (fz + 1.0);
            let conv_mults = fn2 * eta_f2 * fz + fn3 * eta_f3 * fz;
            CostReport {
                adds: conv_adds + eta5 * (eta4 + 1.0) + eta6 * (eta5 + 1.0) + eta4 * (fn3 * eta_f3 + 1.0),
                mults: conv_mults + eta5 * eta4 + eta6 * eta5 + fn3 * eta_f3 * eta4,
            }
        }
    };
    Ok(report)
}
