//! Least-squares baseline for all three stages.
//!
//! The same estimates double as the type-2 CNN inputs.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::airsim::StageObservation;
use crate::cxmat::CMat;
use crate::protocol::PilotPlan;
use crate::{Error, Result, Stage};

/// LS estimator bound to one pilot plan. All pseudoinverses are computed
/// once at construction.
#[derive(Clone, Debug)]
pub struct LsBaseline {
    plan: PilotPlan,
    x_s1_pinv: CMat,
    z_s1_pinv: CMat,
    z_s2_pinv: CMat,
    x_s3_pinv: CMat,
    v_s2_pinv: CMat,
    v_s3_pinv: CMat,
}

impl LsBaseline {
    pub fn new(plan: &PilotPlan) -> Result<Self> {
        Ok(LsBaseline {
            x_s1_pinv: plan.x_s1.pinv()?,
            z_s1_pinv: plan.z_s1.pinv()?,
            z_s2_pinv: plan.z_s2.pinv()?,
            x_s3_pinv: plan.x_s3.pinv()?,
            v_s2_pinv: plan.v_s2.pinv()?,
            v_s3_pinv: plan.v_s3.pinv()?,
            plan: plan.clone(),
        })
    }

    pub fn plan(&self) -> &PilotPlan {
        &self.plan
    }

    /// Direct channels `(b̄, f̄)`: the sub-frame average of
    /// `(y_c X₁†)ᴴ` and `y_c Z₁†`.
    pub fn stage1(&self, obs: &StageObservation) -> Result<(CMat, CMat)> {
        obs.expect_stage(Stage::One)?;
        if obs.y.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let inv_count = 1.0 / obs.y.len() as f64;
        let mut b_row = CMat::zeros(1, self.x_s1_pinv.cols());
        let mut f = CMat::zeros(1, self.z_s1_pinv.cols());
        for y in &obs.y {
            b_row = b_row.add(&y.matmul(&self.x_s1_pinv)?)?;
            f = f.add(&y.matmul(&self.z_s1_pinv)?)?;
        }
        Ok((b_row.hermitian().scale(inv_count), f.scale(inv_count)))
    }

    /// Reflected communication channel `Ḡ_u = V₂† Ȳ₂` where row c of `Ȳ₂`
    /// is `(y_c − f̂ Z₂) Z₂†`.
    pub fn stage2(&self, obs: &StageObservation, f_hat: &CMat) -> Result<CMat> {
        obs.expect_stage(Stage::Two)?;
        self.expect_blocks(obs, self.plan.v_s2.rows())?;
        let f_contrib = f_hat.matmul(&self.plan.z_s2)?;
        let rows = obs.y.iter().map(|y| y.sub(&f_contrib)?.matmul(&self.z_s2_pinv)).collect::<Result<Vec<_>>>()?;
        self.v_s2_pinv.matmul(&stack_rows(&rows)?)
    }

    /// Reflected sensing channel. Row c of `Ȳ₃` is
    /// `(y_c − (f̂ + v_c Ĝ_u) Z₃ − b̂ᴴ X₃) X₃†`, so `Ȳ₃ ≈ V₃ G_tᴴ` and
    /// `Ḡ_t = (V₃† Ȳ₃)ᴴ`.
    pub fn stage3(&self, obs: &StageObservation, b_hat: &CMat, f_hat: &CMat, gu_hat: &CMat) -> Result<CMat> {
        obs.expect_stage(Stage::Three)?;
        self.expect_blocks(obs, self.plan.v_s3.rows())?;
        let direct = b_hat.hermitian().matmul(&self.plan.x_s3)?;
        let mut rows = Vec::with_capacity(obs.y.len());
        for (c, y) in obs.y.iter().enumerate() {
            let v = self.plan.v_s3.row_mat(c);
            let comm = f_hat.add(&v.matmul(gu_hat)?)?.matmul(&self.plan.z_s3)?;
            rows.push(y.sub(&comm)?.sub(&direct)?.matmul(&self.x_s3_pinv)?);
        }
        Ok(self.v_s3_pinv.matmul(&stack_rows(&rows)?)?.hermitian())
    }

    fn expect_blocks(&self, obs: &StageObservation, n: usize) -> Result<()> {
        if obs.y.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: obs.y.len() });
        }
        Ok(())
    }
}

fn stack_rows(rows: &[CMat]) -> Result<CMat> {
    let cols = rows.first().map_or(0, |r| r.cols());
    let mut data: Vec<Complex64> = Vec::with_capacity(rows.len() * cols);
    for r in rows {
        if r.shape() != (1, cols) {
            return Err(Error::LengthMismatch { expected: cols, actual: r.cols() });
        }
        data.extend_from_slice(r.as_slice());
    }
    CMat::from_vec(rows.len(), cols, data)
}
