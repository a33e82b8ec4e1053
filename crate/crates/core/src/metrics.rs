use crate::cxmat::CMat;
use crate::{Error, Result};

/// `‖est − truth‖²_F / ‖truth‖²_F` for one realization.
pub fn nmse(est: &CMat, truth: &CMat) -> Result<f64> {
    let err = est.sub(truth)?.frobenius_sq();
    let norm = truth.frobenius_sq();
    if norm == 0.0 {
        return Err(Error::ZeroNormReference);
    }
    Ok(err / norm)
}

/// `10·log10(x)`.
pub fn to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}
