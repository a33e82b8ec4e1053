//! Ground-truth channel draws.
//!
//! Link numbering for distances, exponents and path-loss factors:
//!
//! | link | path            | channel |
//! |------|-----------------|---------|
//! | 1    | IRS → BS        | `g`     |
//! | 2    | BS → target → BS| `b`     |
//! | 3    | target → IRS    | `A`     |
//! | 4    | UE → BS         | `f`     |
//! | 5    | UE → IRS        | `H`     |

use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::cxmat::CMat;
use crate::protocol::SystemConfig;
use crate::rng::{complex_normal, unit_phasor};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    /// Link distances d₁..d₅ in meters.
    pub d: [f64; 5],
    /// Path-loss exponents γ₁..γ₅.
    pub gamma: [f64; 5],
    /// Path loss at the reference distance, in dB (a power ratio).
    pub rho0_db: f64,
    /// Reference distance in meters.
    pub d0: f64,
    pub theta_bt: f64,
    pub theta_ti: f64,
    pub theta_ib: f64,
    /// Element spacing over wavelength.
    pub spacing_ratio: f64,
    /// Rician factor of the IRS-BS link.
    pub k_ib: f64,
    /// Rician factor of the UE-BS and UE-IRS links (0 = Rayleigh).
    pub k_comm: f64,
}

impl Default for Geometry {
    /// The reference scenario: IRS 2 m from the BS, target 140 m out, UE 50 m.
    fn default() -> Self {
        let d = [2.0, 140.0, 140.0, 50.0, 50.0];
        let theta = libm::acos(d[0] / d[4]);
        Geometry {
            d,
            gamma: [2.0, 3.5, 2.3, 3.0, 2.2],
            rho0_db: -30.0,
            d0: 1.0,
            theta_bt: theta,
            theta_ti: -theta,
            theta_ib: PI,
            spacing_ratio: 0.5,
            k_ib: 10.0,
            k_comm: 0.0,
        }
    }
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        if self.d.iter().any(|&d| !(d > 0.0)) || !(self.d0 > 0.0) {
            return Err(Error::InvalidConfig("distances must be positive"));
        }
        if !(self.spacing_ratio > 0.0) {
            return Err(Error::InvalidConfig("spacing ratio must be positive"));
        }
        if [self.theta_bt, self.theta_ti, self.theta_ib].iter().any(|t| !(-PI..=PI).contains(t)) {
            return Err(Error::InvalidConfig("angles must lie in [-pi, pi]"));
        }
        if !(self.k_ib >= 0.0) || !(self.k_comm >= 0.0) {
            return Err(Error::InvalidConfig("Rician factors must be non-negative"));
        }
        Ok(())
    }

    /// Linear path-loss factor ρⱼ of link `j` (1-based).
    pub fn rho(&self, link: usize) -> f64 {
        assert!((1..=5).contains(&link), "link index is 1..=5");
        path_loss(self.d[link - 1], self.gamma[link - 1], self)
    }
}

/// `ρ₀ (d/d₀)^(−γ)` as a linear power ratio.
pub fn path_loss(d: f64, gamma: f64, geometry: &Geometry) -> f64 {
    let rho0 = libm::pow(10.0, geometry.rho0_db / 10.0);
    rho0 * libm::pow(d / geometry.d0, -gamma)
}

/// Array response `[1, e^{jκ sinθ}, …, e^{jκ(n−1) sinθ}]ᵀ`, κ = 2π·spacing.
pub fn steering_vector(theta: f64, n: usize, spacing_ratio: f64) -> CMat {
    let step = TAU * spacing_ratio * libm::sin(theta);
    CMat::from_fn(n, 1, |m, _| Complex64::from_polar(1.0, step * m as f64))
}

/// Rank-one target channels before path loss: `A = α₁ a(θ_BT) a(θ_TI)ᴴ`
/// (M×L) and `b = α₂ a(θ_BT)` (M×1) with unit-modulus, uniform-phase α.
pub fn sample_sensing<R: Rng + ?Sized>(geometry: &Geometry, m: usize, l: usize, rng: &mut R) -> (CMat, CMat) {
    let alpha1 = unit_phasor(rng);
    let alpha2 = unit_phasor(rng);
    let a_bt = steering_vector(geometry.theta_bt, m, geometry.spacing_ratio);
    let a_ti = steering_vector(geometry.theta_ti, l, geometry.spacing_ratio);
    let a = CMat::from_fn(m, l, |i, j| alpha1 * a_bt[(i, 0)] * a_ti[(j, 0)].conj());
    let b = a_bt.map(|z| alpha2 * z);
    (a, b)
}

/// `√(K/(K+1))·los + √(1/(K+1))·n`, n with i.i.d. CN(0,1) entries.
pub fn sample_rician<R: Rng + ?Sized>(k: f64, los: &CMat, rng: &mut R) -> CMat {
    let los_w = libm::sqrt(k / (k + 1.0));
    let nlos_w = libm::sqrt(1.0 / (k + 1.0));
    CMat::from_fn(los.rows(), los.cols(), |r, c| los[(r, c)] * los_w + complex_normal(rng, 1.0) * nlos_w)
}

/// One draw of every link, path loss applied.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    /// BS-target-BS, M×1.
    pub b: CMat,
    /// UE-BS, 1×M.
    pub f: CMat,
    /// BS-target-IRS, M×L.
    pub a: CMat,
    /// IRS-BS, 1×L.
    pub g: CMat,
    /// UE-IRS, L×M.
    pub h: CMat,
    /// Self-interference channel, M×1. Stored only; assumed compensated.
    pub h_si: CMat,
    /// `A·diag(gᴴ)`, M×L.
    pub gt: CMat,
    /// `diag(g)·H`, L×M.
    pub gu: CMat,
}

impl ChannelRealization {
    /// Assembles a realization and derives the cascaded channels.
    pub fn from_links(b: CMat, f: CMat, a: CMat, g: CMat, h: CMat, h_si: CMat) -> Result<Self> {
        let (gt, gu) = cascade(&a, &g, &h)?;
        Ok(ChannelRealization { b, f, a, g, h, h_si, gt, gu })
    }

    pub fn m(&self) -> usize {
        self.b.rows()
    }

    pub fn l(&self) -> usize {
        self.g.cols()
    }

    /// Every link matrix with all entries zero.
    pub fn zeros(m: usize, l: usize) -> Self {
        ChannelRealization {
            b: CMat::zeros(m, 1),
            f: CMat::zeros(1, m),
            a: CMat::zeros(m, l),
            g: CMat::zeros(1, l),
            h: CMat::zeros(l, m),
            h_si: CMat::zeros(m, 1),
            gt: CMat::zeros(m, l),
            gu: CMat::zeros(l, m),
        }
    }
}

/// `(A·diag(gᴴ), diag(g)·H)`.
pub fn cascade(a: &CMat, g: &CMat, h: &CMat) -> Result<(CMat, CMat)> {
    let l = g.cols();
    if g.rows() != 1 || a.cols() != l || h.rows() != l {
        return Err(Error::DimensionMismatch {
            op: "cascade",
            lhs_rows: a.rows(),
            lhs_cols: a.cols(),
            rhs_rows: h.rows(),
            rhs_cols: l,
        });
    }
    let gt = CMat::from_fn(a.rows(), l, |i, j| a[(i, j)] * g[(0, j)].conj());
    let gu = CMat::from_fn(l, h.cols(), |i, j| g[(0, i)] * h[(i, j)]);
    Ok((gt, gu))
}

/// Draws one realization for `config`.
///
/// Each link matrix is drawn at unit scale and multiplied by the square
/// root of its path-loss factor, so the cascaded channels carry ρ₁ρ₃ and
/// ρ₁ρ₅ of power.
pub fn realize<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> ChannelRealization {
    let geo = &config.geometry;
    let (m, l) = (config.m, config.l);
    let (a, b) = sample_sensing(geo, m, l, rng);
    let g_los = steering_vector(geo.theta_ib, l, geo.spacing_ratio).hermitian();
    let g = sample_rician(geo.k_ib, &g_los, rng);
    let f = sample_rician(geo.k_comm, &CMat::from_fn(1, m, |_, _| Complex64::new(1.0, 0.0)), rng);
    let h = sample_rician(geo.k_comm, &CMat::from_fn(l, m, |_, _| Complex64::new(1.0, 0.0)), rng);
    let h_si = CMat::from_fn(m, 1, |_, _| complex_normal(rng, 1.0));

    let amp = |link: usize| libm::sqrt(geo.rho(link));
    let b = b.scale(amp(2));
    let f = f.scale(amp(4));
    let a = a.scale(amp(3));
    let g = g.scale(amp(1));
    let h = h.scale(amp(5));
    ChannelRealization::from_links(b, f, a, g, h, h_si).expect("shapes are consistent by construction")
}
