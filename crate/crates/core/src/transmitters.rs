//! Transmitter strategies for probing a lossy bosonic channel.
//!
//! Two transmitters are compared at equal signal energy. The classical one
//! sends a coherent state of total mean photon number `N`; its exact
//! minimum error probability against the lossless hypothesis is
//!
//! ```text
//! p_coh = (1 - sqrt(1 - exp(-N (1 - sqrt(tau))^2))) / 2
//! ```
//!
//! The quantum one sends the signal half of a two-mode squeezed vacuum,
//! `nbar` photons per copy over `M` copies, keeping the idler lossless.
//! Its Chernoff-bound error probability is
//!
//! ```text
//! p_epr <= (1/2) (1 + nbar (1 - sqrt(tau)))^(-2M)
//! ```
//!
//! which, at fixed total energy `N = M nbar`, improves monotonically with
//! the subdivision `M` and converges to the broadband limit
//! `(1/2) exp(-2N (1 - sqrt(tau)))`.
//!
//! Error exponents per copy: `r_coh = nbar (1 - sqrt(tau))^2` for the
//! coherent probe and `r_quant = 2 ln(1 + nbar (1 - sqrt(tau)))` for the
//! entangled one; their ratio diverges like `2 / (1 - sqrt(tau))` near
//! transparency.

use crate::bounds::{
    hoeffding_pure_piecewise, qhb_numeric_with_cap, BoundsError, DivergenceCap, HoeffdingClass,
    HoeffdingResult,
};
use crate::gaussian::{loss_on_signal, tmsv_state, GaussianError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransmitterError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error("parameter {name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("invalid transmitter configuration: {0}")]
    Config(String),
}

fn check_nbar(nbar: f64) -> Result<(), TransmitterError> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(TransmitterError::Domain {
            name: "nbar",
            value: nbar,
            domain: "[0, inf)",
        });
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<(), TransmitterError> {
    if !(tau.is_finite() && (0.0..=1.0).contains(&tau)) {
        return Err(TransmitterError::Domain {
            name: "tau",
            value: tau,
            domain: "[0, 1]",
        });
    }
    Ok(())
}

fn check_copies(m: u32) -> Result<(), TransmitterError> {
    if m == 0 {
        return Err(TransmitterError::Domain {
            name: "m_copies",
            value: 0.0,
            domain: "[1, inf)",
        });
    }
    Ok(())
}

/// Exact minimum error probability of the coherent transmitter at total
/// mean photon number `total_nbar` (pure-pure Helstrom).
pub fn coherent_error(total_nbar: f64, tau: f64) -> Result<f64, TransmitterError> {
    check_nbar(total_nbar)?;
    check_tau(tau)?;
    let a = total_nbar * (1.0 - tau.sqrt()).powi(2);
    // 1 - exp(-a) via expm1 to keep precision for near-transparent channels.
    Ok(0.5 * (1.0 - (-(-a).exp_m1()).sqrt()))
}

/// Chernoff bound for the coherent transmitter, `(1/2) exp(-N (1-sqrt(tau))^2)`.
pub fn coherent_qcb(total_nbar: f64, tau: f64) -> Result<f64, TransmitterError> {
    check_nbar(total_nbar)?;
    check_tau(tau)?;
    Ok(0.5 * (-total_nbar * (1.0 - tau.sqrt()).powi(2)).exp())
}

/// Hoeffding bound for the coherent transmitter, per copy at `nbar` photons:
/// pure-state piecewise form with threshold `r_coh = nbar (1-sqrt(tau))^2`.
pub fn coherent_qhb(nbar: f64, tau: f64, r: f64) -> Result<HoeffdingResult, TransmitterError> {
    check_nbar(nbar)?;
    check_tau(tau)?;
    let fid = (-nbar * (1.0 - tau.sqrt()).powi(2)).exp();
    Ok(hoeffding_pure_piecewise(fid, r)?)
}

/// Chernoff bound for the entangled transmitter:
/// `(1/2) (1 + nbar (1 - sqrt(tau)))^(-2M)`.
pub fn epr_qcb(nbar: f64, tau: f64, m_copies: u32) -> Result<f64, TransmitterError> {
    check_nbar(nbar)?;
    check_tau(tau)?;
    check_copies(m_copies)?;
    let base = 1.0 + nbar * (1.0 - tau.sqrt());
    Ok(0.5 * base.powi(-2 * m_copies as i32))
}

/// Broadband (`M -> inf` at fixed total energy) limit of [`epr_qcb`]:
/// `(1/2) exp(-2 N (1 - sqrt(tau)))`.
pub fn epr_qcb_broadband(total_nbar: f64, tau: f64) -> Result<f64, TransmitterError> {
    check_nbar(total_nbar)?;
    check_tau(tau)?;
    Ok(0.5 * (-2.0 * total_nbar * (1.0 - tau.sqrt())).exp())
}

/// Per-copy false-positive exponent threshold of the coherent transmitter.
pub fn r_coh_threshold(nbar: f64, tau: f64) -> Result<f64, TransmitterError> {
    check_nbar(nbar)?;
    check_tau(tau)?;
    Ok(nbar * (1.0 - tau.sqrt()).powi(2))
}

/// Per-copy false-positive exponent threshold of the entangled transmitter.
pub fn r_quant_threshold(nbar: f64, tau: f64) -> Result<f64, TransmitterError> {
    check_nbar(nbar)?;
    check_tau(tau)?;
    Ok(2.0 * (nbar * (1.0 - tau.sqrt())).ln_1p())
}

/// Hoeffding bound for the entangled transmitter at `nbar` photons per
/// copy, computed numerically from the lossy two-mode Gaussian pair.
///
/// Above the plateau threshold the supremum equals `r_quant` exactly; that
/// identity is asserted as an internal consistency check.
pub fn epr_qhb(nbar: f64, tau: f64, r: f64) -> Result<HoeffdingResult, TransmitterError> {
    let res = epr_qhb_with_cap(nbar, tau, r, DivergenceCap::default())?;
    let r_quant = r_quant_threshold(nbar, tau)?;
    if r >= r_quant {
        assert!(
            res.classification == HoeffdingClass::Finite && (res.h_value - r_quant).abs() <= 1e-6,
            "Hoeffding plateau violated at nbar={nbar} tau={tau} r={r}: got {:?}",
            res
        );
    }
    Ok(res)
}

/// [`epr_qhb`] under an explicit divergence policy. No plateau assertion:
/// a tight cap may legitimately reclassify a finite supremum.
pub fn epr_qhb_with_cap(
    nbar: f64,
    tau: f64,
    r: f64,
    cap: DivergenceCap,
) -> Result<HoeffdingResult, TransmitterError> {
    check_nbar(nbar)?;
    check_tau(tau)?;
    let s0 = tmsv_state(nbar)?;
    let s1 = loss_on_signal(&s0, tau)?;
    Ok(qhb_numeric_with_cap(&s0, &s1, r, cap)?)
}

/// Error-probability gain of the entangled transmitter over the coherent
/// one at equal total energy `M * nbar`, using the Chernoff bound for the
/// entangled side.
pub fn gain(nbar: f64, tau: f64, m_copies: u32) -> Result<f64, TransmitterError> {
    let p_coh = coherent_error(nbar * m_copies as f64, tau)?;
    let p_epr = epr_qcb(nbar, tau, m_copies)?;
    Ok(p_coh - p_epr)
}

/// Gain in the broadband limit: coherent exact error minus the broadband
/// Chernoff bound at the same total energy.
pub fn optimal_gain(total_nbar: f64, tau: f64) -> Result<f64, TransmitterError> {
    let p_coh = coherent_error(total_nbar, tau)?;
    let p_bb = epr_qcb_broadband(total_nbar, tau)?;
    Ok(p_coh - p_bb)
}

/// Ratio of per-copy error exponents `r_quant / r_coh`.
///
/// Diverges like `2 / (1 - sqrt(tau))` near transparency; by convention
/// the removable `tau = 1` point maps to 1.
pub fn rate_ratio(nbar: f64, tau: f64) -> Result<f64, TransmitterError> {
    if !(nbar.is_finite() && nbar > 0.0) {
        return Err(TransmitterError::Domain {
            name: "nbar",
            value: nbar,
            domain: "(0, inf)",
        });
    }
    check_tau(tau)?;
    if tau == 1.0 {
        return Ok(1.0);
    }
    let eps = 1.0 - tau.sqrt();
    Ok(2.0 * (nbar * eps).ln_1p() / (nbar * eps * eps))
}

/// Ratio of Hoeffding bounds at a common exponent constraint `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QhbRatio {
    /// Both bounds certified; the value is `H_quant(r) / H_coh(r)`, with
    /// the convention 0 when only the coherent bound diverges.
    Finite(f64),
    /// Only the entangled bound diverges.
    Infinite,
    /// Both diverge, or the entangled supremum could not be certified.
    Indeterminate,
}

/// `H_quant(r) / H_coh(r)` with divergences classified. The removable
/// `tau = 1` point maps to `Finite(1.0)`.
pub fn qhb_ratio(nbar: f64, tau: f64, r: f64) -> Result<QhbRatio, TransmitterError> {
    qhb_ratio_with_cap(nbar, tau, r, DivergenceCap::default())
}

/// [`qhb_ratio`] under an explicit divergence policy.
pub fn qhb_ratio_with_cap(
    nbar: f64,
    tau: f64,
    r: f64,
    cap: DivergenceCap,
) -> Result<QhbRatio, TransmitterError> {
    if !(nbar.is_finite() && nbar > 0.0) {
        return Err(TransmitterError::Domain {
            name: "nbar",
            value: nbar,
            domain: "(0, inf)",
        });
    }
    check_tau(tau)?;
    if tau == 1.0 {
        return Ok(QhbRatio::Finite(1.0));
    }
    let r_coh = r_coh_threshold(nbar, tau)?;
    let coh_finite = r >= r_coh;
    let quant = epr_qhb_with_cap(nbar, tau, r, cap)?;
    Ok(match (coh_finite, quant.classification) {
        (true, HoeffdingClass::Finite) => QhbRatio::Finite(quant.h_value / r_coh),
        (true, HoeffdingClass::Infinite) => QhbRatio::Infinite,
        (false, HoeffdingClass::Finite) => QhbRatio::Finite(0.0),
        (false, HoeffdingClass::Infinite) => QhbRatio::Indeterminate,
        (_, HoeffdingClass::Boundary) => QhbRatio::Indeterminate,
    })
}

/// Which transmitter a [`TransmitterConfig`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransmitterKind {
    Coherent,
    Epr,
}

/// Copy structure of a probing strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Copies {
    Finite(u32),
    /// Infinitely subdivided signal at fixed total energy.
    Broadband,
}

/// How the signal energy is constrained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EnergyConstraint {
    /// `nbar` photons per copy, total energy scales with the copy count.
    Local,
    /// Fixed total energy shared across all copies.
    Global { total_nbar: f64 },
}

/// A validated transmitter strategy: kind, per-copy energy, copy
/// structure, and energy constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmitterConfig {
    pub kind: TransmitterKind,
    pub nbar: f64,
    pub copies: Copies,
    pub constraint: EnergyConstraint,
}

impl TransmitterConfig {
    pub fn new(
        kind: TransmitterKind,
        nbar: f64,
        copies: Copies,
        constraint: EnergyConstraint,
    ) -> Result<Self, TransmitterError> {
        check_nbar(nbar)?;
        match (copies, constraint) {
            (Copies::Finite(m), EnergyConstraint::Global { total_nbar }) => {
                check_copies(m)?;
                check_nbar(total_nbar)?;
                let drift = (nbar * m as f64 - total_nbar).abs();
                if drift > 1e-12 * total_nbar.max(1.0) {
                    return Err(TransmitterError::Config(format!(
                        "per-copy energy {nbar} x {m} copies does not match total {total_nbar}"
                    )));
                }
            }
            (Copies::Finite(m), EnergyConstraint::Local) => check_copies(m)?,
            (Copies::Broadband, EnergyConstraint::Global { total_nbar }) => check_nbar(total_nbar)?,
            (Copies::Broadband, EnergyConstraint::Local) => {
                return Err(TransmitterError::Config(
                    "broadband operation requires a global energy constraint".into(),
                ));
            }
        }
        Ok(Self {
            kind,
            nbar,
            copies,
            constraint,
        })
    }

    /// Total signal energy of the strategy.
    pub fn total_nbar(&self) -> f64 {
        match self.constraint {
            EnergyConstraint::Global { total_nbar } => total_nbar,
            EnergyConstraint::Local => match self.copies {
                Copies::Finite(m) => self.nbar * m as f64,
                // Unreachable by construction: broadband requires Global.
                Copies::Broadband => f64::INFINITY,
            },
        }
    }

    /// Error probability of the strategy on a channel of transmissivity
    /// `tau`: exact for the coherent transmitter, Chernoff bound for the
    /// entangled one.
    pub fn error_probability(&self, tau: f64) -> Result<f64, TransmitterError> {
        match (self.kind, self.copies) {
            (TransmitterKind::Coherent, _) => coherent_error(self.total_nbar(), tau),
            (TransmitterKind::Epr, Copies::Finite(m)) => epr_qcb(self.nbar, tau, m),
            (TransmitterKind::Epr, Copies::Broadband) => epr_qcb_broadband(self.total_nbar(), tau),
        }
    }
}

/// One point of the coherent-vs-entangled comparison at equal total
/// energy `m_copies * nbar`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComparisonPoint {
    pub nbar: f64,
    pub tau: f64,
    pub m_copies: u32,
    /// Exact coherent error probability.
    pub p_coh: f64,
    /// Chernoff bound for the entangled transmitter.
    pub p_quant_qcb: f64,
    /// `p_coh - p_quant_qcb`.
    pub delta: f64,
    /// `r_quant / r_coh`.
    pub rate_ratio: f64,
    pub r_coh: f64,
    pub r_quant: f64,
    /// Hoeffding-bound ratio at the requested constraint, when one was.
    pub qhb_ratio: Option<QhbRatio>,
}

/// Evaluates the full comparison at one `(nbar, tau, M)` point;
/// `r` optionally adds the asymmetric-testing ratio.
pub fn comparison_point(
    nbar: f64,
    tau: f64,
    m_copies: u32,
    r: Option<f64>,
) -> Result<ComparisonPoint, TransmitterError> {
    if !(nbar.is_finite() && nbar > 0.0) {
        return Err(TransmitterError::Domain {
            name: "nbar",
            value: nbar,
            domain: "(0, inf)",
        });
    }
    check_tau(tau)?;
    check_copies(m_copies)?;
    let p_coh = coherent_error(nbar * m_copies as f64, tau)?;
    let p_quant_qcb = epr_qcb(nbar, tau, m_copies)?;
    Ok(ComparisonPoint {
        nbar,
        tau,
        m_copies,
        p_coh,
        p_quant_qcb,
        delta: p_coh - p_quant_qcb,
        rate_ratio: rate_ratio(nbar, tau)?,
        r_coh: r_coh_threshold(nbar, tau)?,
        r_quant: r_quant_threshold(nbar, tau)?,
        qhb_ratio: match r {
            Some(r) => Some(qhb_ratio(nbar, tau, r)?),
            None => None,
        },
    })
}
