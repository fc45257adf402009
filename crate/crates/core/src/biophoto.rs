//! Absorbance-based detection models: bacterial growth curves,
//! photo-degradation of the sample under illumination, and readout of a
//! photo-degradable optical memory.
//!
//! A sample of concentration `c` transmits `tau = 10^(-eps_l c)`
//! (Beer-Lambert). Growth follows the saturating exponential
//! `c(t) = c0 (1 - exp(-g t))`; under illumination by `nbar_total`
//! photons per unit time the concentration additionally decays by
//! `exp(-gamma nbar_total t)`. Detection error curves are obtained by
//! feeding `tau(t)` to a transmitter's error probability.
//!
//! Exposure bookkeeping: the degradation factor uses the cumulative dose
//! `nbar_total * t` while each readout is evaluated as a single
//! one-time-unit interrogation at energy `nbar_total`; no further
//! integration over the exposure history is performed.
//!
//! Memory readout instead maps the read energy itself to transmissivity,
//! `tau(N) = 1 - theta1 exp(-theta2 N)`: brighter reads bleach the cell
//! toward transparency, eroding the very contrast being read. The
//! retrieved information per cell is `1 - H2(p_error)` bits.

use crate::transmitters::{TransmitterConfig, TransmitterError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BiophotoError {
    #[error(transparent)]
    Transmitter(#[from] TransmitterError),
    #[error("parameter {name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("time grid is empty")]
    EmptyGrid,
    #[error("transmitter carries total energy {config} but {given} was requested")]
    EnergyMismatch { config: f64, given: f64 },
}

fn check_nonneg(name: &'static str, v: f64) -> Result<(), BiophotoError> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(BiophotoError::Domain {
            name,
            value: v,
            domain: "[0, inf)",
        });
    }
    Ok(())
}

/// Growth and degradation parameters of the absorbing sample.
///
/// `c0` is the asymptotic concentration in units where `epsilon_l = 1`
/// makes `tau = 10^(-c)`; `g` the growth rate; `gamma` the degradability
/// per photon per unit time; `epsilon_l` the Beer-Lambert product of
/// molar absorptivity and path length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthParams {
    pub c0: f64,
    pub g: f64,
    pub gamma: f64,
    pub epsilon_l: f64,
}

impl GrowthParams {
    /// Parameters with the `epsilon_l = 1` convention.
    pub fn new(c0: f64, g: f64, gamma: f64) -> Result<Self, BiophotoError> {
        Self::with_epsilon_l(c0, g, gamma, 1.0)
    }

    pub fn with_epsilon_l(
        c0: f64,
        g: f64,
        gamma: f64,
        epsilon_l: f64,
    ) -> Result<Self, BiophotoError> {
        check_nonneg("c0", c0)?;
        check_nonneg("g", g)?;
        check_nonneg("gamma", gamma)?;
        if !(epsilon_l.is_finite() && epsilon_l > 0.0) {
            return Err(BiophotoError::Domain {
                name: "epsilon_l",
                value: epsilon_l,
                domain: "(0, inf)",
            });
        }
        Ok(Self {
            c0,
            g,
            gamma,
            epsilon_l,
        })
    }
}

/// Photo-bleaching response of a memory cell: absorbance `theta1` at zero
/// read energy, decaying at rate `theta2` per photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationParams {
    pub theta1: f64,
    pub theta2: f64,
}

impl SaturationParams {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self, BiophotoError> {
        if !(theta1.is_finite() && 0.0 < theta1 && theta1 <= 1.0) {
            return Err(BiophotoError::Domain {
                name: "theta1",
                value: theta1,
                domain: "(0, 1]",
            });
        }
        if !(theta2.is_finite() && theta2 > 0.0) {
            return Err(BiophotoError::Domain {
                name: "theta2",
                value: theta2,
                domain: "(0, inf)",
            });
        }
        Ok(Self { theta1, theta2 })
    }
}

/// Saturating exponential growth `c0 (1 - exp(-g t))`.
pub fn concentration_growth(t: f64, p: &GrowthParams) -> Result<f64, BiophotoError> {
    check_nonneg("t", t)?;
    Ok(p.c0 * -(-p.g * t).exp_m1())
}

/// Growth suppressed by illumination damage:
/// `c0 (1 - exp(-g t)) exp(-gamma nbar_total t)`.
pub fn concentration_degraded(
    t: f64,
    total_nbar_per_unit_time: f64,
    p: &GrowthParams,
) -> Result<f64, BiophotoError> {
    check_nonneg("total_nbar_per_unit_time", total_nbar_per_unit_time)?;
    Ok(concentration_growth(t, p)? * (-p.gamma * total_nbar_per_unit_time * t).exp())
}

/// Beer-Lambert transmissivity `10^(-epsilon_l c)`.
pub fn beer_lambert(c: f64, epsilon_l: f64) -> Result<f64, BiophotoError> {
    check_nonneg("c", c)?;
    if !(epsilon_l.is_finite() && epsilon_l > 0.0) {
        return Err(BiophotoError::Domain {
            name: "epsilon_l",
            value: epsilon_l,
            domain: "(0, inf)",
        });
    }
    Ok(10.0_f64.powf(-epsilon_l * c))
}

fn check_energy(transmitter: &TransmitterConfig, total_nbar: f64) -> Result<(), BiophotoError> {
    let config = transmitter.total_nbar();
    if (config - total_nbar).abs() > 1e-12 * total_nbar.abs().max(1.0) {
        return Err(BiophotoError::EnergyMismatch {
            config,
            given: total_nbar,
        });
    }
    Ok(())
}

/// Detection error probability along a time grid: at each `t` the sample
/// transmissivity is `tau(t) = 10^(-epsilon_l c(t))` with `c(t)` the
/// grown (and, when `degraded`, illumination-damaged) concentration, and
/// the transmitter's error probability is evaluated there.
///
/// `total_nbar` drives the degradation physics and must match the
/// transmitter's own energy budget.
pub fn error_vs_time(
    t_grid: &[f64],
    total_nbar: f64,
    transmitter: &TransmitterConfig,
    p: &GrowthParams,
    degraded: bool,
) -> Result<Vec<(f64, f64)>, BiophotoError> {
    if t_grid.is_empty() {
        return Err(BiophotoError::EmptyGrid);
    }
    check_nonneg("total_nbar", total_nbar)?;
    check_energy(transmitter, total_nbar)?;
    t_grid
        .iter()
        .map(|&t| {
            let c = if degraded {
                concentration_degraded(t, total_nbar, p)?
            } else {
                concentration_growth(t, p)?
            };
            let tau = beer_lambert(c, p.epsilon_l)?;
            Ok((t, transmitter.error_probability(tau)?))
        })
        .collect()
}

/// Transmissivity of a memory cell read at energy `total_nbar`:
/// `1 - theta1 exp(-theta2 total_nbar)`.
pub fn memory_transmissivity(total_nbar: f64, sp: &SaturationParams) -> Result<f64, BiophotoError> {
    check_nonneg("total_nbar", total_nbar)?;
    Ok(1.0 - sp.theta1 * (-sp.theta2 * total_nbar).exp())
}

/// Information retrieved per binary cell at error probability `p_error`:
/// `1 - H2(p_error)` bits, with the `0 log 0 := 0` convention.
pub fn info_per_cell(p_error: f64) -> Result<f64, BiophotoError> {
    if !(p_error.is_finite() && (0.0..=1.0).contains(&p_error)) {
        return Err(BiophotoError::Domain {
            name: "p_error",
            value: p_error,
            domain: "[0, 1]",
        });
    }
    let plogp = |q: f64| if q == 0.0 { 0.0 } else { q * q.log2() };
    Ok((1.0 + plogp(p_error) + plogp(1.0 - p_error)).clamp(0.0, 1.0))
}

/// Bits per cell retrieved by `transmitter` from a memory with bleaching
/// response `sp`, reading at energy `total_nbar`.
pub fn memory_readout(
    total_nbar: f64,
    sp: &SaturationParams,
    transmitter: &TransmitterConfig,
) -> Result<f64, BiophotoError> {
    check_energy(transmitter, total_nbar)?;
    let tau = memory_transmissivity(total_nbar, sp)?;
    info_per_cell(transmitter.error_probability(tau)?)
}
