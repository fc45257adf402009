//! Symmetric and asymmetric hypothesis-testing bounds for Gaussian states.
//!
//! Everything here is driven by two scalar families,
//!
//! ```text
//! G_s(x) = 2^s / ((x+1)^s - (x-1)^s)
//! L_s(x) = ((x+1)^s + (x-1)^s) / ((x+1)^s - (x-1)^s)
//! ```
//!
//! evaluated on symplectic eigenvalues, and by the pure-vs-mixed Gaussian
//! fidelity. From those it assembles the s-overlap
//! `C_s = Tr(rho0^s rho1^(1-s))`, the quantum Chernoff and Bhattacharyya
//! bounds, the fidelity lower bound, the exact pure-pure Helstrom
//! probability, and the quantum Hoeffding bound for asymmetric testing.
//!
//! Natural logarithms throughout; error exponents are per copy.

use crate::gaussian::{
    normal_form_decompose, GaussianError, GaussianState, NormalFormCM, SymplecticDecomposition,
};
use crate::golden::{golden_max, golden_min};
use nalgebra::{Matrix4, Vector4};
use serde::Serialize;
use thiserror::Error;

/// States whose symplectic eigenvalues sit within this distance of 1 are
/// treated as pure.
pub const PURITY_TOL: f64 = 1e-6;
/// Grid resolution for the 1-D optimizations over the overlap order `s`.
const S_GRID_POINTS: usize = 200;
/// Optimization window for `s`; the `s -> 0` limit is handled separately.
const S_GRID_LO: f64 = 1e-4;
const S_GRID_HI: f64 = 1.0 - 1e-4;
/// Golden-section refinement tolerance in `s`.
const S_REFINE_TOL: f64 = 1e-9;
/// Where the `s -> 0` endpoint is evaluated when no exact limit is known.
const S_ENDPOINT: f64 = 1e-6;
/// Symplectic eigenvalues may undershoot 1 by this much (roundoff) and are
/// snapped to exactly 1 before entering `G_s` / `L_s`.
const NU_SNAP: f64 = 1e-9;
/// Slack allowed when checking the analytic bound ordering chain.
const ORDERING_SLACK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error("parameter {name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("state must be pure here, but a symplectic eigenvalue is {nu}")]
    NotPure { nu: f64 },
    #[error("states have different mode counts: {0} vs {1}")]
    ModeMismatch(usize, usize),
    #[error("single-mode overlap requires isotropic CMs (deviation {0:.3e})")]
    NotIsotropic(f64),
    #[error("covariance combination is numerically singular (det = {det:.3e})")]
    Singular { det: f64 },
    #[error("bound ordering violated: {0}")]
    Ordering(String),
}

fn check_prob(name: &'static str, v: f64) -> Result<(), BoundsError> {
    if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
        return Err(BoundsError::Domain {
            name,
            value: v,
            domain: "[0, 1]",
        });
    }
    Ok(())
}

/// `G_s(x)`; returns exactly 1 at `x = 1` (the limit value).
///
/// Evaluated as `(2/(x+1))^s / (1 - exp(-u))` with
/// `u = s ln(1 + 2/(x-1))`, which stays accurate across the whole domain:
/// the naive power difference cancels catastrophically near `x = 1`, and
/// a log difference would cancel at large `x`.
pub fn g_function(x: f64, s: f64) -> Result<f64, BoundsError> {
    check_gl_domain(x, s)?;
    if x == 1.0 {
        return Ok(1.0);
    }
    let u = s * (2.0 / (x - 1.0)).ln_1p();
    Ok((2.0 / (x + 1.0)).powf(s) / -(-u).exp_m1())
}

/// `L_s(x)`; returns exactly 1 at `x = 1` (the limit value).
///
/// Evaluated as `1 + 2 / expm1(u)`, exact for all `u > 0` and immune to
/// the overflow of the naive power quotient as `x -> 1`.
pub fn lambda_function(x: f64, s: f64) -> Result<f64, BoundsError> {
    check_gl_domain(x, s)?;
    if x == 1.0 {
        return Ok(1.0);
    }
    let u = s * (2.0 / (x - 1.0)).ln_1p();
    Ok(1.0 + 2.0 / u.exp_m1())
}

fn check_gl_domain(x: f64, s: f64) -> Result<(), BoundsError> {
    if !x.is_finite() || x < 1.0 {
        return Err(BoundsError::Domain {
            name: "x",
            value: x,
            domain: "[1, inf)",
        });
    }
    if !s.is_finite() || s <= 0.0 || s > 1.0 {
        return Err(BoundsError::Domain {
            name: "s",
            value: s,
            domain: "(0, 1]",
        });
    }
    Ok(())
}

/// Fidelity between a pure Gaussian state and an arbitrary Gaussian state
/// of the same mode count:
/// `F = 2^n / sqrt(det(V0 + V1)) * exp(-d^T (V0+V1)^{-1} d / 2)`.
pub fn gaussian_fidelity_pure_mixed(
    pure: &GaussianState,
    mixed: &GaussianState,
) -> Result<f64, BoundsError> {
    if pure.n_modes() != mixed.n_modes() {
        return Err(BoundsError::ModeMismatch(pure.n_modes(), mixed.n_modes()));
    }
    if let Some(nu) = pure
        .symplectic_eigenvalues()
        .into_iter()
        .find(|nu| (nu - 1.0).abs() > PURITY_TOL)
    {
        return Err(BoundsError::NotPure { nu });
    }
    let vsum = pure.cm() + mixed.cm();
    let det = vsum.clone().determinant();
    if !(det.is_finite() && det > 0.0) {
        return Err(BoundsError::Singular { det });
    }
    let delta = pure.mean() - mixed.mean();
    let quad = if delta.iter().all(|&x| x == 0.0) {
        0.0
    } else {
        let inv = vsum.try_inverse().ok_or(BoundsError::Singular { det })?;
        (delta.transpose() * inv * &delta)[(0, 0)]
    };
    let n = pure.n_modes() as i32;
    Ok((2.0_f64.powi(n) / det.sqrt() * (-0.5 * quad).exp()).min(1.0))
}

/// Snaps a symplectic eigenvalue within roundoff of 1 to exactly 1.
///
/// Both directions matter: `G_s` and `L_s` have square-root branch points at
/// x = 1, so an eigenvalue overshooting 1 by machine epsilon would otherwise
/// contaminate the result at O(sqrt(eps)), and L_s(1 + eps) -> 3 as s -> 0.
fn snap_nu(nu: f64) -> Result<f64, BoundsError> {
    if (nu - 1.0).abs() <= NU_SNAP {
        Ok(1.0)
    } else if nu > 1.0 {
        Ok(nu)
    } else {
        Err(BoundsError::Domain {
            name: "nu",
            value: nu,
            domain: "[1, inf)",
        })
    }
}

/// `S diag(L_u(nu_minus) I, L_u(nu_plus) I) S^T` for one decomposed state.
fn lambda_dressed(dec: &SymplecticDecomposition, u: f64) -> Result<Matrix4<f64>, BoundsError> {
    let lm = lambda_function(snap_nu(dec.nu_minus)?, u)?;
    let lp = lambda_function(snap_nu(dec.nu_plus)?, u)?;
    let w = Matrix4::from_diagonal(&Vector4::new(lm, lm, lp, lp));
    Ok(dec.s_matrix * w * dec.s_matrix.transpose())
}

struct Decomposed {
    dec: SymplecticDecomposition,
}

fn decompose_state(state: &GaussianState) -> Result<Decomposed, BoundsError> {
    let nf = NormalFormCM::from_cm(state.cm())?;
    let dec = normal_form_decompose(&nf)?;
    Ok(Decomposed { dec })
}

/// The s-overlap `C_s = Tr(rho0^s rho1^(1-s))` of two Gaussian states,
/// `s` strictly inside `(0, 1)`.
///
/// Two-mode states must have block normal-form CMs (all states this crate
/// builds do); single-mode states must have isotropic CMs. The overlap is
/// `C_s = Pi_s / sqrt(det Sigma_s) * exp(-d^T Sigma_s^{-1} d / 2)` with
/// `Pi_s = 2^n prod_k G_s(nu_k^0) G_{1-s}(nu_k^1)` and `Sigma_s` the sum of
/// the two `L`-dressed CMs.
pub fn s_overlap(
    state0: &GaussianState,
    state1: &GaussianState,
    s: f64,
) -> Result<f64, BoundsError> {
    if !(s.is_finite() && 0.0 < s && s < 1.0) {
        return Err(BoundsError::Domain {
            name: "s",
            value: s,
            domain: "(0, 1)",
        });
    }
    if state0.n_modes() != state1.n_modes() {
        return Err(BoundsError::ModeMismatch(
            state0.n_modes(),
            state1.n_modes(),
        ));
    }
    if state0.n_modes() == 1 {
        return s_overlap_single_mode(state0, state1, s);
    }
    let d0 = decompose_state(state0)?;
    let d1 = decompose_state(state1)?;
    let pi_s = 4.0
        * g_function(snap_nu(d0.dec.nu_minus)?, s)?
        * g_function(snap_nu(d0.dec.nu_plus)?, s)?
        * g_function(snap_nu(d1.dec.nu_minus)?, 1.0 - s)?
        * g_function(snap_nu(d1.dec.nu_plus)?, 1.0 - s)?;
    let sigma = lambda_dressed(&d0.dec, s)? + lambda_dressed(&d1.dec, 1.0 - s)?;
    let det = sigma.determinant();
    if !(det.is_finite() && det > 0.0) {
        return Err(BoundsError::Singular { det });
    }
    let delta = state0.mean() - state1.mean();
    let quad = if delta.iter().all(|&x| x == 0.0) {
        0.0
    } else {
        let inv = sigma.try_inverse().ok_or(BoundsError::Singular { det })?;
        let dv = Vector4::new(delta[0], delta[1], delta[2], delta[3]);
        (dv.transpose() * inv * dv)[(0, 0)]
    };
    Ok(pi_s / det.sqrt() * (-0.5 * quad).exp())
}

fn s_overlap_single_mode(
    state0: &GaussianState,
    state1: &GaussianState,
    s: f64,
) -> Result<f64, BoundsError> {
    let iso = |st: &GaussianState| -> Result<f64, BoundsError> {
        let cm = st.cm();
        let dev = cm[(0, 1)]
            .abs()
            .max(cm[(1, 0)].abs())
            .max((cm[(0, 0)] - cm[(1, 1)]).abs());
        if dev > 1e-10 {
            return Err(BoundsError::NotIsotropic(dev));
        }
        snap_nu(0.5 * (cm[(0, 0)] + cm[(1, 1)]))
    };
    let nu0 = iso(state0)?;
    let nu1 = iso(state1)?;
    let pi_s = 2.0 * g_function(nu0, s)? * g_function(nu1, 1.0 - s)?;
    let sigma = lambda_function(nu0, s)? + lambda_function(nu1, 1.0 - s)?;
    let delta = state0.mean() - state1.mean();
    let quad = delta.norm_squared() / sigma;
    Ok(pi_s / sigma * (-0.5 * quad).exp())
}

/// True when every symplectic eigenvalue of `state` is within
/// [`PURITY_TOL`] of 1.
fn pure_enough(state: &GaussianState) -> bool {
    state.is_pure(PURITY_TOL)
}

/// The `s -> 0` limit of `C_s`: the fidelity when `state0` is pure,
/// otherwise an evaluation just inside the interval.
fn c_at_zero(state0: &GaussianState, state1: &GaussianState) -> Result<f64, BoundsError> {
    if pure_enough(state0) {
        gaussian_fidelity_pure_mixed(state0, state1)
    } else {
        s_overlap(state0, state1, S_ENDPOINT)
    }
}

fn s_grid() -> Vec<f64> {
    (0..S_GRID_POINTS)
        .map(|i| S_GRID_LO + (S_GRID_HI - S_GRID_LO) * i as f64 / (S_GRID_POINTS - 1) as f64)
        .collect()
}

/// `inf_s C_s` over `s in (0, 1)` including the `s -> 0` endpoint:
/// coarse grid, golden-section refinement, then the endpoint limit.
pub(crate) fn chernoff_overlap(
    state0: &GaussianState,
    state1: &GaussianState,
) -> Result<f64, BoundsError> {
    // Propagate structural errors once; the scan below cannot fail after
    // this succeeds.
    s_overlap(state0, state1, 0.5)?;
    let f = |s: f64| s_overlap(state0, state1, s).expect("checked above");
    let xs = s_grid();
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for (i, &x) in xs.iter().enumerate() {
        let v = f(x);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = if best_i == 0 { xs[0] } else { xs[best_i - 1] };
    let hi = if best_i == S_GRID_POINTS - 1 {
        xs[S_GRID_POINTS - 1]
    } else {
        xs[best_i + 1]
    };
    let (_, refined) = golden_min(f, lo, hi, S_REFINE_TOL);
    Ok(refined.min(best).min(c_at_zero(state0, state1)?))
}

/// Quantum Chernoff bound `(1/2) (inf_s C_s)^M` on the `M`-copy error
/// probability. For a pure `state0` the infimum equals the fidelity, and
/// the numerical optimum lands on it exactly through the endpoint term.
pub fn qcb(
    state0: &GaussianState,
    state1: &GaussianState,
    m_copies: u32,
) -> Result<f64, BoundsError> {
    check_copies(m_copies)?;
    let c = chernoff_overlap(state0, state1)?;
    Ok(0.5 * c.powi(m_copies as i32))
}

/// Quantum Bhattacharyya bound `(1/2) C_{1/2}^M`.
pub fn qbb(
    state0: &GaussianState,
    state1: &GaussianState,
    m_copies: u32,
) -> Result<f64, BoundsError> {
    check_copies(m_copies)?;
    let c = s_overlap(state0, state1, 0.5)?;
    Ok(0.5 * c.powi(m_copies as i32))
}

fn check_copies(m: u32) -> Result<(), BoundsError> {
    if m == 0 {
        return Err(BoundsError::Domain {
            name: "m_copies",
            value: 0.0,
            domain: "[1, inf)",
        });
    }
    Ok(())
}

/// Fidelity lower bound `(1 - sqrt(1 - F^M)) / 2` on the `M`-copy error
/// probability.
pub fn fidelity_lower_bound(fidelity: f64, m_copies: u32) -> Result<f64, BoundsError> {
    check_copies(m_copies)?;
    if !(fidelity.is_finite() && 0.0 < fidelity && fidelity <= 1.0) {
        return Err(BoundsError::Domain {
            name: "fidelity",
            value: fidelity,
            domain: "(0, 1]",
        });
    }
    Ok(0.5 * (1.0 - (1.0 - fidelity.powi(m_copies as i32)).sqrt()))
}

/// Exact minimum error probability for two pure states of fidelity `F`,
/// `(1 - sqrt(1 - F^M)) / 2`; coincides with [`fidelity_lower_bound`],
/// which is tight in the pure-pure case.
pub fn pure_pure_helstrom(fidelity: f64, m_copies: u32) -> Result<f64, BoundsError> {
    check_copies(m_copies)?;
    check_prob("fidelity", fidelity)?;
    Ok(0.5 * (1.0 - (1.0 - fidelity.powi(m_copies as i32)).sqrt()))
}

/// Classification of a Hoeffding-bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HoeffdingClass {
    /// The supremum was located; `h_value` is it.
    Finite,
    /// The objective diverges as `s -> 1`; `h_value` is infinite.
    Infinite,
    /// Still increasing at the edge of the search window without tripping
    /// the divergence cap: `h_value` is a certified lower estimate only.
    Boundary,
}

/// Result of a Hoeffding-bound evaluation at false-positive exponent
/// constraint `r`: the best false-negative exponent `h_value`, per copy.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HoeffdingResult {
    pub r: f64,
    /// `f64::INFINITY` when `classification` is `Infinite`.
    pub h_value: f64,
    /// Maximizing `s`, when one was located.
    pub s_star: Option<f64>,
    pub classification: HoeffdingClass,
}

/// Divergence policy for the Hoeffding supremum over `s in [0, 1)`.
///
/// The objective can genuinely diverge as `s -> 1`; a supremum above
/// `sup_cap`, or growth at the window edge `1 - edge_offset` with value
/// already above `edge_min`, is reported as infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceCap {
    pub sup_cap: f64,
    pub edge_offset: f64,
    pub edge_min: f64,
}

impl Default for DivergenceCap {
    fn default() -> Self {
        Self {
            sup_cap: 1e4,
            edge_offset: 1e-6,
            edge_min: 50.0,
        }
    }
}

/// Quantum Hoeffding bound `H(r) = sup_{0 <= s < 1} (-r s - ln C_s)/(1-s)`
/// with the default divergence policy.
pub fn qhb_numeric(
    state0: &GaussianState,
    state1: &GaussianState,
    r: f64,
) -> Result<HoeffdingResult, BoundsError> {
    qhb_numeric_with_cap(state0, state1, r, DivergenceCap::default())
}

/// [`qhb_numeric`] with an explicit divergence policy.
pub fn qhb_numeric_with_cap(
    state0: &GaussianState,
    state1: &GaussianState,
    r: f64,
    cap: DivergenceCap,
) -> Result<HoeffdingResult, BoundsError> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(BoundsError::Domain {
            name: "r",
            value: r,
            domain: "[0, inf)",
        });
    }
    s_overlap(state0, state1, 0.5)?;
    let p0 = -c_at_zero(state0, state1)?.ln();
    let p = |s: f64| {
        if s <= 0.0 {
            p0
        } else {
            let c = s_overlap(state0, state1, s).expect("checked above");
            (-r * s - c.ln()) / (1.0 - s)
        }
    };

    // Grid over s, with the exact s = 0 limit as the first node.
    let mut xs = vec![0.0];
    xs.extend(s_grid());
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for (i, &x) in xs.iter().enumerate() {
        let v = p(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let edge = 1.0 - cap.edge_offset;
    let lo = if best_i == 0 { 0.0 } else { xs[best_i - 1] };
    let hi = if best_i == xs.len() - 1 {
        edge
    } else {
        xs[best_i + 1]
    };
    let (s_ref, p_ref) = golden_max(p, lo, hi, S_REFINE_TOL);
    let (s_star, h) = if p_ref > best {
        (s_ref, p_ref)
    } else {
        (xs[best_i], best)
    };

    if h > cap.sup_cap {
        return Ok(HoeffdingResult {
            r,
            h_value: f64::INFINITY,
            s_star: None,
            classification: HoeffdingClass::Infinite,
        });
    }
    let p_edge = p(edge);
    let p_back = p(edge - 1e-5);
    let increasing = p_edge > p_back + 1e-9 * p_edge.abs().max(1.0);
    if increasing {
        if p_edge > cap.edge_min {
            return Ok(HoeffdingResult {
                r,
                h_value: f64::INFINITY,
                s_star: None,
                classification: HoeffdingClass::Infinite,
            });
        }
        return Ok(HoeffdingResult {
            r,
            h_value: h.max(p_edge),
            s_star: None,
            classification: HoeffdingClass::Boundary,
        });
    }
    Ok(HoeffdingResult {
        r,
        h_value: h.max(0.0),
        s_star: Some(s_star),
        classification: HoeffdingClass::Finite,
    })
}

/// Exact Hoeffding bound when the reference state is pure and the pair's
/// overlap is constant in `s`: `H(r) = -ln F` for `r >= -ln F`, infinite
/// below that threshold.
pub fn hoeffding_pure_piecewise(fidelity: f64, r: f64) -> Result<HoeffdingResult, BoundsError> {
    if !(fidelity.is_finite() && 0.0 < fidelity && fidelity <= 1.0) {
        return Err(BoundsError::Domain {
            name: "fidelity",
            value: fidelity,
            domain: "(0, 1]",
        });
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(BoundsError::Domain {
            name: "r",
            value: r,
            domain: "[0, inf)",
        });
    }
    let threshold = -fidelity.ln();
    if r >= threshold {
        Ok(HoeffdingResult {
            r,
            h_value: threshold,
            s_star: None,
            classification: HoeffdingClass::Finite,
        })
    } else {
        Ok(HoeffdingResult {
            r,
            h_value: f64::INFINITY,
            s_star: None,
            classification: HoeffdingClass::Infinite,
        })
    }
}

/// Bayes cost `C10 p0 P(decide 1 | truth 0) + C01 p1 P(decide 0 | truth 1)`.
pub fn bayes_cost(
    c01: f64,
    c10: f64,
    p0: f64,
    p1: f64,
    p_fp: f64,
    p_fn: f64,
) -> Result<f64, BoundsError> {
    for (name, v) in [("c01", c01), ("c10", c10)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(BoundsError::Domain {
                name,
                value: v,
                domain: "[0, inf)",
            });
        }
    }
    check_prob("p0", p0)?;
    check_prob("p1", p1)?;
    check_prob("p_fp", p_fp)?;
    check_prob("p_fn", p_fn)?;
    if (p0 + p1 - 1.0).abs() > 1e-12 {
        return Err(BoundsError::Domain {
            name: "p0 + p1",
            value: p0 + p1,
            domain: "{1}",
        });
    }
    Ok(c10 * p0 * p_fp + c01 * p1 * p_fn)
}

/// The computable bound chain for one discrimination instance:
/// `fidelity_lower <= (exact error) <= qcb <= qbb`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundSet {
    pub m_copies: u32,
    pub fidelity_lower: f64,
    pub qcb: f64,
    pub qbb: f64,
    /// Exact Helstrom probability: present when both states are pure
    /// (closed form) or when supplied by [`BoundSet::with_helstrom`].
    pub helstrom_exact: Option<f64>,
}

impl BoundSet {
    /// Computes the chain for a pure `state0` against `state1`.
    pub fn compute(
        state0: &GaussianState,
        state1: &GaussianState,
        m_copies: u32,
    ) -> Result<Self, BoundsError> {
        let fid = gaussian_fidelity_pure_mixed(state0, state1)?;
        let set = Self {
            m_copies,
            fidelity_lower: fidelity_lower_bound(fid, m_copies)?,
            qcb: qcb(state0, state1, m_copies)?,
            qbb: qbb(state0, state1, m_copies)?,
            helstrom_exact: if pure_enough(state1) {
                Some(pure_pure_helstrom(fid, m_copies)?)
            } else {
                None
            },
        };
        set.validate()?;
        Ok(set)
    }

    /// Attaches an externally computed exact error probability (e.g. from
    /// the Fock-space oracle), validating it against the chain.
    pub fn with_helstrom(mut self, p: f64) -> Result<Self, BoundsError> {
        check_prob("helstrom", p)?;
        self.helstrom_exact = Some(p);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), BoundsError> {
        let entries = [
            ("fidelity_lower", self.fidelity_lower),
            ("qcb", self.qcb),
            ("qbb", self.qbb),
        ];
        for (name, v) in entries {
            if !(v > 0.0 && v <= 0.5 + ORDERING_SLACK) {
                return Err(BoundsError::Ordering(format!(
                    "{name} = {v} outside (0, 1/2]"
                )));
            }
        }
        if self.fidelity_lower > self.qcb + ORDERING_SLACK {
            return Err(BoundsError::Ordering(format!(
                "fidelity_lower {} > qcb {}",
                self.fidelity_lower, self.qcb
            )));
        }
        if self.qcb > self.qbb + ORDERING_SLACK {
            return Err(BoundsError::Ordering(format!(
                "qcb {} > qbb {}",
                self.qcb, self.qbb
            )));
        }
        if let Some(h) = self.helstrom_exact {
            if self.fidelity_lower > h + ORDERING_SLACK || h > self.qcb + ORDERING_SLACK {
                return Err(BoundsError::Ordering(format!(
                    "helstrom {h} outside [{}, {}]",
                    self.fidelity_lower, self.qcb
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{
        apply_channel, coherent_state, loss_on_signal, lossy_channel, tmsv_state,
    };
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn coherent_pair(alpha: f64, tau: f64) -> (GaussianState, GaussianState) {
        let s0 = coherent_state(Complex64::new(alpha, 0.0)).unwrap();
        let s1 = apply_channel(&s0, &lossy_channel(tau).unwrap(), 0).unwrap();
        (s0, s1)
    }

    fn tmsv_pair(nbar: f64, tau: f64) -> (GaussianState, GaussianState) {
        let s0 = tmsv_state(nbar).unwrap();
        let s1 = loss_on_signal(&s0, tau).unwrap();
        (s0, s1)
    }

    #[test]
    fn g_and_lambda_limits() {
        for s in [0.1, 0.5, 1.0] {
            assert_eq!(g_function(1.0, s).unwrap(), 1.0);
            assert_eq!(lambda_function(1.0, s).unwrap(), 1.0);
        }
        for x in [1.0, 1.5, 3.0, 10.0, 1e6] {
            assert_abs_diff_eq!(g_function(x, 1.0).unwrap(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(lambda_function(x, 1.0).unwrap(), x, epsilon = 1e-9 * x);
        }
    }

    #[test]
    fn g_and_lambda_pinned_points() {
        // Half-order values at x = 3: sqrt(2)+1 and 3+2 sqrt(2).
        assert_abs_diff_eq!(
            g_function(3.0, 0.5).unwrap(),
            2.0_f64.sqrt() + 1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            lambda_function(3.0, 0.5).unwrap(),
            3.0 + 2.0 * 2.0_f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn g_and_lambda_match_naive_formulas() {
        // Away from x = 1 the textbook expressions are stable enough to
        // compare against directly.
        for &x in &[1.5f64, 2.0, 5.0, 40.0] {
            for &s in &[0.05f64, 0.3, 0.5, 0.77, 1.0] {
                let num = (x + 1.0).powf(s) - (x - 1.0).powf(s);
                let g_naive = 2.0_f64.powf(s) / num;
                let l_naive = ((x + 1.0).powf(s) + (x - 1.0).powf(s)) / num;
                assert_abs_diff_eq!(
                    g_function(x, s).unwrap(),
                    g_naive,
                    epsilon = 1e-11 * g_naive
                );
                assert_abs_diff_eq!(
                    lambda_function(x, s).unwrap(),
                    l_naive,
                    epsilon = 1e-11 * l_naive
                );
            }
        }
    }

    #[test]
    fn g_rejects_bad_domain() {
        assert!(g_function(0.5, 0.5).is_err());
        assert!(g_function(2.0, 0.0).is_err());
        assert!(g_function(2.0, 1.5).is_err());
        assert!(lambda_function(0.99, 0.5).is_err());
    }

    #[test]
    fn fidelity_identical_pure_is_one() {
        let s = tmsv_state(1.3).unwrap();
        assert_abs_diff_eq!(
            gaussian_fidelity_pure_mixed(&s, &s).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn fidelity_coherent_pair_closed_form() {
        let (s0, s1) = coherent_pair(1.0, 0.25);
        assert_abs_diff_eq!(
            gaussian_fidelity_pure_mixed(&s0, &s1).unwrap(),
            (-0.25_f64).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn fidelity_tmsv_pair_closed_form() {
        let (s0, s1) = tmsv_pair(1.0, 0.25);
        assert_abs_diff_eq!(
            gaussian_fidelity_pure_mixed(&s0, &s1).unwrap(),
            4.0 / 9.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn fidelity_rejects_mixed_first_argument() {
        let (s0, s1) = tmsv_pair(1.0, 0.25);
        assert!(matches!(
            gaussian_fidelity_pure_mixed(&s1, &s0),
            Err(BoundsError::NotPure { .. })
        ));
    }

    #[test]
    fn s_overlap_identical_states() {
        let (s0, _) = tmsv_pair(1.0, 0.25);
        for s in [0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(s_overlap(&s0, &s0, s).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn s_overlap_pure_pair_is_constant_fidelity() {
        let (s0, s1) = coherent_pair(1.0, 0.25);
        let f = (-0.25_f64).exp();
        for s in [0.3, 0.7] {
            assert_abs_diff_eq!(s_overlap(&s0, &s1, s).unwrap(), f, epsilon = 1e-12);
        }
    }

    #[test]
    fn s_overlap_tmsv_pinned_value() {
        // nbar = 1, tau = 0.25, s = 1/2: C = 2 sqrt(7) / 9.
        let (s0, s1) = tmsv_pair(1.0, 0.25);
        assert_abs_diff_eq!(
            s_overlap(&s0, &s1, 0.5).unwrap(),
            2.0 * 7.0_f64.sqrt() / 9.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn s_overlap_matches_sector_closed_form() {
        // For the lossy TMSV pair C_s = F * w0^{-s} exactly, with
        // w0 = 1/(1 + nbar (1 - tau)) and F = (1 + nbar(1 - sqrt(tau)))^-2.
        for &(nbar, tau) in &[(0.5, 0.25), (1.0, 0.5), (2.0, 0.9), (3.0, 0.1)] {
            let (s0, s1) = tmsv_pair(nbar, tau);
            let f = (1.0 + nbar * (1.0 - tau.sqrt())).powi(-2);
            let w0 = 1.0 / (1.0 + nbar * (1.0 - tau));
            for &s in &[0.1, 0.35, 0.5, 0.8, 0.95] {
                let expect = f * w0.powf(-s);
                let got = s_overlap(&s0, &s1, s).unwrap();
                assert_abs_diff_eq!(got, expect, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn s_overlap_range_is_unit_interval() {
        for &(nbar, tau) in &[(0.2, 0.0), (1.0, 0.25), (4.0, 0.7), (9.0, 0.99)] {
            let (s0, s1) = tmsv_pair(nbar, tau);
            for &s in &[0.05, 0.5, 0.95] {
                let c = s_overlap(&s0, &s1, s).unwrap();
                assert!(c > 0.0 && c <= 1.0 + 1e-12, "C_{s}({nbar},{tau}) = {c}");
            }
        }
    }

    #[test]
    fn s_overlap_near_zero_approaches_fidelity() {
        for &(nbar, tau) in &[(0.5, 0.25), (1.0, 0.5), (2.0, 0.9)] {
            let (s0, s1) = tmsv_pair(nbar, tau);
            let f = gaussian_fidelity_pure_mixed(&s0, &s1).unwrap();
            let c = s_overlap(&s0, &s1, 1e-4).unwrap();
            assert!((c - f).abs() < 1e-3, "nbar={nbar} tau={tau}");
        }
    }

    #[test]
    fn qcb_identical_states_is_half() {
        let s = tmsv_state(0.8).unwrap();
        let out = loss_on_signal(&s, 1.0).unwrap();
        assert_abs_diff_eq!(qcb(&s, &out, 3).unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn qcb_coherent_pair_closed_form() {
        let (s0, s1) = coherent_pair(1.0, 0.25);
        assert_abs_diff_eq!(
            qcb(&s0, &s1, 1).unwrap(),
            0.5 * (-0.25_f64).exp(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn qcb_tmsv_pure_shortcut_agreement() {
        // Numeric infimum (with the s -> 0 endpoint) equals the fidelity.
        let (s0, s1) = tmsv_pair(1.0, 0.25);
        assert_abs_diff_eq!(qcb(&s0, &s1, 1).unwrap(), 2.0 / 9.0, epsilon = 1e-9);
        let f = 4.0 / 9.0;
        assert_abs_diff_eq!(qcb(&s0, &s1, 2).unwrap(), 0.5 * f * f, epsilon = 1e-9);
    }

    #[test]
    fn qcb_strictly_decreasing_in_copies() {
        let (s0, s1) = tmsv_pair(0.7, 0.45);
        let mut prev = f64::INFINITY;
        for m in 1..=6 {
            let v = qcb(&s0, &s1, m).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn qbb_matches_half_order_overlap() {
        let (s0, s1) = tmsv_pair(1.0, 0.25);
        assert_abs_diff_eq!(
            qbb(&s0, &s1, 1).unwrap(),
            7.0_f64.sqrt() / 9.0,
            epsilon = 1e-12
        );
        // Pure-pure pairs: QBB = QCB since C_s is constant.
        let (c0, c1) = coherent_pair(1.0, 0.25);
        assert_abs_diff_eq!(
            qbb(&c0, &c1, 1).unwrap(),
            qcb(&c0, &c1, 1).unwrap(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn fidelity_lower_bound_pinned_values() {
        assert_abs_diff_eq!(fidelity_lower_bound(1.0, 1).unwrap(), 0.5);
        assert_abs_diff_eq!(
            fidelity_lower_bound((-0.25_f64).exp(), 1).unwrap(),
            0.26484089591906335,
            epsilon = 1e-15
        );
        // F = 4/9, M = 2: (1 - sqrt(65/81)) / 2.
        assert_abs_diff_eq!(
            fidelity_lower_bound(4.0 / 9.0, 2).unwrap(),
            0.5 * (1.0 - (65.0 / 81.0_f64).sqrt()),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            fidelity_lower_bound(4.0 / 9.0, 2).unwrap(),
            0.052096791761191696,
            epsilon = 1e-15
        );
        assert!(fidelity_lower_bound(0.0, 1).is_err());
        assert!(fidelity_lower_bound(1.1, 1).is_err());
    }

    #[test]
    fn pure_pure_helstrom_pinned_values() {
        assert_abs_diff_eq!(pure_pure_helstrom(0.0, 1).unwrap(), 0.0);
        assert_abs_diff_eq!(pure_pure_helstrom(1.0, 4).unwrap(), 0.5);
        assert_abs_diff_eq!(
            pure_pure_helstrom((-0.25_f64).exp(), 1).unwrap(),
            0.26484089591906335,
            epsilon = 1e-15
        );
    }

    #[test]
    fn qhb_identical_states_is_zero() {
        let s = tmsv_state(0.8).unwrap();
        let out = loss_on_signal(&s, 1.0).unwrap();
        let res = qhb_numeric(&s, &out, 1.0).unwrap();
        assert_eq!(res.classification, HoeffdingClass::Finite);
        assert!(res.h_value.abs() < 1e-9);
        assert_eq!(res.s_star, Some(0.0));
    }

    #[test]
    fn qhb_tmsv_plateau() {
        let (s0, s1) = tmsv_pair(1.0, 0.25);
        let res = qhb_numeric(&s0, &s1, 1.0).unwrap();
        assert_eq!(res.classification, HoeffdingClass::Finite);
        assert_abs_diff_eq!(res.h_value, 2.0 * 1.5_f64.ln(), epsilon = 1e-6);
    }

    #[test]
    fn qhb_tmsv_divergence_below_threshold() {
        // r = 0.25 sits below the divergence threshold
        // 2 ln(3/2) - ln(7/4) = ln(9/7) = 0.2513... for this pair.
        let (s0, s1) = tmsv_pair(1.0, 0.25);
        let res = qhb_numeric(&s0, &s1, 0.25).unwrap();
        assert_eq!(res.classification, HoeffdingClass::Infinite);
        assert!(res.h_value.is_infinite());
        assert!(res.s_star.is_none());
    }

    #[test]
    fn qhb_nonincreasing_in_r() {
        let (s0, s1) = tmsv_pair(1.0, 0.25);
        let mut prev = f64::INFINITY;
        for &r in &[0.3, 0.5, 0.8, 1.2, 2.0] {
            let res = qhb_numeric(&s0, &s1, r).unwrap();
            let h = res.h_value;
            assert!(h <= prev + 1e-9, "H({r}) = {h} > previous {prev}");
            if h.is_finite() {
                prev = h;
            }
        }
    }

    #[test]
    fn qhb_dominates_fidelity_exponent() {
        for &(nbar, tau) in &[(0.5, 0.25), (1.0, 0.5), (2.0, 0.9)] {
            let (s0, s1) = tmsv_pair(nbar, tau);
            let f = gaussian_fidelity_pure_mixed(&s0, &s1).unwrap();
            let threshold = -f.ln();
            for &r in &[1.0 * threshold, 1.5 * threshold, 3.0 * threshold] {
                let res = qhb_numeric(&s0, &s1, r).unwrap();
                assert!(res.h_value >= threshold - 1e-6);
                assert!(
                    (res.h_value - threshold).abs() <= 1e-6,
                    "plateau missed at nbar={nbar} tau={tau} r={r}: {}",
                    res.h_value
                );
            }
        }
    }

    #[test]
    fn piecewise_hoeffding_branches() {
        let f = (-0.25_f64).exp();
        let hi = hoeffding_pure_piecewise(f, 0.3).unwrap();
        assert_eq!(hi.classification, HoeffdingClass::Finite);
        assert_abs_diff_eq!(hi.h_value, 0.25, epsilon = 1e-15);

        let lo = hoeffding_pure_piecewise(f, 0.2).unwrap();
        assert_eq!(lo.classification, HoeffdingClass::Infinite);
        assert!(lo.h_value.is_infinite());

        let unit = hoeffding_pure_piecewise(1.0, 1.0).unwrap();
        assert_eq!(unit.classification, HoeffdingClass::Finite);
        assert_eq!(unit.h_value, 0.0);
    }

    #[test]
    fn bayes_cost_cases() {
        // Symmetric unit costs collapse to the mean error probability.
        let q = 0.17;
        assert_abs_diff_eq!(bayes_cost(1.0, 1.0, 0.5, 0.5, q, q).unwrap(), q);
        // Pure false-negative accounting.
        assert_abs_diff_eq!(bayes_cost(1.0, 0.0, 0.0, 1.0, 0.9, 0.3).unwrap(), 0.3);
        // Zero costs cost nothing.
        assert_eq!(bayes_cost(0.0, 0.0, 0.5, 0.5, 0.2, 0.4).unwrap(), 0.0);
        // Unnormalized priors are rejected.
        assert!(bayes_cost(1.0, 1.0, 0.6, 0.6, 0.1, 0.1).is_err());
    }

    #[test]
    fn bound_set_chain_holds() {
        for &(nbar, tau, m) in &[(0.5, 0.25, 1), (1.0, 0.25, 1), (1.0, 0.5, 3), (2.0, 0.9, 2)] {
            let (s0, s1) = tmsv_pair(nbar, tau);
            let set = BoundSet::compute(&s0, &s1, m).unwrap();
            assert!(set.fidelity_lower <= set.qcb + 1e-12);
            assert!(set.qcb <= set.qbb + 1e-12);
            assert!(set.helstrom_exact.is_none());
        }
        let (c0, c1) = coherent_pair(1.0, 0.25);
        let set = BoundSet::compute(&c0, &c1, 1).unwrap();
        let h = set.helstrom_exact.unwrap();
        assert!(set.fidelity_lower <= h + 1e-12 && h <= set.qcb + 1e-12);
    }

    #[test]
    fn bound_set_rejects_inconsistent_helstrom() {
        let (s0, s1) = tmsv_pair(1.0, 0.25);
        let set = BoundSet::compute(&s0, &s1, 1).unwrap();
        assert!(set.with_helstrom(0.4).is_err());
    }

    mod random_invariants {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn overlap_in_unit_interval(
                nbar in 0.05f64..6.0,
                tau in 0.0f64..0.999,
                s in 0.01f64..0.99,
            ) {
                let (s0, s1) = tmsv_pair(nbar, tau);
                let c = s_overlap(&s0, &s1, s).unwrap();
                prop_assert!(c > 0.0 && c <= 1.0 + 1e-12);
            }

            #[test]
            fn chain_ordering_random(
                nbar in 0.05f64..5.0,
                tau in 0.0f64..0.99,
                m in 1u32..5,
            ) {
                let (s0, s1) = tmsv_pair(nbar, tau);
                let set = BoundSet::compute(&s0, &s1, m).unwrap();
                prop_assert!(set.fidelity_lower <= set.qcb + 1e-12);
                prop_assert!(set.qcb <= set.qbb + 1e-12);
                prop_assert!(set.qbb <= 0.5 + 1e-12);
            }

            #[test]
            fn hoeffding_beats_fidelity_exponent(
                nbar in 0.1f64..4.0,
                tau in 0.05f64..0.95,
                scale in 1.0f64..4.0,
            ) {
                let (s0, s1) = tmsv_pair(nbar, tau);
                let f = gaussian_fidelity_pure_mixed(&s0, &s1).unwrap();
                let r = scale * -f.ln();
                let res = qhb_numeric(&s0, &s1, r).unwrap();
                prop_assert!(res.h_value >= -f.ln() - 1e-6);
            }
        }
    }
}
