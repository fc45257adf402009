//! Truncated Fock-space oracle: dense number-basis representations of the
//! same states and channels the Gaussian layer handles in closed form.
//!
//! Everything here is deliberately brute force. States are explicit
//! amplitude vectors below a photon-number cutoff, loss acts through its
//! Kraus decomposition, and overlaps, fidelities, and Helstrom
//! probabilities come from dense eigendecompositions. No result from the
//! Gaussian layer is reused, so agreement between the two routes checks
//! both implementations at once.
//!
//! Two-mode flat indexing: `flat = n_ref * cutoff + n_sig` (the signal
//! index varies fastest); mode 0 is the signal, mode 1 the reference.

use faer::{c64, Mat, Side};
use thiserror::Error;

/// Construction warns when the truncated state's missing norm exceeds this.
const TAIL_WARN_TOL: f64 = 1e-6;
/// Hermiticity tolerance for density matrices.
const HERMITICITY_TOL: f64 = 1e-12;
/// Floored eigenvalues larger than this in magnitude trigger a warning:
/// they are too large to be pure roundoff.
const FLOOR_WARN_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("parameter {name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("cutoff must be at least 2, got {0}")]
    BadCutoff(usize),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operands have different shapes: {0} vs {1}")]
    ShapeMismatch(usize, usize),
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

fn check_cutoff(cutoff: usize) -> Result<(), FockError> {
    if cutoff < 2 {
        return Err(FockError::BadCutoff(cutoff));
    }
    Ok(())
}

/// A pure state as an explicit amplitude vector over the truncated
/// number basis. Deliberately not renormalized: the missing tail mass is
/// part of what the oracle measures.
#[derive(Debug, Clone)]
pub struct FockVector {
    n_modes: usize,
    cutoff: usize,
    amp: Vec<c64>,
}

/// Two-mode squeezed vacuum truncated at `cutoff` photons per mode:
/// amplitudes `sqrt(1 - lambda^2) lambda^n` on `|n, n>` with
/// `lambda^2 = nbar / (nbar + 1)`.
pub fn tmsv_fock(nbar: f64, cutoff: usize) -> Result<FockVector, FockError> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(FockError::Domain {
            name: "nbar",
            value: nbar,
            domain: "[0, inf)",
        });
    }
    check_cutoff(cutoff)?;
    let lam2 = nbar / (nbar + 1.0);
    let tail = lam2.powi(cutoff as i32);
    if tail >= TAIL_WARN_TOL {
        log::warn!(
            "truncated squeezed vacuum at nbar = {nbar} drops {tail:.3e} probability \
             below cutoff {cutoff}"
        );
    }
    let lam = lam2.sqrt();
    let head = (1.0 - lam2).sqrt();
    let mut amp = vec![c64::new(0.0, 0.0); cutoff * cutoff];
    for n in 0..cutoff {
        amp[n * cutoff + n] = c64::new(head * lam.powi(n as i32), 0.0);
    }
    Ok(FockVector {
        n_modes: 2,
        cutoff,
        amp,
    })
}

/// Coherent state `|alpha>` truncated at `cutoff` photons: amplitudes
/// `exp(-|alpha|^2 / 2) alpha^n / sqrt(n!)`.
pub fn coherent_fock(alpha: c64, cutoff: usize) -> Result<FockVector, FockError> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(FockError::Domain {
            name: "alpha",
            value: f64::NAN,
            domain: "finite",
        });
    }
    check_cutoff(cutoff)?;
    let mut amp = vec![c64::new(0.0, 0.0); cutoff];
    let mut term = c64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for (n, a) in amp.iter_mut().enumerate() {
        if n > 0 {
            term = term * alpha / c64::new((n as f64).sqrt(), 0.0);
        }
        *a = term;
    }
    let tail = 1.0 - amp.iter().map(|a| a.norm_sqr()).sum::<f64>();
    if tail >= TAIL_WARN_TOL {
        log::warn!(
            "truncated coherent state |alpha|^2 = {:.3} drops {tail:.3e} probability \
             below cutoff {cutoff}",
            alpha.norm_sqr()
        );
    }
    Ok(FockVector {
        n_modes: 1,
        cutoff,
        amp,
    })
}

impl FockVector {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[c64] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// The projector onto this (unnormalized) vector.
    pub fn to_density(&self) -> TruncatedDensityMatrix {
        let dim = self.amp.len();
        let mut m = Mat::<c64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = self.amp[i] * self.amp[j].conj();
            }
        }
        TruncatedDensityMatrix {
            n_modes: self.n_modes,
            cutoff: self.cutoff,
            matrix: m,
        }
    }
}

/// A density matrix over the truncated number basis.
#[derive(Debug, Clone)]
pub struct TruncatedDensityMatrix {
    n_modes: usize,
    cutoff: usize,
    matrix: Mat<c64>,
}

impl TruncatedDensityMatrix {
    /// Wraps an explicit matrix, enforcing shape and hermiticity.
    pub fn new(matrix: Mat<c64>, cutoff: usize, n_modes: usize) -> Result<Self, FockError> {
        check_cutoff(cutoff)?;
        let dim = cutoff.pow(n_modes as u32);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(FockError::ShapeMismatch(matrix.nrows(), dim));
        }
        let mut dev = 0.0f64;
        for i in 0..dim {
            for j in 0..=i {
                let d = matrix[(i, j)] - matrix[(j, i)].conj();
                dev = dev.max(d.norm());
            }
        }
        if dev > HERMITICITY_TOL {
            return Err(FockError::NotHermitian(dev));
        }
        let out = Self {
            n_modes,
            cutoff,
            matrix,
        };
        let tail = 1.0 - out.trace();
        if tail >= TAIL_WARN_TOL {
            log::warn!("density matrix is missing {tail:.3e} trace below the cutoff");
        }
        Ok(out)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// Trace lost to the cutoff (1 - trace).
    pub fn tail_mass(&self) -> f64 {
        1.0 - self.trace()
    }
}

/// `sqrt(binom(n, k) (1-tau)^k tau^(n-k))` for all `n, k < cutoff`,
/// the photon-loss Kraus amplitudes. `0^0 = 1` throughout, so the
/// table is exact at `tau = 0` and `tau = 1`.
fn kraus_amplitudes(cutoff: usize, tau: f64) -> Vec<Vec<f64>> {
    // Pascal's triangle in f64; exact for every n < 2^53 threshold here.
    let mut binom = vec![vec![0.0f64; cutoff]; cutoff];
    for n in 0..cutoff {
        binom[n][0] = 1.0;
        for k in 1..=n {
            binom[n][k] = binom[n - 1][k - 1] + if k < n { binom[n - 1][k] } else { 0.0 };
        }
    }
    let mut a = vec![vec![0.0f64; cutoff]; cutoff];
    for n in 0..cutoff {
        for k in 0..=n {
            a[n][k] = (binom[n][k] * (1.0 - tau).powi(k as i32) * tau.powi((n - k) as i32)).sqrt();
        }
    }
    a
}

/// Maximum deviation of `sum_k A_k^dag A_k` from the identity on the
/// truncated signal space. Exactly zero up to roundoff for every `tau`:
/// the loss channel never leaks probability upward in photon number.
pub fn loss_completeness_deviation(cutoff: usize, tau: f64) -> Result<f64, FockError> {
    check_tau(tau)?;
    check_cutoff(cutoff)?;
    let a = kraus_amplitudes(cutoff, tau);
    let mut dev = 0.0f64;
    for (n, row) in a.iter().enumerate() {
        let sum: f64 = row[..=n].iter().map(|ank| ank * ank).sum();
        dev = dev.max((sum - 1.0).abs());
    }
    Ok(dev)
}

fn check_tau(tau: f64) -> Result<(), FockError> {
    if !(tau.is_finite() && (0.0..=1.0).contains(&tau)) {
        return Err(FockError::Domain {
            name: "tau",
            value: tau,
            domain: "[0, 1]",
        });
    }
    Ok(())
}

/// Applies photon loss of transmissivity `tau` to the signal mode through
/// the full Kraus sum `rho -> sum_k A_k rho A_k^dag`.
// Index loops mirror the Kraus stencil (k photons lost, signal n -> n-k).
#[allow(clippy::needless_range_loop)]
pub fn apply_loss_kraus(
    rho: &TruncatedDensityMatrix,
    tau: f64,
) -> Result<TruncatedDensityMatrix, FockError> {
    check_tau(tau)?;
    let kcut = rho.cutoff;
    let rdim = rho.dim() / kcut;
    let a = kraus_amplitudes(kcut, tau);
    let mut out = Mat::<c64>::zeros(rho.dim(), rho.dim());
    for k in 0..kcut {
        for ir in 0..rdim {
            for is in k..kcut {
                let row_in = ir * kcut + is;
                let row_out = ir * kcut + (is - k);
                let ai = a[is][k];
                if ai == 0.0 {
                    continue;
                }
                for jr in 0..rdim {
                    for js in k..kcut {
                        let aj = a[js][k];
                        if aj == 0.0 {
                            continue;
                        }
                        let col_in = jr * kcut + js;
                        let col_out = jr * kcut + (js - k);
                        out[(row_out, col_out)] +=
                            rho.matrix[(row_in, col_in)] * c64::new(ai * aj, 0.0);
                    }
                }
            }
        }
    }
    Ok(TruncatedDensityMatrix {
        n_modes: rho.n_modes,
        cutoff: kcut,
        matrix: out,
    })
}

/// Mean photon number of one mode, `Tr(rho n_mode)`.
pub fn mean_photon(rho: &TruncatedDensityMatrix, mode: usize) -> Result<f64, FockError> {
    if mode >= rho.n_modes {
        return Err(FockError::Domain {
            name: "mode",
            value: mode as f64,
            domain: "existing modes",
        });
    }
    let kcut = rho.cutoff;
    Ok((0..rho.dim())
        .map(|flat| {
            let n = if mode == 0 { flat % kcut } else { flat / kcut };
            n as f64 * rho.matrix[(flat, flat)].re
        })
        .sum())
}

/// Hermitian eigendecomposition computed on `m + cI` with the shift
/// subtracted back out. Rank-deficient inputs (a pure-state projector is
/// rank 1) tridiagonalize to a mostly zero matrix on which the QR sweep's
/// relative deflation test can stall; the shift keeps every diagonal entry
/// at scale `c` without moving the eigenvectors.
fn shifted_eigh(m: &Mat<c64>) -> Result<(Vec<f64>, Mat<c64>), FockError> {
    let dim = m.nrows();
    let c = 1.0 + (0..dim).fold(0.0f64, |acc, i| acc.max(m[(i, i)].norm()));
    let mut shifted = m.to_owned();
    for i in 0..dim {
        shifted[(i, i)] += c64::new(c, 0.0);
    }
    let evd = shifted
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| FockError::Eigen(format!("{e:?}")))?;
    let sv = evd.S().column_vector();
    let lam: Vec<f64> = (0..dim).map(|i| sv[i].re - c).collect();
    Ok((lam, evd.U().to_owned()))
}

/// Eigendecomposition with a spectral floor: eigenvalues below
/// `dim * eps * max|eig|` are exact zeros of the physical state buried in
/// roundoff, and raising such garbage to a fractional power would wreck
/// the overlap, so they are zeroed outright.
fn floored_eigh(m: &Mat<c64>) -> Result<(Vec<f64>, Mat<c64>), FockError> {
    let (mut lam, u) = shifted_eigh(m)?;
    let dim = m.nrows();
    let lmax = lam.iter().fold(0.0f64, |acc, &l| acc.max(l.abs()));
    let floor = dim as f64 * f64::EPSILON * lmax;
    for l in lam.iter_mut() {
        if *l < floor {
            if l.abs() > FLOOR_WARN_TOL {
                log::warn!("flooring eigenvalue {l:.3e} to zero (floor {floor:.3e})");
            }
            *l = 0.0;
        }
    }
    Ok((lam, u))
}

/// Precomputed spectral data for `Tr(rho0^s rho1^(1-s))` at many `s`:
/// both floored spectra (zeros dropped, since they contribute nothing to
/// any fractional power) plus the squared overlaps of the surviving
/// eigenvectors.
pub struct OverlapKernel {
    lam0: Vec<f64>,
    lam1: Vec<f64>,
    /// `|<u0_j | u1_k>|^2`, row-major `j * lam1.len() + k`, restricted to
    /// the eigenvectors with nonzero eigenvalue.
    w2: Vec<f64>,
}

/// Columns of `u` whose eigenvalue survived the floor, as a dense matrix.
fn nonzero_columns(lam: &[f64], u: &Mat<c64>) -> (Vec<f64>, Mat<c64>) {
    let keep: Vec<usize> = (0..lam.len()).filter(|&j| lam[j] != 0.0).collect();
    let kept_lam = keep.iter().map(|&j| lam[j]).collect();
    let sub = Mat::from_fn(u.nrows(), keep.len(), |i, jj| u[(i, keep[jj])]);
    (kept_lam, sub)
}

impl OverlapKernel {
    pub fn new(
        rho0: &TruncatedDensityMatrix,
        rho1: &TruncatedDensityMatrix,
    ) -> Result<Self, FockError> {
        if rho0.dim() != rho1.dim() {
            return Err(FockError::ShapeMismatch(rho0.dim(), rho1.dim()));
        }
        let (lam0, u0) = floored_eigh(&rho0.matrix)?;
        let (lam1, u1) = floored_eigh(&rho1.matrix)?;
        // A pure state keeps one column of 1600 here, which shrinks the
        // cross-basis product from cubic in the dimension to quadratic.
        let (lam0, u0) = nonzero_columns(&lam0, &u0);
        let (lam1, u1) = nonzero_columns(&lam1, &u1);
        let w = u0.adjoint() * &u1;
        let (r0, r1) = (lam0.len(), lam1.len());
        let mut w2 = vec![0.0f64; r0 * r1];
        for j in 0..r0 {
            for k in 0..r1 {
                w2[j * r1 + k] = w[(j, k)].norm_sqr();
            }
        }
        Ok(Self { lam0, lam1, w2 })
    }

    /// `sum_{j,k} lam0_j^s lam1_k^(1-s) |<u0_j|u1_k>|^2`.
    pub fn s_overlap_fock(&self, s: f64) -> Result<f64, FockError> {
        if !(s.is_finite() && 0.0 < s && s < 1.0) {
            return Err(FockError::Domain {
                name: "s",
                value: s,
                domain: "(0, 1)",
            });
        }
        let a0: Vec<f64> = self.lam0.iter().map(|&l| l.powf(s)).collect();
        let a1: Vec<f64> = self.lam1.iter().map(|&l| l.powf(1.0 - s)).collect();
        let r1 = self.lam1.len();
        let mut total = 0.0;
        for (j, &aj) in a0.iter().enumerate() {
            let row = &self.w2[j * r1..(j + 1) * r1];
            let inner: f64 = row.iter().zip(&a1).map(|(w, a)| w * a).sum();
            total += aj * inner;
        }
        Ok(total)
    }
}

/// Exact minimum error probability for equiprobable hypotheses:
/// `(1 - (1/2) ||rho0 - rho1||_1) / 2` via the spectrum of the difference.
pub fn helstrom_fock(
    rho0: &TruncatedDensityMatrix,
    rho1: &TruncatedDensityMatrix,
) -> Result<f64, FockError> {
    if rho0.dim() != rho1.dim() {
        return Err(FockError::ShapeMismatch(rho0.dim(), rho1.dim()));
    }
    let diff = &rho0.matrix - &rho1.matrix;
    let (lam, _) = shifted_eigh(&diff)?;
    let tnorm: f64 = lam.iter().map(|l| l.abs()).sum();
    Ok(0.5 * (1.0 - 0.5 * tnorm))
}

/// `Tr(rho0 rho1)`, elementwise. Equals the fidelity when either state is
/// a (normalized) pure projector.
pub fn fidelity_fock(
    rho0: &TruncatedDensityMatrix,
    rho1: &TruncatedDensityMatrix,
) -> Result<f64, FockError> {
    if rho0.dim() != rho1.dim() {
        return Err(FockError::ShapeMismatch(rho0.dim(), rho1.dim()));
    }
    let dim = rho0.dim();
    let mut total = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            total += (rho0.matrix[(i, j)].conj() * rho1.matrix[(i, j)]).re;
        }
    }
    Ok(total)
}
