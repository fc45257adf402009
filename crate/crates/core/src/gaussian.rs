//! Gaussian states of one or two bosonic modes and their lossy-channel
//! dynamics, in the quadrature convention where the vacuum covariance
//! matrix (CM) is the identity.
//!
//! Conventions, fixed crate-wide:
//!
//! - Quadrature ordering is `(q1, p1, q2, p2)`; mode 0 is the signal mode,
//!   mode 1 the reference mode.
//! - A coherent state of amplitude `alpha` has mean `(2 Re alpha, 2 Im alpha)`
//!   and CM = I. The factor 2 is the single point of convention in the
//!   crate and is locked by the fidelity consistency test: with it, the
//!   Gaussian fidelity of the coherent pair `alpha` vs `sqrt(tau) * alpha`
//!   equals `exp(-|alpha|^2 (1 - sqrt(tau))^2)`.
//! - A two-mode squeezed vacuum (TMSV) with `nbar` mean photons per mode has
//!   CM blocks `mu * I` on each mode and `sqrt(mu^2 - 1) * Z` across, where
//!   `mu = 2 * nbar + 1` and `Z = diag(1, -1)`.
//!
//! The symplectic machinery covers exactly the family of CMs this crate
//! produces: block "normal form" matrices `[[a I, c Z], [c Z, b I]]` and
//! isotropic single-mode CMs. General Williamson decomposition is out of
//! scope.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, Vector2};
use num_complex::Complex64;
use thiserror::Error;

/// Maximum allowed entrywise asymmetry of a covariance matrix.
pub const CM_SYMMETRY_TOL: f64 = 1e-12;
/// Symplectic eigenvalues may dip this far below 1 before a state is
/// rejected as unphysical (pure-state eigenvalues land at 1 only up to
/// floating-point roundoff).
pub const PHYSICALITY_SLACK: f64 = 1e-9;
/// Below this value of `y = (a+b)^2 - 4c^2` the normal-form spectrum is
/// treated as degenerate and the decomposition refuses to proceed.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Entrywise tolerance when matching a CM against the block normal form.
pub const NORMAL_FORM_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GaussianError {
    #[error("parameter {name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("non-finite parameter {name}")]
    NonFinite { name: &'static str },
    #[error("mean vector length {len} does not describe 1 or 2 modes")]
    BadDimension { len: usize },
    #[error("covariance matrix is {rows}x{cols}, expected {expected}x{expected}")]
    BadShape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("covariance matrix asymmetry {max_dev:.3e} exceeds tolerance")]
    NotSymmetric { max_dev: f64 },
    #[error("unphysical covariance matrix: symplectic eigenvalue {nu} < 1")]
    Unphysical { nu: f64 },
    #[error("mode index {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("degenerate normal-form spectrum: y = {y:.3e}")]
    DegenerateSpectrum { y: f64 },
    #[error("unsupported normal form: cross coefficient c = {c} is negative")]
    UnsupportedForm { c: f64 },
    #[error("covariance matrix lacks the aI/bI/cZ block structure (deviation {max_dev:.3e})")]
    NotNormalForm { max_dev: f64 },
}

/// A Gaussian state of 1 or 2 modes: mean quadrature vector plus CM.
///
/// Construction validates symmetry of the CM (within [`CM_SYMMETRY_TOL`])
/// and physicality (every symplectic eigenvalue at least
/// `1 - PHYSICALITY_SLACK`).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    mean: DVector<f64>,
    cm: DMatrix<f64>,
}

impl GaussianState {
    pub fn new(mean: DVector<f64>, cm: DMatrix<f64>) -> Result<Self, GaussianError> {
        if mean.iter().any(|x| !x.is_finite()) {
            return Err(GaussianError::NonFinite { name: "mean" });
        }
        if cm.iter().any(|x| !x.is_finite()) {
            return Err(GaussianError::NonFinite { name: "cm" });
        }
        let n_modes = match mean.len() {
            2 => 1,
            4 => 2,
            len => return Err(GaussianError::BadDimension { len }),
        };
        let dim = 2 * n_modes;
        if cm.nrows() != dim || cm.ncols() != dim {
            return Err(GaussianError::BadShape {
                rows: cm.nrows(),
                cols: cm.ncols(),
                expected: dim,
            });
        }
        let mut max_dev: f64 = 0.0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                max_dev = max_dev.max((cm[(i, j)] - cm[(j, i)]).abs());
            }
        }
        if max_dev > CM_SYMMETRY_TOL {
            return Err(GaussianError::NotSymmetric { max_dev });
        }
        let state = Self { n_modes, mean, cm };
        for nu in state.symplectic_eigenvalues() {
            if nu < 1.0 - PHYSICALITY_SLACK {
                return Err(GaussianError::Unphysical { nu });
            }
        }
        Ok(state)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cm(&self) -> &DMatrix<f64> {
        &self.cm
    }

    /// Symplectic eigenvalues, ascending; one entry per mode.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        if self.n_modes == 1 {
            let det = self.cm[(0, 0)] * self.cm[(1, 1)] - self.cm[(0, 1)] * self.cm[(1, 0)];
            vec![det.max(0.0).sqrt()]
        } else {
            let (lo, hi) =
                symplectic_spectrum_generic(&self.cm).expect("validated 4x4 symmetric CM");
            vec![lo, hi]
        }
    }

    /// True when every symplectic eigenvalue is within `tol` of 1.
    pub fn is_pure(&self, tol: f64) -> bool {
        self.symplectic_eigenvalues()
            .iter()
            .all(|nu| (nu - 1.0).abs() <= tol)
    }
}

/// Block normal-form CM `[[a I, c Z], [c Z, b I]]` with `Z = diag(1, -1)`.
///
/// Every two-mode CM this crate produces (TMSV before and after signal
/// loss) has this shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFormCM {
    a: f64,
    b: f64,
    c: f64,
}

impl NormalFormCM {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, GaussianError> {
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if !v.is_finite() {
                return Err(GaussianError::NonFinite { name });
            }
        }
        if a < 1.0 {
            return Err(GaussianError::Domain {
                name: "a",
                value: a,
                domain: "[1, inf)",
            });
        }
        if b < 1.0 {
            return Err(GaussianError::Domain {
                name: "b",
                value: b,
                domain: "[1, inf)",
            });
        }
        if c < 0.0 {
            return Err(GaussianError::UnsupportedForm { c });
        }
        let form = Self { a, b, c };
        if form.y() <= 0.0 {
            return Err(GaussianError::DegenerateSpectrum { y: form.y() });
        }
        Ok(form)
    }

    /// Extracts `(a, b, c)` from a 4x4 CM, verifying the block structure
    /// entrywise within [`NORMAL_FORM_TOL`].
    pub fn from_cm(cm: &DMatrix<f64>) -> Result<Self, GaussianError> {
        if cm.nrows() != 4 || cm.ncols() != 4 {
            return Err(GaussianError::BadShape {
                rows: cm.nrows(),
                cols: cm.ncols(),
                expected: 4,
            });
        }
        let a = 0.5 * (cm[(0, 0)] + cm[(1, 1)]);
        let b = 0.5 * (cm[(2, 2)] + cm[(3, 3)]);
        let c = 0.25 * (cm[(0, 2)] + cm[(2, 0)] - cm[(1, 3)] - cm[(3, 1)]);
        let model = DMatrix::from_fn(4, 4, |i, j| match (i, j) {
            (0, 0) | (1, 1) => a,
            (2, 2) | (3, 3) => b,
            (0, 2) | (2, 0) => c,
            (1, 3) | (3, 1) => -c,
            _ => 0.0,
        });
        let max_dev = (cm - &model).abs().max();
        if max_dev > NORMAL_FORM_TOL {
            return Err(GaussianError::NotNormalForm { max_dev });
        }
        Self::new(a, b, c)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Spectrum discriminant `y = (a+b)^2 - 4c^2`.
    pub fn y(&self) -> f64 {
        let s = self.a + self.b;
        s * s - 4.0 * self.c * self.c
    }

    /// The 4x4 matrix this normal form describes.
    pub fn to_cm(&self) -> Matrix4<f64> {
        let (a, b, c) = (self.a, self.b, self.c);
        Matrix4::new(
            a, 0.0, c, 0.0, //
            0.0, a, 0.0, -c, //
            c, 0.0, b, 0.0, //
            0.0, -c, 0.0, b,
        )
    }
}

/// Result of decomposing a normal-form CM: `V = S W S^T` with
/// `W = diag(nu_minus, nu_minus, nu_plus, nu_plus)` and `S` symplectic.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticDecomposition {
    pub nu_minus: f64,
    pub nu_plus: f64,
    pub s_matrix: Matrix4<f64>,
}

impl SymplecticDecomposition {
    /// `diag(nu_minus, nu_minus, nu_plus, nu_plus)`.
    pub fn williamson_diagonal(&self) -> Matrix4<f64> {
        Matrix4::from_diagonal(&nalgebra::Vector4::new(
            self.nu_minus,
            self.nu_minus,
            self.nu_plus,
            self.nu_plus,
        ))
    }

    /// `S W S^T`; equals the source CM up to roundoff.
    pub fn reconstruct(&self) -> Matrix4<f64> {
        self.s_matrix * self.williamson_diagonal() * self.s_matrix.transpose()
    }
}

/// One Gaussian channel acting on a single mode: mean maps to
/// `K x + d`, CM block maps to `K V K^T + N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannelSpec {
    k_matrix: Matrix2<f64>,
    n_matrix: Matrix2<f64>,
    d: Vector2<f64>,
}

impl GaussianChannelSpec {
    pub fn new(
        k_matrix: Matrix2<f64>,
        n_matrix: Matrix2<f64>,
        d: Vector2<f64>,
    ) -> Result<Self, GaussianError> {
        if k_matrix.iter().any(|x| !x.is_finite())
            || n_matrix.iter().any(|x| !x.is_finite())
            || d.iter().any(|x| !x.is_finite())
        {
            return Err(GaussianError::NonFinite { name: "channel" });
        }
        let dev = (n_matrix[(0, 1)] - n_matrix[(1, 0)]).abs();
        if dev > CM_SYMMETRY_TOL {
            return Err(GaussianError::NotSymmetric { max_dev: dev });
        }
        Ok(Self {
            k_matrix,
            n_matrix,
            d,
        })
    }

    pub fn k_matrix(&self) -> &Matrix2<f64> {
        &self.k_matrix
    }

    pub fn n_matrix(&self) -> &Matrix2<f64> {
        &self.n_matrix
    }

    pub fn d(&self) -> &Vector2<f64> {
        &self.d
    }
}

/// Two-mode squeezed vacuum with `nbar` mean photons in each mode.
pub fn tmsv_state(nbar: f64) -> Result<GaussianState, GaussianError> {
    if !nbar.is_finite() {
        return Err(GaussianError::NonFinite { name: "nbar" });
    }
    if nbar < 0.0 {
        return Err(GaussianError::Domain {
            name: "nbar",
            value: nbar,
            domain: "[0, inf)",
        });
    }
    let mu = 2.0 * nbar + 1.0;
    let c = (mu * mu - 1.0).sqrt();
    let cm = NormalFormCM::new(mu, mu, c)?.to_cm();
    GaussianState::new(
        DVector::zeros(4),
        DMatrix::from_iterator(4, 4, cm.iter().copied()),
    )
}

/// Single-mode coherent state; mean `(2 Re alpha, 2 Im alpha)`, CM = I.
pub fn coherent_state(alpha: Complex64) -> Result<GaussianState, GaussianError> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(GaussianError::NonFinite { name: "alpha" });
    }
    GaussianState::new(
        DVector::from_vec(vec![2.0 * alpha.re, 2.0 * alpha.im]),
        DMatrix::identity(2, 2),
    )
}

/// Pure-loss channel of transmissivity `tau`: `K = sqrt(tau) I`,
/// `N = (1 - tau) I`, `d = 0`.
pub fn lossy_channel(tau: f64) -> Result<GaussianChannelSpec, GaussianError> {
    if !tau.is_finite() {
        return Err(GaussianError::NonFinite { name: "tau" });
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(GaussianError::Domain {
            name: "tau",
            value: tau,
            domain: "[0, 1]",
        });
    }
    GaussianChannelSpec::new(
        Matrix2::identity() * tau.sqrt(),
        Matrix2::identity() * (1.0 - tau),
        Vector2::zeros(),
    )
}

/// Applies a single-mode Gaussian channel to `target_mode` of `state`,
/// leaving the other mode untouched and transforming cross-covariances by
/// `K` on the acted side.
pub fn apply_channel(
    state: &GaussianState,
    spec: &GaussianChannelSpec,
    target_mode: usize,
) -> Result<GaussianState, GaussianError> {
    let n = state.n_modes();
    if target_mode >= n {
        return Err(GaussianError::ModeOutOfRange {
            mode: target_mode,
            n_modes: n,
        });
    }
    let dim = 2 * n;
    let t = 2 * target_mode;
    let k = &spec.k_matrix;

    let mut mean = state.mean().clone();
    let mt = Vector2::new(mean[t], mean[t + 1]);
    let mt = k * mt + spec.d;
    mean[t] = mt[0];
    mean[t + 1] = mt[1];

    let mut cm = state.cm().clone();
    let vt = Matrix2::new(
        cm[(t, t)],
        cm[(t, t + 1)],
        cm[(t + 1, t)],
        cm[(t + 1, t + 1)],
    );
    let vt = k * vt * k.transpose() + spec.n_matrix;
    for i in 0..2 {
        for j in 0..2 {
            cm[(t + i, t + j)] = vt[(i, j)];
        }
    }
    for other in (0..n).map(|m| 2 * m).filter(|&o| o != t) {
        let cross = Matrix2::new(
            cm[(t, other)],
            cm[(t, other + 1)],
            cm[(t + 1, other)],
            cm[(t + 1, other + 1)],
        );
        let cross = k * cross;
        for i in 0..2 {
            for j in 0..2 {
                cm[(t + i, other + j)] = cross[(i, j)];
                cm[(other + j, t + i)] = cross[(i, j)];
            }
        }
    }
    // Exact resymmetrization guards against accumulation-order roundoff.
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v = 0.5 * (cm[(i, j)] + cm[(j, i)]);
            cm[(i, j)] = v;
            cm[(j, i)] = v;
        }
    }
    GaussianState::new(mean, cm)
}

/// Loss of transmissivity `tau` on the signal mode (mode 0) of a two-mode
/// state, computed by direct channel action on the statistical moments.
///
/// [`loss_on_signal_dilated`] computes the same map through an explicit
/// three-mode beam-splitter dilation; the two implementations agree
/// entrywise to within 1e-12 and are kept separate as a structural
/// cross-check.
pub fn loss_on_signal(tmsv: &GaussianState, tau: f64) -> Result<GaussianState, GaussianError> {
    if tmsv.n_modes() != 2 {
        return Err(GaussianError::BadDimension {
            len: tmsv.mean().len(),
        });
    }
    apply_channel(tmsv, &lossy_channel(tau)?, 0)
}

/// Loss on the signal mode realized as a beam splitter of transmissivity
/// `tau` coupling the signal to a vacuum ancilla, followed by discarding
/// the ancilla.
///
/// The three-mode covariance algebra is carried out on raw 6x6 matrices
/// (state objects cap at two modes); only the surviving signal-reference
/// block is returned.
pub fn loss_on_signal_dilated(
    tmsv: &GaussianState,
    tau: f64,
) -> Result<GaussianState, GaussianError> {
    if tmsv.n_modes() != 2 {
        return Err(GaussianError::BadDimension {
            len: tmsv.mean().len(),
        });
    }
    if !tau.is_finite() {
        return Err(GaussianError::NonFinite { name: "tau" });
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(GaussianError::Domain {
            name: "tau",
            value: tau,
            domain: "[0, 1]",
        });
    }
    let rt = tau.sqrt();
    let rr = (1.0 - tau).sqrt();

    // Mode order (signal, reference, ancilla); the splitter mixes signal
    // and ancilla quadratures and leaves the reference alone.
    let mut bs = DMatrix::<f64>::identity(6, 6);
    for q in 0..2 {
        bs[(q, q)] = rt;
        bs[(q, 4 + q)] = rr;
        bs[(4 + q, q)] = -rr;
        bs[(4 + q, 4 + q)] = rt;
    }

    let mut v6 = DMatrix::<f64>::identity(6, 6);
    for i in 0..4 {
        for j in 0..4 {
            v6[(i, j)] = tmsv.cm()[(i, j)];
        }
    }
    let mut m6 = DVector::<f64>::zeros(6);
    for i in 0..4 {
        m6[i] = tmsv.mean()[i];
    }

    let v6 = &bs * v6 * bs.transpose();
    let m6 = &bs * m6;

    let mut cm = DMatrix::<f64>::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            cm[(i, j)] = v6[(i, j)];
        }
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let v = 0.5 * (cm[(i, j)] + cm[(j, i)]);
            cm[(i, j)] = v;
            cm[(j, i)] = v;
        }
    }
    let mean = DVector::from_fn(4, |i, _| m6[i]);
    GaussianState::new(mean, cm)
}

/// Symplectic decomposition of a block normal-form CM.
///
/// Returns the sorted symplectic spectrum `nu_minus <= nu_plus` together
/// with a symplectic `S` built from
/// `omega_pm = sqrt((a + b +- sqrt(y)) / (2 sqrt(y)))` such that
/// `S diag(nu_minus, nu_minus, nu_plus, nu_plus) S^T` reproduces the CM.
/// The `omega_plus` weight multiplies whichever diagonal block is larger,
/// so the recipe covers both `a <= b` and `a > b`.
pub fn normal_form_decompose(nf: &NormalFormCM) -> Result<SymplecticDecomposition, GaussianError> {
    let y = nf.y();
    if y <= DEGENERACY_TOL {
        return Err(GaussianError::DegenerateSpectrum { y });
    }
    let (a, b, c) = (nf.a(), nf.b(), nf.c());
    if c < 0.0 {
        return Err(GaussianError::UnsupportedForm { c });
    }
    let sy = y.sqrt();
    debug_assert!(a + b - sy >= 0.0);
    let nu_minus = 0.5 * (sy - (b - a).abs());
    let nu_plus = 0.5 * (sy + (b - a).abs());
    // The decomposition is pure matrix algebra: it only needs a positive
    // spectrum (guaranteed by c^2 < ab), not full quantum physicality
    // (nu_minus >= 1). State-level physicality is enforced where states
    // are constructed.
    if nu_minus <= 0.0 {
        return Err(GaussianError::Unphysical { nu: nu_minus });
    }
    let wp = ((a + b + sy) / (2.0 * sy)).sqrt();
    let wm = (((a + b - sy) / (2.0 * sy)).max(0.0)).sqrt();
    // For a <= b the smaller symplectic eigenvalue pairs with the
    // omega_plus weight on mode 0; for a > b the roles of the two modes
    // swap, which exchanges the identity and Z blocks of S.
    let s_matrix = if a <= b {
        Matrix4::new(
            wp, 0.0, wm, 0.0, //
            0.0, wp, 0.0, -wm, //
            wm, 0.0, wp, 0.0, //
            0.0, -wm, 0.0, wp,
        )
    } else {
        Matrix4::new(
            wm, 0.0, wp, 0.0, //
            0.0, -wm, 0.0, wp, //
            wp, 0.0, wm, 0.0, //
            0.0, wp, 0.0, -wm,
        )
    };
    Ok(SymplecticDecomposition {
        nu_minus,
        nu_plus,
        s_matrix,
    })
}

/// Symplectic spectrum of an arbitrary symmetric 4x4 CM via the moduli of
/// the eigenvalues of `Omega V`, `Omega` the two-mode symplectic form.
/// Returns the two eigenvalues sorted ascending.
pub fn symplectic_spectrum_generic(cm: &DMatrix<f64>) -> Result<(f64, f64), GaussianError> {
    if cm.nrows() != 4 || cm.ncols() != 4 {
        return Err(GaussianError::BadShape {
            rows: cm.nrows(),
            cols: cm.ncols(),
            expected: 4,
        });
    }
    let mut max_dev: f64 = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            max_dev = max_dev.max((cm[(i, j)] - cm[(j, i)]).abs());
        }
    }
    if max_dev > CM_SYMMETRY_TOL {
        return Err(GaussianError::NotSymmetric { max_dev });
    }
    let mut omega = DMatrix::<f64>::zeros(4, 4);
    for m in 0..2 {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    let eigs = (omega * cm).complex_eigenvalues();
    let mut moduli: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|x, y| x.partial_cmp(y).expect("finite moduli"));
    // Eigenvalues come in +-i nu pairs; average each pair to shed roundoff.
    Ok((0.5 * (moduli[0] + moduli[1]), 0.5 * (moduli[2] + moduli[3])))
}
