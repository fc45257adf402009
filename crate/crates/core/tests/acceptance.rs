//! Acceptance gate: one test per release criterion, each printing a single
//! `ACCEPT <name>: PASS/FAIL (details)` line. Tolerances are asserted
//! exactly as stated in the criteria; a failing test carries its analysis
//! in the panic message rather than a loosened threshold.

use std::time::Instant;

use lossdisc::biophoto::{error_vs_time, memory_readout, GrowthParams, SaturationParams};
use lossdisc::bounds::{
    fidelity_lower_bound, gaussian_fidelity_pure_mixed, hoeffding_pure_piecewise, qbb, qcb,
    qhb_numeric, s_overlap, HoeffdingClass,
};
use lossdisc::fock::{apply_loss_kraus, fidelity_fock, helstrom_fock, tmsv_fock, OverlapKernel};
use lossdisc::gaussian::{
    loss_on_signal, normal_form_decompose, symplectic_spectrum_generic, tmsv_state, NormalFormCM,
};
use lossdisc::transmitters::{
    epr_qcb, epr_qcb_broadband, gain, r_quant_threshold, rate_ratio, Copies, EnergyConstraint,
    TransmitterConfig, TransmitterKind,
};
use nalgebra::Matrix4;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Prints the per-criterion verdict line and returns `pass` unchanged.
fn report(name: &str, pass: bool, details: &str) -> bool {
    println!(
        "ACCEPT {name}: {} ({details})",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// The shared oracle comparison grid: every (photons per mode,
/// transmissivity) pair used for Gaussian-vs-Fock cross-checks.
const ORACLE_GRID: [(f64, f64); 9] = [
    (0.5, 0.25),
    (0.5, 0.5),
    (0.5, 0.9),
    (1.0, 0.25),
    (1.0, 0.5),
    (1.0, 0.9),
    (2.0, 0.25),
    (2.0, 0.5),
    (2.0, 0.9),
];

const ORACLE_CUTOFF: usize = 40;

fn coherent_config(total_nbar: f64) -> TransmitterConfig {
    TransmitterConfig::new(
        TransmitterKind::Coherent,
        total_nbar,
        Copies::Finite(1),
        EnergyConstraint::Global { total_nbar },
    )
    .expect("valid coherent config")
}

fn broadband_config(total_nbar: f64) -> TransmitterConfig {
    TransmitterConfig::new(
        TransmitterKind::Epr,
        total_nbar,
        Copies::Broadband,
        EnergyConstraint::Global { total_nbar },
    )
    .expect("valid broadband config")
}

#[test]
fn fidelity_matches_reciprocal_square_form() {
    let mut max_dev = 0.0f64;
    let mut worst = (0.0, 0.0);
    for &nbar in &linspace(0.1, 10.0, 100) {
        let pure = tmsv_state(nbar).unwrap();
        for &tau in &linspace(0.0, 0.99, 100) {
            let lossy = loss_on_signal(&pure, tau).unwrap();
            let f = gaussian_fidelity_pure_mixed(&pure, &lossy).unwrap();
            let closed = (1.0 + nbar * (1.0 - tau.sqrt())).powi(-2);
            let dev = (f - closed).abs();
            if dev > max_dev {
                max_dev = dev;
                worst = (nbar, tau);
            }
        }
    }
    let pass = max_dev <= 1e-10;
    report(
        "fidelity_matches_reciprocal_square_form",
        pass,
        &format!(
            "max |F - closed form| = {max_dev:.3e} at nbar={} tau={} over 100x100 grid, tol 1e-10",
            worst.0, worst.1
        ),
    );
    assert!(pass, "fidelity deviation {max_dev:.3e} exceeds 1e-10");
}

#[test]
fn fock_oracle_reproduces_gaussian_overlaps() {
    let started = Instant::now();
    let mut max_s_dev = 0.0f64;
    let mut worst_s = (0.0, 0.0, 0.0);
    let mut max_f_dev = 0.0f64;
    let mut worst_f = (0.0, 0.0);
    for &(nbar, tau) in &ORACLE_GRID {
        let s0 = tmsv_state(nbar).unwrap();
        let s1 = loss_on_signal(&s0, tau).unwrap();
        let rho0 = tmsv_fock(nbar, ORACLE_CUTOFF).unwrap().to_density();
        let rho1 = apply_loss_kraus(&rho0, tau).unwrap();
        let kernel = OverlapKernel::new(&rho0, &rho1).unwrap();
        for k in 1..=9 {
            let s = 0.1 * k as f64;
            let dev = (kernel.s_overlap_fock(s).unwrap() - s_overlap(&s0, &s1, s).unwrap()).abs();
            if dev > max_s_dev {
                max_s_dev = dev;
                worst_s = (nbar, tau, s);
            }
        }
        let dev = (fidelity_fock(&rho0, &rho1).unwrap()
            - gaussian_fidelity_pure_mixed(&s0, &s1).unwrap())
        .abs();
        if dev > max_f_dev {
            max_f_dev = dev;
            worst_f = (nbar, tau);
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let overlap_ok = max_s_dev < 1e-6;
    let fidelity_ok = max_f_dev < 1e-8;
    let time_ok = elapsed < 60.0;
    let pass = overlap_ok && fidelity_ok && time_ok;
    report(
        "fock_oracle_reproduces_gaussian_overlaps",
        pass,
        &format!(
            "max |dC_s| = {max_s_dev:.3e} at (nbar={}, tau={}, s={}) [tol 1e-6]; \
             max |dF| = {max_f_dev:.3e} at (nbar={}, tau={}) [tol 1e-8]; \
             elapsed {elapsed:.1}s [limit 60s]",
            worst_s.0, worst_s.1, worst_s.2, worst_f.0, worst_f.1
        ),
    );
    assert!(
        pass,
        "oracle equivalence: overlap clause {} (max {max_s_dev:.3e}), fidelity clause {} \
         (max {max_f_dev:.3e}), runtime clause {} ({elapsed:.1}s). The fidelity tolerance \
         1e-8 is unattainable at cutoff {ORACLE_CUTOFF}: the truncated photon-number tail \
         of the nbar=2 input alone shifts Tr(rho0 rho1) by ~9.97e-9 at tau=0.9 (exact \
         scalar-sum computation, no roundoff), giving |dF| ~ 1.81e-8; a cutoff of ~69 \
         would be needed for this tolerance, conflicting with the pinned cutoff 40. \
         All 8 other grid points pass the fidelity clause.",
        if overlap_ok { "passed" } else { "FAILED" },
        if fidelity_ok { "passed" } else { "FAILED" },
        if time_ok { "passed" } else { "FAILED" },
    );
}

#[test]
fn error_bound_chain_brackets_exact_helstrom() {
    const SLACK: f64 = 1e-9;
    let mut worst_margin = f64::INFINITY;
    let mut worst = (0.0, 0.0, "");
    for &(nbar, tau) in &ORACLE_GRID {
        let s0 = tmsv_state(nbar).unwrap();
        let s1 = loss_on_signal(&s0, tau).unwrap();
        let fid = gaussian_fidelity_pure_mixed(&s0, &s1).unwrap();
        let p_lower = fidelity_lower_bound(fid, 1).unwrap();
        let rho0 = tmsv_fock(nbar, ORACLE_CUTOFF).unwrap().to_density();
        let rho1 = apply_loss_kraus(&rho0, tau).unwrap();
        let p_exact = helstrom_fock(&rho0, &rho1).unwrap();
        let p_qcb = qcb(&s0, &s1, 1).unwrap();
        let p_qbb = qbb(&s0, &s1, 1).unwrap();
        for (label, lo, hi) in [
            ("fidelity-lower vs exact", p_lower, p_exact),
            ("exact vs Chernoff", p_exact, p_qcb),
            ("Chernoff vs Bhattacharyya", p_qcb, p_qbb),
        ] {
            let margin = hi - lo;
            if margin < worst_margin {
                worst_margin = margin;
                worst = (nbar, tau, label);
            }
            assert!(
                margin >= -SLACK,
                "bound chain violated at nbar={nbar} tau={tau}: {label} margin {margin:.3e}"
            );
        }
    }
    let pass = worst_margin >= -SLACK;
    report(
        "error_bound_chain_brackets_exact_helstrom",
        pass,
        &format!(
            "lower <= exact <= QCB <= QBB held on all 9 pairs at M=1; tightest margin \
             {worst_margin:.3e} ({} at nbar={}, tau={}), slack 1e-9",
            worst.2, worst.0, worst.1
        ),
    );
    assert!(pass);
}

#[test]
fn hoeffding_plateau_and_pure_piecewise() {
    let mut max_plateau_dev = 0.0f64;
    for &(nbar, tau) in &ORACLE_GRID {
        let s0 = tmsv_state(nbar).unwrap();
        let s1 = loss_on_signal(&s0, tau).unwrap();
        let threshold = r_quant_threshold(nbar, tau).unwrap();
        let res = qhb_numeric(&s0, &s1, 2.0 * threshold).unwrap();
        assert_eq!(
            res.classification,
            HoeffdingClass::Finite,
            "plateau run must be classified finite at nbar={nbar} tau={tau}"
        );
        let closed = 2.0 * (1.0 + nbar * (1.0 - tau.sqrt())).ln();
        max_plateau_dev = max_plateau_dev.max((res.h_value - closed).abs());
    }
    let plateau_ok = max_plateau_dev <= 1e-6;

    // Pure-pair piecewise form: infinite strictly below the fidelity
    // exponent, equal to it (bitwise) at and above the boundary.
    let mut piecewise_ok = true;
    for &(total, tau) in &[(0.5, 0.25), (1.0, 0.25), (1.0, 0.9), (2.0, 0.5)] {
        let exponent = total * (1.0 - f64::sqrt(tau)).powi(2);
        let fid = (-exponent).exp();
        let threshold = -fid.ln();
        let above = hoeffding_pure_piecewise(fid, 1.25 * threshold).unwrap();
        let at = hoeffding_pure_piecewise(fid, threshold).unwrap();
        let below = hoeffding_pure_piecewise(fid, 0.75 * threshold).unwrap();
        piecewise_ok &= (threshold - exponent).abs() <= 1e-12 * exponent.max(1.0)
            && above.classification == HoeffdingClass::Finite
            && above.h_value == threshold
            && at.classification == HoeffdingClass::Finite
            && at.h_value == threshold
            && below.classification == HoeffdingClass::Infinite;
    }
    let pass = plateau_ok && piecewise_ok;
    report(
        "hoeffding_plateau_and_pure_piecewise",
        pass,
        &format!(
            "numeric supremum at r = 2x threshold within {max_plateau_dev:.3e} of \
             2 ln(1 + nbar(1-sqrt(tau))) on all 9 pairs [tol 1e-6]; pure piecewise \
             branches (finite plateau / infinite below threshold) {}",
            if piecewise_ok { "exact" } else { "BROKEN" }
        ),
    );
    assert!(pass);
}

#[test]
fn near_transparency_gain_expansion_as_published() {
    const EPS: f64 = 1e-3;
    let mut rows = Vec::new();
    let mut pass = true;
    for &nbar in &[0.5, 1.0, 5.0] {
        let g = gain(nbar, 1.0 - EPS, 1).unwrap();
        let stated = (nbar.sqrt() + 2.0 * nbar) * EPS / 4.0;
        let corrected = (2.0 * nbar - nbar.sqrt()) * EPS / 4.0;
        let rel_stated = (g - stated).abs() / stated;
        let rel_corrected = (g - corrected).abs() / corrected;
        pass &= rel_stated < 0.05;
        rows.push(format!(
            "nbar={nbar}: gain={g:.4e}, vs (sqrt(n)+2n)eps/4 dev {:.1}%, \
             vs (2n-sqrt(n))eps/4 dev {:.2}%",
            100.0 * rel_stated,
            100.0 * rel_corrected
        ));
    }
    report(
        "near_transparency_gain_expansion_as_published",
        pass,
        &rows.join("; "),
    );
    assert!(
        pass,
        "the claimed first-order gain coefficient (sqrt(n)+2n)/4 does not match the \
         exact gain at eps=1e-3 ({}). The sign of the sqrt(n) term is flipped in the \
         published expansion: the exact coherent error is 1/2 (1 - sqrt(1-exp(..))) ~ \
         1/2 (1 - sqrt(n) eps / 2), DECREASING in eps, so the gain expands as \
         (2n - sqrt(n)) eps / 4, which the same evaluations match to <0.5%. Note the \
         corrected coefficient is negative for nbar < 1/4, so the positivity claim \
         attached to the published form also fails there.",
        rows.join("; ")
    );
}

#[test]
fn growth_detection_time_window() {
    let growth = GrowthParams::new(1.0, 0.2, 0.0).unwrap();
    let ts: Vec<f64> = (0..=200).map(|k| 0.005 * k as f64).collect();
    let total = 500.0;
    let p_coh = error_vs_time(&ts, total, &coherent_config(total), &growth, false).unwrap();
    let p_bb = error_vs_time(&ts, total, &broadband_config(total), &growth, false).unwrap();
    let at = |curve: &[(f64, f64)], t: f64| {
        curve
            .iter()
            .find(|(tt, _)| (tt - t).abs() < 1e-12)
            .expect("grid point")
            .1
    };
    let bb_at_005 = at(&p_bb, 0.05);
    let coh_at_005 = at(&p_coh, 0.05);
    let t_cross = p_coh
        .iter()
        .find(|(_, p)| *p < 0.01)
        .map(|(t, _)| *t)
        .unwrap_or(f64::INFINITY);
    let pass = bb_at_005 < 1e-4 && coh_at_005 >= 0.3 && t_cross > 0.3 && t_cross <= 0.4;
    report(
        "growth_detection_time_window",
        pass,
        &format!(
            "broadband error at t=0.05 is {bb_at_005:.3e} [< 1e-4]; coherent error at \
             t=0.05 is {coh_at_005:.4} [>= 0.3]; coherent first drops below 0.01 at \
             t={t_cross} [in (0.3, 0.4]]"
        ),
    );
    assert!(pass);
}

#[test]
fn degradation_leaves_short_detection_window() {
    let params = GrowthParams::new(1.0, 10.0, 1.0).unwrap();
    let total = 100.0;
    let coh = error_vs_time(&[0.01], total, &coherent_config(total), &params, true).unwrap();
    let bb = error_vs_time(&[0.01], total, &broadband_config(total), &params, true).unwrap();
    let (p_coh, p_bb) = (coh[0].1, bb[0].1);
    let pass = p_coh >= 0.30 && p_bb <= 1e-3;
    report(
        "degradation_leaves_short_detection_window",
        pass,
        &format!(
            "at t=0.01 under photo-degradation: coherent error {p_coh:.4} [>= 0.30], \
             broadband error {p_bb:.3e} [<= 1e-3]"
        ),
    );
    assert!(pass);
}

#[test]
fn memory_readout_extremes() {
    let sp = SaturationParams::new(5e-3, 1e-4).unwrap();
    let total = 5000.0;
    let i_bb = memory_readout(total, &sp, &broadband_config(total)).unwrap();
    let i_coh = memory_readout(total, &sp, &coherent_config(total)).unwrap();
    let pass = i_bb >= 0.99 && i_coh <= 0.02;
    report(
        "memory_readout_extremes",
        pass,
        &format!(
            "at 5000 photons with bleaching (5e-3, 1e-4): broadband retrieves \
             {i_bb:.6} bits/cell [>= 0.99], coherent retrieves {i_coh:.6} [<= 0.02]"
        ),
    );
    assert!(pass);
}

#[test]
fn copy_subdivision_monotone_and_near_limit() {
    let total = 1.0;
    let mut monotone_ok = true;
    let mut max_rel = 0.0f64;
    let mut worst_tau = 0.0;
    let mut first_within: Option<f64> = None;
    for j in 0..=99 {
        let tau = 0.01 * j as f64;
        let mut prev = f64::INFINITY;
        for m in 1..=50u32 {
            let p = epr_qcb(total / m as f64, tau, m).unwrap();
            monotone_ok &= p <= prev + 1e-15 * prev.abs().max(1.0);
            prev = p;
        }
        let p5 = epr_qcb(total / 5.0, tau, 5).unwrap();
        let limit = epr_qcb_broadband(total, tau).unwrap();
        let rel = (p5 / limit - 1.0).abs();
        if rel > max_rel {
            max_rel = rel;
            worst_tau = tau;
        }
        if rel <= 0.02 && first_within.is_none() {
            first_within = Some(tau);
        }
    }
    let within_ok = max_rel <= 0.02;
    let pass = monotone_ok && within_ok;
    report(
        "copy_subdivision_monotone_and_near_limit",
        pass,
        &format!(
            "Chernoff bound non-increasing in copies for all tau: {}; five-copy value \
             within 2% of the infinite-subdivision limit: max rel dev {:.2}% at \
             tau={worst_tau} (first within 2% at tau={:?})",
            if monotone_ok { "yes" } else { "NO" },
            100.0 * max_rel,
            first_within
        ),
    );
    assert!(
        pass,
        "five-copy subdivision misses the broadband limit by {:.2}% at tau={worst_tau}; \
         a 2% relative agreement holds only for tau >= ~0.47 (max 1.67% on [0.5, 0.99]). \
         The five-copy convergence claim is qualitative; 2% over the FULL transmissivity \
         range is not achievable since at tau=0 the exact relative gap is \
         (1+1/5)^-10 / e^-2 - 1 = 19.3%. Monotonicity clause: {}.",
        100.0 * max_rel,
        if monotone_ok { "passed" } else { "FAILED" }
    );
}

#[test]
fn exponent_ratio_magnitude_and_sign() {
    let headline = rate_ratio(1.0, 0.998001).unwrap();
    let magnitude_ok = (1.9e3..=2.1e3).contains(&headline);
    let mut min_ratio = f64::INFINITY;
    let mut worst = (0.0, 0.0);
    for i in 1..=100 {
        let nbar = 0.1 * i as f64;
        for j in 0..=99 {
            let tau = 0.01 * j as f64;
            let r = rate_ratio(nbar, tau).unwrap();
            if r < min_ratio {
                min_ratio = r;
                worst = (nbar, tau);
            }
        }
    }
    let sign_ok = min_ratio > 1.0;
    let pass = magnitude_ok && sign_ok;
    report(
        "exponent_ratio_magnitude_and_sign",
        pass,
        &format!(
            "rate_ratio(1, 0.998001) = {headline:.4} [in [1.9e3, 2.1e3]]; grid minimum \
             {min_ratio:.4} at nbar={} tau={} [required > 1]",
            worst.0, worst.1
        ),
    );
    assert!(
        pass,
        "magnitude clause {}: rate_ratio(1, 0.998001) = {headline:.4}. Exceeds-one \
         clause {}: the exponent ratio 2 ln(1+nbar eps)/(nbar eps^2) dips below 1 in \
         the low-transmissivity, high-energy corner (minimum {min_ratio:.4} at \
         nbar={} tau={}); analytically R(nbar, 0) = 2 ln(1+nbar)/nbar < 1 for any \
         nbar > 2.5129, so a ratio above 1 over the full grid is not achievable. \
         The advantage claim holds on the high-transmissivity region the figure \
         highlights, guarded by the module-level regression tests.",
        if magnitude_ok { "passed" } else { "FAILED" },
        if sign_ok { "passed" } else { "FAILED" },
        worst.0,
        worst.1
    );
}

#[test]
fn symplectic_decomposition_random_suite() {
    let mut rng = StdRng::seed_from_u64(0x5EED);
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    );
    let mut max_recon = 0.0f64;
    let mut max_sympl = 0.0f64;
    let mut max_spec = 0.0f64;
    for _ in 0..1000 {
        let a: f64 = rng.random_range(1.0..=20.0);
        let b: f64 = rng.random_range(1.0..=20.0);
        let bound = (a * b - a.max(b) + 1.0).sqrt();
        let c = rng.random_range(0.0..1.0) * bound;
        let nf = NormalFormCM::new(a, b, c).unwrap();
        let dec = normal_form_decompose(&nf).unwrap();
        max_recon = max_recon.max((dec.reconstruct() - nf.to_cm()).abs().max());
        max_sympl = max_sympl.max(
            (dec.s_matrix * omega * dec.s_matrix.transpose() - omega)
                .abs()
                .max(),
        );
        let generic = symplectic_spectrum_generic(&nalgebra::DMatrix::from_fn(4, 4, |i, j| {
            nf.to_cm()[(i, j)]
        }))
        .unwrap();
        max_spec = max_spec
            .max((generic.0 - dec.nu_minus).abs())
            .max((generic.1 - dec.nu_plus).abs());
    }
    let mut max_purity = 0.0f64;
    for &nbar in &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        for nu in tmsv_state(nbar).unwrap().symplectic_eigenvalues() {
            max_purity = max_purity.max((nu - 1.0).abs());
        }
    }
    let pass = max_recon <= 1e-9 && max_sympl <= 1e-9 && max_spec <= 1e-9 && max_purity <= 1e-10;
    report(
        "symplectic_decomposition_random_suite",
        pass,
        &format!(
            "1000 random normal forms: max reconstruction dev {max_recon:.3e}, max \
             symplectic-form dev {max_sympl:.3e}, max spectrum dev vs generic route \
             {max_spec:.3e} [all <= 1e-9]; two-mode squeezed purity dev {max_purity:.3e} \
             [<= 1e-10]"
        ),
    );
    assert!(pass);
}
