//! Quantum discrimination bounds for bosonic loss channels.
//!
//! This crate decides how well a transmitter can detect a small loss
//! introduced into an optical path, comparing a classical coherent probe
//! against an entangled two-mode squeezed vacuum (TMSV) probe. It provides
//!
//! - [`gaussian`]: two-mode Gaussian states in the vacuum-variance-1
//!   quadrature convention, lossy-channel action, and the symplectic
//!   decomposition of block normal-form covariance matrices;
//! - [`bounds`]: symmetric and asymmetric hypothesis-testing bounds
//!   (fidelity bound, quantum Chernoff / Bhattacharyya bounds, pure-state
//!   Helstrom, numerical and piecewise Hoeffding bounds, Bayes cost);
//! - [`transmitters`]: closed-form error probabilities and gains for the
//!   coherent and EPR transmitters, including the broadband limit and
//!   exponent ratios;
//! - [`biophoto`]: Beer-Lambert optics composed with bacterial-growth,
//!   photo-degradation, and fragile-memory readout models;
//! - [`fock`]: an independent truncated Fock-space oracle that rebuilds the
//!   same states as explicit matrices and cross-checks every Gaussian
//!   closed form by brute-force eigendecomposition.
//!
//! The Gaussian closed forms and the Fock oracle share no numerical code;
//! their agreement is the crate's primary correctness argument.

pub mod biophoto;
pub mod bounds;
pub mod fock;
pub mod gaussian;
mod golden;
pub mod transmitters;

pub use bounds::{BoundSet, DivergenceCap, HoeffdingClass, HoeffdingResult};
pub use gaussian::GaussianState;
pub use transmitters::{ComparisonPoint, QhbRatio, TransmitterConfig};
