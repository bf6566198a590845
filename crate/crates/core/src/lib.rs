//! Desk-scale laboratory for the oscillation of real signals with a spectral gap.
//!
//! The crate builds high-pass and band-limited test signals, counts their sign
//! changes, and checks the analytic machinery that links the size of a spectral
//! gap `(-a, a)` to a lower bound `a/π` on the density of sign changes:
//!
//! * [`signals`]: grids, sampled signals, trigonometric polynomials, spectra.
//! * [`oscillation`]: zero places, sign-change places, `s(r, f)` and `S(r, f)`.
//! * [`sturm`]: the `2m` sign-change bound for trigonometric polynomials.
//! * [`hardy`]: the decomposition `f = h + h̄`, Hilbert transforms, phase curves.
//! * [`heat`]: heat-kernel smoothing and monotonicity of sign changes.
//! * [`limit_sets`]: closed-form charges, scaling operators and the two
//!   counterexample constructions.
//!
//! Frequencies are in radians per unit length throughout.

// `!(x > 0.0)` style guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod export;
pub mod hardy;
pub mod heat;
pub mod limit_sets;
pub mod numerics;
pub mod oscillation;
pub mod signals;
pub mod sturm;

pub use error::{GapwaveError, Result};
pub use signals::{GapSpec, Grid, SampledSignal, Spectrum, TrigPoly};

/// Schema tag written into every JSON artifact.
pub const SCHEMA: &str = "gapwave/1";
