//! Scaling operators on subharmonic functions and their charges, and the two
//! desk-scale counterexamples: a signal with a spectral gap and no sign changes
//! on long intervals, and a signal whose zero density exceeds its spectral
//! radius bound.

pub mod closed_forms;
pub mod examples;
pub mod scaling;
