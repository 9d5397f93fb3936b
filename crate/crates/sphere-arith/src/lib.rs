//! Hecke eigenfunctions on the 2-sphere coming from the Hurwitz quaternions,
//! their theta lifts to modular forms, exact trilinear period constants,
//! and numerical central values of triple product L-functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`quat`]: quaternion orders, norm shells, rotations.
//! * [`poly`]: exact polynomials, harmonic bases, reproducing kernels.
//! * [`hecke`]: Hecke operators on harmonic polynomials and their
//!   simultaneous eigenbases.
//! * [`theta`]: theta series, eta products, Petersson norms.
//! * [`trilinear`]: triple integrals and the constants of the central value
//!   formula.
//! * [`lfunc`]: Euler factors, Dirichlet series and the approximate
//!   functional equation.
//! * [`experiments`]: the equidistribution and moment experiments and the
//!   central value cross-check, with CSV/JSON/SVG output.

pub mod error;
pub mod experiments;
pub mod hecke;
pub mod lfunc;
pub mod numeric;
pub mod poly;
pub mod quat;
pub mod theta;
pub mod trilinear;

pub use error::{Error, Result};
