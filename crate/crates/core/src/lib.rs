//! Boundary-integral solver for a periodic metallic grating whose unit cell
//! holds two closely spaced narrow slits.
//!
//! The crate is organised bottom-up:
//!
//! * [`domain`] — geometry, incidence and diffraction-order bookkeeping.
//! * [`greens`] — exterior (quasi-periodic) and interior (slit waveguide)
//!   kernels on the rescaled aperture, with their constant parts and smooth
//!   remainders.
//! * [`operators`] — Galerkin discretisation and the reduced 2×2 systems.
//! * [`resonance`] — asymptotic seeds and complex root refinement.
//! * [`scattering`] — forced solves, diffraction amplitudes and spectral
//!   feature detection.

pub mod domain;
pub mod error;
pub mod greens;
pub mod linalg;
pub mod operators;
pub mod resonance;
pub mod scattering;
pub mod special;

pub use num_complex::Complex64;

pub use domain::{DiffractionTable, GratingConfig, Incidence, Region};
pub use error::{Error, Result};
