//! Spatio-orientational decoherence of anisotropic nanoparticles.
//!
//! The crate computes localization rates and phase frequencies for
//! gas collisions off an anisotropic power-law potential ([`vdw`]) and for
//! Rayleigh-Gans light scattering off thin dielectric rods ([`rgs`]), the
//! angular momentum diffusion coefficients that emerge for weak anisotropy
//! together with the resulting population dynamics ([`angdiff`]), and a
//! classical stochastic rotor ensemble ([`rotorsim`]).
//!
//! All quantities are SI.

pub mod angdiff;
pub mod error;
pub mod locrate;
pub mod quadrature;
pub mod rgs;
pub mod rotorsim;
pub mod special;
pub mod units;
pub mod vdw;

pub use error::{Error, Result};
