//! Numerical laboratory for whispering-gallery waves of the degenerate
//! acoustic wave equation `∂t²ψ − κ x_d Δψ − ∂_d ψ = 0` on the half space
//! `x_d > 0`.
//!
//! The crate is organized bottom-up:
//!
//! * [`specfun`]: log-Gamma, Pochhammer, generalized Laguerre and Tricomi `U`.
//! * [`spectral`]: the normal mode equation `κ s B″ + B′ + (μ − κ s) B = 0`.
//! * [`rays`]: bicharacteristics of `H = κ x_d |ξ|² − τ²`.
//! * [`synthesis`]: tangential Fourier synthesis of gallery modes and packets.
//! * [`measure`]: energy, weighted and mixed space-time norms.
//! * [`dynamics`]: half-wave evolution, radial leapfrog, dispersive integrals.
//! * [`experiments`]: exponent bookkeeping and dyadic ladder sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::excessive_precision)]

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod measure;
pub mod ode;
pub mod quad;
pub mod rays;
pub mod specfun;
pub mod spectral;
pub mod synthesis;

pub use error::{LabError, Result};
