//! Spectral invariants of hyperbolic surfaces with conical points.
//!
//! Heat traces, weighted counting functions, spectral and Hurwitz zeta
//! functions, Selberg zeta, regularized determinants and the kernels built
//! from finite spectral data, together with the numerical experiments that
//! track these quantities as the orders of cone points grow without bound.

pub mod counting;
pub mod degeneration;
pub mod error;
pub mod geometry;
pub mod hplane;
pub mod kernels;
mod par;
pub mod selberg;
pub mod special_fn;
pub mod traces;
pub mod zeta_det;

pub use error::{Error, Result};
