//! Numerical machinery for the dynamics of Gauss-type interval maps and the
//! harmonic analysis that goes with them.
//!
//! The crate has three layers:
//!
//! * low-level quadrature and special functions ([`quad`], [`special`]):
//!   adaptive Gauss-Legendre integration, principal-value integrals,
//!   oscillatory half-line integrals, the Bessel ratio `x^{-1/2} J_1(2√x)`,
//!   and the sine/cosine integrals;
//! * the dynamical core ([`grid`], [`maps`], [`transfer`]): the maps
//!   `σ_γ(x) = {γ/x}₁` and `τ_β(x) = {-β/x}₂`, their wandering sets, and the
//!   subtransfer / transfer / compressed-Koopman operator families together
//!   with the invariant densities `λ₁ = 1/(1+x)` and `κ₁ = 1/(1-x²)`;
//! * the harmonic-analysis layer ([`hilbert`], [`fourier`]): Hilbert
//!   transforms (plain, modified, 2-periodic), Szegő projections, the
//!   involutions `J_β`, the periodization `Π₂`, Fourier transforms of
//!   measures carried by a hyperbola, the critical density `f₀`, and the
//!   Nielsen-spiral evaluation.
//!
//! [`verify`] binds all of the above into named, runnable verification
//! campaigns with machine-readable reports; the `gaussdyn` CLI exposes them.

pub mod error;
pub mod fourier;
pub mod grid;
pub mod hilbert;
pub mod maps;
pub mod quad;
pub mod special;
pub mod transfer;
pub mod verify;

pub use error::{Error, Result};
