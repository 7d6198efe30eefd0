//! Biorthogonal function systems (generalized Riesz systems) in Hilbert and
//! Krein spaces, realized on uniform symmetric grids with Hermite spectral
//! building blocks.
//!
//! The crate is organized bottom-up:
//!
//! - [`specfun`]: Hermite functions, Gauss–Hermite quadrature, terminating
//!   ₂F₁ and the closed-form indefinite Gram entry.
//! - [`grid`]: grids, grid functions, inner products, parity and Fourier
//!   multipliers.
//! - [`span`]: orthonormal coordinates for finite spans.
//! - [`krein`]: fundamental symmetries, indefinite inner products,
//!   biorthogonal systems, sign splitting and C-symmetry operators.
//! - [`grs`]: family builders, finite-section metric reconstruction,
//!   first-type classification and quasi-basis diagnostics.
//! - [`hamiltonians`]: differential operators of the example families,
//!   the anharmonic eigenbasis and truncated non-self-adjoint operators.
//! - [`report`]: deterministic JSON/CSV report serialization.

pub mod error;
pub mod grid;
pub mod grs;
pub mod hamiltonians;
pub mod krein;
pub mod report;
pub mod span;
pub mod specfun;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction};
pub use krein::{BiorthogonalSystem, KreinStructure, Sign};
pub use num_complex::Complex64;
