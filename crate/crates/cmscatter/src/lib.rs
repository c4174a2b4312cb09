//! Numerical direct scattering for the Lax operator of the continuum
//! Calogero-Moser equation.
//!
//! The toolkit discretizes the operator `L_q = -i d/dx - q C_+ conj(q) .` on
//! the Hardy space of a truncated line and computes its spectral data:
//! eigenvalues and normalized eigenfunctions, homogeneous and inhomogeneous
//! Jost solutions, the scattering coefficients `beta` and `Gamma`, phase
//! constants `gamma_j`, the distorted Fourier transform, trace identities and
//! the evolution of all of the above under the Calogero-Moser flow.
//!
//! See the `examples/` directory for one runnable program per capability and
//! the `cmscatter` binary for a batch front-end.

pub mod error;
pub mod grid;
pub mod resolvent;

pub use error::{Error, Result};
pub use grid::{
    cauchy_szego, cauchy_szego_minus, fourier_forward, fourier_inverse, make_grid, weighted_norm,
    GridFunction, GridSpec, HardyFunction,
};
