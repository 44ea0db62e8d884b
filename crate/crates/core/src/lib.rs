//! radialwave: a numerical laboratory for the shifted wave equation
//! d^2/dt^2 u = (Laplacian + rho^2) u on rank-one harmonic manifolds
//! represented by their radial density A(r).
//!
//! The crate provides the density-model catalog, radial eigenfunctions and
//! the c-function, the radial Fourier / Abel / dual-Abel transform stack,
//! spherical means, four wave solvers cross-validating each other, and
//! theorem-level diagnostics (finite propagation speed, energy
//! conservation, Huygens principle, equipartition, Paley-Wiener decay).

pub mod analysis;
pub mod density;
pub mod eigen;
pub mod error;
pub mod funcs;
pub mod meanvalue;
pub mod ode;
pub mod plot;
pub mod quad;
pub mod scenario;
pub mod transforms;
pub mod wave;

pub use density::{eval_density, h3, h4, make_jacobi_model, make_table_model, validate_conditions, DensityModel};
pub use error::{Error, Result};
