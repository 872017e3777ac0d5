//! Grids, spectral fields, transforms, and the shear-frame weight shared by
//! every other crate in the workspace.
//!
//! Fields live on `T x [0, ly)` with the x-period fixed to `2*pi` and the
//! y-period `ly` a large periodic truncation of the real line. Coefficients
//! follow the convention `f(x, y) = sum_{k, xi} fhat(k, xi) e^{i(k x + xi y)}`
//! with integer x-wavenumbers `k` and y-wavenumbers `xi` on the lattice
//! `(2*pi/ly) * Z`.

pub mod biot_savart;
pub mod field;
pub mod grid;
pub mod ops;
pub mod params;
pub mod transform;
pub mod weight;

pub use biot_savart::{biot_savart, divergence_max, project_nonzero, project_zero, zero_mode_velocity};
pub use field::SpectralField;
pub use grid::{GridError, GridSpec};
pub use params::{ParamError, PhysParams};
pub use transform::Fft2;
pub use weight::{dissipation_integral, lambda_symbol, weighted_norm};

/// Complex scalar used throughout the workspace.
pub type C64 = num_complex::Complex64;
