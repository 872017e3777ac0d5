//! Fourier-multiplier weights for the shear-frame energy functionals and the
//! certification of the pointwise inequalities they must satisfy.
//!
//! The building blocks are a C^1 sigmoid profile, the root `xi0` of the
//! cubic `nu xi (k^2 + xi^2) = 96 |k|`, and a three-branch piecewise profile
//! glued C^1 at `0` and `-xi0`. Assembled symbols expose `(value, d/dxi)`
//! pairs; the certification scans verify, per `(nu, k)`, that the dissipation
//! lower bounds hold pointwise in `xi` on an adaptively refined grid.

mod certify;
mod phi;
mod phi_k;
mod symbol;
mod xi0;

pub use certify::{
    certify_linear_inequalities, certify_nonlinear_dropped_m3, certify_nonlinear_inequalities,
    merge_reports, CertificationReport, InequalitySummary, MarginRow, MeasuredBounds,
};
pub use phi::phi_profile;
pub use phi_k::{phi_k, phi_k_with_xi0};
pub use symbol::{build_symbol, MultiplierSymbol, SymbolKind};
pub use xi0::{solve_xi0, XiZero};
