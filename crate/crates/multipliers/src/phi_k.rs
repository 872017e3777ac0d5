//! Piecewise mode-dependent profile with its analytic derivative.

use crate::xi0::solve_xi0;
use std::f64::consts::PI;

/// Three-branch profile for one nonzero `k`: constant for `xi > 0`, a
/// rational bump on `[-xi0, 0]`, and an exponential tail below `-xi0`.
/// Returns `(value, d/dxi)`. Both breakpoints glue to C^1 by construction:
/// the rational branch has slope 0 at 0 and matches the tail's value
/// `4 - pi` and slope `24 xi0 / (k^2 + xi0^2)` at `-xi0`.
pub fn phi_k(nu: f64, k: i64, xi: f64) -> (f64, f64) {
    phi_k_with_xi0(k, solve_xi0(nu, k).xi0, xi)
}

/// Same as [`phi_k`] with the cubic root supplied by the caller; scan loops
/// use this to solve for `xi0` once per `(nu, k)`.
pub fn phi_k_with_xi0(k: i64, xi0: f64, xi: f64) -> (f64, f64) {
    debug_assert!(k != 0 && xi0 > 0.0);
    let absk = k.unsigned_abs() as f64;
    let kk = absk * absk;
    let a = kk + xi0 * xi0;
    if xi > 0.0 {
        (6.0 * a * a / (kk * kk) - (2.0 + PI), 0.0)
    } else if xi >= -xi0 {
        let d = kk + xi * xi;
        let v = 6.0 * a * a / (d * d) - (2.0 + PI);
        let s = -24.0 * xi * a * a / (d * d * d);
        (v, s)
    } else {
        let c = 24.0 * xi0 / ((4.0 - PI) * a);
        let v = (4.0 - PI) * (c * (xi + xi0)).exp();
        (v, c * v)
    }
}
