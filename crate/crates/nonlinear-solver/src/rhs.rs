use crate::engine::NlEngine;
use crate::state::SystemState;
use spectral_core::{SpectralField, C64};

/// Quadratic source in the current equation for given velocity and magnetic
/// fields, static frame. Thin wrapper kept as a free function so the term
/// can be probed independently of a full state.
pub fn compute_q(
    engine: &NlEngine,
    u1: &SpectralField,
    u2: &SpectralField,
    b1: &SpectralField,
    b2: &SpectralField,
) -> SpectralField {
    engine.quadratic_source(u1, u2, b1, b2)
}

/// Tendency in the frame comoving with the background shear, at offset `s`
/// since the last remesh: everything except the `-y d_x` transport, which the
/// frame absorbs. Includes the diffusive term with the instantaneous
/// wavenumber; this is the right-hand side the integrating-factor stepper
/// splits into stiff and nonstiff parts.
pub fn shear_frame_rhs(
    engine: &NlEngine,
    state: &SystemState,
    s: f64,
) -> (SpectralField, SpectralField, SpectralField) {
    let grid = engine.grid();
    let (mut dw, mut dj, mut dth) =
        engine.nonstiff_tendency(&state.w, &state.j, &state.theta, s, true);
    let p = state.params;
    for i in 0..grid.nx {
        let k = grid.k_of(i) as f64;
        for jj in 0..grid.ny {
            let xi = grid.xi_of(jj) - k * s;
            let d = k * k + xi * xi;
            dw.coef[[i, jj]] -= C64::new(p.nu * d, 0.0) * state.w.coef[[i, jj]];
            dj.coef[[i, jj]] -= C64::new(p.mu * d, 0.0) * state.j.coef[[i, jj]];
            dth.coef[[i, jj]] -= C64::new(p.eta * d, 0.0) * state.theta.coef[[i, jj]];
        }
    }
    (dw, dj, dth)
}

/// Full static-frame tendency: the comoving tendency at `s = 0` plus the
/// Couette transport `-y d_x f` on each component. Transport is evaluated as
/// an exact pointwise multiply by the centered `y` coordinate, so it agrees
/// with the circulant convolution stencil to machine precision; no dealias
/// mask is applied to it because it is linear.
pub fn rhs(
    engine: &NlEngine,
    state: &SystemState,
) -> (SpectralField, SpectralField, SpectralField) {
    let (mut dw, mut dj, mut dth) = shear_frame_rhs(engine, state, 0.0);
    dw.axpy(C64::new(1.0, 0.0), &engine.transport(&state.w));
    dj.axpy(C64::new(1.0, 0.0), &engine.transport(&state.j));
    dth.axpy(C64::new(1.0, 0.0), &engine.transport(&state.theta));
    (dw, dj, dth)
}
