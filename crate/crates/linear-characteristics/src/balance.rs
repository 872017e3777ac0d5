//! Temperature energy balance between two stored snapshots. The temperature
//! equation is diagonal along characteristics, so between times t_a < t_b
//! the per-column energy must drop by exactly the dissipation integral of
//! the initial slot intensities; any defect beyond quadrature rounding
//! signals lost or invented content (band truncation, bookkeeping bugs).

use crate::state::LinearState;
use spectral_core::dissipation_integral;

/// 7-point Gauss-Legendre rule on [-1, 1]; exact through degree 13.
const GL_X: [f64; 7] = [
    -0.9491079123427585,
    -0.7415311855993944,
    -0.4058451513773972,
    0.0,
    0.4058451513773972,
    0.7415311855993944,
    0.9491079123427585,
];
const GL_W: [f64; 7] = [
    0.1294849661688697,
    0.2797053914892767,
    0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892767,
    0.1294849661688697,
];

/// Composite 7-point Gauss-Legendre integral of `f` over [0, delta].
pub(crate) fn gl7_panels<F: Fn(f64) -> f64>(f: F, delta: f64, panels: usize) -> f64 {
    let h = delta / panels as f64;
    let half = 0.5 * h;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        let mut acc = 0.0;
        for (x, w) in GL_X.iter().zip(GL_W.iter()) {
            acc += w * f(mid + half * x);
        }
        total += acc * half;
    }
    total
}

/// Worst relative defect, over columns, of the exact energy identity
/// `E(t_b) - E(t_a) + eta * Q = 0`, where `Q` integrates the
/// frequency-drifting dissipation weight against the initial intensities.
/// Snapshot labels must be instantaneous frequencies at their own times
/// (the solver stores them that way).
pub fn theta_balance_residual(a: &LinearState, b: &LinearState) -> f64 {
    let grid = a.grid();
    assert!(b.grid() == grid, "snapshot grids differ");
    assert!(a.params == b.params, "snapshot parameters differ");
    let delta = b.t - a.t;
    assert!(
        delta.is_finite() && delta > 0.0,
        "snapshots must be strictly time-ordered"
    );
    let eta = a.params.eta;
    let cell = grid.cell_measure();
    let mut worst = 0.0f64;
    for i in 0..grid.nx {
        let k = grid.k_of(i);
        let kf = k as f64;
        let mut e_a = 0.0;
        let mut e_b = 0.0;
        let mut q = 0.0;
        for j in 0..grid.ny {
            let wa = a.theta.coef[[i, j]].norm_sqr();
            e_a += wa;
            e_b += b.theta.coef[[i, j]].norm_sqr();
            if wa == 0.0 {
                continue;
            }
            let xi = grid.xi_of(j);
            // Panel count tracks the integrand's fastest local decay scale.
            let lam = 2.0 * eta * ((xi.abs() + kf.abs() * delta).powi(2) + kf * kf);
            let panels = ((lam * delta / 2.0).ceil() as usize).max(1);
            let integral = gl7_panels(
                |s| {
                    let xs = xi - kf * s;
                    let g = dissipation_integral(k, xi, 0.0, s);
                    (xs * xs + kf * kf) * (-2.0 * eta * g).exp()
                },
                delta,
                panels,
            );
            q += wa * integral;
        }
        e_a *= 0.5 * cell;
        e_b *= 0.5 * cell;
        q *= cell;
        let defect = (e_b - e_a + eta * q).abs() / e_a.max(e_b).max(1e-300);
        worst = worst.max(defect);
    }
    worst
}
