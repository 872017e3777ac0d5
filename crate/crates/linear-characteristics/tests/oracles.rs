//! Frozen-value oracles for the characteristic solver. Every expected number
//! here comes from an independent route: hand quadrature, closed-form
//! exponentials, or direct slot bookkeeping - never from the code under test.

use linear_characteristics::{
    dense_oracle, fit_log_linear, integrate_spectrum, integrate_spectrum_with, mode_rhs,
    underflow_horizon, DenseError, LinearState, ModeCharacteristic, ModeError, Rates, RunOptions,
};
use spectral_core::{dissipation_integral, GridSpec, PhysParams, C64};

const EXP_M43: f64 = 0.26359713811572677; // e^{-4/3}
const EXP_M16: f64 = 0.20189651799465538; // e^{-1.6}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn grid(nx: usize, ny: usize) -> GridSpec {
    GridSpec::new(nx, ny, 16.0 * std::f64::consts::PI, true).unwrap()
}

/// Smooth y-localized packet in one k column (plus its Hermitian mirror):
/// a single Gaussian bump centered at y = 0, well away from the shear seam.
fn packet_state(g: GridSpec, params: PhysParams, k: i64, max_m: i64, sigma: f64) -> LinearState {
    let mut st = LinearState::zeros(g, params);
    for m in -max_m..=max_m {
        let xi = m as f64 * g.dxi();
        let amp = (-0.5 * (xi * sigma) * (xi * sigma)).exp();
        let v = c(0.7 * amp, 0.3 * amp);
        st.theta.set_mode(k, m, v);
        st.theta.set_mode(-k, -m, v.conj());
        let vw = c(0.2 * amp, -0.4 * amp);
        st.w.set_mode(k, m, vw);
        st.w.set_mode(-k, -m, vw.conj());
        let vj = c(-0.1 * amp, 0.25 * amp);
        st.j.set_mode(k, m, vj);
        st.j.set_mode(-k, -m, vj.conj());
    }
    st
}

// The characteristic dissipation integral for k=1, xi sweeping 1 -> 0 over
// [0,1] is 4/3; checked by Simpson quadrature, then against the closed form.
#[test]
fn characteristic_integral_quadrature_matches_closed_form() {
    let n = 10_000usize;
    let h = 1.0 / n as f64;
    let f = |s: f64| {
        let xi = 1.0 - s;
        xi * xi + 1.0
    };
    let mut sum = f(0.0) + f(1.0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    let simpson = sum * h / 3.0;
    assert!((simpson - 4.0 / 3.0).abs() < 1e-12, "simpson = {simpson}");
    let closed = dissipation_integral(1, 1.0, 0.0, 1.0);
    assert!((closed - 4.0 / 3.0).abs() < 1e-13, "closed = {closed}");
}

// theta rides the integrating factor exactly, so the frozen factor e^{-4/3}
// must come out to rounding accuracy, for both signs of the sweep.
#[test]
fn single_mode_theta_factor_is_exp_minus_four_thirds() {
    let rates = Rates::new(1.0, 1.0, 1.0).unwrap();
    // xi(t) = 1 - t sweeps 1 -> 0.
    let mut mode = ModeCharacteristic::new(1, 1.0, [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    mode.advance(rates, 1.0, 16);
    let got = mode.state[0].norm();
    assert!(
        (got - EXP_M43).abs() < 1e-13 * EXP_M43,
        "theta factor {got} vs {EXP_M43}"
    );
    assert!((mode.t - 1.0).abs() < 1e-15);

    // xi(t) = 0 + t sweeps 0 -> 1 (k = -1): same integral by symmetry.
    let mut mode = ModeCharacteristic::new(-1, 0.0, [c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]);
    mode.advance(rates, 1.0, 16);
    let got = mode.state[0].norm();
    assert!(
        (got - EXP_M43).abs() < 1e-13 * EXP_M43,
        "mirror factor {got} vs {EXP_M43}"
    );
}

#[test]
fn mode_rhs_matches_hand_written_system() {
    let (nu, mu, eta) = (0.3, 0.5, 0.7);
    let (k, xi) = (2i64, -1.5f64);
    let theta = c(1.0, 2.0);
    let w = c(0.0, -0.5);
    let j = c(0.25, 0.0);
    let out = mode_rhs(nu, mu, eta, k, xi, [theta, w, j]).unwrap();
    let d = xi * xi + (k * k) as f64; // 6.25
    let ik = c(0.0, k as f64);
    let stretch = -2.0 * (k as f64) * xi / d; // +0.96
    let want_theta = -eta * d * theta;
    let want_w = -nu * d * w + ik * j + ik * theta;
    let want_j = -mu * d * j + ik * w + stretch * j;
    assert!((out[0] - want_theta).norm() < 1e-15);
    assert!((out[1] - want_w).norm() < 1e-15);
    assert!((out[2] - want_j).norm() < 1e-15);
}

#[test]
fn mode_rhs_zero_state_and_gauge_rejection() {
    let z = c(0.0, 0.0);
    let out = mode_rhs(0.1, 0.1, 0.2, 3, -0.625, [z, z, z]).unwrap();
    assert!(out.iter().all(|v| v.norm() == 0.0));

    let err = mode_rhs(0.1, 0.1, 0.2, 0, 0.0, [c(1.0, 0.0), z, z]).unwrap_err();
    assert!(matches!(err, ModeError::MeanModeGauge));
}

// At k=0 every component is a pure heat mode: no coupling, no stretching.
#[test]
fn mode_rhs_heat_mode_at_k_zero() {
    let (nu, mu, eta) = (0.4, 0.6, 0.8);
    let xi = 2.0;
    let s = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 1.0)];
    let out = mode_rhs(nu, mu, eta, 0, xi, s).unwrap();
    assert!((out[0] - (-eta * 4.0) * s[0]).norm() < 1e-15);
    assert!((out[1] - (-nu * 4.0) * s[1]).norm() < 1e-15);
    assert!((out[2] - (-mu * 4.0) * s[2]).norm() < 1e-15);
}

// One Lawson substep is exact on the diagonal; the explicit part of the step
// must converge at fourth order in the substep count.
#[test]
fn lawson_step_converges_at_fourth_order() {
    let rates = Rates::new(0.05, 0.05, 0.08).unwrap();
    let init = [c(0.8, 0.1), c(-0.3, 0.5), c(0.2, -0.6)];
    let run = |n: usize| {
        let mut m = ModeCharacteristic::new(2, 0.7, init);
        m.advance(rates, 0.5, n);
        m.state
    };
    let reference = run(256);
    let err = |s: [C64; 3]| {
        s.iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let e8 = err(run(8));
    let e16 = err(run(16));
    let ratio = e8 / e16;
    assert!(
        (10.0..26.0).contains(&ratio),
        "expected ~16x error drop, got {ratio} (e8 = {e8:.3e}, e16 = {e16:.3e})"
    );
}

#[test]
fn dense_oracle_identity_at_t_zero() {
    let g = grid(4, 32);
    let params = PhysParams::new(0.1, 0.1, 0.2, 1.1).unwrap();
    let st = packet_state(g, params, 1, 6, 1.0);
    let out = dense_oracle(&st, 0.0).unwrap();
    let mut worst = 0.0f64;
    for i in 0..g.nx {
        for j in 0..g.ny {
            worst = worst.max((out.theta.coef[[i, j]] - st.theta.coef[[i, j]]).norm());
            worst = worst.max((out.w.coef[[i, j]] - st.w.coef[[i, j]]).norm());
            worst = worst.max((out.j.coef[[i, j]] - st.j.coef[[i, j]]).norm());
        }
    }
    assert!(worst < 1e-13, "identity deviation {worst}");
}

// The moving-frame generator is autonomous, so the oracle is a semigroup.
#[test]
fn dense_oracle_semigroup_doubling() {
    let g = grid(4, 32);
    let params = PhysParams::new(0.2, 0.2, 0.4, 1.1).unwrap();
    let st = packet_state(g, params, 1, 6, 1.0);
    let once = dense_oracle(&st, 0.3).unwrap();
    let twice = dense_oracle(&once, 0.3).unwrap();
    let direct = dense_oracle(&st, 0.6).unwrap();
    let num = field_diff(&twice, &direct);
    let den = field_norm(&direct).max(1e-300);
    assert!(num / den < 1e-8, "semigroup defect {}", num / den);
}

#[test]
fn dense_oracle_rejects_oversized_grids() {
    let g = grid(4, 512);
    let params = PhysParams::new(0.1, 0.1, 0.2, 1.1).unwrap();
    let st = LinearState::zeros(g, params);
    let err = dense_oracle(&st, 1.0).unwrap_err();
    assert!(matches!(err, DenseError::GridTooLarge { .. }));
}

// k=0 columns decay by bare heat factors; frozen value e^{-1.6} for the theta
// slot at xi=2 with eta=0.8, t=0.5 (w and j use their own rates).
#[test]
fn dense_oracle_heat_column_closed_form() {
    let g = grid(4, 48);
    let params = PhysParams::new(0.4, 0.5, 0.8, 1.1).unwrap();
    // slot m=16 sits at xi = 16*dxi = 2 exactly.
    let mut st2 = LinearState::zeros(g, params);
    st2.theta.set_mode(0, 16, c(1.0, 0.0));
    st2.w.set_mode(0, 16, c(0.0, 2.0));
    st2.j.set_mode(0, 16, c(-1.0, 0.0));
    let out = dense_oracle(&st2, 0.5).unwrap();
    let ft = out.theta.mode(0, 16).norm();
    assert!(
        (ft - EXP_M16).abs() < 1e-12,
        "theta heat factor {ft} vs {EXP_M16}"
    );
    let fw = out.w.mode(0, 16).norm() / 2.0;
    assert!((fw - (-0.4f64 * 4.0 * 0.5).exp()).abs() < 1e-12);
    let fj = out.j.mode(0, 16).norm();
    assert!((fj - (-0.5f64 * 4.0 * 0.5).exp()).abs() < 1e-12);
}

fn field_norm(s: &LinearState) -> f64 {
    (s.theta.l2_norm().powi(2) + s.w.l2_norm().powi(2) + s.j.l2_norm().powi(2)).sqrt()
}

fn field_diff(a: &LinearState, b: &LinearState) -> f64 {
    let mut sum = 0.0f64;
    for i in 0..a.theta.grid.nx {
        for j in 0..a.theta.grid.ny {
            sum += (a.theta.coef[[i, j]] - b.theta.coef[[i, j]]).norm_sqr();
            sum += (a.w.coef[[i, j]] - b.w.coef[[i, j]]).norm_sqr();
            sum += (a.j.coef[[i, j]] - b.j.coef[[i, j]]).norm_sqr();
        }
    }
    (sum * a.theta.grid.cell_measure()).sqrt()
}

// Full remesh bookkeeping oracle: after n macro steps the theta column must
// equal the initial slots shifted by n*k with the exact closed-form damping
// factor along each characteristic, and nothing else.
#[test]
fn solver_theta_column_matches_per_slot_closed_form() {
    let g = grid(4, 64);
    let params = PhysParams::new(0.2, 0.2, 0.45, 1.1).unwrap();
    let k = 1i64;
    let st = packet_state(g, params, k, 8, 1.0);
    let t_final = 6.0 * g.dxi();
    let series = integrate_spectrum(&st, t_final, 1e-2).unwrap();
    let last = series.snapshots.last().unwrap();
    assert!((last.t - t_final).abs() < 1e-12);

    let ik = g.index_of_k(k).unwrap();
    let mut worst = 0.0f64;
    for jj in 0..g.ny {
        let m = g.m_of(jj);
        // The value now at label m started at label m + 6k.
        let expect = match g.index_of_m(m + 6 * k) {
            Some(src) => {
                let xi0 = g.xi_of(src);
                let damp = (-params.eta * dissipation_integral(k, xi0, 0.0, t_final)).exp();
                st.theta.coef[[ik, src]] * damp
            }
            None => c(0.0, 0.0),
        };
        worst = worst.max((last.theta.coef[[ik, jj]] - expect).norm());
    }
    assert!(worst < 1e-12, "remesh bookkeeping deviation {worst}");
}

// Pure transport is unitary: with all rates zeroed (validation only), the
// theta norm per column is constant while content stays in band.
#[test]
fn inviscid_transport_preserves_theta_norm() {
    let g = grid(6, 64);
    let params = PhysParams::new(0.5, 0.5, 0.5, 1.1).unwrap();
    let st = packet_state(g, params, 2, 8, 1.0);
    let opts = RunOptions {
        rates_override: Some(Rates::zero()),
        snapshot_stride: 1,
        ..RunOptions::default()
    };
    let series = integrate_spectrum_with(&st, 1.0, 1e-2, &opts).unwrap();
    let track = series.norm_track(2, linear_characteristics::NormKind::Theta).unwrap();
    let first = track[0];
    for (i, v) in track.iter().enumerate() {
        assert!(
            (v - first).abs() < 1e-12 * first,
            "theta norm drifted at sample {i}: {v} vs {first}"
        );
    }
}

#[test]
fn log_linear_fit_recovers_exact_exponential() {
    let times: Vec<f64> = (0..=80).map(|i| 0.5 * i as f64).collect();
    let vals: Vec<f64> = times.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
    let (rate, pref) = fit_log_linear(&times, &vals, (10.0, 20.0)).unwrap();
    assert!((rate - 0.7).abs() < 1e-9, "rate {rate}");
    assert!((pref - 3.0).abs() < 1e-9 * 3.0, "prefactor {pref}");

    let zeros = vec![0.0; times.len()];
    assert!(fit_log_linear(&times, &zeros, (10.0, 20.0)).is_none());
    assert!(fit_log_linear(&times[..2], &vals[..2], (0.0, 0.5)).is_none());
}

// Underflowed tails must be excluded: horizon sits where values drop below
// n_ref * 1e-240, and the fit over [h/2, h] still recovers the exact rate.
#[test]
fn fit_window_skips_underflowed_tail() {
    let times: Vec<f64> = (0..=320).map(|i| 0.5 * i as f64).collect();
    let vals: Vec<f64> = times.iter().map(|t| (-5.0 * t).exp()).collect();
    let h = underflow_horizon(&times, &vals, 1.0).unwrap();
    // exp(-5t) > 1e-240  <=>  t < 110.52...
    assert!((h - 110.5).abs() < 0.5, "horizon {h}");
    let (rate, _) = fit_log_linear(&times, &vals, (0.5 * h, h)).unwrap();
    assert!((rate - 5.0).abs() < 1e-9, "rate {rate}");

    let zeros = vec![0.0; times.len()];
    assert!(underflow_horizon(&times, &zeros, 1.0).is_none());
}
