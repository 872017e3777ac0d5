//! Linear solution state: the three spectral fields plus clock and physics.

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_core::{GridSpec, PhysParams, SpectralField, C64};

/// Full spectral state of the linearized system at one instant. At sample
/// times the grid labels coincide with the instantaneous y-frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearState {
    pub theta: SpectralField,
    pub w: SpectralField,
    pub j: SpectralField,
    pub t: f64,
    pub params: PhysParams,
}

impl LinearState {
    pub fn zeros(grid: GridSpec, params: PhysParams) -> Self {
        Self {
            theta: SpectralField::zeros(grid),
            w: SpectralField::zeros(grid),
            j: SpectralField::zeros(grid),
            t: 0.0,
            params,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.theta.grid
    }

    pub fn is_finite(&self) -> bool {
        self.theta.is_finite() && self.w.is_finite() && self.j.is_finite()
    }

    /// Euclidean norm over all three fields.
    pub fn total_norm(&self) -> f64 {
        (self.theta.l2_norm().powi(2) + self.w.l2_norm().powi(2) + self.j.l2_norm().powi(2)).sqrt()
    }

    /// Columns (signed k) holding any content in any field.
    pub fn populated_ks(&self) -> Vec<i64> {
        let g = self.grid();
        let mut ks = Vec::new();
        for i in 0..g.nx {
            let nonzero = (0..g.ny).any(|j| {
                self.theta.coef[[i, j]].norm_sqr() > 0.0
                    || self.w.coef[[i, j]].norm_sqr() > 0.0
                    || self.j.coef[[i, j]].norm_sqr() > 0.0
            });
            if nonzero {
                ks.push(g.k_of(i));
            }
        }
        ks.sort_unstable();
        ks
    }
}

fn set_with_mirror(f: &mut SpectralField, k: i64, m: i64, v: C64) {
    f.set_mode(k, m, v);
    f.set_mode(-k, -m, v.conj());
}

/// Random y-localized initial data: per column, a few coherent Gaussian bumps
/// centered near y = 0 (far from the shear seam at |y| = ly/2), band-limited
/// to |m| <= max_m, with exact Hermitian mirrors so the fields are real.
///
/// The spectral envelope exp(-(xi sigma)^2 / 2) has sigma >= 2, so the hard
/// band cut is invisible (< 1e-10 of the peak) once max_m dxi >= 3.5. Smaller
/// max_m still yields valid band-limited data, but with edge tails that reach
/// the seam; route-comparison tests must use the larger band.
///
/// `ks` lists the columns to fill; entries must be >= 0 (mirrors are implied).
pub fn localized_random_state(
    grid: GridSpec,
    params: PhysParams,
    ks: &[i64],
    max_m: i64,
    seed: u64,
) -> LinearState {
    assert!(ks.iter().all(|&k| k >= 0), "list non-negative k; mirrors are implied");
    assert!(max_m > 0 && max_m < grid.ny as i64 / 2, "band must sit inside the grid");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = Uniform::new(-grid.ly / 16.0, grid.ly / 16.0);
    let width = Uniform::new(2.0, 3.0);
    let mut st = LinearState::zeros(grid, params);

    let fill = |f: &mut SpectralField, rng: &mut ChaCha8Rng, k: i64| {
        for _ in 0..3 {
            let amp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let y_c = center.sample(rng);
            let sigma = width.sample(rng);
            let lo = if k == 0 { 0 } else { -max_m };
            for m in lo..=max_m {
                let xi = m as f64 * grid.dxi();
                let envelope = (-0.5 * (xi * sigma) * (xi * sigma)).exp();
                let phase = C64::new(0.0, xi * y_c).exp();
                let v = f.mode(k, m) + amp * envelope * phase;
                set_with_mirror(f, k, m, v);
            }
        }
    };

    for &k in ks {
        fill(&mut st.theta, &mut rng, k);
        fill(&mut st.w, &mut rng, k);
        fill(&mut st.j, &mut rng, k);
    }
    // Mean mode is gauge-held; keep it out of random data.
    st.theta.set_mode(0, 0, C64::new(0.0, 0.0));
    st.w.set_mode(0, 0, C64::new(0.0, 0.0));
    st.j.set_mode(0, 0, C64::new(0.0, 0.0));
    st.theta.enforce_reality();
    st.w.enforce_reality();
    st.j.enforce_reality();
    st
}

/// Real Gaussian temperature packet (theta only): one bump of spectral width
/// `1/sigma` centered at y = 0 in each requested column.
pub fn gaussian_theta_state(
    grid: GridSpec,
    params: PhysParams,
    ks: &[i64],
    sigma: f64,
    max_m: i64,
) -> LinearState {
    assert!(ks.iter().all(|&k| k >= 0), "list non-negative k; mirrors are implied");
    assert!(sigma > 0.0 && max_m > 0 && max_m < grid.ny as i64 / 2);
    let mut st = LinearState::zeros(grid, params);
    for &k in ks {
        let lo = if k == 0 { 0 } else { -max_m };
        for m in lo..=max_m {
            if k == 0 && m == 0 {
                continue;
            }
            let xi = m as f64 * grid.dxi();
            let v = C64::new((-0.5 * (xi * sigma) * (xi * sigma)).exp(), 0.0);
            set_with_mirror(&mut st.theta, k, m, v);
        }
    }
    st.theta.enforce_reality();
    st
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(8, 64, 16.0 * std::f64::consts::PI, true).unwrap()
    }

    #[test]
    fn random_state_is_real_and_band_limited() {
        let params = PhysParams::new(0.5, 0.5, 0.5, 1.1).unwrap();
        let st = localized_random_state(grid(), params, &[0, 1, 2], 8, 7);
        assert!(st.theta.reality_error() < 1e-14);
        assert!(st.w.reality_error() < 1e-14);
        assert!(st.j.reality_error() < 1e-14);
        let g = st.grid();
        for i in 0..g.nx {
            for j in 0..g.ny {
                if g.m_of(j).abs() > 8 {
                    assert_eq!(st.theta.coef[[i, j]], C64::new(0.0, 0.0));
                }
                if g.k_of(i).abs() > 2 {
                    assert_eq!(st.theta.coef[[i, j]], C64::new(0.0, 0.0));
                }
            }
        }
        assert_eq!(st.theta.mode(0, 0), C64::new(0.0, 0.0));
        assert_eq!(st.populated_ks(), vec![-2, -1, 0, 1, 2]);
    }

    #[test]
    fn gaussian_theta_state_peaks_at_zero_frequency() {
        let params = PhysParams::new(1.0, 1.0, 1.0, 1.1).unwrap();
        let st = gaussian_theta_state(grid(), params, &[1], 1.0, 8);
        assert_eq!(st.theta.mode(1, 0), C64::new(1.0, 0.0));
        assert!(st.theta.mode(1, 4).norm() < st.theta.mode(1, 1).norm());
        assert_eq!(st.w.l2_norm(), 0.0);
        assert_eq!(st.j.l2_norm(), 0.0);
        assert!(st.theta.reality_error() < 1e-15);
    }
}
