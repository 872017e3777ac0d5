use crate::field::SpectralField;
use crate::C64;

/// Velocity (or magnetic field) from vorticity (or current density):
/// per mode `uhat1 = i xi/(k^2+xi^2) what`, `uhat2 = -i k/(k^2+xi^2) what`,
/// with the `(0,0)` mode gauged to zero. The result is divergence-free
/// exactly: `i k uhat1 + i xi uhat2 = 0`.
pub fn biot_savart(w: &SpectralField) -> (SpectralField, SpectralField) {
    let grid = w.grid;
    let mut u1 = SpectralField::zeros(grid);
    let mut u2 = SpectralField::zeros(grid);
    for i in 0..grid.nx {
        let k = grid.k_of(i) as f64;
        for j in 0..grid.ny {
            let xi = grid.xi_of(j);
            let denom = k * k + xi * xi;
            if denom == 0.0 {
                continue;
            }
            let wh = w.coef[[i, j]];
            u1.coef[[i, j]] = C64::new(0.0, xi / denom) * wh;
            u2.coef[[i, j]] = C64::new(0.0, -k / denom) * wh;
        }
    }
    (u1, u2)
}

/// Keep only the x-average (k = 0 coefficients).
pub fn project_zero(f: &SpectralField) -> SpectralField {
    let mut out = SpectralField::zeros(f.grid);
    for j in 0..f.grid.ny {
        out.coef[[0, j]] = f.coef[[0, j]];
    }
    out
}

/// Drop the x-average (zero the k = 0 coefficients).
pub fn project_nonzero(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    for j in 0..f.grid.ny {
        out.coef[[0, j]] = C64::new(0.0, 0.0);
    }
    out
}

/// x-averaged velocity from the k = 0 vorticity column:
/// `uhat0(xi) = (i/xi) what(0, xi)`, zero at xi = 0. Independent code path
/// from [`biot_savart`]; the two must agree on the k = 0 column.
pub fn zero_mode_velocity(w: &SpectralField) -> Vec<C64> {
    let grid = w.grid;
    (0..grid.ny)
        .map(|j| {
            let xi = grid.xi_of(j);
            if xi == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                C64::new(0.0, 1.0 / xi) * w.coef[[0, j]]
            }
        })
        .collect()
}

/// Largest divergence residual `|i k uhat1 + i xi uhat2|` over all modes.
pub fn divergence_max(u1: &SpectralField, u2: &SpectralField) -> f64 {
    let grid = u1.grid;
    let mut worst = 0.0f64;
    for i in 0..grid.nx {
        let k = grid.k_of(i) as f64;
        for j in 0..grid.ny {
            let xi = grid.xi_of(j);
            let div = C64::new(0.0, k) * u1.coef[[i, j]] + C64::new(0.0, xi) * u2.coef[[i, j]];
            worst = worst.max(div.norm());
        }
    }
    worst
}
