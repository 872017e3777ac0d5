use crate::field::SpectralField;
use crate::C64;

/// x-derivative: multiply by `i k`.
pub fn dx(f: &SpectralField) -> SpectralField {
    let grid = f.grid;
    let mut out = SpectralField::zeros(grid);
    for i in 0..grid.nx {
        let ik = C64::new(0.0, grid.k_of(i) as f64);
        for j in 0..grid.ny {
            out.coef[[i, j]] = ik * f.coef[[i, j]];
        }
    }
    out
}

/// y-derivative: multiply by `i xi`.
pub fn dy(f: &SpectralField) -> SpectralField {
    let grid = f.grid;
    let mut out = SpectralField::zeros(grid);
    for j in 0..grid.ny {
        let ixi = C64::new(0.0, grid.xi_of(j));
        for i in 0..grid.nx {
            out.coef[[i, j]] = ixi * f.coef[[i, j]];
        }
    }
    out
}

/// `(-Laplacian)^{-1}`: divide by `k^2 + xi^2`, gauging the `(0,0)` mode to 0.
pub fn inv_neg_laplacian(f: &SpectralField) -> SpectralField {
    let grid = f.grid;
    let mut out = SpectralField::zeros(grid);
    for i in 0..grid.nx {
        let k = grid.k_of(i) as f64;
        for j in 0..grid.ny {
            let xi = grid.xi_of(j);
            let denom = k * k + xi * xi;
            if denom != 0.0 {
                out.coef[[i, j]] = f.coef[[i, j]] / denom;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn derivative_multipliers() {
        let grid = GridSpec::new(8, 8, 4.0, false).unwrap();
        let mut f = SpectralField::zeros(grid);
        f.set_mode(2, -1, C64::new(1.0, 0.0));
        assert!((dx(&f).mode(2, -1) - C64::new(0.0, 2.0)).norm() < 1e-15);
        let xi = -grid.dxi();
        assert!((dy(&f).mode(2, -1) - C64::new(0.0, xi)).norm() < 1e-15);
        // Laplacian inverse round-trips away from the gauge mode.
        let g = inv_neg_laplacian(&f);
        let denom = 4.0 + xi * xi;
        assert!((g.mode(2, -1) - C64::new(1.0 / denom, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn gauge_mode_stays_zero() {
        let grid = GridSpec::new(8, 8, 4.0, false).unwrap();
        let mut f = SpectralField::zeros(grid);
        f.set_mode(0, 0, C64::new(3.0, 1.0));
        assert_eq!(inv_neg_laplacian(&f).mode(0, 0), C64::new(0.0, 0.0));
    }
}
