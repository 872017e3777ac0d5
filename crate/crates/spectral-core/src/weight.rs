use crate::field::SpectralField;

/// Shear-frame weight `(1 + k^2 + (xi + t k)^2)^{b/2}`.
///
/// The weight is transported by the shear: content carried along a
/// characteristic keeps a constant weight value, which is what makes the
/// weighted norms below time-consistent diagnostics.
pub fn lambda_symbol(t: f64, b: f64, k: i64, xi: f64) -> f64 {
    if b == 0.0 {
        return 1.0;
    }
    let kf = k as f64;
    let shifted = xi + t * kf;
    (1.0 + kf * kf + shifted * shifted).powf(b / 2.0)
}

/// `|| |D_x|^xpow Lambda_t^b f ||_{L2}` by Plancherel:
/// `sqrt( sum |k|^{2 xpow} Lambda^2b |fhat|^2 cell )`. `xpow > 0` annihilates
/// the k = 0 modes.
pub fn weighted_norm(f: &SpectralField, t: f64, b: f64, xpow: f64) -> f64 {
    assert!(xpow >= 0.0, "xpow must be nonnegative");
    let grid = f.grid;
    let mut sum = 0.0f64;
    for i in 0..grid.nx {
        let k = grid.k_of(i);
        let kfac = if xpow == 0.0 {
            1.0
        } else if k == 0 {
            0.0
        } else {
            (k.unsigned_abs() as f64).powf(2.0 * xpow)
        };
        if kfac == 0.0 {
            continue;
        }
        for j in 0..grid.ny {
            let lam = lambda_symbol(t, b, k, grid.xi_of(j));
            sum += kfac * lam * lam * f.coef[[i, j]].norm_sqr();
        }
    }
    (sum * grid.cell_measure()).sqrt()
}

/// `int_{t1}^{t2} ((xi0 - k s)^2 + k^2) ds` in closed form: the dissipation
/// exponent accumulated along the characteristic through `(k, xi0)`.
pub fn dissipation_integral(k: i64, xi0: f64, t1: f64, t2: f64) -> f64 {
    let kf = k as f64;
    let quad = if k == 0 {
        xi0 * xi0 * (t2 - t1)
    } else {
        let a1 = xi0 - kf * t1;
        let a2 = xi0 - kf * t2;
        (a1 * a1 * a1 - a2 * a2 * a2) / (3.0 * kf)
    };
    quad + kf * kf * (t2 - t1)
}
