//! Root of the branch-switch cubic.

/// Positive root of `nu * xi * (k^2 + xi^2) = 96 |k|` for one `(nu, k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiZero {
    pub nu: f64,
    pub k: i64,
    pub xi0: f64,
}

impl XiZero {
    /// `|nu xi0 (k^2 + xi0^2) - 96|k|| / (96|k|)`.
    pub fn residual_rel(&self) -> f64 {
        let absk = self.k.unsigned_abs() as f64;
        let kk = absk * absk;
        (self.nu * self.xi0 * (kk + self.xi0 * self.xi0) - 96.0 * absk).abs() / (96.0 * absk)
    }
}

/// Solves the strictly increasing cubic by Newton iteration started from the
/// asymptotic root `(96|k|/nu)^{1/3}`, safeguarded by the bracket
/// `[0, 96 nu^{-1} |k|^{-1}]` which always contains the root.
pub fn solve_xi0(nu: f64, k: i64) -> XiZero {
    assert!(nu > 0.0 && nu.is_finite(), "viscosity must be positive");
    assert!(k != 0, "the cubic degenerates at k = 0");
    let absk = k.unsigned_abs() as f64;
    let kk = absk * absk;
    let target = 96.0 * absk;
    let h = |x: f64| nu * x * (kk + x * x) - target;
    let (mut lo, mut hi) = (0.0_f64, 96.0 / (nu * absk));
    let mut x = (target / nu).cbrt().min(hi);
    for _ in 0..100 {
        let hx = h(x);
        if hx.abs() <= 1e-14 * target {
            break;
        }
        if hx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = hx / (nu * (kk + 3.0 * x * x));
        let next = x - step;
        x = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    XiZero { nu, k, xi0: x }
}
