//! The base profile used by every scaled symbol.

/// C^1 sigmoid rising from 0 to 1: `1/2 + g(x)/4` with `g(x) = x` on
/// `[-1, 1]` and `g(x) = sign(x) (2 - e^{1-|x|})` outside. The slope is
/// exactly `1/4` throughout the linear core and decays like `e^{-|x|}/4`
/// in the tails, so the value stays inside `[0, 1]` for every input.
pub fn phi_profile(x: f64) -> (f64, f64) {
    let (g, gp) = if x.abs() <= 1.0 {
        (x, 1.0)
    } else {
        let e = (1.0 - x.abs()).exp();
        (x.signum() * (2.0 - e), e)
    };
    (0.5 + 0.25 * g, 0.25 * gp)
}
