//! Central finite differences with one level of Richardson extrapolation.
//!
//! Used by the self-verification oracles (Christoffel symbols, Killing
//! residuals, exterior derivatives, curve derivatives). Step sizes follow
//! the standard optimal-order tradeoff for the respective derivative order.

/// Base step for Richardson-extrapolated first derivatives.
pub fn step_first(coord: f64) -> f64 {
    f64::EPSILON.cbrt() * coord.abs().max(1.0)
}

/// Base step for Richardson-extrapolated second derivatives.
pub fn step_second(coord: f64) -> f64 {
    5e-3 * coord.abs().max(1.0)
}

/// First derivative: central difference, Richardson-extrapolated once.
/// Error is O(h^4) truncation + O(eps/h) roundoff.
pub fn deriv1<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = step_first(x);
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let coarse = d(h);
    let fine = d(h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Second derivative: central 3-point stencil, Richardson-extrapolated
/// twice (error O(h^6)), which keeps the truncation error of steep
/// exponential curves below the 1e-6 classification tolerance.
pub fn deriv2<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = step_second(x);
    let d = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    let (d1, d2, d3) = (d(h), d(h / 2.0), d(h / 4.0));
    let e1 = (4.0 * d2 - d1) / 3.0;
    let e2 = (4.0 * d3 - d2) / 3.0;
    (16.0 * e2 - e1) / 15.0
}

/// Partial derivative of a scalar field on R^3 along coordinate axis `axis`.
pub fn partial<F: Fn([f64; 3]) -> f64>(f: F, p: [f64; 3], axis: usize) -> f64 {
    deriv1(
        |s| {
            let mut q = p;
            q[axis] = s;
            f(q)
        },
        p[axis],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deriv1_matches_analytic() {
        // the roundoff floor at h = eps^(1/3) is a few parts in 1e11
        let d = deriv1(|x| x.sin(), 0.7);
        assert!((d - 0.7f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn deriv2_matches_analytic() {
        let d = deriv2(|x| x.exp(), 1.3);
        assert!((d - 1.3f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn partial_picks_the_right_axis() {
        let d = partial(|p| p[0] * p[1] * p[1], [2.0, 3.0, -1.0], 1);
        assert!((d - 12.0).abs() < 5e-9);
    }
}
