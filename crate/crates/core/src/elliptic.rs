//! Jacobi elliptic functions at the fixed modulus k² = 1/2, which is the
//! only modulus needed by the cubic-oscillator closed form y'' = -(λ²/2)y³:
//! its bounded solutions are amplitude × cn(frequency·t + phase, k = 1/√2).
//!
//! Implementation: complete integrals by the arithmetic-geometric mean;
//! incomplete integrals by 32-node Gauss-Legendre quadrature (the integrand
//! 1/√(1 − sin²θ/2) is smooth and bounded); the amplitude function am(u) by
//! Newton inversion of the incomplete integral of the first kind. All
//! routines are accurate to a few ulps, which matters because downstream
//! residual checks difference these values with steps near 5e-3.

use std::sync::OnceLock;

/// Squared modulus used throughout.
pub const K2: f64 = 0.5;

/// 32-point Gauss-Legendre nodes and weights on [-1, 1], computed once by
/// Newton iteration on the Legendre polynomial recurrence.
fn gauss_legendre() -> &'static ([f64; 32], [f64; 32]) {
    static TABLE: OnceLock<([f64; 32], [f64; 32])> = OnceLock::new();
    TABLE.get_or_init(|| {
        const N: usize = 32;
        let mut nodes = [0.0; N];
        let mut weights = [0.0; N];
        for i in 0..N.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // evaluate P_N(x) and P_N'(x) by the three-term recurrence
                let mut p0 = 1.0;
                let mut p1 = x;
                for n in 2..=N {
                    let nf = n as f64;
                    let p2 = ((2.0 * nf - 1.0) * x * p1 - (nf - 1.0) * p0) / nf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[N - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[N - 1 - i] = w;
        }
        (nodes, weights)
    })
}

fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_legendre();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        s += w * f(mid + half * x);
    }
    s * half
}

fn dtheta(theta: f64) -> f64 {
    (1.0 - K2 * theta.sin().powi(2)).sqrt()
}

/// Incomplete elliptic integral of the first kind F(φ | k²=1/2).
pub fn incomplete_f(phi: f64) -> f64 {
    quad(|t| 1.0 / dtheta(t), 0.0, phi)
}

/// Incomplete elliptic integral of the second kind E(φ | k²=1/2).
pub fn incomplete_e(phi: f64) -> f64 {
    quad(dtheta, 0.0, phi)
}

/// Complete integrals (K, E) at k² = 1/2, by the arithmetic-geometric mean.
pub fn complete() -> (f64, f64) {
    static KE: OnceLock<(f64, f64)> = OnceLock::new();
    *KE.get_or_init(|| {
        let mut a = 1.0f64;
        let mut b = (1.0 - K2).sqrt();
        let mut c = K2.sqrt();
        let mut sum = 0.5 * c * c; // 2^{n-1} c_n² term for n = 0
        let mut pow = 0.5;
        // quadratic convergence reaches machine precision in ~5 iterations;
        // the iteration cap matters because rounding can leave a and b one
        // ulp apart forever, so a pure while-loop on c would never exit
        for _ in 0..40 {
            let an = 0.5 * (a + b);
            let bn = (a * b).sqrt();
            c = 0.5 * (a - b);
            a = an;
            b = bn;
            pow *= 2.0;
            sum += pow * c * c;
            if c.abs() < 1e-16 {
                break;
            }
        }
        let k = std::f64::consts::FRAC_PI_2 / a;
        let e = k * (1.0 - sum);
        (k, e)
    })
}

/// Jacobi amplitude am(u) for u ∈ [0, 2K], by Newton inversion of F.
fn am_principal(u: f64) -> f64 {
    let (k, _) = complete();
    debug_assert!((-1e-9..=2.0 * k + 1e-9).contains(&u));
    let mut phi = (std::f64::consts::PI * u / (2.0 * k)).clamp(0.0, std::f64::consts::PI);
    for _ in 0..50 {
        let r = incomplete_f(phi) - u;
        let step = r * dtheta(phi);
        phi = (phi - step).clamp(0.0, std::f64::consts::PI);
        if step.abs() < 1e-16 * (1.0 + phi.abs()) {
            break;
        }
    }
    phi
}

/// Reduce u to (n, r) with u = 2nK + r, r ∈ [0, 2K).
fn reduce(u: f64) -> (i64, f64) {
    let (k, _) = complete();
    let period = 2.0 * k;
    let n = (u / period).floor();
    let mut r = u - n * period;
    if r < 0.0 {
        r = 0.0;
    }
    if r >= period {
        r = period;
    }
    (n as i64, r)
}

/// Jacobi cn(u | k²=1/2), any real u.
pub fn cn(u: f64) -> f64 {
    let (n, r) = reduce(u);
    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * am_principal(r).cos()
}

/// The Jacobi epsilon function ε(u) = ∫₀ᵘ dn²(v) dv, any real u.
/// Quasi-periodic: ε(u + 2K) = ε(u) + 2E.
pub fn epsilon(u: f64) -> f64 {
    let (_, e) = complete();
    let (n, r) = reduce(u);
    2.0 * e * n as f64 + incomplete_e(am_principal(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numdiff;

    #[test]
    fn complete_integrals_match_quadrature() {
        let (k, e) = complete();
        assert!((k - incomplete_f(std::f64::consts::FRAC_PI_2)).abs() < 1e-14);
        assert!((e - incomplete_e(std::f64::consts::FRAC_PI_2)).abs() < 1e-14);
        // sanity bounds: π/2 < K < π/√2 and 1 < E < π/2 for 0 < k² < 1
        assert!(k > std::f64::consts::FRAC_PI_2 && k < 2.3);
        assert!(e > 1.0 && e < std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn cn_special_values_and_symmetry() {
        let (k, _) = complete();
        assert!((cn(0.0) - 1.0).abs() < 1e-15);
        assert!(cn(k).abs() < 1e-14);
        assert!((cn(2.0 * k) + 1.0).abs() < 1e-14);
        assert!((cn(4.0 * k) - 1.0).abs() < 1e-13);
        for u in [0.3, 1.1, 2.7, 5.9] {
            assert!((cn(-u) - cn(u)).abs() < 1e-13, "cn not even at {u}");
        }
    }

    #[test]
    fn epsilon_is_odd_and_quasi_periodic() {
        let (k, e) = complete();
        for u in [0.2, 0.9, 1.7, 3.3] {
            assert!((epsilon(-u) + epsilon(u)).abs() < 1e-13);
            assert!((epsilon(u + 2.0 * k) - epsilon(u) - 2.0 * e).abs() < 1e-13);
        }
    }

    #[test]
    fn epsilon_derivative_is_dn_squared() {
        // dn² = 1 − k²sn² = 1 − (1 − cn²)/2
        for u in [0.1, 0.8, 1.9, 3.4, -2.2] {
            let d = numdiff::deriv1(epsilon, u);
            let c = cn(u);
            let dn2 = 1.0 - K2 * (1.0 - c * c);
            assert!((d - dn2).abs() < 1e-9, "at {u}: {d} vs {dn2}");
        }
    }

    #[test]
    fn cn_satisfies_cubic_oscillator() {
        // at k² = 1/2: cn'' = -cn³
        for u in [0.2, 1.3, 2.6, 4.1, -1.7] {
            let dd = numdiff::deriv2(cn, u);
            let c = cn(u);
            assert!((dd + c * c * c).abs() < 1e-7, "at {u}: {dd} vs {}", -c * c * c);
        }
    }

    #[test]
    fn cn_sn_identity() {
        // sn = sin(am); check cn² + sn² = 1 through the principal branch
        let (k, _) = complete();
        for u in [0.0, 0.4, 0.9, 1.4, 1.9 * k] {
            let phi = am_principal(u);
            let s = phi.sin();
            let c = cn(u);
            assert!((c * c + s * s - 1.0).abs() < 1e-13);
        }
    }
}
