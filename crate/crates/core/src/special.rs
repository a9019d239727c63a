//! Riccati-Bessel functions u_l(x) = x j_l(x) and v_l(x) = x n_l(x)
//! (Neumann sign chosen so v_0 = cos x), with derivatives taken with
//! respect to the argument x = k r.
//!
//! Normalization: u_0 = sin x, v_0 = cos x, which gives the cross
//! Wronskian u' v - u v' = 1 for every l. With this choice the l > 0
//! phase-shift integrand denominator reduces to phi'^2 + k^2 phi^2
//! at l = 0.

use crate::error::{Error, Result};

/// Default cap on the angular momentum accepted by [`riccati_bessel`].
pub const ELL_MAX: u32 = 10;

/// u_l, v_l and their x-derivatives at a common argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiBesselValues {
    pub u: f64,
    pub u_prime: f64,
    pub v: f64,
    pub v_prime: f64,
}

/// (2n - 1)!! with (-1)!! = 1.
pub fn double_factorial_odd(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k >= 1 {
        acc *= (2 * k - 1) as f64;
        k -= 1;
    }
    acc
}

/// Riccati-Bessel pair at angular momentum `ell` and argument `x > 0`.
///
/// u_l is computed by upward recurrence for x >= l and by downward
/// (Miller) recurrence otherwise; v_l always upward, its stable direction.
pub fn riccati_bessel(ell: u32, x: f64) -> Result<RiccatiBesselValues> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("riccati_bessel: x = {x} must be > 0")));
    }
    if ell > ELL_MAX {
        return Err(Error::Domain(format!("riccati_bessel: ell = {ell} exceeds {ELL_MAX}")));
    }
    let (sin_x, cos_x) = x.sin_cos();

    // v_l: upward from v_{-1} = -sin, v_0 = cos
    let (v, v_below) = recur_up(ell, x, cos_x, -sin_x);
    let v_prime = if ell == 0 { -sin_x } else { v_below - (ell as f64 / x) * v };

    // u_l: regular solution
    let (u, u_below) = if (ell as f64) <= x {
        recur_up(ell, x, sin_x, cos_x)
    } else {
        miller_down(ell, x, sin_x, cos_x)
    };
    let u_prime = if ell == 0 { cos_x } else { u_below - (ell as f64 / x) * u };

    Ok(RiccatiBesselValues { u, u_prime, v, v_prime })
}

/// Upward recurrence f_{l+1} = (2l+1)/x f_l - f_{l-1}; returns (f_ell, f_{ell-1}).
fn recur_up(ell: u32, x: f64, f0: f64, f_minus1: f64) -> (f64, f64) {
    let mut below = f_minus1;
    let mut cur = f0;
    for l in 0..ell {
        let next = (2 * l + 1) as f64 / x * cur - below;
        below = cur;
        cur = next;
    }
    (cur, below)
}

/// Downward Miller recurrence for the regular solution, normalized against
/// the closed forms at l = 0 or l = 1 (whichever is away from a zero).
fn miller_down(ell: u32, x: f64, sin_x: f64, cos_x: f64) -> (f64, f64) {
    let start = ell + 28;
    let mut above = 0.0f64;
    let mut cur = 1e-200f64;
    let mut f_ell = 0.0;
    let mut f_ell_m1 = 0.0;
    let mut f1 = 0.0;
    let mut f0 = 0.0;
    let mut l = start as i64;
    while l >= 0 {
        if l == ell as i64 {
            f_ell = cur;
        }
        if l == ell as i64 - 1 {
            f_ell_m1 = cur;
        }
        if l == 1 {
            f1 = cur;
        }
        if l == 0 {
            f0 = cur;
        }
        let next = (2 * l + 1) as f64 / x * cur - above;
        above = cur;
        cur = next;
        if cur.abs() > 1e250 {
            let scale = 1e-250;
            cur *= scale;
            above *= scale;
            f_ell *= scale;
            f_ell_m1 *= scale;
            f1 *= scale;
            f0 *= scale;
        }
        l -= 1;
    }
    // `cur` now holds the candidate for l = -1, not needed; normalize by a
    // closed form that is safely nonzero
    let norm = if sin_x.abs() >= 0.1 {
        sin_x / f0
    } else {
        u1_closed(x, sin_x, cos_x) / f1
    };
    (f_ell * norm, f_ell_m1 * norm)
}

/// u_1(x) = sin x / x - cos x, via its series for small x where the direct
/// form loses all significance.
fn u1_closed(x: f64, sin_x: f64, cos_x: f64) -> f64 {
    if x < 0.1 {
        let x2 = x * x;
        x2 / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0)))
    } else {
        sin_x / x - cos_x
    }
}

/// Logarithmic derivative (d/dx) ln K_l of the exponentially decaying free
/// solution at negative energy, K_l(x) ~ e^{-x} as x -> inf. Used to seed
/// inward integration when hunting bound states.
pub(crate) fn riccati_k_log_derivative(ell: u32, x: f64) -> f64 {
    // s_l = e^x K_l satisfies the same recurrence as K_l
    let mut below = 1.0f64; // s_{-1} = s_0
    let mut cur = 1.0f64; // s_0 = 1
    for l in 0..ell {
        let next = below + (2 * l + 1) as f64 / x * cur;
        below = cur;
        cur = next;
    }
    // K'_l = -K_{l-1} - (l/x) K_l
    (-below - (ell as f64 / x) * cur) / cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_at_low_ell() {
        let x = std::f64::consts::FRAC_PI_2;
        let b = riccati_bessel(0, x).unwrap();
        assert!((b.u - 1.0).abs() < 1e-14);
        assert!(b.u_prime.abs() < 1e-14);
        assert!(b.v.abs() < 1e-14);
        assert!((b.v_prime + 1.0).abs() < 1e-14);

        let b = riccati_bessel(1, 1.0).unwrap();
        let u1 = 1.0f64.sin() / 1.0 - 1.0f64.cos();
        assert!((b.u - u1).abs() < 1e-14);
        assert!((b.u - 0.301169).abs() < 1e-6);
        // derivative closed form: u_1' = u_0 - u_1/x
        assert!((b.u_prime - (1.0f64.sin() - u1)).abs() < 1e-13);
        let v1 = 1.0f64.cos() / 1.0 + 1.0f64.sin();
        assert!((b.v - v1).abs() < 1e-13);
    }

    #[test]
    fn wronskian_identity_log_grid() {
        for ell in 0..=ELL_MAX {
            for i in 0..100 {
                let x = 1e-2 * (1e4f64 / 1e-2).powf(i as f64 / 99.0);
                let b = riccati_bessel(ell, x).unwrap();
                let w = b.u_prime * b.v - b.u * b.v_prime;
                assert!(
                    (w - 1.0).abs() < 1e-12,
                    "ell={ell} x={x}: wronskian {w}"
                );
            }
        }
    }

    #[test]
    fn wronskian_identity_small_x() {
        for ell in 0..=ELL_MAX {
            for &x in &[1e-6, 1e-4, 0.01, 1.0, 100.0] {
                let b = riccati_bessel(ell, x).unwrap();
                let w = b.u_prime * b.v - b.u * b.v_prime;
                assert!((w - 1.0).abs() < 1e-12, "ell={ell} x={x}: {w}");
            }
        }
    }

    #[test]
    fn small_x_limits() {
        for ell in 0..=6u32 {
            let x = 1e-3;
            let b = riccati_bessel(ell, x).unwrap();
            let u_lim = x.powi(ell as i32 + 1) / double_factorial_odd(ell as i64 + 1);
            let v_lim = double_factorial_odd(ell as i64) * x.powi(-(ell as i32));
            assert!((b.u / u_lim - 1.0).abs() < 1e-5, "ell={ell}: u {} vs {}", b.u, u_lim);
            assert!((b.v / v_lim - 1.0).abs() < 1e-5, "ell={ell}: v {} vs {}", b.v, v_lim);
        }
    }

    #[test]
    fn large_x_asymptotics() {
        let x = 1e4;
        for ell in 0..=ELL_MAX {
            let b = riccati_bessel(ell, x).unwrap();
            let phase = x - ell as f64 * std::f64::consts::FRAC_PI_2;
            assert!((b.u - phase.sin()).abs() < 1e-2, "ell={ell}");
            assert!((b.v - phase.cos()).abs() < 1e-2, "ell={ell}");
        }
    }

    #[test]
    fn upward_downward_agree() {
        // near the switchover both branches should produce the same value
        for ell in 1..=ELL_MAX {
            let x = ell as f64; // boundary: upward branch
            let up = recur_up(ell, x, x.sin(), x.cos());
            let down = miller_down(ell, x, x.sin(), x.cos());
            assert!((up.0 - down.0).abs() <= 1e-13 * (1.0 + up.0.abs()), "ell={ell}");
        }
    }

    #[test]
    fn reduction_to_s_wave_denominator() {
        // at l = 0: (k u' phi - u phi')^2 + (k v' phi - v phi')^2
        //         == phi'^2 + k^2 phi^2 for any (phi, phi')
        let samples = [
            (0.3, 1.1, 0.7, 2.0),
            (1.5, -0.4, 0.2, 0.9),
            (2.0, 0.8, -1.3, 5.5),
            (0.05, 3.0, 0.6, 11.0),
        ];
        for &(k, phi, dphi, r) in &samples {
            let b = riccati_bessel(0, k * r).unwrap();
            let wu = k * b.u_prime * phi - b.u * dphi;
            let wv = k * b.v_prime * phi - b.v * dphi;
            let lhs = wu * wu + wv * wv;
            let rhs = dphi * dphi + k * k * phi * phi;
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs));
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(riccati_bessel(0, 0.0).is_err());
        assert!(riccati_bessel(0, -1.0).is_err());
        assert!(riccati_bessel(ELL_MAX + 1, 1.0).is_err());
    }

    #[test]
    fn decaying_free_solution_log_derivative() {
        // l = 0: K_0 = e^{-x}, log derivative -1
        assert!((riccati_k_log_derivative(0, 3.0) + 1.0).abs() < 1e-14);
        // l = 1: K_1 = e^{-x}(1 + 1/x); d/dx ln K_1 = -1 - 1/(x(x+1))
        let x = 2.5;
        let expect = -1.0 - 1.0 / (x * (x + 1.0));
        assert!((riccati_k_log_derivative(1, x) - expect).abs() < 1e-13);
    }
}
