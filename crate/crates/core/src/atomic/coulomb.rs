//! Coulomb phase shifts and the asymptotic form of the regular and irregular
//! Coulomb functions, used to match numerical continuum solutions.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Im ln Γ(z) on the continuous branch, Re z > 0.
fn ln_gamma(z: Complex64) -> Complex64 {
    const SHIFT: usize = 12;
    // Stirling series coefficients B_{2k} / (2k (2k-1)).
    const STIRLING: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let mut shifted = z;
    let mut log_product = Complex64::new(0.0, 0.0);
    for _ in 0..SHIFT {
        log_product += shifted.ln();
        shifted += 1.0;
    }
    let inv = 1.0 / shifted;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING {
        series += c * power;
        power *= inv2;
    }
    (shifted - 0.5) * shifted.ln() - shifted + 0.5 * (2.0 * PI).ln() + series - log_product
}

/// Coulomb phase `σ_L = arg Γ(L + 1 - iZ/k)` for an attractive charge `Z`.
pub fn coulomb_phase(z: f64, k: f64, l: u32) -> f64 {
    debug_assert!(k > 0.0);
    let eta = -z / k;
    if eta == 0.0 {
        return 0.0;
    }
    ln_gamma(Complex64::new(l as f64 + 1.0, eta)).im
}

/// Regular and irregular Coulomb functions `(F_L, G_L)` at large `ρ`.
///
/// `eta` is the Sommerfeld parameter (negative for attraction). The
/// asymptotic series is summed until its terms stop decreasing; if it has
/// not converged by then the radius is too small for matching.
pub fn coulomb_fg_asymptotic(l: u32, eta: f64, rho: f64) -> Result<(f64, f64)> {
    let ll = (l * (l + 1)) as f64;
    let sigma = if eta == 0.0 { 0.0 } else { ln_gamma(Complex64::new(l as f64 + 1.0, eta)).im };
    let theta = rho - eta * (2.0 * rho).ln() - l as f64 * PI / 2.0 + sigma;

    let (mut f, mut g) = (1.0, 0.0);
    let (mut fk, mut gk) = (1.0, 0.0);
    let mut last = f64::INFINITY;
    let mut converged = false;
    for k in 0..200 {
        let kf = k as f64;
        let a = (2.0 * kf + 1.0) * eta / ((2.0 * kf + 2.0) * rho);
        let b = (ll - kf * (kf + 1.0) + eta * eta) / ((2.0 * kf + 2.0) * rho);
        let (nf, ng) = (a * fk - b * gk, a * gk + b * fk);
        let size = nf.abs() + ng.abs();
        if size > last {
            break;
        }
        fk = nf;
        gk = ng;
        f += fk;
        g += gk;
        last = size;
        if size < 1e-16 * (f.abs() + g.abs()) {
            converged = true;
            break;
        }
    }
    if !converged && last > 1e-10 {
        return Err(Error::Grid(format!(
            "Coulomb asymptotic series did not converge at rho = {rho} (L = {l}, eta = {eta}); extend r_max"
        )));
    }
    let (s, c) = theta.sin_cos();
    Ok((g * c + f * s, f * c - g * s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// arg Γ(1 + iy) from the Weierstrass product: -γy + Σ (y/n - atan(y/n)).
    fn arg_gamma_product(y: f64) -> f64 {
        const EULER: f64 = 0.577_215_664_901_532_9;
        let n_terms = 2_000_000;
        let mut s = 0.0;
        for n in (1..=n_terms).rev() {
            let x = y / n as f64;
            s += x - x.atan();
        }
        // tail Σ_{n>N} (y/n)³/3
        let tail = y.powi(3) / (6.0 * (n_terms as f64).powi(2));
        -EULER * y + s + tail
    }

    #[test]
    fn zero_charge_has_zero_phase() {
        for l in 0..5 {
            assert_eq!(coulomb_phase(0.0, 1.3, l), 0.0);
        }
    }

    #[test]
    fn recurrence_between_partial_waves() {
        for &(z, k) in &[(1.0, 1.0), (3.0, 0.4), (1.0, 7.0)] {
            for l in 0..6 {
                let lhs = coulomb_phase(z, k, l + 1) - coulomb_phase(z, k, l);
                let rhs = (-z / k).atan2(l as f64 + 1.0);
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_product_formula() {
        let expected = arg_gamma_product(-1.0);
        assert_relative_eq!(coulomb_phase(1.0, 1.0, 0), expected, epsilon = 1e-11);
        assert_relative_eq!(expected, 0.301_640_320_467_533, epsilon = 1e-11);
    }

    #[test]
    fn free_limit_is_riccati_bessel() {
        let rho = 30.0;
        let (f0, g0) = coulomb_fg_asymptotic(0, 0.0, rho).unwrap();
        assert_relative_eq!(f0, rho.sin(), epsilon = 1e-14);
        assert_relative_eq!(g0, rho.cos(), epsilon = 1e-14);
        let (f1, _) = coulomb_fg_asymptotic(1, 0.0, rho).unwrap();
        assert_relative_eq!(f1, rho.sin() / rho - rho.cos(), epsilon = 1e-13);
    }

    #[test]
    fn wronskian_is_one() {
        for &(l, eta) in &[(0u32, -1.0), (2, -0.5), (3, -2.0)] {
            let (rho, h) = (80.0, 1e-4);
            let (f, g) = coulomb_fg_asymptotic(l, eta, rho).unwrap();
            let (fp, _) = coulomb_fg_asymptotic(l, eta, rho + h).unwrap();
            let (fm, _) = coulomb_fg_asymptotic(l, eta, rho - h).unwrap();
            let (_, gp) = coulomb_fg_asymptotic(l, eta, rho + h).unwrap();
            let (_, gm) = coulomb_fg_asymptotic(l, eta, rho - h).unwrap();
            let w = (fp - fm) / (2.0 * h) * g - f * (gp - gm) / (2.0 * h);
            assert!((w - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn small_radius_is_rejected() {
        assert!(coulomb_fg_asymptotic(3, -10.0, 2.0).is_err());
    }
}
