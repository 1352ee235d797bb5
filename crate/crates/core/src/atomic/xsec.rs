//! Photoionization cross sections and the plane-wave hydrogen matrix element.

use rayon::prelude::*;
use std::f64::consts::PI;

use super::angular::cos_theta_element;
use super::radial::{radial_dipole, solve_continuum, BoundOrbital, CentralPotential};
use crate::error::Result;
use crate::units::{ALPHA, BOHR2_MB};

/// Dipole-allowed final orbital momenta from an initial `l`.
pub fn allowed_final_l(l: u32) -> Vec<u32> {
    if l == 0 {
        vec![1]
    } else {
        vec![l - 1, l + 1]
    }
}

/// `Σ_L |⟨εL m|z|nl m⟩|²` averaged over the initial `m`.
fn m_averaged_strength(l: u32, radial: &[(u32, f64)]) -> f64 {
    let ms = -(l as i32)..=(l as i32);
    let total: f64 = ms
        .map(|m| {
            radial
                .iter()
                .map(|&(big_l, r)| (r * cos_theta_element(big_l, l, m)).powi(2))
                .sum::<f64>()
        })
        .sum();
    total / (2 * l + 1) as f64
}

/// Cross section in megabarn for photoelectron energies `epsilons` (a.u.):
/// `σ = 4π² α ω Σ_L |⟨f|z|i⟩|² · a₀²[Mb]`, with `ω = ε + |E_nl|`.
pub fn cross_section(pot: &CentralPotential, orbital: &BoundOrbital, epsilons: &[f64]) -> Result<Vec<f64>> {
    epsilons
        .par_iter()
        .map(|&eps| {
            let radial = allowed_final_l(orbital.l)
                .into_iter()
                .map(|big_l| {
                    let c = solve_continuum(pot, eps, big_l, &orbital.grid)?;
                    Ok((big_l, radial_dipole(orbital, &c)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(cross_section_from_radial(orbital.l, orbital.energy, eps, &radial))
        })
        .collect()
}

/// Same formula for precomputed radial integrals `(L, ⟨εL|r|nl⟩)`.
pub fn cross_section_from_radial(l: u32, bound_energy: f64, epsilon: f64, radial: &[(u32, f64)]) -> f64 {
    let omega = epsilon + bound_energy.abs();
    4.0 * PI * PI * ALPHA * omega * m_averaged_strength(l, radial) * BOHR2_MB
}

/// `⟨k|k_z|1s⟩ = (2^{3/2}/π) β^{5/2} k cos θ_k / (k² + β²)²`, β = Z/a₀.
pub fn plane_wave_me(k: f64, theta_k: f64, z: f64) -> f64 {
    let beta = z;
    2f64.powf(1.5) / PI * beta.powf(2.5) * k * theta_k.cos() / (k * k + beta * beta).powi(2)
}
