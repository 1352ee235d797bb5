//! Spin-orbit wave packets: a laser pulse prepares `np_{1/2}` and `np_{3/2}`
//! coherently from `ns_{1/2}`, the test pulse ionizes into `εs_{1/2}`,
//! `εd_{3/2}` and `εd_{5/2}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atomic::{reduced_ck, reduced_ck_half, wigner_eckart_z, HalfInt};
use crate::error::{Error, Result};
use crate::pulse::SpectralPulse;
use crate::units::{au_to_ev, ev_to_au};

/// Largest accepted mismatch between the stated splitting and the
/// difference of the excitation energies.
const SPLIT_TOLERANCE_EV: f64 = 0.2e-3;

/// Relative mismatch of field magnitudes beyond which the closed form is
/// flagged as inapplicable.
const AMPLITUDE_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct SOConfig {
    /// Preparation pulse `E_L`.
    pub laser: SpectralPulse,
    /// Excitation energies of `j' = 1/2` and `j' = 3/2` from the ground state (a.u.).
    pub excitation: [f64; 2],
    pub ground_energy: f64,
    /// Fine-structure splitting (a.u.); overrides the excitation difference
    /// for the `j' = 3/2` level.
    pub so_split: f64,
}

impl SOConfig {
    pub fn new(laser: SpectralPulse, excitation: [f64; 2], ground_energy: f64, so_split: f64) -> Result<Self> {
        if !(ground_energy < 0.0) || !(so_split > 0.0) {
            return Err(Error::domain("need a bound ground state and a positive splitting"));
        }
        let mismatch = au_to_ev((excitation[1] - excitation[0]) - so_split).abs();
        if mismatch > SPLIT_TOLERANCE_EV {
            return Err(Error::domain(format!(
                "splitting {:.5} meV differs from the excitation difference by {:.3} meV",
                au_to_ev(so_split) * 1e3,
                mismatch * 1e3
            )));
        }
        for w in [excitation[0], excitation[0] + so_split] {
            laser.sample(w).map_err(|_| {
                Error::domain(format!("laser spectrum does not cover the {:.4} eV excitation", au_to_ev(w)))
            })?;
        }
        Ok(Self { laser, excitation, ground_energy, so_split })
    }

    /// Potassium 4s → 4p numbers: 1.610 / 1.617 eV excitation, −4.341 eV
    /// ground state, 7.15517 meV splitting.
    pub fn potassium(laser: SpectralPulse) -> Result<Self> {
        Self::new(laser, [ev_to_au(1.610), ev_to_au(1.617)], ev_to_au(-4.341), ev_to_au(7.15517e-3))
    }

    /// Energies of `np_{1/2}` and `np_{3/2}`.
    pub fn intermediate_energies(&self) -> [f64; 2] {
        let low = self.ground_energy + self.excitation[0];
        [low, low + self.so_split]
    }

    pub fn beat_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.so_split
    }
}

/// Uncoupled reduced radial elements `⟨εs‖r‖np⟩`, `⟨εd‖r‖np⟩`, `⟨np‖r‖ns⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SORadial {
    pub s: f64,
    pub d: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SOChannel {
    pub l: u32,
    pub j: HalfInt,
    pub values: Vec<f64>,
    /// Phase of the interference between the two intermediate paths, NaN
    /// when only one path reaches the channel.
    pub beat_phase: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SOSpectrum {
    pub energies: Vec<f64>,
    /// Interference phase `Θ(ε)` from the two pulses alone.
    pub theta: Vec<f64>,
    /// Brute-force sum over final `j`, for initial `m = +1/2`.
    pub total: Vec<f64>,
    /// Same for `m = -1/2`.
    pub total_minus: Vec<f64>,
    /// Closed form with the equal-magnitude assumptions.
    pub closed_form: Vec<f64>,
    pub channels: Vec<SOChannel>,
    pub warnings: Vec<String>,
}

impl SOSpectrum {
    /// Largest relative difference between the `m = ±1/2` spectra.
    pub fn m_asymmetry(&self) -> f64 {
        self.total
            .iter()
            .zip(&self.total_minus)
            .map(|(a, b)| if a.abs() > 0.0 { (a - b).abs() / a.abs() } else { b.abs() })
            .fold(0.0, f64::max)
    }

    /// Largest relative difference between brute force and closed form.
    pub fn closed_form_error(&self) -> f64 {
        self.total
            .iter()
            .zip(&self.closed_form)
            .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

const FINAL_CHANNELS: [(u32, i32); 3] = [(0, 1), (2, 3), (2, 5)];

fn half(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

/// Coupled reduced element `⟨l j‖r‖l' j'⟩ ≈ ⟨l‖r‖l'⟩ ⟨j‖C¹‖j'⟩/⟨l‖C¹‖l'⟩`.
fn coupled(radial: f64, l: u32, j: HalfInt, lp: u32, jp: HalfInt) -> Result<f64> {
    Ok(radial * reduced_ck_half(j, 1, jp)? / reduced_ck(l, 1, lp))
}

/// Amplitudes of the two intermediate paths into final `(l, j)` for initial
/// magnetic quantum number `m`, with the fields sampled at the photon
/// frequencies each path needs.
fn paths(
    l: u32,
    j: HalfInt,
    m: HalfInt,
    radial: &SORadial,
    fields_x: [Complex64; 2],
    fields_l: [Complex64; 2],
) -> Result<[Complex64; 2]> {
    let r_final = if l == 0 { radial.s } else { radial.d };
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (k, jp) in [half(1), half(3)].into_iter().enumerate() {
        let z_bound = wigner_eckart_z(jp, m, half(1), coupled(radial.bound, 1, jp, 0, half(1))?);
        let z_final = wigner_eckart_z(j, m, jp, coupled(r_final, l, j, 1, jp)?);
        // (-e/iħ)² = -1 in atomic units.
        out[k] = -fields_x[k] * fields_l[k] * z_final * z_bound;
    }
    Ok(out)
}

fn fold_phase(c: Complex64) -> f64 {
    let a = c.arg();
    if a > std::f64::consts::FRAC_PI_2 {
        a - std::f64::consts::PI
    } else if a <= -std::f64::consts::FRAC_PI_2 {
        a + std::f64::consts::PI
    } else {
        a
    }
}

struct Point {
    theta: f64,
    total: [f64; 2],
    closed: f64,
    channels: [(f64, f64); 3],
    x_mismatch: f64,
}

/// Photoelectron spectrum of the spin-orbit scheme at photoelectron
/// energies `energies`, summed incoherently over final `j`. `radial` gives
/// the reduced radial elements per energy.
pub fn so_spectrum(
    cfg: &SOConfig,
    p: &SpectralPulse,
    radial: impl Fn(f64) -> SORadial + Sync,
    energies: &[f64],
) -> Result<SOSpectrum> {
    let [e_half, e_three] = cfg.intermediate_energies();
    let laser = [
        cfg.laser.sample(e_half - cfg.ground_energy)?,
        cfg.laser.sample(e_three - cfg.ground_energy)?,
    ];
    let l_mismatch = (laser[0].norm() - laser[1].norm()).abs() / laser[0].norm().max(laser[1].norm());

    let points = energies
        .par_iter()
        .map(|&eps| -> Result<Point> {
            let r = radial(eps);
            let x = [p.sample(eps - e_half)?, p.sample(eps - e_three)?];
            let theta = (x[1] * laser[1] * (x[0] * laser[0]).conj()).arg();
            let mut total = [0.0; 2];
            let mut channels = [(0.0, f64::NAN); 3];
            for (mi, m) in [half(1), half(-1)].into_iter().enumerate() {
                for (ci, &(l, tj)) in FINAL_CHANNELS.iter().enumerate() {
                    let path = paths(l, half(tj), m, &r, x, laser)?;
                    let prob = (path[0] + path[1]).norm_sqr();
                    total[mi] += prob;
                    if mi == 0 {
                        let cross = path[1] * path[0].conj();
                        let phase = if cross.norm() > 1e-300 { fold_phase(cross) } else { f64::NAN };
                        channels[ci] = (prob, phase);
                    }
                }
            }
            let ex2 = x[0].norm() * x[1].norm();
            let el2 = laser[0].norm() * laser[1].norm();
            let closed = ex2 * el2 / 81.0
                * r.bound.powi(2)
                * (r.s.powi(2) * (5.0 + 4.0 * theta.cos()) + r.d.powi(2) * 0.4 * (8.0 + theta.cos()));
            let x_mismatch = (x[0].norm() - x[1].norm()).abs() / x[0].norm().max(x[1].norm()).max(f64::MIN_POSITIVE);
            Ok(Point { theta, total, closed, channels, x_mismatch })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    if l_mismatch > AMPLITUDE_TOLERANCE {
        warnings.push(format!(
            "laser magnitudes at the two excitation lines differ by {:.2}%",
            100.0 * l_mismatch
        ));
    }
    let worst_x = points.iter().map(|p| p.x_mismatch).fold(0.0, f64::max);
    if worst_x > AMPLITUDE_TOLERANCE {
        warnings.push(format!(
            "test-pulse magnitudes one splitting apart differ by up to {:.2}%",
            100.0 * worst_x
        ));
    }

    let channels = FINAL_CHANNELS
        .iter()
        .enumerate()
        .map(|(ci, &(l, tj))| SOChannel {
            l,
            j: half(tj),
            values: points.iter().map(|p| p.channels[ci].0).collect(),
            beat_phase: points.iter().map(|p| p.channels[ci].1).collect(),
        })
        .collect();
    Ok(SOSpectrum {
        energies: energies.to_vec(),
        theta: points.iter().map(|p| p.theta).collect(),
        total: points.iter().map(|p| p.total[0]).collect(),
        total_minus: points.iter().map(|p| p.total[1]).collect(),
        closed_form: points.iter().map(|p| p.closed).collect(),
        channels,
        warnings,
    })
}
