//! Laser-assisted photoionization in the strong-field approximation
//! (velocity gauge) and the classical streaking law it should reproduce.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::atomic::plane_wave_me;
use crate::error::{Error, Result};
use crate::numerics;
use crate::panda::{Spectrogram, SpectrogramMeta};
use crate::pulse::{analytic_signal, SpectralPulse};

/// Minimum time samples per XUV period.
pub const MIN_POINTS_PER_PERIOD: f64 = 10.0;

/// Vector potential `A_L(t) = A0 cos²(πt/2T) cos(ω_L t + cep)` for
/// `|t| < T`, zero outside. `T` is then the FWHM of the field envelope.
/// Polarized along z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserField {
    pub a0: f64,
    pub omega: f64,
    pub fwhm: f64,
    pub cep: f64,
}

impl LaserField {
    pub fn new(a0: f64, omega: f64, fwhm: f64, cep: f64) -> Result<Self> {
        if !(a0 >= 0.0) || !(omega > 0.0) || !(fwhm > 0.0) || !cep.is_finite() {
            return Err(Error::domain(format!("invalid laser field A0={a0}, omega={omega}, fwhm={fwhm}")));
        }
        Ok(Self { a0, omega, fwhm, cep })
    }

    pub fn off() -> Self {
        Self { a0: 0.0, omega: 1.0, fwhm: 1.0, cep: 0.0 }
    }

    pub fn envelope(&self, t: f64) -> f64 {
        if t.abs() >= self.fwhm {
            0.0
        } else {
            (PI * t / (2.0 * self.fwhm)).cos().powi(2)
        }
    }

    pub fn vector_potential(&self, t: f64) -> f64 {
        self.a0 * self.envelope(t) * (self.omega * t + self.cep).cos()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }
}

/// Running integrals of `A_L` and `A_L²` on a time grid, from which the
/// action follows for any momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionTable {
    pub times: Vec<f64>,
    a: Vec<f64>,
    int_a: Vec<f64>,
    int_a2: Vec<f64>,
}

impl ActionTable {
    pub fn new(laser: &LaserField, times: &[f64]) -> Result<Self> {
        if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("action grid must be increasing with at least two points"));
        }
        let a: Vec<f64> = times.iter().map(|&t| laser.vector_potential(t)).collect();
        let a2: Vec<f64> = a.iter().map(|v| v * v).collect();
        Ok(Self {
            times: times.to_vec(),
            int_a: numerics::cumulative_trapezoid(times, &a),
            int_a2: numerics::cumulative_trapezoid(times, &a2),
            a,
        })
    }

    /// `S(t_i) = ∫ [(k + A_L cos θ)² ... ]`: with `k_par = k cos θ_k`,
    /// `(k² / 2 + I_p)(t - t₀) + k_par ∫A_L + ½ ∫A_L²`.
    pub fn action_at(&self, i: usize, k: f64, k_par: f64, ip: f64) -> f64 {
        (0.5 * k * k + ip) * (self.times[i] - self.times[0]) + k_par * self.int_a[i] + 0.5 * self.int_a2[i]
    }

    pub fn vector_potential(&self) -> &[f64] {
        &self.a
    }
}

/// Action `S(t'; k)` along the polarization axis, by cumulative trapezoid
/// on `times` from its first point. `t` between nodes adds a partial
/// trapezoid.
pub fn action(k: f64, t: f64, laser: &LaserField, ip: f64, times: &[f64]) -> Result<f64> {
    if times.is_empty() || t < times[0] || t > times[times.len() - 1] {
        return Err(Error::domain(format!("time {t} outside the tabulated action range")));
    }
    let table = ActionTable::new(laser, times)?;
    let i = numerics::bracket(times, t);
    let integrand = |a: f64| 0.5 * (k + a).powi(2) + ip;
    let s_i = table.action_at(i, k, k, ip);
    Ok(s_i + 0.5 * (t - times[i]) * (integrand(table.a[i]) + integrand(laser.vector_potential(t))))
}

/// Transition matrix element `⟨k|k_z|i⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixElement {
    /// Set to one, as in idealized streaking pictures.
    Unit,
    /// Hydrogen-like 1s into a plane wave, charge `z`.
    Hydrogen1s { z: f64 },
}

impl MatrixElement {
    pub fn value(self, k: f64, theta_k: f64) -> f64 {
        match self {
            MatrixElement::Unit => 1.0,
            MatrixElement::Hydrogen1s { z } => plane_wave_me(k, theta_k, z),
        }
    }
}

/// XUV vector potential `A_X(t)` on a time grid, from `A_X(ω) = E_X(ω)/(iω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct XuvField {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Highest frequency with appreciable spectral weight.
    pub omega_max: f64,
}

impl XuvField {
    pub fn from_pulse(p: &SpectralPulse, times: &[f64]) -> Result<Self> {
        let x = p.grid().points();
        let magnitude: Vec<f64> = p.magnitude().iter().zip(x).map(|(m, w)| m / w).collect();
        let phase: Vec<f64> = p.phase().iter().map(|ph| ph - PI / 2.0).collect();
        let a = SpectralPulse::new(p.grid().clone(), magnitude, phase, p.cep())?;
        let values = analytic_signal(&a, times).into_iter().map(|z| z.re).collect();
        Ok(Self { times: times.to_vec(), values, omega_max: significant_max_frequency(p) })
    }

    pub fn check_resolution(&self) -> Result<()> {
        let dt = self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let per_period = 2.0 * PI / self.omega_max / dt;
        if per_period < MIN_POINTS_PER_PERIOD {
            return Err(Error::config(format!(
                "time step {dt:.4} a.u. gives {per_period:.1} points per XUV period; need {MIN_POINTS_PER_PERIOD}"
            )));
        }
        Ok(())
    }
}

fn significant_max_frequency(p: &SpectralPulse) -> f64 {
    let peak = p.magnitude().iter().copied().fold(0.0, f64::max);
    p.grid()
        .points()
        .iter()
        .zip(p.magnitude())
        .filter(|(_, m)| **m > 1e-3 * peak)
        .map(|(w, _)| *w)
        .fold(p.grid().min(), f64::max)
}

/// `c_k = (1/i) ⟨k|k_z|i⟩ ∫ A_X(t') e^{iS(t';k)} dt'` by the trapezoidal
/// rule on the XUV grid. `table` must share that grid.
pub fn sfa_amplitude(
    k: f64,
    theta_k: f64,
    xuv: &XuvField,
    table: &ActionTable,
    ip: f64,
    matrix: MatrixElement,
) -> Result<Complex64> {
    if table.times.len() != xuv.times.len() {
        return Err(Error::domain("action table and XUV field use different time grids"));
    }
    xuv.check_resolution()?;
    let k_par = k * theta_k.cos();
    let weights = crate::pulse::trapezoid_weights(&xuv.times);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, (ax, wt)) in xuv.values.iter().zip(&weights).enumerate() {
        if *ax == 0.0 {
            continue;
        }
        acc += Complex64::from_polar(ax * wt, table.action_at(i, k, k_par, ip));
    }
    Ok(Complex64::new(0.0, -1.0) * matrix.value(k, theta_k) * acc)
}

/// Time sampling around the XUV pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreakOptions {
    /// Half-width of the integration window around each delay (a.u.).
    pub half_window: f64,
    pub dt: f64,
    pub matrix: MatrixElement,
}

impl StreakOptions {
    /// Window of eight pulse durations plus the group-delay excursion,
    /// twenty points per period of the highest significant frequency.
    pub fn for_pulse(p: &SpectralPulse) -> Self {
        let fwhm = p.intensity_fwhm().unwrap_or(p.grid().max() - p.grid().min());
        let duration = 4.0 * 2f64.ln() / fwhm;
        let gd = crate::pulse::group_delay(p).unwrap_or_default();
        let spread = gd.iter().zip(p.magnitude()).filter(|(_, m)| **m > 1e-2).map(|(g, _)| g.abs()).fold(0.0, f64::max);
        Self {
            half_window: 8.0 * duration + spread,
            dt: 2.0 * PI / significant_max_frequency(p) / 20.0,
            matrix: MatrixElement::Unit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreakSpectrogram {
    /// Photoelectron energies × XUV delays, `|c_k|²` along the polarization.
    pub spectrogram: Spectrogram,
    pub laser: LaserField,
    pub ip: f64,
}

impl StreakSpectrogram {
    /// Energy centroid `Σ ε P / Σ P` per delay.
    pub fn centroids(&self) -> Vec<f64> {
        let s = &self.spectrogram;
        (0..s.delays.len())
            .map(|k| {
                let row = s.row(k);
                let total: f64 = row.iter().sum();
                row.iter().zip(&s.energies).map(|(p, e)| p * e).sum::<f64>() / total
            })
            .collect()
    }

    /// Energy-integrated yield per delay.
    pub fn yields(&self) -> Vec<f64> {
        (0..self.spectrogram.delays.len()).map(|k| self.spectrogram.row(k).iter().sum()).collect()
    }
}

/// Classical final energy `(p₀ - A_L(t₀))²/2` for initial momentum `p0`.
pub fn classical_energy(p0: f64, laser: &LaserField, t0: f64) -> f64 {
    0.5 * (p0 - laser.vector_potential(t0)).powi(2)
}

/// Streaking spectrogram along the polarization axis. The XUV pulse at
/// delay `τ` arrives at laser time `τ` (its own group delay added).
pub fn streak_spectrogram(
    xuv: &SpectralPulse,
    laser: &LaserField,
    ip: f64,
    energies: &[f64],
    delays: &[f64],
    opts: StreakOptions,
) -> Result<StreakSpectrogram> {
    if energies.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::domain("photoelectron energies must be positive"));
    }
    let n = (2.0 * opts.half_window / opts.dt).ceil() as usize + 1;
    let rel: Vec<f64> = (0..n).map(|i| -opts.half_window + i as f64 * opts.dt).collect();
    let field = XuvField::from_pulse(xuv, &rel)?;
    field.check_resolution()?;
    let rows = delays
        .par_iter()
        .map(|&tau| {
            let abs: Vec<f64> = rel.iter().map(|t| t + tau).collect();
            let table = ActionTable::new(laser, &abs)?;
            let shifted = XuvField { times: abs, values: field.values.clone(), omega_max: field.omega_max };
            energies
                .iter()
                .map(|&e| Ok(sfa_amplitude((2.0 * e).sqrt(), 0.0, &shifted, &table, ip, opts.matrix)?.norm_sqr()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let values = (0..energies.len()).map(|i| rows.iter().map(|r| r[i]).collect()).collect();
    let spectrogram = Spectrogram::new(
        energies.to_vec(),
        delays.to_vec(),
        values,
        SpectrogramMeta { kind: "streak".into(), pulse: Some(xuv.into()), ..Default::default() },
    )?;
    Ok(StreakSpectrogram { spectrogram, laser: *laser, ip })
}
