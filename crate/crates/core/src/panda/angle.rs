//! Angle-resolved emission: coherent sums over partial waves with their
//! scattering phases.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::delay::DelayCurve;
use super::{
    dipole_elements, fill_spectrogram, pulse_pair, require_all_channels, BeatTerms, PacketChannels, Spectrogram,
    SpectrogramMeta,
};
use crate::atomic::{spherical_harmonic, ChannelTable};
use crate::error::Result;
use crate::fit;
use crate::numerics::gauss_legendre;
use crate::pulse::SpectralPulse;
use crate::wavepacket::{BoundState, WavePacket};

/// Root of `P₂(cos θ)`, in degrees.
pub const MAGIC_ANGLE_DEG: f64 = 54.735_610_317_245_35;

const ANGLE_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialAmplitude {
    pub l: u32,
    pub m: i32,
    pub amplitude: Complex64,
}

/// Partial-wave amplitudes `(-i)^L e^{iη_L} Y_Lm(θ) ⟨εL m|z|n l m⟩` from one
/// bound state at polar angle `theta` (azimuth zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularEmission {
    pub theta: f64,
    pub channels: Vec<PartialAmplitude>,
}

impl AngularEmission {
    pub fn amplitude(&self) -> Complex64 {
        self.channels.iter().map(|c| c.amplitude).sum()
    }

    /// `Σ_L |z_L|²`, the solid-angle integral of `|amplitude|²`.
    pub fn channel_sum(&self) -> f64 {
        self.channels
            .iter()
            .map(|c| {
                let y = spherical_harmonic(c.l, c.m, self.theta);
                if y == 0.0 {
                    f64::NAN
                } else {
                    (c.amplitude / y).norm_sqr()
                }
            })
            .sum()
    }
}

pub fn angular_emission(state: &BoundState, table: &ChannelTable, epsilon: f64, theta: f64) -> Result<AngularEmission> {
    let phases = table.at(epsilon)?;
    let channels = dipole_elements(state, table, epsilon)?
        .into_iter()
        .zip(phases)
        .map(|(((l, m), z), c)| {
            let weight = Complex64::new(0.0, -1.0).powu(l) * Complex64::from_polar(1.0, c.phase);
            PartialAmplitude { l, m, amplitude: weight * spherical_harmonic(l, m, theta) * z }
        })
        .collect();
    Ok(AngularEmission { theta, channels })
}

fn emissions(w: &WavePacket, channels: &PacketChannels, epsilon: f64, theta: f64) -> Result<[Complex64; 2]> {
    let [s1, s2] = w.states();
    Ok([
        angular_emission(s1, &channels.state1, epsilon, theta)?.amplitude(),
        angular_emission(s2, &channels.state2, epsilon, theta)?.amplitude(),
    ])
}

/// Complex amplitude per wave-packet state at `(epsilon, theta)`, including
/// the pulse sample and preparation amplitude.
pub fn angle_resolved_amplitude(
    w: &WavePacket,
    p: &SpectralPulse,
    channels: &PacketChannels,
    epsilon: f64,
    theta: f64,
) -> Result<[Complex64; 2]> {
    require_all_channels(w, channels)?;
    let pulse = pulse_pair(w, p, epsilon)?;
    let e = emissions(w, channels, epsilon, theta)?;
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for j in 0..2 {
        out[j] = Complex64::from_polar(pulse[j].0, pulse[j].1) * w.states()[j].amplitude * e[j];
    }
    Ok(out)
}

/// Beat terms of the differential yield at polar angle `theta`.
pub fn angle_resolved_terms(
    w: &WavePacket,
    p: &SpectralPulse,
    channels: &PacketChannels,
    epsilon: f64,
    theta: f64,
) -> Result<BeatTerms> {
    require_all_channels(w, channels)?;
    let [(m1, p1), (m2, p2)] = pulse_pair(w, p, epsilon)?;
    let [e1, e2] = emissions(w, channels, epsilon, theta)?;
    let (c1, c2) = (w.state1().amplitude, w.state2().amplitude);
    Ok(BeatTerms::from_parts(
        (m1 * c1).powi(2) * e1.norm_sqr(),
        (m2 * c2).powi(2) * e2.norm_sqr(),
        m1 * m2 * c1 * c2,
        p1 - p2,
        e1 * e2.conj(),
    ))
}

/// Beat terms of the yield integrated over solid angle, by 64-node
/// Gauss–Legendre quadrature in `cos θ`. Cross terms between different `m`
/// vanish under the azimuthal integral.
pub fn angle_integrated_terms(
    w: &WavePacket,
    p: &SpectralPulse,
    channels: &PacketChannels,
    epsilon: f64,
) -> Result<BeatTerms> {
    require_all_channels(w, channels)?;
    let [(m1, p1), (m2, p2)] = pulse_pair(w, p, epsilon)?;
    let (nodes, weights) = gauss_legendre(ANGLE_NODES);
    let (mut i1, mut i2, mut cross) = (0.0, 0.0, Complex64::new(0.0, 0.0));
    for (x, wt) in nodes.iter().zip(&weights) {
        let [e1, e2] = emissions(w, channels, epsilon, x.acos())?;
        i1 += wt * e1.norm_sqr();
        i2 += wt * e2.norm_sqr();
        cross += wt * e1 * e2.conj();
    }
    let azimuth = 2.0 * PI;
    if w.state1().m != w.state2().m {
        cross = Complex64::new(0.0, 0.0);
    }
    let (c1, c2) = (w.state1().amplitude, w.state2().amplitude);
    Ok(BeatTerms::from_parts(
        azimuth * (m1 * c1).powi(2) * i1,
        azimuth * (m2 * c2).powi(2) * i2,
        m1 * m2 * c1 * c2,
        p1 - p2,
        azimuth * cross,
    ))
}

/// Differential spectrogram at polar angle `theta` (radians).
pub fn angle_resolved_spectrogram(
    w: &WavePacket,
    p: &SpectralPulse,
    channels: &PacketChannels,
    energies: &[f64],
    delays: &[f64],
    theta: f64,
) -> Result<Spectrogram> {
    let d_omega = w.splitting();
    fit::check_nyquist(delays, d_omega)?;
    let values = fill_spectrogram(energies, delays, d_omega, |eps| angle_resolved_terms(w, p, channels, eps, theta))?;
    Spectrogram::new(
        energies.to_vec(),
        delays.to_vec(),
        values,
        SpectrogramMeta {
            kind: "panda-angle".into(),
            splitting: Some(d_omega),
            wave_packet: Some(w.to_file()),
            pulse: Some(p.into()),
            theta_deg: Some(theta.to_degrees()),
            noise: None,
        },
    )
}

/// PANDA delay over polar angle × energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleMap {
    /// Polar angles in radians.
    pub thetas: Vec<f64>,
    pub energies: Vec<f64>,
    /// One delay curve per angle.
    pub curves: Vec<DelayCurve>,
}

impl AngleMap {
    /// Sign of the delay at `(theta index, energy index)`: -1, 0 or 1, with
    /// `|τ| < tol` counted as zero and masked cells as zero.
    pub fn sign(&self, it: usize, ie: usize, tol: f64) -> i8 {
        let c = &self.curves[it];
        if c.mask[ie] || c.delay[ie].abs() < tol {
            0
        } else if c.delay[ie] > 0.0 {
            1
        } else {
            -1
        }
    }

    /// Delay at energy index `ie` as a function of angle.
    pub fn angular_cut(&self, ie: usize) -> Vec<f64> {
        self.curves.iter().map(|c| c.delay[ie]).collect()
    }
}

/// Delay map from the exact beat terms at each angle (no fitting).
pub fn angle_map(
    w: &WavePacket,
    p: &SpectralPulse,
    channels: &PacketChannels,
    energies: &[f64],
    thetas: &[f64],
) -> Result<AngleMap> {
    let d_omega = w.splitting();
    let curves = thetas
        .par_iter()
        .map(|&theta| {
            let terms = energies
                .iter()
                .map(|&eps| angle_resolved_terms(w, p, channels, eps, theta))
                .collect::<Result<Vec<_>>>()?;
            Ok(DelayCurve::from_terms(energies, &terms, d_omega))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AngleMap { thetas: thetas.to_vec(), energies: energies.to_vec(), curves })
}
