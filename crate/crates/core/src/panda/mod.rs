//! Forward PANDA model: photoelectron quantum-beat spectrograms from a
//! two-state wave packet ionized by a delayed test pulse.

mod angle;
mod delay;
mod so;

pub use angle::{
    angle_integrated_terms, angle_map, angle_resolved_amplitude, angle_resolved_spectrogram, angle_resolved_terms,
    angular_emission, AngleMap, AngularEmission, PartialAmplitude, MAGIC_ANGLE_DEG,
};
pub use delay::{panda_delay, DelayCurve, DELAY_ZERO_CONVENTION};
pub use so::{so_spectrum, SOChannel, SOConfig, SORadial, SOSpectrum};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::atomic::{allowed_final_l, cos_theta_element, ChannelTable};
use crate::error::{Error, Result};
use crate::fit;
use crate::pulse::SpectralPulse;
use crate::units::au_to_ev;
use crate::wavepacket::{BoundState, WavePacket, WavePacketFile};

/// Default delay sampling: samples per beat period and number of periods.
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 8;
pub const DEFAULT_PERIODS: usize = 3;

/// Channel tables for the two wave-packet states, in the packet's order.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketChannels {
    pub state1: ChannelTable,
    pub state2: ChannelTable,
}

impl PacketChannels {
    pub fn new(state1: ChannelTable, state2: ChannelTable) -> Self {
        Self { state1, state2 }
    }

    pub fn get(&self, j: usize) -> &ChannelTable {
        if j == 0 {
            &self.state1
        } else {
            &self.state2
        }
    }

    pub fn map(self, f: impl Fn(ChannelTable) -> ChannelTable) -> Self {
        Self { state1: f(self.state1), state2: f(self.state2) }
    }

    fn check(&self, w: &WavePacket) -> Result<()> {
        for (j, s) in w.states().iter().enumerate() {
            let t = self.get(j);
            if t.initial_l() != s.l {
                return Err(Error::domain(format!(
                    "channel table {} starts from l={} but the state has l={}",
                    j + 1,
                    t.initial_l(),
                    s.l
                )));
            }
        }
        Ok(())
    }
}

/// Delay-independent parts of `P = a1 + a2 + b cos(Δω τ + theta0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeatTerms {
    pub a1: f64,
    pub a2: f64,
    /// Signed cross-term magnitude; a negative value carries a π that the
    /// matrix elements contributed.
    pub b: f64,
    pub theta0: f64,
}

impl BeatTerms {
    pub fn value(&self, d_omega: f64, tau: f64) -> f64 {
        self.a1 + self.a2 + self.b * (d_omega * tau + self.theta0).cos()
    }

    pub fn contrast(&self) -> f64 {
        let s = self.a1 + self.a2;
        if s > 0.0 {
            self.b.abs() / s
        } else {
            0.0
        }
    }

    /// Builds the terms from the two direct strengths, the pulse phase
    /// difference and the complex product of matrix elements. The phase of
    /// the product is folded into `(-π/2, π/2]`; the removed π goes into the
    /// sign of `b`.
    pub(crate) fn from_parts(a1: f64, a2: f64, field_product: f64, pulse_phase: f64, cross: Complex64) -> Self {
        let norm = cross.norm();
        if norm == 0.0 || field_product == 0.0 {
            return Self { a1, a2, b: 0.0, theta0: pulse_phase };
        }
        let mut arg = cross.arg();
        let mut sign = 1.0;
        if arg > PI / 2.0 {
            arg -= PI;
            sign = -1.0;
        } else if arg <= -PI / 2.0 {
            arg += PI;
            sign = -1.0;
        }
        Self { a1, a2, b: sign * 2.0 * field_product * norm, theta0: pulse_phase + arg }
    }
}

/// Dipole elements `⟨εL m|z|n l m⟩` (times any Fano dressing) from one state
/// at photoelectron energy `epsilon`, keyed by `(L, m)`.
pub(crate) fn dipole_elements(
    state: &BoundState,
    table: &ChannelTable,
    epsilon: f64,
) -> Result<Vec<((u32, i32), Complex64)>> {
    let dress = table.dressing(epsilon);
    Ok(table
        .at(epsilon)?
        .into_iter()
        .map(|c| ((c.l, state.m), dress * c.radial_integral * cos_theta_element(c.l, state.l, state.m)))
        .collect())
}

/// Pulse samples at the two photon frequencies that reach `epsilon`.
pub(crate) fn pulse_pair(w: &WavePacket, p: &SpectralPulse, epsilon: f64) -> Result<[(f64, f64); 2]> {
    let mut out = [(0.0, 0.0); 2];
    for (j, slot) in out.iter_mut().enumerate() {
        let omega = w.photon_frequency(j, epsilon);
        *slot = p.sample_polar(omega).map_err(|_| {
            Error::domain(format!(
                "photon energy {:.4} eV for state {} at {:.4} eV lies outside the pulse grid",
                au_to_ev(omega),
                j + 1,
                au_to_ev(epsilon)
            ))
        })?;
    }
    Ok(out)
}

/// Angle-integrated beat terms at photoelectron energy `epsilon`. Final
/// channels `(L, m)` add incoherently; the two states interfere within each.
pub fn beat_terms(w: &WavePacket, p: &SpectralPulse, channels: &PacketChannels, epsilon: f64) -> Result<BeatTerms> {
    channels.check(w)?;
    let [(m1, p1), (m2, p2)] = pulse_pair(w, p, epsilon)?;
    let [s1, s2] = w.states();
    let z1 = dipole_elements(s1, &channels.state1, epsilon)?;
    let z2 = dipole_elements(s2, &channels.state2, epsilon)?;
    let strength = |z: &[((u32, i32), Complex64)]| z.iter().map(|(_, v)| v.norm_sqr()).sum::<f64>();
    let a1 = (m1 * s1.amplitude).powi(2) * strength(&z1);
    let a2 = (m2 * s2.amplitude).powi(2) * strength(&z2);
    let cross: Complex64 = z1
        .iter()
        .filter_map(|(k, v1)| z2.iter().find(|(k2, _)| k2 == k).map(|(_, v2)| v1 * v2.conj()))
        .sum();
    Ok(BeatTerms::from_parts(a1, a2, m1 * m2 * s1.amplitude * s2.amplitude, p1 - p2, cross))
}

/// Optional additive Gaussian noise on `P`. `sigma` is relative to the
/// largest value in the spectrogram; noisy values are clipped at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

/// Short description of a pulse for artifact metadata (eV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSummary {
    #[serde(rename = "centroid_eV")]
    pub centroid_ev: f64,
    #[serde(rename = "fwhm_eV")]
    pub fwhm_ev: Option<f64>,
    #[serde(rename = "grid_eV")]
    pub grid_ev: [f64; 2],
    pub grid_points: usize,
    pub cep_rad: f64,
}

impl From<&SpectralPulse> for PulseSummary {
    fn from(p: &SpectralPulse) -> Self {
        Self {
            centroid_ev: au_to_ev(p.centroid()),
            fwhm_ev: p.intensity_fwhm().map(au_to_ev),
            grid_ev: [au_to_ev(p.grid().min()), au_to_ev(p.grid().max())],
            grid_points: p.grid().len(),
            cep_rad: p.cep(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrogramMeta {
    /// "panda", "panda-angle" or "streak".
    pub kind: String,
    /// Beat angular frequency Δω in a.u., when the spectrogram has one.
    pub splitting: Option<f64>,
    pub wave_packet: Option<WavePacketFile>,
    pub pulse: Option<PulseSummary>,
    pub theta_deg: Option<f64>,
    pub noise: Option<NoiseSpec>,
}

/// `P(ε, τ)` on an energy × delay grid, stored per energy column.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub energies: Vec<f64>,
    pub delays: Vec<f64>,
    /// `values[i][k]` at `energies[i]`, `delays[k]`.
    pub values: Vec<Vec<f64>>,
    pub meta: SpectrogramMeta,
}

impl Spectrogram {
    pub fn new(energies: Vec<f64>, delays: Vec<f64>, values: Vec<Vec<f64>>, meta: SpectrogramMeta) -> Result<Self> {
        if values.len() != energies.len() || values.iter().any(|c| c.len() != delays.len()) {
            return Err(Error::domain("spectrogram values do not match the energy and delay grids"));
        }
        if values.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::domain("spectrogram values must be finite and nonnegative"));
        }
        Ok(Self { energies, delays, values, meta })
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    /// Values at delay index `k` across all energies.
    pub fn row(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|c| c[k]).collect()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Adds seeded Gaussian noise; see `NoiseSpec`.
    pub fn with_noise(mut self, noise: NoiseSpec) -> Result<Self> {
        if !(noise.sigma >= 0.0) || !noise.sigma.is_finite() {
            return Err(Error::config(format!("noise sigma must be nonnegative, got {}", noise.sigma)));
        }
        let scale = noise.sigma * self.max_value();
        if scale > 0.0 {
            let dist = Normal::new(0.0, scale).map_err(|e| Error::config(e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
            for v in self.values.iter_mut().flatten() {
                *v = (*v + dist.sample(&mut rng)).max(0.0);
            }
        }
        self.meta.noise = Some(noise);
        Ok(self)
    }
}

/// `samples_per_period · periods` delays starting at zero, spaced by a
/// fraction of the beat period; the endpoint is not repeated.
pub fn delay_grid(w: &WavePacket, samples_per_period: usize, periods: usize) -> Vec<f64> {
    let step = w.beat_period() / samples_per_period as f64;
    (0..samples_per_period * periods).map(|k| k as f64 * step).collect()
}

pub fn default_delays(w: &WavePacket) -> Vec<f64> {
    delay_grid(w, DEFAULT_SAMPLES_PER_PERIOD, DEFAULT_PERIODS)
}

pub(crate) fn fill_spectrogram(
    energies: &[f64],
    delays: &[f64],
    d_omega: f64,
    terms: impl Fn(f64) -> Result<BeatTerms> + Sync,
) -> Result<Vec<Vec<f64>>> {
    energies
        .par_iter()
        .map(|&eps| {
            let t = terms(eps)?;
            // |b| ≤ a1 + a2 holds analytically; clip the rounding residue.
            Ok(delays.iter().map(|&tau| t.value(d_omega, tau).max(0.0)).collect())
        })
        .collect()
}

/// Angle-integrated spectrogram over `energies × delays` (a.u.).
pub fn spectrogram(
    w: &WavePacket,
    p: &SpectralPulse,
    channels: &PacketChannels,
    energies: &[f64],
    delays: &[f64],
) -> Result<Spectrogram> {
    let d_omega = w.splitting();
    fit::check_nyquist(delays, d_omega)?;
    let values = fill_spectrogram(energies, delays, d_omega, |eps| beat_terms(w, p, channels, eps))?;
    Spectrogram::new(
        energies.to_vec(),
        delays.to_vec(),
        values,
        SpectrogramMeta {
            kind: "panda".into(),
            splitting: Some(d_omega),
            wave_packet: Some(w.to_file()),
            pulse: Some(p.into()),
            ..Default::default()
        },
    )
}

/// Checks that every dipole-allowed final `L` is present for each state.
pub(crate) fn require_all_channels(w: &WavePacket, channels: &PacketChannels) -> Result<()> {
    channels.check(w)?;
    for (j, s) in w.states().iter().enumerate() {
        let present: Vec<u32> = channels.get(j).waves().iter().map(|wv| wv.l).collect();
        for l in allowed_final_l(s.l) {
            if !present.contains(&l) {
                return Err(Error::domain(format!("state {} lacks the L={l} continuum channel", j + 1)));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::FrequencyGrid;
    use approx::assert_relative_eq;

    fn toy() -> (WavePacket, SpectralPulse, PacketChannels) {
        let w = WavePacket::hydrogenic(1.0, 2, 3, 1).unwrap();
        let p = SpectralPulse::flat(FrequencyGrid::uniform(0.5, 5.0, 200).unwrap(), 1.0).unwrap();
        let t = ChannelTable::constant(1, &[(0, 1.0, 0.2), (2, 1.0, 0.7)]).unwrap();
        (w, p, PacketChannels::new(t.clone(), t))
    }

    #[test]
    fn equal_unit_elements() {
        let (w, p, _) = toy();
        let t = ChannelTable::constant(1, &[(0, 1.0, 0.0)]).unwrap();
        let ch = PacketChannels::new(t.clone(), t);
        let bt = beat_terms(&w, &p, &ch, 2.0).unwrap();
        assert_relative_eq!(bt.a1, bt.a2, epsilon = 1e-15);
        assert_relative_eq!(bt.b, 2.0 * bt.a1, epsilon = 1e-15);
        assert_eq!(bt.theta0, 0.0);
    }

    #[test]
    fn one_zero_element() {
        let (w, p, ch) = toy();
        let ch = PacketChannels::new(ch.state1.scaled(0.0), ch.state2);
        let bt = beat_terms(&w, &p, &ch, 2.0).unwrap();
        assert_eq!(bt.a1, 0.0);
        assert_eq!(bt.b, 0.0);
        assert!(bt.a2 > 0.0);
    }

    #[test]
    fn negative_product_goes_to_sign() {
        let (w, p, ch) = toy();
        let ch = PacketChannels::new(ch.state1.scaled(-1.0), ch.state2);
        let bt = beat_terms(&w, &p, &ch, 2.0).unwrap();
        assert!(bt.b < 0.0);
        assert!(bt.theta0.abs() < 1e-15);
    }

    #[test]
    fn out_of_band_is_domain_error() {
        let (w, p, ch) = toy();
        assert!(matches!(beat_terms(&w, &p, &ch, 10.0), Err(Error::Domain(_))));
    }

    #[test]
    fn spectrogram_shape_and_nyquist() {
        let (w, p, ch) = toy();
        let delays = default_delays(&w);
        assert_eq!(delays.len(), 24);
        let s = spectrogram(&w, &p, &ch, &[1.0, 2.0], &delays).unwrap();
        assert_eq!(s.values.len(), 2);
        assert!(s.min_value() >= 0.0);
        let coarse = delay_grid(&w, 4, 3);
        assert!(matches!(spectrogram(&w, &p, &ch, &[1.0], &coarse), Err(Error::Config(_))));
    }

    #[test]
    fn noise_is_seeded() {
        let (w, p, ch) = toy();
        let s = spectrogram(&w, &p, &ch, &[1.0, 2.0], &default_delays(&w)).unwrap();
        let a = s.clone().with_noise(NoiseSpec { sigma: 0.05, seed: 7 }).unwrap();
        let b = s.clone().with_noise(NoiseSpec { sigma: 0.05, seed: 7 }).unwrap();
        let c = s.clone().with_noise(NoiseSpec { sigma: 0.05, seed: 8 }).unwrap();
        assert_eq!(a.values, b.values);
        assert_ne!(a.values, c.values);
        assert!(a.min_value() >= 0.0);
    }
}
