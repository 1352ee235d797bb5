//! Two-state bound wave packet: the clock of a PANDA measurement.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::atomic::HalfInt;
use crate::error::{Error, Result};
use crate::pulse::SpectralPulse;
use crate::units::{au_to_ev, ev_to_au};

/// Default factor for the "much greater than" compatibility conditions.
pub const DEFAULT_MARGIN: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    pub n: u32,
    pub l: u32,
    pub m: i32,
    /// Total angular momentum, only set for fine-structure packets.
    pub j: Option<HalfInt>,
    /// Binding energy in a.u., negative.
    pub energy: f64,
    /// Real, positive preparation amplitude.
    pub amplitude: f64,
}

impl BoundState {
    pub fn new(n: u32, l: u32, m: i32, energy: f64, amplitude: f64) -> Result<Self> {
        let s = Self { n, l, m, j: None, energy, amplitude };
        s.validate()?;
        Ok(s)
    }

    /// Hydrogen-like level `-Z²/2n²`.
    pub fn hydrogenic(z: f64, n: u32, l: u32, m: i32, amplitude: f64) -> Result<Self> {
        Self::new(n, l, m, -z * z / (2.0 * (n * n) as f64), amplitude)
    }

    pub fn with_j(mut self, j: HalfInt) -> Result<Self> {
        self.j = Some(j);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.l >= self.n {
            return Err(Error::domain(format!("invalid quantum numbers n={}, l={}", self.n, self.l)));
        }
        if self.m.unsigned_abs() > self.l {
            return Err(Error::domain(format!("|m|={} exceeds l={}", self.m.abs(), self.l)));
        }
        if let Some(j) = self.j {
            let tl = 2 * self.l as i32;
            if j.is_integer() || (j.twice() != tl + 1 && j.twice() != tl - 1) {
                return Err(Error::domain(format!("j={j} cannot couple l={} with s=1/2", self.l)));
            }
        }
        if !(self.energy < 0.0) || !self.energy.is_finite() {
            return Err(Error::domain(format!("bound energy must be negative, got {}", self.energy)));
        }
        if !(self.amplitude > 0.0) || !self.amplitude.is_finite() {
            return Err(Error::domain(format!("amplitude must be positive, got {}", self.amplitude)));
        }
        Ok(())
    }
}

/// Coherent superposition of two bound states. `state1` is always the lower
/// level, so `ω_f1 - ω_f2 = ε₂ - ε₁ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacket {
    state1: BoundState,
    state2: BoundState,
    lifetime_inverse: f64,
}

impl WavePacket {
    /// Orders the states by energy and checks the packet invariants.
    /// Amplitudes must already satisfy `c1² + c2² = 1`.
    pub fn new(a: BoundState, b: BoundState) -> Result<Self> {
        a.validate()?;
        b.validate()?;
        if a.energy == b.energy {
            return Err(Error::domain("wave-packet energies are degenerate"));
        }
        if a.l % 2 != b.l % 2 {
            return Err(Error::domain(format!("states l={} and l={} differ in parity", a.l, b.l)));
        }
        let norm = a.amplitude * a.amplitude + b.amplitude * b.amplitude;
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("amplitudes are not normalized: c1²+c2² = {norm}")));
        }
        let (state1, state2) = if a.energy < b.energy { (a, b) } else { (b, a) };
        Ok(Self { state1, state2, lifetime_inverse: 0.0 })
    }

    /// Rescales the amplitudes to unit norm before validating.
    pub fn normalized(mut a: BoundState, mut b: BoundState) -> Result<Self> {
        let norm = (a.amplitude * a.amplitude + b.amplitude * b.amplitude).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain("amplitudes must be positive"));
        }
        a.amplitude /= norm;
        b.amplitude /= norm;
        Self::new(a, b)
    }

    /// Equal-weight hydrogenic `n₁l / n₂l` packet with `m = 0`.
    pub fn hydrogenic(z: f64, n1: u32, n2: u32, l: u32) -> Result<Self> {
        let c = 0.5f64.sqrt();
        Self::new(BoundState::hydrogenic(z, n1, l, 0, c)?, BoundState::hydrogenic(z, n2, l, 0, c)?)
    }

    pub fn state1(&self) -> &BoundState {
        &self.state1
    }

    pub fn state2(&self) -> &BoundState {
        &self.state2
    }

    pub fn states(&self) -> [&BoundState; 2] {
        [&self.state1, &self.state2]
    }

    pub fn lifetime_inverse(&self) -> f64 {
        self.lifetime_inverse
    }

    /// `Δω = ε₂ - ε₁ > 0`.
    pub fn splitting(&self) -> f64 {
        self.state2.energy - self.state1.energy
    }

    /// `I_p = |ε₁ + ε₂| / 2`.
    pub fn effective_binding(&self) -> f64 {
        (self.state1.energy + self.state2.energy).abs() / 2.0
    }

    pub fn beat_period(&self) -> f64 {
        2.0 * PI / self.splitting()
    }

    /// Photon frequency that lifts state `j` (0 or 1) to photoelectron
    /// energy `epsilon`.
    pub fn photon_frequency(&self, j: usize, epsilon: f64) -> f64 {
        epsilon - self.states()[j].energy
    }

    /// Mean photon frequency `(ω_f1 + ω_f2)/2 = ε + I_p` for photoelectron
    /// energy `epsilon`.
    pub fn mean_frequency(&self, epsilon: f64) -> f64 {
        epsilon + self.effective_binding()
    }

    pub fn to_file(&self) -> WavePacketFile {
        let state = |s: &BoundState| StateFile {
            n: s.n,
            l: s.l,
            m: s.m,
            j: s.j,
            energy_ev: au_to_ev(s.energy),
            amplitude: s.amplitude,
        };
        WavePacketFile { states: vec![state(&self.state1), state(&self.state2)], lifetime_inv: self.lifetime_inverse }
    }

    pub fn from_file(f: &WavePacketFile) -> Result<Self> {
        if f.states.len() != 2 {
            return Err(Error::config(format!("a wave packet needs exactly two states, got {}", f.states.len())));
        }
        if f.lifetime_inv != 0.0 {
            return Err(Error::config("finite wave-packet lifetime is not modeled; set lifetime_inv to 0"));
        }
        let state = |s: &StateFile| -> Result<BoundState> {
            let b = BoundState::new(s.n, s.l, s.m, ev_to_au(s.energy_ev), s.amplitude)?;
            match s.j {
                Some(j) => b.with_j(j),
                None => Ok(b),
            }
        };
        Self::new(state(&f.states[0])?, state(&f.states[1])?)
    }
}

/// JSON descriptor of a wave packet with energies in eV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavePacketFile {
    pub states: Vec<StateFile>,
    #[serde(default)]
    pub lifetime_inv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: u32,
    pub l: u32,
    pub m: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<HalfInt>,
    #[serde(rename = "energy_eV")]
    pub energy_ev: f64,
    pub amplitude: f64,
}

impl Serialize for WavePacket {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for WavePacket {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = WavePacketFile::deserialize(d)?;
        WavePacket::from_file(&f).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityCheck {
    pub name: String,
    /// Left side divided by right side of the "much greater than" relation.
    pub ratio: f64,
    pub required: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub checks: Vec<CompatibilityCheck>,
}

impl CompatibilityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CompatibilityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the three pulse/packet compatibility conditions: photon energy
/// above the binding, bandwidth above the splitting (shearing), and packet
/// lifetime above the pulse duration. The pulse duration is the
/// transform-limited value `4 ln 2 / Δω_X`. Never fails; a pulse without a
/// measurable bandwidth fails the bandwidth and lifetime checks.
pub fn validate_against_pulse(w: &WavePacket, p: &SpectralPulse, margin: f64) -> CompatibilityReport {
    let check = |name: &str, ratio: f64| CompatibilityCheck {
        name: name.to_string(),
        ratio,
        required: margin,
        pass: ratio >= margin,
    };
    let bandwidth = p.intensity_fwhm().unwrap_or(0.0);
    let duration = if bandwidth > 0.0 { 4.0 * 2f64.ln() / bandwidth } else { f64::INFINITY };
    let lifetime_ratio = if w.lifetime_inverse == 0.0 {
        if duration.is_finite() { f64::INFINITY } else { 0.0 }
    } else {
        1.0 / (w.lifetime_inverse * duration)
    };
    CompatibilityReport {
        checks: vec![
            check("photon_energy", p.centroid() / w.effective_binding()),
            check("shearing", bandwidth / w.splitting()),
            check("lifetime", lifetime_ratio),
        ],
    }
}
