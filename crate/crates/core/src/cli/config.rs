//! Scenario configuration. Every section is optional; commands fill in
//! defaults that reproduce a canonical scenario.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use super::Command;
use crate::atomic::{allowed_final_l, solve_bound, CentralPotential, ChannelTable, FanoParams, RadialGrid};
use crate::error::{Error, Result};
use crate::io::{read_json, Format};
use crate::panda::PacketChannels;
use crate::pulse::{synthesize_gaussian, FrequencyGrid, GaussianPulseSpec, SpectralPulse};
use crate::streak::{LaserField, MatrixElement};
use crate::units::{as2_to_au, as_to_au, ev_to_au, fs_to_au};
use crate::wavepacket::{WavePacket, WavePacketFile};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Must match the command line when given.
    pub command: Option<Command>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub pulse: Option<PulseSource>,
    pub wave_packet: Option<PacketSpec>,
    pub channels: Option<ChannelSpec>,
    #[serde(rename = "energies_eV")]
    pub energies_ev: Option<Range>,
    pub delays: Option<DelaySpec>,
    /// Relative Gaussian noise on the spectrogram; zero disables.
    #[serde(default)]
    pub noise_sigma: f64,
    pub theta_deg: Option<f64>,
    pub thetas_deg: Option<Range>,
    /// Spectrogram sidecar read by `panda-retrieve`.
    pub input: Option<PathBuf>,
    /// Pulse JSON used as ground truth by `panda-retrieve`.
    pub truth: Option<PathBuf>,
    pub zero_reference_as: Option<f64>,
    pub laser: Option<LaserSpec>,
    #[serde(rename = "ip_eV")]
    pub ip_ev: Option<f64>,
    pub matrix_element: Option<MatrixElement>,
    pub atom: Option<AtomSpec>,
    pub fano: Option<FanoSpec>,
    pub so: Option<SOSpec>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    /// Relative paths in the config resolve against the config's folder.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.input.iter_mut().for_each(fix);
        self.truth.iter_mut().for_each(fix);
        if let Some(PulseSource::File(p)) = &mut self.pulse {
            fix(p);
        }
        if let Some(ChannelSpec::Files { state1, state2 }) = &mut self.channels {
            fix(state1);
            fix(state2);
        }
        if let Some(so) = &mut self.so {
            if let Some(PulseSource::File(p)) = &mut so.laser {
                fix(p);
            }
        }
    }
}

/// Evenly spaced values, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Range {
    pub fn new(start: f64, end: f64, count: usize) -> Self {
        Self { start, end, count }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::config(format!("invalid range {self:?}")));
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.start + i as f64 * step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PulseSource {
    Gaussian(GaussianConfig),
    /// Unit magnitude with quadratic phase about `center_eV` (grid middle
    /// by default).
    Flat {
        #[serde(rename = "grid_eV")]
        grid_ev: [f64; 2],
        #[serde(default = "default_grid_points")]
        grid_points: usize,
        #[serde(default)]
        gdd_as2: f64,
        #[serde(rename = "center_eV")]
        center_ev: Option<f64>,
    },
    /// Pulse JSON as written by `pulse-synth`.
    File(PathBuf),
}

/// Invalid parameters in a config section are usage errors.
fn as_config<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Domain(m) => Error::Config(m),
        other => other,
    })
}

impl PulseSource {
    pub fn build(&self) -> Result<SpectralPulse> {
        as_config(self.build_inner())
    }

    fn build_inner(&self) -> Result<SpectralPulse> {
        match self {
            PulseSource::Gaussian(g) => g.build(),
            PulseSource::Flat { grid_ev, grid_points, gdd_as2, center_ev } => {
                if !(grid_ev[0] > 0.0) {
                    return Err(Error::config("pulse grid must start above zero"));
                }
                let grid = FrequencyGrid::uniform(ev_to_au(grid_ev[0]), ev_to_au(grid_ev[1]), *grid_points)?;
                let c = ev_to_au(center_ev.unwrap_or(0.5 * (grid_ev[0] + grid_ev[1])));
                let gdd = as2_to_au(*gdd_as2);
                let phase = grid.points().iter().map(|w| 0.5 * gdd * (w - c).powi(2)).collect();
                SpectralPulse::new(grid.clone(), vec![1.0; grid.len()], phase, 0.0)
            }
            PulseSource::File(p) => read_json(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianConfig {
    #[serde(rename = "center_eV")]
    pub center_ev: f64,
    #[serde(rename = "fwhm_eV")]
    pub fwhm_ev: f64,
    #[serde(default)]
    pub gdd_as2: f64,
    #[serde(default)]
    pub delay_as: f64,
    #[serde(default)]
    pub cep_rad: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Defaults to four FWHM either side of the center.
    #[serde(rename = "grid_eV")]
    pub grid_ev: Option<[f64; 2]>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

fn one() -> f64 {
    1.0
}

fn default_grid_points() -> usize {
    2001
}

impl GaussianConfig {
    pub fn new(center_ev: f64, fwhm_ev: f64) -> Self {
        Self {
            center_ev,
            fwhm_ev,
            gdd_as2: 0.0,
            delay_as: 0.0,
            cep_rad: 0.0,
            amplitude: 1.0,
            grid_ev: None,
            grid_points: default_grid_points(),
        }
    }

    pub fn build(&self) -> Result<SpectralPulse> {
        let [lo, hi] = self.grid_ev.unwrap_or([self.center_ev - 4.0 * self.fwhm_ev, self.center_ev + 4.0 * self.fwhm_ev]);
        if !(lo > 0.0) {
            return Err(Error::config(format!("pulse grid starts at {lo} eV; frequencies must be positive")));
        }
        let grid = FrequencyGrid::uniform(ev_to_au(lo), ev_to_au(hi), self.grid_points)?;
        let spec = GaussianPulseSpec {
            center: ev_to_au(self.center_ev),
            fwhm_bandwidth: ev_to_au(self.fwhm_ev),
            gdd: as2_to_au(self.gdd_as2),
            delay: as_to_au(self.delay_as),
            amplitude: self.amplitude,
            cep: self.cep_rad,
        };
        synthesize_gaussian(&spec, &grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PacketSpec {
    /// `n1 l` and `n2 l` hydrogen-like levels with `m = 0`, equal weights.
    Hydrogenic { z: f64, n1: u32, n2: u32, l: u32 },
    Custom(WavePacketFile),
}

impl PacketSpec {
    pub fn build(&self) -> Result<WavePacket> {
        as_config(match self {
            PacketSpec::Hydrogenic { z, n1, n2, l } => WavePacket::hydrogenic(*z, *n1, *n2, *l),
            PacketSpec::Custom(f) => WavePacket::from_file(f),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    /// Every allowed final `L` with unit radial element and zero phase.
    Unit,
    /// Coulomb waves of charge `z` from numerically solved bound states.
    Coulomb { z: f64 },
    /// Screened potential `-(z + a e^{-r/b})/r`.
    Screened { z: f64, a: f64, b: f64 },
    /// Channel tables written by `atom-xsec`, one per state.
    Files { state1: PathBuf, state2: PathBuf },
}

impl ChannelSpec {
    /// Channel tables for `w`, tabulated on `energies` when computed.
    pub fn build(&self, w: &WavePacket, energies: &[f64]) -> Result<PacketChannels> {
        let table = |j: usize| -> Result<ChannelTable> {
            let s = w.states()[j];
            match self {
                ChannelSpec::Unit => {
                    let ch: Vec<(u32, f64, f64)> = allowed_final_l(s.l).into_iter().map(|l| (l, 1.0, 0.0)).collect();
                    ChannelTable::constant(s.l, &ch)
                }
                ChannelSpec::Coulomb { z } => computed(&CentralPotential::coulomb(*z)?, s.n, s.l, energies),
                ChannelSpec::Screened { z, a, b } => computed(&CentralPotential::new(*z, *a, *b)?, s.n, s.l, energies),
                ChannelSpec::Files { state1, state2 } => {
                    let p = if j == 0 { state1 } else { state2 };
                    let f = std::fs::File::open(p)
                        .map_err(|e| Error::MissingArtifact(format!("{}: {e}", p.display())))?;
                    ChannelTable::read_csv(f)
                }
            }
        };
        Ok(PacketChannels::new(table(0)?, table(1)?))
    }
}

fn computed(pot: &CentralPotential, n: u32, l: u32, energies: &[f64]) -> Result<ChannelTable> {
    let e_max = energies.iter().copied().fold(0.0, f64::max);
    let grid = RadialGrid::for_energy(e_max, 300.0, 0.02)?;
    let orbital = solve_bound(pot, n, l, &grid)?;
    ChannelTable::compute(pot, &orbital, energies)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelaySpec {
    #[serde(default = "default_spp")]
    pub samples_per_period: usize,
    #[serde(default = "default_periods")]
    pub periods: usize,
    /// Explicit delays; overrides the two fields above.
    pub delays_fs: Option<Range>,
}

fn default_spp() -> usize {
    crate::panda::DEFAULT_SAMPLES_PER_PERIOD
}

fn default_periods() -> usize {
    crate::panda::DEFAULT_PERIODS
}

impl Default for DelaySpec {
    fn default() -> Self {
        Self { samples_per_period: default_spp(), periods: default_periods(), delays_fs: None }
    }
}

impl DelaySpec {
    /// Delays in a.u.; `period` is the beat period.
    pub fn build(&self, period: f64) -> Result<Vec<f64>> {
        match &self.delays_fs {
            Some(r) => Ok(r.values()?.into_iter().map(fs_to_au).collect()),
            None => {
                if self.samples_per_period == 0 || self.periods == 0 {
                    return Err(Error::config("delay sampling needs at least one sample and one period"));
                }
                let step = period / self.samples_per_period as f64;
                Ok((0..self.samples_per_period * self.periods).map(|k| k as f64 * step).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSpec {
    /// Peak vector potential (a.u.).
    pub a0_au: f64,
    #[serde(rename = "photon_eV")]
    pub photon_ev: f64,
    pub fwhm_fs: f64,
    #[serde(default)]
    pub cep_rad: f64,
}

impl LaserSpec {
    pub fn build(&self) -> Result<LaserField> {
        LaserField::new(self.a0_au, ev_to_au(self.photon_ev), fs_to_au(self.fwhm_fs), self.cep_rad)
            .map_err(|e| Error::config(e.to_string()))
    }
}

impl Default for LaserSpec {
    /// 800 nm, 25 fs, `A0 = 0.1`.
    fn default() -> Self {
        Self { a0_au: 0.1, photon_ev: 1.5498, fwhm_fs: 25.0, cep_rad: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub z: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "one")]
    pub b: f64,
    pub n: u32,
    pub l: u32,
}

impl Default for AtomSpec {
    fn default() -> Self {
        Self { z: 1.0, a: 0.0, b: 1.0, n: 1, l: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanoSpec {
    /// Asymmetry parameters for the two states.
    pub q: [f64; 2],
    /// Resonance position as a photoelectron energy.
    #[serde(rename = "resonance_eV")]
    pub resonance_ev: f64,
    #[serde(rename = "width_eV")]
    pub width_ev: f64,
}

impl FanoSpec {
    pub fn params(&self) -> Result<[FanoParams; 2]> {
        let er = ev_to_au(self.resonance_ev);
        let g = ev_to_au(self.width_ev);
        Ok([FanoParams::new(self.q[0], er, g)?, FanoParams::new(self.q[1], er, g)?])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SOSpec {
    /// Preparation pulse; defaults to a 1.6135 eV, 50 meV Gaussian.
    pub laser: Option<PulseSource>,
    /// Reduced radial elements, held constant over the scan.
    pub radial_s: f64,
    pub radial_d: f64,
    pub radial_bound: f64,
}

impl Default for SOSpec {
    fn default() -> Self {
        Self { laser: None, radial_s: 1.0, radial_d: 1.0, radial_bound: 1.0 }
    }
}
