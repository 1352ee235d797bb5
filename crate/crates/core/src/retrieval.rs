//! Inversion of PANDA spectrograms: beat phase per energy column, group
//! delay, and the spectral phase integrated from it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::fit;
use crate::numerics;
use crate::panda::Spectrogram;
use crate::pulse::{group_delay, FrequencyGrid, SpectralPulse};
use crate::units::{au_to_as, au_to_ev};
use crate::wavepacket::WavePacket;

pub use crate::fit::{unwrap, Continued};

/// Fitted beat of one energy column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnFit {
    pub amplitude: f64,
    pub phase: f64,
    pub offset: f64,
    pub contrast: f64,
}

/// Least-squares beat fit of every energy column at the known splitting.
pub fn extract_beat_phase(s: &Spectrogram, d_omega: f64) -> Result<Vec<ColumnFit>> {
    fit::check_fit_grid(&s.delays, d_omega)?;
    s.values
        .par_iter()
        .map(|col| {
            let f = fit::fit_beat(&s.delays, col, d_omega)?;
            Ok(ColumnFit { amplitude: f.amplitude(), phase: f.phase(), offset: f.offset, contrast: f.contrast() })
        })
        .collect()
}

/// Zero of the retrieved delay axis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum ZeroReference {
    /// Beat phase zero is delay zero.
    #[default]
    Natural,
    /// Subtract a control delay (a.u.).
    Control(f64),
}

impl ZeroReference {
    pub fn offset(self) -> f64 {
        match self {
            ZeroReference::Natural => 0.0,
            ZeroReference::Control(t) => t,
        }
    }
}

/// `τ(ω) = θ₀(ω)/Δω` minus the reference.
pub fn to_group_delay(phases: &[f64], d_omega: f64, zero_ref: ZeroReference) -> Vec<f64> {
    phases.iter().map(|p| p / d_omega - zero_ref.offset()).collect()
}

/// Mean photon frequency `ε + I_p` for each photoelectron energy.
pub fn mean_frequencies(w: &WavePacket, energies: &[f64]) -> Vec<f64> {
    energies.iter().map(|&e| w.mean_frequency(e)).collect()
}

/// Integrates the group delay from `anchor`. The flag is set when any
/// column on the integration path was bridged over a mask.
pub fn reconstruct_phase(
    gd: &[f64],
    grid: &FrequencyGrid,
    anchor: f64,
    phi0: f64,
    bridged: &[bool],
) -> Result<(Vec<f64>, bool)> {
    let phase = crate::pulse::phase_from_group_delay(gd, grid, anchor, phi0)?;
    // Every column lies on the path from the anchor to the columns beyond it.
    Ok((phase, bridged.iter().any(|&b| b)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub energies: Vec<f64>,
    /// Mean photon frequency per column.
    pub frequencies: Vec<f64>,
    pub beat_phase: Vec<f64>,
    pub branch: Vec<u8>,
    pub contrast: Vec<f64>,
    pub group_delay: Vec<f64>,
    pub spectral_phase: Vec<f64>,
    pub mask: Vec<bool>,
    pub bridged: Vec<bool>,
    /// Spectral phase relies on bridged columns.
    pub extrapolated: bool,
    pub splitting: f64,
    pub reference: ZeroReference,
    pub rms_error_vs_truth: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RetrievalOptions {
    pub zero_ref: ZeroReference,
    /// Anchor frequency for the phase integral; defaults to the middle
    /// column.
    pub anchor: Option<f64>,
    pub phi0: f64,
}

/// Fit, fold, convert and integrate: the whole inversion.
pub fn retrieve(s: &Spectrogram, w: &WavePacket, opts: RetrievalOptions) -> Result<RetrievalResult> {
    let d_omega = w.splitting();
    if s.energies.len() < 3 {
        return Err(Error::config("retrieval needs at least three energy columns"));
    }
    let fits = extract_beat_phase(s, d_omega)?;
    let mask: Vec<bool> = fits.iter().map(|f| !(f.contrast >= fit::CONTRAST_THRESHOLD)).collect();
    if mask.iter().all(|&m| m) {
        return Err(Error::domain("every energy column is below the contrast threshold"));
    }
    let raw: Vec<f64> = fits.iter().map(|f| f.phase).collect();
    let folded = fit::fold_branches(&raw, &mask);
    let gd = to_group_delay(&folded.phase, d_omega, opts.zero_ref);
    let frequencies = mean_frequencies(w, &s.energies);
    let grid = FrequencyGrid::new(frequencies.clone())?;
    let anchor = opts.anchor.unwrap_or(frequencies[frequencies.len() / 2]);
    let (spectral_phase, extrapolated) = reconstruct_phase(&gd, &grid, anchor, opts.phi0, &folded.bridged)?;
    Ok(RetrievalResult {
        energies: s.energies.clone(),
        frequencies,
        beat_phase: folded.phase,
        branch: folded.branch,
        contrast: fits.iter().map(|f| f.contrast).collect(),
        group_delay: gd,
        spectral_phase,
        mask,
        bridged: folded.bridged,
        extrapolated,
        splitting: d_omega,
        reference: opts.zero_ref,
        rms_error_vs_truth: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// RMS group-delay error after removing the mean offset (a.u.).
    pub rms: f64,
    /// Mean of retrieved minus true group delay (a.u.).
    pub offset: f64,
    /// Peak-to-peak span of the true group delay over the compared columns.
    pub span: f64,
    pub columns: usize,
}

/// Compares retrieved group delay with the truth on unmasked columns
/// inside the pulse grid, after removing the constant offset.
pub fn compare(truth: &SpectralPulse, result: &RetrievalResult) -> Result<Diagnostics> {
    let gd_true = group_delay(truth)?;
    let x = truth.grid().points();
    let pairs: Vec<(f64, f64)> = result
        .frequencies
        .iter()
        .zip(&result.group_delay)
        .zip(&result.mask)
        .filter(|((w, _), m)| !**m && truth.grid().contains(**w))
        .map(|((&w, &g), _)| (g, numerics::lerp_at(x, &gd_true, w)))
        .collect();
    if pairs.is_empty() {
        return Err(Error::domain("retrieval and truth share no unmasked frequencies"));
    }
    let n = pairs.len() as f64;
    let offset = pairs.iter().map(|(g, t)| g - t).sum::<f64>() / n;
    let rms = (pairs.iter().map(|(g, t)| (g - t - offset).powi(2)).sum::<f64>() / n).sqrt();
    let (lo, hi) = pairs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, t)| (lo.min(*t), hi.max(*t)));
    Ok(Diagnostics { rms, offset, span: hi - lo, columns: pairs.len() })
}

impl RetrievalResult {
    pub fn with_truth(mut self, truth: &SpectralPulse) -> Result<Self> {
        self.rms_error_vs_truth = Some(compare(truth, &self)?.rms);
        Ok(self)
    }

    /// JSON-facing copy in eV and as.
    pub fn to_file(&self) -> RetrievalFile {
        RetrievalFile {
            energies_ev: self.energies.iter().map(|&e| au_to_ev(e)).collect(),
            photon_ev: self.frequencies.iter().map(|&e| au_to_ev(e)).collect(),
            beat_phase_rad: self.beat_phase.clone(),
            branch: self.branch.clone(),
            contrast: self.contrast.clone(),
            group_delay_as: self.group_delay.iter().map(|&t| au_to_as(t)).collect(),
            spectral_phase_rad: self.spectral_phase.clone(),
            mask: self.mask.clone(),
            bridged: self.bridged.clone(),
            extrapolated: self.extrapolated,
            splitting_ev: au_to_ev(self.splitting),
            reference_as: au_to_as(self.reference.offset()),
            rms_error_as: self.rms_error_vs_truth.map(au_to_as),
        }
    }

    /// One row per energy column, `#` header line first.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# PANDA retrieval; splitting {:.6} eV; masked columns carry no phase claim", au_to_ev(self.splitting))?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "energy_eV",
            "photon_eV",
            "beat_phase_rad",
            "branch",
            "contrast",
            "group_delay_as",
            "spectral_phase_rad",
            "masked",
            "bridged",
        ])?;
        for i in 0..self.energies.len() {
            w.write_record([
                format!("{:.9}", au_to_ev(self.energies[i])),
                format!("{:.9}", au_to_ev(self.frequencies[i])),
                format!("{:.12e}", self.beat_phase[i]),
                self.branch[i].to_string(),
                format!("{:.6e}", self.contrast[i]),
                format!("{:.9e}", au_to_as(self.group_delay[i])),
                format!("{:.12e}", self.spectral_phase[i]),
                (self.mask[i] as u8).to_string(),
                (self.bridged[i] as u8).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalFile {
    #[serde(rename = "energies_eV")]
    pub energies_ev: Vec<f64>,
    #[serde(rename = "photon_eV")]
    pub photon_ev: Vec<f64>,
    pub beat_phase_rad: Vec<f64>,
    pub branch: Vec<u8>,
    pub contrast: Vec<f64>,
    pub group_delay_as: Vec<f64>,
    pub spectral_phase_rad: Vec<f64>,
    pub mask: Vec<bool>,
    pub bridged: Vec<bool>,
    pub extrapolated: bool,
    #[serde(rename = "splitting_eV")]
    pub splitting_ev: f64,
    pub reference_as: f64,
    pub rms_error_as: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::ChannelTable;
    use crate::panda::{default_delays, spectrogram, PacketChannels};
    use crate::pulse::{apply_delay, synthesize_gaussian, GaussianPulseSpec};
    use crate::units::{as2_to_au, as_to_au, ev_to_au};
    use crate::wavepacket::BoundState;

    fn packet() -> WavePacket {
        let c = 0.5f64.sqrt();
        WavePacket::new(
            BoundState::new(2, 1, 0, ev_to_au(-3.0), c).unwrap(),
            BoundState::new(3, 1, 0, ev_to_au(-2.73), c).unwrap(),
        )
        .unwrap()
    }

    fn unit_channels() -> PacketChannels {
        let t = ChannelTable::constant(1, &[(0, 1.0, 0.0), (2, 1.0, 0.0)]).unwrap();
        PacketChannels::new(t.clone(), t)
    }

    fn pulse(gdd_as2: f64) -> SpectralPulse {
        let grid = FrequencyGrid::uniform(ev_to_au(80.0), ev_to_au(120.0), 4001).unwrap();
        let spec = GaussianPulseSpec::fourier_limited(ev_to_au(100.0), ev_to_au(5.0)).with_gdd(as2_to_au(gdd_as2));
        synthesize_gaussian(&spec, &grid).unwrap()
    }

    fn energies(w: &WavePacket) -> Vec<f64> {
        (0..=100).map(|i| ev_to_au(95.0 + 0.1 * i as f64) - w.effective_binding()).collect()
    }

    #[test]
    fn flat_phase_gives_flat_delay() {
        let w = packet();
        let p = pulse(0.0);
        let s = spectrogram(&w, &p, &unit_channels(), &energies(&w), &default_delays(&w)).unwrap();
        let r = retrieve(&s, &w, RetrievalOptions::default()).unwrap();
        assert!(r.group_delay.iter().all(|g| g.abs() < 1e-9));
        assert!(!r.mask.iter().any(|&m| m));
    }

    #[test]
    fn delayed_pulse_gives_uniform_offset() {
        let w = packet();
        let tau = as_to_au(37.0);
        let p = apply_delay(&pulse(2000.0), tau);
        let p0 = pulse(2000.0);
        let e = energies(&w);
        let ch = unit_channels();
        let r1 = retrieve(&spectrogram(&w, &p, &ch, &e, &default_delays(&w)).unwrap(), &w, Default::default()).unwrap();
        let r0 = retrieve(&spectrogram(&w, &p0, &ch, &e, &default_delays(&w)).unwrap(), &w, Default::default()).unwrap();
        for (a, b) in r1.group_delay.iter().zip(&r0.group_delay) {
            assert!((a - b - tau).abs() < 1e-3 * tau);
        }
    }

    #[test]
    fn compare_truth_with_itself_is_zero() {
        let w = packet();
        let p = pulse(3000.0);
        let s = spectrogram(&w, &p, &unit_channels(), &energies(&w), &default_delays(&w)).unwrap();
        let r = retrieve(&s, &w, Default::default()).unwrap().with_truth(&p).unwrap();
        assert!(r.rms_error_vs_truth.unwrap() < 1e-6 * as2_to_au(3000.0) * ev_to_au(5.0));
        let mut far = r.clone();
        far.frequencies.iter_mut().for_each(|f| *f += 10.0);
        assert!(compare(&p, &far).is_err());
    }

    #[test]
    fn csv_and_json_outputs() {
        let w = packet();
        let p = pulse(1000.0);
        let s = spectrogram(&w, &p, &unit_channels(), &energies(&w), &default_delays(&w)).unwrap();
        let r = retrieve(&s, &w, Default::default()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2 + r.energies.len());
        let json = serde_json::to_string(&r.to_file()).unwrap();
        assert!(json.contains("group_delay_as"));
    }
}
