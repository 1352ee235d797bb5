//! Artifact files: spectrogram CSV matrices, JSON sidecars, provenance.
//! Everything on disk is in eV, fs, as and degrees.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::panda::{DelayCurve, NoiseSpec, PulseSummary, Spectrogram, SpectrogramMeta, DELAY_ZERO_CONVENTION};
use crate::units::{au_to_ev, au_to_fs, ev_to_au, fs_to_au};
use crate::wavepacket::WavePacketFile;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where an artifact came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    /// SHA-256 of the canonical JSON form of the scenario configuration.
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub version: String,
}

impl Provenance {
    pub fn new(command: &str, config: &impl Serialize, seed: Option<u64>) -> Result<Self> {
        let bytes = serde_json::to_vec(config)?;
        Ok(Self { command: command.into(), config_sha256: sha256_hex(&bytes), seed, version: VERSION.into() })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Output flavor for tabular artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// CSV data plus a JSON sidecar.
    #[default]
    Csv,
    /// Sidecar JSON that carries the data itself.
    Json,
}

/// JSON companion of a spectrogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrogramSidecar {
    pub kind: String,
    /// CSV holding the matrix, relative to the sidecar; absent when
    /// `values` is inline.
    pub data_file: Option<String>,
    #[serde(rename = "energies_eV")]
    pub energies_ev: Vec<f64>,
    pub delays_fs: Vec<f64>,
    /// Rows are delays, columns energies.
    pub values: Option<Vec<Vec<f64>>>,
    #[serde(rename = "splitting_eV")]
    pub splitting_ev: Option<f64>,
    pub beat_period_fs: Option<f64>,
    pub wave_packet: Option<WavePacketFile>,
    pub pulse: Option<PulseSummary>,
    pub theta_deg: Option<f64>,
    pub noise: Option<NoiseSpec>,
    pub delay_zero_convention: String,
    /// Per-energy branch tags and contrast mask of the fitted beat; empty
    /// without a beat.
    pub branch: Vec<u8>,
    pub mask: Vec<bool>,
    pub provenance: Provenance,
}

impl SpectrogramSidecar {
    pub fn new(s: &Spectrogram, fit: Option<&DelayCurve>, provenance: Provenance) -> Self {
        let m = &s.meta;
        Self {
            kind: m.kind.clone(),
            data_file: None,
            energies_ev: s.energies.iter().map(|&e| au_to_ev(e)).collect(),
            delays_fs: s.delays.iter().map(|&t| au_to_fs(t)).collect(),
            values: None,
            splitting_ev: m.splitting.map(au_to_ev),
            beat_period_fs: m.splitting.map(|w| au_to_fs(2.0 * std::f64::consts::PI / w)),
            wave_packet: m.wave_packet.clone(),
            pulse: m.pulse.clone(),
            theta_deg: m.theta_deg,
            noise: m.noise,
            delay_zero_convention: DELAY_ZERO_CONVENTION.into(),
            branch: fit.map(|c| c.branch.clone()).unwrap_or_default(),
            mask: fit.map(|c| c.mask.clone()).unwrap_or_default(),
            provenance,
        }
    }
}

/// Matrix CSV: `#` comment lines, a header `delay_fs,<energies in eV>`,
/// then one row per delay.
pub fn write_spectrogram_csv<W: Write>(s: &Spectrogram, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "# kind: {}", s.meta.kind)?;
    writeln!(out, "# rows: delays (fs); columns: photoelectron energies (eV)")?;
    if let Some(w) = s.meta.splitting {
        writeln!(out, "# splitting_eV: {:.9}", au_to_ev(w))?;
    }
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> =
        std::iter::once("delay_fs".to_string()).chain(s.energies.iter().map(|&e| format!("{}", au_to_ev(e)))).collect();
    w.write_record(&header)?;
    for (k, &tau) in s.delays.iter().enumerate() {
        let row: Vec<String> = std::iter::once(format!("{}", au_to_fs(tau)))
            .chain(s.values.iter().map(|c| format!("{}", c[k])))
            .collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Matrix from `write_spectrogram_csv` as (energies eV, delays fs, rows).
pub fn read_spectrogram_csv<R: Read>(input: R) -> Result<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
    let body: String = BufReader::new(input)
        .lines()
        .filter(|l| l.as_ref().map(|l| !l.starts_with('#')).unwrap_or(true))
        .map(|l| l.map(|l| l + "\n"))
        .collect::<std::io::Result<_>>()?;
    let mut r = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::config(format!("bad number {s:?}: {e}")));
    let energies = r.headers()?.iter().skip(1).map(parse).collect::<Result<Vec<_>>>()?;
    let mut delays = Vec::new();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let mut it = rec.iter();
        delays.push(parse(it.next().unwrap_or(""))?);
        let row = it.map(parse).collect::<Result<Vec<_>>>()?;
        if row.len() != energies.len() {
            return Err(Error::config("spectrogram CSV row length does not match the header"));
        }
        rows.push(row);
    }
    Ok((energies, delays, rows))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(|e| Error::MissingArtifact(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}

/// Writes `<stem>.json` and, for CSV format, `<stem>.csv`. Returns the
/// sidecar path first.
pub fn save_spectrogram(
    s: &Spectrogram,
    fit: Option<&DelayCurve>,
    dir: &Path,
    stem: &str,
    format: Format,
    provenance: Provenance,
) -> Result<Vec<PathBuf>> {
    let mut side = SpectrogramSidecar::new(s, fit, provenance);
    let json = dir.join(format!("{stem}.json"));
    let mut paths = vec![json.clone()];
    match format {
        Format::Csv => {
            let csv = dir.join(format!("{stem}.csv"));
            write_spectrogram_csv(s, File::create(&csv)?)?;
            side.data_file = Some(format!("{stem}.csv"));
            paths.push(csv);
        }
        Format::Json => side.values = Some((0..s.delays.len()).map(|k| s.row(k)).collect()),
    }
    write_json(&json, &side)?;
    Ok(paths)
}

/// Reads a spectrogram back from its sidecar.
pub fn load_spectrogram(sidecar: &Path) -> Result<Spectrogram> {
    let side: SpectrogramSidecar = read_json(sidecar)?;
    let (energies_ev, delays_fs, rows) = match (&side.values, &side.data_file) {
        (Some(v), _) => (side.energies_ev.clone(), side.delays_fs.clone(), v.clone()),
        (None, Some(name)) => {
            let path = sidecar.parent().unwrap_or(Path::new(".")).join(name);
            let f = File::open(&path).map_err(|e| Error::MissingArtifact(format!("{}: {e}", path.display())))?;
            read_spectrogram_csv(f)?
        }
        (None, None) => return Err(Error::config("sidecar names neither inline values nor a data file")),
    };
    if rows.len() != delays_fs.len() || rows.iter().any(|r| r.len() != energies_ev.len()) {
        return Err(Error::config("spectrogram matrix does not match its grids"));
    }
    let values = (0..energies_ev.len()).map(|i| rows.iter().map(|r| r[i]).collect()).collect();
    Spectrogram::new(
        energies_ev.into_iter().map(ev_to_au).collect(),
        delays_fs.into_iter().map(fs_to_au).collect(),
        values,
        SpectrogramMeta {
            kind: side.kind,
            splitting: side.splitting_ev.map(ev_to_au),
            wave_packet: side.wave_packet,
            pulse: side.pulse,
            theta_deg: side.theta_deg,
            noise: side.noise,
        },
    )
}
