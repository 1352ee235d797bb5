//! Continuum channel tables: radial dipole integrals and scattering phases
//! per final partial wave, as functions of photoelectron energy.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use super::fano::{fano_dress, FanoParams};
use super::radial::{radial_dipole, solve_continuum, BoundOrbital, CentralPotential};
use super::xsec::allowed_final_l;
use crate::error::{Error, Result};
use crate::numerics;

/// Radial factor and scattering phase of one `(ε, L)` channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelAmplitude {
    pub epsilon: f64,
    pub l: u32,
    /// `⟨u_εL | r | u_nl⟩`, real in a central field.
    pub radial_integral: f64,
    /// Scattering phase η_L.
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialWave {
    pub l: u32,
    pub radial: Vec<f64>,
    pub phase: Vec<f64>,
}

/// Channels reachable from one bound state. An empty energy axis means the
/// entries hold for every energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTable {
    initial_l: u32,
    epsilons: Vec<f64>,
    waves: Vec<PartialWave>,
    fano: Option<FanoParams>,
}

fn check_selection(initial_l: u32, l: u32) -> Result<()> {
    if initial_l.abs_diff(l) != 1 {
        return Err(Error::SelectionRule(format!("L={l} is not reachable from l={initial_l}")));
    }
    Ok(())
}

impl ChannelTable {
    /// Energy-independent channels `(L, radial, phase)`.
    pub fn constant(initial_l: u32, channels: &[(u32, f64, f64)]) -> Result<Self> {
        let waves = channels
            .iter()
            .map(|&(l, radial, phase)| {
                check_selection(initial_l, l)?;
                Ok(PartialWave { l, radial: vec![radial], phase: vec![phase] })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { initial_l, epsilons: Vec::new(), waves, fano: None })
    }

    pub fn tabulated(initial_l: u32, epsilons: Vec<f64>, waves: Vec<PartialWave>) -> Result<Self> {
        if epsilons.len() < 2 || epsilons.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("channel energies must be strictly increasing with at least two entries"));
        }
        for w in &waves {
            check_selection(initial_l, w.l)?;
            if w.radial.len() != epsilons.len() || w.phase.len() != epsilons.len() {
                return Err(Error::domain(format!("partial wave L={} has the wrong length", w.l)));
            }
        }
        Ok(Self { initial_l, epsilons, waves, fano: None })
    }

    /// Solves the continuum for every dipole-allowed `L` at each energy.
    /// Phases are unwrapped along the energy axis.
    pub fn compute(pot: &CentralPotential, orbital: &BoundOrbital, epsilons: &[f64]) -> Result<Self> {
        let waves = allowed_final_l(orbital.l)
            .into_iter()
            .map(|l| {
                let rows = epsilons
                    .par_iter()
                    .map(|&eps| {
                        let c = solve_continuum(pot, eps, l, &orbital.grid)?;
                        Ok((radial_dipole(orbital, &c)?, c.phase()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (radial, phase): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
                Ok(PartialWave { l, radial, phase: unwrap_2pi(&phase) })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::tabulated(orbital.l, epsilons.to_vec(), waves)
    }

    pub fn initial_l(&self) -> u32 {
        self.initial_l
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn waves(&self) -> &[PartialWave] {
        &self.waves
    }

    pub fn fano(&self) -> Option<&FanoParams> {
        self.fano.as_ref()
    }

    pub fn is_constant(&self) -> bool {
        self.epsilons.is_empty()
    }

    pub fn covers(&self, epsilon: f64) -> bool {
        self.is_constant() || (epsilon >= self.epsilons[0] && epsilon <= self.epsilons[self.epsilons.len() - 1])
    }

    /// Channels at `epsilon`, linearly interpolated.
    pub fn at(&self, epsilon: f64) -> Result<Vec<ChannelAmplitude>> {
        if !self.covers(epsilon) {
            return Err(Error::domain(format!(
                "energy {epsilon} outside channel table [{}, {}]",
                self.epsilons[0],
                self.epsilons[self.epsilons.len() - 1]
            )));
        }
        Ok(self
            .waves
            .iter()
            .map(|w| {
                let (radial, phase) = if self.is_constant() {
                    (w.radial[0], w.phase[0])
                } else {
                    (
                        numerics::lerp_at(&self.epsilons, &w.radial, epsilon),
                        numerics::lerp_at(&self.epsilons, &w.phase, epsilon),
                    )
                };
                ChannelAmplitude { epsilon, l: w.l, radial_integral: radial, phase }
            })
            .collect())
    }

    pub fn channel(&self, epsilon: f64, l: u32) -> Result<Option<ChannelAmplitude>> {
        Ok(self.at(epsilon)?.into_iter().find(|c| c.l == l))
    }

    /// Complex factor multiplying every radial element: the Fano dressing
    /// when one is attached, otherwise one.
    pub fn dressing(&self, epsilon: f64) -> Complex64 {
        match &self.fano {
            Some(fp) => fano_dress(1.0, fp, epsilon),
            None => Complex64::new(1.0, 0.0),
        }
    }

    pub fn with_fano(mut self, fp: FanoParams) -> Self {
        self.fano = Some(fp);
        self
    }

    /// Multiplies every radial integral by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        for w in &mut self.waves {
            w.radial.iter_mut().for_each(|r| *r *= factor);
        }
        self
    }

    /// Applies `f(epsilon, radial)` to the radial integrals of partial wave `l`.
    pub fn map_radial(mut self, l: u32, f: impl Fn(f64, f64) -> f64) -> Self {
        for w in self.waves.iter_mut().filter(|w| w.l == l) {
            if self.epsilons.is_empty() {
                w.radial[0] = f(f64::NAN, w.radial[0]);
            } else {
                for (r, e) in w.radial.iter_mut().zip(&self.epsilons) {
                    *r = f(*e, *r);
                }
            }
        }
        self
    }

    /// Energy of the first sign change of partial wave `l`, by linear
    /// interpolation between tabulated points.
    pub fn first_zero(&self, l: u32) -> Option<f64> {
        let w = self.waves.iter().find(|w| w.l == l)?;
        self.epsilons.windows(2).zip(w.radial.windows(2)).find_map(|(e, r)| {
            (r[0] != 0.0 && r[0].signum() != r[1].signum()).then(|| e[0] - r[0] * (e[1] - e[0]) / (r[1] - r[0]))
        })
    }

    /// CSV with columns `epsilon_au,L,radial_integral,eta_L`, preceded by
    /// `#` comment lines. The `initial_l` comment is required on reading.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> Result<()> {
        writeln!(out, "# initial_l = {}", self.initial_l)?;
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["epsilon_au", "L", "radial_integral", "eta_L"])?;
        let eps: Vec<f64> = if self.is_constant() { vec![0.0] } else { self.epsilons.clone() };
        for (i, e) in eps.iter().enumerate() {
            for wave in &self.waves {
                w.write_record([
                    format!("{e:.17e}"),
                    wave.l.to_string(),
                    format!("{:.17e}", wave.radial[i]),
                    format!("{:.17e}", wave.phase[i]),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(mut input: R) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let initial_l = text
            .lines()
            .filter_map(|l| l.strip_prefix('#'))
            .find_map(|l| l.trim().strip_prefix("initial_l = ").and_then(|v| v.trim().parse::<u32>().ok()))
            .ok_or_else(|| Error::config("channel CSV lacks an '# initial_l = ...' header"))?;
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let mut rows: Vec<(f64, u32, f64, f64)> = Vec::new();
        for rec in reader.deserialize() {
            rows.push(rec?);
        }
        let mut epsilons: Vec<f64> = rows.iter().map(|r| r.0).collect();
        epsilons.dedup();
        let mut ls: Vec<u32> = rows.iter().map(|r| r.1).collect();
        ls.sort_unstable();
        ls.dedup();
        let waves: Vec<PartialWave> = ls
            .iter()
            .map(|&l| {
                let (radial, phase) = rows.iter().filter(|r| r.1 == l).map(|r| (r.2, r.3)).unzip();
                PartialWave { l, radial, phase }
            })
            .collect();
        if epsilons.len() == 1 {
            let channels: Vec<_> = waves.iter().map(|w| (w.l, w.radial[0], w.phase[0])).collect();
            return Self::constant(initial_l, &channels);
        }
        Self::tabulated(initial_l, epsilons, waves)
    }
}

fn unwrap_2pi(phase: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phase.len());
    let mut offset = 0.0;
    for (i, &p) in phase.iter().enumerate() {
        if i > 0 {
            let prev = phase[i - 1];
            offset -= (2.0 * std::f64::consts::PI) * ((p - prev) / (2.0 * std::f64::consts::PI)).round();
        }
        out.push(p + offset);
    }
    out
}
