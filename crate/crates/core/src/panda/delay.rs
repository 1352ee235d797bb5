//! PANDA delay curves: beat phase per energy divided by the splitting.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{BeatTerms, Spectrogram};
use crate::error::{Error, Result};
use crate::fit::{self, CONTRAST_THRESHOLD};
use crate::numerics::wrap_pi;

/// Zero of the delay axis, recorded in artifact metadata.
pub const DELAY_ZERO_CONVENTION: &str =
    "beat phase 0 <=> fringe crest at tau = 0; a transform-limited pulse at zero delay has zero PANDA delay";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayCurve {
    pub energies: Vec<f64>,
    /// Folded beat phase per column (radians).
    pub phase: Vec<f64>,
    /// `phase / Δω - reference` (a.u.).
    pub delay: Vec<f64>,
    pub contrast: Vec<f64>,
    /// Columns below the contrast threshold.
    pub mask: Vec<bool>,
    /// 1 where the cross term is negative (half-period branch).
    pub branch: Vec<u8>,
    pub reference: f64,
    pub splitting: f64,
}

impl DelayCurve {
    fn assemble(energies: &[f64], raw: Vec<(f64, f64)>, d_omega: f64) -> Self {
        let (phase, contrast): (Vec<f64>, Vec<f64>) = raw.into_iter().unzip();
        let mask: Vec<bool> = contrast.iter().map(|&c| !(c >= CONTRAST_THRESHOLD)).collect();
        let folded = fit::fold_branches(&phase, &mask);
        let delay = folded.phase.iter().map(|p| p / d_omega).collect();
        Self {
            energies: energies.to_vec(),
            phase: folded.phase,
            delay,
            contrast,
            mask,
            branch: folded.branch,
            reference: 0.0,
            splitting: d_omega,
        }
    }

    /// Curve from exact beat terms; a negative `b` enters as a π shift and
    /// is then folded into the branch tag like a fitted column.
    pub fn from_terms(energies: &[f64], terms: &[BeatTerms], d_omega: f64) -> Self {
        let raw = terms
            .iter()
            .map(|t| {
                let shift = if t.b < 0.0 { PI } else { 0.0 };
                (wrap_pi(t.theta0 + shift), t.contrast())
            })
            .collect();
        Self::assemble(energies, raw, d_omega)
    }

    /// Shifts the zero of the delay axis by `reference` (a.u.).
    pub fn with_reference(mut self, reference: f64) -> Self {
        let shift = reference - self.reference;
        self.delay.iter_mut().for_each(|d| *d -= shift);
        self.reference = reference;
        self
    }

    pub fn unmasked(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.energies.iter().zip(&self.delay).zip(&self.mask).filter(|(_, m)| !**m).map(|((e, d), _)| (*e, *d))
    }

    pub fn max_abs_delay(&self) -> f64 {
        self.unmasked().map(|(_, d)| d.abs()).fold(0.0, f64::max)
    }
}

/// Fits every energy column of `s` against `{1, cos Δωτ, sin Δωτ}` and
/// converts the beat phase to a delay.
pub fn panda_delay(s: &Spectrogram, d_omega: f64) -> Result<DelayCurve> {
    if !(d_omega > 0.0) {
        return Err(Error::domain("beat frequency must be positive"));
    }
    fit::check_fit_grid(&s.delays, d_omega)?;
    let raw = s
        .values
        .par_iter()
        .map(|col| fit::fit_beat(&s.delays, col, d_omega).map(|f| (f.phase(), f.contrast())))
        .collect::<Result<Vec<_>>>()?;
    Ok(DelayCurve::assemble(&s.energies, raw, d_omega))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_round_trip() {
        let terms = [
            BeatTerms { a1: 1.0, a2: 1.0, b: 1.0, theta0: 0.2 },
            BeatTerms { a1: 1.0, a2: 1.0, b: -1.0, theta0: 0.21 },
            BeatTerms { a1: 1.0, a2: 1.0, b: 0.001, theta0: 2.0 },
        ];
        let c = DelayCurve::from_terms(&[1.0, 2.0, 3.0], &terms, 0.5);
        assert!((c.delay[0] - 0.4).abs() < 1e-12);
        assert!((c.delay[1] - 0.42).abs() < 1e-12);
        assert_eq!(c.branch[..2], [0, 1]);
        assert!(c.mask[2] && !c.mask[0]);
        let c = c.with_reference(0.4);
        assert!(c.delay[0].abs() < 1e-12);
    }
}
