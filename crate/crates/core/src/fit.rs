//! Per-column beat fits and phase continuation along the energy axis.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics;

/// Minimum delay samples per beat period.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 6.0;

/// Columns with `|b|/(a1+a2)` below this carry no phase claim.
pub const CONTRAST_THRESHOLD: f64 = 0.02;

/// Least-squares coefficients of `offset + cos·cos(Δωτ) + sin·sin(Δωτ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeatFit {
    pub offset: f64,
    pub cos: f64,
    pub sin: f64,
}

impl BeatFit {
    pub fn amplitude(&self) -> f64 {
        self.cos.hypot(self.sin)
    }

    /// `θ` in `offset + B cos(Δωτ + θ)`.
    pub fn phase(&self) -> f64 {
        (-self.sin).atan2(self.cos)
    }

    pub fn contrast(&self) -> f64 {
        if self.offset > 0.0 {
            self.amplitude() / self.offset
        } else {
            0.0
        }
    }
}

/// Checks that `delays` resolve a beat at `d_omega`: at least six samples
/// per period on average and no gap longer than a third of a period.
pub fn check_nyquist(delays: &[f64], d_omega: f64) -> Result<()> {
    if delays.len() < 3 {
        return Err(Error::config("delay grid needs at least three points"));
    }
    if delays.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("delay grid must be strictly increasing"));
    }
    let period = 2.0 * PI / d_omega;
    let span = delays[delays.len() - 1] - delays[0];
    let per_period = period * (delays.len() - 1) as f64 / span;
    let widest = delays.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if per_period < MIN_SAMPLES_PER_PERIOD * (1.0 - 1e-9) || widest > period / 3.0 * (1.0 + 1e-9) {
        return Err(Error::config(format!(
            "delay grid has {per_period:.2} samples per beat period (widest gap {widest:.4e} a.u.); need at least {MIN_SAMPLES_PER_PERIOD}"
        )));
    }
    Ok(())
}

/// `check_nyquist` plus a span of at least two beat periods.
pub fn check_fit_grid(delays: &[f64], d_omega: f64) -> Result<()> {
    check_nyquist(delays, d_omega)?;
    let span = delays[delays.len() - 1] - delays[0];
    let period = 2.0 * PI / d_omega;
    // The last sample sits one step short of a full period when the grid
    // tiles periods without repeating the endpoint.
    let step = span / (delays.len() - 1) as f64;
    if span + step < 2.0 * period * (1.0 - 1e-9) {
        return Err(Error::config(format!(
            "delay grid spans {:.2} beat periods; need at least 2",
            (span + step) / period
        )));
    }
    Ok(())
}

/// Linear least squares on the basis `{1, cos Δωτ, sin Δωτ}`.
pub fn fit_beat(delays: &[f64], values: &[f64], d_omega: f64) -> Result<BeatFit> {
    if delays.len() != values.len() {
        return Err(Error::domain("delay and value columns differ in length"));
    }
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (&t, &y) in delays.iter().zip(values) {
        let (s, c) = (d_omega * t).sin_cos();
        let row = [1.0, c, s];
        for i in 0..3 {
            atb[i] += row[i] * y;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let scale = ata[0][0];
    let x = numerics::solve_spd(ata, atb)
        .filter(|_| ata[1][1] > 1e-9 * scale && ata[2][2] > 1e-9 * scale)
        .ok_or_else(|| Error::config("beat fit design matrix is rank deficient; the delay grid is degenerate"))?;
    Ok(BeatFit { offset: x[0], cos: x[1], sin: x[2] })
}

/// Result of continuing wrapped phases along energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Continued {
    pub phase: Vec<f64>,
    /// Half-period branch per column: 1 when the column's beat amplitude is
    /// taken as negative (a π was removed), 0 otherwise.
    pub branch: Vec<u8>,
    /// True where the value was bridged across a masked column.
    pub bridged: Vec<bool>,
}

/// Removes 2π jumps scanning in energy. Masked columns are skipped and then
/// filled by linear interpolation (flagged in `bridged`).
pub fn unwrap(phases: &[f64], mask: &[bool]) -> Continued {
    continue_phase(phases, mask, false)
}

/// Like `unwrap`, but treats π jumps as sign flips of the beat amplitude:
/// each column picks the branch that keeps the phase continuous, and the
/// branch is recorded instead of entering the phase. The first unmasked
/// column is taken on branch 0.
pub fn fold_branches(phases: &[f64], mask: &[bool]) -> Continued {
    continue_phase(phases, mask, true)
}

fn continue_phase(phases: &[f64], mask: &[bool], fold_pi: bool) -> Continued {
    let n = phases.len();
    let period = if fold_pi { PI } else { 2.0 * PI };
    let mut out = vec![f64::NAN; n];
    let mut branch = vec![0u8; n];
    let mut prev: Option<f64> = None;
    for i in 0..n {
        if mask.get(i).copied().unwrap_or(false) || !phases[i].is_finite() {
            continue;
        }
        let p = phases[i];
        let v = match prev {
            None => p,
            Some(q) => p - period * ((p - q) / period).round(),
        };
        if fold_pi {
            let k = ((p - v) / PI).round() as i64;
            branch[i] = k.rem_euclid(2) as u8;
        }
        out[i] = v;
        prev = Some(v);
    }
    let bridged = bridge(&mut out);
    for i in 0..n {
        if bridged[i] {
            branch[i] = 0;
        }
    }
    Continued { phase: out, branch, bridged }
}

/// Fills NaN entries by linear interpolation between valid neighbours and
/// constant extrapolation at the ends. Returns the filled positions.
fn bridge(v: &mut [f64]) -> Vec<bool> {
    let filled: Vec<bool> = v.iter().map(|x| x.is_nan()).collect();
    let valid: Vec<usize> = (0..v.len()).filter(|&i| !filled[i]).collect();
    if valid.is_empty() {
        return filled;
    }
    for i in 0..v.len() {
        if !filled[i] {
            continue;
        }
        let after = valid.partition_point(|&j| j < i);
        v[i] = match (after.checked_sub(1).map(|k| valid[k]), valid.get(after)) {
            (Some(a), Some(&b)) => v[a] + (v[b] - v[a]) * (i - a) as f64 / (b - a) as f64,
            (Some(a), None) => v[a],
            (None, Some(&b)) => v[b],
            (None, None) => unreachable!(),
        };
    }
    filled
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(d_omega: f64, per_period: usize, periods: usize) -> Vec<f64> {
        let t = 2.0 * PI / d_omega;
        (0..per_period * periods).map(|k| k as f64 * t / per_period as f64).collect()
    }

    #[test]
    fn exact_sinusoids() {
        let dw = 0.07;
        let tau = grid(dw, 8, 3);
        let col: Vec<f64> = tau.iter().map(|t| 1.0 + (dw * t).cos()).collect();
        let f = fit_beat(&tau, &col, dw).unwrap();
        assert!(f.phase().abs() < 1e-12);
        assert_relative_eq!(f.contrast(), 1.0, epsilon = 1e-12);
        let col: Vec<f64> = tau.iter().map(|t| 1.0 + (dw * t + PI / 3.0).cos()).collect();
        let f = fit_beat(&tau, &col, dw).unwrap();
        assert!((f.phase() - PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_grid_is_rejected() {
        let dw = 1.0;
        let tau = vec![0.0, 2.0 * PI, 4.0 * PI, 6.0 * PI];
        assert!(fit_beat(&tau, &[1.0; 4], dw).is_err());
    }

    #[test]
    fn nyquist_and_span() {
        let dw = 0.5;
        assert!(check_fit_grid(&grid(dw, 8, 3), dw).is_ok());
        assert!(check_fit_grid(&grid(dw, 6, 2), dw).is_ok());
        assert!(check_nyquist(&grid(dw, 5, 3), dw).is_err());
        assert!(check_fit_grid(&grid(dw, 8, 1), dw).is_err());
    }

    #[test]
    fn unwrap_ramp_and_mask() {
        let ramp: Vec<f64> = (0..40).map(|i| 0.3 * i as f64).collect();
        let wrapped: Vec<f64> = ramp.iter().map(|&p| numerics::wrap_pi(p)).collect();
        let mut mask = vec![false; 40];
        mask[10] = true;
        let u = unwrap(&wrapped, &mask);
        for (a, b) in u.phase.iter().zip(&ramp) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(u.bridged[10] && !u.bridged[11]);
        let c = unwrap(&[0.4; 5], &[false; 5]);
        assert_eq!(c.phase, vec![0.4; 5]);
    }

    #[test]
    fn pi_jumps_become_branch_tags() {
        let phases = [0.1, 0.12, 0.14 - PI, 0.16 - PI, 0.18];
        let c = fold_branches(&phases, &[false; 5]);
        for (i, p) in c.phase.iter().enumerate() {
            assert!((p - (0.1 + 0.02 * i as f64)).abs() < 1e-12);
        }
        assert_eq!(c.branch, vec![0, 0, 1, 1, 0]);
    }
}
