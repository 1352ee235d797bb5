//! Spectral test pulses.
//!
//! A pulse is stored on the positive-frequency axis as separate magnitude and
//! phase samples. The physical field is
//!
//! ```text
//! E(t) = 1/(2π) ∫ E(ω) exp(-iωt) dω,   E*(ω) = E(-ω)
//! ```
//!
//! so a pulse that arrives later by τ carries the extra phase `+ωτ`, and the
//! group delay `dφ/dω` is the arrival time of each frequency component. Every
//! phase-bearing operation in this crate uses that convention.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::numerics;

/// Relative tolerance used to decide whether a grid is uniformly spaced.
const UNIFORM_TOL: f64 = 1e-12;

/// Strictly increasing angular frequencies (atomic units).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
    uniform: bool,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::domain("frequency grid needs at least two points"));
        }
        if points.iter().any(|w| !w.is_finite()) {
            return Err(Error::domain("frequency grid contains non-finite values"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("frequency grid must be strictly increasing"));
        }
        let uniform = is_uniform(&points);
        Ok(Self { points, uniform })
    }

    /// `count` equally spaced points from `start` to `end` inclusive.
    pub fn uniform(start: f64, end: f64, count: usize) -> Result<Self> {
        if count < 2 || end <= start {
            return Err(Error::domain("uniform grid needs end > start and count >= 2"));
        }
        let step = (end - start) / (count - 1) as f64;
        let points = (0..count).map(|i| start + step * i as f64).collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.min() && omega <= self.max()
    }
}

pub(crate) fn is_uniform(points: &[f64]) -> bool {
    if points.len() < 3 {
        return true;
    }
    let step = (points[points.len() - 1] - points[0]) / (points.len() - 1) as f64;
    let scale = points[0].abs().max(points[points.len() - 1].abs()).max(step.abs());
    points.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= UNIFORM_TOL * scale)
}

/// Complex spectral amplitude `|E(ω)| exp(iφ(ω))` on a positive-frequency grid.
///
/// `phase` already contains the carrier-envelope phase; `cep` records it so
/// serialized pulses keep the value they were built with. The amplitude
/// scale is arbitrary: every observable here depends on products or ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPulse {
    grid: FrequencyGrid,
    magnitude: Vec<f64>,
    phase: Vec<f64>,
    cep: f64,
}

impl SpectralPulse {
    pub fn new(grid: FrequencyGrid, magnitude: Vec<f64>, phase: Vec<f64>, cep: f64) -> Result<Self> {
        if magnitude.len() != grid.len() || phase.len() != grid.len() {
            return Err(Error::domain(format!(
                "pulse arrays have lengths {} and {} but the grid has {} points",
                magnitude.len(),
                phase.len(),
                grid.len()
            )));
        }
        if magnitude.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::domain("spectral magnitude must be finite and nonnegative"));
        }
        if phase.iter().any(|p| !p.is_finite()) || !cep.is_finite() {
            return Err(Error::domain("spectral phase must be finite"));
        }
        if grid.min() <= 0.0 {
            return Err(Error::domain("spectral pulses live on the positive frequency axis"));
        }
        Ok(Self { grid, magnitude, phase, cep })
    }

    /// Flat magnitude and constant phase: the idealized broadband pulse used
    /// when only atomic effects are of interest.
    pub fn flat(grid: FrequencyGrid, magnitude: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![magnitude; n], vec![0.0; n], 0.0)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn magnitude(&self) -> &[f64] {
        &self.magnitude
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn cep(&self) -> f64 {
        self.cep
    }

    /// Linear interpolation of magnitude and phase, separately.
    pub fn sample(&self, omega: f64) -> Result<Complex64> {
        let (m, p) = self.sample_polar(omega)?;
        Ok(Complex64::from_polar(m, p))
    }

    /// `(|E(ω)|, φ(ω))` by linear interpolation.
    pub fn sample_polar(&self, omega: f64) -> Result<(f64, f64)> {
        if !self.grid.contains(omega) {
            return Err(Error::domain(format!(
                "frequency {omega} a.u. outside pulse grid [{}, {}]",
                self.grid.min(),
                self.grid.max()
            )));
        }
        let x = self.grid.points();
        Ok((
            numerics::lerp_at(x, &self.magnitude, omega),
            numerics::lerp_at(x, &self.phase, omega),
        ))
    }

    /// `(1/π) ∫₀^∞ |E(ω)|² dω`, which equals `∫ E(t)² dt` for the real field.
    pub fn spectral_energy(&self) -> f64 {
        let sq: Vec<f64> = self.magnitude.iter().map(|m| m * m).collect();
        numerics::trapezoid(self.grid.points(), &sq) / PI
    }

    /// Magnitude-weighted mean frequency.
    pub fn centroid(&self) -> f64 {
        let x = self.grid.points();
        let w: Vec<f64> = self.magnitude.iter().map(|m| m * m).collect();
        let wx: Vec<f64> = w.iter().zip(x).map(|(w, x)| w * x).collect();
        numerics::trapezoid(x, &wx) / numerics::trapezoid(x, &w)
    }

    /// Full width at half maximum of `|E(ω)|²`, interpolated between grid
    /// points. `None` if the half-maximum level is not crossed on both sides.
    pub fn intensity_fwhm(&self) -> Option<f64> {
        let x = self.grid.points();
        let w: Vec<f64> = self.magnitude.iter().map(|m| m * m).collect();
        let (peak_idx, peak) = w.iter().enumerate().fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        if peak <= 0.0 {
            return None;
        }
        let half = 0.5 * peak;
        let cross = |i: usize, j: usize| x[i] + (half - w[i]) * (x[j] - x[i]) / (w[j] - w[i]);
        let left = (1..=peak_idx).rev().find(|&i| w[i - 1] < half).map(|i| cross(i - 1, i))?;
        let right = (peak_idx..x.len() - 1).find(|&i| w[i + 1] < half).map(|i| cross(i, i + 1))?;
        Some(right - left)
    }

    /// Replaces the phase samples, keeping magnitude and grid.
    pub fn with_phase(&self, phase: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), self.magnitude.clone(), phase, self.cep)
    }

    pub fn with_magnitude(&self, magnitude: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), magnitude, self.phase.clone(), self.cep)
    }
}

/// Parameters for a Gaussian spectrum with quadratic phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPulseSpec {
    /// Central angular frequency ω_X.
    pub center: f64,
    /// FWHM of the spectral intensity |E(ω)|².
    pub fwhm_bandwidth: f64,
    /// Group-delay dispersion d²φ/dω² (time²).
    pub gdd: f64,
    /// Group delay at the center frequency.
    pub delay: f64,
    pub amplitude: f64,
    pub cep: f64,
}

impl GaussianPulseSpec {
    pub fn fourier_limited(center: f64, fwhm_bandwidth: f64) -> Self {
        Self { center, fwhm_bandwidth, gdd: 0.0, delay: 0.0, amplitude: 1.0, cep: 0.0 }
    }

    pub fn with_gdd(mut self, gdd: f64) -> Self {
        self.gdd = gdd;
        self
    }

    pub fn with_delay(mut self, delay: f64) -> Self {
        self.delay = delay;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.fwhm_bandwidth > 0.0) {
            return Err(Error::domain("Gaussian bandwidth must be positive"));
        }
        if !(self.amplitude > 0.0) {
            return Err(Error::domain("Gaussian amplitude must be positive"));
        }
        if ![self.center, self.gdd, self.delay, self.cep].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("Gaussian parameters must be finite"));
        }
        Ok(())
    }

    /// Intensity FWHM of the transform-limited envelope in time.
    pub fn transform_limited_duration(&self) -> f64 {
        4.0 * LN_2 / self.fwhm_bandwidth
    }
}

/// Samples a Gaussian pulse on `grid`.
///
/// `|E(ω)| = A exp(-2 ln2 (ω-ω_X)²/Δω²)` and
/// `φ(ω) = cep + τ (ω-ω_X) + (GDD/2)(ω-ω_X)²`.
pub fn synthesize_gaussian(spec: &GaussianPulseSpec, grid: &FrequencyGrid) -> Result<SpectralPulse> {
    spec.validate()?;
    let reach = 3.0 * spec.fwhm_bandwidth;
    if grid.min() > spec.center - reach || grid.max() < spec.center + reach {
        return Err(Error::domain(format!(
            "grid [{}, {}] does not cover ±3 FWHM around {}",
            grid.min(),
            grid.max(),
            spec.center
        )));
    }
    let a = 2.0 * LN_2 / (spec.fwhm_bandwidth * spec.fwhm_bandwidth);
    let (magnitude, phase) = grid
        .points()
        .iter()
        .map(|&w| {
            let d = w - spec.center;
            (
                spec.amplitude * (-a * d * d).exp(),
                spec.cep + spec.delay * d + 0.5 * spec.gdd * d * d,
            )
        })
        .unzip();
    SpectralPulse::new(grid.clone(), magnitude, phase, spec.cep)
}

/// Spectral derivative of the phase: central differences inside, one-sided
/// second-order stencils at the two edges.
pub fn group_delay(p: &SpectralPulse) -> Result<Vec<f64>> {
    if p.grid.len() < 3 {
        return Err(Error::domain("group delay needs at least three grid points"));
    }
    Ok(numerics::derivative(p.grid.points(), &p.phase))
}

/// Integrates a group-delay curve back into a spectral phase, anchored so
/// that the phase at `anchor` equals `phi0`.
pub fn phase_from_group_delay(gd: &[f64], grid: &FrequencyGrid, anchor: f64, phi0: f64) -> Result<Vec<f64>> {
    if gd.len() != grid.len() {
        return Err(Error::domain("group delay length does not match grid"));
    }
    if !grid.contains(anchor) {
        return Err(Error::domain(format!(
            "anchor {anchor} outside grid [{}, {}]",
            grid.min(),
            grid.max()
        )));
    }
    let x = grid.points();
    let cumulative = numerics::cumulative_trapezoid(x, gd);
    let i = numerics::bracket(x, anchor);
    let g_anchor = numerics::lerp_at(x, gd, anchor);
    let at_anchor = cumulative[i] + 0.5 * (anchor - x[i]) * (gd[i] + g_anchor);
    Ok(cumulative.iter().map(|c| c - at_anchor + phi0).collect())
}

/// Moves the pulse later in time by `tau` (shift theorem).
pub fn apply_delay(p: &SpectralPulse, tau: f64) -> SpectralPulse {
    let phase = p
        .grid
        .points()
        .iter()
        .zip(&p.phase)
        .map(|(w, ph)| ph + w * tau)
        .collect();
    SpectralPulse { phase, ..p.clone() }
}

/// Real field samples on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalField {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TemporalField {
    /// `∫ E(t)² dt` by the trapezoidal rule.
    pub fn energy(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        numerics::trapezoid(&self.times, &sq)
    }

    pub fn peak_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Evaluates `(1/π) ∫₀^∞ E(ω) exp(-iωt) dω` at each time. The real part is
/// the physical field and the modulus is its envelope.
pub fn analytic_signal(p: &SpectralPulse, times: &[f64]) -> Vec<Complex64> {
    let x = p.grid.points();
    let spectrum: Vec<Complex64> = p
        .magnitude
        .iter()
        .zip(&p.phase)
        .map(|(m, ph)| Complex64::from_polar(*m, *ph))
        .collect();
    let weights: Vec<f64> = trapezoid_weights(x);
    times
        .par_iter()
        .map(|&t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((w, e), q) in x.iter().zip(&spectrum).zip(&weights) {
                acc += e * Complex64::from_polar(*q, -w * t);
            }
            acc / PI
        })
        .collect()
}

pub(crate) fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { x[i] - x[i - 1] } else { 0.0 };
            let right = if i + 1 < n { x[i + 1] - x[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Real field by direct quadrature with Hermitian completion of the
/// negative-frequency half.
pub fn to_time_domain(p: &SpectralPulse, times: &[f64]) -> Result<TemporalField> {
    if times.len() < 2 || !is_uniform(times) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("time grid must be uniform and increasing"));
    }
    let values = analytic_signal(p, times).into_iter().map(|z| z.re).collect();
    Ok(TemporalField { times: times.to_vec(), values })
}

/// Uniform grid of `count` samples from `start` to `end` inclusive.
pub fn uniform_times(start: f64, end: f64, count: usize) -> Vec<f64> {
    let step = (end - start) / (count - 1) as f64;
    (0..count).map(|i| start + step * i as f64).collect()
}

/// On-disk form: `{grid_au, magnitude, phase_rad, cep_rad}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PulseFile {
    pub grid_au: Vec<f64>,
    pub magnitude: Vec<f64>,
    pub phase_rad: Vec<f64>,
    pub cep_rad: f64,
}

impl From<&SpectralPulse> for PulseFile {
    fn from(p: &SpectralPulse) -> Self {
        Self {
            grid_au: p.grid.points().to_vec(),
            magnitude: p.magnitude.clone(),
            phase_rad: p.phase.clone(),
            cep_rad: p.cep,
        }
    }
}

impl TryFrom<PulseFile> for SpectralPulse {
    type Error = Error;

    fn try_from(f: PulseFile) -> Result<Self> {
        SpectralPulse::new(FrequencyGrid::new(f.grid_au)?, f.magnitude, f.phase_rad, f.cep_rad)
    }
}

impl Serialize for SpectralPulse {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PulseFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectralPulse {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = PulseFile::deserialize(d)?;
        SpectralPulse::try_from(f).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn chirped(gdd: f64) -> SpectralPulse {
        let spec = GaussianPulseSpec::fourier_limited(3.0, 0.2).with_gdd(gdd);
        let grid = FrequencyGrid::uniform(2.0, 4.0, 801).unwrap();
        synthesize_gaussian(&spec, &grid).unwrap()
    }

    #[test]
    fn grid_rejects_non_monotone_points() {
        assert!(FrequencyGrid::new(vec![1.0]).is_err());
        assert!(FrequencyGrid::new(vec![1.0, 1.0, 2.0]).is_err());
        assert!(FrequencyGrid::new(vec![1.0, 0.5]).is_err());
        assert!(FrequencyGrid::uniform(1.0, 2.0, 11).unwrap().is_uniform());
        assert!(!FrequencyGrid::new(vec![1.0, 1.1, 1.3]).unwrap().is_uniform());
    }

    #[test]
    fn fourier_limited_phase_is_cep() {
        let mut spec = GaussianPulseSpec::fourier_limited(3.0, 0.2);
        spec.cep = 0.7;
        let grid = FrequencyGrid::uniform(2.0, 4.0, 201).unwrap();
        let p = synthesize_gaussian(&spec, &grid).unwrap();
        assert!(p.phase().iter().all(|&ph| ph == 0.7));
    }

    #[test]
    fn synthesis_requires_coverage() {
        let spec = GaussianPulseSpec::fourier_limited(3.0, 0.5);
        let grid = FrequencyGrid::uniform(2.0, 4.0, 201).unwrap();
        assert!(matches!(synthesize_gaussian(&spec, &grid), Err(Error::Domain(_))));
        let bad = GaussianPulseSpec { fwhm_bandwidth: 0.0, ..spec };
        assert!(synthesize_gaussian(&bad, &grid).is_err());
    }

    #[test]
    fn gaussian_half_maximum_of_intensity() {
        let p = chirped(0.0);
        let (m, _) = p.sample_polar(3.1).unwrap();
        assert_relative_eq!(m * m, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn chirp_gives_linear_group_delay() {
        let g = 40.0;
        let p = chirped(g);
        let gd = group_delay(&p).unwrap();
        for (w, d) in p.grid().points().iter().zip(&gd) {
            assert!((d - g * (w - 3.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn group_delay_of_linear_phase_is_constant() {
        let grid = FrequencyGrid::uniform(1.0, 2.0, 11).unwrap();
        let phase: Vec<f64> = grid.points().iter().map(|w| 12.5 * w).collect();
        let p = SpectralPulse::new(grid, vec![1.0; 11], phase, 0.0).unwrap();
        assert!(group_delay(&p).unwrap().iter().all(|d| (d - 12.5).abs() < 1e-10));
        let flat = SpectralPulse::flat(FrequencyGrid::uniform(1.0, 2.0, 5).unwrap(), 1.0).unwrap();
        assert!(group_delay(&flat).unwrap().iter().all(|d| *d == 0.0));
    }

    #[test]
    fn group_delay_needs_three_points() {
        let p = SpectralPulse::flat(FrequencyGrid::new(vec![1.0, 2.0]).unwrap(), 1.0).unwrap();
        assert!(group_delay(&p).is_err());
    }

    #[test]
    fn phase_integration_anchor_and_linear_case() {
        let grid = FrequencyGrid::uniform(1.0, 2.0, 101).unwrap();
        let zero = phase_from_group_delay(&vec![0.0; 101], &grid, 1.5, 0.0).unwrap();
        assert!(zero.iter().all(|p| *p == 0.0));
        let lin = phase_from_group_delay(&vec![3.0; 101], &grid, 1.437, 0.25).unwrap();
        for (w, p) in grid.points().iter().zip(&lin) {
            assert!((p - (0.25 + 3.0 * (w - 1.437))).abs() < 1e-12);
        }
        assert!(phase_from_group_delay(&vec![0.0; 101], &grid, 2.5, 0.0).is_err());
    }

    #[test]
    fn phase_round_trip_on_chirped_pulse() {
        let p = chirped(25.0);
        let gd = group_delay(&p).unwrap();
        let phase = phase_from_group_delay(&gd, p.grid(), 3.0, 0.0).unwrap();
        let back = group_delay(&p.with_phase(phase).unwrap()).unwrap();
        let h = p.grid().points()[1] - p.grid().points()[0];
        for (a, b) in gd.iter().zip(&back) {
            assert!((a - b).abs() < 10.0 * h * h * 25.0);
        }
    }

    #[test]
    fn delay_shifts_group_delay_and_keeps_magnitude() {
        let p = chirped(10.0);
        assert_eq!(apply_delay(&p, 0.0), p);
        let q = apply_delay(&p, 7.5);
        let (g0, g1) = (group_delay(&p).unwrap(), group_delay(&q).unwrap());
        for (a, b) in g0.iter().zip(&g1) {
            assert!((b - a - 7.5).abs() < 1e-8);
        }
        for w in [2.5, 3.0, 3.33] {
            assert_relative_eq!(p.sample(w).unwrap().norm(), q.sample(w).unwrap().norm(), max_relative = 1e-14);
        }
    }

    #[test]
    fn sample_interpolates_linearly() {
        let grid = FrequencyGrid::uniform(1.0, 2.0, 3).unwrap();
        let p = SpectralPulse::new(grid, vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 2.0], 0.0).unwrap();
        let z = p.sample(1.5).unwrap();
        assert_relative_eq!(z.norm(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(z.arg(), 1.0, epsilon = 1e-14);
        let (m, ph) = p.sample_polar(1.25).unwrap();
        assert_relative_eq!(m, 1.5);
        assert_relative_eq!(ph, 0.5);
        assert!(p.sample(0.99).is_err());
    }

    #[test]
    fn sample_off_grid_matches_dense_reference() {
        let spec = GaussianPulseSpec::fourier_limited(3.0, 0.2).with_gdd(5.0);
        let coarse = synthesize_gaussian(&spec, &FrequencyGrid::uniform(2.0, 4.0, 2001).unwrap()).unwrap();
        let dense = synthesize_gaussian(&spec, &FrequencyGrid::uniform(2.0, 4.0, 200_001).unwrap()).unwrap();
        for w in [2.9003, 3.01234, 3.1777] {
            let (a, b) = (coarse.sample(w).unwrap(), dense.sample(w).unwrap());
            assert!((a - b).norm() / b.norm() < 1e-4);
        }
    }

    #[test]
    fn narrow_line_gives_cosine() {
        let grid = FrequencyGrid::uniform(0.999, 1.001, 3).unwrap();
        let p = SpectralPulse::new(grid, vec![0.0, 1.0, 0.0], vec![0.0; 3], 0.0).unwrap();
        let times = uniform_times(0.0, 20.0, 201);
        let f = to_time_domain(&p, &times).unwrap();
        let peak = f.values[0];
        for (t, v) in f.times.iter().zip(&f.values) {
            assert!((v - peak * t.cos()).abs() < 1e-4 * peak.abs());
        }
    }

    #[test]
    fn time_domain_rejects_nonuniform_times() {
        let p = chirped(0.0);
        assert!(to_time_domain(&p, &[0.0, 1.0, 3.0]).is_err());
    }

    #[test]
    fn pulse_json_round_trip() {
        let p = chirped(3.0);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("grid_au") && s.contains("phase_rad") && s.contains("cep_rad"));
        let q: SpectralPulse = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        let bad = r#"{"grid_au":[1,2],"magnitude":[-1,1],"phase_rad":[0,0],"cep_rad":0}"#;
        assert!(serde_json::from_str::<SpectralPulse>(bad).is_err());
    }
}
