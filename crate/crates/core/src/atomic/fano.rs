//! Single-resonance Fano dressing of a real dipole matrix element.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanoParams {
    /// Line-shape parameter of the initial state being dressed.
    pub q: f64,
    pub resonance_energy: f64,
    /// Resonance width Γ.
    pub width: f64,
}

impl FanoParams {
    pub fn new(q: f64, resonance_energy: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !q.is_finite() || !resonance_energy.is_finite() {
            return Err(Error::domain(format!("invalid Fano parameters q={q}, width={width}")));
        }
        Ok(Self { q, resonance_energy, width })
    }

    /// Reduced energy ε_F = (ε - ε_r) / (Γ/2).
    pub fn reduced_energy(&self, epsilon: f64) -> f64 {
        (epsilon - self.resonance_energy) / (0.5 * self.width)
    }

    /// `(q + ε_F)² / (1 + ε_F²)`.
    pub fn lineshape(&self, epsilon: f64) -> f64 {
        let e = self.reduced_energy(epsilon);
        (self.q + e).powi(2) / (1.0 + e * e)
    }
}

/// Correlated element `Z = (q + ε_F) / (1 - iε_F) · z`.
pub fn fano_dress(z: f64, fp: &FanoParams, epsilon: f64) -> Complex64 {
    let e = fp.reduced_energy(epsilon);
    Complex64::new(fp.q + e, 0.0) / Complex64::new(1.0, -e) * z
}
