//! Radial Schrödinger equation in a screened Coulomb potential
//! `V(r) = -(Z + a e^{-br}) / r`, solved with the Numerov method on a
//! uniform grid `r_i = (i + 1) h`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::coulomb::{coulomb_fg_asymptotic, coulomb_phase};
use crate::error::{Error, Result};

/// Numerov steps per shortest asymptotic wavelength.
pub const STEPS_PER_WAVELENGTH: f64 = 20.0;

/// Minimum outer radius for continuum matching.
pub const MIN_MATCH_RADIUS: f64 = 200.0;

/// Tolerated mismatch between the Numerov solution and the fitted Coulomb
/// asymptote, relative to the asymptotic amplitude.
pub const MATCH_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralPotential {
    /// Asymptotic charge seen by the active electron.
    pub z: f64,
    /// Extra charge inside the core, screened away as `e^{-br}`.
    pub a: f64,
    pub b: f64,
}

impl CentralPotential {
    pub fn new(z: f64, a: f64, b: f64) -> Result<Self> {
        if !(z > 0.0) || !(a >= 0.0) || !(b > 0.0) || !z.is_finite() || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!("invalid potential Z={z}, a={a}, b={b}")));
        }
        Ok(Self { z, a, b })
    }

    pub fn coulomb(z: f64) -> Result<Self> {
        Self::new(z, 0.0, 1.0)
    }

    pub fn is_coulomb(&self) -> bool {
        self.a == 0.0
    }

    pub fn value(&self, r: f64) -> f64 {
        -(self.z + self.a * (-self.b * r).exp()) / r
    }

    /// The short-range part `-a e^{-br}/r` alone.
    pub fn short_range(&self, r: f64) -> f64 {
        -self.a * (-self.b * r).exp() / r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub step: f64,
    pub count: usize,
}

impl RadialGrid {
    pub fn new(step: f64, r_max: f64) -> Result<Self> {
        if !(step > 0.0) || !(r_max > 10.0 * step) {
            return Err(Error::domain(format!("invalid radial grid step={step}, r_max={r_max}")));
        }
        let count = (r_max / step).round() as usize;
        Ok(Self { step, count })
    }

    /// Grid fine enough for continuum energies up to `eps_max`, never
    /// coarser than `max_step`.
    pub fn for_energy(eps_max: f64, r_max: f64, max_step: f64) -> Result<Self> {
        let k = (2.0 * eps_max.max(1e-6)).sqrt();
        let step = (2.0 * PI / k / STEPS_PER_WAVELENGTH).min(max_step);
        Self::new(step, r_max.max(MIN_MATCH_RADIUS))
    }

    pub fn r(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.step
    }

    pub fn r_max(&self) -> f64 {
        self.r(self.count - 1)
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.r(i)).collect()
    }

    /// Trapezoid from the origin, where every radial function vanishes.
    pub fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        let n = self.count;
        let inner: f64 = (0..n - 1).map(&f).sum();
        self.step * (inner + 0.5 * f(n - 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundOrbital {
    pub n: u32,
    pub l: u32,
    pub energy: f64,
    pub grid: RadialGrid,
    /// `u(r) = r R(r)`, positive near the origin.
    pub radial: Vec<f64>,
}

impl BoundOrbital {
    pub fn norm(&self) -> f64 {
        self.grid.integrate(|i| self.radial[i] * self.radial[i])
    }

    pub fn interior_nodes(&self) -> usize {
        count_nodes(&self.radial)
    }

    pub fn overlap(&self, other: &BoundOrbital) -> f64 {
        self.grid.integrate(|i| self.radial[i] * other.radial[i])
    }

    /// `⟨r⟩`, used to size continuum grids.
    pub fn mean_radius(&self) -> f64 {
        self.grid.integrate(|i| self.radial[i] * self.radial[i] * self.grid.r(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumWave {
    pub epsilon: f64,
    pub l: u32,
    /// Coulomb phase σ_L.
    pub coulomb_phase: f64,
    /// Short-range phase δ_L, in (-π, π].
    pub short_range_phase: f64,
    pub grid: RadialGrid,
    /// Energy-normalized `u(r)`, asymptotically `√(2/πk) sin(kr + ln(2kr) Z/k - Lπ/2 + η_L)`.
    pub radial: Vec<f64>,
    /// Relative deviation from the fitted asymptote at a third radius.
    pub match_residual: f64,
}

impl ContinuumWave {
    /// Total scattering phase η_L = σ_L + δ_L.
    pub fn phase(&self) -> f64 {
        self.coulomb_phase + self.short_range_phase
    }

    pub fn k(&self) -> f64 {
        (2.0 * self.epsilon).sqrt()
    }
}

fn count_nodes(u: &[f64]) -> usize {
    let peak = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-10 * peak;
    let mut nodes = 0;
    let mut last_sign = 0.0;
    for v in u {
        if v.abs() <= floor {
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            nodes += 1;
        }
        last_sign = s;
    }
    nodes
}

/// `q(r)` in `u'' = q u`.
fn numerov_q(pot: &CentralPotential, l: u32, energy: f64, grid: &RadialGrid) -> Vec<f64> {
    let ll = (l * (l + 1)) as f64;
    (0..grid.count)
        .map(|i| {
            let r = grid.r(i);
            ll / (r * r) + 2.0 * (pot.value(r) - energy)
        })
        .collect()
}

/// Frobenius expansion of the regular solution, used for the two starting
/// values of the outward integration.
fn regular_start(pot: &CentralPotential, l: u32, energy: f64, r: f64) -> f64 {
    let lf = l as f64;
    let z_eff = pot.z + pot.a;
    let v0 = pot.a * pot.b;
    let v1 = -0.5 * pot.a * pot.b * pot.b;
    let c1 = -z_eff / (lf + 1.0);
    let c2 = (-2.0 * z_eff * c1 + 2.0 * (v0 - energy)) / (2.0 * (2.0 * lf + 3.0));
    let c3 = (-2.0 * z_eff * c2 + 2.0 * (v0 - energy) * c1 + 2.0 * v1) / (3.0 * (2.0 * lf + 4.0));
    r.powi(l as i32 + 1) * (1.0 + r * (c1 + r * (c2 + r * c3)))
}

/// Outward Numerov integration over indices `0..end`.
fn integrate_outward(q: &[f64], h: f64, start: (f64, f64), end: usize, out: &mut Vec<f64>) {
    let g = h * h / 12.0;
    out.clear();
    out.push(start.0);
    out.push(start.1);
    for i in 2..end {
        let next = (2.0 * (1.0 + 5.0 * g * q[i - 1]) * out[i - 1] - (1.0 - g * q[i - 2]) * out[i - 2]) / (1.0 - g * q[i]);
        out.push(next);
    }
}

/// Number of sign changes of the outward solution, rescaling on the fly so
/// that deep energies cannot overflow.
fn outward_node_count(q: &[f64], h: f64, start: (f64, f64)) -> usize {
    let g = h * h / 12.0;
    let (mut prev, mut cur) = start;
    let mut nodes = 0;
    for i in 2..q.len() {
        let next = (2.0 * (1.0 + 5.0 * g * q[i - 1]) * cur - (1.0 - g * q[i - 2]) * prev) / (1.0 - g * q[i]);
        if next != 0.0 && cur != 0.0 && next.signum() != cur.signum() {
            nodes += 1;
        }
        prev = cur;
        cur = next;
        if cur.abs() > 1e100 {
            prev *= 1e-100;
            cur *= 1e-100;
        }
    }
    nodes
}

/// Bound eigenstate `(n, l)`. The pure Coulomb case uses the analytic
/// hydrogenic solution; screened potentials are solved numerically.
pub fn solve_bound(pot: &CentralPotential, n: u32, l: u32, grid: &RadialGrid) -> Result<BoundOrbital> {
    if n <= l {
        return Err(Error::domain(format!("bound state needs n > l (got n={n}, l={l})")));
    }
    if pot.is_coulomb() {
        hydrogenic(pot.z, n, l, grid)
    } else {
        solve_bound_numeric(pot, n, l, grid)
    }
}

fn hydrogenic(z: f64, n: u32, l: u32, grid: &RadialGrid) -> Result<BoundOrbital> {
    let nr = n - l - 1;
    let alpha = (2 * l + 1) as f64;
    let laguerre = |x: f64| {
        let (mut p0, mut p1) = (1.0, 1.0 + alpha - x);
        if nr == 0 {
            return p0;
        }
        for k in 1..nr {
            let kf = k as f64;
            let p2 = ((2.0 * kf + 1.0 + alpha - x) * p1 - (kf + alpha) * p0) / (kf + 1.0);
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let nf = n as f64;
    let mut radial: Vec<f64> = (0..grid.count)
        .map(|i| {
            let r = grid.r(i);
            let x = 2.0 * z * r / nf;
            r * x.powi(l as i32) * (-x / 2.0).exp() * laguerre(x)
        })
        .collect();
    normalize(&mut radial, grid)?;
    Ok(BoundOrbital { n, l, energy: -z * z / (2.0 * nf * nf), grid: *grid, radial })
}

fn normalize(u: &mut [f64], grid: &RadialGrid) -> Result<()> {
    let norm = grid.integrate(|i| u[i] * u[i]).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Convergence("orbital has zero or non-finite norm".into()));
    }
    u.iter_mut().for_each(|v| *v /= norm);
    Ok(())
}

/// Numerical eigenstate by node-count bisection on the energy, followed by
/// outward/inward Numerov integration joined at the outer turning point.
pub fn solve_bound_numeric(pot: &CentralPotential, n: u32, l: u32, grid: &RadialGrid) -> Result<BoundOrbital> {
    if n <= l {
        return Err(Error::domain(format!("bound state needs n > l (got n={n}, l={l})")));
    }
    let target = (n - l - 1) as usize;
    let h = grid.step;
    let z_eff = pot.z + pot.a;
    let mut lo = -0.5 * z_eff * z_eff - 1.0;
    let mut hi = -1e-12;

    let nodes_at = |e: f64| {
        let q = numerov_q(pot, l, e, grid);
        let start = (regular_start(pot, l, e, grid.r(0)), regular_start(pot, l, e, grid.r(1)));
        outward_node_count(&q, h, start)
    };
    if nodes_at(lo) > target {
        return Err(Error::Convergence(format!("lower energy bound already has too many nodes for n={n}, l={l}")));
    }
    if nodes_at(hi) <= target {
        return Err(Error::Convergence(format!(
            "state n={n}, l={l} is not bound inside r_max={}",
            grid.r_max()
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if nodes_at(mid) > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let energy = 0.5 * (lo + hi);

    let q = numerov_q(pot, l, energy, grid);
    // Outermost classical turning point, kept away from both ends.
    let turning = (0..grid.count).rev().find(|&i| q[i] < 0.0).unwrap_or(grid.count / 2);
    let join = turning.clamp(4, grid.count - 4);

    let mut outward = Vec::with_capacity(join + 2);
    let start = (regular_start(pot, l, energy, grid.r(0)), regular_start(pot, l, energy, grid.r(1)));
    integrate_outward(&q, h, start, join + 1, &mut outward);

    let g = h * h / 12.0;
    let mut inward = vec![0.0; grid.count];
    inward[grid.count - 1] = 0.0;
    inward[grid.count - 2] = 1e-30;
    for i in (join..grid.count - 2).rev() {
        inward[i] = (2.0 * (1.0 + 5.0 * g * q[i + 1]) * inward[i + 1] - (1.0 - g * q[i + 2]) * inward[i + 2]) / (1.0 - g * q[i]);
        if inward[i].abs() > 1e100 {
            for v in &mut inward[i..] {
                *v *= 1e-100;
            }
        }
    }
    if inward[join] == 0.0 {
        return Err(Error::Convergence("inward solution vanished at the join".into()));
    }
    let scale = outward[join] / inward[join];
    let mut radial = outward;
    radial.truncate(join);
    radial.extend(inward[join..].iter().map(|v| v * scale));
    normalize(&mut radial, grid)?;

    let orbital = BoundOrbital { n, l, energy, grid: *grid, radial };
    let nodes = orbital.interior_nodes();
    if nodes != target {
        return Err(Error::Convergence(format!("found {nodes} nodes for n={n}, l={l}; expected {target}")));
    }
    Ok(orbital)
}

/// Energy-normalized continuum wave of energy `epsilon` and angular momentum
/// `l`, matched to Coulomb functions at the edge of the grid.
pub fn solve_continuum(pot: &CentralPotential, epsilon: f64, l: u32, grid: &RadialGrid) -> Result<ContinuumWave> {
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("continuum energy must be positive (got {epsilon})")));
    }
    let k = (2.0 * epsilon).sqrt();
    let wavelength = 2.0 * PI / k;
    if grid.step > wavelength / STEPS_PER_WAVELENGTH * (1.0 + 1e-9) {
        return Err(Error::Grid(format!(
            "step {} under-resolves wavelength {wavelength:.4} at epsilon {epsilon}",
            grid.step
        )));
    }
    if grid.r_max() < MIN_MATCH_RADIUS * (1.0 - 1e-9) {
        return Err(Error::Grid(format!("r_max {} below matching radius {MIN_MATCH_RADIUS}", grid.r_max())));
    }
    let h = grid.step;
    let q = numerov_q(pot, l, epsilon, grid);
    let start = (regular_start(pot, l, epsilon, grid.r(0)), regular_start(pot, l, epsilon, grid.r(1)));
    let mut u = Vec::with_capacity(grid.count);
    integrate_outward(&q, h, start, grid.count, &mut u);

    let eta = -pot.z / k;
    let quarter = ((wavelength / 4.0) / h).round().max(1.0) as usize;
    let i1 = grid.count - 1;
    let i2 = i1 - quarter;
    let i3 = i1 - quarter / 2 - quarter;
    let fg = |i: usize| coulomb_fg_asymptotic(l, eta, k * grid.r(i));
    let (f1, g1) = fg(i1)?;
    let (f2, g2) = fg(i2)?;
    let det = f1 * g2 - f2 * g1;
    if det.abs() < 1e-8 {
        return Err(Error::Grid("degenerate Coulomb matching points".into()));
    }
    let a = (u[i1] * g2 - u[i2] * g1) / det;
    let b = (f1 * u[i2] - f2 * u[i1]) / det;
    let amplitude = a.hypot(b);
    let delta = b.atan2(a);
    let (f3, g3) = fg(i3)?;
    let match_residual = ((a * f3 + b * g3) - u[i3]).abs() / amplitude;
    if match_residual > MATCH_TOLERANCE {
        return Err(Error::Grid(format!(
            "continuum match residual {match_residual:.2e} at epsilon {epsilon}, L {l}"
        )));
    }
    let norm = (2.0 / (PI * k)).sqrt() / amplitude;
    u.iter_mut().for_each(|v| *v *= norm);
    Ok(ContinuumWave {
        epsilon,
        l,
        coulomb_phase: coulomb_phase(pot.z, k, l),
        short_range_phase: delta,
        grid: *grid,
        radial: u,
        match_residual,
    })
}

/// `∫ u_{εL}(r) r u_{nl}(r) dr` with the dipole selection rule `|L - l| = 1`.
pub fn radial_dipole(bound: &BoundOrbital, cont: &ContinuumWave) -> Result<f64> {
    if bound.l.abs_diff(cont.l) != 1 {
        return Err(Error::SelectionRule(format!(
            "dipole couples l={} only to L=l±1, not L={}",
            bound.l, cont.l
        )));
    }
    if bound.grid != cont.grid {
        return Err(Error::domain("bound and continuum orbitals live on different grids"));
    }
    let g = &bound.grid;
    Ok(g.integrate(|i| cont.radial[i] * g.r(i) * bound.radial[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> RadialGrid {
        RadialGrid::new(0.01, 200.0).unwrap()
    }

    #[test]
    fn potential_validation() {
        assert!(CentralPotential::new(0.0, 0.0, 1.0).is_err());
        assert!(CentralPotential::new(1.0, -1.0, 1.0).is_err());
        assert!(CentralPotential::new(1.0, 1.0, 0.0).is_err());
        let p = CentralPotential::coulomb(1.0).unwrap();
        assert_eq!(p.value(2.0), -0.5);
    }

    #[test]
    fn hydrogen_levels() {
        let pot = CentralPotential::coulomb(1.0).unwrap();
        let s = solve_bound(&pot, 1, 0, &grid()).unwrap();
        assert_eq!(s.energy, -0.5);
        let p = solve_bound(&pot, 2, 1, &grid()).unwrap();
        assert_eq!(p.energy, -0.125);
        assert_eq!(p.interior_nodes(), 0);
        assert!((p.norm() - 1.0).abs() < 1e-8);
        assert!(solve_bound(&pot, 1, 1, &grid()).is_err());
    }

    #[test]
    fn numeric_solver_reproduces_hydrogen() {
        let pot = CentralPotential::new(1.0, 0.0, 1.0).unwrap();
        for (n, l) in [(1, 0), (2, 1), (3, 1), (3, 2)] {
            let num = solve_bound_numeric(&pot, n, l, &grid()).unwrap();
            let exact = -0.5 / (n * n) as f64;
            assert!((num.energy - exact).abs() < 1e-6, "n={n} l={l}: {}", num.energy);
            let ana = solve_bound(&pot, n, l, &grid()).unwrap();
            assert!((num.overlap(&ana) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn extra_attraction_lowers_energy() {
        let pot = CentralPotential::new(1.0, 1.0, 1.0).unwrap();
        let p = solve_bound(&pot, 2, 1, &grid()).unwrap();
        assert!(p.energy < -0.125);
        assert_eq!(p.interior_nodes(), 0);
        let coulomb = solve_bound(&CentralPotential::coulomb(1.0).unwrap(), 2, 1, &grid()).unwrap();
        // first-order shift ⟨V_short⟩ is negative, as is the full shift
        let first_order = coulomb.grid.integrate(|i| coulomb.radial[i].powi(2) * pot.short_range(coulomb.grid.r(i)));
        assert!(first_order < 0.0);
        assert!(p.energy - (-0.125) < 0.0);
    }

    #[test]
    fn pure_coulomb_has_no_short_range_phase() {
        let pot = CentralPotential::coulomb(1.0).unwrap();
        for l in 0..3 {
            let c = solve_continuum(&pot, 0.5, l, &grid()).unwrap();
            assert!(c.short_range_phase.abs() < 1e-5, "L={l}: {}", c.short_range_phase);
            assert_relative_eq!(c.coulomb_phase, coulomb_phase(1.0, 1.0, l));
        }
    }

    #[test]
    fn continuum_rejects_bad_inputs() {
        let pot = CentralPotential::coulomb(1.0).unwrap();
        assert!(matches!(solve_continuum(&pot, 0.0, 0, &grid()), Err(Error::Domain(_))));
        let coarse = RadialGrid::new(0.5, 200.0).unwrap();
        assert!(matches!(solve_continuum(&pot, 2.0, 0, &coarse), Err(Error::Grid(_))));
        let short = RadialGrid::new(0.01, 50.0).unwrap();
        assert!(matches!(solve_continuum(&pot, 0.5, 0, &short), Err(Error::Grid(_))));
    }

    #[test]
    fn dipole_selection_rule() {
        let pot = CentralPotential::coulomb(1.0).unwrap();
        let s = solve_bound(&pot, 1, 0, &grid()).unwrap();
        let c = solve_continuum(&pot, 0.5, 0, &grid()).unwrap();
        assert!(matches!(radial_dipole(&s, &c), Err(Error::SelectionRule(_))));
    }
}
