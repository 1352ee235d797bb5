//! Photoionization cross sections from the radial solver: hydrogen 1s
//! against its closed form, and a screened p orbital.

use panda::atomic::*;
use panda::units::*;
use std::f64::consts::PI;

fn main() -> panda::Result<()> {
    let h = CentralPotential::coulomb(1.0)?;
    let photons = [20.0, 50.0, 100.0, 300.0, 800.0];
    let eps: Vec<f64> = photons.iter().map(|&w| ev_to_au(w) - 0.5).collect();
    let grid = RadialGrid::for_energy(eps[eps.len() - 1], 60.0, 0.01)?;
    let sigma = cross_section(&h, &solve_bound(&h, 1, 0, &grid)?, &eps)?;
    for ((w, e), s) in photons.iter().zip(&eps).zip(&sigma) {
        let k = (2.0 * e).sqrt();
        let exact = 2f64.powi(9) * PI * PI * ALPHA / 3.0 * (0.5 / (e + 0.5)).powi(4) * (-4.0 * k.atan() / k).exp()
            / (1.0 - (-2.0 * PI / k).exp());
        println!("H 1s  {w:6.0} eV  {:.4e} Mb  exact {:.4e} Mb", s, exact * BOHR2_MB);
    }

    let screened = CentralPotential::new(1.0, 4.0, 1.0)?;
    let eps: Vec<f64> = [1.0, 2.0, 4.0].into_iter().collect();
    let grid = RadialGrid::for_energy(4.0, 200.0, 0.02)?;
    let orb = solve_bound(&screened, 2, 1, &grid)?;
    println!("screened 2p binding {:.3} eV", au_to_ev(-orb.energy));
    for (e, s) in eps.iter().zip(cross_section(&screened, &orb, &eps)?) {
        println!("  eps {:5.2} au  {:.4e} Mb", e, s);
    }
    Ok(())
}
