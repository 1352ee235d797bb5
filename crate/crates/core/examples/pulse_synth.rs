//! Synthesizes a chirped Gaussian XUV pulse and reports its spectral and
//! temporal properties.

use panda::pulse::*;
use panda::units::*;

fn main() -> panda::Result<()> {
    let (c, bw) = (ev_to_au(100.0), ev_to_au(5.0));
    let grid = FrequencyGrid::uniform(c - 4.0 * bw, c + 4.0 * bw, 2001)?;
    let spec = GaussianPulseSpec::fourier_limited(c, bw).with_gdd(as2_to_au(5000.0));
    let p = synthesize_gaussian(&spec, &grid)?;
    println!("centroid      {:.3} eV", au_to_ev(p.centroid()));
    println!("intensity FWHM {:.3} eV", au_to_ev(p.intensity_fwhm().unwrap_or(f64::NAN)));
    println!("TL duration   {:.1} as", au_to_as(spec.transform_limited_duration()));

    let gd = group_delay(&p)?;
    for i in (0..grid.len()).step_by(250) {
        println!("{:8.2} eV  GD {:8.1} as", au_to_ev(grid.points()[i]), au_to_as(gd[i]));
    }

    let dt = std::f64::consts::PI / grid.max() / 4.0;
    let n = (fs_to_au(6.0) / dt) as usize + 1;
    let field = to_time_domain(&p, &uniform_times(-fs_to_au(3.0), fs_to_au(3.0), n))?;
    println!("Parseval: time {:.6e}  frequency {:.6e}", field.energy(), p.spectral_energy());
    Ok(())
}
