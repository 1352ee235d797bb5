//! Potassium 4p fine-structure packet: beat period and the recovered
//! Raman phase for a delayed XUV pulse.

use panda::panda::*;
use panda::pulse::*;
use panda::units::*;

fn main() -> panda::Result<()> {
    let laser = SpectralPulse::flat(FrequencyGrid::uniform(ev_to_au(1.55), ev_to_au(1.67), 301)?, 1.0)?;
    let cfg = SOConfig::potassium(laser)?;
    println!("beat period {:.3} fs", au_to_fs(cfg.beat_period()));

    let xuv = SpectralPulse::flat(FrequencyGrid::uniform(ev_to_au(20.0), ev_to_au(40.0), 2001)?, 1.0)?;
    let energies: Vec<f64> = [25.0, 27.5, 30.0].into_iter().map(ev_to_au).collect();
    for tau_fs in [0.0, 50.0, 150.0] {
        let delayed = apply_delay(&xuv, fs_to_au(tau_fs));
        let s = so_spectrum(&cfg, &delayed, |_| SORadial { s: 0.6, d: 1.4, bound: 1.0 }, &energies)?;
        println!(
            "tau {tau_fs:6.1} fs  Theta {:+.4} rad  closed-form error {:.1e}",
            s.theta[0],
            s.closed_form_error()
        );
        for w in &s.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
