//! SFA streaking of a 200 as pulse by an 800 nm field; compares centroid
//! shifts with the classical momentum-shift law.

use panda::pulse::*;
use panda::streak::*;
use panda::units::*;

fn main() -> panda::Result<()> {
    let (c, bw) = (ev_to_au(100.0), ev_to_au(9.125));
    let grid = FrequencyGrid::uniform(c - 4.0 * bw, c + 4.0 * bw, 1201)?;
    let p = synthesize_gaussian(&GaussianPulseSpec::fourier_limited(c, bw), &grid)?;
    let laser = LaserField::new(0.1, ev_to_au(1.5498), fs_to_au(25.0), 0.0)?;
    let ip = 0.5;
    let e0 = c - ip;
    let energies: Vec<f64> = (0..241).map(|i| e0 + ev_to_au(-30.0 + 0.25 * i as f64)).collect();
    let delays: Vec<f64> = (0..13).map(|i| laser.period() * (i as f64 / 12.0 - 0.5)).collect();
    let opts = StreakOptions::for_pulse(&p);
    let s = streak_spectrogram(&p, &laser, ip, &energies, &delays, opts)?;
    let reference = streak_spectrogram(&p, &LaserField::off(), ip, &energies, &[0.0], opts)?.centroids()[0];
    let p0 = (2.0 * e0).sqrt();
    for (t, c) in delays.iter().zip(s.centroids()) {
        let classical = classical_energy(p0, &laser, *t) - e0;
        println!("{:7.3} fs  shift {:+7.3} eV  classical {:+7.3} eV", au_to_fs(*t), au_to_ev(c - reference), au_to_ev(classical));
    }
    Ok(())
}
