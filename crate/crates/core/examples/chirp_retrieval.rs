//! Recovers the group delay of a chirped pulse from a noisy PANDA
//! spectrogram and compares it with the truth.

use panda::atomic::ChannelTable;
use panda::panda::*;
use panda::pulse::*;
use panda::retrieval::{compare, retrieve, RetrievalOptions};
use panda::units::*;
use panda::wavepacket::{BoundState, WavePacket};

fn main() -> panda::Result<()> {
    let w = WavePacket::normalized(
        BoundState::new(2, 1, 0, ev_to_au(-3.0), 1.0)?,
        BoundState::new(3, 1, 0, ev_to_au(-2.73), 1.0)?,
    )?;
    let (c, bw) = (ev_to_au(100.0), ev_to_au(5.0));
    let grid = FrequencyGrid::uniform(c - 4.0 * bw, c + 4.0 * bw, 2001)?;
    let truth = synthesize_gaussian(&GaussianPulseSpec::fourier_limited(c, bw).with_gdd(as2_to_au(5000.0)), &grid)?;
    let unit = |l| ChannelTable::constant(l, &[(0, 1.0, 0.0), (2, 1.0, 0.0)]);
    let ch = PacketChannels::new(unit(1)?, unit(1)?);

    let e0 = c - w.effective_binding();
    let energies: Vec<f64> = (0..41).map(|i| e0 + ev_to_au(-6.0 + 0.3 * i as f64)).collect();
    let s = spectrogram(&w, &truth, &ch, &energies, &default_delays(&w))?.with_noise(NoiseSpec { sigma: 1e-4, seed: 7 })?;
    let r = retrieve(&s, &w, RetrievalOptions::default())?;
    let d = compare(&truth, &r)?;

    for i in (0..r.frequencies.len()).step_by(5) {
        println!(
            "{:8.2} eV  GD {:8.1} as  branch {}  contrast {:.3}{}",
            au_to_ev(r.frequencies[i]),
            au_to_as(r.group_delay[i]),
            r.branch[i],
            r.contrast[i],
            if r.mask[i] { "  masked" } else { "" }
        );
    }
    println!("RMS error {:.3} as over a {:.1} as span ({} columns)", au_to_as(d.rms), au_to_as(d.span), d.columns);
    Ok(())
}
