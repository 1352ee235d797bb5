//! A Fano resonance shared by both wave-packet states distorts the
//! spectrogram amplitude but leaves the beat phase untouched.

use panda::atomic::*;
use panda::panda::*;
use panda::pulse::*;
use panda::retrieval::{retrieve, RetrievalOptions};
use panda::units::*;
use panda::wavepacket::{BoundState, WavePacket};

fn main() -> panda::Result<()> {
    let w = WavePacket::normalized(
        BoundState::new(2, 1, 0, ev_to_au(-3.0), 1.0)?,
        BoundState::new(3, 1, 0, ev_to_au(-2.73), 1.0)?,
    )?;
    let (c, bw) = (ev_to_au(100.0), ev_to_au(5.0));
    let grid = FrequencyGrid::uniform(c - 4.0 * bw, c + 4.0 * bw, 2001)?;
    let p = synthesize_gaussian(&GaussianPulseSpec::fourier_limited(c, bw).with_gdd(as2_to_au(5000.0)), &grid)?;
    let unit = |l| ChannelTable::constant(l, &[(0, 1.0, 0.0), (2, 1.0, 0.0)]);
    let plain = PacketChannels::new(unit(1)?, unit(1)?);
    let e0 = c - w.effective_binding();
    let dressed = PacketChannels::new(
        plain.state1.clone().with_fano(FanoParams::new(2.0, e0, ev_to_au(0.5))?),
        plain.state2.clone().with_fano(FanoParams::new(-1.5, e0, ev_to_au(0.5))?),
    );

    let energies: Vec<f64> = (0..25).map(|i| e0 + ev_to_au(-3.0 + 0.25 * i as f64)).collect();
    let delays = default_delays(&w);
    let a = retrieve(&spectrogram(&w, &p, &plain, &energies, &delays)?, &w, RetrievalOptions::default())?;
    let b = retrieve(&spectrogram(&w, &p, &dressed, &energies, &delays)?, &w, RetrievalOptions::default())?;
    for i in (0..energies.len()).step_by(3) {
        println!(
            "{:7.2} eV  contrast {:.3} -> {:.3}  beat phase {:+.6} -> {:+.6}",
            au_to_ev(energies[i]),
            a.contrast[i],
            b.contrast[i],
            a.beat_phase[i],
            b.beat_phase[i]
        );
    }
    Ok(())
}
