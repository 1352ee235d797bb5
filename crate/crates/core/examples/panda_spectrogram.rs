//! Forward PANDA model: absorption of a chirped pulse by a two-level p-state
//! wave packet, printed as a coarse energy-delay table.

use panda::atomic::ChannelTable;
use panda::panda::*;
use panda::pulse::*;
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
    let ch = PacketChannels::new(unit(1)?, unit(1)?);

    let e0 = c - w.effective_binding();
    let energies: Vec<f64> = (0..7).map(|i| e0 + ev_to_au(-6.0 + 2.0 * i as f64)).collect();
    let delays = delay_grid(&w, 8, 1);
    let s = spectrogram(&w, &p, &ch, &energies, &delays)?;

    println!("beat period {:.2} fs", au_to_fs(2.0 * std::f64::consts::PI / w.splitting()));
    print!("{:>10}", "delay fs");
    for e in &energies {
        print!("{:>10.1}", au_to_ev(*e));
    }
    println!();
    for (k, t) in delays.iter().enumerate() {
        print!("{:>10.3}", au_to_fs(*t));
        for col in &s.values {
            print!("{:>10.4}", col[k]);
        }
        println!();
    }
    for &e in &energies {
        let b = beat_terms(&w, &p, &ch, e)?;
        println!("{:7.2} eV  contrast {:.3}", au_to_ev(e), b.contrast());
    }
    Ok(())
}
