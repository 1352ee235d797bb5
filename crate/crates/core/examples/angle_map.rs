//! Angle-resolved PANDA delay for the hydrogen 2p/3p packet with computed
//! Coulomb channels; shows the sign change near the magic angle.

use panda::atomic::*;
use panda::panda::*;
use panda::pulse::*;
use panda::units::*;
use panda::wavepacket::WavePacket;

fn main() -> panda::Result<()> {
    let w = WavePacket::hydrogenic(1.0, 2, 3, 1)?;
    let energies: Vec<f64> = [10.0, 30.0, 60.0].into_iter().map(ev_to_au).collect();
    let pot = CentralPotential::coulomb(1.0)?;
    let grid = RadialGrid::for_energy(energies[2], 300.0, 0.02)?;
    let table = |n| -> panda::Result<ChannelTable> { ChannelTable::compute(&pot, &solve_bound(&pot, n, 1, &grid)?, &energies) };
    let ch = PacketChannels::new(table(2)?, table(3)?);
    let p = SpectralPulse::flat(FrequencyGrid::uniform(ev_to_au(1.0), ev_to_au(80.0), 4001)?, 1.0)?;

    let thetas: Vec<f64> = (0..=18).map(|i| (5.0 * i as f64).to_radians()).collect();
    let map = angle_map(&w, &p, &ch, &energies, &thetas)?;
    println!("{:>7}  {}", "theta", energies.iter().map(|e| format!("{:>12.0} eV", au_to_ev(*e))).collect::<String>());
    for (it, th) in thetas.iter().enumerate() {
        let row: String = (0..energies.len()).map(|ie| format!("{:>12.3} as", au_to_as(map.angular_cut(ie)[it]))).collect();
        println!("{:>6.0}°  {row}", th.to_degrees());
    }
    println!("magic angle {MAGIC_ANGLE_DEG:.3}°");
    Ok(())
}
