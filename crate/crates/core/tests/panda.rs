use num_complex::Complex64;
use panda::atomic::{fano_dress, ChannelTable, FanoParams, PartialWave};
use panda::panda::*;
use panda::pulse::*;
use panda::retrieval::*;
use panda::units::{as2_to_au, as_to_au, ev_to_au};
use panda::wavepacket::{validate_against_pulse, BoundState, WavePacket, DEFAULT_MARGIN};
use panda::Error;
use proptest::prelude::*;
use std::f64::consts::{LN_2, PI};

/// p-state packet at -3.0 eV and -3.0 + `split_ev`.
fn packet(split_ev: f64) -> WavePacket {
    WavePacket::normalized(
        BoundState::new(2, 1, 0, ev_to_au(-3.0), 1.0).unwrap(),
        BoundState::new(3, 1, 0, ev_to_au(-3.0 + split_ev), 1.0).unwrap(),
    )
    .unwrap()
}

/// Gaussian magnitude around `center` with an arbitrary phase function of
/// the detuning, sampled on a fine grid.
fn shaped(center_ev: f64, fwhm_ev: f64, phase: impl Fn(f64) -> f64) -> SpectralPulse {
    let (c, bw) = (ev_to_au(center_ev), ev_to_au(fwhm_ev));
    let grid = FrequencyGrid::uniform(c - 4.0 * bw, c + 4.0 * bw, 8001).unwrap();
    let mag = grid.points().iter().map(|w| (-2.0 * LN_2 * ((w - c) / bw).powi(2)).exp()).collect();
    let ph = grid.points().iter().map(|w| phase(w - c)).collect();
    SpectralPulse::new(grid, mag, ph, 0.0).unwrap()
}

fn chirped(gdd_as2: f64) -> SpectralPulse {
    let g = as2_to_au(gdd_as2);
    shaped(100.0, 5.0, move |d| 0.5 * g * d * d)
}

fn unit_channels() -> PacketChannels {
    let t = ChannelTable::constant(1, &[(0, 1.0, 0.0), (2, 1.0, 0.0)]).unwrap();
    PacketChannels::new(t.clone(), t)
}

/// Photoelectron energies whose mean photon frequency spans ±`half_ev`
/// around 100 eV.
fn energies(w: &WavePacket, half_ev: f64, n: usize) -> Vec<f64> {
    let c = ev_to_au(100.0) - w.effective_binding();
    let h = ev_to_au(half_ev);
    (0..n).map(|i| c - h + 2.0 * h * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn chirped_beat_phase_matches_the_exact_phase_difference() {
    // For a quadratic phase the phase difference one splitting apart is
    // Δω·G·(ω̄ - ω_X) with no shearing error.
    let w = packet(0.27);
    let g = as2_to_au(5000.0);
    let p = chirped(5000.0);
    for eps in energies(&w, 7.5, 11) {
        let t = beat_terms(&w, &p, &unit_channels(), eps).unwrap();
        let expect = w.splitting() * g * (w.mean_frequency(eps) - ev_to_au(100.0));
        assert!((t.theta0 - expect).abs() < 1e-6, "{} vs {expect}", t.theta0);
        assert!(t.b > 0.0);
    }
}

#[test]
fn fringes_are_straight_for_a_flat_phase_and_shift_with_delay() {
    let w = packet(0.27);
    let p = shaped(100.0, 5.0, |_| 0.0);
    let en = energies(&w, 7.5, 21);
    let delays = default_delays(&w);
    let flat = panda_delay(&spectrogram(&w, &p, &unit_channels(), &en, &delays).unwrap(), w.splitting()).unwrap();
    assert!(flat.max_abs_delay() < as_to_au(1e-6), "{}", flat.max_abs_delay());
    let tau0 = as_to_au(300.0);
    let moved = apply_delay(&p, tau0);
    let c = panda_delay(&spectrogram(&w, &moved, &unit_channels(), &en, &delays).unwrap(), w.splitting()).unwrap();
    for (_, d) in c.unmasked() {
        assert!((d - tau0).abs() < 1e-3 * tau0, "{d} vs {tau0}");
    }
}

#[test]
fn orthogonal_channels_give_no_beat() {
    let w = packet(0.27);
    let s_only = ChannelTable::constant(1, &[(0, 1.0, 0.0)]).unwrap();
    let d_only = ChannelTable::constant(1, &[(2, 1.0, 0.0)]).unwrap();
    let ch = PacketChannels::new(s_only, d_only);
    let s = spectrogram(&w, &chirped(2000.0), &ch, &energies(&w, 5.0, 5), &default_delays(&w)).unwrap();
    for col in &s.values {
        let (lo, hi) = col.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi - lo <= 1e-14 * hi);
    }
}

#[test]
fn delay_axis_is_periodic() {
    let w = packet(0.27);
    let per = 8;
    let s = spectrogram(&w, &chirped(5000.0), &unit_channels(), &energies(&w, 7.5, 9), &delay_grid(&w, per, 3)).unwrap();
    for col in &s.values {
        for k in 0..per {
            for q in [k + per, k + 2 * per] {
                assert!((col[k] - col[q]).abs() <= 1e-12 * col[k].abs().max(1e-300));
            }
        }
    }
}

#[test]
fn angle_integration_sum_rule() {
    // Independent quadrature: composite Simpson in x = cos θ, 2π azimuth.
    let st = BoundState::hydrogenic(1.0, 2, 1, 0, 1.0).unwrap();
    let t = ChannelTable::constant(1, &[(0, 0.7, 0.4), (2, -1.3, 1.9)]).unwrap();
    let n = 2000;
    let h = 2.0 / n as f64;
    let mut integral = 0.0;
    for i in 0..=n {
        let x = -1.0 + h * i as f64;
        let wgt = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let a = angular_emission(&st, &t, 1.0, x.acos()).unwrap().amplitude();
        integral += wgt * a.norm_sqr();
    }
    integral *= 2.0 * PI * h / 3.0;
    let sum = angular_emission(&st, &t, 1.0, 0.3).unwrap().channel_sum();
    assert!((integral - sum).abs() < 1e-8 * sum, "{integral} vs {sum}");
}

#[test]
fn angle_integrated_terms_reduce_to_the_incoherent_channel_sum() {
    let w = WavePacket::hydrogenic(1.0, 2, 3, 1).unwrap();
    let t1 = ChannelTable::constant(1, &[(0, 0.7, 0.4), (2, -1.3, 1.9)]).unwrap();
    // One continuum channel (ε, L) has one scattering phase whatever the
    // initial state.
    let t2 = ChannelTable::constant(1, &[(0, 0.5, 0.4), (2, 0.9, 1.9)]).unwrap();
    let ch = PacketChannels::new(t1, t2);
    let p = chirped(3000.0);
    let eps = ev_to_au(100.0) - w.effective_binding();
    // Angle integration cancels the scattering phases in the cross term,
    // leaving the incoherent sum over L of radial products.
    let integrated = angle_integrated_terms(&w, &p, &ch, eps).unwrap();
    let direct = beat_terms(&w, &p, &ch, eps).unwrap();
    for (a, b) in [(integrated.a1, direct.a1), (integrated.a2, direct.a2), (integrated.b, direct.b)] {
        assert!((a - b).abs() < 1e-8 * direct.a1.max(direct.a2), "{a} vs {b}");
    }
    assert!((integrated.theta0 - direct.theta0).abs() < 1e-8);
}

#[test]
fn single_open_channel_has_no_angular_latency() {
    let w = WavePacket::hydrogenic(1.0, 2, 3, 1).unwrap();
    let t1 = ChannelTable::constant(1, &[(0, 0.7, 0.4), (2, 0.0, 1.9)]).unwrap();
    let t2 = ChannelTable::constant(1, &[(0, 0.5, 1.1), (2, 0.0, 0.2)]).unwrap();
    let ch = PacketChannels::new(t1, t2);
    let p = chirped(3000.0);
    let eps = ev_to_au(100.0) - w.effective_binding();
    let reference = angle_resolved_terms(&w, &p, &ch, eps, 0.0).unwrap();
    for th in [0.3, 0.9, 1.4] {
        let t = angle_resolved_terms(&w, &p, &ch, eps, th).unwrap();
        assert!((t.theta0 - reference.theta0).abs() < 1e-12 && t.b.signum() == reference.b.signum());
    }
}

#[test]
fn magic_angle_matches_the_angle_integrated_phase() {
    let w = WavePacket::hydrogenic(1.0, 2, 3, 1).unwrap();
    let t1 = ChannelTable::constant(1, &[(0, 0.7, 0.4), (2, -1.3, 1.9)]).unwrap();
    let t2 = ChannelTable::constant(1, &[(0, 0.5, 0.4), (2, 0.9, 1.9)]).unwrap();
    let ch = PacketChannels::new(t1, t2);
    let p = chirped(3000.0);
    let eps = ev_to_au(100.0) - w.effective_binding();
    let magic = angle_resolved_terms(&w, &p, &ch, eps, MAGIC_ANGLE_DEG.to_radians()).unwrap();
    let integrated = angle_integrated_terms(&w, &p, &ch, eps).unwrap();
    // Only s survives at the magic angle, so no channel phase enters the
    // beat; the sign of the cross term may still differ (a branch, not a delay).
    let d = (magic.theta0 - integrated.theta0).rem_euclid(PI);
    assert!(d.min(PI - d) < 1e-10, "{d}");
    let off = angle_resolved_terms(&w, &p, &ch, eps, 0.2).unwrap();
    let d0 = (off.theta0 - integrated.theta0).rem_euclid(PI);
    assert!(d0.min(PI - d0) > 1e-3, "away from the magic angle the channel phases must show");
}

fn cooper_table(zero_at: f64, flip: bool) -> ChannelTable {
    let eps: Vec<f64> = (0..=50).map(|i| 2.5 + 0.02 * i as f64).collect();
    let radial = eps.iter().map(|&e| if flip { e - zero_at } else { 1.0 }).collect();
    ChannelTable::tabulated(1, eps.clone(), vec![PartialWave { l: 0, radial, phase: vec![0.0; eps.len()] }]).unwrap()
}

#[test]
fn simultaneous_sign_flip_cancels_in_the_beat() {
    let w = packet(0.27);
    let p = SpectralPulse::flat(FrequencyGrid::uniform(1.0, 6.0, 501).unwrap(), 1.0).unwrap();
    let zero = 3.0 + 1e-3;
    let en: Vec<f64> = (0..31).map(|i| 2.7 + 0.02 * i as f64).collect();
    let delays = default_delays(&w);
    let both = PacketChannels::new(cooper_table(zero, true), cooper_table(zero, true));
    let c = panda_delay(&spectrogram(&w, &p, &both, &en, &delays).unwrap(), w.splitting()).unwrap();
    assert!(c.branch.iter().all(|&b| b == 0), "{:?}", c.branch);
    let one = PacketChannels::new(cooper_table(zero, true), cooper_table(zero, false));
    let c1 = panda_delay(&spectrogram(&w, &p, &one, &en, &delays).unwrap(), w.splitting()).unwrap();
    let unmasked: Vec<u8> = c1.branch.iter().zip(&c1.mask).filter(|(_, m)| !**m).map(|(b, _)| *b).collect();
    assert!(unmasked.contains(&0) && unmasked.contains(&1), "single flip must change branch");
    // The branch flag absorbs the π; the delay itself stays continuous.
    let jumps = c1.delay.windows(2).map(|d| (d[1] - d[0]).abs()).fold(0.0, f64::max);
    assert!(jumps < 0.1 * w.beat_period() / 2.0);
}

#[test]
fn fano_dressing_leaves_the_beat_phase_alone() {
    let w = packet(0.27);
    let p = chirped(5000.0);
    let en = energies(&w, 6.0, 31);
    let fp = |q| FanoParams::new(q, en[15], ev_to_au(0.5)).unwrap();
    let plain = unit_channels();
    let dressed = PacketChannels::new(plain.state1.clone().with_fano(fp(2.0)), plain.state2.clone().with_fano(fp(-1.5)));
    let delays = default_delays(&w);
    let a = extract_beat_phase(&spectrogram(&w, &p, &plain, &en, &delays).unwrap(), w.splitting()).unwrap();
    let b = extract_beat_phase(&spectrogram(&w, &p, &dressed, &en, &delays).unwrap(), w.splitting()).unwrap();
    for (x, y) in a.iter().zip(&b) {
        if y.contrast < 0.02 {
            continue;
        }
        let d = (y.phase - x.phase).rem_euclid(PI);
        assert!(d.min(PI - d) < 1e-10, "{d}");
    }
}

#[test]
fn nyquist_is_enforced() {
    let w = packet(0.27);
    let coarse = delay_grid(&w, 5, 3);
    let r = spectrogram(&w, &chirped(0.0), &unit_channels(), &energies(&w, 5.0, 5), &coarse);
    assert!(matches!(r, Err(Error::Config(_))));
}

/// Retrieval RMS over the GD span for a given pulse, packet and grid.
fn round_trip(
    w: &WavePacket,
    p: &SpectralPulse,
    half_ev: f64,
    delays: &[f64],
    noise: Option<NoiseSpec>,
) -> (f64, Vec<f64>, Vec<f64>) {
    let en = energies(w, half_ev, 61);
    let mut s = spectrogram(w, p, &unit_channels(), &en, delays).unwrap();
    if let Some(n) = noise {
        s = s.with_noise(n).unwrap();
    }
    let r = retrieve(&s, w, RetrievalOptions::default()).unwrap();
    let d = compare(p, &r).unwrap();
    (d.rms / d.span, r.frequencies, r.group_delay)
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / x.iter().map(|a| (a - mx).powi(2)).sum::<f64>()
}

#[test]
fn gdd_slope_is_recovered_for_large_shearing_ratio() {
    let g = as2_to_au(5000.0);
    for ratio in [20.0, 40.0] {
        let w = packet(5.0 / ratio);
        let p = chirped(5000.0);
        let (rel, om, gd) = round_trip(&w, &p, 7.5, &default_delays(&w), None);
        let s = slope(&om, &gd);
        assert!((s - g).abs() < 0.01 * g, "ratio {ratio}: slope {s} vs {g}");
        assert!(rel < 0.01);
    }
}

#[test]
fn shearing_error_falls_quadratically_with_the_splitting() {
    // A sinusoidal spectral phase has φ''' ≠ 0, so the shearing error
    // Δω²φ'''/24 is visible and should drop fourfold per halving.
    let s = ev_to_au(1.0);
    let p = shaped(100.0, 5.0, move |d| 0.8 * (d / s).sin());
    let errs: Vec<f64> = [0.25, 0.125, 0.0625]
        .iter()
        .map(|&split| {
            let w = packet(split);
            round_trip(&w, &p, 7.5, &default_delays(&w), None).0
        })
        .collect();
    for k in 0..2 {
        let r = errs[k] / errs[k + 1];
        assert!((3.5..4.5).contains(&r), "{errs:?}");
    }
}

#[test]
fn global_delay_shifts_the_group_delay_uniformly() {
    let w = packet(0.27);
    let p = chirped(5000.0);
    let tau0 = as_to_au(400.0);
    let en = energies(&w, 7.5, 31);
    let delays = default_delays(&w);
    let gd = |p: &SpectralPulse| {
        let s = spectrogram(&w, p, &unit_channels(), &en, &delays).unwrap();
        retrieve(&s, &w, RetrievalOptions::default()).unwrap().group_delay
    };
    let (a, b) = (gd(&p), gd(&apply_delay(&p, tau0)));
    for (x, y) in a.iter().zip(&b) {
        assert!((y - x - tau0).abs() < 1e-3 * tau0 + 1e-9, "{}", y - x);
    }
}

#[test]
fn coarse_nyquist_grid_degrades_gracefully() {
    let w = packet(0.27);
    let p = chirped(5000.0);
    // Noise-free, the three-term fit is exact at any grid above Nyquist.
    let clean = round_trip(&w, &p, 4.0, &delay_grid(&w, 6, 2), None).0;
    assert!(clean < 1e-8, "{clean}");
    // With noise the error grows as 1/√N; noise is relative to the peak,
    // so stay where the pulse carries signal.
    let noise = |seed| Some(NoiseSpec { sigma: 1e-5, seed });
    let fine = round_trip(&w, &p, 4.0, &delay_grid(&w, 16, 4), noise(3)).0;
    let coarse = round_trip(&w, &p, 4.0, &delay_grid(&w, 6, 2), noise(3)).0;
    eprintln!("fine {fine:.4}, coarse {coarse:.4}");
    assert!(coarse < 0.05, "coarse {coarse}");
    assert!(coarse > fine, "fine {fine}, coarse {coarse}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn yield_is_nonnegative_and_beat_is_bounded(
        r in prop::collection::vec(-2.0f64..2.0, 4),
        ph in prop::collection::vec(-PI..PI, 4),
        c1 in 0.1f64..1.0,
        gdd in -8000.0f64..8000.0,
        theta in 0.0f64..PI,
    ) {
        let w = WavePacket::normalized(
            BoundState::hydrogenic(1.0, 2, 1, 0, c1).unwrap(),
            BoundState::hydrogenic(1.0, 3, 1, 0, 1.0).unwrap(),
        ).unwrap();
        let t1 = ChannelTable::constant(1, &[(0, r[0], ph[0]), (2, r[1], ph[1])]).unwrap();
        let t2 = ChannelTable::constant(1, &[(0, r[2], ph[2]), (2, r[3], ph[3])]).unwrap();
        let ch = PacketChannels::new(t1, t2);
        let p = chirped(gdd);
        let en = energies(&w, 5.0, 4);
        for &eps in &en {
            for t in [beat_terms(&w, &p, &ch, eps).unwrap(), angle_resolved_terms(&w, &p, &ch, eps, theta).unwrap()] {
                prop_assert!(t.b.abs() <= (t.a1 + t.a2) * (1.0 + 1e-12));
            }
        }
        let s = angle_resolved_spectrogram(&w, &p, &ch, &en, &default_delays(&w), theta).unwrap();
        prop_assert!(s.min_value() >= 0.0);
    }

    #[test]
    fn fano_phase_ratio_is_real(q1 in -10.0f64..10.0, q2 in -10.0f64..10.0, e in -5.0f64..5.0) {
        let f1 = FanoParams::new(q1, 0.0, 0.3).unwrap();
        let f2 = FanoParams::new(q2, 0.0, 0.3).unwrap();
        let r: Complex64 = fano_dress(1.0, &f1, e) * fano_dress(1.0, &f2, e).conj();
        prop_assert!(r.im.abs() <= 1e-12 * r.norm().max(1e-300));
    }

    #[test]
    fn retrieval_ignores_a_common_amplitude_rescale(c in 0.01f64..100.0, gdd in -6000.0f64..6000.0) {
        let w = packet(0.27);
        let p = chirped(gdd);
        let en = energies(&w, 6.0, 15);
        let delays = default_delays(&w);
        let base = unit_channels();
        let scaled = base.clone().map(|t| t.scaled(c));
        let a = retrieve(&spectrogram(&w, &p, &base, &en, &delays).unwrap(), &w, RetrievalOptions::default()).unwrap();
        let b = retrieve(&spectrogram(&w, &p, &scaled, &en, &delays).unwrap(), &w, RetrievalOptions::default()).unwrap();
        for (x, y) in a.beat_phase.iter().zip(&b.beat_phase) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn widening_the_bandwidth_never_breaks_validation(bw1 in 0.2f64..10.0, extra in 0.0f64..10.0, split in 0.05f64..1.0) {
        let w = packet(split);
        let pass = |bw: f64| {
            let g = FrequencyGrid::uniform(ev_to_au(100.0 - 5.0 * bw), ev_to_au(100.0 + 5.0 * bw), 801).unwrap();
            let spec = GaussianPulseSpec::fourier_limited(ev_to_au(100.0), ev_to_au(bw));
            validate_against_pulse(&w, &synthesize_gaussian(&spec, &g).unwrap(), DEFAULT_MARGIN)
        };
        let (a, b) = (pass(bw1), pass(bw1 + extra));
        for (x, y) in a.checks.iter().zip(&b.checks) {
            prop_assert!(!x.pass || y.pass, "{} turned from pass to fail", x.name);
        }
    }
}
