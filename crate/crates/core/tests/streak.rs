use panda::pulse::*;
use panda::streak::*;
use panda::units::{as2_to_au, ev_to_au};

const IP: f64 = 0.5;

fn xuv(fwhm_ev: f64, gdd_as2: f64, points: usize) -> SpectralPulse {
    let c = ev_to_au(100.0);
    let bw = ev_to_au(fwhm_ev);
    let grid = FrequencyGrid::uniform(c - 4.0 * bw, c + 4.0 * bw, points).unwrap();
    synthesize_gaussian(&GaussianPulseSpec::fourier_limited(c, bw).with_gdd(as2_to_au(gdd_as2)), &grid).unwrap()
}

fn energies(p: &SpectralPulse, n: usize) -> Vec<f64> {
    let (lo, hi) = (p.grid().min() - IP, p.grid().max() - IP);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn laser() -> LaserField {
    // 800 nm, A0 = 0.1 a.u., 25 fs field FWHM.
    LaserField::new(0.1, ev_to_au(1.5498), 25.0 / 0.024_188_843_265_857, 0.0).unwrap()
}

#[test]
fn field_free_rows_do_not_depend_on_delay() {
    let p = xuv(6.0, 0.0, 801);
    let en = energies(&p, 81);
    let s = streak_spectrogram(&p, &LaserField::off(), IP, &en, &[-40.0, 0.0, 25.0], StreakOptions::for_pulse(&p)).unwrap();
    let peak = s.spectrogram.max_value();
    for col in &s.spectrogram.values {
        for v in col {
            assert!((v - col[0]).abs() <= 1e-9 * peak, "{v} vs {}", col[0]);
        }
    }
    let y = s.yields();
    assert!(y.iter().all(|v| (v - y[0]).abs() < 1e-9 * y[0]));
}

#[test]
fn amplitude_is_linear_in_the_xuv_field() {
    let p = xuv(6.0, 0.0, 801);
    let doubled = p.with_magnitude(p.magnitude().iter().map(|m| 2.0 * m).collect()).unwrap();
    let en = energies(&p, 41);
    let opts = StreakOptions::for_pulse(&p);
    let a = streak_spectrogram(&p, &laser(), IP, &en, &[0.0], opts).unwrap();
    let b = streak_spectrogram(&doubled, &laser(), IP, &en, &[0.0], opts).unwrap();
    for (x, y) in a.spectrogram.values.iter().zip(&b.spectrogram.values) {
        assert!((y[0] - 4.0 * x[0]).abs() <= 1e-9 * y[0].max(1e-300));
    }
}

#[test]
fn field_free_spectrum_maps_the_pulse_spectrum() {
    // With A_L = 0 and a unit matrix element, |c|² ∝ |E(ω)/ω|² at ω = ε + I_p.
    let p = xuv(6.0, 3000.0, 1601);
    let en = energies(&p, 121);
    let s = streak_spectrogram(&p, &LaserField::off(), IP, &en, &[0.0], StreakOptions::for_pulse(&p)).unwrap();
    let got: Vec<f64> = s.spectrogram.values.iter().map(|c| c[0]).collect();
    let expect: Vec<f64> = en.iter().map(|&e| (p.sample(e + IP).unwrap().norm() / (e + IP)).powi(2)).collect();
    let (gmax, emax) = (got.iter().copied().fold(0.0, f64::max), expect.iter().copied().fold(0.0, f64::max));
    for (g, e) in got.iter().zip(&expect) {
        assert!((g / gmax - e / emax).abs() < 1e-3, "{} vs {}", g / gmax, e / emax);
    }
}

#[test]
fn shift_approaches_the_classical_law_for_short_pulses() {
    let l = laser();
    let mut errors = Vec::new();
    for bw in [2.0, 4.0, 9.0] {
        let p = xuv(bw, 0.0, 801);
        let en = energies(&p, 161);
        let opts = StreakOptions::for_pulse(&p);
        let on = streak_spectrogram(&p, &l, IP, &en, &[0.0], opts).unwrap().centroids()[0];
        let off = streak_spectrogram(&p, &LaserField::off(), IP, &en, &[0.0], opts).unwrap().centroids()[0];
        let p0 = (2.0 * (ev_to_au(100.0) - IP)).sqrt();
        let classical = classical_energy(p0, &l, 0.0) - 0.5 * p0 * p0;
        errors.push(((on - off) / classical - 1.0).abs());
    }
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[2] < 0.05, "{errors:?}");
}
