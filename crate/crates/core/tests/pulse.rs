use num_complex::Complex64;
use panda::pulse::*;
use panda::units::{as2_to_au, as_to_au, ev_to_au};
use proptest::prelude::*;
use std::f64::consts::{LN_2, PI};

fn gaussian(center_ev: f64, fwhm_ev: f64, gdd_as2: f64, delay_as: f64) -> SpectralPulse {
    let grid = FrequencyGrid::uniform(ev_to_au(center_ev - 5.0 * fwhm_ev), ev_to_au(center_ev + 5.0 * fwhm_ev), 3001).unwrap();
    let spec = GaussianPulseSpec::fourier_limited(ev_to_au(center_ev), ev_to_au(fwhm_ev))
        .with_gdd(as2_to_au(gdd_as2))
        .with_delay(as_to_au(delay_as));
    synthesize_gaussian(&spec, &grid).unwrap()
}

fn window(p: &SpectralPulse, span: f64) -> Vec<f64> {
    // Resolve the carrier: several points per cycle at the top of the band.
    let dt = PI / p.grid().max() / 4.0;
    let n = (2.0 * span / dt) as usize + 1;
    uniform_times(-span, span, n)
}

fn intensity_fwhm_time(times: &[f64], env: &[f64]) -> f64 {
    let peak = env.iter().copied().fold(0.0, f64::max);
    let above: Vec<usize> = (0..env.len()).filter(|&i| env[i] >= 0.5 * peak).collect();
    let (a, b) = (above[0], *above.last().unwrap());
    let cross = |i: usize, j: usize| {
        let w = (0.5 * peak - env[i]) / (env[j] - env[i]);
        times[i] + w * (times[j] - times[i])
    };
    cross(b, b + 1) - cross(a - 1, a)
}

#[test]
fn parseval_holds_for_a_chirped_pulse() {
    let p = gaussian(100.0, 5.0, 5000.0, 0.0);
    let field = to_time_domain(&p, &window(&p, 300.0)).unwrap();
    let rel = (field.energy() - p.spectral_energy()).abs() / p.spectral_energy();
    assert!(rel < 1e-6, "relative Parseval error {rel:e}");
}

#[test]
fn time_field_is_the_real_part_of_the_analytic_signal() {
    // A real field from positive frequencies only: E(-ω) = E(ω)*.
    let p = gaussian(60.0, 4.0, 2000.0, 30.0);
    let times = uniform_times(-200.0, 200.0, 801);
    let field = to_time_domain(&p, &times).unwrap();
    let z = analytic_signal(&p, &times);
    for (e, a) in field.values.iter().zip(&z) {
        assert!((e - a.re).abs() < 1e-12 * (1.0 + a.norm()));
    }
}

#[test]
fn transform_limited_duration_bandwidth_product() {
    let p = gaussian(100.0, 5.0, 0.0, 0.0);
    let times = uniform_times(-60.0, 60.0, 4801);
    let env: Vec<f64> = analytic_signal(&p, &times).iter().map(|z| z.norm_sqr()).collect();
    let dt = intensity_fwhm_time(&times, &env);
    let product = dt * ev_to_au(5.0);
    assert!((product - 4.0 * LN_2).abs() < 1e-3, "TBP {product}");
}

#[test]
fn delay_moves_the_envelope_peak() {
    let tau = as_to_au(300.0);
    let p = apply_delay(&gaussian(100.0, 5.0, 0.0, 0.0), tau);
    let times = uniform_times(-60.0, 60.0, 12001);
    let env: Vec<f64> = analytic_signal(&p, &times).iter().map(|z| z.norm()).collect();
    let imax = (0..env.len()).max_by(|&a, &b| env[a].total_cmp(&env[b])).unwrap();
    assert!((times[imax] - tau).abs() < 0.02, "peak at {} vs {tau}", times[imax]);
}

#[test]
fn gdd_stretches_the_pulse_as_expected() {
    // Oracle: Gaussian chirp broadening τ = τ₀ √(1 + (4 ln2 GDD/τ₀²)²).
    let gdd = 5000.0;
    let p = gaussian(100.0, 5.0, gdd, 0.0);
    let times = uniform_times(-150.0, 150.0, 12001);
    let env: Vec<f64> = analytic_signal(&p, &times).iter().map(|z| z.norm_sqr()).collect();
    let t0 = 4.0 * LN_2 / ev_to_au(5.0);
    let expect = t0 * (1.0 + (4.0 * LN_2 * as2_to_au(gdd) / (t0 * t0)).powi(2)).sqrt();
    let got = intensity_fwhm_time(&times, &env);
    assert!((got - expect).abs() / expect < 1e-3, "{got} vs {expect}");
}

#[test]
fn off_grid_sampling_converges_under_refinement() {
    let spec = GaussianPulseSpec::fourier_limited(3.0, 0.2).with_gdd(40.0);
    let exact = |w: f64| {
        let d = w - 3.0;
        Complex64::from_polar((-2.0 * LN_2 * d * d / 0.04).exp(), 20.0 * d * d)
    };
    let mut errors = Vec::new();
    for n in [201, 401, 801] {
        let grid = FrequencyGrid::uniform(2.0, 4.0, n).unwrap();
        let p = synthesize_gaussian(&spec, &grid).unwrap();
        let w = 3.0 + 0.0731;
        errors.push((p.sample(w).unwrap() - exact(w)).norm());
    }
    assert!(errors[1] < errors[0] / 3.0 && errors[2] < errors[1] / 3.0, "{errors:?}");
}

#[test]
fn group_delay_recovers_linear_chirp() {
    let p = gaussian(100.0, 5.0, 5000.0, 100.0);
    let gd = group_delay(&p).unwrap();
    for (w, g) in p.grid().points().iter().zip(&gd) {
        let expect = as_to_au(100.0) + as2_to_au(5000.0) * (w - ev_to_au(100.0));
        assert!((g - expect).abs() < 1e-8);
    }
}

proptest! {
    #[test]
    fn phase_integration_inverts_group_delay(gdd in -8000.0f64..8000.0, tau in -500.0f64..500.0, phi0 in -3.0f64..3.0) {
        let p = gaussian(80.0, 6.0, gdd, tau);
        let anchor = ev_to_au(80.0);
        let gd = group_delay(&p).unwrap();
        let phase = phase_from_group_delay(&gd, p.grid(), anchor, phi0).unwrap();
        for (w, ph) in p.grid().points().iter().zip(&phase) {
            let d = w - anchor;
            let expect = phi0 + as_to_au(tau) * d + 0.5 * as2_to_au(gdd) * d * d;
            prop_assert!((ph - expect).abs() < 1e-8);
        }
    }

    #[test]
    fn spectral_energy_scales_quadratically(a in 0.1f64..10.0) {
        let p = gaussian(100.0, 5.0, 0.0, 0.0);
        let q = p.with_magnitude(p.magnitude().iter().map(|m| a * m).collect()).unwrap();
        prop_assert!((q.spectral_energy() / p.spectral_energy() - a * a).abs() < 1e-10 * a * a);
    }
}
