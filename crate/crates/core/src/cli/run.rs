use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::fs::File;
use std::path::{Path, PathBuf};

use super::config::{ChannelSpec, DelaySpec, GaussianConfig, PulseSource, Range, SOSpec};
use super::{plot, Command, ScenarioConfig};
use crate::atomic::{solve_bound, CentralPotential, ChannelTable, RadialGrid};
use crate::error::{Error, Result};
use crate::io::{self, Format, Provenance};
use crate::numerics::lerp_at;
use crate::panda::{
    angle_map, angle_resolved_spectrogram, panda_delay, so_spectrum, spectrogram, NoiseSpec, PacketChannels,
    SORadial, SOConfig, Spectrogram, DELAY_ZERO_CONVENTION, MAGIC_ANGLE_DEG,
};
use crate::pulse::{group_delay, to_time_domain, uniform_times, PulseFile, SpectralPulse};
use crate::retrieval::{compare, retrieve, RetrievalOptions, ZeroReference};
use crate::streak::{classical_energy, streak_spectrogram, MatrixElement, StreakOptions};
use crate::units::{as_to_au, au_to_as, au_to_ev, au_to_fs, ev_to_au, HARTREE_EV};
use crate::wavepacket::{validate_against_pulse, BoundState, WavePacket, DEFAULT_MARGIN};

/// A fully resolved command.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub command: Command,
    pub config: ScenarioConfig,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub format: Format,
}

/// Printed to stdout on success.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub out_dir: PathBuf,
    pub artifacts: Vec<PathBuf>,
    pub plot_script: PathBuf,
    pub summary: Value,
}

struct Ctx<'a> {
    inv: &'a Invocation,
    cfg: &'a ScenarioConfig,
    dir: &'a Path,
    provenance: Provenance,
    artifacts: Vec<PathBuf>,
    /// JSON artifacts the plot script reads.
    plotted: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn csv(&mut self, name: &str) -> Result<csv::Writer<File>> {
        let p = self.path(name);
        let w = csv::Writer::from_path(&p)?;
        self.artifacts.push(p);
        Ok(w)
    }

    /// Writes a JSON sidecar carrying `kind` and provenance next to `body`.
    fn sidecar(&mut self, name: &str, kind: &str, body: Value) -> Result<PathBuf> {
        let mut v = json!({ "kind": kind, "provenance": self.provenance });
        if let (Value::Object(dst), Value::Object(src)) = (&mut v, body) {
            dst.extend(src);
        }
        let p = self.path(name);
        io::write_json(&p, &v)?;
        self.artifacts.push(p.clone());
        self.plotted.push(p.clone());
        Ok(p)
    }
}

/// Runs one scenario, writing artifacts and `plot.py` into `inv.out`.
pub fn run(inv: &Invocation) -> Result<RunReport> {
    std::fs::create_dir_all(&inv.out)?;
    let mut ctx = Ctx {
        inv,
        cfg: &inv.config,
        dir: &inv.out,
        provenance: Provenance::new(inv.command.name(), &inv.config, inv.seed)?,
        artifacts: Vec::new(),
        plotted: Vec::new(),
    };
    let summary = match inv.command {
        Command::PulseSynth => pulse_synth(&mut ctx)?,
        Command::PandaSim => panda_sim(&mut ctx)?,
        Command::PandaRetrieve => panda_retrieve(&mut ctx)?,
        Command::PandaAnglemap => panda_anglemap(&mut ctx)?,
        Command::PandaSo => panda_so(&mut ctx)?,
        Command::StreakSim => streak_sim(&mut ctx)?,
        Command::AtomXsec => atom_xsec(&mut ctx)?,
        Command::FanoCheck => fano_check(&mut ctx)?,
    };
    let script = plot::emit_plot_script(&ctx.plotted, &inv.out.join("plot.py"))?;
    Ok(RunReport {
        command: inv.command.name().into(),
        out_dir: inv.out.clone(),
        artifacts: ctx.artifacts,
        plot_script: script,
        summary,
    })
}

fn f(x: f64) -> String {
    format!("{x}")
}

fn gaussian(center_ev: f64, fwhm_ev: f64) -> PulseSource {
    PulseSource::Gaussian(GaussianConfig::new(center_ev, fwhm_ev))
}

fn pulse_or(cfg: &ScenarioConfig, default: PulseSource) -> Result<SpectralPulse> {
    cfg.pulse.as_ref().unwrap_or(&default).build()
}

/// Two p levels 0.27 eV apart at -3.0 / -2.73 eV, equal weights.
pub(crate) fn model_packet() -> Result<WavePacket> {
    WavePacket::normalized(
        BoundState::new(2, 1, 0, ev_to_au(-3.0), 1.0)?,
        BoundState::new(3, 1, 0, ev_to_au(-2.73), 1.0)?,
    )
}

fn packet(cfg: &ScenarioConfig, default: impl FnOnce() -> Result<WavePacket>) -> Result<WavePacket> {
    match &cfg.wave_packet {
        Some(spec) => spec.build(),
        None => default(),
    }
}

/// Photoelectron energies covering ±1.5 FWHM of the pulse.
fn energies_for(cfg: &ScenarioConfig, p: &SpectralPulse, w: &WavePacket, count: usize) -> Result<Vec<f64>> {
    if let Some(r) = &cfg.energies_ev {
        return Ok(r.values()?.into_iter().map(ev_to_au).collect());
    }
    let center = p.centroid() - w.mean_frequency(0.0);
    let half = 1.5 * p.intensity_fwhm().unwrap_or(ev_to_au(5.0));
    if !(center - half > 0.0) {
        return Err(Error::config("pulse does not reach the continuum; give energies_eV explicitly"));
    }
    Ok(Range::new(center - half, center + half, count).values()?)
}

fn noise(cfg: &ScenarioConfig, seed: Option<u64>) -> Result<Option<NoiseSpec>> {
    if cfg.noise_sigma < 0.0 || !cfg.noise_sigma.is_finite() {
        return Err(Error::config(format!("noise_sigma must be nonnegative, got {}", cfg.noise_sigma)));
    }
    Ok((cfg.noise_sigma > 0.0).then(|| NoiseSpec { sigma: cfg.noise_sigma, seed: seed.unwrap_or(0) }))
}

fn pulse_file_body(p: &SpectralPulse) -> Result<Value> {
    let mut v = serde_json::to_value(PulseFile::from(p))?;
    v["summary"] = serde_json::to_value(crate::panda::PulseSummary::from(p))?;
    Ok(v)
}

fn pulse_synth(ctx: &mut Ctx) -> Result<Value> {
    let p = pulse_or(ctx.cfg, gaussian(100.0, 5.0))?;
    let gd = group_delay(&p)?;
    let mut w = ctx.csv("pulse.csv")?;
    w.write_record(["photon_eV", "magnitude", "phase_rad", "group_delay_as"])?;
    for (i, &om) in p.grid().points().iter().enumerate() {
        w.write_record([f(au_to_ev(om)), f(p.magnitude()[i]), f(p.phase()[i]), f(au_to_as(gd[i]))])?;
    }
    w.flush()?;

    let fwhm = p.intensity_fwhm().unwrap_or(p.grid().max() - p.grid().min());
    let span = 6.0 * 4.0 * 2f64.ln() / fwhm + gd.iter().map(|g| g.abs()).fold(0.0, f64::max);
    let dt = PI / p.grid().max() / 2.0;
    let count = ((2.0 * span / dt).ceil() as usize + 1).min(20001);
    let field = to_time_domain(&p, &uniform_times(-span, span, count))?;
    let mut w = ctx.csv("field.csv")?;
    w.write_record(["time_fs", "field"])?;
    for (t, e) in field.times.iter().zip(&field.values) {
        w.write_record([f(au_to_fs(*t)), f(*e)])?;
    }
    w.flush()?;

    let body = pulse_file_body(&p)?;
    ctx.sidecar("pulse.json", "pulse", body)?;
    Ok(json!({
        "centroid_eV": au_to_ev(p.centroid()),
        "fwhm_eV": p.intensity_fwhm().map(au_to_ev),
        "transform_limited_duration_as": au_to_as(4.0 * 2f64.ln() / fwhm),
        "field_peak": field.peak_abs(),
    }))
}

fn panda_sim(ctx: &mut Ctx) -> Result<Value> {
    let cfg = ctx.cfg;
    let p = pulse_or(cfg, gaussian(100.0, 5.0))?;
    let w = packet(cfg, model_packet)?;
    let energies = energies_for(cfg, &p, &w, 61)?;
    let channels = cfg.channels.clone().unwrap_or(ChannelSpec::Unit).build(&w, &energies)?;
    let delays = cfg.delays.clone().unwrap_or_default().build(w.beat_period())?;
    let mut s = match cfg.theta_deg {
        Some(th) => angle_resolved_spectrogram(&w, &p, &channels, &energies, &delays, th.to_radians())?,
        None => spectrogram(&w, &p, &channels, &energies, &delays)?,
    };
    if let Some(n) = noise(cfg, ctx.inv.seed)? {
        s = s.with_noise(n)?;
    }
    let curve = panda_delay(&s, w.splitting())?;
    let paths = io::save_spectrogram(&s, Some(&curve), ctx.dir, "spectrogram", ctx.inv.format, ctx.provenance.clone())?;
    ctx.plotted.push(paths[0].clone());
    ctx.artifacts.extend(paths);

    let mut wr = ctx.csv("delay.csv")?;
    wr.write_record(["energy_eV", "delay_as", "beat_phase_rad", "contrast", "branch", "masked"])?;
    for i in 0..energies.len() {
        wr.write_record([
            f(au_to_ev(energies[i])),
            f(au_to_as(curve.delay[i])),
            f(curve.phase[i]),
            f(curve.contrast[i]),
            curve.branch[i].to_string(),
            (curve.mask[i] as u8).to_string(),
        ])?;
    }
    wr.flush()?;

    let report = validate_against_pulse(&w, &p, DEFAULT_MARGIN);
    let pulse_body = pulse_file_body(&p)?;
    ctx.sidecar("pulse.json", "pulse", pulse_body)?;
    let delays_as: Vec<f64> = curve.unmasked().map(|(_, d)| au_to_as(d)).collect();
    let spread = delays_as.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - delays_as.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(json!({
        "beat_period_fs": au_to_fs(w.beat_period()),
        "columns": energies.len(),
        "masked": curve.mask.iter().filter(|&&m| m).count(),
        "delay_spread_as": spread,
        "compatibility": report,
    }))
}

fn panda_retrieve(ctx: &mut Ctx) -> Result<Value> {
    let cfg = ctx.cfg;
    let input = cfg.input.as_ref().ok_or_else(|| Error::config("panda-retrieve needs \"input\": a spectrogram sidecar"))?;
    let s = io::load_spectrogram(input)?;
    let wf = s.meta.wave_packet.as_ref().ok_or_else(|| Error::config("spectrogram carries no wave-packet descriptor"))?;
    let w = WavePacket::from_file(wf)?;
    let zero_ref = cfg.zero_reference_as.map(|t| ZeroReference::Control(as_to_au(t))).unwrap_or_default();
    let mut r = retrieve(&s, &w, RetrievalOptions { zero_ref, ..Default::default() })?;
    let mut body = serde_json::to_value(r.to_file())?;
    body["delay_zero_convention"] = json!(DELAY_ZERO_CONVENTION);
    let mut summary = json!({
        "columns": r.energies.len(),
        "masked": r.mask.iter().filter(|&&m| m).count(),
        "extrapolated": r.extrapolated,
    });
    if let Some(t) = &cfg.truth {
        let truth: SpectralPulse = io::read_json(t)?;
        let d = compare(&truth, &r)?;
        r.rms_error_vs_truth = Some(d.rms);
        let gd = group_delay(&truth)?;
        let truth_gd: Vec<f64> =
            r.frequencies.iter().map(|&om| au_to_as(lerp_at(truth.grid().points(), &gd, om))).collect();
        body["rms_error_as"] = json!(au_to_as(d.rms));
        body["truth_group_delay_as"] = json!(truth_gd);
        summary["rms_error_as"] = json!(au_to_as(d.rms));
        summary["rms_over_span"] = json!(if d.span > 0.0 { d.rms / d.span } else { f64::NAN });
        summary["span_as"] = json!(au_to_as(d.span));
    }
    if ctx.inv.format == Format::Csv {
        let p = ctx.path("retrieval.csv");
        r.write_csv(File::create(&p)?)?;
        ctx.artifacts.push(p);
    }
    ctx.sidecar("retrieval.json", "retrieval", body)?;
    Ok(summary)
}

fn panda_anglemap(ctx: &mut Ctx) -> Result<Value> {
    let cfg = ctx.cfg;
    let w = packet(cfg, || WavePacket::hydrogenic(1.0, 2, 3, 1))?;
    let energies: Vec<f64> =
        cfg.energies_ev.unwrap_or(Range::new(5.0, 100.0, 96)).values()?.into_iter().map(ev_to_au).collect();
    let p = pulse_or(cfg, PulseSource::Flat { grid_ev: [1.0, 110.0], grid_points: 4001, gdd_as2: 0.0, center_ev: None })?;
    let channels = cfg.channels.clone().unwrap_or(ChannelSpec::Coulomb { z: 1.0 }).build(&w, &energies)?;
    let thetas: Vec<f64> =
        cfg.thetas_deg.unwrap_or(Range::new(0.0, 90.0, 91)).values()?.into_iter().map(f64::to_radians).collect();
    let map = angle_map(&w, &p, &channels, &energies, &thetas)?;
    let tol = as_to_au(1e-3);

    let mut wr = ctx.csv("anglemap.csv")?;
    wr.write_record(["theta_deg", "energy_eV", "delay_as", "sign", "masked", "branch"])?;
    for (it, c) in map.curves.iter().enumerate() {
        for ie in 0..energies.len() {
            wr.write_record([
                f(thetas[it].to_degrees()),
                f(au_to_ev(energies[ie])),
                f(au_to_as(c.delay[ie])),
                map.sign(it, ie, tol).to_string(),
                (c.mask[ie] as u8).to_string(),
                c.branch[ie].to_string(),
            ])?;
        }
    }
    wr.flush()?;

    let delay_as: Vec<Vec<f64>> = map.curves.iter().map(|c| c.delay.iter().map(|&d| au_to_as(d)).collect()).collect();
    let sign: Vec<Vec<i8>> =
        (0..thetas.len()).map(|it| (0..energies.len()).map(|ie| map.sign(it, ie, tol)).collect()).collect();
    let mask: Vec<Vec<bool>> = map.curves.iter().map(|c| c.mask.clone()).collect();
    let crossings = zero_crossings(&thetas, &delay_as);
    ctx.sidecar(
        "anglemap.json",
        "anglemap",
        json!({
            "thetas_deg": thetas.iter().map(|t| t.to_degrees()).collect::<Vec<_>>(),
            "energies_eV": energies.iter().map(|&e| au_to_ev(e)).collect::<Vec<_>>(),
            "delay_as": delay_as,
            "sign": sign,
            "mask": mask,
            "zero_crossing_deg": crossings,
            "magic_angle_deg": MAGIC_ANGLE_DEG,
            "wave_packet": w.to_file(),
            "delay_zero_convention": DELAY_ZERO_CONVENTION,
        }),
    )?;
    let finite: Vec<f64> = crossings.iter().flatten().copied().collect();
    Ok(json!({
        "energies": energies.len(),
        "angles": thetas.len(),
        "zero_crossing_deg_min": finite.iter().copied().fold(f64::INFINITY, f64::min),
        "zero_crossing_deg_max": finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }))
}

/// First sign change of the delay along angle, per energy, by linear
/// interpolation.
fn zero_crossings(thetas: &[f64], delay: &[Vec<f64>]) -> Vec<Option<f64>> {
    let n_e = delay.first().map_or(0, |r| r.len());
    (0..n_e)
        .map(|ie| {
            (1..thetas.len()).find_map(|it| {
                let (a, b) = (delay[it - 1][ie], delay[it][ie]);
                (a * b < 0.0).then(|| (thetas[it - 1] + (thetas[it] - thetas[it - 1]) * a / (a - b)).to_degrees())
            })
        })
        .collect()
}

fn panda_so(ctx: &mut Ctx) -> Result<Value> {
    let cfg = ctx.cfg;
    let so = cfg.so.clone().unwrap_or_default();
    let SOSpec { radial_s, radial_d, radial_bound, .. } = so;
    let laser_src = so.laser.clone().unwrap_or_else(|| {
        let mut g = GaussianConfig::new(1.6135, 0.05);
        g.grid_points = 801;
        PulseSource::Gaussian(g)
    });
    let scfg = SOConfig::potassium(laser_src.build()?)?;
    let xuv = pulse_or(cfg, gaussian(30.0, 5.0))?;
    let energies: Vec<f64> =
        cfg.energies_ev.unwrap_or(Range::new(24.0, 30.0, 121)).values()?.into_iter().map(ev_to_au).collect();
    let radial = SORadial { s: radial_s, d: radial_d, bound: radial_bound };
    let spec = so_spectrum(&scfg, &xuv, |_| radial, &energies)?;

    let mut wr = ctx.csv("so.csv")?;
    let mut header = vec!["energy_eV".to_string(), "theta_rad".into(), "total".into(), "total_m_minus".into(), "closed_form".into()];
    header.extend(spec.channels.iter().map(|c| format!("l{}_j{}", c.l, c.j.twice())));
    wr.write_record(&header)?;
    for i in 0..energies.len() {
        let mut row = vec![f(au_to_ev(energies[i])), f(spec.theta[i]), f(spec.total[i]), f(spec.total_minus[i]), f(spec.closed_form[i])];
        row.extend(spec.channels.iter().map(|c| f(c.values[i])));
        wr.write_record(&row)?;
    }
    wr.flush()?;

    let body = json!({
        "energies_eV": energies.iter().map(|&e| au_to_ev(e)).collect::<Vec<_>>(),
        "spectrum": spec,
        "beat_period_fs": au_to_fs(scfg.beat_period()),
        "so_split_meV": au_to_ev(scfg.so_split) * 1e3,
    });
    ctx.sidecar("so.json", "so", body)?;
    Ok(json!({
        "beat_period_fs": au_to_fs(scfg.beat_period()),
        "closed_form_error": spec.closed_form_error(),
        "m_asymmetry": spec.m_asymmetry(),
        "warnings": spec.warnings,
    }))
}

fn streak_sim(ctx: &mut Ctx) -> Result<Value> {
    let cfg = ctx.cfg;
    let mut g = GaussianConfig::new(100.0, 9.125);
    g.grid_points = 1201;
    let p = pulse_or(cfg, PulseSource::Gaussian(g))?;
    let laser = cfg.laser.unwrap_or_default().build()?;
    let ip = ev_to_au(cfg.ip_ev.unwrap_or(HARTREE_EV / 2.0));
    let e0 = p.centroid() - ip;
    let energies: Vec<f64> = match &cfg.energies_ev {
        Some(r) => r.values()?.into_iter().map(ev_to_au).collect(),
        None => Range::new(e0 - ev_to_au(30.0), e0 + ev_to_au(30.0), 241).values()?,
    };
    let half = au_to_fs(laser.period()) / 2.0;
    let delays: Vec<f64> = cfg
        .delays
        .clone()
        .unwrap_or(DelaySpec { delays_fs: Some(Range::new(-half, half, 25)), ..Default::default() })
        .build(laser.period())?;
    let mut opts = StreakOptions::for_pulse(&p);
    opts.matrix = cfg.matrix_element.unwrap_or(MatrixElement::Unit);
    let s = streak_spectrogram(&p, &laser, ip, &energies, &delays, opts)?;
    let paths = io::save_spectrogram(&s.spectrogram, None, ctx.dir, "spectrogram", ctx.inv.format, ctx.provenance.clone())?;
    ctx.plotted.push(paths[0].clone());
    ctx.artifacts.extend(paths);

    let field_free = streak_spectrogram(&p, &crate::streak::LaserField::off(), ip, &energies, &[0.0], opts)?;
    let c0 = field_free.centroids()[0];
    let p0 = (2.0 * e0).sqrt();
    let centroids = s.centroids();
    let mut wr = ctx.csv("centroids.csv")?;
    wr.write_record(["delay_fs", "shift_eV", "classical_shift_eV", "vector_potential_au"])?;
    let mut worst: f64 = 0.0;
    for (k, &tau) in delays.iter().enumerate() {
        let shift = centroids[k] - c0;
        let classical = classical_energy(p0, &laser, tau) - 0.5 * p0 * p0;
        worst = worst.max((shift - classical).abs());
        wr.write_record([f(au_to_fs(tau)), f(au_to_ev(shift)), f(au_to_ev(classical)), f(laser.vector_potential(tau))])?;
    }
    wr.flush()?;
    let amplitude = p0 * laser.a0;
    ctx.sidecar(
        "streak.json",
        "streak-summary",
        json!({
            "delays_fs": delays.iter().map(|&t| au_to_fs(t)).collect::<Vec<_>>(),
            "shift_eV": centroids.iter().map(|c| au_to_ev(c - c0)).collect::<Vec<_>>(),
            "classical_shift_eV": delays.iter().map(|&t| au_to_ev(classical_energy(p0, &laser, t) - 0.5 * p0 * p0)).collect::<Vec<_>>(),
            "laser": laser,
            "ip_eV": au_to_ev(ip),
            "streaking_amplitude_eV": au_to_ev(amplitude),
        }),
    )?;
    Ok(json!({
        "streaking_amplitude_eV": au_to_ev(amplitude),
        "max_deviation_fraction": worst / amplitude,
    }))
}

fn atom_xsec(ctx: &mut Ctx) -> Result<Value> {
    let cfg = ctx.cfg;
    let a = cfg.atom.unwrap_or_default();
    let pot = CentralPotential::new(a.z, a.a, a.b)?;
    let photons: Vec<f64> =
        cfg.energies_ev.unwrap_or(Range::new(300.0, 800.0, 11)).values()?.into_iter().map(ev_to_au).collect();
    let e_max = photons.iter().copied().fold(0.0, f64::max);
    let grid = RadialGrid::for_energy(e_max, 300.0, 0.02)?;
    let orbital = solve_bound(&pot, a.n, a.l, &grid)?;
    let eps: Vec<f64> = photons.iter().map(|w| w + orbital.energy).collect();
    if eps.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::domain(format!(
            "photon energies must exceed the binding energy {:.4} eV",
            -au_to_ev(orbital.energy)
        )));
    }
    let table = ChannelTable::compute(&pot, &orbital, &eps)?;
    let sigma = crate::atomic::cross_section(&pot, &orbital, &eps)?;

    let mut wr = ctx.csv("xsec.csv")?;
    wr.write_record(["photon_eV", "energy_eV", "sigma_Mb"])?;
    for i in 0..eps.len() {
        wr.write_record([f(au_to_ev(photons[i])), f(au_to_ev(eps[i])), f(sigma[i])])?;
    }
    wr.flush()?;
    let ch = ctx.path("channels.csv");
    table.write_csv(
        File::create(&ch)?,
        &[format!("potential z={} a={} b={}; orbital n={} l={}", a.z, a.a, a.b, a.n, a.l)],
    )?;
    ctx.artifacts.push(ch);

    let slope = loglog_slope(&photons, &sigma);
    let zeros: Vec<Value> = table
        .waves()
        .iter()
        .map(|w| json!({ "L": w.l, "first_zero_eV": table.first_zero(w.l).map(au_to_ev) }))
        .collect();
    ctx.sidecar(
        "xsec.json",
        "xsec",
        json!({
            "photon_eV": photons.iter().map(|&w| au_to_ev(w)).collect::<Vec<_>>(),
            "sigma_Mb": sigma,
            "binding_eV": -au_to_ev(orbital.energy),
            "loglog_slope": slope,
            "cooper_zeros": zeros,
        }),
    )?;
    Ok(json!({ "binding_eV": -au_to_ev(orbital.energy), "loglog_slope": slope }))
}

/// Least-squares slope of `ln σ` against `ln ω`.
pub(crate) fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn fano_check(ctx: &mut Ctx) -> Result<Value> {
    let cfg = ctx.cfg;
    let p = pulse_or(cfg, gaussian(100.0, 5.0))?;
    let w = packet(cfg, model_packet)?;
    let energies = energies_for(cfg, &p, &w, 61)?;
    let plain = cfg.channels.clone().unwrap_or(ChannelSpec::Unit).build(&w, &energies)?;
    let mid = energies[energies.len() / 2];
    let fano = cfg.fano.unwrap_or(super::config::FanoSpec { q: [2.0, -1.5], resonance_ev: au_to_ev(mid), width_ev: 0.5 });
    let [f1, f2] = fano.params()?;
    let dressed = PacketChannels::new(plain.state1.clone().with_fano(f1), plain.state2.clone().with_fano(f2));
    let delays = cfg.delays.clone().unwrap_or_default().build(w.beat_period())?;
    let a = spectrogram(&w, &p, &plain, &energies, &delays)?;
    let b = spectrogram(&w, &p, &dressed, &energies, &delays)?;
    let ca = panda_delay(&a, w.splitting())?;
    let cb = panda_delay(&b, w.splitting())?;
    let change = phase_changes(&a, &b, w.splitting())?;

    let mut wr = ctx.csv("fano.csv")?;
    wr.write_record(["energy_eV", "phase_plain_rad", "phase_dressed_rad", "change_rad", "branch_plain", "branch_dressed", "masked"])?;
    let mut worst: f64 = 0.0;
    for i in 0..energies.len() {
        let masked = ca.mask[i] || cb.mask[i];
        if !masked {
            worst = worst.max(change[i].abs());
        }
        wr.write_record([
            f(au_to_ev(energies[i])),
            f(ca.phase[i]),
            f(cb.phase[i]),
            f(change[i]),
            ca.branch[i].to_string(),
            cb.branch[i].to_string(),
            (masked as u8).to_string(),
        ])?;
    }
    wr.flush()?;
    ctx.sidecar(
        "fano.json",
        "fano",
        json!({
            "energies_eV": energies.iter().map(|&e| au_to_ev(e)).collect::<Vec<_>>(),
            "phase_plain_rad": ca.phase,
            "phase_dressed_rad": cb.phase,
            "change_rad": change,
            "branch_dressed": cb.branch,
            "mask": cb.mask,
            "fano": fano,
            "max_change_rad": worst,
        }),
    )?;
    Ok(json!({ "max_change_rad": worst, "masked": cb.mask.iter().filter(|&&m| m).count() }))
}

/// Beat-phase change per column, modulo π (a sign flip of the cross term
/// is a branch change, not a phase change).
pub(crate) fn phase_changes(a: &Spectrogram, b: &Spectrogram, d_omega: f64) -> Result<Vec<f64>> {
    let fa = crate::retrieval::extract_beat_phase(a, d_omega)?;
    let fb = crate::retrieval::extract_beat_phase(b, d_omega)?;
    Ok(fa
        .iter()
        .zip(&fb)
        .map(|(x, y)| {
            let d = crate::numerics::wrap_pi(y.phase - x.phase);
            if d > PI / 2.0 {
                d - PI
            } else if d <= -PI / 2.0 {
                d + PI
            } else {
                d
            }
        })
        .collect())
}
