//! Matplotlib script generation. The script reads only the listed JSON
//! artifacts (and CSV files they name), located relative to itself.

use serde_json::Value;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::io::read_json;

const PRELUDE: &str = r##"#!/usr/bin/env python3
# Generated plotting script; run from anywhere.
import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))


def load(name):
    with open(os.path.join(HERE, name)) as fh:
        return json.load(fh)


def matrix(side):
    """Rows are delays, columns energies."""
    if side.get("values") is not None:
        return np.array(side["values"])
    rows = []
    with open(os.path.join(HERE, side["data_file"])) as fh:
        lines = [l for l in fh if not l.startswith("#")]
    for line in lines[1:]:
        rows.append([float(v) for v in line.split(",")[1:]])
    return np.array(rows)


def save(fig, name):
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, name), dpi=150)
    plt.close(fig)

"##;

/// Section of the script for one artifact, keyed on its `kind`.
fn section(kind: &str, name: &str, stem: &str) -> Option<String> {
    let body = match kind {
        "panda" | "panda-angle" | "streak" => format!(
            r##"side = load("{name}")
P = matrix(side)
fig, ax = plt.subplots(figsize=(6, 4))
m = ax.pcolormesh(side["energies_eV"], side["delays_fs"], P, shading="auto", cmap="viridis")
fig.colorbar(m, ax=ax, label="yield (arb.)")
ax.set_xlabel("photoelectron energy (eV)")
ax.set_ylabel("delay (fs)")
ax.set_title(side["kind"])
save(fig, "{stem}_heatmap.png")
"##
        ),
        "anglemap" => format!(
            r##"side = load("{name}")
th = np.array(side["thetas_deg"])
en = np.array(side["energies_eV"])
D = np.ma.masked_array(side["delay_as"], mask=side["mask"])
S = np.array(side["sign"])
lim = np.nanmax(np.abs(D)) or 1.0
fig, ax = plt.subplots(figsize=(6, 4))
m = ax.pcolormesh(en, th, D, shading="auto", cmap="RdBu_r", vmin=-lim, vmax=lim)
fig.colorbar(m, ax=ax, label="PANDA delay (as)")
ti = np.linspace(0, len(th) - 1, 7).astype(int)
ei = np.linspace(0, len(en) - 1, 7).astype(int)
for i in ti:
    for j in ei:
        if S[i, j] != 0:
            ax.text(en[j], th[i], "+" if S[i, j] > 0 else "−", ha="center", va="center", fontsize=12)
ax.axhline(side["magic_angle_deg"], color="k", lw=0.8, ls="--")
ax.set_xlabel("photoelectron energy (eV)")
ax.set_ylabel("emission angle (deg)")
save(fig, "{stem}_map.png")
"##
        ),
        "retrieval" => format!(
            r##"side = load("{name}")
om = np.array(side["photon_eV"])
ok = ~np.array(side["mask"])
fig, (a1, a2) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
a1.plot(om[ok], np.array(side["group_delay_as"])[ok], "o", ms=3, label="retrieved")
if side.get("truth_group_delay_as") is not None:
    t = np.array(side["truth_group_delay_as"])
    g = np.array(side["group_delay_as"])
    shift = np.mean((g - t)[ok])
    a1.plot(om, t + shift, "-", label="truth (offset removed)")
a1.set_ylabel("group delay (as)")
a1.legend()
a2.plot(om, side["spectral_phase_rad"])
a2.set_xlabel("photon energy (eV)")
a2.set_ylabel("spectral phase (rad)")
save(fig, "{stem}_gd.png")
"##
        ),
        "pulse" => format!(
            r##"side = load("{name}")
om = np.array(side["grid_au"]) * 27.211386245988
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(om, side["magnitude"], color="C0")
ax.set_xlabel("photon energy (eV)")
ax.set_ylabel("|E|")
bx = ax.twinx()
bx.plot(om, side["phase_rad"], color="C1")
bx.set_ylabel("phase (rad)")
save(fig, "{stem}_spectrum.png")
"##
        ),
        "so" => format!(
            r##"side = load("{name}")
sp = side["spectrum"]
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(side["energies_eV"], sp["total"], label="channel sum")
ax.plot(side["energies_eV"], sp["closed_form"], "--", label="closed form")
ax.set_xlabel("photoelectron energy (eV)")
ax.set_ylabel("yield (arb.)")
ax.legend()
save(fig, "{stem}_spectrum.png")
"##
        ),
        "streak-summary" => format!(
            r##"side = load("{name}")
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(side["delays_fs"], side["shift_eV"], "o", label="SFA centroid")
ax.plot(side["delays_fs"], side["classical_shift_eV"], "-", label="classical")
ax.set_xlabel("delay (fs)")
ax.set_ylabel("energy shift (eV)")
ax.legend()
save(fig, "{stem}_shift.png")
"##
        ),
        "xsec" => format!(
            r##"side = load("{name}")
fig, ax = plt.subplots(figsize=(6, 4))
ax.loglog(side["photon_eV"], side["sigma_Mb"], "o-")
ax.set_xlabel("photon energy (eV)")
ax.set_ylabel("cross section (Mb)")
ax.set_title("slope %.3f" % side["loglog_slope"])
save(fig, "{stem}_xsec.png")
"##
        ),
        "fano" => format!(
            r##"side = load("{name}")
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(side["energies_eV"], side["phase_plain_rad"], label="bare")
ax.plot(side["energies_eV"], side["phase_dressed_rad"], "--", label="Fano dressed")
ax.set_xlabel("photoelectron energy (eV)")
ax.set_ylabel("beat phase (rad)")
ax.legend()
save(fig, "{stem}_phase.png")
"##
        ),
        _ => return None,
    };
    Some(body)
}

/// Writes a plotting script for `artifacts` (JSON files) to `out`.
pub fn emit_plot_script(artifacts: &[PathBuf], out: &Path) -> Result<PathBuf> {
    if artifacts.is_empty() {
        return Err(Error::MissingArtifact("no artifacts to plot".into()));
    }
    let base = out.parent().unwrap_or(Path::new("."));
    let mut script = String::from(PRELUDE);
    for path in artifacts {
        if !path.is_file() {
            return Err(Error::MissingArtifact(path.display().to_string()));
        }
        let side: Value = read_json(path)?;
        let kind = side.get("kind").and_then(Value::as_str).unwrap_or("");
        let name = path
            .strip_prefix(base)
            .map(|p| p.to_string_lossy().into_owned())
            .unwrap_or_else(|_| path.to_string_lossy().into_owned());
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        match section(kind, &name, &stem) {
            Some(s) => {
                let _ = writeln!(script, "\n# {name}\n{s}");
            }
            None => return Err(Error::Config(format!("{}: no plot recipe for kind {kind:?}", path.display()))),
        }
    }
    std::fs::write(out, script)?;
    Ok(out.to_path_buf())
}
