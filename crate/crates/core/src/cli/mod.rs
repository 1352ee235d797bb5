//! Batch front end: one command, one scenario, one output directory.
//!
//! Exit codes: 0 on success, 2 for usage and configuration errors, 3 for
//! computation errors. Failures print one JSON object to stdout:
//! `{"error": {"kind", "message", "exit_code"}}`.

pub mod config;
pub mod plot;
mod run;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::path::PathBuf;

pub use config::ScenarioConfig;
pub use plot::emit_plot_script;
pub use run::{run, Invocation, RunReport};

use crate::error::Error;
use crate::io::Format;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Gaussian or flat spectral pulse with its time-domain field.
    PulseSynth,
    /// Angle-integrated PANDA spectrogram and fitted delay curve.
    PandaSim,
    /// Group delay and spectral phase from a spectrogram artifact.
    PandaRetrieve,
    /// Angle-resolved PANDA delay over polar angle and energy.
    PandaAnglemap,
    /// Spin-orbit wave-packet spectrum with channel decomposition.
    PandaSo,
    /// Streaking spectrogram in the strong-field approximation.
    StreakSim,
    /// Photoionization cross section and channel table of one orbital.
    AtomXsec,
    /// Beat phase with and without Fano dressing of the channels.
    FanoCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::PulseSynth => "pulse-synth",
            Command::PandaSim => "panda-sim",
            Command::PandaRetrieve => "panda-retrieve",
            Command::PandaAnglemap => "panda-anglemap",
            Command::PandaSo => "panda-so",
            Command::StreakSim => "streak-sim",
            Command::AtomXsec => "atom-xsec",
            Command::FanoCheck => "fano-check",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "panda", version, about = "Attosecond pulse characterization by delayed absorption")]
pub struct Args {
    pub command: Command,
    /// Scenario configuration (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; defaults to `out/<command>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for optional noise.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Machine-readable failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

impl ErrorReport {
    pub fn from_error(e: &Error) -> Self {
        let (kind, exit_code) = match e {
            Error::Config(_) => ("config", EXIT_USAGE),
            Error::MissingArtifact(_) => ("missing_artifact", EXIT_USAGE),
            Error::Domain(_) => ("domain", EXIT_COMPUTATION),
            Error::Convergence(_) => ("convergence", EXIT_COMPUTATION),
            Error::Grid(_) => ("grid", EXIT_COMPUTATION),
            Error::SelectionRule(_) => ("selection_rule", EXIT_COMPUTATION),
            Error::Io(_) => ("io", EXIT_COMPUTATION),
            Error::Json(_) => ("json", EXIT_COMPUTATION),
            Error::Csv(_) => ("csv", EXIT_COMPUTATION),
        };
        Self { kind: kind.into(), message: e.to_string(), exit_code }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self { kind: "usage".into(), message: message.into(), exit_code: EXIT_USAGE }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

/// Resolves flags against the config file into an invocation.
pub fn prepare(args: &Args) -> crate::Result<Invocation> {
    let mut config = match &args.config {
        Some(path) => {
            let mut c = ScenarioConfig::load(path)?;
            c.resolve_paths(path.parent().unwrap_or(std::path::Path::new(".")));
            c
        }
        None => ScenarioConfig::default(),
    };
    if let Some(c) = config.command {
        if c != args.command {
            return Err(Error::Config(format!(
                "config is for {} but the command line asks for {}",
                c.name(),
                args.command.name()
            )));
        }
    }
    config.command = Some(args.command);
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    if let Some(f) = args.format {
        config.format = Some(f);
    }
    let out = args.out.clone().or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("out").join(args.command.name()));
    // The output location is not part of the scenario.
    config.out = None;
    Ok(Invocation { command: args.command, format: config.format.unwrap_or_default(), seed: config.seed, out, config })
}

/// Parses `argv`, runs, and reports. Returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{}", e.render());
            println!("{}", ErrorReport::usage(e.kind().to_string()).to_json());
            return EXIT_USAGE;
        }
    };
    match prepare(&args).and_then(|inv| run(&inv)) {
        Ok(report) => {
            println!("{}", serde_json::to_string(&report).unwrap_or_default());
            0
        }
        Err(e) => {
            let r = ErrorReport::from_error(&e);
            eprintln!("error: {e}");
            println!("{}", r.to_json());
            r.exit_code
        }
    }
}
