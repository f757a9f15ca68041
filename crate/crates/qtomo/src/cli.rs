//! Argument parsing and config resolution: defaults, then `--config`, then explicit flags.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::manifest::{load_config_value, RunManifest};
use crate::pipeline::{
    self, AnalyzeConfig, Case, IngestConfig, Outcome, PhaseConfig, ReconstructConfig, ReproduceConfig,
    SimulateConfig, TraceConfig, WindowConfig,
};

#[derive(Debug, Parser)]
#[command(name = "qtomo", version, about = "Homodyne quantum state tomography toolkit")]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Fock-space truncation.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// JSON config (or a previous run manifest); explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample quadratures (and optionally raw detector traces) from an analytic state.
    Simulate(SimulateArgs),
    /// Integrate and vacuum-normalize raw signal and blocked traces.
    Ingest(IngestArgs),
    /// Maximum-likelihood density matrix from quadrature samples.
    Reconstruct(ReconstructArgs),
    /// Photon statistics, g2, displaced-Fock fit and Wigner grid of a density matrix.
    Analyze(AnalyzeArgs),
    /// Simulate, reconstruct and analyze a reference case and check the thresholds.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// coherent:RE[+IMi] | fock:K | dfs:RE[+IMi],K | thermal:NBAR
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Detection efficiency in [0, 1].
    #[arg(long)]
    pub efficiency: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phase_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phase_end: Option<f64>,
    /// Also write signal.csv and blocked.csv raw traces.
    #[arg(long)]
    pub traces: bool,
    /// Per-sample white noise on the raw traces (V).
    #[arg(long)]
    pub noise_floor: Option<f64>,
    #[arg(long)]
    pub sample_period: Option<f64>,
    #[arg(long)]
    pub pulse_period: Option<f64>,
    #[arg(long)]
    pub pulse_width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub signal: Option<PathBuf>,
    #[arg(long)]
    pub blocked: Option<PathBuf>,
    /// guarded | auto | OFFSET:LENGTH (seconds)
    #[arg(long)]
    pub window: Option<String>,
    /// Subtract each trace's median before integrating.
    #[arg(long)]
    pub remove_offset: bool,
    /// START:END, first and last pulse phase (rad).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "phase_file")]
    pub phase_ramp: Option<String>,
    /// Quadrature CSV whose theta column gives the pulse phases.
    #[arg(long)]
    pub phase_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Quadrature CSV ("theta,y").
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Per-sample log-likelihood gain below which iteration stops.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub theta_bins: Option<usize>,
    #[arg(long)]
    pub x_bins: Option<usize>,
    #[arg(long)]
    pub x_range: Option<f64>,
    /// Evaluate POVMs at the bin center phase instead of averaging across the bin.
    #[arg(long)]
    pub center_phase: bool,
    /// Per-sample projectors instead of histogram bins; cost grows with the sample count.
    #[arg(long)]
    pub unbinned: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Density matrix JSON.
    #[arg(long)]
    pub rho: Option<PathBuf>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub grid_half_width: Option<f64>,
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// coherent5 | coherent8 | dfs9
    pub case: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn load<C: Default + DeserializeOwned>(config: Option<&Path>, command: &str) -> Result<C> {
    let Some(path) = config else { return Ok(C::default()) };
    let value = load_config_value(path, command)?;
    serde_json::from_value(value).map_err(|e| CliError::format(path, e))
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    s.split_once(':')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
        .ok_or_else(|| CliError::Config(format!("{what} must be A:B, got {s:?}")))
}

fn parse_window(s: &str) -> Result<WindowConfig> {
    match s {
        "guarded" => Ok(WindowConfig::Guarded),
        "auto" => Ok(WindowConfig::Auto),
        _ => parse_pair(s, "window").map(|(offset, length)| WindowConfig::Fixed { offset, length }),
    }
}

/// Executes one parsed command line; outputs are committed even when the command then
/// reports a numerical failure.
pub fn run(cli: Cli) -> Result<()> {
    let start = Instant::now();
    let cfg_path = cli.config.as_deref();
    let (name, seed, config, outcome): (&str, Option<u64>, serde_json::Value, Outcome) = match cli.command {
        Command::Simulate(a) => {
            let mut c: SimulateConfig = load(cfg_path, "simulate")?;
            set(&mut c.state, a.state);
            set(&mut c.samples, a.samples);
            set(&mut c.seed, cli.seed);
            set(&mut c.dim, cli.dim);
            set(&mut c.efficiency, a.efficiency);
            set(&mut c.phase_start, a.phase_start);
            set(&mut c.phase_end, a.phase_end);
            if a.traces && c.traces.is_none() {
                c.traces = Some(TraceConfig::default());
            }
            let explicit = [a.noise_floor, a.sample_period, a.pulse_period, a.pulse_width];
            if explicit.iter().any(Option::is_some) {
                let t = c.traces.get_or_insert_with(TraceConfig::default);
                set(&mut t.noise_floor, a.noise_floor);
                set(&mut t.sample_period, a.sample_period);
                set(&mut t.pulse_period, a.pulse_period);
                set(&mut t.pulse_width, a.pulse_width);
            }
            let outcome = pipeline::simulate(&c)?;
            ("simulate", Some(c.seed), to_value(&c), outcome)
        }
        Command::Ingest(a) => {
            let mut c: IngestConfig = load(cfg_path, "ingest")?;
            set(&mut c.signal, a.signal.map(Some));
            set(&mut c.blocked, a.blocked.map(Some));
            if let Some(w) = a.window {
                c.window = parse_window(&w)?;
            }
            c.remove_offset |= a.remove_offset;
            if let Some(r) = a.phase_ramp {
                let (start, end) = parse_pair(&r, "phase ramp")?;
                c.phases = PhaseConfig::Ramp { start, end };
            }
            set(&mut c.phases, a.phase_file.map(PhaseConfig::File));
            let outcome = pipeline::ingest(&c)?;
            ("ingest", None, to_value(&c), outcome)
        }
        Command::Reconstruct(a) => {
            let mut c: ReconstructConfig = load(cfg_path, "reconstruct")?;
            set(&mut c.input, a.input.map(Some));
            set(&mut c.dim, cli.dim);
            set(&mut c.max_iters, a.max_iters);
            set(&mut c.tolerance, a.tolerance);
            set(&mut c.n_theta, a.theta_bins);
            set(&mut c.n_x, a.x_bins);
            set(&mut c.x_range, a.x_range);
            if a.center_phase {
                c.phase_averaged = false;
            }
            c.unbinned |= a.unbinned;
            let outcome = pipeline::reconstruct(&c)?;
            ("reconstruct", None, to_value(&c), outcome)
        }
        Command::Analyze(a) => {
            let mut c: AnalyzeConfig = load(cfg_path, "analyze")?;
            set(&mut c.rho, a.rho.map(Some));
            set(&mut c.grid_points, a.grid_points);
            set(&mut c.grid_half_width, a.grid_half_width);
            set(&mut c.k_max, a.k_max);
            let outcome = pipeline::analyze(&c)?;
            ("analyze", None, to_value(&c), outcome)
        }
        Command::Reproduce(a) => {
            let mut c: ReproduceConfig = load(cfg_path, "reproduce")?;
            if let Some(name) = a.case {
                let case = Case::parse(&name).ok_or_else(|| CliError::Config(format!("unknown case {name:?}")))?;
                c.case = Some(case);
            }
            set(&mut c.seed, cli.seed);
            set(&mut c.dim, cli.dim);
            set(&mut c.samples, a.samples);
            let outcome = pipeline::reproduce(&c)?;
            ("reproduce", Some(c.seed), to_value(&c), outcome)
        }
    };

    let Outcome { mut staged, inputs, failure } = outcome;
    let mut outputs: Vec<PathBuf> = staged.names().iter().map(|n| cli.out.join(n)).collect();
    outputs.push(cli.out.join(RunManifest::file_name(name)));
    if let Some(clash) = outputs.iter().find(|o| inputs.iter().any(|i| pipeline::is_same_file(i, o))) {
        return Err(CliError::Config(format!("output {} would overwrite an input", clash.display())));
    }
    let manifest = RunManifest {
        command: name.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        config,
        inputs: pipeline::display_paths(&inputs),
        outputs: pipeline::display_paths(&outputs),
        duration_seconds: start.elapsed().as_secs_f64(),
    };
    staged.add(RunManifest::file_name(name), crate::formats::to_json(&manifest));
    for path in staged.commit(&cli.out)? {
        log::info!("wrote {}", path.display());
    }
    failure.map_or(Ok(()), Err)
}

fn to_value<T: Serialize>(c: &T) -> serde_json::Value {
    serde_json::to_value(c).expect("config serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_and_pair_parsing() {
        assert_eq!(parse_window("auto").unwrap(), WindowConfig::Auto);
        assert_eq!(parse_window("4e-9:32e-9").unwrap(), WindowConfig::Fixed { offset: 4e-9, length: 32e-9 });
        assert!(parse_window("wide").is_err());
        assert_eq!(parse_pair("-1:2.5", "x").unwrap(), (-1.0, 2.5));
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from(["qtomo", "--seed", "7", "simulate", "--state", "fock:1", "--out", "d"]).unwrap();
        assert_eq!(cli.seed, Some(7));
        assert_eq!(cli.out, PathBuf::from("d"));
        assert!(matches!(cli.command, Command::Simulate(SimulateArgs { state: Some(_), .. })));
    }
}
