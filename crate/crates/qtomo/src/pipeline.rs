//! Command implementations. Each returns its staged artifacts; the caller commits them
//! together with the run manifest.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use qtomo_core::analysis::{
    compare_wigner, fidelity, fit_dfs, poisson_deviation, wigner_negativity, FitModel, FitResult, WignerComparison,
    WignerNegativity,
};
use qtomo_core::homodyne::{
    sample_quadratures, synth_trace, PhaseSchedule, PulseShape, QuadratureRecord, SynthesizedTraces, TraceSettings,
};
use qtomo_core::ingest::{
    assign_phases, integrate_pulses, normalize, to_records, vacuum_calibration, IntegrationOptions,
    IntegrationWindow, PhaseAssignment, VacuumCalibration,
};
use qtomo_core::maxlik::{
    bin_quadratures, maxlik_reconstruct, maxlik_reconstruct_unbinned, ReconstructionConfig, ReconstructionReport,
    StopReason,
};
use qtomo_core::states::{
    centroid, default_axes, dfs_wigner, g2_as_printed, g2_zero, photon_distribution, state_to_density,
    PhotonDistribution, StateSpec, WignerGrid,
};
use qtomo_core::{Complex64, DensityMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::formats;
use crate::grid::wigner_grid;
use crate::output::Staged;
use crate::statespec::parse_state;

/// Artifacts of one command plus an optional failure to report after they are written.
#[derive(Debug)]
pub struct Outcome {
    pub staged: Staged,
    pub inputs: Vec<PathBuf>,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(staged: Staged, inputs: Vec<PathBuf>) -> Self {
        Outcome { staged, inputs, failure: None }
    }
}

fn require_path(p: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    p.clone().ok_or_else(|| CliError::Config(format!("missing {what}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceConfig {
    pub sample_period: f64,
    pub pulse_period: f64,
    pub pulse_width: f64,
    /// Pulse peak voltage per unit quadrature.
    pub amplitude: f64,
    pub noise_floor: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig { sample_period: 1e-9, pulse_period: 40e-9, pulse_width: 2e-9, amplitude: 0.05, noise_floor: 0.0 }
    }
}

impl TraceConfig {
    pub fn settings(&self) -> TraceSettings {
        TraceSettings {
            pulse: PulseShape { width: self.pulse_width, amplitude_per_unit_y: self.amplitude },
            pulse_period: self.pulse_period,
            noise_floor: self.noise_floor,
            sample_period: self.sample_period,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub state: String,
    pub samples: usize,
    pub seed: u64,
    pub dim: usize,
    pub efficiency: f64,
    pub phase_start: f64,
    pub phase_end: f64,
    /// Also render signal and blocked raw traces.
    pub traces: Option<TraceConfig>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            state: String::new(),
            samples: 50_000,
            seed: 0,
            dim: qtomo_core::DEFAULT_DIM,
            efficiency: 1.0,
            phase_start: 0.0,
            phase_end: TAU,
            traces: None,
        }
    }
}

pub fn simulate_records(cfg: &SimulateConfig) -> Result<(StateSpec, Vec<QuadratureRecord>)> {
    let spec = parse_state(&cfg.state)?;
    let rho = state_to_density(&spec, cfg.dim)?;
    let schedule = PhaseSchedule::LinearRamp { start: cfg.phase_start, end: cfg.phase_end, n_samples: cfg.samples };
    let records = sample_quadratures(&rho, &schedule, cfg.seed, cfg.efficiency)?;
    Ok((spec, records))
}

pub fn simulate(cfg: &SimulateConfig) -> Result<Outcome> {
    let (_, records) = simulate_records(cfg)?;
    let mut staged = Staged::new();
    staged.add("quadratures.csv", formats::quadratures_to_csv(&records));
    if let Some(tc) = &cfg.traces {
        let SynthesizedTraces { signal, blocked } = synth_trace(&records, &tc.settings(), cfg.seed)?;
        staged.add("signal.csv", formats::trace_to_csv(&signal));
        staged.add("signal.json", formats::trace_sidecar(&signal));
        staged.add("blocked.csv", formats::trace_to_csv(&blocked));
        staged.add("blocked.json", formats::trace_sidecar(&blocked));
    }
    Ok(Outcome::ok(staged, Vec::new()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowConfig {
    /// Full period minus 10 % guard bands.
    Guarded,
    /// Highest-signal window of the guarded length.
    Auto,
    Fixed { offset: f64, length: f64 },
}

impl WindowConfig {
    pub fn resolve(&self, pulse_period: f64) -> IntegrationWindow {
        match *self {
            WindowConfig::Guarded => IntegrationWindow::guarded(pulse_period),
            WindowConfig::Auto => IntegrationWindow::auto(pulse_period),
            WindowConfig::Fixed { offset, length } => IntegrationWindow::Fixed { offset, length },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseConfig {
    /// Linear from the first pulse to the last, both ends included.
    Ramp { start: f64, end: f64 },
    /// Take phases from the `theta` column of a quadrature CSV.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub signal: Option<PathBuf>,
    pub blocked: Option<PathBuf>,
    pub window: WindowConfig,
    pub remove_offset: bool,
    pub phases: PhaseConfig,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            signal: None,
            blocked: None,
            window: WindowConfig::Guarded,
            remove_offset: false,
            phases: PhaseConfig::Ramp { start: 0.0, end: TAU },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub delta: f64,
    pub n_blocked: usize,
    pub blocked_mean: f64,
}

impl From<VacuumCalibration> for CalibrationReport {
    fn from(c: VacuumCalibration) -> Self {
        CalibrationReport { delta: c.constant.delta(), n_blocked: c.n_blocked, blocked_mean: c.blocked_mean }
    }
}

pub fn ingest_records(cfg: &IngestConfig) -> Result<(Vec<QuadratureRecord>, VacuumCalibration, Vec<PathBuf>)> {
    let signal_path = require_path(&cfg.signal, "signal trace")?;
    let blocked_path = require_path(&cfg.blocked, "blocked trace")?;
    let signal = formats::read_trace(&signal_path)?;
    let blocked = formats::read_trace(&blocked_path)?;
    let options = |period| IntegrationOptions { window: cfg.window.resolve(period), remove_offset: cfg.remove_offset };
    let vs = integrate_pulses(&signal, &options(signal.pulse_period))?;
    let v0 = integrate_pulses(&blocked, &options(blocked.pulse_period))?;
    let calibration = vacuum_calibration(&v0)?;
    let ys = normalize(&vs, calibration.constant);
    let mut inputs = vec![signal_path, blocked_path];
    let assignment = match &cfg.phases {
        PhaseConfig::Ramp { start, end } => PhaseAssignment::Ramp { phi_start: *start, phi_end: *end },
        PhaseConfig::File(path) => {
            let phases: Vec<f64> = formats::read_quadratures(path)?.iter().map(|r| r.theta).collect();
            inputs.push(path.clone());
            PhaseAssignment::Explicit(phases)
        }
    };
    let phases = assign_phases(ys.len(), &assignment)?;
    Ok((to_records(&phases, &ys), calibration, inputs))
}

pub fn ingest(cfg: &IngestConfig) -> Result<Outcome> {
    let (records, calibration, inputs) = ingest_records(cfg)?;
    let mut staged = Staged::new();
    staged.add("quadratures.csv", formats::quadratures_to_csv(&records));
    staged.add("calibration.json", formats::to_json(&CalibrationReport::from(calibration)));
    Ok(Outcome::ok(staged, inputs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructConfig {
    pub input: Option<PathBuf>,
    pub dim: usize,
    pub max_iters: usize,
    pub tolerance: f64,
    pub n_theta: usize,
    pub n_x: usize,
    pub x_range: f64,
    pub phase_averaged: bool,
    /// One projector per sample instead of histogram bins.
    pub unbinned: bool,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        let d = ReconstructionConfig::default();
        ReconstructConfig {
            input: None,
            dim: d.dim,
            max_iters: d.max_iters,
            tolerance: d.ll_tolerance,
            n_theta: d.n_theta,
            n_x: d.n_x,
            x_range: d.x_range,
            phase_averaged: d.phase_averaged,
            unbinned: false,
        }
    }
}

impl ReconstructConfig {
    pub fn core(&self) -> ReconstructionConfig {
        ReconstructionConfig {
            dim: self.dim,
            max_iters: self.max_iters,
            ll_tolerance: self.tolerance,
            n_theta: self.n_theta,
            n_x: self.n_x,
            x_range: self.x_range,
            phase_averaged: self.phase_averaged,
            track_physicality: false,
        }
    }
}

#[derive(Debug, Serialize)]
struct ReportJson<'a> {
    iterations: usize,
    ll_per_sample: f64,
    converged: bool,
    stop_reason: &'static str,
    diluted_steps: usize,
    samples: u64,
    out_of_range: u64,
    config: &'a ReconstructConfig,
}

#[derive(Debug)]
pub struct Reconstruction {
    pub report: ReconstructionReport,
    pub samples: u64,
    pub out_of_range: u64,
}

pub fn reconstruct_records(records: &[QuadratureRecord], cfg: &ReconstructConfig) -> Result<Reconstruction> {
    let core = cfg.core();
    core.validate()?;
    if cfg.unbinned {
        let report = maxlik_reconstruct_unbinned(records, &core)?;
        return Ok(Reconstruction { report, samples: records.len() as u64, out_of_range: 0 });
    }
    let data = bin_quadratures(records, &core)?;
    let report = maxlik_reconstruct(&data, &core)?;
    Ok(Reconstruction { report, samples: data.total_count, out_of_range: data.overflow })
}

fn stage_reconstruction(staged: &mut Staged, rec: &Reconstruction, cfg: &ReconstructConfig) {
    let report = &rec.report;
    staged.add("rho.json", formats::density_to_json(&report.rho));
    staged.add(
        "report.json",
        formats::to_json(&ReportJson {
            iterations: report.iterations_used,
            ll_per_sample: report.ll_per_sample,
            converged: report.converged,
            stop_reason: match report.stop_reason {
                StopReason::Tolerance => "tolerance",
                StopReason::MaxIterations => "max_iterations",
            },
            diluted_steps: report.diluted_steps,
            samples: rec.samples,
            out_of_range: rec.out_of_range,
            config: cfg,
        }),
    );
}

pub fn reconstruct(cfg: &ReconstructConfig) -> Result<Outcome> {
    let input = require_path(&cfg.input, "quadrature input")?;
    let records = formats::read_quadratures(&input)?;
    let rec = reconstruct_records(&records, cfg)?;
    let mut staged = Staged::new();
    stage_reconstruction(&mut staged, &rec, cfg);
    let failure = (!rec.report.converged).then_some(CliError::NotConverged { iterations: rec.report.iterations_used });
    Ok(Outcome { staged, inputs: vec![input], failure })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub rho: Option<PathBuf>,
    /// Points per grid axis.
    pub grid_points: usize,
    /// Grid spans the state's centroid ± this in each direction.
    pub grid_half_width: f64,
    /// Largest Fock index tried by the displaced-Fock fit.
    pub k_max: usize,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig { rho: None, grid_points: 121, grid_half_width: 4.0, k_max: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct G2Report {
    pub g2: f64,
    /// `(⟨n²⟩ − ⟨n⟩²)/⟨n⟩²`, which is `1/⟨n⟩` for Poisson light.
    pub g2_as_printed: f64,
    pub mean_photons: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub model: &'static str,
    pub k: usize,
    pub alpha_sq: f64,
    pub goodness: f64,
    pub residuals: Vec<f64>,
}

impl From<&FitResult> for FitReport {
    fn from(f: &FitResult) -> Self {
        FitReport {
            model: match f.model {
                FitModel::Coherent => "coherent",
                FitModel::DisplacedFock => "displaced_fock",
            },
            k: f.k,
            alpha_sq: f.alpha_sq,
            goodness: f.goodness,
            residuals: f.residuals.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub min_ratio: f64,
    pub second_moment_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativityReport {
    pub min_value: f64,
    pub min_location: [f64; 2],
    pub negative_volume: f64,
    /// Measured grid against the fitted displaced-Fock model on the same grid; absent
    /// when the fit is a coherent state and the model has no negative region.
    pub versus_fit: Option<ComparisonReport>,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub pn: PhotonDistribution,
    pub g2: G2Report,
    pub fit: FitResult,
    pub grid: WignerGrid,
    pub negativity: WignerNegativity,
    pub versus_fit: Option<WignerComparison>,
}

pub fn analyze_density(rho: &DensityMatrix, cfg: &AnalyzeConfig) -> Result<Analysis> {
    if cfg.grid_points < 2 || !(cfg.grid_half_width > 0.0) {
        return Err(CliError::Config("grid needs at least 2 points and a positive half width".into()));
    }
    let pn = photon_distribution(rho);
    let g2 = G2Report { g2: g2_zero(&pn)?, g2_as_printed: g2_as_printed(&pn)?, mean_photons: pn.mean() };
    let fit = fit_dfs(&pn, cfg.k_max)?;
    let center = centroid(rho);
    let (xs, ys) = default_axes(center, cfg.grid_half_width, cfg.grid_points);
    let grid = wigner_grid(rho, &xs, &ys)?;
    let negativity = wigner_negativity(&grid);
    if fit.k == 0 {
        return Ok(Analysis { pn, g2, fit, grid, negativity, versus_fit: None });
    }
    let alpha_fit = Complex64::from_polar(fit.alpha_sq.sqrt(), center.arg());
    let ny = ys.len();
    let model = WignerGrid {
        values: (0..xs.len() * ny).map(|i| dfs_wigner(alpha_fit, fit.k, Complex64::new(xs[i / ny], ys[i % ny]))).collect(),
        x_axis: xs,
        y_axis: ys,
    };
    let versus_fit = Some(compare_wigner(&grid, &model));
    Ok(Analysis { pn, g2, fit, grid, negativity, versus_fit })
}

fn stage_analysis(staged: &mut Staged, a: &Analysis) {
    staged.add("pn.csv", formats::pn_to_csv(&a.pn, &a.fit));
    staged.add("wigner.csv", formats::wigner_to_csv(&a.grid));
    staged.add("wigner.json", formats::wigner_to_json(&a.grid));
    staged.add("g2.json", formats::to_json(&a.g2));
    staged.add("fit.json", formats::to_json(&FitReport::from(&a.fit)));
    let n = a.negativity;
    staged.add(
        "negativity.json",
        formats::to_json(&NegativityReport {
            min_value: n.min_value,
            min_location: [n.min_location.0, n.min_location.1],
            negative_volume: n.negative_volume,
            versus_fit: a.versus_fit.map(|c| ComparisonReport {
                min_ratio: c.min_ratio,
                second_moment_ratio: c.second_moment_ratio,
            }),
        }),
    );
}

pub fn analyze(cfg: &AnalyzeConfig) -> Result<Outcome> {
    let path = require_path(&cfg.rho, "density matrix input")?;
    let rho = formats::read_density(&path)?;
    let analysis = analyze_density(&rho, cfg)?;
    let mut staged = Staged::new();
    stage_analysis(&mut staged, &analysis);
    Ok(Outcome::ok(staged, vec![path]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Coherent5,
    Coherent8,
    Dfs9,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::Coherent5, Case::Coherent8, Case::Dfs9];

    pub fn name(self) -> &'static str {
        match self {
            Case::Coherent5 => "coherent5",
            Case::Coherent8 => "coherent8",
            Case::Dfs9 => "dfs9",
        }
    }

    pub fn parse(s: &str) -> Option<Case> {
        Case::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn state(self) -> &'static str {
        match self {
            Case::Coherent5 => "coherent:2.23606797749979",
            Case::Coherent8 => "coherent:2.8284271247461903",
            Case::Dfs9 => "dfs:2.15+2.1i,1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReproduceConfig {
    pub case: Option<Case>,
    pub seed: u64,
    pub samples: usize,
    pub dim: usize,
}

impl Default for ReproduceConfig {
    fn default() -> Self {
        ReproduceConfig { case: None, seed: 0, samples: 50_000, dim: qtomo_core::DEFAULT_DIM }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: String,
    pub passed: bool,
}

fn check(name: &'static str, value: f64, threshold: impl Into<String>, passed: bool) -> Check {
    Check { name, value, threshold: threshold.into(), passed }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub case: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub iterations: usize,
    pub converged: bool,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub struct Reproduction {
    pub summary: Summary,
    pub records: Vec<QuadratureRecord>,
    pub reconstruction: Reconstruction,
    pub analysis: Analysis,
}

pub fn reproduce_case(case: Case, cfg: &ReproduceConfig) -> Result<Reproduction> {
    let sim = SimulateConfig {
        state: case.state().into(),
        samples: cfg.samples,
        seed: cfg.seed,
        dim: cfg.dim,
        ..SimulateConfig::default()
    };
    let (spec, records) = simulate_records(&sim)?;
    let rec_cfg = ReconstructConfig { dim: cfg.dim, ..ReconstructConfig::default() };
    let reconstruction = reconstruct_records(&records, &rec_cfg)?;
    let rho = &reconstruction.report.rho;
    let analysis = analyze_density(rho, &AnalyzeConfig::default())?;
    let mut checks = vec![check(
        "converged",
        reconstruction.report.iterations_used as f64,
        "stops on tolerance",
        reconstruction.report.converged,
    )];
    match case {
        Case::Coherent5 | Case::Coherent8 => {
            let truth = state_to_density(&spec, cfg.dim)?;
            let f = fidelity(rho, &truth)?;
            let tv = poisson_deviation(&analysis.pn)?.tv_distance;
            let g2 = analysis.g2.g2;
            checks.push(check("fidelity", f, ">= 0.99", f >= 0.99));
            checks.push(check("poisson_tv_distance", tv, "< 0.03", tv < 0.03));
            checks.push(check("g2", g2, "in [0.97, 1.03]", (0.97..=1.03).contains(&g2)));
            checks.push(check("fit_k", analysis.fit.k as f64, "== 0", analysis.fit.k == 0));
        }
        Case::Dfs9 => {
            let p = &analysis.pn.probs;
            let dip = p.len() > 10 && p[9] < p[8] && p[9] < p[10];
            checks.push(check("p9", p.get(9).copied().unwrap_or(f64::NAN), "local minimum at n = 9", dip));
            checks.push(check("fit_k", analysis.fit.k as f64, "== 1", analysis.fit.k == 1));
            let a2 = analysis.fit.alpha_sq;
            checks.push(check("fit_alpha_sq", a2, "in [8, 10]", (8.0..=10.0).contains(&a2)));
            let wmin = analysis.negativity.min_value;
            checks.push(check("wigner_min", wmin, "< -0.15", wmin < -0.15));
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    let summary = Summary {
        case: case.name(),
        seed: cfg.seed,
        samples: cfg.samples,
        iterations: reconstruction.report.iterations_used,
        converged: reconstruction.report.converged,
        checks,
        passed,
    };
    Ok(Reproduction { summary, records, reconstruction, analysis })
}

pub fn reproduce(cfg: &ReproduceConfig) -> Result<Outcome> {
    let case = cfg.case.ok_or_else(|| CliError::Config("missing case (coherent5, coherent8 or dfs9)".into()))?;
    let run = reproduce_case(case, cfg)?;
    let mut staged = Staged::new();
    staged.add("quadratures.csv", formats::quadratures_to_csv(&run.records));
    let rec_cfg = ReconstructConfig { dim: cfg.dim, ..ReconstructConfig::default() };
    stage_reconstruction(&mut staged, &run.reconstruction, &rec_cfg);
    stage_analysis(&mut staged, &run.analysis);
    staged.add("summary.json", formats::to_json(&run.summary));
    let failed = run.summary.checks.iter().filter(|c| !c.passed).count();
    let failure = (failed > 0).then_some(CliError::ChecksFailed { failed });
    Ok(Outcome { staged, inputs: Vec::new(), failure })
}

/// Paths are recorded as given.
pub fn display_paths(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.display().to_string()).collect()
}

pub fn is_same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}
