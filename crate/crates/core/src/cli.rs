//! Command-line front end: `analyze`, `build-ham`, `vqe`, `exact`, `compare`.
//!
//! Inputs come from flags, a JSON run config (`--config`), or both; flags win.
//! Exit codes: 0 success, 2 usage, 3 inconsistent data, 4 numerical failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, Layout};
use crate::error::{Error, Result};
use crate::nmr::{
    ab2_analytic_spectrum, ab_analytic_spectrum, build_ab2_hamiltonian, build_ab_hamiltonian,
    extract_ab2_params, extract_ab_params, SpectrumLines, SpinSystemParams, SystemKind,
    DEFAULT_CONSISTENCY_TOLERANCE,
};
use crate::optimizer::{Method, OptimizerOptions};
use crate::oracle::eigensystem;
use crate::pauli::PauliSum;
use crate::vqe::{vqe_minimize, Measurement, VqeResult};

/// |reference − oracle| above this is flagged in comparison reports, Hz.
pub const DEFAULT_FLAG_THRESHOLD: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(name = "nmr-vqe", version, about = "Ground-state energies of AB and AB2 NMR spin systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract Larmor frequencies and the coupling constant from line positions.
    Analyze(RunArgs),
    /// Print the spin Hamiltonian as a Pauli-sum JSON document.
    BuildHam(RunArgs),
    /// Run the variational eigensolver.
    Vqe(RunArgs),
    /// Exact eigenvalues of the Hamiltonian.
    Exact(RunArgs),
    /// Compare variational, exact, and closed-form ground energies.
    Compare(RunArgs),
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// Spin system: AB, AB2, or custom (with --hamiltonian).
    #[arg(long)]
    pub system: Option<String>,
    /// Line positions in Hz, highest first, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lines: Option<Vec<f64>>,
    #[arg(long = "nu-a", allow_hyphen_values = true)]
    pub nu_a: Option<f64>,
    #[arg(long = "nu-b", allow_hyphen_values = true)]
    pub nu_b: Option<f64>,
    #[arg(long = "j", allow_hyphen_values = true)]
    pub j: Option<f64>,
    /// Pauli-sum Hamiltonian JSON file.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    /// ab_fig2, ab2_fig4, or layered:L.
    #[arg(long)]
    pub ansatz: Option<String>,
    #[arg(long, value_enum)]
    pub optimizer: Option<Method>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Estimate energies from this many shots per term instead of exactly.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Where to write the per-iteration trace CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Allowed disagreement between repeated spacings, Hz.
    #[arg(long = "consistency-tol")]
    pub consistency_tol: Option<f64>,
    /// Reference energy to compare against the oracle, as label=value.
    #[arg(long = "reference", value_parser = parse_reference)]
    pub references: Vec<(String, f64)>,
}

fn parse_reference(s: &str) -> std::result::Result<(String, f64), String> {
    let (label, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected label=value, got {s:?}"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("bad reference value {value:?}: {e}"))?;
    Ok((label.trim().to_string(), value))
}

/// Run configuration as read from `--config`. Every field is optional.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: Option<String>,
    pub lines_hz: Option<Vec<f64>>,
    pub nu_a: Option<f64>,
    pub nu_b: Option<f64>,
    pub j_ab: Option<f64>,
    pub hamiltonian: Option<PathBuf>,
    pub ansatz: Option<Layout>,
    pub initial_angles: Option<Vec<f64>>,
    pub optimizer: Option<OptimizerOptions>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub trace: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub consistency_tolerance: Option<f64>,
    #[serde(default)]
    pub references: BTreeMap<String, f64>,
    pub flag_threshold_hz: Option<f64>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)?;
        // a relative Hamiltonian path is resolved against the config file
        Ok(match (cfg.hamiltonian.clone(), path.parent()) {
            (Some(h), Some(dir)) if h.is_relative() => Self {
                hamiltonian: Some(dir.join(h)),
                ..cfg
            },
            _ => cfg,
        })
    }

    /// Overlays flag values. A flag-supplied source (lines, parameters, or
    /// Hamiltonian file) replaces whatever source the file named.
    pub fn merge(mut self, args: &RunArgs) -> Result<Self> {
        let flag_params = args.nu_a.is_some() || args.nu_b.is_some() || args.j.is_some();
        if args.lines.is_some() || flag_params || args.hamiltonian.is_some() {
            self.lines_hz = None;
            self.nu_a = None;
            self.nu_b = None;
            self.j_ab = None;
            self.hamiltonian = None;
        }
        macro_rules! overlay {
            ($($field:ident <- $flag:expr),* $(,)?) => {
                $(if let Some(v) = $flag.clone() { self.$field = Some(v); })*
            };
        }
        overlay!(
            system <- args.system,
            lines_hz <- args.lines,
            nu_a <- args.nu_a,
            nu_b <- args.nu_b,
            j_ab <- args.j,
            hamiltonian <- args.hamiltonian,
            shots <- args.shots,
            seed <- args.seed,
            trace <- args.trace,
            out <- args.out,
            consistency_tolerance <- args.consistency_tol,
        );
        if let Some(a) = &args.ansatz {
            self.ansatz = Some(parse_layout(a)?);
        }
        if args.optimizer.is_some() || args.tol.is_some() || args.max_iter.is_some() {
            let mut o = self.optimizer.take().unwrap_or_default();
            if let Some(m) = args.optimizer {
                o.method = m;
            }
            if let Some(t) = args.tol {
                o.tolerance = t;
            }
            if let Some(n) = args.max_iter {
                o.max_iterations = n;
            }
            self.optimizer = Some(o);
        }
        for (label, value) in &args.references {
            self.references.insert(label.clone(), *value);
        }
        Ok(self)
    }
}

pub fn parse_layout(s: &str) -> Result<Layout> {
    match s.trim().to_ascii_lowercase().as_str() {
        "ab_fig2" | "ab" => Ok(Layout::Ab),
        "ab2_fig4" | "ab2" => Ok(Layout::Ab2),
        other => {
            let layers = other
                .strip_prefix("layered:")
                .and_then(|l| l.parse::<usize>().ok())
                .ok_or_else(|| {
                    Error::Validation(format!(
                        "unknown ansatz {s:?}; expected ab_fig2, ab2_fig4, or layered:L"
                    ))
                })?;
            Ok(Layout::Layered(layers))
        }
    }
}

/// Where the Hamiltonian comes from after resolving the config.
#[derive(Clone, Debug)]
pub enum Problem {
    /// An AB or AB2 system, with the lines it was extracted from if any.
    Spin {
        params: SpinSystemParams,
        lines: Option<SpectrumLines>,
    },
    Custom(PauliSum),
}

impl Problem {
    pub fn hamiltonian(&self) -> Result<PauliSum> {
        match self {
            Problem::Spin { params, .. } => match params.kind {
                SystemKind::Ab => build_ab_hamiltonian(params),
                SystemKind::Ab2 => build_ab2_hamiltonian(params),
            },
            Problem::Custom(h) => Ok(h.clone()),
        }
    }

    /// Closed-form ground energy; none for custom Hamiltonians.
    pub fn analytic_ground(&self) -> Result<Option<f64>> {
        match self {
            Problem::Spin { params, .. } => {
                let spectrum = match params.kind {
                    SystemKind::Ab => ab_analytic_spectrum(params)?,
                    SystemKind::Ab2 => ab2_analytic_spectrum(params)?,
                };
                Ok(Some(spectrum.ground().energy))
            }
            Problem::Custom(_) => Ok(None),
        }
    }
}

fn system_kind(cfg: &RunConfig) -> Result<Option<SystemKind>> {
    match cfg.system.as_deref() {
        None => Ok(None),
        Some(s) if s.eq_ignore_ascii_case("custom") => Ok(None),
        Some(s) => s.parse().map(Some),
    }
}

pub fn resolve_problem(cfg: &RunConfig) -> Result<Problem> {
    let has_params = cfg.nu_a.is_some() || cfg.nu_b.is_some() || cfg.j_ab.is_some();
    let sources = [cfg.lines_hz.is_some(), has_params, cfg.hamiltonian.is_some()];
    if sources.iter().filter(|&&s| s).count() != 1 {
        return Err(Error::Validation(
            "supply exactly one of: line positions, explicit parameters (nu_a, nu_b, j), or a Hamiltonian file".into(),
        ));
    }
    if let Some(path) = &cfg.hamiltonian {
        if system_kind(cfg)?.is_some() {
            return Err(Error::Validation(
                "a Hamiltonian file implies --system custom".into(),
            ));
        }
        return Ok(Problem::Custom(PauliSum::from_json(&fs::read_to_string(path)?)?));
    }
    let kind = system_kind(cfg)?.ok_or_else(|| {
        Error::Validation("--system AB or AB2 is required with lines or parameters".into())
    })?;
    if let Some(f) = &cfg.lines_hz {
        let lines = SpectrumLines::new(kind, f.clone())?;
        let params = match kind {
            SystemKind::Ab => extract_ab_params(
                &lines,
                cfg.consistency_tolerance.unwrap_or(DEFAULT_CONSISTENCY_TOLERANCE),
            )?,
            SystemKind::Ab2 => extract_ab2_params(&lines)?,
        };
        return Ok(Problem::Spin {
            params,
            lines: Some(lines),
        });
    }
    let (Some(a), Some(b), Some(j)) = (cfg.nu_a, cfg.nu_b, cfg.j_ab) else {
        return Err(Error::Validation("explicit parameters need all of nu_a, nu_b, and j".into()));
    };
    if ![a, b, j].iter().all(|x| x.is_finite()) {
        return Err(Error::Validation("spin parameters must be finite".into()));
    }
    Ok(Problem::Spin {
        params: SpinSystemParams::new(kind, a, b, j),
        lines: None,
    })
}

fn ansatz_for(cfg: &RunConfig, h: &PauliSum, problem: &Problem) -> Result<AnsatzSpec> {
    let n = h.n_qubits();
    let layout = match (cfg.ansatz, problem) {
        (Some(l), _) => l,
        (None, Problem::Spin { params, .. }) => match params.kind {
            SystemKind::Ab => Layout::Ab,
            SystemKind::Ab2 => Layout::Ab2,
        },
        (None, Problem::Custom(_)) => Layout::Layered(n.max(2)),
    };
    let spec = AnsatzSpec::new(n, layout)?;
    match &cfg.initial_angles {
        Some(angles) => spec.with_initial_angles(angles.clone()),
        None => Ok(spec),
    }
}

fn measurement(cfg: &RunConfig) -> Result<Measurement> {
    match (cfg.shots, cfg.seed) {
        (Some(shots), seed) => Ok(Measurement::Shots {
            shots,
            seed: seed.unwrap_or(0),
        }),
        (None, Some(_)) => Err(Error::Validation("--seed only applies with --shots".into())),
        (None, None) => Ok(Measurement::Exact),
    }
}

#[derive(Debug, Serialize)]
pub struct ExactOutput {
    pub eigenvalues_hz: Vec<f64>,
    pub ground_energy_hz: f64,
}

#[derive(Debug, Serialize)]
pub struct VqeOutput {
    pub ground_energy_hz: f64,
    pub oracle_energy_hz: f64,
    pub gap_hz: f64,
    pub theta: Vec<f64>,
    /// Rows in the trace CSV.
    pub iterations: usize,
    pub trace_csv: Option<PathBuf>,
    pub evaluations: usize,
    pub converged: bool,
    pub ground_state_fidelity: f64,
    pub measurement: Measurement,
}

#[derive(Debug, Serialize)]
pub struct ReferenceDelta {
    pub label: String,
    pub value_hz: f64,
    /// value − oracle.
    pub delta_hz: f64,
    /// Relative to the oracle energy.
    pub relative_delta: f64,
    /// |delta| exceeds the report's flag threshold.
    pub flagged: bool,
}

#[derive(Debug, Serialize)]
pub struct Deltas {
    pub vqe_minus_oracle_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_minus_oracle_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vqe_minus_analytic_hz: Option<f64>,
}

/// A closed-form value computed under an alternative convention, kept so
/// that convention mismatches show up next to the adopted value.
#[derive(Debug, Serialize)]
pub struct ConventionVariant {
    pub description: String,
    pub energy_hz: f64,
    pub delta_vs_oracle_hz: f64,
}

#[derive(Debug, Serialize)]
pub struct ComparisonReport {
    pub system: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<SpinSystemParams>,
    pub vqe_energy_hz: f64,
    pub oracle_energy_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_energy_hz: Option<f64>,
    pub deltas: Deltas,
    pub flag_threshold_hz: f64,
    pub references: Vec<ReferenceDelta>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub convention_variants: Vec<ConventionVariant>,
}

fn run_vqe(cfg: &RunConfig, problem: &Problem) -> Result<VqeResult> {
    let h = problem.hamiltonian()?;
    let spec = ansatz_for(cfg, &h, problem)?;
    let opts = cfg.optimizer.clone().unwrap_or_default();
    vqe_minimize(&h, &spec, &opts, measurement(cfg)?)
}

/// Trace goes to `--trace`, else next to `--out` with a `.csv` extension.
fn trace_path(cfg: &RunConfig) -> Option<PathBuf> {
    cfg.trace
        .clone()
        .or_else(|| cfg.out.as_ref().map(|o| o.with_extension("csv")))
}

fn analyze(cfg: &RunConfig) -> Result<serde_json::Value> {
    match resolve_problem(cfg)? {
        Problem::Spin { params, .. } => Ok(serde_json::to_value(params)?),
        Problem::Custom(_) => Err(Error::Validation(
            "analyze needs line positions or spin parameters".into(),
        )),
    }
}

fn build_ham(cfg: &RunConfig) -> Result<serde_json::Value> {
    let h = resolve_problem(cfg)?.hamiltonian()?;
    Ok(serde_json::to_value(h.to_file())?)
}

fn exact(cfg: &RunConfig) -> Result<serde_json::Value> {
    let h = resolve_problem(cfg)?.hamiltonian()?;
    let es = eigensystem(&h.to_dense_matrix()?)?;
    Ok(serde_json::to_value(ExactOutput {
        ground_energy_hz: es.ground_energy(),
        eigenvalues_hz: es.values,
    })?)
}

fn vqe(cfg: &RunConfig) -> Result<serde_json::Value> {
    let problem = resolve_problem(cfg)?;
    let r = run_vqe(cfg, &problem)?;
    let trace_csv = trace_path(cfg);
    if let Some(path) = &trace_csv {
        r.trace.write_csv(fs::File::create(path)?)?;
    }
    Ok(serde_json::to_value(VqeOutput {
        ground_energy_hz: r.ground_energy,
        oracle_energy_hz: r.oracle_energy,
        gap_hz: r.absolute_gap,
        theta: r.optimal_parameters,
        iterations: r.trace.len(),
        trace_csv,
        evaluations: r.evaluations,
        converged: r.converged,
        ground_state_fidelity: r.ground_state_fidelity,
        measurement: measurement(cfg)?,
    })?)
}

pub fn compare_report(cfg: &RunConfig) -> Result<ComparisonReport> {
    let problem = resolve_problem(cfg)?;
    let r = run_vqe(cfg, &problem)?;
    if let Some(path) = &cfg.trace {
        r.trace.write_csv(fs::File::create(path)?)?;
    }
    let oracle = r.oracle_energy;
    let analytic = problem.analytic_ground()?;
    let threshold = cfg.flag_threshold_hz.unwrap_or(DEFAULT_FLAG_THRESHOLD);
    let references = cfg
        .references
        .iter()
        .map(|(label, &value)| ReferenceDelta {
            label: label.clone(),
            value_hz: value,
            delta_hz: value - oracle,
            relative_delta: (value - oracle) / oracle.abs().max(f64::MIN_POSITIVE),
            flagged: (value - oracle).abs() > threshold,
        })
        .collect();

    let (system, params) = match &problem {
        Problem::Spin { params, .. } => (params.kind.to_string(), Some(*params)),
        Problem::Custom(_) => ("custom".to_string(), None),
    };
    let mut convention_variants = Vec::new();
    if let Some(p) = params.filter(|p| p.kind == SystemKind::Ab) {
        // |αα⟩ with a +J/2 diagonal instead of the +J/4 that the matrix gives
        let energy = -(p.nu_a + p.nu_b) / 2.0 + p.j_ab / 2.0;
        convention_variants.push(ConventionVariant {
            description: "|00> level with +J/2 in place of +J/4".into(),
            energy_hz: energy,
            delta_vs_oracle_hz: energy - oracle,
        });
    }

    Ok(ComparisonReport {
        system,
        params,
        vqe_energy_hz: r.ground_energy,
        oracle_energy_hz: oracle,
        analytic_energy_hz: analytic,
        deltas: Deltas {
            vqe_minus_oracle_hz: r.ground_energy - oracle,
            analytic_minus_oracle_hz: analytic.map(|a| a - oracle),
            vqe_minus_analytic_hz: analytic.map(|a| r.ground_energy - a),
        },
        flag_threshold_hz: threshold,
        references,
        convention_variants,
    })
}

fn emit(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

/// Runs one parsed command.
pub fn run(cli: Cli) -> Result<()> {
    let (args, handler): (&RunArgs, fn(&RunConfig) -> Result<serde_json::Value>) = match &cli.command {
        Command::Analyze(a) => (a, analyze),
        Command::BuildHam(a) => (a, build_ham),
        Command::Vqe(a) => (a, vqe),
        Command::Exact(a) => (a, exact),
        Command::Compare(a) => (a, |cfg| Ok(serde_json::to_value(compare_report(cfg)?)?)),
    };
    let base = match &args.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    let cfg = base.merge(args)?;
    let value = handler(&cfg)?;
    emit(&value, cfg.out.as_deref())
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
