//! Scenario runner: binds a JSON config to the library pipelines and emits
//! CSV bundles plus a per-check report.

mod scenarios;

use enkappa::eos::PolytropicEos;
use enkappa::state::{background_solve, ConstantState, Model};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Runtime(String),
}

pub const SCENARIOS: [&str; 9] = [
    "all",
    "background-residual",
    "char-geometry-sweep",
    "energy-positivity-sweep",
    "gaussian-pulse-1d",
    "picard-contraction",
    "causality",
    "dependence",
    "appendix-inequalities",
];

/// One JSON document configures a run; every field has a canonical default
/// so the empty object reproduces the desk suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub eos: PolytropicEos,
    pub background: BackgroundSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub seed: u64,
    pub out_dir: String,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: "all".to_string(),
            eos: enkappa::canonical::eos(),
            background: BackgroundSection::default(),
            grid: GridSection::default(),
            solver: SolverSection::default(),
            seed: 7,
            out_dir: "out".to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundSection {
    pub s_bar: f64,
    pub p_bar: f64,
    pub kappa: f64,
}

impl Default for BackgroundSection {
    fn default() -> Self {
        BackgroundSection {
            s_bar: 1.0,
            p_bar: 1.0,
            kappa: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub points: usize,
    pub extent: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            dim: 1,
            points: 512,
            extent: 8.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub cfl: f64,
    pub t_final: f64,
    pub sobolev_order: usize,
    pub lambda: Option<f64>,
    pub dissipation: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            cfl: 0.4,
            t_final: 1.0,
            sobolev_order: 3,
            lambda: None,
            dissipation: 0.01,
        }
    }
}

/// One check in a report: a measured value against its pinned tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// value must not exceed the tolerance.
    pub fn le(name: &str, value: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.to_string(),
            value,
            tolerance,
            pass: value.is_finite() && value <= tolerance,
        }
    }

    /// value must be at least the tolerance.
    pub fn ge(name: &str, value: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.to_string(),
            value,
            tolerance,
            pass: value.is_finite() && value >= tolerance,
        }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        CheckRecord {
            name: name.to_string(),
            value: if ok { 1.0 } else { 0.0 },
            tolerance: 1.0,
            pass: ok,
        }
    }
}

#[derive(Debug, Default)]
pub struct ReportBundle {
    pub checks: Vec<CheckRecord>,
    pub files: Vec<PathBuf>,
}

impl ReportBundle {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn merge(&mut self, other: ReportBundle) {
        self.checks.extend(other.checks);
        self.files.extend(other.files);
    }
}

/// Shared context assembled from a validated config.
pub struct Context {
    pub config: ScenarioConfig,
    pub model: Model,
    pub background: ConstantState,
    pub out_dir: PathBuf,
}

impl Context {
    pub fn new(config: ScenarioConfig, out_dir: PathBuf) -> Result<Context, CliError> {
        if config.grid.dim != 1 && config.grid.dim != 3 {
            return Err(CliError::InvalidConfig(format!(
                "grid.dim must be 1 or 3, got {}",
                config.grid.dim
            )));
        }
        if config.grid.points < 8 || config.grid.points % 2 != 0 {
            return Err(CliError::InvalidConfig(format!(
                "grid.points must be even and at least 8, got {}",
                config.grid.points
            )));
        }
        if !(config.background.kappa > 0.0) {
            return Err(CliError::InvalidConfig("background.kappa must be positive".into()));
        }
        if !(config.solver.cfl > 0.0 && config.solver.cfl <= 0.5) {
            return Err(CliError::InvalidConfig(format!(
                "solver.cfl must lie in (0, 0.5], got {}",
                config.solver.cfl
            )));
        }
        let model = Model::new(config.eos, config.background.kappa);
        let background = background_solve(
            &config.eos,
            config.background.kappa,
            config.background.s_bar,
            config.background.p_bar,
        )
        .map_err(|e| CliError::InvalidConfig(format!("background: {e}")))?;
        Ok(Context {
            config,
            model,
            background,
            out_dir,
        })
    }
}

/// Parses a config document, rejecting unknown fields with their path.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::InvalidConfig(e.to_string()))
}

/// Executes one scenario (or the whole desk suite) and writes its outputs
/// under the context's directory.
pub fn run_scenario(ctx: &Context) -> Result<ReportBundle, CliError> {
    std::fs::create_dir_all(&ctx.out_dir)
        .map_err(|e| CliError::Runtime(format!("creating {:?}: {e}", ctx.out_dir)))?;
    let id = ctx.config.scenario.as_str();
    let mut bundle = ReportBundle::default();
    let run_one = |id: &str, bundle: &mut ReportBundle| -> Result<(), CliError> {
        let part = match id {
            "background-residual" => scenarios::background_residual(ctx)?,
            "char-geometry-sweep" => scenarios::char_geometry_sweep(ctx)?,
            "energy-positivity-sweep" => scenarios::energy_positivity_sweep(ctx)?,
            "gaussian-pulse-1d" => scenarios::gaussian_pulse_1d(ctx)?,
            "picard-contraction" => scenarios::picard_contraction(ctx)?,
            "causality" => scenarios::causality(ctx)?,
            "dependence" => scenarios::dependence(ctx)?,
            "appendix-inequalities" => scenarios::appendix_inequalities(ctx)?,
            other => return Err(CliError::UnknownScenario(other.to_string())),
        };
        bundle.merge(part);
        Ok(())
    };
    match id {
        "all" => {
            for sub in SCENARIOS.iter().skip(1) {
                run_one(sub, &mut bundle)?;
            }
        }
        other => run_one(other, &mut bundle)?,
    }
    Ok(bundle)
}
