use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::geometry::TargetDescriptor;
use crate::schedule::{Constants, Mode, PipelineKind, PlanSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SampleUniform,
    SampleGaussian,
    SampleLogconcave,
    CheckAnnealingBounds,
    CovExperiment,
    DumpPlan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SampleUniform => "sample-uniform",
            Command::SampleGaussian => "sample-gaussian",
            Command::SampleLogconcave => "sample-logconcave",
            Command::CheckAnnealingBounds => "check-annealing-bounds",
            Command::CovExperiment => "cov-experiment",
            Command::DumpPlan => "dump-plan",
        }
    }

    /// The pipeline a sampling command runs.
    pub fn pipeline(self) -> Option<PipelineKind> {
        match self {
            Command::SampleUniform => Some(PipelineKind::Uniform),
            Command::SampleGaussian => Some(PipelineKind::StdGaussian),
            Command::SampleLogconcave => Some(PipelineKind::Logconcave),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Theory,
    #[default]
    Practical,
}

/// Optional overrides of the covariance experiment defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovSettings {
    pub h_grid: Option<Vec<f64>>,
    pub samples_per_h: Option<usize>,
    pub step_cap: Option<f64>,
    pub burn_in: Option<u64>,
    pub thin: Option<u64>,
    pub n_cap: Option<u64>,
    pub batches: Option<usize>,
}

/// A run of the `lcsamp` tool. Keys absent from the file take the defaults
/// below; [`resolve`](RunConfig::resolve) replaces every `None` that has a
/// per-command default so reports echo what actually ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub target: Option<TargetDescriptor>,
    #[serde(default = "default_budget")]
    pub eta: f64,
    #[serde(default = "default_budget")]
    pub eps: f64,
    pub seed: u64,
    #[serde(default)]
    pub mode: ModeName,
    #[serde(default)]
    pub scale_h: Option<f64>,
    #[serde(default)]
    pub scale_k: Option<f64>,
    #[serde(default)]
    pub n_cap: Option<u64>,
    /// Hint for `‖cov π‖`.
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub final_samples: Option<usize>,
    #[serde(default)]
    pub thin: Option<u64>,
    #[serde(default = "default_replicas")]
    pub replicas: u32,
    /// Emit the plan instead of sampling.
    #[serde(default)]
    pub dump_plan: bool,
    #[serde(default = "default_true")]
    pub timestamp: bool,
    /// Report JSON path; stdout when absent.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// CSV path for samples, the covariance curve or the bounds table.
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub cov: Option<CovSettings>,
    /// Random potentials in `check-annealing-bounds`.
    #[serde(default)]
    pub bound_cases: Option<usize>,
}

fn default_budget() -> f64 {
    0.1
}

fn default_replicas() -> u32 {
    1
}

fn default_true() -> bool {
    true
}

pub const DEFAULT_FINAL_SAMPLES: usize = 1000;
pub const DEFAULT_BOUND_CASES: usize = 20;

impl RunConfig {
    /// Parses and validates a JSON config; unknown keys are rejected.
    pub fn from_value(v: Value) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.plan_settings_unchecked().validate()?;
        if self.replicas == 0 {
            return Err(Error::Config("replicas must be at least 1".into()));
        }
        for (key, v) in [("scale_h", self.scale_h), ("scale_k", self.scale_k)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("{key} must be positive, got {v}")));
                }
            }
        }
        if self.n_cap == Some(0) {
            return Err(Error::Config("n_cap must be at least 1".into()));
        }
        if self.thin == Some(0) {
            return Err(Error::Config("thin must be at least 1".into()));
        }
        if self.mode == ModeName::Theory && (self.scale_h.is_some() || self.scale_k.is_some()) {
            return Err(Error::Config("scale_h/scale_k only apply in practical mode".into()));
        }
        let needs_target = !matches!(self.command, Command::CheckAnnealingBounds);
        if needs_target && self.target.is_none() {
            return Err(Error::Config(format!("command {} needs a target", self.command.name())));
        }
        Ok(())
    }

    /// Pipeline whose defaults apply: the command's, or the one implied by
    /// the target for `dump-plan` and `cov-experiment`.
    pub fn pipeline(&self) -> PipelineKind {
        self.command.pipeline().unwrap_or_else(|| match &self.target {
            Some(t) if t.is_potential() => PipelineKind::Logconcave,
            _ => PipelineKind::Uniform,
        })
    }

    /// Fills per-command defaults.
    pub fn resolve(mut self) -> Self {
        let kind = self.pipeline();
        if self.mode == ModeName::Practical {
            if let Mode::Practical { scale_h, scale_k, n_cap } = kind.default_mode() {
                self.scale_h.get_or_insert(scale_h);
                self.scale_k.get_or_insert(scale_k);
                self.n_cap.get_or_insert(n_cap);
            }
        }
        self.final_samples.get_or_insert(DEFAULT_FINAL_SAMPLES);
        self.thin.get_or_insert(kind.default_thin());
        if self.command == Command::CheckAnnealingBounds {
            self.bound_cases.get_or_insert(DEFAULT_BOUND_CASES);
        }
        self
    }

    pub fn mode(&self) -> Mode {
        match self.mode {
            ModeName::Theory => Mode::Theory,
            ModeName::Practical => {
                let Mode::Practical { scale_h, scale_k, n_cap } = self.pipeline().default_mode() else {
                    unreachable!("default modes are practical")
                };
                Mode::Practical {
                    scale_h: self.scale_h.unwrap_or(scale_h),
                    scale_k: self.scale_k.unwrap_or(scale_k),
                    n_cap: self.n_cap.unwrap_or(n_cap),
                }
            }
        }
    }

    fn plan_settings_unchecked(&self) -> PlanSettings {
        PlanSettings { eta: self.eta, eps: self.eps, lambda: self.lambda, constants: self.constants, mode: Mode::Theory }
    }

    pub fn plan_settings(&self) -> PlanSettings {
        PlanSettings { mode: self.mode(), ..self.plan_settings_unchecked() }
    }
}

/// Command-line flags. Every flag overrides the same key of `--config`.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "lcsamp", version, about = "Proximal samplers for convex bodies and logconcave densities")]
pub struct CliArgs {
    /// JSON run config
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeName>,
    #[arg(long)]
    pub scale_h: Option<f64>,
    #[arg(long)]
    pub scale_k: Option<f64>,
    /// Practical cap on rejection attempts per backward step
    #[arg(long)]
    pub n_cap: Option<u64>,
    /// Target descriptor as inline JSON
    #[arg(long, value_name = "JSON")]
    pub target: Option<String>,
    #[arg(long)]
    pub final_samples: Option<usize>,
    #[arg(long)]
    pub thin: Option<u64>,
    /// Report JSON path (default: stdout)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// CSV output path
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Print the annealing plan without sampling
    #[arg(long)]
    pub dump_plan: bool,
    #[arg(long)]
    pub replicas: Option<u32>,
    /// Leave wall-clock fields out of the report
    #[arg(long)]
    pub no_timestamp: bool,
}

fn read_config_file(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))? {
        Value::Object(m) => Ok(m),
        _ => Err(Error::Config(format!("{}: config must be a JSON object", path.display()))),
    }
}

/// Merges `--config` with the flags (flags win) and validates the result.
pub fn parse_config(args: &CliArgs) -> Result<RunConfig> {
    let mut m = match &args.config {
        Some(p) => read_config_file(p)?,
        None => Map::new(),
    };
    let mut set = |k: &str, v: Value| {
        m.insert(k.to_string(), v);
    };
    if let Some(c) = args.command {
        set("command", serde_json::to_value(c)?);
    }
    if let Some(v) = args.seed {
        set("seed", v.into());
    }
    if let Some(v) = args.eta {
        set("eta", v.into());
    }
    if let Some(v) = args.eps {
        set("eps", v.into());
    }
    if let Some(v) = args.mode {
        set("mode", serde_json::to_value(v)?);
    }
    if let Some(v) = args.scale_h {
        set("scale_h", v.into());
    }
    if let Some(v) = args.scale_k {
        set("scale_k", v.into());
    }
    if let Some(v) = args.n_cap {
        set("n_cap", v.into());
    }
    if let Some(t) = &args.target {
        let v: Value = serde_json::from_str(t).map_err(|e| Error::Config(format!("--target: {e}")))?;
        set("target", v);
    }
    if let Some(v) = args.final_samples {
        set("final_samples", v.into());
    }
    if let Some(v) = args.thin {
        set("thin", v.into());
    }
    if let Some(p) = &args.out {
        set("out", p.to_string_lossy().into_owned().into());
    }
    if let Some(p) = &args.csv {
        set("csv", p.to_string_lossy().into_owned().into());
    }
    if args.dump_plan {
        set("dump_plan", true.into());
    }
    if let Some(v) = args.replicas {
        set("replicas", v.into());
    }
    if args.no_timestamp {
        set("timestamp", false.into());
    }
    Ok(RunConfig::from_value(Value::Object(m))?.resolve())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn cube(n: usize) -> Value {
        json!({"kind": "axis_box", "n": n, "params": {"half_width": 1.0}})
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_value(json!({"command": "sample-uniform", "seed": 3, "target": cube(2)}))
            .unwrap()
            .resolve();
        assert_eq!(cfg.mode, ModeName::Practical);
        assert_eq!(cfg.constants, Constants::default());
        assert_eq!((cfg.eta, cfg.eps), (0.1, 0.1));
        assert_eq!(cfg.mode(), PipelineKind::Uniform.default_mode());
        assert_eq!(cfg.thin, Some(PipelineKind::Uniform.default_thin()));
    }

    #[test]
    fn eta_out_of_range() {
        let err = RunConfig::from_value(json!({"command": "dump-plan", "seed": 1, "eta": 1.5, "target": cube(2)}))
            .unwrap_err()
            .to_string();
        assert!(err.contains("eta out of range"), "{err}");
    }

    #[test]
    fn unknown_and_missing_keys_are_named() {
        let err = RunConfig::from_value(json!({"command": "dump-plan", "seed": 1, "target": cube(2), "etaa": 0.1}))
            .unwrap_err()
            .to_string();
        assert!(err.contains("etaa"), "{err}");
        let err = RunConfig::from_value(json!({"command": "dump-plan", "target": cube(2)})).unwrap_err().to_string();
        assert!(err.contains("seed"), "{err}");
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        let file = json!({"command": "sample-uniform", "seed": 5, "eta": 0.2, "target": cube(3)});
        std::fs::write(&path, file.to_string()).unwrap();
        let args = CliArgs { config: Some(path), eta: Some(0.05), seed: Some(9), ..Default::default() };
        let cfg = parse_config(&args).unwrap();
        assert_eq!((cfg.eta, cfg.seed), (0.05, 9));
        assert_eq!(cfg.target.unwrap().n, 3);
    }

    #[test]
    fn theory_mode_rejects_scales() {
        let v = json!({"command": "dump-plan", "seed": 1, "target": cube(2), "mode": "theory", "scale_h": 2.0});
        assert!(RunConfig::from_value(v).is_err());
    }

    #[test]
    fn logconcave_defaults_follow_the_target() {
        let t = json!({"kind": "potential_quadratic", "n": 2, "params": {}});
        let cfg = RunConfig::from_value(json!({"command": "dump-plan", "seed": 1, "target": t})).unwrap().resolve();
        assert_eq!(cfg.pipeline(), PipelineKind::Logconcave);
        assert_eq!(cfg.mode(), PipelineKind::Logconcave.default_mode());
    }
}
