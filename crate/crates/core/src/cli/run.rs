use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Command, RunConfig};
use crate::diagnostics::{
    cov_weight_experiment, default_annealing_cases, AnnealingCase, AnnealingCheckRow, CovExperimentConfig,
};
use crate::error::{usage, Error, Result};
use crate::geometry::{Body, Potential, TargetDescriptor};
use crate::pipelines::{plan_for, sample_cold, PipelineConfig, PipelineReport, TargetSpec};
use crate::rng::replica_seed;
use crate::schedule::PipelineKind;

pub const REPORT_SCHEMA: &str = "lcsamp/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
/// A sampler failure, or a bound check that did not hold.
pub const EXIT_FAILURE: i32 = 2;

/// The JSON report and the CSV body of one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub exit_code: i32,
    pub report: Value,
    pub csv: Option<String>,
}

/// Builds the pipeline target. Logconcave runs also accept a body
/// descriptor, read as its indicator potential.
pub fn target_spec(kind: PipelineKind, desc: &TargetDescriptor) -> Result<TargetSpec> {
    Ok(match kind {
        PipelineKind::Uniform => TargetSpec::UniformBody(body_of(desc)?),
        PipelineKind::StdGaussian => TargetSpec::TruncatedStdGaussian(body_of(desc)?),
        PipelineKind::Logconcave if desc.is_potential() => TargetSpec::Logconcave(desc.to_potential()?),
        PipelineKind::Logconcave => TargetSpec::Logconcave(Potential::indicator(&desc.to_body()?)?),
    })
}

fn body_of(desc: &TargetDescriptor) -> Result<Body> {
    if desc.is_potential() {
        return Err(usage(format!("'{}' is a potential; this command needs a body", desc.kind)));
    }
    desc.to_body()
}

fn target(cfg: &RunConfig) -> Result<&TargetDescriptor> {
    cfg.target.as_ref().ok_or_else(|| usage(format!("command {} needs a target", cfg.command.name())))
}

/// Executes `cfg` without touching the filesystem.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    let (exit_code, result, csv) = match cfg.command {
        Command::DumpPlan => dump_plan(cfg)?,
        Command::SampleUniform | Command::SampleGaussian | Command::SampleLogconcave if cfg.dump_plan => {
            dump_plan(cfg)?
        }
        Command::SampleUniform | Command::SampleGaussian | Command::SampleLogconcave => sample(cfg)?,
        Command::CheckAnnealingBounds => check_bounds(cfg)?,
        Command::CovExperiment => cov_experiment(cfg)?,
    };
    let mut report = json!({
        "schema": REPORT_SCHEMA,
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.name(),
        "config": cfg,
        "exit_code": exit_code,
        "result": result,
    });
    if cfg.timestamp {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        report["created_unix"] = now.into();
    }
    Ok(RunOutput { exit_code, report, csv })
}

/// Executes `cfg` and writes its report (to `out` or stdout) and CSV.
pub fn run_command(cfg: &RunConfig) -> Result<i32> {
    let out = execute(cfg)?;
    let text = serde_json::to_string_pretty(&out.report)? + "\n";
    match &cfg.out {
        Some(p) => write_file(p, &text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    match (&cfg.csv, &out.csv) {
        (Some(p), Some(body)) => write_file(p, body)?,
        (Some(_), None) => log::warn!("command {} has no CSV output", cfg.command.name()),
        _ => {}
    }
    Ok(out.exit_code)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

type CommandOutput = (i32, Value, Option<String>);

fn dump_plan(cfg: &RunConfig) -> Result<CommandOutput> {
    let spec = target_spec(cfg.pipeline(), target(cfg)?)?;
    let plan = plan_for(&spec, &cfg.plan_settings())?;
    let queries = match &spec {
        TargetSpec::UniformBody(b) | TargetSpec::TruncatedStdGaussian(b) => b.ledger().snapshot(),
        TargetSpec::Logconcave(p) => p.ledger().snapshot(),
    };
    Ok((EXIT_OK, json!({ "plan": plan, "queries": queries }), None))
}

fn pipeline_config(cfg: &RunConfig, seed: u64) -> PipelineConfig {
    PipelineConfig {
        settings: cfg.plan_settings(),
        seed,
        final_samples: cfg.final_samples.unwrap_or(super::config::DEFAULT_FINAL_SAMPLES),
        thin: cfg.thin.unwrap_or_else(|| cfg.pipeline().default_thin()),
        record_wall_time: cfg.timestamp,
    }
}

#[derive(Serialize)]
struct ReplicaSummary<'a> {
    replica: usize,
    seed: u64,
    report: &'a PipelineReport,
}

fn sample(cfg: &RunConfig) -> Result<CommandOutput> {
    let kind = cfg.pipeline();
    let desc = target(cfg)?;
    let seeds: Vec<u64> = (0..cfg.replicas as u64).map(|i| replica_seed(cfg.seed, i)).collect();
    // each replica builds its own target so query ledgers stay separate
    let reports: Vec<PipelineReport> = seeds
        .par_iter()
        .map(|&s| sample_cold(&target_spec(kind, desc)?, &pipeline_config(cfg, s)))
        .collect::<Result<_>>()?;
    let failed = reports.iter().any(|r| !r.succeeded());
    let csv = cfg.csv.as_ref().map(|_| samples_csv(&reports, cfg.replicas > 1));
    let strip = |r: &PipelineReport| {
        let mut r = r.clone();
        if cfg.csv.is_some() {
            r.samples.clear();
            r.epigraph_samples = r.epigraph_samples.map(|_| Vec::new());
        }
        r
    };
    let result = if cfg.replicas == 1 {
        serde_json::to_value(strip(&reports[0]))?
    } else {
        let stripped: Vec<PipelineReport> = reports.iter().map(strip).collect();
        let rows: Vec<ReplicaSummary> = stripped
            .iter()
            .enumerate()
            .map(|(i, r)| ReplicaSummary { replica: i, seed: r.seed, report: r })
            .collect();
        json!({ "replicas": rows })
    };
    Ok((if failed { EXIT_FAILURE } else { EXIT_OK }, result, csv))
}

/// One row per final sample; logconcave runs add the epigraph height `t`.
pub fn samples_csv(reports: &[PipelineReport], with_replica: bool) -> String {
    let mut s = String::new();
    let Some(first) = reports.iter().find(|r| !r.samples.is_empty()) else {
        return s;
    };
    let n = first.samples[0].len();
    let cols: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    if with_replica {
        s.push_str("replica,");
    }
    s.push_str(&cols.join(","));
    if first.epigraph_samples.is_some() {
        s.push_str(",t");
    }
    s.push('\n');
    for (ri, r) in reports.iter().enumerate() {
        for (j, x) in r.samples.iter().enumerate() {
            if with_replica {
                let _ = write!(s, "{ri},");
            }
            let fields: Vec<String> = x.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&fields.join(","));
            if let Some(epi) = &r.epigraph_samples {
                let _ = write!(s, ",{:.16e}", epi[j][n]);
            }
            s.push('\n');
        }
    }
    s
}

fn check_bounds(cfg: &RunConfig) -> Result<CommandOutput> {
    let cases = default_annealing_cases(cfg.seed, cfg.bound_cases.unwrap_or(super::config::DEFAULT_BOUND_CASES));
    let rows: Vec<AnnealingCheckRow> = cases.par_iter().map(AnnealingCase::check).collect::<Result<_>>()?;
    let all = rows.iter().all(|r| r.holds);
    let mut csv = String::from("lemma,q,alpha,parameter,quadrature,bound,holds\n");
    for r in &rows {
        let (lemma, q, alpha, param) = match &r.case {
            AnnealingCase::Global { q, alpha, delta, .. } => ("global", *q, *alpha, *delta),
            AnnealingCase::Variance { q, alpha, sigma2, .. } => ("variance", *q, *alpha, *sigma2),
        };
        let _ = writeln!(
            csv,
            "{lemma},{q:.16e},{alpha:.16e},{param:.16e},{:.16e},{:.16e},{}",
            r.quadrature, r.bound, r.holds
        );
    }
    let result = json!({ "all_hold": all, "rows": rows });
    Ok((if all { EXIT_OK } else { EXIT_FAILURE }, result, Some(csv)))
}

fn cov_experiment(cfg: &RunConfig) -> Result<CommandOutput> {
    let body = body_of(target(cfg)?)?;
    let o = cfg.cov.clone().unwrap_or_default();
    let grid = o.h_grid.unwrap_or_else(|| vec![0.01, 0.1, 1.0, 10.0, 100.0, 1000.0]);
    let mut ec = CovExperimentConfig::new(grid, cfg.seed);
    ec.c_env = cfg.constants.c_env;
    if let Some(v) = o.samples_per_h {
        ec.samples_per_h = v;
    }
    if let Some(v) = o.step_cap {
        ec.step_cap = v;
    }
    if let Some(v) = o.burn_in {
        ec.burn_in = v;
    }
    if let Some(v) = o.thin {
        ec.thin = v;
    }
    if let Some(v) = o.n_cap {
        ec.n_cap = v;
    }
    if let Some(v) = o.batches {
        ec.batches = v;
    }
    let exp = cov_weight_experiment(&body, &ec)?;
    let failed = exp.rows.iter().any(|r| r.failed);
    let csv = exp.to_csv();
    Ok((if failed { EXIT_FAILURE } else { EXIT_OK }, serde_json::to_value(&exp)?, Some(csv)))
}

/// Exit code for a library error.
pub fn exit_code_for(_e: &Error) -> i32 {
    EXIT_USAGE
}
