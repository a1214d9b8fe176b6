//! Configuration, sampling, parallel dispatch and reporting around
//! [`fockrel_core`].
//!
//! The binary wraps [`run_check_command`] and [`run_sweep_command`]; the
//! library form exists so tests and other tools can drive the same paths.

pub mod config;
pub mod error;
pub mod report;
pub mod runner;
pub mod sampling;

use std::path::Path;

use fockrel_core::checks::CheckKind;

use config::{resolve, resolve_settings, RunConfig};
use error::RunError;
use report::{Report, RunInfo};
use runner::{run_all, Outcome};
use sampling::sample_family;

pub use fockrel_core as core;

/// A finished run: the report plus whether every outcome was acceptable.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub report: Report,
    pub all_ok: bool,
}

fn finish(run: RunInfo, outcomes: &[Outcome]) -> RunResult {
    RunResult {
        report: Report::new(run, outcomes),
        all_ok: outcomes.iter().all(Outcome::ok),
    }
}

fn names(checks: &[CheckKind]) -> Vec<String> {
    checks.iter().map(|k| k.name().to_string()).collect()
}

/// Runs the configured checks on the configured triples.
pub fn run_check_command(config: &RunConfig, max_n: usize) -> Result<RunResult, RunError> {
    let resolved = resolve(config, max_n)?;
    if resolved.checks.is_empty() {
        return Err(RunError::config("no checks selected"));
    }
    guard_stability_truncation(&resolved.checks, &resolved.check_config, max_n)?;
    let expect = |k: CheckKind| resolved.expect_fail.contains(&k);
    let outcomes = run_all(&resolved.sets, &resolved.checks, &expect, &resolved.check_config)?;
    let run = RunInfo {
        truncation: resolved.check_config.truncation,
        budget: resolved.check_config.budget,
        seed: None,
        family: None,
        checks: names(&resolved.checks),
    };
    Ok(finish(run, &outcomes))
}

/// Samples the sweep family and runs its matched checks (or the configured
/// ones).
pub fn run_sweep_command(config: &RunConfig, max_n: usize) -> Result<RunResult, RunError> {
    let sweep = config
        .sweep
        .clone()
        .ok_or_else(|| RunError::config("the config has no `sweep` block"))?;
    let check_config = resolve_settings(config, max_n)?;
    // reuse the record checks for names only
    let names_only = RunConfig {
        triples: Vec::new(),
        conjugations: Vec::new(),
        ..config.clone()
    };
    let resolved = resolve(&names_only, max_n)?;
    let checks = if resolved.checks.is_empty() {
        sweep.family.matched_checks()
    } else {
        resolved.checks.clone()
    };
    guard_stability_truncation(&checks, &check_config, max_n)?;
    let sets = sample_family(sweep.family, sweep.count, sweep.seed, sweep.magnitude_cap, sweep.order)?;
    for (i, set) in sets.iter().enumerate() {
        if check_config.budget + set.triple.order > check_config.truncation {
            return Err(RunError::config(format!(
                "sample #{i}: budget {} + m = {} exceeds N = {}",
                check_config.budget, set.triple.order, check_config.truncation
            )));
        }
        if set.conjugation.is_none() && checks.iter().any(|k| k.needs_conjugation()) {
            return Err(RunError::config(format!(
                "family `{}` carries no conjugation for the selected checks",
                sweep.family.name()
            )));
        }
    }
    let expect = |k: CheckKind| resolved.expect_fail.contains(&k);
    let outcomes = run_all(&sets, &checks, &expect, &check_config)?;
    let run = RunInfo {
        truncation: check_config.truncation,
        budget: check_config.budget,
        seed: Some(sweep.seed),
        family: Some(sweep.family.name().to_string()),
        checks: names(&checks),
    };
    Ok(finish(run, &outcomes))
}

/// Checks comparing two truncations also build at `N + step`.
fn guard_stability_truncation(
    checks: &[CheckKind],
    cfg: &fockrel_core::checks::CheckConfig,
    max_n: usize,
) -> Result<(), RunError> {
    let larger = cfg.truncation + cfg.step;
    let uses_larger = checks
        .iter()
        .any(|k| matches!(k, CheckKind::Adjoint | CheckKind::LowerBound | CheckKind::Boundedness));
    if uses_larger && larger > max_n {
        return Err(RunError::Overflow(format!(
            "stability comparison needs N = {larger}, above the cap {max_n}"
        )));
    }
    Ok(())
}

/// Writes `text` to `path`.
pub fn write_file(path: &Path, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })
}
