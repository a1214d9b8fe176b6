//! JSON run configuration.
//!
//! Complex numbers are two-element arrays `[re, im]`. A minimal file:
//!
//! ```json
//! {
//!   "truncation": 40,
//!   "triples": [{"C": [1, 0], "D": [0, 0], "A": [1, 0], "B": [0, 0],
//!                "E": [1, 0], "F": [0, 0], "m": 1}],
//!   "checks": ["hermitian"]
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use fockrel_core::checks::{CheckConfig, CheckKind};
use fockrel_core::symbols::{validate_conjugation, ConjugationParams, SymbolTriple};
use fockrel_core::{c64, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::RunError;
use crate::runner::ParameterSet;
use crate::sampling::Family;

/// Environment variable capping the truncation order.
pub const MAX_N_VAR: &str = "FOCKREL_MAX_N";
pub const DEFAULT_MAX_N: usize = 80;
pub const MIN_TRUNCATION: usize = 4;
pub const MAX_MAGNITUDE_CAP: f64 = 2.0;

pub type Pair = [f64; 2];

fn complex(p: Pair) -> Complex64 {
    c64(p[0], p[1])
}

pub fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TripleRecord {
    #[serde(rename = "C")]
    pub weight_scale: Pair,
    #[serde(rename = "D")]
    pub weight_rate: Pair,
    #[serde(rename = "A")]
    pub map_slope: Pair,
    #[serde(rename = "B")]
    pub map_offset: Pair,
    #[serde(rename = "E")]
    pub factor_slope: Pair,
    #[serde(rename = "F")]
    pub factor_offset: Pair,
    #[serde(rename = "m", default)]
    pub order: usize,
    /// Index into `conjugations`; defaults to the first entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugation: Option<usize>,
}

impl TripleRecord {
    pub fn to_triple(&self) -> fockrel_core::Result<SymbolTriple> {
        SymbolTriple::new(
            complex(self.weight_scale),
            complex(self.weight_rate),
            complex(self.map_slope),
            complex(self.map_offset),
            complex(self.factor_slope),
            complex(self.factor_offset),
            self.order,
        )
    }

    pub fn from_triple(t: &SymbolTriple) -> Self {
        Self {
            weight_scale: pair(t.weight_scale),
            weight_rate: pair(t.weight_rate),
            map_slope: pair(t.map_slope),
            map_offset: pair(t.map_offset),
            factor_slope: pair(t.factor_slope),
            factor_offset: pair(t.factor_offset),
            order: t.order,
            conjugation: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConjugationRecord {
    pub a: Pair,
    pub b: Pair,
    pub c: Pair,
}

impl ConjugationRecord {
    pub fn to_params(&self) -> fockrel_core::Result<ConjugationParams> {
        validate_conjugation(complex(self.a), complex(self.b), complex(self.c))
    }

    pub fn from_params(p: &ConjugationParams) -> Self {
        Self {
            a: pair(p.rotation),
            b: pair(p.shift),
            c: pair(p.scale),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub magnitude_cap: f64,
    pub family: Family,
    /// Fixed order `m`; sampled per family when absent.
    #[serde(default)]
    pub order: Option<usize>,
}

fn default_count() -> usize {
    25
}

fn default_cap() -> f64 {
    1.0
}

fn default_truncation() -> usize {
    40
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    /// Defaults to `truncation / 2`.
    #[serde(default)]
    pub degree_budget: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub triples: Vec<TripleRecord>,
    #[serde(default)]
    pub conjugations: Vec<ConjugationRecord>,
    #[serde(default)]
    pub checks: Vec<String>,
    /// Checks whose failure is the expected outcome.
    #[serde(default)]
    pub expect_fail: Vec<String>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            truncation: default_truncation(),
            degree_budget: None,
            tolerances: BTreeMap::new(),
            triples: Vec::new(),
            conjugations: Vec::new(),
            checks: Vec::new(),
            expect_fail: Vec::new(),
            sweep: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text)
            .map_err(|e| RunError::config(format!("config is not valid JSON for this schema: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn budget(&self) -> usize {
        self.degree_budget.unwrap_or(self.truncation / 2)
    }
}

/// Command-line overrides applied on top of a file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub truncation: Option<usize>,
    pub budget: Option<usize>,
    pub tolerances: Vec<(String, f64)>,
    pub checks: Vec<String>,
    pub expect_fail: Vec<String>,
    pub seed: Option<u64>,
    pub count: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) {
        if let Some(n) = self.truncation {
            config.truncation = n;
        }
        if let Some(b) = self.budget {
            config.degree_budget = Some(b);
        }
        for (name, value) in &self.tolerances {
            config.tolerances.insert(name.clone(), *value);
        }
        if !self.checks.is_empty() {
            config.checks = self.checks.clone();
        }
        config.expect_fail.extend(self.expect_fail.iter().cloned());
        if let Some(sweep) = config.sweep.as_mut() {
            if let Some(seed) = self.seed {
                sweep.seed = seed;
            }
            if let Some(count) = self.count {
                sweep.count = count;
            }
        }
    }
}

/// Parses `name=value`.
pub fn parse_tolerance(arg: &str) -> Result<(String, f64), String> {
    let (name, value) = arg
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{arg}`"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("bad tolerance value in `{arg}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

/// Reads the truncation cap from the environment.
pub fn max_truncation() -> Result<usize, RunError> {
    match std::env::var(MAX_N_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| RunError::config(format!("{MAX_N_VAR} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

/// A validated configuration ready to run.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub check_config: CheckConfig,
    pub sets: Vec<ParameterSet>,
    pub checks: Vec<CheckKind>,
    pub expect_fail: BTreeSet<CheckKind>,
    pub sweep: Option<SweepConfig>,
}

fn check_names(names: &[String], what: &str, errors: &mut Vec<String>) -> Vec<CheckKind> {
    let mut out = Vec::new();
    for name in names {
        match CheckKind::from_name(name) {
            Some(k) if !out.contains(&k) => out.push(k),
            Some(_) => {}
            None => {
                let known: Vec<&str> = CheckKind::ALL.iter().map(|k| k.name()).collect();
                errors.push(format!("{what}: unknown check `{name}` (known: {})", known.join(", ")))
            }
        }
    }
    out
}

/// Settings and limits shared by every subcommand.
pub fn resolve_settings(config: &RunConfig, max_n: usize) -> Result<CheckConfig, RunError> {
    let n = config.truncation;
    if n > max_n {
        return Err(RunError::Overflow(format!(
            "truncation N = {n} exceeds the cap {max_n} set by {MAX_N_VAR}"
        )));
    }
    let mut errors = Vec::new();
    if n < MIN_TRUNCATION {
        errors.push(format!("truncation N = {n} must be at least {MIN_TRUNCATION}"));
    }
    let budget = config.budget();
    if budget > n {
        errors.push(format!("degree budget {budget} exceeds truncation N = {n}"));
    }
    let mut check_config = CheckConfig::new(n);
    check_config.budget = budget;
    for (name, value) in &config.tolerances {
        if let Err(e) = check_config.tolerances.set(name, *value) {
            errors.push(format!("tolerance `{name}`: {e}"));
        }
    }
    if let Some(sweep) = &config.sweep {
        if !(sweep.magnitude_cap > 0.0 && sweep.magnitude_cap <= MAX_MAGNITUDE_CAP) {
            errors.push(format!(
                "sweep magnitude cap {} must lie in (0, {MAX_MAGNITUDE_CAP}]",
                sweep.magnitude_cap
            ));
        }
        if let Some(m) = sweep.order {
            if budget + m > n {
                errors.push(format!("sweep order m = {m}: budget {budget} + m exceeds N = {n}"));
            }
        }
    }
    if errors.is_empty() {
        Ok(check_config)
    } else {
        Err(RunError::Config(errors))
    }
}

/// Validates every record and pairs each triple with its conjugation.
pub fn resolve(config: &RunConfig, max_n: usize) -> Result<Resolved, RunError> {
    let mut errors = Vec::new();
    // keep validating records after a settings error so every message is reported
    let check_config = match resolve_settings(config, max_n) {
        Ok(c) => c,
        Err(RunError::Config(msgs)) => {
            errors.extend(msgs);
            let mut fallback = CheckConfig::new(config.truncation);
            fallback.budget = config.budget().min(config.truncation);
            fallback
        }
        Err(e) => return Err(e),
    };
    let checks = check_names(&config.checks, "checks", &mut errors);
    let expect_fail = check_names(&config.expect_fail, "expect_fail", &mut errors)
        .into_iter()
        .collect();

    let conjugations: Vec<Option<ConjugationParams>> = config
        .conjugations
        .iter()
        .enumerate()
        .map(|(i, rec)| match rec.to_params() {
            Ok(p) => Some(p),
            Err(e) => {
                errors.push(format!("conjugation #{i}: {e}"));
                None
            }
        })
        .collect();

    let mut sets = Vec::with_capacity(config.triples.len());
    for (i, rec) in config.triples.iter().enumerate() {
        let triple = match rec.to_triple() {
            Ok(t) => t,
            Err(e) => {
                errors.push(format!("triple #{i}: {e}"));
                continue;
            }
        };
        if check_config.budget + triple.order > check_config.truncation {
            errors.push(format!(
                "triple #{i}: budget {} + m = {} exceeds N = {}",
                check_config.budget, triple.order, check_config.truncation
            ));
        }
        let conjugation = match rec.conjugation {
            Some(k) if k >= conjugations.len() => {
                errors.push(format!("triple #{i}: conjugation index {k} out of range"));
                None
            }
            Some(k) => conjugations[k],
            None => conjugations.first().copied().flatten(),
        };
        if conjugation.is_none() {
            for k in checks.iter().filter(|k| k.needs_conjugation()) {
                errors.push(format!("triple #{i}: check `{}` needs a valid conjugation", k.name()));
            }
        }
        sets.push(ParameterSet { triple, conjugation });
    }

    if errors.is_empty() {
        Ok(Resolved {
            check_config,
            sets,
            checks,
            expect_fail,
            sweep: config.sweep.clone(),
        })
    } else {
        Err(RunError::Config(errors))
    }
}
