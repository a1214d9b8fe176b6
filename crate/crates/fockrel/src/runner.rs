//! Parallel dispatch of checks over parameter sets.

use fockrel_core::checks::{run_check, CheckConfig, CheckKind, CheckReport};
use fockrel_core::symbols::{ConjugationParams, SymbolTriple};
use rayon::prelude::*;

use crate::error::{from_core, RunError};

/// One triple and the conjugation used by checks that need one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParameterSet {
    pub triple: SymbolTriple,
    pub conjugation: Option<ConjugationParams>,
}

/// A report tagged with the position of its parameter set.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub set_index: usize,
    pub report: CheckReport,
    pub expect_fail: bool,
}

impl Outcome {
    /// A pass, or a failure that was declared expected.
    pub fn ok(&self) -> bool {
        self.report.passed != self.expect_fail
    }
}

/// Runs every check on every set. Results come back in set order, then
/// check order, regardless of scheduling.
pub fn run_all(
    sets: &[ParameterSet],
    checks: &[CheckKind],
    expect_fail: &(impl Fn(CheckKind) -> bool + Sync),
    cfg: &CheckConfig,
) -> Result<Vec<Outcome>, RunError> {
    let jobs: Vec<(usize, CheckKind)> = (0..sets.len())
        .flat_map(|i| checks.iter().map(move |&k| (i, k)))
        .collect();
    let results: Vec<Result<Outcome, RunError>> = jobs
        .par_iter()
        .map(|&(i, kind)| {
            let set = &sets[i];
            run_check(kind, &set.triple, set.conjugation.as_ref(), cfg)
                .map(|report| Outcome {
                    set_index: i,
                    report,
                    expect_fail: expect_fail(kind),
                })
                .map_err(|e| from_core(&format!("set #{i}, check `{}`", kind.name()), e))
        })
        .collect();
    results.into_iter().collect()
}
