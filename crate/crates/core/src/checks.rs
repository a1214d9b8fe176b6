//! Verification procedures.
//!
//! Each check builds the relevant relations for one symbol triple, measures a
//! handful of named quantities and compares them against declared bounds.
//! A report `passed` exactly when every bounded metric is within its bound.
//! Checks backed by a classifier also record whether the outcome agrees with
//! the classifier's prediction (`consistent`): a positive prediction must
//! pass, a negative one must miss by at least `fail_factor` times the
//! tolerance.
//!
//! Pairing identities between closed-form generators are exact up to
//! rounding; graph-level comparisons between a truncated relation and an
//! adjoint are approximate, since truncation and adjoint do not commute for
//! relations. Every threshold is a numerical policy choice and can be
//! overridden by name.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{inner, kernel_vector, sup_m_estimate, vanishing_subspace, FockVector, KernelSpec};
use crate::linalg::{max_principal_angle, project, subspace_equal, CMatrix, Subspace};
use crate::relation::{apply_operator, RelationPair};
use crate::symbols::{
    build_smax, build_smax_adjoint, classify_bounded_domain_condition, classify_c_selfadjoint, classify_hermitian,
    classify_unitary, conjugation_matrix, smax_adjoint_generators, smax_generators, validate_conjugation, wco_matrix,
    ClassificationResult, ConjugationParams, SymbolTriple,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Nine sample points: the origin, `±0.5`, `±0.5i` and `±0.5 ± 0.5i`.
pub const TEST_GRID: [Complex64; 9] = [
    Complex64::new(0.0, 0.0),
    Complex64::new(0.5, 0.0),
    Complex64::new(-0.5, 0.0),
    Complex64::new(0.0, 0.5),
    Complex64::new(0.0, -0.5),
    Complex64::new(0.5, 0.5),
    Complex64::new(0.5, -0.5),
    Complex64::new(-0.5, 0.5),
    Complex64::new(-0.5, -0.5),
];

/// Below this, differences between two angles are rounding noise.
pub const ANGLE_FLOOR: f64 = 1e-12;

/// Named numerical thresholds used by the checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Principal-angle bound for exact subspace identities.
    pub subspace: f64,
    /// Principal-angle bound for the domain comparison.
    pub domain: f64,
    /// Minimum relative residual of an excluded kernel vector.
    pub exclusion: f64,
    /// Pairing identity bound, relative to the product of graph norms.
    pub pairing: f64,
    /// Principal-angle bound for approximate graph comparisons.
    pub graph_angle: f64,
    /// Principal-angle bound for the hermitian graph equality.
    pub hermitian_angle: f64,
    /// Entrywise bound for closed-form matrix identities.
    pub matrix_identity: f64,
    /// Entrywise bound for the leading block of `MᴴM − I`.
    pub unitary_block: f64,
    /// Minimum expansive lower bound.
    pub lower_bound: f64,
    /// Allowed relative change of the lower bound between truncations.
    pub lower_stability: f64,
    /// Allowed relative drift of the relation norm between truncations.
    pub norm_drift: f64,
    /// Negative predictions must violate a bound by this factor.
    pub fail_factor: f64,
    /// Minimum principal angle witnessing a failed graph equality.
    pub separation_angle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            subspace: 1e-10,
            domain: 1e-8,
            exclusion: 1e-3,
            pairing: 1e-8,
            graph_angle: 1e-3,
            hermitian_angle: 1e-6,
            matrix_identity: 1e-10,
            unitary_block: 1e-6,
            lower_bound: 1e-6,
            lower_stability: 0.2,
            norm_drift: 0.05,
            fail_factor: 10.0,
            separation_angle: 1e-3,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 13] = [
        "subspace",
        "domain",
        "exclusion",
        "pairing",
        "graph_angle",
        "hermitian_angle",
        "matrix_identity",
        "unitary_block",
        "lower_bound",
        "lower_stability",
        "norm_drift",
        "fail_factor",
        "separation_angle",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "subspace" => &mut self.subspace,
            "domain" => &mut self.domain,
            "exclusion" => &mut self.exclusion,
            "pairing" => &mut self.pairing,
            "graph_angle" => &mut self.graph_angle,
            "hermitian_angle" => &mut self.hermitian_angle,
            "matrix_identity" => &mut self.matrix_identity,
            "unitary_block" => &mut self.unitary_block,
            "lower_bound" => &mut self.lower_bound,
            "lower_stability" => &mut self.lower_stability,
            "norm_drift" => &mut self.norm_drift,
            "fail_factor" => &mut self.fail_factor,
            "separation_angle" => &mut self.separation_angle,
            _ => return None,
        })
    }

    /// Overrides one threshold; unknown names and non-positive values fail.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if value <= 0.0 || !value.is_finite() {
            return Err(Error::InvalidTolerance(value));
        }
        match self.slot(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::Precondition(format!("unknown tolerance name `{name}`"))),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.clone().slot(name).map(|v| *v)
    }
}

/// Shared settings for a batch of checks.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    pub truncation: usize,
    pub budget: usize,
    pub tolerances: Tolerances,
    pub rank_tol: f64,
    /// Half-width of the square sampled by the boundedness check.
    pub radius: f64,
    /// Lattice points per side for the boundedness check.
    pub grid: usize,
    /// Truncation increase for stability comparisons.
    pub step: usize,
}

impl CheckConfig {
    pub fn new(truncation: usize) -> Self {
        Self {
            truncation,
            budget: truncation / 2,
            tolerances: Tolerances::default(),
            rank_tol: crate::linalg::DEFAULT_RANK_TOL,
            radius: 2.0,
            grid: 21,
            step: 10,
        }
    }

    fn next_truncation(&self) -> usize {
        self.truncation + self.step
    }

    /// Budget at the larger truncation, keeping the default `N/2` ratio.
    fn next_budget(&self) -> usize {
        self.budget + self.step / 2
    }
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self::new(40)
    }
}

/// How a metric is judged.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Equals(f64),
    /// Reported only.
    Info,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metric {
    pub value: f64,
    pub bound: Bound,
}

impl Metric {
    pub fn within(&self) -> bool {
        match self.bound {
            Bound::AtMost(b) => self.value <= b,
            Bound::AtLeast(b) => self.value >= b,
            Bound::Equals(b) => self.value == b,
            Bound::Info => true,
        }
    }
}

/// Result of one check on one parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub check_name: String,
    /// Identifier of the statement being verified.
    pub claim: &'static str,
    pub triple: SymbolTriple,
    pub conjugation: Option<ConjugationParams>,
    pub truncation: usize,
    pub degree_budget: usize,
    pub metrics: BTreeMap<String, Metric>,
    /// Every bounded metric is within its bound.
    pub passed: bool,
    /// The main threshold of the check.
    pub tolerance_used: f64,
    /// Classifier verdict, when the check has one.
    pub classification: Option<ClassificationResult>,
    /// Whether the classifier predicted a pass (`None`: no prediction).
    pub predicted: Option<bool>,
    /// Outcome agrees with the prediction (always true without one).
    pub consistent: bool,
    pub notes: Vec<String>,
}

struct ReportBuilder {
    report: CheckReport,
}

impl ReportBuilder {
    fn new(kind: CheckKind, t: &SymbolTriple, p: Option<&ConjugationParams>, cfg: &CheckConfig, tol: f64) -> Self {
        Self {
            report: CheckReport {
                check_name: kind.name().to_string(),
                claim: kind.claim(),
                triple: *t,
                conjugation: p.copied(),
                truncation: cfg.truncation,
                degree_budget: cfg.budget,
                metrics: BTreeMap::new(),
                passed: false,
                tolerance_used: tol,
                classification: None,
                predicted: None,
                consistent: true,
                notes: Vec::new(),
            },
        }
    }

    fn metric(&mut self, name: &str, value: f64, bound: Bound) -> &mut Self {
        self.report.metrics.insert(name.to_string(), Metric { value, bound });
        self
    }

    fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.report.notes.push(text.into());
        self
    }

    fn value(&self, name: &str) -> f64 {
        self.report.metrics[name].value
    }

    fn finish(mut self) -> CheckReport {
        self.report.passed = self.report.metrics.values().all(Metric::within);
        self.report
    }
}

/// The available checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    MultivaluedPart,
    DomainClosure,
    Adjoint,
    CSelfadjoint,
    Hermitian,
    Unitary,
    LowerBound,
    Boundedness,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::MultivaluedPart,
        CheckKind::DomainClosure,
        CheckKind::Adjoint,
        CheckKind::CSelfadjoint,
        CheckKind::Hermitian,
        CheckKind::Unitary,
        CheckKind::LowerBound,
        CheckKind::Boundedness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::MultivaluedPart => "multivalued_part",
            CheckKind::DomainClosure => "domain_closure",
            CheckKind::Adjoint => "adjoint",
            CheckKind::CSelfadjoint => "c_selfadjoint",
            CheckKind::Hermitian => "hermitian",
            CheckKind::Unitary => "unitary",
            CheckKind::LowerBound => "lower_bound",
            CheckKind::Boundedness => "boundedness",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Identifier of the verified statement, carried into reports.
    pub fn claim(self) -> &'static str {
        match self {
            CheckKind::MultivaluedPart => "multivalued-part-equals-low-degree-polynomials",
            CheckKind::DomainClosure => "domain-closure-is-vanishing-subspace",
            CheckKind::Adjoint => "adjoint-closed-form",
            CheckKind::CSelfadjoint => "conjugation-selfadjoint-characterization",
            CheckKind::Hermitian => "hermitian-characterization",
            CheckKind::Unitary => "unitary-characterization",
            CheckKind::LowerBound => "expansive-lower-bound",
            CheckKind::Boundedness => "boundedness-sufficient-condition",
        }
    }

    pub fn needs_conjugation(self) -> bool {
        matches!(self, CheckKind::Adjoint | CheckKind::CSelfadjoint)
    }
}

/// Runs `kind` on one parameter set.
pub fn run_check(
    kind: CheckKind,
    t: &SymbolTriple,
    p: Option<&ConjugationParams>,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let need = |p: Option<&ConjugationParams>| {
        p.copied()
            .ok_or_else(|| Error::Precondition(format!("check `{}` needs conjugation parameters", kind.name())))
    };
    match kind {
        CheckKind::MultivaluedPart => check_multivalued_part(t, cfg),
        CheckKind::DomainClosure => check_domain_closure(t, cfg),
        CheckKind::Adjoint => check_adjoint(t, &need(p)?, cfg),
        CheckKind::CSelfadjoint => check_c_selfadjoint(t, &need(p)?, cfg),
        CheckKind::Hermitian => check_hermitian(t, cfg),
        CheckKind::Unitary => check_unitary(t, cfg),
        CheckKind::LowerBound => check_lower_bound(t, cfg),
        CheckKind::Boundedness => check_boundedness(t, cfg),
    }
}

/// `max |⟨g, S u⟩ − ⟨f, S v⟩| / (‖(f,g)‖·‖(u,v)‖)` over `left × right`, where
/// `S` is the identity or `v ↦ M·conj(v)`.
pub fn pairing_violation(left: &[RelationPair], right: &[RelationPair], op: Option<&CMatrix>) -> Result<f64> {
    let mapped: Vec<(FockVector, FockVector, f64)> = right
        .iter()
        .map(|q| {
            let norm = q.graph_norm();
            match op {
                None => Ok((q.f.clone(), q.g.clone(), norm)),
                Some(m) => Ok((
                    FockVector::from_cvector(apply_operator(m, q.f.as_cvector(), true)?)?,
                    FockVector::from_cvector(apply_operator(m, q.g.as_cvector(), true)?)?,
                    norm,
                )),
            }
        })
        .collect::<Result<_>>()?;
    let mut worst = 0.0_f64;
    for p in left {
        let pn = p.graph_norm();
        for (su, sv, qn) in &mapped {
            let scale = pn * qn;
            if scale == 0.0 {
                continue;
            }
            let gap = (inner(&p.g, su)? - inner(&p.f, sv)?).norm();
            worst = worst.max(gap / scale);
        }
    }
    Ok(worst)
}

fn classified(b: &mut ReportBuilder, c: ClassificationResult) -> bool {
    let yes = c.matches();
    b.report.predicted = Some(yes);
    if !yes {
        b.note(format!("classifier: {}", c.witness));
    }
    b.report.classification = Some(c);
    yes
}

/// The multivalued part is spanned by `e_0..e_{m−1}`.
pub fn check_multivalued_part(t: &SymbolTriple, cfg: &CheckConfig) -> Result<CheckReport> {
    let tol = cfg.tolerances.subspace;
    let mut b = ReportBuilder::new(CheckKind::MultivaluedPart, t, None, cfg, tol);
    let smax = build_smax(t, cfg.truncation, cfg.budget)?;
    let mv = smax.multivalued_part();
    let target = Subspace::coordinate(cfg.truncation + 1, 0..t.order);
    let angle = max_principal_angle(&mv, &target)?;
    b.metric("multivalued_dim", mv.dim() as f64, Bound::Equals(t.order as f64))
        .metric("multivalued_angle", angle, Bound::AtMost(tol));
    Ok(b.finish())
}

/// The domain is the vanishing subspace at the forced root (restricted to
/// the degree budget) and low-order kernels at that root stay outside it.
pub fn check_domain_closure(t: &SymbolTriple, cfg: &CheckConfig) -> Result<CheckReport> {
    let tol = cfg.tolerances.domain;
    let n = cfg.truncation;
    let mut b = ReportBuilder::new(CheckKind::DomainClosure, t, None, cfg, tol);
    let smax = build_smax(t, n, cfg.budget)?;
    let domain = smax.domain();
    let top_degree = cfg.budget + t.order;
    let target = match t.forced_root() {
        Some(w0) => vanishing_subspace(t.order, w0, top_degree)?.embed(n + 1)?,
        None => {
            b.note("no root is forced: the domain is all polynomials up to the budget");
            Subspace::coordinate(n + 1, 0..=cfg.budget)
        }
    };
    let angle = max_principal_angle(&domain, &target)?;
    b.metric("domain_dim", domain.dim() as f64, Bound::Equals(target.dim() as f64))
        .metric("domain_angle", angle, Bound::AtMost(tol));
    if let Some(w0) = t.forced_root() {
        let closure = vanishing_subspace(t.order, w0, n)?;
        let mut worst = f64::INFINITY;
        for z in TEST_GRID {
            for k in 0..t.order {
                let kv = kernel_vector(&KernelSpec { z, a: ONE, b: -w0, k }, n)?;
                let v = kv.as_cvector();
                let resid = v.sub(&project(&closure, v)?)?.norm() / v.norm();
                worst = worst.min(resid);
            }
        }
        b.metric(
            "min_exclusion_residual",
            worst,
            Bound::AtLeast(cfg.tolerances.exclusion),
        );
    }
    Ok(b.finish())
}

/// The closed-form adjoint pairs with the maximal relation, contains the
/// kernel pairs, and sits inside the numerical adjoint of the truncation.
pub fn check_adjoint(t: &SymbolTriple, p: &ConjugationParams, cfg: &CheckConfig) -> Result<CheckReport> {
    let tols = &cfg.tolerances;
    let n = cfg.truncation;
    let mut b = ReportBuilder::new(CheckKind::Adjoint, t, Some(p), cfg, tols.pairing);
    let smax = smax_generators(t, n, cfg.budget)?;
    let hat = smax_adjoint_generators(t, p, n, cfg.budget)?;
    let s_pairs = smax.all_pairs();
    b.metric(
        "pairing_violation",
        pairing_violation(&s_pairs, &hat.all_pairs(), None)?,
        Bound::AtMost(tols.pairing),
    );

    let mut kernel_pairs = Vec::with_capacity(TEST_GRID.len());
    for z in TEST_GRID {
        let u = kernel_vector(&KernelSpec::derivative(z, t.order), n)?.scaled(t.factor(z).conj());
        let v = kernel_vector(&KernelSpec::derivative(t.map(z), 0), n)?.scaled(t.weight(z).conj());
        kernel_pairs.push(RelationPair::new(u, v)?);
    }
    b.metric(
        "kernel_pair_violation",
        pairing_violation(&s_pairs, &kernel_pairs, None)?,
        Bound::AtMost(tols.pairing),
    );

    let angle = containment_angle(t, p, n, cfg.budget, cfg.rank_tol)?;
    let next = containment_angle(t, p, cfg.next_truncation(), cfg.budget, cfg.rank_tol)?;
    b.metric("graph_angle", angle, Bound::AtMost(tols.graph_angle))
        .metric("graph_angle_next", next, Bound::Info)
        .metric(
            "graph_angle_increase",
            (next - (1.1 * angle).max(ANGLE_FLOOR)).max(0.0),
            Bound::AtMost(0.0),
        )
        .note("graph angles compare a truncation with an adjoint and are approximate");

    if t.order == 0 {
        let w = wco_matrix(t.weight_scale, t.weight_rate, t.map_slope, t.map_offset, n)?;
        let w_hat = wco_matrix(
            t.weight_scale.conj(),
            t.map_offset.conj(),
            t.map_slope.conj(),
            t.weight_rate.conj(),
            n,
        )?;
        b.metric(
            "matrix_identity_error",
            w_hat.max_abs_diff(&w.adjoint()),
            Bound::AtMost(tols.matrix_identity),
        );
    }
    Ok(b.finish())
}

/// Largest principal angle between the closed-form adjoint graph and the
/// numerical adjoint of the truncated maximal relation (the former is the
/// smaller space, so this measures containment).
fn containment_angle(
    t: &SymbolTriple,
    p: &ConjugationParams,
    truncation: usize,
    budget: usize,
    rank_tol: f64,
) -> Result<f64> {
    let numeric = smax_generators(t, truncation, budget)?.to_relation(rank_tol)?.adjoint();
    let closed = smax_adjoint_generators(t, p, truncation, budget)?.to_relation(rank_tol)?;
    max_principal_angle(closed.graph(), numeric.graph())
}

/// Conjugation-selfadjointness: the conjugated pairing vanishes on the
/// generators and the maximal relation lies in its transported adjoint.
pub fn check_c_selfadjoint(t: &SymbolTriple, p: &ConjugationParams, cfg: &CheckConfig) -> Result<CheckReport> {
    let tols = &cfg.tolerances;
    let n = cfg.truncation;
    let mut b = ReportBuilder::new(CheckKind::CSelfadjoint, t, Some(p), cfg, tols.pairing);
    let predicted = classified(&mut b, classify_c_selfadjoint(t, p));
    let m = conjugation_matrix(p, n)?;
    let gens = smax_generators(t, n, cfg.budget)?;
    let pairs = gens.all_pairs();
    b.metric(
        "c_pairing_violation",
        pairing_violation(&pairs, &pairs, Some(&m))?,
        Bound::AtMost(tols.pairing),
    );
    let smax = gens.to_relation(cfg.rank_tol)?;
    let transported = smax.s_adjoint(&m, true)?;
    b.metric(
        "c_graph_angle",
        max_principal_angle(smax.graph(), transported.graph())?,
        Bound::AtMost(tols.graph_angle),
    );
    let violation = b.value("c_pairing_violation");
    b.report.consistent = if predicted {
        true
    } else {
        violation >= tols.fail_factor * tols.pairing
    };
    let mut report = b.finish();
    if predicted {
        report.consistent = report.passed;
    }
    Ok(report)
}

/// Hermitian symmetry of the maximal relation, graph equality at full
/// budget, and the derived conjugation for hermitian triples.
pub fn check_hermitian(t: &SymbolTriple, cfg: &CheckConfig) -> Result<CheckReport> {
    let tols = &cfg.tolerances;
    let n = cfg.truncation;
    let mut b = ReportBuilder::new(CheckKind::Hermitian, t, None, cfg, tols.pairing);
    let predicted = classified(&mut b, classify_hermitian(t));
    let gens = smax_generators(t, n, cfg.budget)?;
    let pairs = gens.all_pairs();
    b.metric(
        "pairing_violation",
        pairing_violation(&pairs, &pairs, None)?,
        Bound::AtMost(tols.pairing),
    );

    // every input degree up to N: the truncated graph then has dimension N + 1
    let full = build_smax(t, n, n - t.order)?;
    let cmp = full.is_hermitian(tols.hermitian_angle)?;
    b.metric("hermitian_angle", cmp.max_angle, Bound::AtMost(tols.hermitian_angle))
        .metric(
            "adjoint_graph_dim",
            cmp.dim_left as f64,
            Bound::Equals(cmp.dim_right as f64),
        )
        .note(format!("graph equality measured with degree budget {}", n - t.order));

    if predicted {
        let conj = corollary_conjugation(t)?;
        let m = conjugation_matrix(&conj, n)?;
        b.metric(
            "corollary_c_pairing_violation",
            pairing_violation(&pairs, &pairs, Some(&m))?,
            Bound::AtMost(tols.pairing),
        );
        b.report.conjugation = Some(conj);
    }
    let violation = b.value("pairing_violation");
    let angle = b.value("hermitian_angle");
    let mut report = b.finish();
    report.consistent = if predicted {
        report.passed
    } else {
        violation >= tols.fail_factor * tols.pairing && angle >= tols.separation_angle
    };
    Ok(report)
}

/// `(conj(B)/B, 0, 1)`, or `(1, 0, 1)` when `B = 0`.
pub fn corollary_conjugation(t: &SymbolTriple) -> Result<ConjugationParams> {
    let b = t.map_offset;
    if b == ZERO {
        Ok(ConjugationParams::standard())
    } else {
        let a = b.conj() / b;
        validate_conjugation(a / a.norm(), ZERO, ONE)
    }
}

/// Unitarity: the leading block of `MᴴM` for order zero, single-valuedness
/// otherwise.
pub fn check_unitary(t: &SymbolTriple, cfg: &CheckConfig) -> Result<CheckReport> {
    let tols = &cfg.tolerances;
    let n = cfg.truncation;
    let mut b = ReportBuilder::new(CheckKind::Unitary, t, None, cfg, tols.unitary_block);
    let predicted = classified(&mut b, classify_unitary(t));
    if t.order == 0 {
        let w = wco_matrix(t.weight_scale, t.weight_rate, t.map_slope, t.map_offset, n)?;
        let k = n / 3;
        let gram = w.adjoint().matmul(&w)?.block(0, k, 0, k);
        b.metric(
            "gram_block_error",
            gram.max_abs_diff(&CMatrix::identity(k)),
            Bound::AtMost(tols.unitary_block),
        )
        .metric("block_size", k as f64, Bound::Info);
        let error = b.value("gram_block_error");
        let mut report = b.finish();
        report.consistent = if predicted {
            report.passed
        } else {
            error >= tols.fail_factor * tols.unitary_block
        };
        return Ok(report);
    }
    let smax = build_smax(t, n, cfg.budget)?;
    let mv = smax.multivalued_part().dim();
    let cmp = smax.is_unitary(tols.graph_angle)?;
    b.metric("multivalued_dim", mv as f64, Bound::Equals(0.0))
        .metric("unitary_graph_angle", cmp.max_angle, Bound::Info)
        .metric("adjoint_graph_dim", cmp.dim_left as f64, Bound::Info)
        .metric("inverse_graph_dim", cmp.dim_right as f64, Bound::Info)
        .note(format!(
            "multivalued part has dimension {mv}; a unitary relation satisfies A(0) = ran(A)^⊥ ∩ ran(A) = {{0}}"
        ));
    let mut report = b.finish();
    report.consistent = !predicted && !report.passed && !cmp.holds;
    Ok(report)
}

/// For `|A| > 1` the smallest ratio `‖g mod A(0)‖/‖f‖` is bounded away from
/// zero and stable under a larger truncation.
pub fn check_lower_bound(t: &SymbolTriple, cfg: &CheckConfig) -> Result<CheckReport> {
    let tols = &cfg.tolerances;
    let mut b = ReportBuilder::new(CheckKind::LowerBound, t, None, cfg, tols.lower_bound);
    let lb = build_smax(t, cfg.truncation, cfg.budget)?.lower_bound();
    let next = build_smax(t, cfg.next_truncation(), cfg.next_budget())?.lower_bound();
    let change = if lb > 0.0 {
        (next - lb).abs() / lb
    } else {
        f64::INFINITY
    };
    b.metric("lower_bound", lb, Bound::AtLeast(tols.lower_bound))
        .metric("lower_bound_next", next, Bound::Info)
        .metric("lower_bound_change", change, Bound::AtMost(tols.lower_stability));
    let expansive = t.map_slope.norm() > 1.0;
    let mut report = b.finish();
    if expansive {
        report.predicted = Some(true);
        report.consistent = report.passed;
    } else {
        report.notes.push("|A| ≤ 1: contrast case, no prediction".into());
    }
    Ok(report)
}

/// The weight `ψ·φ^m/ϕ` when it is entire.
fn boundedness_weight(t: &SymbolTriple) -> Option<Box<dyn Fn(Complex64) -> Complex64>> {
    let m = t.order as u32;
    let (a, b, e, f) = (t.map_slope, t.map_offset, t.factor_slope, t.factor_offset);
    let (c, d) = (t.weight_scale, t.weight_rate);
    if m == 0 || e == ZERO {
        let scale = if m == 0 { c } else { c / f.powu(m) };
        return Some(Box::new(move |z: Complex64| {
            scale * (d * z).exp() * (a * z + b).powu(m)
        }));
    }
    let cross = a * f - b * e;
    if cross.norm() > 1e-10 * (1.0 + (a * f).norm().max((b * e).norm())) {
        return None;
    }
    let scale = c * (a / e).powu(m);
    Some(Box::new(move |z: Complex64| scale * (d * z).exp()))
}

/// Sufficient condition for boundedness: the sup estimate, the branch of the
/// everywhere-defined criterion, and relation norms at two truncations.
pub fn check_boundedness(t: &SymbolTriple, cfg: &CheckConfig) -> Result<CheckReport> {
    let tols = &cfg.tolerances;
    let mut b = ReportBuilder::new(CheckKind::Boundedness, t, None, cfg, tols.norm_drift);
    let branch = classify_bounded_domain_condition(t);
    let branch_id = branch
        .diagnostics
        .iter()
        .find(|(k, _)| *k == "branch")
        .map_or(0.0, |(_, v)| *v);
    let predicted = classified(&mut b, branch);
    b.metric("branch", branch_id, Bound::Info);
    match boundedness_weight(t) {
        Some(w) => {
            let map = |z: Complex64| t.map(z);
            let near = sup_m_estimate(&w, &map, cfg.radius, cfg.grid)?;
            let far = sup_m_estimate(&w, &map, 2.0 * cfg.radius, cfg.grid)?;
            b.metric("weight_entire", 1.0, Bound::Info)
                .metric("sup_estimate", near, Bound::Info)
                .metric("sup_estimate_wide", far, Bound::Info)
                .note("sup estimates are grid lower bounds");
        }
        None => {
            b.metric("weight_entire", 0.0, Bound::Info)
                .note("ψ·φ^m/ϕ has a pole; the sufficient condition does not apply");
        }
    }
    let norm = build_smax(t, cfg.truncation, cfg.budget)?.relation_norm().value();
    let next = build_smax(t, cfg.next_truncation(), cfg.next_budget())?
        .relation_norm()
        .value();
    let drift = if norm > 0.0 { (next - norm).abs() / norm } else { 0.0 };
    b.metric("relation_norm", norm, Bound::Info)
        .metric("relation_norm_next", next, Bound::Info)
        .metric("norm_drift", drift, Bound::AtMost(tols.norm_drift));
    let mut report = b.finish();
    report.consistent = if predicted {
        report.passed
    } else {
        !report.passed && next > norm
    };
    Ok(report)
}

/// Whether `build_smax_adjoint` and the numerical adjoint agree on a square
/// truncation (used by tests of exact order-zero cases).
pub fn order_zero_adjoint_equal(t: &SymbolTriple, p: &ConjugationParams, truncation: usize, tol: f64) -> Result<bool> {
    let w = wco_matrix(t.weight_scale, t.weight_rate, t.map_slope, t.map_offset, truncation)?;
    let numeric = crate::relation::LinearRelation::from_matrix(&w, crate::linalg::DEFAULT_RANK_TOL)?.adjoint();
    let closed = build_smax_adjoint(t, p, truncation, truncation)?;
    subspace_equal(numeric.graph(), closed.graph(), tol)
}
