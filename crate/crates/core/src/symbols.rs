//! Closed-form constructors for weighted composition relations.
//!
//! The relations here are solution sets of
//!
//! ```text
//! ψ(z)·f(φ(z)) = ϕ(z)·g^(m)(z),   ψ(z) = C e^{Dz},  φ(z) = Az + B,  ϕ(z) = (Ez + F)^m
//! ```
//!
//! on the truncated Fock space, together with the weighted composition
//! conjugations `f ↦ c e^{bz} conj(f(conj(az + b)))` and algebraic
//! classifiers for the symbol families that make the maximal relation
//! hermitian, conjugation-selfadjoint, unitary or everywhere defined.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{kernel_vector, ln_factorial, taylor_to_fock, FockVector, KernelSpec, TaylorSeries};
use crate::linalg::{CMatrix, DEFAULT_RANK_TOL};
use crate::relation::{LinearRelation, RelationPair};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance for the exact algebraic conditions on parameters.
pub const PARAMETER_TOL: f64 = 1e-12;

/// Relative tolerance of the classifiers' algebraic identities.
pub const CLASSIFIER_TOL: f64 = 1e-10;

fn close(x: Complex64, y: Complex64, tol: f64) -> bool {
    (x - y).norm() <= tol * (1.0 + x.norm().max(y.norm()))
}

/// The default degree budget for a truncation `N`.
pub fn default_budget(truncation: usize) -> usize {
    truncation / 2
}

/// Parameters of `ψ(z) = C e^{Dz}`, `φ(z) = Az + B`, `ϕ(z) = (Ez + F)^m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolTriple {
    /// `C`, the constant factor of the weight.
    pub weight_scale: Complex64,
    /// `D`, the exponential rate of the weight.
    pub weight_rate: Complex64,
    /// `A`, the slope of the composition map.
    pub map_slope: Complex64,
    /// `B`, the offset of the composition map.
    pub map_offset: Complex64,
    /// `E`, the slope of the derivative factor.
    pub factor_slope: Complex64,
    /// `F`, the offset of the derivative factor.
    pub factor_offset: Complex64,
    /// `m`, the derivative order.
    pub order: usize,
}

impl SymbolTriple {
    /// Validates `C ≠ 0`, `A ≠ 0` and `(E, F) ≠ (0, 0)` when `m ≥ 1`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        c: Complex64,
        d: Complex64,
        a: Complex64,
        b: Complex64,
        e: Complex64,
        f: Complex64,
        m: usize,
    ) -> Result<Self> {
        let t = Self {
            weight_scale: c,
            weight_rate: d,
            map_slope: a,
            map_offset: b,
            factor_slope: e,
            factor_offset: f,
            order: m,
        };
        t.validate()?;
        Ok(t)
    }

    /// The triple with `E = a·A`, `F = a·B + b` for the conjugation `(a, b, c)`.
    pub fn adjoint_form(
        c: Complex64,
        d: Complex64,
        a: Complex64,
        b: Complex64,
        m: usize,
        conj: &ConjugationParams,
    ) -> Result<Self> {
        Self::new(c, d, a, b, conj.rotation * a, conj.rotation * b + conj.shift, m)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.weight_scale,
            self.weight_rate,
            self.map_slope,
            self.map_offset,
            self.factor_slope,
            self.factor_offset,
        ];
        if all.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        if self.weight_scale == ZERO {
            return Err(Error::InvalidSymbol("weight scale C must be nonzero".into()));
        }
        if self.map_slope == ZERO {
            return Err(Error::InvalidSymbol("map slope A must be nonzero".into()));
        }
        if self.order >= 1 && self.factor_slope == ZERO && self.factor_offset == ZERO {
            return Err(Error::InvalidSymbol(
                "factor (E, F) must not vanish when the order m is at least 1".into(),
            ));
        }
        Ok(())
    }

    /// `ψ(z)`.
    pub fn weight(&self, z: Complex64) -> Complex64 {
        self.weight_scale * (self.weight_rate * z).exp()
    }

    /// `φ(z)`.
    pub fn map(&self, z: Complex64) -> Complex64 {
        self.map_slope * z + self.map_offset
    }

    /// `ϕ(z) = (Ez + F)^m`.
    pub fn factor(&self, z: Complex64) -> Complex64 {
        (self.factor_slope * z + self.factor_offset).powu(self.order as u32)
    }

    /// Image under `φ` of the root of `ϕ`: every domain element must vanish
    /// to order `m` there. `None` when `m = 0` or `ϕ` is a nonzero constant.
    pub fn forced_root(&self) -> Option<Complex64> {
        if self.order == 0 || self.factor_slope == ZERO {
            None
        } else {
            Some(self.map_offset - self.map_slope * self.factor_offset / self.factor_slope)
        }
    }

    /// Whether `E = a·A` and `F = a·B + b` (vacuous for `m = 0`).
    pub fn is_adjoint_form(&self, conj: &ConjugationParams) -> bool {
        self.order == 0
            || (close(self.factor_slope, conj.rotation * self.map_slope, CLASSIFIER_TOL)
                && close(
                    self.factor_offset,
                    conj.rotation * self.map_offset + conj.shift,
                    CLASSIFIER_TOL,
                ))
    }

    fn require_adjoint_form(&self, conj: &ConjugationParams) -> Result<()> {
        if self.is_adjoint_form(conj) {
            Ok(())
        } else {
            Err(Error::Precondition(
                "triple is not in adjoint form: expected E = a·A and F = a·B + b".into(),
            ))
        }
    }
}

/// Parameters `(a, b, c)` of the conjugation `f ↦ c e^{bz} conj(f(conj(az + b)))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugationParams {
    /// `a`, unimodular.
    pub rotation: Complex64,
    /// `b`, with `conj(a)·b + conj(b) = 0`.
    pub shift: Complex64,
    /// `c`, with `|c|²·e^{|b|²} = 1`.
    pub scale: Complex64,
}

impl ConjugationParams {
    /// Coefficientwise conjugation `(1, 0, 1)`.
    pub fn standard() -> Self {
        Self {
            rotation: ONE,
            shift: ZERO,
            scale: ONE,
        }
    }

    /// The valid parameters `a = e^{iα}`, `b = r·e^{i(α+π)/2}`,
    /// `c = e^{−r²/2} e^{iγ}`; every valid triple has this form.
    pub fn from_angles(alpha: f64, r: f64, gamma: f64) -> Self {
        Self {
            rotation: Complex64::from_polar(1.0, alpha),
            shift: Complex64::from_polar(r, 0.5 * (alpha + core::f64::consts::PI)),
            scale: Complex64::from_polar(libm::exp(-0.5 * r * r), gamma),
        }
    }
}

/// Checks `|a| = 1`, `conj(a)·b + conj(b) = 0` and `|c|²e^{|b|²} = 1`.
///
/// Every violated condition is named in the error message.
pub fn validate_conjugation(a: Complex64, b: Complex64, c: Complex64) -> Result<ConjugationParams> {
    if [a, b, c].iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite);
    }
    let mut failures: Vec<String> = Vec::new();
    let rot = a.norm();
    if (rot - 1.0).abs() > PARAMETER_TOL {
        failures.push(format!("|a| = 1 violated (|a| = {rot})"));
    }
    let shift = (a.conj() * b + b.conj()).norm();
    if shift > PARAMETER_TOL {
        failures.push(format!(
            "conj(a)·b + conj(b) = 0 violated (|conj(a)·b + conj(b)| = {shift})"
        ));
    }
    let scale = c.norm_sqr() * libm::exp(b.norm_sqr());
    if (scale - 1.0).abs() > PARAMETER_TOL {
        failures.push(format!("|c|²·e^(|b|²) = 1 violated (value {scale})"));
    }
    if failures.is_empty() {
        Ok(ConjugationParams {
            rotation: a,
            shift: b,
            scale: c,
        })
    } else {
        Err(Error::InvalidConjugation(failures.join("; ")))
    }
}

fn ln_abs(z: Complex64) -> f64 {
    libm::log(z.norm())
}

/// Matrix of `f ↦ C e^{Dz}·f(Az + B)` in the basis `e_0..e_N`.
///
/// Entry `(i, j)` is the finite sum
/// `sqrt(i!/j!)·C·Σ_{l ≤ min(i,j)} binom(j,l) A^l B^{j−l} D^{i−l} / (i−l)!`,
/// with the factorial weights evaluated in log space.
pub fn wco_matrix(c: Complex64, d: Complex64, a: Complex64, b: Complex64, truncation: usize) -> Result<CMatrix> {
    if [a, b, c, d].iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite);
    }
    let n = truncation + 1;
    let ln_limit = libm::log(crate::fock::MAGNITUDE_LIMIT);
    let lnf: Vec<f64> = (0..n).map(ln_factorial).collect();
    let (la, lb, ld) = (ln_abs(a), ln_abs(b), ln_abs(d));
    let (pa, pb, pd) = (phase(a), phase(b), phase(d));
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for l in 0..=i.min(j) {
                let (eb, ed) = (j - l, i - l);
                if (eb > 0 && b == ZERO) || (ed > 0 && d == ZERO) {
                    continue;
                }
                let mut ln_mag = 0.5 * (lnf[i] + lnf[j]) - lnf[l] - lnf[eb] - lnf[ed] + l as f64 * la;
                if eb > 0 {
                    ln_mag += eb as f64 * lb;
                }
                if ed > 0 {
                    ln_mag += ed as f64 * ld;
                }
                if ln_mag > ln_limit {
                    return Err(Error::TruncationOverflow { degree: i.max(j) });
                }
                let angle = l as f64 * pa + eb as f64 * pb + ed as f64 * pd;
                acc += Complex64::from_polar(libm::exp(ln_mag), angle);
            }
            let entry = c * acc;
            if entry.norm().is_nan() || entry.norm() > crate::fock::MAGNITUDE_LIMIT {
                return Err(Error::TruncationOverflow { degree: i.max(j) });
            }
            out[(i, j)] = entry;
        }
    }
    Ok(out)
}

fn phase(z: Complex64) -> f64 {
    if z == ZERO {
        0.0
    } else {
        z.arg()
    }
}

/// Matrix `M` with `C_{a,b,c} v = M·conj(v)`.
pub fn conjugation_matrix(p: &ConjugationParams, truncation: usize) -> Result<CMatrix> {
    wco_matrix(p.scale, p.shift, p.rotation, p.shift, truncation)
}

/// Generators of a graph: pairs `(f, g)` and multivalued directions `h`
/// standing for `(0, h)`.
#[derive(Clone, Debug)]
pub struct GraphGenerators {
    pub truncation: usize,
    pub pairs: Vec<RelationPair>,
    pub multivalued: Vec<FockVector>,
}

impl GraphGenerators {
    pub fn to_relation(&self, rank_tol: f64) -> Result<LinearRelation> {
        LinearRelation::from_pairs(self.truncation, &self.pairs, &self.multivalued, rank_tol)
    }

    /// Every generator as a pair, multivalued directions as `(0, h)`.
    pub fn all_pairs(&self) -> Vec<RelationPair> {
        let zero = FockVector::zeros(self.truncation);
        self.pairs
            .iter()
            .cloned()
            .chain(self.multivalued.iter().map(|h| RelationPair {
                f: zero.clone(),
                g: h.clone(),
            }))
            .collect()
    }
}

fn check_budget(t: &SymbolTriple, truncation: usize, budget: usize) -> Result<()> {
    if budget + t.order > truncation {
        return Err(Error::DegreeBudget {
            budget,
            order: t.order,
            truncation,
        });
    }
    Ok(())
}

/// Generators of the maximal relation on polynomial inputs of degree
/// `≤ budget + m`.
///
/// Inputs are `f_k(w) = (w − w0)^m w^k` with `w0` the forced root (plain
/// `w^k` when no root is forced), so `ψ·(f_k∘φ)/ϕ` is the entire function
/// `κ e^{Dz} (Az + B)^k`. Outputs are its `m`-fold antiderivative with
/// vanishing jets at 0, truncated to degree `N`. The directions `z^j`,
/// `j < m`, are the multivalued part.
pub fn smax_generators(t: &SymbolTriple, truncation: usize, budget: usize) -> Result<GraphGenerators> {
    t.validate()?;
    check_budget(t, truncation, budget)?;
    let m = t.order;
    let (root_factor, kappa) = match t.forced_root() {
        Some(w0) => (
            TaylorSeries::affine_power(ONE, -w0, m),
            t.weight_scale * (t.map_slope / t.factor_slope).powu(m as u32),
        ),
        None => (
            TaylorSeries::constant(ONE),
            t.weight_scale / t.factor_offset.powu(m as u32),
        ),
    };
    let weight = TaylorSeries::exponential(kappa, t.weight_rate, truncation - m);
    let mut pairs = Vec::with_capacity(budget + 1);
    for k in 0..=budget {
        let f = root_factor.mul(&TaylorSeries::monomial(k));
        let quotient = TaylorSeries::affine_power(t.map_slope, t.map_offset, k).mul_truncated(&weight, truncation - m);
        let g = quotient.antiderivative(m);
        pairs.push(RelationPair::new(
            taylor_to_fock(&f, truncation)?,
            taylor_to_fock(&g, truncation)?,
        )?);
    }
    let multivalued = (0..m).map(|j| FockVector::basis(truncation, j)).collect();
    Ok(GraphGenerators {
        truncation,
        pairs,
        multivalued,
    })
}

/// The maximal relation restricted to the degree budget.
pub fn build_smax(t: &SymbolTriple, truncation: usize, budget: usize) -> Result<LinearRelation> {
    smax_generators(t, truncation, budget)?.to_relation(DEFAULT_RANK_TOL)
}

/// Generators of the closed-form adjoint relation
///
/// ```text
/// conj(C) e^{conj(B) z} u(conj(A) z + conj(D)) = (conj(A) z + conj(D))^m Σ_j binom(m,j) conj(a)^j conj(b)^{m−j} v^(j)(z)
/// ```
///
/// for a triple in adjoint form. With `λ = conj(b)/conj(a)` and
/// `h = e^{λz} v` the right side becomes
/// `conj(a)^m (conj(A) z + conj(D))^m e^{−λz} h^(m)`, so `(u, h)` solves a
/// maximal relation of the same shape and `v = e^{−λz} h`.
pub fn smax_adjoint_generators(
    t: &SymbolTriple,
    conj: &ConjugationParams,
    truncation: usize,
    budget: usize,
) -> Result<GraphGenerators> {
    t.validate()?;
    t.require_adjoint_form(conj)?;
    check_budget(t, truncation, budget)?;
    let m = t.order;
    let a_bar = conj.rotation.conj();
    let lambda = if m == 0 { ZERO } else { conj.shift.conj() / a_bar };
    let a_hat = t.map_slope.conj();
    let d_hat = t.weight_rate.conj();
    let shifted = SymbolTriple::new(
        t.weight_scale.conj() / a_bar.powu(m as u32),
        t.map_offset.conj() + lambda,
        a_hat,
        d_hat,
        a_hat,
        d_hat,
        m,
    )?;
    let h = smax_generators(&shifted, truncation, budget)?;
    if lambda == ZERO {
        return Ok(h);
    }
    let undo = TaylorSeries::exponential(ONE, -lambda, truncation);
    let transport = |v: &FockVector| -> Result<FockVector> {
        taylor_to_fock(&v.to_taylor().mul_truncated(&undo, truncation), truncation)
    };
    let pairs = h
        .pairs
        .iter()
        .map(|p| RelationPair::new(p.f.clone(), transport(&p.g)?))
        .collect::<Result<Vec<_>>>()?;
    let multivalued = h.multivalued.iter().map(&transport).collect::<Result<Vec<_>>>()?;
    Ok(GraphGenerators {
        truncation,
        pairs,
        multivalued,
    })
}

pub fn build_smax_adjoint(
    t: &SymbolTriple,
    conj: &ConjugationParams,
    truncation: usize,
    budget: usize,
) -> Result<LinearRelation> {
    smax_adjoint_generators(t, conj, truncation, budget)?.to_relation(DEFAULT_RANK_TOL)
}

/// The kernel pair `(K^{[k]}_{z,a,b}, ϑ)` of the maximal relation, where
/// `ϑ^(m)(x) = C e^{B conj(z)} (aAx + aB + b)^{k−m} e^{x(A conj(z) + D)}` and
/// `ϑ` is its `m`-fold antiderivative with vanishing jets at 0.
pub fn vartheta_pair(
    t: &SymbolTriple,
    conj: &ConjugationParams,
    z: Complex64,
    k: usize,
    truncation: usize,
) -> Result<RelationPair> {
    t.validate()?;
    t.require_adjoint_form(conj)?;
    let m = t.order;
    if k < m {
        return Err(Error::KernelOrder { k, m });
    }
    if truncation < m {
        return Err(Error::DegreeBudget {
            budget: 0,
            order: m,
            truncation,
        });
    }
    let f = kernel_vector(
        &KernelSpec {
            z,
            a: conj.rotation,
            b: conj.shift,
            k,
        },
        truncation,
    )?;
    let scale = t.weight_scale * (t.map_offset * z.conj()).exp();
    let exp_part = TaylorSeries::exponential(scale, t.map_slope * z.conj() + t.weight_rate, truncation - m);
    let derivative = TaylorSeries::affine_power(
        conj.rotation * t.map_slope,
        conj.rotation * t.map_offset + conj.shift,
        k - m,
    )
    .mul_truncated(&exp_part, truncation - m);
    let g = taylor_to_fock(&derivative.antiderivative(m), truncation)?;
    RelationPair::new(f, g)
}

/// Which structural family a triple belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassificationKind {
    Hermitian,
    CSelfadjoint,
    Unitary,
    BoundedDomain,
    None,
}

impl ClassificationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassificationKind::Hermitian => "hermitian",
            ClassificationKind::CSelfadjoint => "c_selfadjoint",
            ClassificationKind::Unitary => "unitary",
            ClassificationKind::BoundedDomain => "bounded_domain_condition",
            ClassificationKind::None => "none",
        }
    }
}

/// Classifier verdict with canonical parameters or a failure witness.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationResult {
    pub kind: ClassificationKind,
    /// Normalised parameters of the family, when it matches.
    pub canonical: Vec<(&'static str, Complex64)>,
    /// Quantities the decision was based on.
    pub diagnostics: Vec<(&'static str, f64)>,
    /// Why the triple is not in the family; empty on a match.
    pub witness: String,
}

impl ClassificationResult {
    pub fn matches(&self) -> bool {
        self.kind != ClassificationKind::None
    }

    fn yes(kind: ClassificationKind, canonical: Vec<(&'static str, Complex64)>) -> Self {
        Self {
            kind,
            canonical,
            diagnostics: Vec::new(),
            witness: String::new(),
        }
    }

    fn no(witness: String) -> Self {
        Self {
            kind: ClassificationKind::None,
            canonical: Vec::new(),
            diagnostics: Vec::new(),
            witness,
        }
    }

    fn with_diagnostics(mut self, diagnostics: Vec<(&'static str, f64)>) -> Self {
        self.diagnostics = diagnostics;
        self
    }
}

/// Hermitian family: `A` real, `D = conj(B)`, `ϕ ∝ (Az + B)^m` and the
/// normalised weight constant `C·(A/E)^m` real.
pub fn classify_hermitian(t: &SymbolTriple) -> ClassificationResult {
    let tol = CLASSIFIER_TOL;
    let (a, b, d) = (t.map_slope, t.map_offset, t.weight_rate);
    let diagnostics = alloc::vec![
        ("map_slope_imag", a.im.abs()),
        ("rate_minus_conj_offset", (d - b.conj()).norm()),
    ];
    if a.im.abs() > tol * (1.0 + a.norm()) {
        return ClassificationResult::no(format!("map slope A is not real (Im A = {})", a.im))
            .with_diagnostics(diagnostics);
    }
    if !close(d, b.conj(), tol) {
        return ClassificationResult::no(format!(
            "weight rate D differs from conj(B) by {}",
            (d - b.conj()).norm()
        ))
        .with_diagnostics(diagnostics);
    }
    let constant = if t.order == 0 {
        t.weight_scale
    } else {
        let (e, f) = (t.factor_slope, t.factor_offset);
        if e == ZERO {
            return ClassificationResult::no("factor slope E is zero, so ϕ has no root matching φ".into())
                .with_diagnostics(diagnostics);
        }
        if !close(a * f, b * e, tol) {
            return ClassificationResult::no(format!(
                "ϕ is not proportional to (Az + B)^m: |A·F − B·E| = {}",
                (a * f - b * e).norm()
            ))
            .with_diagnostics(diagnostics);
        }
        t.weight_scale * (a / e).powu(t.order as u32)
    };
    if constant.im.abs() > tol * (1.0 + constant.norm()) {
        return ClassificationResult::no(format!("normalised weight constant is not real (Im = {})", constant.im))
            .with_diagnostics(diagnostics);
    }
    ClassificationResult::yes(
        ClassificationKind::Hermitian,
        alloc::vec![
            ("C", Complex64::new(constant.re, 0.0)),
            ("A", Complex64::new(a.re, 0.0)),
            ("B", b)
        ],
    )
    .with_diagnostics(diagnostics)
}

/// Conjugation-selfadjoint family for `(a, b, c)`: `D = b + aB − bA` and
/// `ϕ ∝ (aAz + aB + b)^m`.
pub fn classify_c_selfadjoint(t: &SymbolTriple, p: &ConjugationParams) -> ClassificationResult {
    let tol = CLASSIFIER_TOL;
    let (a, b) = (p.rotation, p.shift);
    let want_d = b + a * t.map_offset - b * t.map_slope;
    let rate_defect = (t.weight_rate - want_d).norm();
    let cross = t.factor_slope * (a * t.map_offset + b) - t.factor_offset * (a * t.map_slope);
    let diagnostics = alloc::vec![("rate_defect", rate_defect), ("factor_defect", cross.norm())];
    if !close(t.weight_rate, want_d, tol) {
        return ClassificationResult::no(format!("weight rate D must equal b + aB − bA; defect {rate_defect}"))
            .with_diagnostics(diagnostics);
    }
    if t.order >= 1 {
        let scale = t.factor_slope.norm().max(t.factor_offset.norm())
            * (1.0 + t.map_slope.norm() + t.map_offset.norm() + b.norm());
        if cross.norm() > tol * (1.0 + scale) {
            return ClassificationResult::no(format!(
                "ϕ is not proportional to (aAz + aB + b)^m; defect {}",
                cross.norm()
            ))
            .with_diagnostics(diagnostics);
        }
    }
    ClassificationResult::yes(
        ClassificationKind::CSelfadjoint,
        alloc::vec![
            ("C", t.weight_scale),
            ("D", t.weight_rate),
            ("A", t.map_slope),
            ("B", t.map_offset),
        ],
    )
    .with_diagnostics(diagnostics)
}

/// Unitary family: `m = 0`, `|A| = 1`, `D = −A·conj(B)` and
/// `|C| = e^{−|B|²/2}`; canonical output includes the unimodular factor
/// `C·e^{|B|²/2}`.
pub fn classify_unitary(t: &SymbolTriple) -> ClassificationResult {
    let tol = CLASSIFIER_TOL;
    let (a, b, d, c) = (t.map_slope, t.map_offset, t.weight_rate, t.weight_scale);
    let unimodular = c * libm::exp(0.5 * b.norm_sqr());
    let diagnostics = alloc::vec![
        ("abs_map_slope", a.norm()),
        ("rate_defect", (d + a * b.conj()).norm()),
        ("abs_unimodular", unimodular.norm()),
    ];
    if t.order != 0 {
        return ClassificationResult::no(format!("order m = {} ≥ 1: the multivalued part is nontrivial", t.order))
            .with_diagnostics(diagnostics);
    }
    if (a.norm() - 1.0).abs() > tol {
        return ClassificationResult::no(format!("|A| ≠ 1 (|A| = {})", a.norm())).with_diagnostics(diagnostics);
    }
    if !close(d, -a * b.conj(), tol) {
        return ClassificationResult::no(format!(
            "weight rate D ≠ −A·conj(B); defect {}",
            (d + a * b.conj()).norm()
        ))
        .with_diagnostics(diagnostics);
    }
    if (unimodular.norm() - 1.0).abs() > tol {
        return ClassificationResult::no(format!("|C| ≠ e^(−|B|²/2): |C·e^(|B|²/2)| = {}", unimodular.norm()))
            .with_diagnostics(diagnostics);
    }
    ClassificationResult::yes(
        ClassificationKind::Unitary,
        alloc::vec![("A", a), ("B", b), ("unimodular", unimodular)],
    )
    .with_diagnostics(diagnostics)
}

/// Everywhere-defined criterion: `|A| < 1` (branch 1) or `|A| = 1` with
/// `A·conj(B) + D = 0` (branch 2).
pub fn classify_bounded_domain_condition(t: &SymbolTriple) -> ClassificationResult {
    let tol = CLASSIFIER_TOL;
    let (a, b, d) = (t.map_slope, t.map_offset, t.weight_rate);
    let defect = (a * b.conj() + d).norm();
    let diag = |branch: f64| {
        alloc::vec![
            ("abs_map_slope", a.norm()),
            ("shift_defect", defect),
            ("branch", branch)
        ]
    };
    if a.norm() < 1.0 - tol {
        return ClassificationResult::yes(ClassificationKind::BoundedDomain, alloc::vec![("A", a)])
            .with_diagnostics(diag(1.0));
    }
    if (a.norm() - 1.0).abs() <= tol && defect <= tol * (1.0 + d.norm()) {
        return ClassificationResult::yes(
            ClassificationKind::BoundedDomain,
            alloc::vec![("A", a), ("B", b), ("D", d)],
        )
        .with_diagnostics(diag(2.0));
    }
    let witness = if a.norm() > 1.0 + tol {
        format!("|A| = {} > 1", a.norm())
    } else {
        format!("|A| = 1 but |A·conj(B) + D| = {defect}")
    };
    ClassificationResult::no(witness).with_diagnostics(diag(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::fock::{eval_derivative, factorial, inner};
    use alloc::vec;

    fn triple(
        c: Complex64,
        d: Complex64,
        a: Complex64,
        b: Complex64,
        e: Complex64,
        f: Complex64,
        m: usize,
    ) -> SymbolTriple {
        SymbolTriple::new(c, d, a, b, e, f, m).unwrap()
    }

    fn r(x: f64) -> Complex64 {
        c64(x, 0.0)
    }

    /// Composition `f(Az + B)` by Horner in the polynomial ring.
    fn compose_affine(f: &TaylorSeries, a: Complex64, b: Complex64) -> TaylorSeries {
        let lin = TaylorSeries::new(vec![b, a]).unwrap();
        f.coeffs().iter().rev().fold(TaylorSeries::zero(), |acc, c| {
            acc.mul(&lin).add(&TaylorSeries::constant(*c))
        })
    }

    /// Max coefficient of `ψ·f∘φ − ϕ·g^(m)` up to degree `N − m`, relative
    /// to the largest coefficient of either side.
    fn equation_residual(t: &SymbolTriple, p: &RelationPair, n: usize) -> f64 {
        let deg = n - t.order;
        let f = p.f.to_taylor();
        let g = p.g.to_taylor();
        let psi = TaylorSeries::exponential(t.weight_scale, t.weight_rate, deg);
        let lhs = psi.mul_truncated(&compose_affine(&f, t.map_slope, t.map_offset), deg);
        let factor = TaylorSeries::affine_power(t.factor_slope, t.factor_offset, t.order);
        let rhs = factor.mul_truncated(&g.derivative(t.order), deg);
        let scale = (0..=deg)
            .map(|i| lhs.coeff(i).norm().max(rhs.coeff(i).norm()))
            .fold(1e-300, f64::max);
        (0..=deg)
            .map(|i| (lhs.coeff(i) - rhs.coeff(i)).norm())
            .fold(0.0, f64::max)
            / scale
    }

    #[test]
    fn validate_conjugation_examples() {
        assert!(validate_conjugation(ONE, ZERO, ONE).is_ok());
        let err = validate_conjugation(r(-1.0), ZERO, ZERO).unwrap_err();
        match err {
            Error::InvalidConjugation(msg) => {
                assert!(msg.contains("|c|²·e^(|b|²) = 1"), "{msg}");
                assert!(!msg.contains("|a| = 1"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let a = c64(0.0, 1.0);
        let b = Complex64::from_polar(1.0, -core::f64::consts::FRAC_PI_4);
        let c = r((-0.5f64).exp());
        // oracle: conj(i)·e^{-iπ/4} + e^{iπ/4} = e^{-3iπ/4} + e^{iπ/4} = 0
        assert!((a.conj() * b + b.conj()).norm() < 1e-15);
        assert!((c.norm_sqr() * b.norm_sqr().exp() - 1.0).abs() < 1e-15);
        assert!(validate_conjugation(a, b, c).is_ok());
        let err = validate_conjugation(r(2.0), r(1.0), r(1.0)).unwrap_err();
        if let Error::InvalidConjugation(msg) = err {
            assert_eq!(msg.matches("violated").count(), 3, "{msg}");
        }
    }

    #[test]
    fn sampled_conjugations_are_valid() {
        for k in 0..20 {
            let p = ConjugationParams::from_angles(0.37 * k as f64, 0.05 * k as f64, 1.1 * k as f64);
            assert!(validate_conjugation(p.rotation, p.shift, p.scale).is_ok());
        }
    }

    #[test]
    fn wco_matrix_examples() {
        let id = wco_matrix(ONE, ZERO, ONE, ZERO, 6).unwrap();
        assert!(id.max_abs_diff(&CMatrix::identity(7)) < 1e-15);
        let half = wco_matrix(ONE, ZERO, r(0.5), ZERO, 6).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                let want = if i == j { 0.5f64.powi(j as i32) } else { 0.0 };
                assert!((half[(i, j)] - r(want)).norm() < 1e-15);
            }
        }
        let exp = wco_matrix(ONE, ONE, ONE, ZERO, 10).unwrap();
        for i in 0..=10 {
            // e^z = Σ z^i/i! = Σ e_i/sqrt(i!)
            assert!((exp[(i, 0)] - r(1.0 / factorial(i).sqrt())).norm() < 1e-15);
        }
    }

    #[test]
    fn wco_matrix_matches_composition_oracle() {
        let (c, d, a, b) = (c64(0.7, -0.2), c64(0.3, 0.4), c64(-0.6, 0.5), c64(0.2, -0.9));
        let n = 12;
        let m = wco_matrix(c, d, a, b, n).unwrap();
        for j in 0..=n {
            let col = compose_affine(&TaylorSeries::monomial(j), a, b).scaled(r(1.0 / factorial(j).sqrt()));
            let out = TaylorSeries::exponential(c, d, n).mul_truncated(&col, n);
            let want = taylor_to_fock(&out, n).unwrap();
            for i in 0..=n {
                assert!((m[(i, j)] - want.coeffs()[i]).norm() < 1e-12 * (1.0 + want.coeffs()[i].norm()));
            }
        }
    }

    #[test]
    fn wco_adjoint_identity() {
        let (c, d, a, b) = (c64(0.9, 0.1), c64(-0.4, 0.6), c64(0.5, -0.7), c64(0.8, 0.3));
        let m = wco_matrix(c, d, a, b, 30).unwrap();
        let hat = wco_matrix(c.conj(), b.conj(), a.conj(), d.conj(), 30).unwrap();
        assert!(hat.max_abs_diff(&m.adjoint()) < 1e-10);
    }

    #[test]
    fn wco_overflow_guard() {
        assert!(matches!(
            wco_matrix(ONE, r(50.0), r(50.0), r(50.0), 200),
            Err(Error::TruncationOverflow { .. })
        ));
    }

    #[test]
    fn conjugation_matrix_examples() {
        let m = conjugation_matrix(&ConjugationParams::standard(), 8).unwrap();
        assert!(m.max_abs_diff(&CMatrix::identity(9)) < 1e-15);
        let flip = validate_conjugation(r(-1.0), ZERO, ONE).unwrap();
        let m = conjugation_matrix(&flip, 8).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let want = if i == j {
                    if j % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    0.0
                };
                assert!((m[(i, j)] - r(want)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn conjugation_is_involutive_isometry_on_low_block() {
        let n = 40;
        let k = n / 2 + 1;
        for (alpha, rad, gamma) in [(0.3, 1.0, 0.7), (2.0, 0.5, -1.0), (-1.2, 0.9, 3.0)] {
            let p = ConjugationParams::from_angles(alpha, rad, gamma);
            let m = conjugation_matrix(&p, n).unwrap();
            let inv = m.matmul(&m.conj()).unwrap().block(0, k, 0, k);
            assert!(inv.max_abs_diff(&CMatrix::identity(k)) < 1e-8);
            let gram = m.adjoint().matmul(&m).unwrap().block(0, k, 0, k);
            assert!(gram.max_abs_diff(&CMatrix::identity(k)) < 1e-8);
        }
    }

    #[test]
    fn smax_order_one_monomial_example() {
        // z·g'(z) = f(z): pairs (z^{k+1}, z^{k+1}/(k+1)) and multivalued 1
        let t = triple(ONE, ZERO, ONE, ZERO, ONE, ZERO, 1);
        let n = 10;
        let gens = smax_generators(&t, n, 5).unwrap();
        assert_eq!(gens.pairs.len(), 6);
        for (k, p) in gens.pairs.iter().enumerate() {
            let f = taylor_to_fock(&TaylorSeries::monomial(k + 1), n).unwrap();
            let g = f.scaled(r(1.0 / (k + 1) as f64));
            assert!(p.f.as_cvector().max_abs_diff(f.as_cvector()) < 1e-14);
            assert!(p.g.as_cvector().max_abs_diff(g.as_cvector()) < 1e-14);
        }
        assert_eq!(gens.multivalued, vec![FockVector::basis(n, 0)]);
    }

    #[test]
    fn smax_order_zero_is_matrix_graph() {
        let (c, d, a, b) = (c64(0.5, 0.5), c64(0.2, -0.1), c64(0.8, 0.1), c64(-0.3, 0.4));
        let t = triple(c, d, a, b, ZERO, ONE, 0);
        let n = 20;
        let budget = 10;
        let gens = smax_generators(&t, n, budget).unwrap();
        let w = wco_matrix(c, d, a, b, n).unwrap();
        for (k, p) in gens.pairs.iter().enumerate() {
            let col = w.column(k).scaled(r(factorial(k).sqrt()));
            assert!(p.g.as_cvector().max_abs_diff(&col) < 1e-12 * (1.0 + col.norm()));
        }
    }

    #[test]
    fn smax_generators_solve_equation() {
        let conj = ConjugationParams::from_angles(0.8, 0.6, 0.2);
        for m in 0..4 {
            let t = SymbolTriple::adjoint_form(c64(0.7, 0.4), c64(-0.5, 0.3), c64(0.6, -0.5), c64(0.3, 0.8), m, &conj)
                .unwrap();
            let n = 30;
            let gens = smax_generators(&t, n, 15).unwrap();
            for p in &gens.pairs {
                assert!(equation_residual(&t, p, n) < 1e-10);
            }
            for h in &gens.multivalued {
                let p = RelationPair::new(FockVector::zeros(n), h.clone()).unwrap();
                assert!(equation_residual(&t, &p, n) < 1e-12);
            }
        }
        // constant factor: no forced root
        let t = triple(ONE, c64(0.2, 0.0), c64(0.5, 0.5), ONE, ZERO, c64(2.0, 0.0), 2);
        let gens = smax_generators(&t, 20, 8).unwrap();
        for p in &gens.pairs {
            assert!(equation_residual(&t, p, 20) < 1e-10);
        }
    }

    #[test]
    fn smax_budget_and_symbol_errors() {
        let t = triple(ONE, ZERO, ONE, ZERO, ONE, ZERO, 3);
        assert!(matches!(smax_generators(&t, 10, 8), Err(Error::DegreeBudget { .. })));
        assert!(SymbolTriple::new(ZERO, ZERO, ONE, ZERO, ONE, ZERO, 1).is_err());
        assert!(SymbolTriple::new(ONE, ZERO, ZERO, ZERO, ONE, ZERO, 1).is_err());
        assert!(SymbolTriple::new(ONE, ZERO, ONE, ZERO, ZERO, ZERO, 1).is_err());
        assert!(SymbolTriple::new(ONE, ZERO, ONE, ZERO, ZERO, ZERO, 0).is_ok());
    }

    #[test]
    fn adjoint_order_zero_is_hat_matrix() {
        let (c, d, a, b) = (c64(0.5, -0.5), c64(0.3, 0.2), c64(-0.7, 0.4), c64(0.1, 0.6));
        let conj = ConjugationParams::from_angles(1.0, 0.5, 0.0);
        let t = SymbolTriple::adjoint_form(c, d, a, b, 0, &conj).unwrap();
        let n = 20;
        let gens = smax_adjoint_generators(&t, &conj, n, 10).unwrap();
        let w = wco_matrix(c.conj(), b.conj(), a.conj(), d.conj(), n).unwrap();
        for (k, p) in gens.pairs.iter().enumerate() {
            let col = w.column(k).scaled(r(factorial(k).sqrt()));
            assert!(p.g.as_cvector().max_abs_diff(&col) < 1e-12 * (1.0 + col.norm()));
        }
    }

    #[test]
    fn adjoint_solves_its_equation() {
        // conj(C) e^{conj(B) z} u(conj(A) z + conj(D)) = (conj(A) z + conj(D))^m Σ binom(m,j) conj(a)^j conj(b)^{m−j} v^(j)
        let conj = ConjugationParams::from_angles(-0.9, 0.8, 1.3);
        let (c, d, a, b) = (c64(0.6, 0.2), c64(0.4, -0.3), c64(0.5, 0.6), c64(-0.2, 0.7));
        let n = 30;
        for m in 1..4 {
            let t = SymbolTriple::adjoint_form(c, d, a, b, m, &conj).unwrap();
            let gens = smax_adjoint_generators(&t, &conj, n, 12).unwrap();
            let deg = n - m;
            for p in gens.all_pairs() {
                let u = p.f.to_taylor();
                let v = p.g.to_taylor();
                let lhs = TaylorSeries::exponential(c.conj(), b.conj(), deg)
                    .mul_truncated(&compose_affine(&u, a.conj(), d.conj()), deg);
                let mut sum = TaylorSeries::zero();
                for j in 0..=m {
                    let w = conj.rotation.conj().powu(j as u32)
                        * conj.shift.conj().powu((m - j) as u32)
                        * (factorial(m) / (factorial(j) * factorial(m - j)));
                    sum = sum.add(&v.derivative(j).scaled(w));
                }
                let rhs = TaylorSeries::affine_power(a.conj(), d.conj(), m).mul_truncated(&sum, deg);
                let floor = v.coeffs().iter().map(|c| c.norm()).fold(1e-300, f64::max);
                let scale = (0..=deg)
                    .map(|i| lhs.coeff(i).norm().max(rhs.coeff(i).norm()))
                    .fold(floor, f64::max);
                let res = (0..=deg)
                    .map(|i| (lhs.coeff(i) - rhs.coeff(i)).norm())
                    .fold(0.0, f64::max);
                assert!(res / scale < 1e-10, "m={m} residual {}", res / scale);
            }
        }
    }

    #[test]
    fn adjoint_form_is_required() {
        let t = triple(ONE, ZERO, ONE, ZERO, ONE, ONE, 1);
        assert!(smax_adjoint_generators(&t, &ConjugationParams::standard(), 10, 4).is_err());
    }

    #[test]
    fn vartheta_examples() {
        let conj = ConjugationParams::standard();
        let t = triple(ONE, ZERO, ONE, ZERO, ONE, ZERO, 1);
        let n = 8;
        let p = vartheta_pair(&t, &conj, ZERO, 1, n).unwrap();
        let x = FockVector::basis(n, 1);
        assert!(p.f.as_cvector().max_abs_diff(x.as_cvector()) < 1e-15);
        assert!(p.g.as_cvector().max_abs_diff(x.as_cvector()) < 1e-15);
        assert!(matches!(
            vartheta_pair(&t, &conj, ZERO, 0, n),
            Err(Error::KernelOrder { k: 0, m: 1 })
        ));

        // A conj(z) + D = 0 collapses ϑ to C e^{B conj(z)} x^m / m!
        let z = c64(0.3, -0.4);
        let (a, b) = (c64(0.6, 0.2), c64(0.5, 0.5));
        let d = -a * z.conj();
        let m = 2;
        let t = SymbolTriple::adjoint_form(c64(1.5, 0.0), d, a, b, m, &conj).unwrap();
        let p = vartheta_pair(&t, &conj, z, m, n).unwrap();
        let want = taylor_to_fock(
            &TaylorSeries::monomial(m).scaled(c64(1.5, 0.0) * (b * z.conj()).exp() / factorial(m)),
            n,
        )
        .unwrap();
        assert!(p.g.as_cvector().max_abs_diff(want.as_cvector()) < 1e-14);
    }

    #[test]
    fn vartheta_solves_equation_and_is_canonical() {
        let conj = ConjugationParams::from_angles(0.4, 0.7, 0.0);
        let n = 40;
        for m in 0..3 {
            let t = SymbolTriple::adjoint_form(c64(0.8, -0.3), c64(0.2, 0.5), c64(0.7, 0.1), c64(-0.4, 0.3), m, &conj)
                .unwrap();
            for z in [ZERO, c64(0.5, 0.0), c64(-0.5, 0.5)] {
                let p = vartheta_pair(&t, &conj, z, m + 1, n).unwrap();
                // the kernel's tail beyond N drives the residual's top coefficients, so compare low degrees
                let res = equation_residual(&t, &RelationPair::new(p.f.clone(), p.g.clone()).unwrap(), n);
                assert!(res < 1e-8, "m={m} residual {res}");
                for j in 0..m {
                    assert!(eval_derivative(&p.g, ZERO, j).unwrap().norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn kernel_pairs_of_the_maximal_relation_pair_with_adjoint() {
        // the kernel pairs span a dense subset of the graph, so they must pair
        // with closed-form adjoint generators exactly like the polynomial ones
        let conj = ConjugationParams::from_angles(0.0, 0.0, 0.0);
        let t = SymbolTriple::adjoint_form(ONE, ZERO, ONE, ZERO, 1, &conj).unwrap();
        let n = 40;
        let adj = smax_adjoint_generators(&t, &conj, n, 10).unwrap();
        let p = vartheta_pair(&t, &conj, c64(0.5, 0.0), 1, n).unwrap();
        for q in adj.all_pairs() {
            let lhs = inner(&p.g, &q.f).unwrap();
            let rhs = inner(&p.f, &q.g).unwrap();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn classifier_examples() {
        let t = triple(ONE, ZERO, ONE, ZERO, ONE, ZERO, 1);
        assert_eq!(classify_hermitian(&t).kind, ClassificationKind::Hermitian);
        let t = triple(r((-0.5f64).exp()), r(-1.0), ONE, ONE, ZERO, ONE, 0);
        let u = classify_unitary(&t);
        assert_eq!(u.kind, ClassificationKind::Unitary);
        let t = triple(ONE, ZERO, r(2.0), ZERO, ZERO, ONE, 0);
        let u = classify_unitary(&t);
        assert_eq!(u.kind, ClassificationKind::None);
        assert!(u.witness.contains("|A| ≠ 1"));
        let t = triple(ONE, ZERO, ONE, ZERO, ONE, ZERO, 1);
        assert!(classify_unitary(&t).witness.contains("m = 1"));
    }

    #[test]
    fn hermitian_classifier_rejects() {
        let base = triple(
            c64(2.0, 0.0),
            c64(0.3, -0.2),
            r(0.5),
            c64(0.3, 0.2),
            r(1.0),
            c64(0.6, 0.4),
            1,
        );
        assert_eq!(classify_hermitian(&base).kind, ClassificationKind::Hermitian);
        let mut t = base;
        t.map_slope = c64(0.5, 0.1);
        assert!(classify_hermitian(&t).witness.contains("not real"));
        let mut t = base;
        t.weight_rate = c64(0.3, 0.2);
        assert!(!classify_hermitian(&t).matches());
        let mut t = base;
        t.weight_scale = c64(0.0, 1.0);
        assert!(!classify_hermitian(&t).matches());
        let mut t = base;
        t.factor_offset = c64(0.6, 0.5);
        assert!(!classify_hermitian(&t).matches());
    }

    #[test]
    fn c_selfadjoint_classifier() {
        let p = ConjugationParams::from_angles(0.7, 0.4, 0.1);
        let (a, b) = (c64(0.5, 0.3), c64(-0.2, 0.6));
        let d = p.shift + p.rotation * b - p.shift * a;
        let t = SymbolTriple::adjoint_form(c64(0.3, 0.9), d, a, b, 2, &p).unwrap();
        assert_eq!(classify_c_selfadjoint(&t, &p).kind, ClassificationKind::CSelfadjoint);
        let mut bad = t;
        bad.weight_rate += 0.1;
        assert!(!classify_c_selfadjoint(&bad, &p).matches());
        let mut bad = t;
        bad.factor_offset += 0.1;
        assert!(!classify_c_selfadjoint(&bad, &p).matches());
    }

    #[test]
    fn bounded_domain_examples() {
        let t = triple(ONE, c64(5.0, 1.0), r(0.5), c64(3.0, 0.0), ZERO, ONE, 0);
        let res = classify_bounded_domain_condition(&t);
        assert_eq!(res.kind, ClassificationKind::BoundedDomain);
        assert!(res.diagnostics.contains(&("branch", 1.0)));
        let t = triple(ONE, r(-1.0), ONE, ONE, ZERO, ONE, 0);
        assert!(classify_bounded_domain_condition(&t)
            .diagnostics
            .contains(&("branch", 2.0)));
        let t = triple(ONE, ONE, ONE, ZERO, ZERO, ONE, 0);
        let res = classify_bounded_domain_condition(&t);
        assert_eq!(res.kind, ClassificationKind::None);
        assert!(!res.witness.is_empty());
    }
}
