//! Truncated Fock space.
//!
//! Elements are stored by their coefficients in the orthonormal basis
//! `e_n(z) = z^n / sqrt(n!)`, so the Fock inner product is the plain
//! Euclidean one. [`TaylorSeries`] holds ordinary power-series coefficients
//! and is the working representation for closed-form constructions.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{orthonormalize, CVector, Subspace, DEFAULT_RANK_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest magnitude any stored coefficient may reach.
pub const MAGNITUDE_LIMIT: f64 = 1e300;

/// `ln(n!)`; exact products up to `170!`, log-Gamma beyond.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= 170 {
        libm::log(factorial(n))
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// `n!` as a float (infinite past `170!`).
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `sqrt(n!)` computed in log space.
pub fn sqrt_factorial(n: usize) -> f64 {
    if n <= 170 {
        factorial(n).sqrt()
    } else {
        libm::exp(0.5 * ln_factorial(n))
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_finite(coeffs: &[Complex64]) -> Result<()> {
    for (n, c) in coeffs.iter().enumerate() {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if c.norm() > MAGNITUDE_LIMIT {
            return Err(Error::TruncationOverflow { degree: n });
        }
    }
    Ok(())
}

/// A polynomial (or truncated power series) `Σ c_n z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorSeries {
    coeffs: Vec<Complex64>,
}

impl TaylorSeries {
    /// Fails on non-finite coefficients or magnitudes above [`MAGNITUDE_LIMIT`].
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![ZERO] }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = ONE;
        Self { coeffs }
    }

    /// Taylor polynomial of `scale · e^{rate z}` up to `max_degree`.
    pub fn exponential(scale: Complex64, rate: Complex64, max_degree: usize) -> Self {
        let mut coeffs = Vec::with_capacity(max_degree + 1);
        let mut term = scale;
        for n in 0..=max_degree {
            coeffs.push(term);
            term = term * rate / (n + 1) as f64;
        }
        Self { coeffs }
    }

    /// `(slope·z + offset)^k`, exact.
    pub fn affine_power(slope: Complex64, offset: Complex64, k: usize) -> Self {
        let coeffs = (0..=k)
            .map(|j| slope.powu(j as u32) * offset.powu((k - j) as u32) * binomial(k, j))
            .collect();
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &TaylorSeries) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self {
            coeffs: (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect(),
        }
    }

    /// Product truncated at `max_degree`.
    pub fn mul_truncated(&self, other: &TaylorSeries, max_degree: usize) -> Self {
        let deg = (self.max_degree() + other.max_degree()).min(max_degree);
        let mut coeffs = vec![ZERO; deg + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(deg + 1) {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(deg + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    pub fn mul(&self, other: &TaylorSeries) -> Self {
        self.mul_truncated(other, self.max_degree() + other.max_degree())
    }

    /// Coefficients beyond `max_degree` dropped.
    pub fn truncated(&self, max_degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(max_degree + 1);
        Self { coeffs }
    }

    /// `times`-fold derivative.
    pub fn derivative(&self, times: usize) -> Self {
        if times > self.max_degree() {
            return Self::zero();
        }
        Self {
            coeffs: (times..self.coeffs.len())
                .map(|n| {
                    let falling = ((n - times + 1)..=n).fold(1.0, |acc, k| acc * k as f64);
                    self.coeffs[n] * falling
                })
                .collect(),
        }
    }

    /// The `times`-fold antiderivative whose derivatives of order `< times`
    /// vanish at 0.
    pub fn antiderivative(&self, times: usize) -> Self {
        let mut coeffs = vec![ZERO; self.coeffs.len() + times];
        for (n, c) in self.coeffs.iter().enumerate() {
            let rising = ((n + 1)..=(n + times)).fold(1.0, |acc, k| acc * k as f64);
            coeffs[n + times] = c / rising;
        }
        Self { coeffs }
    }
}

/// Anything that can be evaluated pointwise as an entire function.
pub trait EntireFunction {
    fn value_at(&self, z: Complex64) -> Complex64;
}

impl EntireFunction for TaylorSeries {
    fn value_at(&self, z: Complex64) -> Complex64 {
        self.eval(z)
    }
}

impl<F: Fn(Complex64) -> Complex64> EntireFunction for F {
    fn value_at(&self, z: Complex64) -> Complex64 {
        self(z)
    }
}

/// An element of the truncated Fock space, coefficients in `e_0..e_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    coeffs: CVector,
}

impl FockVector {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition(
                "a Fock vector needs at least one coefficient".into(),
            ));
        }
        Ok(Self {
            coeffs: CVector::new(coeffs)?,
        })
    }

    pub fn from_cvector(v: CVector) -> Result<Self> {
        Self::new(v.into_entries())
    }

    pub fn zeros(truncation: usize) -> Self {
        Self {
            coeffs: CVector::zeros(truncation + 1),
        }
    }

    /// The basis vector `e_n`.
    pub fn basis(truncation: usize, n: usize) -> Self {
        Self {
            coeffs: CVector::basis(truncation + 1, n),
        }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs.entries()
    }

    pub fn as_cvector(&self) -> &CVector {
        &self.coeffs
    }

    pub fn into_cvector(self) -> CVector {
        self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.scaled(s),
        }
    }

    /// Back to Taylor coefficients (`c_n = coeff_n / sqrt(n!)`).
    pub fn to_taylor(&self) -> TaylorSeries {
        TaylorSeries {
            coeffs: self
                .coeffs()
                .iter()
                .enumerate()
                .map(|(n, c)| c / sqrt_factorial(n))
                .collect(),
        }
    }
}

/// Fock coefficients `c_n · sqrt(n!)` for `n ≤ N`.
pub fn taylor_to_fock(t: &TaylorSeries, truncation: usize) -> Result<FockVector> {
    let ln_limit = libm::log(MAGNITUDE_LIMIT);
    let mut out = Vec::with_capacity(truncation + 1);
    for n in 0..=truncation {
        let c = t.coeff(n);
        let mag = c.norm();
        if mag == 0.0 {
            out.push(ZERO);
            continue;
        }
        if libm::log(mag) + 0.5 * ln_factorial(n) > ln_limit {
            return Err(Error::TruncationOverflow { degree: n });
        }
        out.push(c * sqrt_factorial(n));
    }
    FockVector::new(out)
}

/// `⟨f, g⟩ = Σ f_n · conj(g_n)`.
pub fn inner(f: &FockVector, g: &FockVector) -> Result<Complex64> {
    if f.truncation() != g.truncation() {
        return Err(Error::TruncationMismatch {
            left: f.truncation(),
            right: g.truncation(),
        });
    }
    f.coeffs.inner(&g.coeffs)
}

/// Parameters of the kernel function `x ↦ (a·x + b)^k · e^{x·conj(z)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub z: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub k: usize,
}

impl KernelSpec {
    /// The derivative-reproducing kernel at `z` (`a = 1`, `b = 0`).
    pub fn derivative(z: Complex64, k: usize) -> Self {
        Self { z, a: ONE, b: ZERO, k }
    }

    /// Taylor polynomial up to `max_degree`.
    pub fn taylor(&self, max_degree: usize) -> TaylorSeries {
        TaylorSeries::affine_power(self.a, self.b, self.k)
            .mul_truncated(&TaylorSeries::exponential(ONE, self.z.conj(), max_degree), max_degree)
    }
}

pub fn kernel_vector(kernel: &KernelSpec, truncation: usize) -> Result<FockVector> {
    taylor_to_fock(&kernel.taylor(truncation), truncation)
}

/// `f^{(k)}(z)` through the reproducing kernel.
pub fn eval_derivative(f: &FockVector, z: Complex64, k: usize) -> Result<Complex64> {
    let kernel = kernel_vector(&KernelSpec::derivative(z, k), f.truncation())?;
    inner(f, &kernel)
}

/// Functions of degree `≤ N` vanishing to order `m` at `y`.
///
/// Spanned by `(z − y)^m z^j`, `j = 0..=N−m`; dimension `N + 1 − m`.
/// `m = 0` gives the whole truncated space.
pub fn vanishing_subspace(m: usize, y: Complex64, truncation: usize) -> Result<Subspace> {
    if truncation < m {
        return Err(Error::Precondition(alloc::format!(
            "vanishing order {m} exceeds truncation {truncation}"
        )));
    }
    let root_factor = TaylorSeries::affine_power(ONE, -y, m);
    let vectors = (0..=truncation - m)
        .map(|j| taylor_to_fock(&root_factor.mul(&TaylorSeries::monomial(j)), truncation).map(FockVector::into_cvector))
        .collect::<Result<Vec<_>>>()?;
    orthonormalize(truncation + 1, &vectors, DEFAULT_RANK_TOL)
}

/// `|f(z)|² · e^{|g(z)|² − |z|²}`.
pub fn m_quantity(f: &impl EntireFunction, g: &impl EntireFunction, z: Complex64) -> f64 {
    let fz = f.value_at(z).norm_sqr();
    if fz == 0.0 {
        return 0.0;
    }
    libm::exp(libm::log(fz) + g.value_at(z).norm_sqr() - z.norm_sqr())
}

/// Maximum of [`m_quantity`] over a `grid × grid` lattice on
/// `[−radius, radius]²`.
///
/// This is a lower bound for the supremum over the plane, nothing more. An
/// odd `grid` puts the origin on the lattice.
pub fn sup_m_estimate(f: &impl EntireFunction, g: &impl EntireFunction, radius: f64, grid: usize) -> Result<f64> {
    if radius <= 0.0 || !radius.is_finite() {
        return Err(Error::Precondition(alloc::format!(
            "radius must be positive, got {radius}"
        )));
    }
    if grid < 2 {
        return Err(Error::Precondition(alloc::format!(
            "grid must be at least 2, got {grid}"
        )));
    }
    let step = 2.0 * radius / (grid - 1) as f64;
    let mut best = 0.0_f64;
    for i in 0..grid {
        for j in 0..grid {
            let z = Complex64::new(-radius + step * i as f64, -radius + step * j as f64);
            best = best.max(m_quantity(f, g, z));
        }
    }
    Ok(best)
}
