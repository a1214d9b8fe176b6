//! Seeded sampling of parameter families.
//!
//! Every family draws from a ChaCha8 stream, so a seed fixes the whole
//! sweep. Free complex parameters are uniform in the disc of radius
//! `magnitude_cap`; the remaining symbols are derived so that the triple
//! lands in (or, for perturbed families, just outside) the family.

use std::f64::consts::TAU;

use fockrel_core::checks::CheckKind;
use fockrel_core::symbols::{ConjugationParams, SymbolTriple};
use fockrel_core::{c64, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{from_core, RunError};
use crate::runner::ParameterSet;

/// Smallest modulus accepted for symbols that must not vanish.
const MIN_MODULUS: f64 = 0.1;
const PERTURBATION: f64 = 0.1;
/// Contractive maps are drawn with `|A| ≤ 0.7`; closer to the unit circle
/// the truncated norm has not settled by `N = 40`.
const CONTRACTIVE_RADIUS: f64 = 0.7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Adjoint-form triples for a random conjugation.
    Adjoint,
    /// `D = b + aB − bA` with adjoint-form factor; `|D|` is capped too.
    CSelfadjoint,
    /// As above with `D` shifted by `0.1`.
    CSelfadjointPerturbed,
    /// Real `A` and `C`, `D = conj(B)`, factor proportional to the map.
    Hermitian,
    /// As above with `A` shifted by `0.1i`.
    HermitianPerturbed,
    /// `|A| = 1`, `D = −A·conj(B)`, `|C| = e^{−|B|²/2}`.
    Unitary,
    /// `|A| = 2`.
    Expansive,
    /// `|A| ≤ 0.7`.
    Contractive,
    /// `|A| = 1` with `A·conj(B) + D = 0`.
    IsometricShift,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Adjoint => "adjoint",
            Family::CSelfadjoint => "c_selfadjoint",
            Family::CSelfadjointPerturbed => "c_selfadjoint_perturbed",
            Family::Hermitian => "hermitian",
            Family::HermitianPerturbed => "hermitian_perturbed",
            Family::Unitary => "unitary",
            Family::Expansive => "expansive",
            Family::Contractive => "contractive",
            Family::IsometricShift => "isometric_shift",
        }
    }

    /// Checks run on the family when the config names none.
    pub fn matched_checks(self) -> Vec<CheckKind> {
        match self {
            Family::Adjoint => vec![CheckKind::MultivaluedPart, CheckKind::DomainClosure, CheckKind::Adjoint],
            Family::CSelfadjoint | Family::CSelfadjointPerturbed => vec![CheckKind::CSelfadjoint],
            Family::Hermitian | Family::HermitianPerturbed => vec![CheckKind::Hermitian],
            Family::Unitary => vec![CheckKind::Unitary],
            Family::Expansive => vec![CheckKind::LowerBound],
            Family::Contractive | Family::IsometricShift => vec![CheckKind::Boundedness],
        }
    }

    /// Orders sampled when the sweep does not fix one.
    fn default_orders(self) -> std::ops::RangeInclusive<usize> {
        match self {
            Family::Adjoint | Family::CSelfadjoint | Family::CSelfadjointPerturbed | Family::Hermitian => 0..=2,
            Family::HermitianPerturbed | Family::Expansive => 0..=1,
            Family::Unitary | Family::Contractive | Family::IsometricShift => 0..=0,
        }
    }
}

/// A seeded source of symbols.
pub struct Sampler {
    rng: ChaCha8Rng,
    cap: f64,
}

impl Sampler {
    pub fn new(seed: u64, magnitude_cap: f64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cap: magnitude_cap,
        }
    }

    fn angle(&mut self) -> f64 {
        self.rng.random_range(0.0..TAU)
    }

    /// Uniform in the disc of radius `radius`.
    pub fn disc(&mut self, radius: f64) -> Complex64 {
        let r = radius * self.rng.random::<f64>().sqrt();
        Complex64::from_polar(r, self.angle())
    }

    /// Uniform in the capped disc.
    pub fn complex(&mut self) -> Complex64 {
        self.disc(self.cap)
    }

    /// Uniform in the capped disc with modulus at least [`MIN_MODULUS`].
    pub fn nonzero(&mut self) -> Complex64 {
        loop {
            let z = self.complex();
            if z.norm() >= MIN_MODULUS.min(0.5 * self.cap) {
                return z;
            }
        }
    }

    pub fn unimodular(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle())
    }

    /// A signed real with modulus in `[lo, hi]`.
    pub fn signed(&mut self, lo: f64, hi: f64) -> f64 {
        let v = self.rng.random_range(lo..=hi);
        if self.rng.random::<bool>() {
            v
        } else {
            -v
        }
    }

    /// A valid conjugation with `|b| ≤ min(cap, 1)`.
    pub fn conjugation(&mut self) -> ConjugationParams {
        let alpha = self.angle();
        let r = self.cap.min(1.0) * self.rng.random::<f64>();
        let gamma = self.angle();
        ConjugationParams::from_angles(alpha, r, gamma)
    }

    pub fn order(&mut self, range: std::ops::RangeInclusive<usize>) -> usize {
        self.rng.random_range(range)
    }
}

/// Draws `count` parameter sets from `family`.
pub fn sample_family(
    family: Family,
    count: usize,
    seed: u64,
    magnitude_cap: f64,
    order: Option<usize>,
) -> Result<Vec<ParameterSet>, RunError> {
    let mut s = Sampler::new(seed, magnitude_cap);
    (0..count)
        .map(|i| {
            let m = order.unwrap_or_else(|| s.order(family.default_orders()));
            sample_one(family, m, &mut s).map_err(|e| from_core(&format!("sample #{i} of `{}`", family.name()), e))
        })
        .collect()
}

fn sample_one(family: Family, m: usize, s: &mut Sampler) -> fockrel_core::Result<ParameterSet> {
    let zero = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    let set = |triple, conjugation| ParameterSet { triple, conjugation };
    Ok(match family {
        Family::Adjoint => {
            let p = s.conjugation();
            let (c, d, a, b) = (s.nonzero(), s.complex(), s.nonzero(), s.complex());
            set(SymbolTriple::adjoint_form(c, d, a, b, m, &p)?, Some(p))
        }
        Family::CSelfadjoint | Family::CSelfadjointPerturbed => {
            // the derived rate must also respect the cap
            let (p, c, a, b, mut d) = loop {
                let p = s.conjugation();
                let (c, a, b) = (s.nonzero(), s.nonzero(), s.complex());
                let d = p.shift + p.rotation * b - p.shift * a;
                if d.norm() <= s.cap {
                    break (p, c, a, b, d);
                }
            };
            if family == Family::CSelfadjointPerturbed {
                d += PERTURBATION;
            }
            set(SymbolTriple::adjoint_form(c, d, a, b, m, &p)?, Some(p))
        }
        Family::Hermitian | Family::HermitianPerturbed => {
            let cap = s.cap;
            let a = s.signed(MIN_MODULUS.min(0.5 * cap), cap);
            let c = s.signed(MIN_MODULUS.min(0.5 * cap), cap);
            let b = s.complex();
            let ratio = s.signed(0.5, 1.5);
            let mut slope = c64(a, 0.0);
            if family == Family::HermitianPerturbed {
                slope += c64(0.0, PERTURBATION);
            }
            let t = SymbolTriple::new(c64(c, 0.0), b.conj(), slope, b, c64(ratio * a, 0.0), b * ratio, m)?;
            set(t, None)
        }
        Family::Unitary => {
            let a = s.unimodular();
            let b = s.disc(s.cap.min(1.0));
            let c = s.unimodular() * (-0.5 * b.norm_sqr()).exp();
            set(SymbolTriple::new(c, -a * b.conj(), a, b, zero, one, m)?, None)
        }
        Family::Expansive => {
            let p = s.conjugation();
            let a = s.unimodular() * 2.0;
            let (c, d, b) = (s.nonzero(), s.complex(), s.complex());
            set(SymbolTriple::adjoint_form(c, d, a, b, m, &p)?, Some(p))
        }
        Family::Contractive => {
            let a = s.disc(CONTRACTIVE_RADIUS * s.cap.min(1.0));
            let a = if a.norm() < 0.05 { c64(0.05, 0.0) } else { a };
            let (c, d, b) = (s.nonzero(), s.complex(), s.complex());
            set(SymbolTriple::new(c, d, a, b, zero, one, m)?, None)
        }
        Family::IsometricShift => {
            let a = s.unimodular();
            let (c, b) = (s.nonzero(), s.complex());
            set(SymbolTriple::new(c, -a * b.conj(), a, b, zero, one, m)?, None)
        }
    })
}
