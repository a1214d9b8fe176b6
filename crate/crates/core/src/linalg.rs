//! Dense complex linear algebra and the subspace toolkit.
//!
//! Rank decisions go through a one-sided Jacobi SVD (Householder-QR
//! preconditioned for tall inputs), which keeps small singular values
//! accurate to high relative precision. Subspaces are stored as orthonormal
//! frames and compared through principal angles, never by frame entries.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Default relative threshold for dropping singular directions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    // <x, y> = sum x_i conj(y_i)
    x.iter().zip(y).fold(ZERO, |acc, (a, b)| acc + a * b.conj())
}

fn norm2(x: &[Complex64]) -> f64 {
    let scale = x.iter().fold(0.0_f64, |m, z| m.max(z.re.abs()).max(z.im.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = x.iter().map(|z| (z / scale).norm_sqr()).sum();
    scale * sum.sqrt()
}

/// A dense complex vector with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector {
    entries: Vec<Complex64>,
}

impl CVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(Self { entries })
        } else {
            Err(Error::NonFinite)
        }
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self { entries: vec![ZERO; n] }
    }

    /// The `i`-th standard basis vector of length `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[i] = ONE;
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self {
            entries: values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    /// `<self, other> = Σ self_i · conj(other_i)` (linear in the first slot).
    pub fn inner(&self, other: &CVector) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(dot(&self.entries, &other.entries))
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.entries)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn add(&self, other: &CVector) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CVector) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &CVector, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Concatenation `(self, other)`, used for graph vectors in `H ⊕ H`.
    pub fn concat(&self, other: &CVector) -> Self {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Self { entries }
    }

    pub fn split_at(&self, mid: usize) -> (CVector, CVector) {
        let (a, b) = self.entries.split_at(mid);
        (Self { entries: a.to_vec() }, Self { entries: b.to_vec() })
    }

    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for CVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a `rows × columns.len()` matrix from column vectors.
    pub fn from_columns(rows: usize, columns: &[CVector]) -> Result<Self> {
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j].entries[i]))
    }

    fn from_column_slices(rows: usize, columns: &[Vec<Complex64>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::from_vec_unchecked(self.column_vec(j))
    }

    fn column_vec(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn columns(&self) -> Vec<CVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    fn column_vecs(&self) -> Vec<Vec<Complex64>> {
        (0..self.cols).map(|j| self.column_vec(j)).collect()
    }

    pub fn row(&self, i: usize) -> CVector {
        CVector::from_vec_unchecked(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &CVector) -> Result<CVector> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(CVector::from_vec_unchecked(
            (0..self.rows)
                .map(|i| {
                    self.data[i * self.cols..(i + 1) * self.cols]
                        .iter()
                        .zip(&v.entries)
                        .fold(ZERO, |acc, (a, b)| acc + a * b)
                })
                .collect(),
        ))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Copy of the block `rows r0..r1`, `cols c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> CMatrix {
        CMatrix::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Householder QR factorisation of a column set.
///
/// `reflectors[k]` acts on rows `k..rows`; `Q = H_0 H_1 ⋯ H_{p-1}`.
struct Householder {
    rows: usize,
    reflectors: Vec<Vec<Complex64>>,
    r: Vec<Vec<Complex64>>,
}

impl Householder {
    fn new(rows: usize, mut cols: Vec<Vec<Complex64>>) -> Self {
        let steps = rows.min(cols.len());
        let mut reflectors = Vec::with_capacity(steps);
        for k in 0..steps {
            let x = &cols[k][k..];
            let alpha_norm = norm2(x);
            let mut v: Vec<Complex64> = x.to_vec();
            if alpha_norm == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            let phase = if x[0].norm() == 0.0 { ONE } else { x[0] / x[0].norm() };
            let alpha = -phase * alpha_norm;
            v[0] -= alpha;
            let vn = norm2(&v);
            if vn == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            for z in v.iter_mut() {
                *z /= vn;
            }
            for col in cols.iter_mut().skip(k) {
                // H x = x - 2 v (v^H x)
                let s = dot(&col[k..], &v) * 2.0;
                for (c, vi) in col[k..].iter_mut().zip(&v) {
                    *c -= vi * s;
                }
            }
            reflectors.push(v);
        }
        Self {
            rows,
            reflectors,
            r: cols,
        }
    }

    /// `x ← Q x`.
    fn apply_q(&self, x: &mut [Complex64]) {
        for (k, v) in self.reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            let s = dot(&x[k..], v) * 2.0;
            for (c, vi) in x[k..].iter_mut().zip(v) {
                *c -= vi * s;
            }
        }
    }

    fn q_column(&self, j: usize) -> Vec<Complex64> {
        let mut e = vec![ZERO; self.rows];
        e[j] = ONE;
        self.apply_q(&mut e);
        e
    }
}

/// Singular value decomposition `A V = U Σ`.
#[derive(Clone, Debug)]
pub struct Svd {
    /// Left singular vectors (`rows × cols`); a column is zero when the
    /// matching singular value is exactly zero.
    pub u: CMatrix,
    /// Singular values, descending.
    pub singular_values: Vec<f64>,
    /// Right singular vectors (`cols × cols`, unitary).
    pub v: CMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 100;

fn jacobi(cols: &mut [Vec<Complex64>], v: &mut [Vec<Complex64>]) {
    let n = cols.len();
    let eps = f64::EPSILON;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = dot(&cols[q], &cols[p]); // a_p^H a_q
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(cols, p, q, c, s, phase_conj);
                rotate(v, p, q, c, s, phase_conj);
            }
        }
        if !rotated {
            break;
        }
    }
}

fn rotate(cols: &mut [Vec<Complex64>], p: usize, q: usize, c: f64, s: f64, phase_conj: Complex64) {
    let (lo, hi) = cols.split_at_mut(q);
    let cp = &mut lo[p];
    let cq = &mut hi[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yq = *y * phase_conj;
        let xp = *x;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

/// Jacobi SVD of a dense complex matrix.
pub fn svd(a: &CMatrix) -> Svd {
    let (m, n) = (a.rows, a.cols);
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            e
        })
        .collect();
    let (work, qr) = if m > n {
        let qr = Householder::new(m, a.column_vecs());
        let r: Vec<Vec<Complex64>> =
            qr.r.iter()
                .enumerate()
                .map(|(j, col)| (0..n).map(|i| if i <= j { col[i] } else { ZERO }).collect())
                .collect();
        (r, Some(qr))
    } else {
        (a.column_vecs(), None)
    };
    let mut work = work;
    jacobi(&mut work, &mut v);

    let sigma: Vec<f64> = work.iter().map(|c| norm2(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap_or(core::cmp::Ordering::Equal));

    let mut u_cols = Vec::with_capacity(n);
    let mut v_cols = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for &j in &order {
        let s = sigma[j];
        let mut col: Vec<Complex64> = if s > 0.0 {
            work[j].iter().map(|z| z / s).collect()
        } else {
            vec![ZERO; work[j].len()]
        };
        if let Some(qr) = &qr {
            let mut full = vec![ZERO; m];
            full[..n].copy_from_slice(&col);
            qr.apply_q(&mut full);
            col = full;
        }
        u_cols.push(col);
        v_cols.push(v[j].clone());
        values.push(s);
    }
    Svd {
        u: CMatrix::from_column_slices(m, &u_cols),
        singular_values: values,
        v: CMatrix::from_column_slices(n, &v_cols),
    }
}

/// Classical Gram–Schmidt with one re-orthogonalisation pass.
fn reorthonormalize(cols: &mut Vec<Vec<Complex64>>) {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(cols.len());
    for col in cols.iter() {
        let mut x = col.clone();
        for _ in 0..2 {
            for q in &out {
                let c = dot(&x, q);
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi -= qi * c;
                }
            }
        }
        let n = norm2(&x);
        if n > 0.0 {
            for xi in x.iter_mut() {
                *xi /= n;
            }
            out.push(x);
        }
    }
    *cols = out;
}

/// A linear subspace of `C^n`, stored as an orthonormal frame.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    frame: CMatrix,
    rank_tol: f64,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            frame: CMatrix::zeros(ambient_dim, 0),
            rank_tol: DEFAULT_RANK_TOL,
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            frame: CMatrix::identity(ambient_dim),
            rank_tol: DEFAULT_RANK_TOL,
        }
    }

    /// Span of the standard basis vectors `e_i`, `i ∈ indices`.
    pub fn coordinate(ambient_dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let cols: Vec<CVector> = indices.into_iter().map(|i| CVector::basis(ambient_dim, i)).collect();
        Self {
            ambient_dim,
            frame: CMatrix::from_columns(ambient_dim, &cols).expect("basis vectors have ambient length"),
            rank_tol: DEFAULT_RANK_TOL,
        }
    }

    fn from_frame_cols(ambient_dim: usize, cols: &[Vec<Complex64>], rank_tol: f64) -> Self {
        Self {
            ambient_dim,
            frame: CMatrix::from_column_slices(ambient_dim, cols),
            rank_tol,
        }
    }

    /// Wraps a frame whose columns are already orthonormal.
    ///
    /// Fails when `frameᴴ·frame` differs from the identity by more than 1e-10.
    pub fn from_orthonormal_frame(frame: CMatrix, rank_tol: f64) -> Result<Self> {
        let gram = frame.adjoint().matmul(&frame)?;
        if gram.max_abs_diff(&CMatrix::identity(frame.cols)) > 1e-10 {
            return Err(Error::Precondition("frame columns are not orthonormal".into()));
        }
        Ok(Self {
            ambient_dim: frame.rows,
            frame,
            rank_tol,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.frame.cols
    }

    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn basis(&self) -> Vec<CVector> {
        self.frame.columns()
    }

    /// Zero-pads every frame vector to `new_dim` coordinates.
    pub fn embed(&self, new_dim: usize) -> Result<Subspace> {
        if new_dim < self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: new_dim,
            });
        }
        let frame = CMatrix::from_fn(new_dim, self.dim(), |i, j| {
            if i < self.ambient_dim {
                self.frame[(i, j)]
            } else {
                ZERO
            }
        });
        Ok(Subspace {
            ambient_dim: new_dim,
            frame,
            rank_tol: self.rank_tol,
        })
    }

    /// Distance from `v` to the subspace relative to `‖v‖` (0 for `v = 0`).
    pub fn relative_residual(&self, v: &CVector) -> Result<f64> {
        let p = project(self, v)?;
        let n = v.norm();
        if n == 0.0 {
            return Ok(0.0);
        }
        Ok(v.sub(&p)?.norm() / n)
    }
}

/// Orthonormal frame for the span of `vectors` in `C^ambient_dim`.
///
/// Each nonzero vector is scaled to unit length first so the rank decision
/// does not depend on generator scaling; singular directions below
/// `rank_tol · σ_max` are dropped.
pub fn orthonormalize(ambient_dim: usize, vectors: &[CVector], rank_tol: f64) -> Result<Subspace> {
    if rank_tol <= 0.0 || !rank_tol.is_finite() {
        return Err(Error::InvalidTolerance(rank_tol));
    }
    let mut cols = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.len() != ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: v.len(),
            });
        }
        let n = v.norm();
        if !n.is_finite() {
            return Err(Error::NonFinite);
        }
        if n > 0.0 {
            cols.push(v.entries.iter().map(|z| z / n).collect::<Vec<_>>());
        }
    }
    if cols.is_empty() {
        let mut s = Subspace::zero(ambient_dim);
        s.rank_tol = rank_tol;
        return Ok(s);
    }
    let a = CMatrix::from_column_slices(ambient_dim, &cols);
    let dec = svd(&a);
    let smax = dec.singular_values[0];
    let mut frame: Vec<Vec<Complex64>> = dec
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > rank_tol * smax)
        .map(|(j, _)| dec.u.column_vec(j))
        .collect();
    reorthonormalize(&mut frame);
    Ok(Subspace::from_frame_cols(ambient_dim, &frame, rank_tol))
}

/// Column space of `a`: left singular vectors whose singular value exceeds
/// the absolute threshold `tol`.
pub fn column_space(a: &CMatrix, tol: f64, rank_tol: f64) -> Subspace {
    if a.cols == 0 {
        let mut s = Subspace::zero(a.rows);
        s.rank_tol = rank_tol;
        return s;
    }
    let dec = svd(a);
    let mut frame: Vec<Vec<Complex64>> = dec
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol)
        .map(|(j, _)| dec.u.column_vec(j))
        .collect();
    reorthonormalize(&mut frame);
    Subspace::from_frame_cols(a.rows, &frame, rank_tol)
}

/// Orthonormal basis (as columns) of `{x : ‖a x‖ ≤ tol ‖x‖}` spanned by the
/// right singular vectors with singular value at most `tol`.
pub fn null_space(a: &CMatrix, tol: f64) -> CMatrix {
    let dec = svd(a);
    let keep: Vec<usize> = (0..a.cols)
        .filter(|&j| dec.singular_values.get(j).is_none_or(|&s| s <= tol))
        .collect();
    CMatrix::from_fn(a.cols, keep.len(), |i, j| dec.v[(i, keep[j])])
}

/// Orthogonal complement of `s` in its ambient space.
pub fn complement(s: &Subspace) -> Subspace {
    let n = s.ambient_dim;
    let k = s.dim();
    if k == 0 {
        let mut full = Subspace::full(n);
        full.rank_tol = s.rank_tol;
        return full;
    }
    let qr = Householder::new(n, s.frame.column_vecs());
    let mut cols: Vec<Vec<Complex64>> = (k..n).map(|j| qr.q_column(j)).collect();
    reorthonormalize(&mut cols);
    Subspace::from_frame_cols(n, &cols, s.rank_tol)
}

fn check_ambient(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.ambient_dim != b.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: a.ambient_dim,
            found: b.ambient_dim,
        });
    }
    Ok(())
}

/// Principal angles between two subspaces, ascending, in `[0, π/2]`.
///
/// There are `min(dim s1, dim s2)` angles; when the dimensions differ, the
/// largest one measures how far the smaller subspace is from lying inside
/// the larger. Small angles come from sines and large ones from cosines so
/// both ends stay accurate.
pub fn principal_angles(s1: &Subspace, s2: &Subspace) -> Result<Vec<f64>> {
    check_ambient(s1, s2)?;
    let (small, big) = if s1.dim() <= s2.dim() { (s1, s2) } else { (s2, s1) };
    let d = small.dim();
    if d == 0 {
        return Ok(Vec::new());
    }
    // tall d2 × d: the Jacobi sweep then runs over d columns only
    let coeffs = big.frame.adjoint().matmul(&small.frame)?;
    let cosines = svd(&coeffs).singular_values;
    let proj = big.frame.matmul(&coeffs)?;
    let resid = CMatrix::from_fn(small.ambient_dim, d, |i, j| small.frame[(i, j)] - proj[(i, j)]);
    let mut sines = svd(&resid).singular_values;
    sines.reverse();
    let half_pi = core::f64::consts::FRAC_PI_2;
    Ok((0..d)
        .map(|k| {
            let c = cosines.get(k).copied().unwrap_or(0.0).min(1.0);
            let s = sines[k].min(1.0);
            let theta = if c * c >= 0.5 { s.asin() } else { c.acos() };
            theta.clamp(0.0, half_pi)
        })
        .collect())
}

/// Largest principal angle (0 when either subspace is trivial).
pub fn max_principal_angle(s1: &Subspace, s2: &Subspace) -> Result<f64> {
    Ok(principal_angles(s1, s2)?.into_iter().fold(0.0, f64::max))
}

/// Equal dimension and every principal angle at most `tol`.
pub fn subspace_equal(s1: &Subspace, s2: &Subspace, tol: f64) -> Result<bool> {
    check_ambient(s1, s2)?;
    if s1.dim() != s2.dim() {
        return Ok(false);
    }
    Ok(max_principal_angle(s1, s2)? <= tol)
}

/// Orthogonal projection of `v` onto `s`.
pub fn project(s: &Subspace, v: &CVector) -> Result<CVector> {
    if v.len() != s.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: s.ambient_dim,
            found: v.len(),
        });
    }
    let coeffs = s.frame.adjoint().mul_vec(v)?;
    s.frame.mul_vec(&coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn v(re: &[f64]) -> CVector {
        CVector::from_real(re)
    }

    fn gram_det(vs: &[CVector]) -> f64 {
        // brute-force 2x2/3x3 Gram determinant via cofactor expansion on the real part
        let k = vs.len();
        let g: Vec<Vec<Complex64>> = (0..k)
            .map(|i| (0..k).map(|j| vs[i].inner(&vs[j]).unwrap()).collect())
            .collect();
        match k {
            1 => g[0][0].re,
            2 => (g[0][0] * g[1][1] - g[0][1] * g[1][0]).re,
            3 => {
                (g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
                    + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]))
                    .re
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn orthonormalize_identity_and_collinear() {
        let s = orthonormalize(2, &[v(&[1.0, 0.0]), v(&[0.0, 1.0])], 1e-10).unwrap();
        assert_eq!(s.dim(), 2);
        let s = orthonormalize(2, &[v(&[1.0, 0.0]), v(&[2.0, 0.0])], 1e-10).unwrap();
        assert_eq!(s.dim(), 1);
        let e0 = Subspace::coordinate(2, [0]);
        assert!(subspace_equal(&s, &e0, 1e-12).unwrap());
    }

    #[test]
    fn orthonormalize_overcomplete_rank_matches_gram() {
        let vs = [v(&[1.0, 1.0]), v(&[1.0, -1.0]), v(&[1.0, 0.0])];
        // every triple in C^2 is dependent, every listed pair is independent
        assert!(gram_det(&vs).abs() < 1e-12);
        assert!(gram_det(&vs[..2]) > 1e-6);
        let s = orthonormalize(2, &vs, 1e-10).unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn orthonormalize_empty_and_mismatch() {
        let s = orthonormalize(3, &[], 1e-10).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s.ambient_dim(), 3);
        assert!(matches!(
            orthonormalize(2, &[v(&[1.0, 0.0, 0.0])], 1e-10),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(orthonormalize(2, &[v(&[1.0, 0.0])], 0.0).is_err());
    }

    #[test]
    fn complement_examples() {
        let c = complement(&Subspace::coordinate(2, [0]));
        assert!(subspace_equal(&c, &Subspace::coordinate(2, [1]), 1e-12).unwrap());
        let c = complement(&Subspace::zero(3));
        assert_eq!(c.dim(), 3);
        let diag = orthonormalize(2, &[v(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])], 1e-10).unwrap();
        let c = complement(&diag);
        assert_eq!(c.dim(), 1);
        let w = c.basis()[0].clone();
        assert!(w.inner(&diag.basis()[0]).unwrap().norm() < 1e-14);
        let anti = orthonormalize(2, &[v(&[1.0, -1.0])], 1e-10).unwrap();
        assert!(subspace_equal(&c, &anti, 1e-12).unwrap());
    }

    #[test]
    fn principal_angle_examples() {
        let e0 = Subspace::coordinate(2, [0]);
        let e1 = Subspace::coordinate(2, [1]);
        let diag = orthonormalize(2, &[v(&[1.0, 1.0])], 1e-10).unwrap();
        assert_eq!(principal_angles(&e0, &e0).unwrap(), [0.0]);
        assert!((principal_angles(&e0, &e1).unwrap()[0] - FRAC_PI_2).abs() < 1e-14);
        // oracle: arccos |<(1,0),(1,1)/√2>| = π/4
        let oracle = (FRAC_1_SQRT_2).acos();
        let got = principal_angles(&e0, &diag).unwrap()[0];
        assert!((got - oracle).abs() < 1e-12);
        assert!((got - FRAC_PI_4).abs() < 1e-12);
        assert!(subspace_equal(&e0, &e0, 1e-12).unwrap());
        assert!(!subspace_equal(&e0, &e1, 1e-6).unwrap());
        assert!(!subspace_equal(&e0, &diag, 1e-6).unwrap());
        assert!(principal_angles(&e0, &Subspace::zero(3)).is_err());
    }

    #[test]
    fn tiny_angles_resolved() {
        let eps = 1e-11;
        let a = Subspace::coordinate(2, [0]);
        let b = orthonormalize(2, &[v(&[1.0, eps])], 1e-14).unwrap();
        let th = principal_angles(&a, &b).unwrap()[0];
        assert!((th - eps).abs() < 1e-20 + 1e-6 * eps);
    }

    #[test]
    fn project_examples() {
        let e0 = Subspace::coordinate(2, [0]);
        let p = project(&e0, &v(&[3.0, 4.0])).unwrap();
        assert!(p.max_abs_diff(&v(&[3.0, 0.0])) < 1e-15);
        let p = project(&Subspace::zero(2), &v(&[3.0, 4.0])).unwrap();
        assert_eq!(p, CVector::zeros(2));
        let diag = orthonormalize(2, &[v(&[1.0, 1.0])], 1e-10).unwrap();
        let p = project(&diag, &v(&[1.0, 0.0])).unwrap();
        assert!(p.max_abs_diff(&v(&[0.5, 0.5])) < 1e-15);
        assert!(project(&e0, &v(&[1.0])).is_err());
    }

    #[test]
    fn svd_reconstructs_complex_matrix() {
        let a = CMatrix::from_fn(5, 3, |i, j| {
            c64((i * 3 + j) as f64 * 0.3 - 1.0, (i as f64 - j as f64) * 0.7)
        });
        let d = svd(&a);
        let av = a.matmul(&d.v).unwrap();
        for j in 0..3 {
            for i in 0..5 {
                let want = d.u[(i, j)] * d.singular_values[j];
                assert!((av[(i, j)] - want).norm() < 1e-12);
            }
        }
        let vhv = d.v.adjoint().matmul(&d.v).unwrap();
        assert!(vhv.max_abs_diff(&CMatrix::identity(3)) < 1e-13);
        // wide input
        let w = a.adjoint();
        let dw = svd(&w);
        for k in 0..3 {
            assert!((dw.singular_values[k] - d.singular_values[k]).abs() < 1e-12);
        }
    }
}
