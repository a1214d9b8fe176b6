//! Linear relations (multi-valued linear operators) on a truncated space.
//!
//! A relation on `H = C^n` is stored as its graph, a subspace of `H ⊕ H`
//! whose vectors are `(f, g)` with `f` in the first `n` coordinates and `g`
//! in the last `n`.

use alloc::vec::Vec;

#[cfg(test)]
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::linalg::{
    column_space, complement, max_principal_angle, null_space, orthonormalize, principal_angles, svd, CMatrix, CVector,
    Subspace,
};

/// One generator `(f, g)` of a graph.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationPair {
    pub f: FockVector,
    pub g: FockVector,
}

impl RelationPair {
    pub fn new(f: FockVector, g: FockVector) -> Result<Self> {
        if f.truncation() != g.truncation() {
            return Err(Error::TruncationMismatch {
                left: f.truncation(),
                right: g.truncation(),
            });
        }
        Ok(Self { f, g })
    }

    pub fn truncation(&self) -> usize {
        self.f.truncation()
    }

    /// The graph vector `(f, g)` in `H ⊕ H`.
    pub fn graph_vector(&self) -> CVector {
        self.f.as_cvector().concat(self.g.as_cvector())
    }

    /// `‖(f, g)‖`.
    pub fn graph_norm(&self) -> f64 {
        self.f.norm().hypot(self.g.norm())
    }
}

/// Operator norm of a relation, measured through its quotient map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RelationNorm {
    Finite(f64),
    /// Kept for completeness; relations on a finite space always have a
    /// well-defined quotient map, so this is never produced here.
    Infinite,
}

impl RelationNorm {
    pub fn value(self) -> f64 {
        match self {
            RelationNorm::Finite(v) => v,
            RelationNorm::Infinite => f64::INFINITY,
        }
    }
}

/// Outcome of comparing two graphs by principal angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphComparison {
    pub holds: bool,
    /// Largest principal angle, over `min(dim_left, dim_right)` angles.
    pub max_angle: f64,
    pub dim_left: usize,
    pub dim_right: usize,
}

fn compare(left: &Subspace, right: &Subspace, tol: f64) -> Result<GraphComparison> {
    let max_angle = max_principal_angle(left, right)?;
    Ok(GraphComparison {
        holds: left.dim() == right.dim() && max_angle <= tol,
        max_angle,
        dim_left: left.dim(),
        dim_right: right.dim(),
    })
}

/// A linear relation on `C^space_dim`.
#[derive(Clone, Debug)]
pub struct LinearRelation {
    space_dim: usize,
    graph: Subspace,
}

impl LinearRelation {
    pub fn from_graph(space_dim: usize, graph: Subspace) -> Result<Self> {
        if graph.ambient_dim() != 2 * space_dim {
            return Err(Error::DimensionMismatch {
                expected: 2 * space_dim,
                found: graph.ambient_dim(),
            });
        }
        Ok(Self { space_dim, graph })
    }

    /// Span of the pairs `(f_i, g_i)` together with `(0, h_j)` for every
    /// extra multivalued direction `h_j`.
    pub fn from_pairs(
        truncation: usize,
        pairs: &[RelationPair],
        extra_multivalued: &[FockVector],
        rank_tol: f64,
    ) -> Result<Self> {
        let n = truncation + 1;
        let mut vectors = Vec::with_capacity(pairs.len() + extra_multivalued.len());
        for p in pairs {
            if p.f.truncation() != truncation || p.g.truncation() != truncation {
                return Err(Error::TruncationMismatch {
                    left: truncation,
                    right: if p.f.truncation() != truncation {
                        p.f.truncation()
                    } else {
                        p.g.truncation()
                    },
                });
            }
            vectors.push(p.graph_vector());
        }
        for h in extra_multivalued {
            if h.truncation() != truncation {
                return Err(Error::TruncationMismatch {
                    left: truncation,
                    right: h.truncation(),
                });
            }
            vectors.push(CVector::zeros(n).concat(h.as_cvector()));
        }
        Self::from_graph(n, orthonormalize(2 * n, &vectors, rank_tol)?)
    }

    /// Graph of the single-valued map `x ↦ M x`.
    pub fn from_matrix(m: &CMatrix, rank_tol: f64) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.cols(),
            });
        }
        let vectors: Vec<CVector> = (0..n).map(|j| CVector::basis(n, j).concat(&m.column(j))).collect();
        Self::from_graph(n, orthonormalize(2 * n, &vectors, rank_tol)?)
    }

    pub fn identity(space_dim: usize) -> Self {
        Self::from_matrix(&CMatrix::identity(space_dim), crate::linalg::DEFAULT_RANK_TOL).expect("identity is square")
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    /// Dimension of the graph.
    pub fn dim(&self) -> usize {
        self.graph.dim()
    }

    fn tol(&self) -> f64 {
        self.graph.rank_tol()
    }

    fn top(&self) -> CMatrix {
        let n = self.space_dim;
        self.graph.frame().block(0, n, 0, self.dim())
    }

    fn bottom(&self) -> CMatrix {
        let n = self.space_dim;
        self.graph.frame().block(n, 2 * n, 0, self.dim())
    }

    fn with_frame(&self, frame: CMatrix) -> Result<Self> {
        Self::from_graph(self.space_dim, Subspace::from_orthonormal_frame(frame, self.tol())?)
    }

    /// `{g : (0, g) ∈ G}`.
    pub fn multivalued_part(&self) -> Subspace {
        let null = null_space(&self.top(), self.tol());
        let vecs = self.bottom().matmul(&null).expect("block shapes agree");
        column_space(&vecs, self.tol(), self.tol())
    }

    /// `{f : (f, g) ∈ G for some g}`.
    pub fn domain(&self) -> Subspace {
        column_space(&self.top(), self.tol(), self.tol())
    }

    /// `{g : (f, g) ∈ G for some f}`.
    pub fn range(&self) -> Subspace {
        column_space(&self.bottom(), self.tol(), self.tol())
    }

    /// `{f : (f, 0) ∈ G}`.
    pub fn kernel(&self) -> Subspace {
        let null = null_space(&self.bottom(), self.tol());
        let vecs = self.top().matmul(&null).expect("block shapes agree");
        column_space(&vecs, self.tol(), self.tol())
    }

    /// The flipped relation `{(g, f) : (f, g) ∈ G}`.
    pub fn inverse(&self) -> LinearRelation {
        let n = self.space_dim;
        let frame = self.graph.frame();
        let flipped = CMatrix::from_fn(2 * n, self.dim(), |i, j| {
            if i < n {
                frame[(i + n, j)]
            } else {
                frame[(i - n, j)]
            }
        });
        Self {
            space_dim: n,
            graph: Subspace::from_orthonormal_frame(flipped, self.tol()).expect("row swap keeps orthonormality"),
        }
    }

    /// `{(u, v) : ⟨g, u⟩ = ⟨f, v⟩ for all (f, g) ∈ G}`, the orthogonal
    /// complement of `{(−g, f)}`.
    pub fn adjoint(&self) -> LinearRelation {
        let n = self.space_dim;
        let frame = self.graph.frame();
        let rotated = CMatrix::from_fn(2 * n, self.dim(), |i, j| {
            if i < n {
                -frame[(i + n, j)]
            } else {
                frame[(i - n, j)]
            }
        });
        let rotated = self.with_frame(rotated).expect("sign flip keeps orthonormality");
        Self {
            space_dim: n,
            graph: complement(&rotated.graph),
        }
    }

    /// Adjoint with respect to the form `⟨·, S ·⟩`.
    ///
    /// Linear `S` is the matrix itself and the result is
    /// `{(u, v) : ⟨g, S u⟩ = ⟨f, S v⟩}`. Antilinear `S` acts as
    /// `v ↦ S·conj(v)` and the result is the adjoint graph transported by it,
    /// `{(S x, S y) : (x, y) ∈ G(A*)}`.
    pub fn s_adjoint(&self, s: &CMatrix, antilinear: bool) -> Result<LinearRelation> {
        let n = self.space_dim;
        if s.rows() != n || s.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if s.rows() != n { s.rows() } else { s.cols() },
            });
        }
        if antilinear {
            let adj = self.adjoint();
            let top = s.matmul(&adj.top().conj())?;
            let bottom = s.matmul(&adj.bottom().conj())?;
            let moved = stack(&top, &bottom);
            let scale = svd(&moved).singular_values.first().copied().unwrap_or(0.0);
            let graph = column_space(&moved, self.tol() * scale, self.tol());
            return Self::from_graph(n, graph);
        }
        let sh = s.adjoint();
        let top = sh.matmul(&self.bottom())?;
        let bottom = sh.matmul(&self.top())?;
        let bottom = CMatrix::from_fn(n, self.dim(), |i, j| -bottom[(i, j)]);
        let pairing = stack(&top, &bottom);
        let scale = svd(&pairing).singular_values.first().copied().unwrap_or(0.0);
        let annihilated = column_space(&pairing, self.tol() * scale, self.tol());
        Self::from_graph(n, complement(&annihilated))
    }

    /// Singular values (descending) of the quotient map
    /// `dom(A) → H / A(0)`, realised on `A(0)^⊥` with orthonormal frames.
    pub fn quotient_singular_values(&self) -> Vec<f64> {
        let n = self.space_dim;
        let top = self.top();
        let dec = svd(&top);
        let tol = self.tol();
        let rank = dec.singular_values.iter().filter(|&&s| s > tol).count();
        if rank == 0 {
            return Vec::new();
        }
        let bottom = self.bottom();
        let d = self.dim();
        let null = CMatrix::from_fn(d, d - rank, |i, j| dec.v[(i, rank + j)]);
        let multivalued = column_space(&bottom.matmul(&null).expect("shapes"), tol, tol);
        let lift = CMatrix::from_fn(d, rank, |i, j| dec.v[(i, j)] / dec.singular_values[j]);
        let image = bottom.matmul(&lift).expect("shapes");
        let e = multivalued.frame();
        let coeffs = e.adjoint().matmul(&image).expect("shapes");
        let along = e.matmul(&coeffs).expect("shapes");
        let reduced = CMatrix::from_fn(n, rank, |i, j| image[(i, j)] - along[(i, j)]);
        svd(&reduced).singular_values
    }

    /// `‖A‖`: the norm of the quotient map (0 for a purely multivalued
    /// relation).
    pub fn relation_norm(&self) -> RelationNorm {
        RelationNorm::Finite(self.quotient_singular_values().first().copied().unwrap_or(0.0))
    }

    /// `inf ‖g mod A(0)‖ / ‖f‖` over the graph; 0 when the domain is trivial.
    pub fn lower_bound(&self) -> f64 {
        self.quotient_singular_values().last().copied().unwrap_or(0.0)
    }

    /// `G(A*) = G(A)`.
    pub fn is_hermitian(&self, tol: f64) -> Result<GraphComparison> {
        compare(&self.adjoint().graph, &self.graph, tol)
    }

    /// `G(A*_C) = G(A)` for the conjugation `v ↦ C·conj(v)`.
    pub fn is_c_selfadjoint(&self, c_matrix: &CMatrix, tol: f64) -> Result<GraphComparison> {
        compare(&self.s_adjoint(c_matrix, true)?.graph, &self.graph, tol)
    }

    /// `G(A*) = G(A⁻¹)`.
    pub fn is_unitary(&self, tol: f64) -> Result<GraphComparison> {
        compare(&self.adjoint().graph, &self.inverse().graph, tol)
    }

    /// Principal-angle comparison of two graphs over the same space.
    pub fn compare_graph(&self, other: &LinearRelation, tol: f64) -> Result<GraphComparison> {
        if self.space_dim != other.space_dim {
            return Err(Error::DimensionMismatch {
                expected: self.space_dim,
                found: other.space_dim,
            });
        }
        compare(&self.graph, &other.graph, tol)
    }

    /// All principal angles between the two graphs.
    pub fn graph_angles(&self, other: &LinearRelation) -> Result<Vec<f64>> {
        principal_angles(&self.graph, &other.graph)
    }
}

fn stack(top: &CMatrix, bottom: &CMatrix) -> CMatrix {
    let n = top.rows();
    CMatrix::from_fn(n + bottom.rows(), top.cols(), |i, j| {
        if i < n {
            top[(i, j)]
        } else {
            bottom[(i - n, j)]
        }
    })
}

/// Applies `v ↦ m · conj(v)` when `antilinear`, `v ↦ m · v` otherwise.
pub fn apply_operator(m: &CMatrix, v: &CVector, antilinear: bool) -> Result<CVector> {
    if antilinear {
        m.mul_vec(&v.conj())
    } else {
        m.mul_vec(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::linalg::{subspace_equal, DEFAULT_RANK_TOL};
    use alloc::vec;

    const TOL: f64 = DEFAULT_RANK_TOL;

    fn e(n: usize, i: usize) -> FockVector {
        FockVector::basis(n, i)
    }

    fn pair(f: FockVector, g: FockVector) -> RelationPair {
        RelationPair::new(f, g).unwrap()
    }

    fn diag(n: usize, d: impl Fn(usize) -> Complex64) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| if i == j { d(i) } else { c64(0.0, 0.0) })
    }

    #[test]
    fn from_pairs_examples() {
        let r = LinearRelation::from_pairs(2, &[pair(e(2, 0), e(2, 0))], &[], TOL).unwrap();
        assert_eq!(r.dim(), 1);
        let r = LinearRelation::from_pairs(2, &[], &[e(2, 0)], TOL).unwrap();
        assert_eq!(r.dim(), 1);
        assert!(subspace_equal(&r.multivalued_part(), &Subspace::coordinate(3, [0]), 1e-12).unwrap());
        let r = LinearRelation::from_pairs(2, &[pair(e(2, 1), e(2, 1)), pair(e(2, 1), e(2, 1))], &[], TOL).unwrap();
        assert_eq!(r.dim(), 1);
        assert!(LinearRelation::from_pairs(2, &[pair(e(3, 1), e(3, 1))], &[], TOL).is_err());
        assert!(RelationPair::new(e(2, 0), e(3, 0)).is_err());
    }

    #[test]
    fn identity_blocks() {
        let id = LinearRelation::identity(3);
        assert_eq!(id.multivalued_part().dim(), 0);
        assert_eq!(id.domain().dim(), 3);
        assert_eq!(id.range().dim(), 3);
        assert_eq!(id.kernel().dim(), 0);
        assert!(id.inverse().compare_graph(&id, 1e-12).unwrap().holds);
        assert!(id.adjoint().compare_graph(&id, 1e-12).unwrap().holds);
        assert!((id.relation_norm().value() - 1.0).abs() < 1e-12);
        assert!((id.inverse().relation_norm().value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purely_multivalued_relation() {
        let r = LinearRelation::from_pairs(2, &[], &[e(2, 0)], TOL).unwrap();
        assert_eq!(r.domain().dim(), 0);
        assert!(subspace_equal(&r.range(), &Subspace::coordinate(3, [0]), 1e-12).unwrap());
        assert!(subspace_equal(&r.inverse().kernel(), &Subspace::coordinate(3, [0]), 1e-12).unwrap());
        assert_eq!(r.relation_norm(), RelationNorm::Finite(0.0));
        // the adjoint is defined exactly on e_0^⊥ and maps it anywhere
        let adj = r.adjoint();
        assert!(subspace_equal(&adj.domain(), &Subspace::coordinate(3, [1, 2]), 1e-12).unwrap());
        assert_eq!(adj.dim(), 5);
    }

    #[test]
    fn injective_single_generator() {
        let g = FockVector::new(vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0)]).unwrap();
        let r = LinearRelation::from_pairs(2, &[pair(e(2, 1), g)], &[], TOL).unwrap();
        assert_eq!(r.kernel().dim(), 0);
        assert_eq!(r.domain().dim(), 1);
    }

    #[test]
    fn diagonal_map_is_hermitian_not_unitary() {
        let m = diag(5, |i| c64(0.5f64.powi(i as i32), 0.0));
        let r = LinearRelation::from_matrix(&m, TOL).unwrap();
        let herm = r.is_hermitian(1e-10).unwrap();
        assert!(herm.holds, "{herm:?}");
        assert!(!r.is_unitary(1e-6).unwrap().holds);
        assert!((r.relation_norm().value() - 1.0).abs() < 1e-12);
        assert!((r.lower_bound() - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_pairing() {
        let r = LinearRelation::from_pairs(0, &[pair(e(0, 0), e(0, 0).scaled(c64(0.0, 1.0)))], &[], TOL).unwrap();
        let h = r.is_hermitian(1e-6).unwrap();
        assert!(!h.holds);
        assert!(h.max_angle > 1.0);
        // coefficientwise conjugation transports the adjoint span{(1, -i)} back to span{(1, i)}
        let c = CMatrix::identity(1);
        let sa = r.s_adjoint(&c, true).unwrap();
        let want = LinearRelation::from_pairs(0, &[pair(e(0, 0), e(0, 0).scaled(c64(0.0, 1.0)))], &[], TOL).unwrap();
        assert!(sa.compare_graph(&want, 1e-12).unwrap().holds);
        let adj = r.adjoint();
        let minus_i =
            LinearRelation::from_pairs(0, &[pair(e(0, 0), e(0, 0).scaled(c64(0.0, -1.0)))], &[], TOL).unwrap();
        assert!(adj.compare_graph(&minus_i, 1e-12).unwrap().holds);
    }

    #[test]
    fn identity_is_c_selfadjoint_and_unitary() {
        let id = LinearRelation::identity(4);
        assert!(id.is_hermitian(1e-12).unwrap().holds);
        assert!(id.is_unitary(1e-12).unwrap().holds);
        assert!(id.is_c_selfadjoint(&CMatrix::identity(4), 1e-12).unwrap().holds);
        let flip = diag(4, |i| c64(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
        assert!(id.is_c_selfadjoint(&flip, 1e-12).unwrap().holds);
    }

    #[test]
    fn linear_s_adjoint_with_identity_is_adjoint() {
        let m = CMatrix::from_fn(3, 3, |i, j| c64(i as f64 - 0.5 * j as f64, (i * j) as f64 * 0.3));
        let r = LinearRelation::from_matrix(&m, TOL).unwrap();
        let sa = r.s_adjoint(&CMatrix::identity(3), false).unwrap();
        assert!(sa.compare_graph(&r.adjoint(), 1e-12).unwrap().holds);
        let want = LinearRelation::from_matrix(&m.adjoint(), TOL).unwrap();
        assert!(r.adjoint().compare_graph(&want, 1e-12).unwrap().holds);
        assert!(r.s_adjoint(&CMatrix::identity(2), false).is_err());
    }

    #[test]
    fn scalar_relation_norm() {
        let r = LinearRelation::from_pairs(1, &[pair(e(1, 0), e(1, 0).scaled(c64(3.0, 0.0)))], &[], TOL).unwrap();
        assert!((r.relation_norm().value() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn norm_ignores_multivalued_direction() {
        // (e_1, 2 e_1 + 5 e_0) with multivalued e_0 acts as e_1 ↦ 2 e_1 modulo e_0
        let g = FockVector::new(vec![c64(5.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let r = LinearRelation::from_pairs(2, &[pair(e(2, 1), g)], &[e(2, 0)], TOL).unwrap();
        assert!((r.relation_norm().value() - 2.0).abs() < 1e-12);
    }
}
