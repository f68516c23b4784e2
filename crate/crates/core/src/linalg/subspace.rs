//! Subspaces as (orthonormal frame, projector) pairs, and the intersection /
//! relative-complement / four-way splitting built on them.

use serde::{Deserialize, Serialize};

use super::decomp::{hermitian_eig_unchecked, is_projector};
use super::matrix::{Matrix, Vector};
use crate::scalar::{Real, Tolerances};
use crate::{Error, Result};

/// A subspace of `C^n`. The zero subspace has an empty frame and a zero
/// projector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", bound = "")]
pub struct Subspace<T: Real> {
    pub ambient_dim: usize,
    pub frame: Vec<Vector<T>>,
    pub projector: Matrix<T>,
}

impl<T: Real> Subspace<T> {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            frame: Vec::new(),
            projector: Matrix::zeros(ambient_dim),
        }
    }

    pub fn whole(ambient_dim: usize) -> Self {
        Self::from_orthonormal_frame(
            ambient_dim,
            (0..ambient_dim)
                .map(|k| Vector::basis(ambient_dim, k))
                .collect(),
        )
    }

    /// Caller guarantees the frame is orthonormal.
    pub fn from_orthonormal_frame(ambient_dim: usize, frame: Vec<Vector<T>>) -> Self {
        let projector = Matrix::projector_from_frame(ambient_dim, &frame);
        Self {
            ambient_dim,
            frame,
            projector,
        }
    }

    /// Span of coordinate axes (zero-based indices).
    pub fn coordinate(ambient_dim: usize, axes: &[usize]) -> Self {
        Self::from_orthonormal_frame(
            ambient_dim,
            axes.iter()
                .map(|&k| Vector::basis(ambient_dim, k))
                .collect(),
        )
    }

    /// Eigenspace of a Hermitian matrix for eigenvalues `≥ threshold`.
    fn upper_eigenspace(h: &Matrix<T>, threshold: T) -> Self {
        let eig = hermitian_eig_unchecked(h);
        let frame = eig
            .values
            .iter()
            .zip(eig.vectors)
            .filter(|(l, _)| **l >= threshold)
            .map(|(_, v)| v)
            .collect();
        Self::from_orthonormal_frame(h.dim(), frame)
    }

    /// Range of an (approximate) orthogonal projector.
    pub fn from_projector(p: &Matrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        if !is_projector(p, tol) {
            return Err(Error::NotProjector {
                what: "subspace projector".into(),
            });
        }
        Ok(Self::upper_eigenspace(p, T::lit(0.5)))
    }

    /// Range of `M` (left singular vectors with singular value above
    /// `rankTol`), as a subspace.
    pub fn range_of(m: &Matrix<T>, tol: &Tolerances<T>) -> Self {
        let gram = m * &m.adjoint();
        Self::upper_eigenspace(&gram, tol.rank_tol * tol.rank_tol)
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    /// Orthogonal complement in the ambient space.
    pub fn complement(&self) -> Self {
        let q = &Matrix::identity(self.ambient_dim) - &self.projector;
        Self::upper_eigenspace(&q, T::lit(0.5))
    }

    /// `‖frame*·frame − I_k‖_F`.
    pub fn orthonormality_residual(&self) -> T {
        let k = self.dim();
        let mut s = T::zero();
        for a in 0..k {
            for b in 0..k {
                let mut g = self.frame[a].dot(&self.frame[b]);
                if a == b {
                    g = g - num_complex::Complex::new(T::one(), T::zero());
                }
                s = s + g.norm_sqr();
            }
        }
        s.sqrt()
    }

    /// `‖P_X U P_X − U P_X‖_F`: zero iff `U X ⊆ X`.
    pub fn invariance_residual(&self, u: &Matrix<T>) -> T {
        let up = u * &self.projector;
        (&self.projector * &up).distance(&up)
    }
}

/// `{x : P1 x = x and P2 x = x}` as the eigenvalue-2 eigenspace of `P1 + P2`.
pub fn subspace_intersection<T: Real>(
    p1: &Matrix<T>,
    p2: &Matrix<T>,
    tol: &Tolerances<T>,
) -> Result<Subspace<T>> {
    p1.check_same_dim(p2)?;
    for (name, p) in [("P1", p1), ("P2", p2)] {
        if !is_projector(p, tol) {
            return Err(Error::NotProjector { what: name.into() });
        }
    }
    let sum = p1 + p2;
    Ok(Subspace::upper_eigenspace(&sum, T::lit(2.0) - tol.rank_tol))
}

/// Orthogonal complement of `h12` inside `range(pj)`.
pub fn relative_complement<T: Real>(
    pj: &Matrix<T>,
    h12: &Subspace<T>,
    tol: &Tolerances<T>,
) -> Result<Subspace<T>> {
    pj.check_same_dim(&h12.projector)?;
    let nested = (pj * &h12.projector).distance(&h12.projector);
    if nested > tol.eq_tol {
        return Err(Error::NotNested {
            residual: nested.as_f64(),
        });
    }
    let diff = pj - &h12.projector;
    Ok(Subspace::upper_eigenspace(&diff, T::lit(0.5)))
}

/// `H = H₁₂ ⊕ L₁ ⊕ L₂ ⊕ H̃`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", bound = "")]
pub struct SubspaceDecomposition<T: Real> {
    pub h12: Subspace<T>,
    pub l1: Subspace<T>,
    pub l2: Subspace<T>,
    pub rest: Subspace<T>,
}

impl<T: Real> SubspaceDecomposition<T> {
    /// `(dim H₁₂, dim L₁, dim L₂, dim H̃)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (
            self.h12.dim(),
            self.l1.dim(),
            self.l2.dim(),
            self.rest.dim(),
        )
    }

    pub fn parts(&self) -> [&Subspace<T>; 4] {
        [&self.h12, &self.l1, &self.l2, &self.rest]
    }

    /// `H_j^⊥ = L_other ⊕ H̃` as one subspace (`j` is 1 or 2).
    pub fn outside(&self, j: usize) -> Subspace<T> {
        let other = if j == 1 { &self.l2 } else { &self.l1 };
        let mut frame = other.frame.clone();
        frame.extend(self.rest.frame.iter().cloned());
        Subspace::from_orthonormal_frame(self.h12.ambient_dim, frame)
    }
}

/// `‖P_{L₁} P_{L₂}‖_F`.
pub fn perpendicularity_residual<T: Real>(l1: &Subspace<T>, l2: &Subspace<T>) -> T {
    (&l1.projector * &l2.projector).frobenius_norm()
}

pub fn four_way_decomposition<T: Real>(
    p1: &Matrix<T>,
    p2: &Matrix<T>,
    tol: &Tolerances<T>,
) -> Result<SubspaceDecomposition<T>> {
    let h12 = subspace_intersection(p1, p2, tol)?;
    let l1 = relative_complement(p1, &h12, tol)?;
    let l2 = relative_complement(p2, &h12, tol)?;
    let perp = perpendicularity_residual(&l1, &l2);
    if perp > tol.eq_tol {
        return Err(Error::NotPerpendicular {
            residual: perp.as_f64(),
        });
    }
    let n = p1.dim();
    let covered = &(&h12.projector + &l1.projector) + &l2.projector;
    let rest = Subspace::upper_eigenspace(&(&Matrix::identity(n) - &covered), T::lit(0.5));
    Ok(SubspaceDecomposition { h12, l1, l2, rest })
}

/// Off-diagonal coupling `‖F_to* U F_from‖_F` between two parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Coupling {
    pub from: usize,
    pub to: usize,
    pub magnitude: f64,
}

#[derive(Debug, Clone)]
pub enum BlockDecomposition<T: Real> {
    /// Diagonal blocks, one per part, each expressed in that part's frame.
    Blocks(Vec<Matrix<T>>),
    /// `U` does not leave every part invariant.
    Violation {
        worst: Coupling,
        couplings: Vec<Coupling>,
        off_block_mass: f64,
    },
}

impl<T: Real> BlockDecomposition<T> {
    pub fn is_block_diagonal(&self) -> bool {
        matches!(self, Self::Blocks(_))
    }
}

/// Splits `U` along a partition of the space into orthonormal frames.
/// Fails only when the frames do not add up to the ambient dimension.
pub fn block_decompose<T: Real>(
    u: &Matrix<T>,
    parts: &[&Subspace<T>],
    tol: &Tolerances<T>,
) -> Result<BlockDecomposition<T>> {
    let total: usize = parts.iter().map(|p| p.dim()).sum();
    if total != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            actual: total,
        });
    }
    let mut blocks = Vec::with_capacity(parts.len());
    let mut couplings = Vec::new();
    let mut mass = T::zero();
    for (to, target) in parts.iter().enumerate() {
        for (from, source) in parts.iter().enumerate() {
            let block = u.compress(&target.frame, &source.frame);
            if to == from {
                let k = target.dim();
                let mut m = Matrix::zeros(k);
                for (a, row) in block.iter().enumerate() {
                    for (b, z) in row.iter().enumerate() {
                        m[(a, b)] = *z;
                    }
                }
                blocks.push(m);
            } else {
                let sq: T = block.iter().flatten().map(|z| z.norm_sqr()).sum();
                mass = mass + sq;
                if sq > T::zero() {
                    couplings.push(Coupling {
                        from,
                        to,
                        magnitude: sq.sqrt().as_f64(),
                    });
                }
            }
        }
    }
    let mass = mass.sqrt();
    if mass <= tol.eq_tol {
        return Ok(BlockDecomposition::Blocks(blocks));
    }
    let worst = couplings
        .iter()
        .cloned()
        .fold(None::<Coupling>, |best, c| match best {
            Some(b) if b.magnitude >= c.magnitude => Some(b),
            _ => Some(c),
        })
        .expect("positive off-block mass implies a coupling");
    Ok(BlockDecomposition::Violation {
        worst,
        couplings,
        off_block_mass: mass.as_f64(),
    })
}
