//! Hermitian eigendecomposition and SVD by complex Jacobi rotations.
//!
//! Both routines reduce to the same primitive: a 2×2 unitary that
//! diagonalizes the Hermitian block `[[a, b], [b̄, d]]`. The eigensolver
//! applies it two-sided; the SVD applies it to the columns of `M` so that the
//! Gram matrix `M*M` is diagonalized implicitly (Hestenes).

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::{Matrix, Vector, C};
use crate::scalar::{Real, Tolerances};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEig<T: Real> {
    pub values: Vec<T>,
    pub vectors: Vec<Vector<T>>,
}

impl<T: Real> HermitianEig<T> {
    /// `Σ λ_i v_i v_i*`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.vectors.first().map_or(0, Vector::dim);
        let mut out = Matrix::zeros(n);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            let term = Matrix::outer(v, v).scale_real(*lambda);
            out = &out + &term;
        }
        out
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }
}

/// `M = W Σ V*` with singular values descending.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    pub w: Matrix<T>,
    pub singular_values: Vec<T>,
    pub v: Matrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn sigma(&self) -> Matrix<T> {
        Matrix::diag_real(&self.singular_values)
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        &(&self.w * &self.sigma()) * &self.v.adjoint()
    }
}

/// Rotation `g` (2×2, column-major pairs `[g_pp, g_pq, g_qp, g_qq]`) with
/// `g* [[a, b], [b̄, d]] g` diagonal. Returns the new diagonal `(a', d')`.
fn jacobi_rotation<T: Real>(a: T, d: T, b: C<T>) -> ([C<T>; 4], T, T) {
    let beta = b.norm();
    // Componentwise: complex division squares `beta`, which can underflow.
    let phase = C::new(b.re / beta, b.im / beta);
    let two = T::lit(2.0);
    let zeta = (d - a) / (two * beta);
    let t = if zeta == T::zero() {
        T::one()
    } else {
        zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt())
    };
    let c = (T::one() + t * t).sqrt().recip();
    let s = t * c;
    let e = phase.conj();
    let g = [
        C::new(c, T::zero()),
        C::new(s, T::zero()),
        e * C::new(-s, T::zero()),
        e * C::new(c, T::zero()),
    ];
    (g, a - t * beta, d + t * beta)
}

/// Applies `X ← X g` on columns `p, q`.
fn rotate_columns<T: Real>(x: &mut Matrix<T>, p: usize, q: usize, g: &[C<T>; 4]) {
    for k in 0..x.dim() {
        let xp = x[(k, p)];
        let xq = x[(k, q)];
        x[(k, p)] = xp * g[0] + xq * g[2];
        x[(k, q)] = xp * g[1] + xq * g[3];
    }
}

/// Applies `X ← g* X` on rows `p, q`.
fn rotate_rows<T: Real>(x: &mut Matrix<T>, p: usize, q: usize, g: &[C<T>; 4]) {
    for k in 0..x.dim() {
        let xp = x[(p, k)];
        let xq = x[(q, k)];
        x[(p, k)] = g[0].conj() * xp + g[2].conj() * xq;
        x[(q, k)] = g[1].conj() * xp + g[3].conj() * xq;
    }
}

fn off_diagonal_norm<T: Real>(h: &Matrix<T>) -> T {
    let n = h.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + h[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Stable permutation sorting `values` in descending order.
fn descending_order<T: Real>(values: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| {
        values[j]
            .partial_cmp(&values[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    idx
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized
/// before iterating; eigenvectors are phase-fixed (largest entry real
/// positive).
pub fn hermitian_eig<T: Real>(h: &Matrix<T>, tol: &Tolerances<T>) -> Result<HermitianEig<T>> {
    let residual = h.distance(&h.adjoint());
    if residual > tol.eq_tol {
        return Err(Error::NotHermitian {
            residual: residual.as_f64(),
        });
    }
    Ok(hermitian_eig_unchecked(h))
}

pub(crate) fn hermitian_eig_unchecked<T: Real>(h: &Matrix<T>) -> HermitianEig<T> {
    let n = h.dim();
    let half = T::lit(0.5);
    let mut a = Matrix::from_fn(n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * half);
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= eps * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                if b.norm() <= eps * eps * scale {
                    continue;
                }
                let (g, app, aqq) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, b);
                rotate_columns(&mut a, p, q, &g);
                rotate_rows(&mut a, p, q, &g);
                a[(p, q)] = C::zero();
                a[(q, p)] = C::zero();
                a[(p, p)] = C::new(app, T::zero());
                a[(q, q)] = C::new(aqq, T::zero());
                rotate_columns(&mut v, p, q, &g);
            }
        }
    }

    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let order = descending_order(&diag);
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut col = v.column(i);
            col.fix_phase();
            col
        })
        .collect();
    HermitianEig { values, vectors }
}

/// Orthonormal completion: appends standard basis vectors, orthogonalized
/// against `frame`, until the frame spans `dim` dimensions.
pub(crate) fn complete_frame<T: Real>(frame: &mut Vec<Vector<T>>, dim: usize) {
    // Pivoted: the basis vector with the largest residual always has norm at
    // least sqrt(missing / dim), so every step makes progress.
    while frame.len() < dim {
        let best = (0..dim)
            .map(|k| {
                let mut e = Vector::basis(dim, k);
                for _ in 0..2 {
                    for f in frame.iter() {
                        e.remove_component(f);
                    }
                }
                e
            })
            .max_by(|a, b| {
                a.norm()
                    .partial_cmp(&b.norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("dim > 0 when the frame is incomplete");
        match best.normalized() {
            Some(e) => frame.push(e),
            None => break,
        }
    }
}

/// Singular value decomposition `M = W Σ V*`.
pub fn svd<T: Real>(m: &Matrix<T>) -> Svd<T> {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), C::zero());
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    alpha = alpha + x.norm_sqr();
                    beta = beta + y.norm_sqr();
                    gamma = gamma + x.conj() * y;
                }
                if gamma.norm() <= eps * (alpha * beta).sqrt()
                    || gamma.norm() <= T::min_positive_value()
                {
                    continue;
                }
                rotated = true;
                let (g, _, _) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut a, p, q, &g);
                rotate_columns(&mut v, p, q, &g);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = (0..n).map(|j| a.column(j).norm()).collect();
    let order = descending_order(&norms);
    let singular_values: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let sigma_max = singular_values.first().copied().unwrap_or_else(T::zero);
    let cutoff = sigma_max * eps * T::lit(16.0 * n.max(1) as f64);

    // Left vectors from the dominant columns, re-orthogonalized so that
    // tiny singular values cannot spoil unitarity of W.
    let mut left: Vec<Vector<T>> = Vec::with_capacity(n);
    for (&j, &s) in order.iter().zip(&singular_values) {
        if s <= cutoff || s <= T::min_positive_value() {
            break;
        }
        let mut u = a.column(j).scale_real(s.recip());
        for _ in 0..2 {
            for f in &left {
                u.remove_component(f);
            }
        }
        if u.norm() < T::lit(0.5) {
            break;
        }
        left.push(u.normalized().expect("non-zero after norm check"));
    }
    complete_frame(&mut left, n);

    let mut w = Matrix::zeros(n);
    let mut v_sorted = Matrix::zeros(n);
    for (col, &j) in order.iter().enumerate() {
        w.set_column(col, &left[col]);
        v_sorted.set_column(col, &v.column(j));
    }
    Svd {
        w,
        singular_values,
        v: v_sorted,
    }
}

/// `exp(K)` for skew-Hermitian `K`, via the eigendecomposition of the
/// Hermitian matrix `iK`. The result is unitary to working precision.
pub fn unitary_from_skew<T: Real>(k: &Matrix<T>, tol: &Tolerances<T>) -> Result<Matrix<T>> {
    let residual = k.distance(&(-&k.adjoint()));
    if residual > tol.eq_tol {
        return Err(Error::NotSkewHermitian {
            residual: residual.as_f64(),
        });
    }
    Ok(exp_skew_unchecked(k))
}

pub(crate) fn exp_skew_unchecked<T: Real>(k: &Matrix<T>) -> Matrix<T> {
    let i = Complex::new(T::zero(), T::one());
    let eig = hermitian_eig_unchecked(&k.scale(i));
    let n = k.dim();
    let mut out = Matrix::zeros(n);
    for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
        // exp(-iλ)
        let phase = Complex::new(lambda.cos(), -lambda.sin());
        for r in 0..n {
            let vr = v[r] * phase;
            for c in 0..n {
                out[(r, c)] = out[(r, c)] + vr * v[c].conj();
            }
        }
    }
    out
}

pub fn is_hermitian<T: Real>(m: &Matrix<T>, tol: &Tolerances<T>) -> bool {
    m.distance(&m.adjoint()) <= tol.eq_tol
}

/// Largest of `‖U*U − I‖_F` and `‖UU* − I‖_F`.
pub fn unitarity_residual<T: Real>(u: &Matrix<T>) -> T {
    let id = Matrix::identity(u.dim());
    let uh = u.adjoint();
    (&uh * u).distance(&id).max((u * &uh).distance(&id))
}

pub fn is_unitary<T: Real>(u: &Matrix<T>, tol: &Tolerances<T>) -> bool {
    unitarity_residual(u) <= tol.eq_tol
}

/// `‖P² − P‖_F`, plus the Hermiticity defect.
pub fn projector_residual<T: Real>(p: &Matrix<T>) -> T {
    (p * p).distance(p).max(p.distance(&p.adjoint()))
}

pub fn is_projector<T: Real>(p: &Matrix<T>, tol: &Tolerances<T>) -> bool {
    is_hermitian(p, tol) && (p * p).distance(p) <= tol.eq_tol
}

pub fn is_effect<T: Real>(e: &Matrix<T>, tol: &Tolerances<T>) -> bool {
    match hermitian_eig(e, tol) {
        Ok(eig) => eig
            .values
            .iter()
            .all(|&l| l >= -tol.eq_tol && l <= T::one() + tol.eq_tol),
        Err(_) => false,
    }
}

/// `‖A·B − B·A‖_F`.
pub fn commutator_norm<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    a.commutator(b).frobenius_norm()
}

/// Planar rotation by `theta` in coordinates `(i, j)` (zero-based):
/// `e_i → cos θ e_i + sin θ e_j`, `e_j → −sin θ e_i + cos θ e_j`.
pub fn planar_rotation<T: Real>(dim: usize, i: usize, j: usize, theta: T) -> Matrix<T> {
    let mut r = Matrix::identity(dim);
    let (s, c) = theta.sin_cos();
    r[(i, i)] = C::new(c, T::zero());
    r[(j, j)] = C::new(c, T::zero());
    r[(j, i)] = C::new(s, T::zero());
    r[(i, j)] = C::new(-s, T::zero());
    r
}

/// Embeds `blocks` along the diagonal in the order given.
pub fn block_diag<T: Real>(blocks: &[&Matrix<T>]) -> Matrix<T> {
    let n: usize = blocks.iter().map(|b| b.dim()).sum();
    let mut out = Matrix::zeros(n);
    let mut offset = 0;
    for b in blocks {
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                out[(offset + i, offset + j)] = b[(i, j)];
            }
        }
        offset += b.dim();
    }
    out
}
