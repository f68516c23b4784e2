//! Real parameter vectors ↔ unitaries via skew-Hermitian generators.
//!
//! A generator for `C^n` uses `n²` reals: `n` imaginary diagonal entries
//! followed, for each `k < l` in row-major order, by `(re, im)` of `K_kl`;
//! `K_lk = −conj(K_kl)`.

use num_complex::Complex;

use super::SearchProblem;
use crate::linalg::{exp_skew_unchecked, Matrix, Vector};
use crate::measurement::{InstancePair, Measurement};
use crate::scalar::{Real, Tolerances};
use crate::{Error, Result};

pub fn skew_from_params<T: Real>(x: &[T], n: usize) -> Matrix<T> {
    debug_assert_eq!(x.len(), n * n);
    let mut k = Matrix::zeros(n);
    for i in 0..n {
        k[(i, i)] = Complex::new(T::zero(), x[i]);
    }
    let mut idx = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = Complex::new(x[idx], x[idx + 1]);
            k[(i, j)] = z;
            k[(j, i)] = -z.conj();
            idx += 2;
        }
    }
    k
}

/// Inverse of [`skew_from_params`] (reads the diagonal and upper triangle).
pub fn params_from_skew<T: Real>(k: &Matrix<T>) -> Vec<T> {
    let n = k.dim();
    let mut x: Vec<T> = (0..n).map(|i| k[(i, i)].im).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            x.push(k[(i, j)].re);
            x.push(k[(i, j)].im);
        }
    }
    x
}

pub fn unitary_from_params<T: Real>(x: &[T], n: usize) -> Matrix<T> {
    exp_skew_unchecked(&skew_from_params(x, n))
}

/// Number of reals `parametrize` expects for `problem`.
pub fn parameter_len<T: Real>(problem: &SearchProblem<T>) -> usize {
    let per = problem.dim * problem.dim;
    if problem.fix_projectors.is_some() {
        2 * per
    } else {
        4 * per
    }
}

/// `Q diag(1^rank, 0) Q*`.
fn rotated_coordinate_projector<T: Real>(q: &Matrix<T>, rank: usize) -> Matrix<T> {
    let frame: Vec<Vector<T>> = (0..rank).map(|j| q.column(j)).collect();
    Matrix::projector_from_frame(q.dim(), &frame)
}

/// Unitaries `(U₁, U₂)` and projectors `(P₁, P₂)` encoded by `x`, without
/// validation.
pub(crate) fn decode<T: Real>(x: &[T], problem: &SearchProblem<T>) -> Result<[Matrix<T>; 4]> {
    let expected = parameter_len(problem);
    if x.len() != expected {
        return Err(Error::BadParameterLength {
            expected,
            actual: x.len(),
        });
    }
    let n = problem.dim;
    let per = n * n;
    let u1 = unitary_from_params(&x[..per], n);
    let u2 = unitary_from_params(&x[per..2 * per], n);
    let (p1, p2) = match &problem.fix_projectors {
        Some((p1, p2)) => (p1.clone(), p2.clone()),
        None => (
            rotated_coordinate_projector(
                &unitary_from_params(&x[2 * per..3 * per], n),
                problem.rank1,
            ),
            rotated_coordinate_projector(&unitary_from_params(&x[3 * per..], n), problem.rank2),
        ),
    };
    Ok([p1, u1, p2, u2])
}

/// Builds the pair encoded by `x`.
pub fn parametrize<T: Real>(x: &[T], problem: &SearchProblem<T>) -> Result<InstancePair<T>> {
    let [p1, u1, p2, u2] = decode(x, problem)?;
    let tol = Tolerances::default();
    InstancePair::new(
        Measurement::new("A", p1, u1, &tol)?,
        Measurement::new("B", p2, u2, &tol)?,
    )
}
