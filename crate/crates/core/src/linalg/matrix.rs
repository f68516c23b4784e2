//! Dense complex square matrices and vectors.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;
use crate::{Error, Result};

pub type C<T> = Complex<T>;

/// Dense `dim × dim` complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

/// Dense complex column vector.
#[derive(Clone, PartialEq)]
pub struct Vector<T> {
    data: Vec<C<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { C::one() } else { C::zero() })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows, rejecting ragged, empty or non-finite input.
    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::NotSquare {
                rows: dim,
                detail: format!("{:?}", rows.iter().map(Vec::len).collect::<Vec<_>>()),
            });
        }
        let m = Self {
            dim,
            data: rows.into_iter().flatten().collect(),
        };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C::new(T::lit(x), T::zero())).collect())
                .collect(),
        )
    }

    pub fn diag_real(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                C::new(values[i], T::zero())
            } else {
                C::zero()
            }
        })
    }

    /// Outer product `u v*`.
    pub fn outer(u: &Vector<T>, v: &Vector<T>) -> Self {
        Self::from_fn(u.dim(), |i, j| u[i] * v[j].conj())
    }

    /// Projector `Σ f f*` onto the span of orthonormal vectors.
    pub fn projector_from_frame(dim: usize, frame: &[Vector<T>]) -> Self {
        let mut p = Self::zeros(dim);
        for f in frame {
            for i in 0..dim {
                for j in 0..dim {
                    p[(i, j)] = p[(i, j)] + f[i] * f[j].conj();
                }
            }
        }
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vector<T> {
        Vector::from_fn(self.dim, |i| self[(i, j)])
    }

    pub fn set_column(&mut self, j: usize, v: &Vector<T>) {
        for i in 0..self.dim {
            self[(i, j)] = v[i];
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        for (k, z) in self.data.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite {
                    row: k / self.dim,
                    col: k % self.dim,
                });
            }
        }
        Ok(())
    }

    pub fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(C::new(s, T::zero()))
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim)
            .map(|i| self[(i, i)])
            .fold(C::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn mul_vec(&self, v: &Vector<T>) -> Vector<T> {
        debug_assert_eq!(self.dim, v.dim());
        Vector::from_fn(self.dim, |i| {
            self.row(i)
                .iter()
                .zip(v.as_slice())
                .fold(C::zero(), |acc, (a, b)| acc + *a * *b)
        })
    }

    /// `self · other · self*`.
    pub fn conjugate_by(&self, unitary: &Self) -> Self {
        &(unitary * self) * &unitary.adjoint()
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Quadratic form `⟨v, A v⟩`, real part.
    pub fn expectation(&self, v: &Vector<T>) -> T {
        v.dot(&self.mul_vec(v)).re
    }

    /// Square block `rows × cols` expressed in two orthonormal frames:
    /// entry `(a, b)` is `⟨f_a, M g_b⟩`.
    pub fn compress(&self, left: &[Vector<T>], right: &[Vector<T>]) -> Vec<Vec<C<T>>> {
        let images: Vec<Vector<T>> = right.iter().map(|g| self.mul_vec(g)).collect();
        left.iter()
            .map(|f| images.iter().map(|img| f.dot(img)).collect())
            .collect()
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|z| -*z).collect(),
        }
    }
}

impl<T: Real> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Real> Vector<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![C::zero(); dim],
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> C<T>) -> Self {
        Self {
            data: (0..dim).map(f).collect(),
        }
    }

    pub fn from_vec(data: Vec<C<T>>) -> Self {
        Self { data }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i| C::new(T::lit(values[i]), T::zero()))
    }

    /// Standard basis vector `e_k` (zero-based index).
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = C::one();
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    /// Inner product `⟨self, other⟩`, antilinear in `self`.
    pub fn dot(&self, other: &Self) -> C<T> {
        self.data
            .iter()
            .zip(&other.data)
            .fold(C::zero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    pub fn norm_sqr(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(C::new(s, T::zero()))
    }

    /// Returns `None` for a (numerically) zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self.scale_real(n.recip()))
        } else {
            None
        }
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Subtracts `⟨f, self⟩ f`.
    pub fn remove_component(&mut self, f: &Self) {
        let c = f.dot(self);
        for (x, y) in self.data.iter_mut().zip(&f.data) {
            *x = *x - c * *y;
        }
    }

    /// Multiplies by a global phase so the largest-magnitude entry is real
    /// and positive. Ties go to the lowest index.
    pub fn fix_phase(&mut self) {
        let mut best = 0;
        let mut best_mag = T::zero();
        for (k, z) in self.data.iter().enumerate() {
            // Small slack so entries equal up to rounding resolve to the first.
            if z.norm() > best_mag * (T::one() + T::lit(1e-12)) {
                best = k;
                best_mag = z.norm();
            }
        }
        if best_mag > T::zero() {
            let z = self.data[best];
            let phase = C::new(z.re / best_mag, -z.im / best_mag);
            for z in &mut self.data {
                *z = *z * phase;
            }
        }
    }
}

impl<T: Real> Index<usize> for Vector<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, i: usize) -> &C<T> {
        &self.data[i]
    }
}

impl<T: Real> IndexMut<usize> for Vector<T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut C<T> {
        &mut self.data[i]
    }
}

impl<T: Real> Add for &Vector<T> {
    type Output = Vector<T>;
    fn add(self, rhs: &Vector<T>) -> Vector<T> {
        Vector {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &Vector<T> {
    type Output = Vector<T>;
    fn sub(self, rhs: &Vector<T>) -> Vector<T> {
        Vector {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl<T: Real> fmt::Debug for Vector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.data.iter().map(|z| (z.re, z.im)))
            .finish()
    }
}
