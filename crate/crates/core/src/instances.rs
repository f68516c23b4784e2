//! Instance constructors: the four-dimensional order-effect example, seeded
//! random unitaries / projectors / pairs with prescribed repeatability, and
//! the truncated shift operator.

use num_complex::Complex;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::linalg::{
    block_diag, complete_frame, is_projector, is_unitary, planar_rotation, svd, unitarity_residual,
    Matrix, Subspace, Vector, C,
};
use crate::measurement::{InstancePair, Measurement};
use crate::scalar::{Real, Tolerances};
use crate::{Error, Result};

/// Deterministic random stream: ChaCha8 keyed by `seed`, with an optional
/// stream index so parallel workers get independent, reproducible streams.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub const ALGORITHM: &'static str = "chacha8/v1";

    pub fn new(seed: u64) -> Self {
        Self::for_stream(seed, 0)
    }

    pub fn for_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn normal<T: Real>(&mut self) -> T {
        T::lit(StandardNormal.sample(&mut self.inner))
    }

    /// Standard complex Gaussian, `E|z|² = 1`.
    pub fn complex_normal<T: Real>(&mut self) -> C<T> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let re: f64 = StandardNormal.sample(&mut self.inner);
        let im: f64 = StandardNormal.sample(&mut self.inner);
        Complex::new(T::lit(re * s), T::lit(im * s))
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform<T: Real>(&mut self) -> T {
        T::lit((self.inner.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.inner.next_u64() % n as u64) as usize
    }

    /// Uniformly distributed unit vector.
    pub fn unit_vector<T: Real>(&mut self, dim: usize) -> Vector<T> {
        loop {
            let v = Vector::from_fn(dim, |_| self.complex_normal());
            if let Some(u) = v.normalized() {
                return u;
            }
        }
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// Orthonormal frame from Gram–Schmidt on complex Gaussian columns. With
/// the positive diagonal of `R` this is Haar distributed.
fn random_frame<T: Real>(dim: usize, rng: &mut SeededRng) -> Vec<Vector<T>> {
    let mut frame: Vec<Vector<T>> = Vec::with_capacity(dim);
    while frame.len() < dim {
        let mut v = Vector::from_fn(dim, |_| rng.complex_normal());
        for _ in 0..2 {
            for f in &frame {
                v.remove_component(f);
            }
        }
        if let Some(u) = v.normalized().filter(|_| v.norm() > T::lit(1e-3)) {
            frame.push(u);
        }
    }
    frame
}

fn matrix_from_columns<T: Real>(dim: usize, cols: &[Vector<T>]) -> Matrix<T> {
    let mut m = Matrix::zeros(dim);
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Haar-random unitary.
pub fn random_unitary<T: Real>(dim: usize, rng: &mut SeededRng) -> Matrix<T> {
    matrix_from_columns(dim, &random_frame(dim, rng))
}

/// `Q diag(1^rank, 0) Q*` for Haar-random `Q`.
pub fn random_projector<T: Real>(
    dim: usize,
    rank: usize,
    rng: &mut SeededRng,
) -> Result<Matrix<T>> {
    if rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let frame = random_frame::<T>(dim, rng);
    Ok(Matrix::projector_from_frame(dim, &frame[..rank]))
}

/// Unitary acting as an independent random unitary on each part of an
/// orthogonal partition of the space. Parts must be mutually orthogonal and
/// span the ambient space.
pub fn random_unitary_on_parts<T: Real>(
    parts: &[&Subspace<T>],
    rng: &mut SeededRng,
) -> Result<Matrix<T>> {
    let n = parts.first().map_or(0, |p| p.ambient_dim);
    let total: usize = parts.iter().map(|p| p.dim()).sum();
    if total != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: total,
        });
    }
    let mut u = Matrix::zeros(n);
    for part in parts {
        let k = part.dim();
        let block = random_unitary::<T>(k, rng);
        // F V F*
        for r in 0..n {
            for c in 0..n {
                let mut acc = C::new(T::zero(), T::zero());
                for a in 0..k {
                    for b in 0..k {
                        acc = acc + part.frame[a][r] * block[(a, b)] * part.frame[b][c].conj();
                    }
                }
                u[(r, c)] = u[(r, c)] + acc;
            }
        }
    }
    Ok(u)
}

/// Effect `Q diag(1^k, λ_{k+1}, …, λ_n) Q*` with the `λ` uniform in
/// `[0, 0.95]`, together with its `λ = 1` eigenspace (dimension `k`).
pub fn random_effect_with_unit_eigenspace<T: Real>(
    dim: usize,
    k: usize,
    rng: &mut SeededRng,
) -> Result<(Matrix<T>, Subspace<T>)> {
    if k > dim {
        return Err(Error::RankOutOfRange { rank: k, dim });
    }
    let frame = random_frame::<T>(dim, rng);
    let mut e = Matrix::zeros(dim);
    for (j, f) in frame.iter().enumerate() {
        let lambda = if j < k {
            T::one()
        } else {
            T::lit(0.95) * rng.uniform::<T>()
        };
        e = &e + &Matrix::outer(f, f).scale_real(lambda);
    }
    Ok((
        e,
        Subspace::from_orthonormal_frame(dim, frame[..k].to_vec()),
    ))
}

/// Random unit vector inside `sub` (the zero vector if `sub` is trivial).
pub fn random_unit_vector_in<T: Real>(sub: &Subspace<T>, rng: &mut SeededRng) -> Vector<T> {
    let coeffs = rng.unit_vector::<T>(sub.dim().max(1));
    let mut v = Vector::zeros(sub.ambient_dim);
    for (c, f) in coeffs.as_slice().iter().zip(&sub.frame) {
        v = &v + &f.scale(*c);
    }
    v
}

/// Complex Gaussian matrix scaled to spectral norm 1.
pub fn random_contraction<T: Real>(dim: usize, rng: &mut SeededRng) -> Matrix<T> {
    let g = Matrix::from_fn(dim, |_, _| rng.complex_normal());
    let top = svd(&g).singular_values.first().copied().unwrap_or(T::one());
    g.scale_real(T::one() / top)
}

/// `diag(V, W)` in a frame adapted to `(sub, sub^⊥)`.
pub fn random_unitary_preserving<T: Real>(sub: &Subspace<T>, rng: &mut SeededRng) -> Matrix<T> {
    let mut frame = sub.frame.clone();
    complete_frame(&mut frame, sub.ambient_dim);
    let complement = Subspace::from_orthonormal_frame(sub.ambient_dim, frame[sub.dim()..].to_vec());
    random_unitary_on_parts(&[sub, &complement], rng).expect("parts partition the space")
}

/// The four-dimensional example: `P₁` onto `span(e₁,e₂,e₃)`, `P₂` onto
/// `span(e₁,e₂,e₄)`, `U₁ = diag(U, 1)`, `U₂ = I`.
pub fn canonical_example<T: Real>(u: &Matrix<T>) -> Result<InstancePair<T>> {
    let tol = Tolerances::default();
    if u.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: u.dim(),
        });
    }
    if !is_unitary(u, &tol) {
        return Err(Error::NotUnitary {
            what: "U".into(),
            residual: unitarity_residual(u).as_f64(),
        });
    }
    let one = Matrix::identity(1);
    let (o, z) = (T::one(), T::zero());
    let a = Measurement::new(
        "A",
        Matrix::diag_real(&[o, o, o, z]),
        block_diag(&[u, &one]),
        &tol,
    )?;
    let b = Measurement::luders("B", Matrix::diag_real(&[o, o, z, o]), &tol)?;
    InstancePair::new(a, b)
}

/// [`canonical_example`] with `U` the rotation by `theta` in the `(e₂, e₃)`
/// plane.
pub fn canonical_example_theta<T: Real>(theta: T) -> InstancePair<T> {
    canonical_example(&planar_rotation(3, 1, 2, theta)).expect("rotation is unitary")
}

/// Dimensions `(dim H₁₂, dim L₁, dim L₂, dim H̃)` of a generated pair.
pub type PartDims = (usize, usize, usize, usize);

struct Geometry<T: Real> {
    h12: Subspace<T>,
    l1: Subspace<T>,
    l2: Subspace<T>,
    rest: Subspace<T>,
}

impl<T: Real> Geometry<T> {
    /// Four mutually orthogonal subspaces in general position.
    fn random(dims: PartDims, rng: &mut SeededRng) -> Self {
        let (d12, l1, l2, t) = dims;
        let n = d12 + l1 + l2 + t;
        let frame = random_frame::<T>(n, rng);
        let take = |from: usize, len: usize| {
            Subspace::from_orthonormal_frame(n, frame[from..from + len].to_vec())
        };
        Self {
            h12: take(0, d12),
            l1: take(d12, l1),
            l2: take(d12 + l1, l2),
            rest: take(d12 + l1 + l2, t),
        }
    }

    fn union(&self, parts: &[&Subspace<T>]) -> Subspace<T> {
        let frame = parts.iter().flat_map(|p| p.frame.iter().cloned()).collect();
        Subspace::from_orthonormal_frame(self.h12.ambient_dim, frame)
    }
}

/// Pair satisfying A-A, B-B, A-B-A and B-A-B: `U_j = diag(V_j, W_j, T_j)` on
/// `(H₁₂, L_j, H_j^⊥)`, all in general position.
pub fn no_go_generator<T: Real>(dims: PartDims, rng: &mut SeededRng) -> Result<InstancePair<T>> {
    if dims.0 == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    let g = Geometry::<T>::random(dims, rng);
    let h1 = g.union(&[&g.h12, &g.l1]);
    let h2 = g.union(&[&g.h12, &g.l2]);
    let out1 = g.union(&[&g.l2, &g.rest]);
    let out2 = g.union(&[&g.l1, &g.rest]);
    let u1 = random_unitary_on_parts(&[&g.h12, &g.l1, &out1], rng)?;
    let u2 = random_unitary_on_parts(&[&g.h12, &g.l2, &out2], rng)?;
    let tol = Tolerances::default();
    InstancePair::new(
        Measurement::new("A", h1.projector, u1, &tol)?,
        Measurement::new("B", h2.projector, u2, &tol)?,
    )
}

/// Pair satisfying A-A, B-B and A-B-A (B-A-B generically fails):
/// `U₁` is an arbitrary unitary of `H₁` (mixing `H₁₂` with `L₁`) times one of
/// `H₁^⊥`; `U₂ = diag(V₂, W₂, T₂)` on `(H₁₂, L₂, H₂^⊥)`.
pub fn aba_generator<T: Real>(dims: PartDims, rng: &mut SeededRng) -> Result<InstancePair<T>> {
    let g = Geometry::<T>::random(dims, rng);
    let h1 = g.union(&[&g.h12, &g.l1]);
    let h2 = g.union(&[&g.h12, &g.l2]);
    let out1 = g.union(&[&g.l2, &g.rest]);
    let out2 = g.union(&[&g.l1, &g.rest]);
    let u1 = random_unitary_on_parts(&[&h1, &out1], rng)?;
    let u2 = random_unitary_on_parts(&[&g.h12, &g.l2, &out2], rng)?;
    let tol = Tolerances::default();
    InstancePair::new(
        Measurement::new("A", h1.projector, u1, &tol)?,
        Measurement::new("B", h2.projector, u2, &tol)?,
    )
}

/// Shift operator `Me₁ = a e₂`, `Me_k = e_{k+1}` (`2 ≤ k < n`), truncated by
/// `Me_n = 0`, with `E = M*M = diag(|a|², 1, …, 1, 0)`.
///
/// The truncation keeps the eigenvalue `|a|²` of `E` but adds a zero
/// eigenvalue at `e_n`, so `EM = M` holds on every column except `e_{n−1}`
/// (whose image `e_n` is annihilated by `E`). In finite dimension `EM = M`
/// forces `E` to be a projector, so no truncation can keep both.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftInstance<T: Real> {
    pub a: C<T>,
    pub n: usize,
    pub m: Matrix<T>,
    pub e: Matrix<T>,
}

impl<T: Real> ShiftInstance<T> {
    /// `‖EM − M‖_F`.
    pub fn em_residual(&self) -> T {
        (&self.e * &self.m).distance(&self.m)
    }

    /// `‖(EM − M)e_k‖` summed over every column except the boundary column
    /// `e_{n−1}`.
    pub fn em_residual_interior(&self) -> T {
        let diff = &(&self.e * &self.m) - &self.m;
        (0..self.n)
            .filter(|&k| k != self.n - 2)
            .map(|k| diff.column(k).norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    pub fn is_projector(&self, tol: &Tolerances<T>) -> bool {
        is_projector(&self.e, tol)
    }
}

impl<T: Real> Serialize for ShiftInstance<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ShiftInstance", 4)?;
        st.serialize_field("a", &[self.a.re, self.a.im])?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("M", &self.m)?;
        st.serialize_field("E", &self.e)?;
        st.end()
    }
}

pub fn truncated_shift<T: Real>(a: C<T>, n: usize) -> Result<ShiftInstance<T>> {
    if n < 3 {
        return Err(Error::TruncationTooSmall(n));
    }
    let mut m = Matrix::zeros(n);
    m[(1, 0)] = a;
    for k in 1..n - 1 {
        m[(k + 1, k)] = C::new(T::one(), T::zero());
    }
    let e = &m.adjoint() * &m;
    Ok(ShiftInstance { a, n, m, e })
}
