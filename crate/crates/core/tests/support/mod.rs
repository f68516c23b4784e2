//! Independent reference evaluation on nalgebra dense matrices. Nothing here
//! calls into the crate's linear algebra; instances are rebuilt entry by
//! entry.

#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector};
use seqmeas::{ComplexMatrix, ComplexVector, InstancePair};

pub type M = DMatrix<Complex<f64>>;
pub type V = DVector<Complex<f64>>;

pub fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

pub fn to_na(m: &ComplexMatrix) -> M {
    let n = m.dim();
    M::from_fn(n, n, |i, j| m[(i, j)])
}

pub fn vec_to_na(v: &ComplexVector) -> V {
    V::from_iterator(v.as_slice().len(), v.as_slice().iter().copied())
}

pub fn diag(d: &[f64]) -> M {
    M::from_diagonal(&V::from_iterator(d.len(), d.iter().map(|x| c(*x))))
}

pub fn basis(n: usize, k: usize) -> V {
    let mut v = V::zeros(n);
    v[k] = c(1.0);
    v
}

/// The four-dimensional example written out by hand.
pub struct Canonical {
    pub p1: M,
    pub u1: M,
    pub p2: M,
    pub u2: M,
}

pub fn canonical(theta: f64) -> Canonical {
    let (s, co) = theta.sin_cos();
    let mut u1 = M::identity(4, 4);
    u1[(1, 1)] = c(co);
    u1[(2, 1)] = c(s);
    u1[(1, 2)] = c(-s);
    u1[(2, 2)] = c(co);
    Canonical {
        p1: diag(&[1.0, 1.0, 1.0, 0.0]),
        u1,
        p2: diag(&[1.0, 1.0, 0.0, 1.0]),
        u2: M::identity(4, 4),
    }
}

impl Canonical {
    pub fn from_pair(pair: &InstancePair) -> Self {
        Self {
            p1: to_na(&pair.a.p),
            u1: to_na(&pair.a.u),
            p2: to_na(&pair.b.p),
            u2: to_na(&pair.b.u),
        }
    }

    pub fn m1(&self) -> M {
        &self.u1 * &self.p1
    }

    pub fn m2(&self) -> M {
        &self.u2 * &self.p2
    }

    /// `‖M_B M_A ψ‖²`.
    pub fn p_ab(&self, psi: &V) -> f64 {
        (self.m2() * self.m1() * psi).norm_squared()
    }

    pub fn p_ba(&self, psi: &V) -> f64 {
        (self.m1() * self.m2() * psi).norm_squared()
    }

    /// Probability of a final yes from `last` after renormalized `chain`.
    pub fn conditional(&self, chain: &[&M], last_p: &M, psi: &V) -> f64 {
        let mut phi = psi.clone();
        for m in chain {
            phi = *m * &phi;
            let n = phi.norm();
            phi /= c(n);
        }
        (last_p * &phi).dotc(&phi).re
    }

    pub fn d(&self) -> M {
        let (m1, m2) = (self.m1(), self.m2());
        m1.adjoint() * &self.p2 * &m1 - m2.adjoint() * &self.p1 * &m2
    }

    /// Spectral norm of `D` through nalgebra's Hermitian eigensolver.
    pub fn magnitude(&self) -> f64 {
        self.d()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn aa_a(&self) -> f64 {
        let m1 = self.m1();
        (&self.p1 * &m1 - &m1).norm()
    }

    pub fn aa_b(&self) -> f64 {
        let m2 = self.m2();
        (&self.p2 * &m2 - &m2).norm()
    }

    pub fn aba(&self) -> f64 {
        let chain = self.m2() * self.m1();
        (&self.p1 * &chain - &chain).norm()
    }

    pub fn bab(&self) -> f64 {
        let chain = self.m1() * self.m2();
        (&self.p2 * &chain - &chain).norm()
    }
}

/// Singular values, descending.
pub fn singular_values(m: &M) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &M) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}
