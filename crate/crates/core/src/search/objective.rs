//! Penalized objective. Residuals are computed here directly from the
//! transformer products rather than through `criteria`, so the feasibility
//! report can cross-check the two.

use super::param::decode;
use super::{Constraint, SearchProblem};
use crate::linalg::{hermitian_eig_unchecked, Matrix};
use crate::scalar::Real;
use crate::Result;

/// Everything the optimizer needs from one parameter vector.
#[derive(Debug, Clone)]
pub struct Evaluation<T> {
    pub magnitude: T,
    /// Frobenius residual per selected constraint, in `problem.constraints`
    /// order.
    pub residuals: Vec<(Constraint, T)>,
    /// `Σ residual²`.
    pub total_penalty: T,
    pub objective: T,
}

/// Products shared by all constraint residuals.
struct Products<T: Real> {
    p1: Matrix<T>,
    p2: Matrix<T>,
    m1: Matrix<T>,
    m2: Matrix<T>,
}

impl<T: Real> Products<T> {
    fn new(x: &[T], problem: &SearchProblem<T>) -> Result<Self> {
        let [p1, u1, p2, u2] = decode(x, problem)?;
        let m1 = &u1 * &p1;
        let m2 = &u2 * &p2;
        Ok(Self { p1, p2, m1, m2 })
    }

    /// `P M − M` for the constraint's projector `P` and chain `M`.
    fn defect(&self, c: Constraint) -> Matrix<T> {
        let (p, chain) = match c {
            Constraint::AaA => (&self.p1, self.m1.clone()),
            Constraint::AaB => (&self.p2, self.m2.clone()),
            Constraint::Aba => (&self.p1, &self.m2 * &self.m1),
            Constraint::Bab => (&self.p2, &self.m1 * &self.m2),
        };
        &(p * &chain) - &chain
    }

    fn magnitude(&self) -> T {
        let ab = &(&self.m1.adjoint() * &self.p2) * &self.m1;
        let ba = &(&self.m2.adjoint() * &self.p1) * &self.m2;
        hermitian_eig_unchecked(&(&ab - &ba)).spectral_norm()
    }
}

pub fn evaluate<T: Real>(x: &[T], problem: &SearchProblem<T>) -> Result<Evaluation<T>> {
    let prod = Products::new(x, problem)?;
    let residuals: Vec<(Constraint, T)> = problem
        .constraints
        .iter()
        .map(|&c| (c, prod.defect(c).frobenius_norm()))
        .collect();
    let total_penalty = residuals.iter().map(|(_, r)| *r * *r).sum::<T>();
    let magnitude = prod.magnitude();
    Ok(Evaluation {
        magnitude,
        objective: magnitude - problem.penalty_weight * total_penalty,
        residuals,
        total_penalty,
    })
}

/// `magnitude − penaltyWeight · Σ residual²`, to be maximized.
pub fn penalized_objective<T: Real>(x: &[T], problem: &SearchProblem<T>) -> Result<T> {
    evaluate(x, problem).map(|e| e.objective)
}

/// Stacked real and imaginary parts of every selected constraint defect;
/// zero exactly on the feasible set.
pub(crate) fn residual_vector<T: Real>(x: &[T], problem: &SearchProblem<T>) -> Result<Vec<T>> {
    let prod = Products::new(x, problem)?;
    let mut out = Vec::new();
    for &c in &problem.constraints {
        for z in prod.defect(c).as_slice() {
            out.push(z.re);
            out.push(z.im);
        }
    }
    Ok(out)
}
