//! Levenberg–Marquardt feasibility restoration: drives the stacked
//! constraint residual to zero from the simplex incumbent.

use super::objective::residual_vector;
use super::SearchProblem;
use crate::scalar::Real;
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct RestoreConfig<T> {
    pub max_steps: usize,
    /// Stop once `‖r‖₂` falls below this.
    pub target: T,
}

impl<T: Real> Default for RestoreConfig<T> {
    fn default() -> Self {
        Self {
            max_steps: 60,
            target: T::epsilon() * T::lit(1e4),
        }
    }
}

fn norm_sqr<T: Real>(r: &[T]) -> T {
    r.iter().map(|v| *v * *v).sum()
}

/// In-place Cholesky solve of `A x = b` for symmetric positive definite `A`
/// (row-major `n × n`). Returns `None` if `A` is not numerically SPD.
fn cholesky_solve<T: Real>(mut a: Vec<T>, mut b: Vec<T>, n: usize) -> Option<Vec<T>> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d = d - a[j * n + k] * a[j * n + k];
        }
        if d.is_nan() || d <= T::zero() {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s = s - a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s = s - a[k * n + i] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    Some(b)
}

/// Moves `x` onto (or towards) the zero set of the selected constraint
/// residuals. Returns the final `‖r‖₂`.
pub(crate) fn restore<T: Real>(
    x: &mut [T],
    problem: &SearchProblem<T>,
    cfg: &RestoreConfig<T>,
) -> Result<T> {
    let mut r = residual_vector(x, problem)?;
    let mut cost = norm_sqr(&r);
    if r.is_empty() {
        return Ok(T::zero());
    }
    let p = x.len();
    let m = r.len();
    let mut mu = T::lit(1e-3);
    let h_base = T::epsilon().sqrt();

    for _ in 0..cfg.max_steps {
        if cost.sqrt() <= cfg.target {
            break;
        }
        // Forward-difference Jacobian, column-major in `jac[col * m + row]`.
        let mut jac = vec![T::zero(); p * m];
        for col in 0..p {
            let h = h_base * T::one().max(x[col].abs());
            let saved = x[col];
            x[col] = saved + h;
            let shifted = residual_vector(x, problem)?;
            x[col] = saved;
            for row in 0..m {
                jac[col * m + row] = (shifted[row] - r[row]) / h;
            }
        }
        let mut jtj = vec![T::zero(); p * p];
        let mut jtr = vec![T::zero(); p];
        for i in 0..p {
            let ci = &jac[i * m..(i + 1) * m];
            jtr[i] = -ci.iter().zip(&r).map(|(a, b)| *a * *b).sum::<T>();
            for j in 0..=i {
                let cj = &jac[j * m..(j + 1) * m];
                let v = ci.iter().zip(cj).map(|(a, b)| *a * *b).sum::<T>();
                jtj[i * p + j] = v;
                jtj[j * p + i] = v;
            }
        }

        let mut accepted = false;
        for _ in 0..12 {
            let mut damped = jtj.clone();
            for i in 0..p {
                damped[i * p + i] = damped[i * p + i] + mu;
            }
            let Some(delta) = cholesky_solve(damped, jtr.clone(), p) else {
                mu = mu * T::lit(10.0);
                continue;
            };
            let trial: Vec<T> = x.iter().zip(&delta).map(|(a, d)| *a + *d).collect();
            let r_trial = residual_vector(&trial, problem)?;
            let c_trial = norm_sqr(&r_trial);
            if c_trial < cost {
                x.copy_from_slice(&trial);
                r = r_trial;
                cost = c_trial;
                mu = (mu / T::lit(3.0)).max(T::lit(1e-12));
                accepted = true;
                break;
            }
            mu = mu * T::lit(4.0);
        }
        if !accepted {
            break;
        }
    }
    Ok(cost.sqrt())
}
