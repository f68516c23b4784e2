//! Real scalar abstraction.
//!
//! Every numerical routine in the crate is written against [`Real`], so the
//! same code runs in `f64` (the default, used by the CLI and the acceptance
//! suite) or `f32`. Default tolerances are part of the trait because a
//! threshold of `1e-9` is meaningless in single precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Operator-equality threshold (Frobenius norm).
    const EQ_TOL: f64;
    /// Eigenvalue cutoff for subspace extraction.
    const RANK_TOL: f64;
    /// Probability comparison threshold.
    const PROB_TOL: f64;
    /// Constraint feasibility threshold used by the search.
    const FEAS_TOL: f64;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const EQ_TOL: f64 = 1e-9;
    const RANK_TOL: f64 = 1e-8;
    const PROB_TOL: f64 = 1e-9;
    const FEAS_TOL: f64 = 1e-6;
}

impl Real for f32 {
    const EQ_TOL: f64 = 1e-4;
    const RANK_TOL: f64 = 1e-3;
    const PROB_TOL: f64 = 1e-4;
    const FEAS_TOL: f64 = 1e-3;
}

/// Numerical thresholds shared by every predicate in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tolerances<T> {
    pub eq_tol: T,
    pub rank_tol: T,
    pub prob_tol: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            eq_tol: T::lit(T::EQ_TOL),
            rank_tol: T::lit(T::RANK_TOL),
            prob_tol: T::lit(T::PROB_TOL),
        }
    }
}

impl<T: Real> Tolerances<T> {
    pub fn new(eq_tol: T, rank_tol: T, prob_tol: T) -> crate::Result<Self> {
        let tol = Self {
            eq_tol,
            rank_tol,
            prob_tol,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [
            ("eqTol", self.eq_tol),
            ("rankTol", self.rank_tol),
            ("probTol", self.prob_tol),
        ] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(crate::Error::InvalidTolerance {
                    name,
                    value: v.as_f64(),
                });
            }
        }
        Ok(())
    }

    /// Same thresholds scaled by `factor`, used where residuals accumulate
    /// through several matrix products.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            eq_tol: self.eq_tol * factor,
            rank_tol: self.rank_tol * factor,
            prob_tol: self.prob_tol * factor,
        }
    }
}
