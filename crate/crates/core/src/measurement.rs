//! Measurements `(P, U)` with transformer `M = UP`, and sequential
//! probabilities of the all-"yes" outcome chain.

use serde::{Deserialize, Serialize};

use crate::linalg::{is_projector, is_unitary, svd, unitarity_residual, Matrix, Vector};
use crate::scalar::{Real, Tolerances};
use crate::{Error, Result};

/// A projector effect `P` with state transformer `ψ ↦ UPψ / ‖UPψ‖`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct Measurement<T: Real> {
    #[serde(skip)]
    pub label: String,
    #[serde(rename = "P")]
    pub p: Matrix<T>,
    #[serde(rename = "U")]
    pub u: Matrix<T>,
}

impl<T: Real> Measurement<T> {
    pub fn new(
        label: impl Into<String>,
        p: Matrix<T>,
        u: Matrix<T>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        let label = label.into();
        p.check_same_dim(&u)?;
        if !is_projector(&p, tol) {
            return Err(Error::NotProjector {
                what: format!("{label}.P"),
            });
        }
        if !is_unitary(&u, tol) {
            return Err(Error::NotUnitary {
                what: format!("{label}.U"),
                residual: unitarity_residual(&u).as_f64(),
            });
        }
        Ok(Self { label, p, u })
    }

    /// Measurement of the first kind: `U = I`.
    pub fn luders(label: impl Into<String>, p: Matrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let n = p.dim();
        Self::new(label, p, Matrix::identity(n), tol)
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    /// `M = U·P`.
    pub fn transformer(&self) -> Matrix<T> {
        &self.u * &self.p
    }
}

/// Two measurements on a shared space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", try_from = "InstancePairRecord<T>")]
pub struct InstancePair<T: Real> {
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: Measurement<T>,
    #[serde(rename = "B")]
    pub b: Measurement<T>,
}

/// Unvalidated on-disk form of an [`InstancePair`].
#[derive(Debug, Clone, Deserialize)]
#[serde(bound = "")]
pub struct InstancePairRecord<T: Real> {
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: MeasurementRecord<T>,
    #[serde(rename = "B")]
    pub b: MeasurementRecord<T>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(bound = "")]
pub struct MeasurementRecord<T: Real> {
    #[serde(rename = "P")]
    pub p: Matrix<T>,
    #[serde(rename = "U")]
    pub u: Matrix<T>,
}

impl<T: Real> InstancePairRecord<T> {
    pub fn validate(self, tol: &Tolerances<T>) -> Result<InstancePair<T>> {
        let a = Measurement::new("A", self.a.p, self.a.u, tol)?;
        let b = Measurement::new("B", self.b.p, self.b.u, tol)?;
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: a.dim(),
            });
        }
        InstancePair::new(a, b)
    }
}

impl<T: Real> TryFrom<InstancePairRecord<T>> for InstancePair<T> {
    type Error = Error;
    fn try_from(rec: InstancePairRecord<T>) -> Result<Self> {
        rec.validate(&Tolerances::default())
    }
}

impl<T: Real> InstancePair<T> {
    pub fn new(a: Measurement<T>, b: Measurement<T>) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                actual: b.dim(),
            });
        }
        Ok(Self { dim: a.dim(), a, b })
    }

    /// The same pair with the roles of A and B exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            dim: self.dim,
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

/// Post-measurement state and probability of the branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct BranchResult<T: Real> {
    pub state: Vector<T>,
    pub weight: T,
}

fn check_normalized<T: Real>(psi: &Vector<T>, tol: &Tolerances<T>) -> Result<()> {
    let norm = psi.norm();
    if (norm - T::one()).abs() > tol.prob_tol {
        return Err(Error::NotNormalized {
            norm: norm.as_f64(),
        });
    }
    Ok(())
}

/// `ψ ↦ Mψ / ‖Mψ‖` with weight `‖Mψ‖²`. Weights at or below `rankTol`
/// are treated as impossible outcomes.
pub fn apply_transformer<T: Real>(
    m: &Measurement<T>,
    psi: &Vector<T>,
    tol: &Tolerances<T>,
) -> Result<BranchResult<T>> {
    check_normalized(psi, tol)?;
    let image = m.u.mul_vec(&m.p.mul_vec(psi));
    let weight = image.norm_sqr();
    if weight <= tol.rank_tol {
        return Err(Error::ZeroBranch {
            weight: weight.as_f64(),
        });
    }
    Ok(BranchResult {
        state: image.scale_real(weight.sqrt().recip()),
        weight,
    })
}

/// `‖M_k ⋯ M_1 ψ‖²`, the probability that every measurement in `seq`
/// (applied first to last) answers "yes". `ψ` must be a unit vector.
pub fn sequence_joint_prob<T: Real>(seq: &[&Measurement<T>], psi: &Vector<T>) -> T {
    seq.iter()
        .fold(psi.clone(), |state, m| m.u.mul_vec(&m.p.mul_vec(&state)))
        .norm_sqr()
}

/// Applies `prefix` with renormalization, then returns `⟨P_final φ, φ⟩`.
pub fn conditional_final_prob<T: Real>(
    prefix: &[&Measurement<T>],
    last: &Measurement<T>,
    psi: &Vector<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    check_normalized(psi, tol)?;
    let mut state = psi.clone();
    for m in prefix {
        state = apply_transformer(m, &state, tol)?.state;
    }
    Ok(last.p.expectation(&state))
}

/// Factors a transformer with projector Gram matrix as `M = UP`, with
/// `P = M*M` and `U = W V*` from the SVD `M = W Σ V*`. On `ker P` the left and
/// right singular frames of the zero singular values are paired, which makes
/// the completion deterministic.
pub fn extract_unitary_factor<T: Real>(
    m: &Matrix<T>,
    tol: &Tolerances<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    let gram = &m.adjoint() * m;
    if !is_projector(&gram, tol) {
        return Err(Error::NotProjectorGram);
    }
    let dec = svd(m);
    let u = &dec.w * &dec.v.adjoint();
    Ok((u, gram))
}
