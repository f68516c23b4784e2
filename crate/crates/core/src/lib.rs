//! Sequential projective measurements whose state transformers are
//! `ψ ↦ UPψ / ‖UPψ‖` (a projector effect `P` followed by a unitary `U`).
//!
//! The crate evaluates sequential outcome probabilities, checks adjacent
//! (A-A) and separated (A-B-A, B-A-B) repeatability, measures the order
//! effect, and searches the unitary group for pairs that maximize the order
//! effect under a chosen subset of repeatability constraints.
//!
//! All numerics are generic over [`Real`] (`f64` or `f32`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod criteria;
mod error;
pub mod instances;
pub mod linalg;
pub mod measurement;
mod scalar;
pub mod search;
pub mod suites;

pub use error::{Error, Result};
pub use scalar::{Real, Tolerances};

pub type ComplexMatrix = linalg::Matrix<f64>;
pub type ComplexVector = linalg::Vector<f64>;
pub type Subspace = linalg::Subspace<f64>;
pub type SubspaceDecomposition = linalg::SubspaceDecomposition<f64>;
pub type Measurement = measurement::Measurement<f64>;
pub type InstancePair = measurement::InstancePair<f64>;
pub type BranchResult = measurement::BranchResult<f64>;
pub type CriteriaReport = criteria::CriteriaReport;
pub type ShiftInstance = instances::ShiftInstance<f64>;
pub type SearchProblem = search::SearchProblem<f64>;
pub type SearchResult = search::SearchResult<f64>;

pub type ComplexMatrix32 = linalg::Matrix<f32>;
pub type ComplexVector32 = linalg::Vector<f32>;
pub type Measurement32 = measurement::Measurement<f32>;
pub type InstancePair32 = measurement::InstancePair<f32>;
