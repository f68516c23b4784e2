//! Dense complex linear algebra and subspace geometry.

mod decomp;
mod json;
mod matrix;
mod subspace;

pub use decomp::{
    block_diag, commutator_norm, hermitian_eig, is_effect, is_hermitian, is_projector, is_unitary,
    planar_rotation, projector_residual, svd, unitarity_residual, unitary_from_skew, HermitianEig,
    Svd,
};
pub(crate) use decomp::{complete_frame, exp_skew_unchecked, hermitian_eig_unchecked};
pub use matrix::{Matrix, Vector, C};
pub use subspace::{
    block_decompose, four_way_decomposition, perpendicularity_residual, relative_complement,
    subspace_intersection, BlockDecomposition, Coupling, Subspace, SubspaceDecomposition,
};
