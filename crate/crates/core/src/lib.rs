//! Certified upper and lower bounds on quadratic forms optimized over unit
//! tensor-product vectors.
//!
//! The central object is the planar set traced by the pair of quadratic
//! forms (x^T B x, x^T B^Gamma x) over unit vectors: its intersection with
//! the diagonal bounds the product-vector optima of B from both sides, and
//! each endpoint is computable through a one-parameter family of extremal
//! eigenvalue problems. On top of that kernel the crate certifies
//! rank-one-avoiding matrix subspaces, positivity of transpose-preserving
//! linear maps via their Choi matrices, and entanglement witnesses.
//!
//! Modules:
//! - [`shape`], [`matrix`], [`tensor`]: tensor bookkeeping and the matrix
//!   carriers (dense and sparse), partial transposes, symmetrizations,
//!   vectorization, projectors, Choi matrices.
//! - [`eigen`]: the extremal-eigenpair kernel (dense and Lanczos paths).
//! - [`numrange`]: support evaluations, boundary sweeps, and the endpoint
//!   searches, including the multipartite affine generalization.
//! - [`applications`]: the certificate-producing checks and the random
//!   subspace study.
//! - [`oracle`]: independent inner estimators used to cross-check every
//!   certificate.
//! - [`io`]: Matrix Market files and CSV boundary export.

pub mod applications;
pub mod eigen;
pub mod error;
pub mod io;
pub mod matrix;
pub mod numrange;
pub mod oracle;
pub mod shape;
pub mod tensor;

pub use applications::{
    certify_entanglement_witness, certify_positive_map, certify_rank_one_avoiding,
    random_subspace_study, CertConfig, CertificateReport, StudyReport, Verdict,
};
pub use eigen::{eigenvalue_interval, extreme_eigenpair, EigenPair, SolverConfig, SolverMethod, Which};
pub use error::{Error, Result};
pub use matrix::{RealMatrix, RectMatrix};
pub use numrange::{
    boundary, support_point, trivial_bounds, w_diag, w_diag_angle, w_diag_scaled, w_diag_ternary,
    w_joint_diag, AffineFamily, BoundKind, BoundarySweep, DiagonalBound, Method, RangeConfig,
    SupportEvaluation, TrivialBounds,
};
pub use oracle::{alternating_ascent, grid_mu_2x2, sample_mu, GridEstimate, MuEstimate, ProductVector};
pub use shape::{SubsystemSet, TensorShape};
pub use tensor::{
    bipartite_partial_transpose, choi_from_blocks, full_symmetrize, generalized_choi_map,
    is_transpose_preserving, kron, partial_symmetrize, partial_transpose,
    projector_onto_subspace, symmetrize, vectorize, MapBlocks,
};
