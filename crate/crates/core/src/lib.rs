//! Circulant multipartite states and their partial transpositions.
//!
//! A state on `n` qudits of local dimension `d` is *circulant* when it is
//! block-diagonal over the cyclic direct-sum decomposition of the composite
//! space: either `d^(n-1)` shifted-diagonal subspaces of dimension `d`
//! (small blocks, one per base-`d` digit label) or `d` grouped subspaces of
//! dimension `d^(n-1)` (big blocks, grouped by digit sum or by a fixed
//! digit). Partial transpositions act on such states through closed-form
//! block rules, so PPT verdicts reduce to the spectra of small transformed
//! blocks instead of the full matrix.
//!
//! The crate provides:
//!
//! - [`dense`]: the matrix kernel (Kronecker/Hadamard products, partial
//!   transpose and trace, a deterministic Hermitian eigensolver, PSD
//!   verdicts);
//! - [`geometry`]: structural matrices and the subspace bases;
//! - [`assembly`]: block families, dense assembly and structure detection;
//! - [`ppt`]: the closed-form transforms, verdicts and the dense
//!   cross-validation oracle;
//! - [`zoo`]: named parametric families with their known thresholds;
//! - [`threshold`]: eigenvalue-driven bisection;
//! - [`io`]: the JSON state-file format;
//! - [`random`]: seeded PSD family generators for validation suites.

pub mod assembly;
pub mod dense;
pub mod error;
pub mod geometry;
pub mod io;
pub mod ppt;
pub mod random;
pub mod threshold;
pub mod zoo;

pub use assembly::{
    assemble_big, assemble_small, embed_small_in_big, extract_big, extract_small,
    extract_small_tagged, normalize, reduce_middle_factors, BigBlockFamily, BlockFamily,
    CirculantState, SmallBlockFamily,
};
pub use dense::{
    hadamard, hermitian_eigenvalues, is_psd, kron, partial_trace, partial_trace_keep,
    partial_transpose, ComplexMatrix, DimsProfile, PsdTolerance, C64,
};
pub use error::{Error, Result};
pub use geometry::{DigitVector, Scheme, SubspaceBasis, TransposeMask};
pub use ppt::{
    min_eigenvalue_over_masks, oracle_compare, ppt_check, ppt_check_all, ppt_check_dense,
    transform_big, transform_small, MaskVerdict, PptReport, ORACLE_TOL,
};
pub use threshold::{bisect_threshold, ThresholdEstimate};
pub use zoo::{FamilyKind, ZooState};
