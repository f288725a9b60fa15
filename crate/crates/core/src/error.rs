//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the matrix kernel, the subspace machinery, state
/// assembly and the PPT engine.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("shape mismatch: {rows_a}x{cols_a} vs {rows_b}x{cols_b}")]
    ShapeMismatch {
        rows_a: usize,
        cols_a: usize,
        rows_b: usize,
        cols_b: usize,
    },

    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    DimensionMismatch {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not Hermitian (max |A - A*| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("eigenvalue iteration failed to converge")]
    EigenvalueConvergence,

    #[error("invalid dimensions: d = {d}, n = {n}")]
    InvalidDims { d: usize, n: usize },

    #[error("dimension overflow: {d}^{n} exceeds the supported range")]
    DimensionOverflow { d: usize, n: usize },

    #[error("digit {digit} out of range for base {base}")]
    InvalidDigit { digit: usize, base: usize },

    #[error("base mismatch: {left} vs {right}")]
    BaseMismatch { left: usize, right: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("factor index {index} out of range for {n} factors")]
    FactorOutOfRange { index: usize, n: usize },

    #[error("the kept factor set is empty")]
    EmptyKeepSet,

    #[error("entry ({row}, {col}) with magnitude {magnitude:.3e} couples two different subspaces")]
    NotCirculant {
        row: usize,
        col: usize,
        magnitude: f64,
    },

    #[error("block {label}: expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    BlockShape {
        label: String,
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("block {label} is not Hermitian (max |A - A*| = {deviation:.3e})")]
    BlockNotHermitian { label: String, deviation: f64 },

    #[error("wrong number of blocks: expected {expected}, got {got}")]
    BlockCount { expected: usize, got: usize },

    #[error("duplicate block label {label}")]
    DuplicateBlock { label: String },

    #[error("invalid block label {label}: {reason}")]
    BadBlockLabel { label: String, reason: String },

    #[error("invalid grouping scheme: {reason}")]
    InvalidScheme { reason: String },

    #[error("total trace is {trace:.3e}; cannot normalize")]
    NonPositiveTrace { trace: f64 },

    #[error("cannot drop factor {index}: only middle factors may be dropped")]
    NotMiddleFactor { index: usize },

    #[error("reduction would leave fewer than two factors")]
    TooFewFactorsLeft,

    #[error("operation requires an untransformed family")]
    TransformedFamily,

    #[error("parameter {param} = {value} outside [{min}, {max}]")]
    ParamOutOfRange {
        param: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid parameter {param}: {reason}")]
    BadParam { param: String, reason: String },

    #[error("unknown state family {0}")]
    UnknownFamily(String),

    #[error("no sign change on bracket: f({lo}) = {f_lo:.6e}, f({hi}) = {f_hi:.6e}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("state file: {0}")]
    StateFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
