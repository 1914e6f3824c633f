use thiserror::Error;

use crate::hspec::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode cutoff must be at least 1 (mode {mode} has cutoff {cutoff})")]
    InvalidCutoff { mode: usize, cutoff: usize },

    #[error("space dimension {dim} exceeds the configured limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },

    #[error("{kind} index {index} out of range (space has {count})")]
    InvalidIndex {
        kind: &'static str,
        index: usize,
        count: usize,
    },

    #[error("{kind} indices must be distinct (got {index} twice)")]
    DuplicateIndex { kind: &'static str, index: usize },

    #[error("operands live on different spaces: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("matrix is {rows}x{cols} but the space has dimension {dim}")]
    MatrixShape { rows: usize, cols: usize, dim: usize },

    #[error("charge-conjugation target needs equal cutoffs, got {left} and {right}")]
    UnequalCutoffs { left: usize, right: usize },

    #[error("expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    #[error("detunings must be equal for this form (got {0} and {1})")]
    UnequalDetunings(f64, f64),

    #[error("term {index} ({label}) has zero frequency; its antiderivative is undefined")]
    ZeroFrequency { index: usize, label: String },

    #[error("Hamiltonian is not static: term {index} oscillates at {frequency} s^-1")]
    NotStatic { index: usize, frequency: f64 },

    #[error("term list is not Hermitian: terms at frequency {frequency} lack conjugate partners (mismatch {residual:.3e})")]
    NotHermitian { frequency: f64, residual: f64 },

    #[error("subspace is not closed under the operator (leakage {leakage:.3e} > {bound:.1e})")]
    Leakage { leakage: f64, bound: f64 },

    #[error("subspaces overlap at basis index {0}")]
    OverlappingSectors(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0}")]
    Diagnostic(#[from] Diagnostic),

    #[error("lowering failed: {0}")]
    Lowering(String),

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}
