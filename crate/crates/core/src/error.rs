use thiserror::Error;

/// Errors raised by the library. Every variant names the offending label,
/// position, or simple so that reports can point at the input that failed.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("composition mismatch at simple {simple}: {detail}")]
    Composition { simple: usize, detail: String },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("dual map is not a bijective involution at label `{0}`")]
    Dual(String),

    #[error("fusion tensor is not unit-compatible at label `{0}`")]
    UnitCompatibility(String),

    #[error("fusion tensor is not rigid at label `{0}`")]
    Rigidity(String),

    #[error("missing {kind} symbol {key}")]
    MissingSymbol { kind: &'static str, key: String },

    #[error("{field} mismatch for `{label}`: given {given}, derived {derived}")]
    DerivedMismatch {
        field: &'static str,
        label: String,
        given: String,
        derived: String,
    },

    #[error("Perron-Frobenius iteration did not converge for `{0}`")]
    NonConvergence(String),

    #[error("unsupported multiplicity N[{a}][{b}][{c}] = {n}")]
    UnsupportedMultiplicity { a: usize, b: usize, c: usize, n: u32 },

    #[error("diagram error at move {index}: {detail}")]
    Diagram { index: usize, detail: String },

    #[error("basis mismatch: {0}")]
    Basis(String),

    #[error("algebra error: {0}")]
    Algebra(String),

    #[error("missing half-braiding component for simple {0}")]
    MissingComponent(usize),

    #[error("module action mismatch: {0}")]
    Action(String),

    #[error("invalid module structure: associativity residual {0:.3e}")]
    InvalidModule(f64),

    #[error("gluing pattern error: {0}")]
    Pattern(String),

    #[error("enumeration cap exceeded: {needed} channel terms > cap {cap}")]
    Cap { needed: u64, cap: u64 },

    #[error("unknown Dehn twist candidate `{0}`")]
    UnknownCandidate(String),

    #[error("state is not positive: Gram minimum eigenvalue {0:.3e}")]
    NonPositiveState(f64),

    #[error("inconsistent realization datum: {0}")]
    Realization(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
