use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("columns are not orthonormal (max Gram deviation {deviation:.3e})")]
    NotIsometry { deviation: f64 },

    #[error("state is not normalized (norm {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("length {len} is not {base}^{exponent}")]
    NotAPower { len: usize, base: usize, exponent: usize },

    #[error("SVD did not converge after {sweeps} sweeps")]
    SvdNonConvergence { sweeps: usize },

    #[error("bond dimension {bond} at cut {cut} exceeds site dimension {site_dim}")]
    BondDimensionTooLarge {
        bond: usize,
        site_dim: usize,
        cut: usize,
    },

    #[error("invalid site count {0}")]
    InvalidSiteCount(usize),

    #[error("instrument is not complete (residual {residual:.3e})")]
    IncompleteInstrument { residual: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("scalar correlations need qubits, got site dimension {0}")]
    NotQubits(usize),

    #[error("vector is not a unit Bloch vector (norm {norm:.12})")]
    NonUnitVector { norm: f64 },

    #[error("dense simulation cap exceeded: {0}")]
    CapExceeded(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("unsupported lattice order {0}")]
    UnsupportedOrder(u8),

    #[error("cut-rank violation: {0}")]
    CutRankViolation(String),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("circuit width {circuit} exceeds pattern width {pattern}")]
    WidthExceeded { circuit: usize, pattern: usize },

    #[error("malformed pattern dependency: {0}")]
    MalformedDependency(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
