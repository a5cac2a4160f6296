use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not {kind} within tolerance (residual {residual:.3e})")]
    NotNormal { kind: &'static str, residual: f64 },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("function undefined at eigenvalue {re:.6}{im:+.6}i")]
    DomainViolation { re: f64, im: f64 },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not unitary (‖U*U − I‖ = {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("phase entry ({row},{col}) has no exact rational value")]
    NotRational { row: usize, col: usize },
    #[error("phase matrix carries no exact data")]
    MissingExactData,
    #[error("invalid phase matrix: {0}")]
    InvalidPhase(String),
    #[error("branch cut gap violated: eigenvalue at distance {distance:.3e} from the cut")]
    GapViolation { distance: f64 },
    #[error("no spectral gap at 1/2 (‖e² − e‖ = {idempotency:.3e}, margin {margin:.3e})")]
    GapAtHalfViolation { idempotency: f64, margin: f64 },
    #[error("no common gap: phase arcs cover the circle")]
    NoGap,
    #[error("invalid Rieffel parameters: {0}")]
    ParamViolation(String),
    #[error("trace of logarithm has real residue {0:.3e}")]
    ImaginaryResidue(f64),
    #[error("Hermitian matrix norm {0} exceeds 1")]
    NormTooLarge(f64),
    #[error("index matrix has an eigenvalue within {0:.3e} of zero")]
    NoSpectralGap(f64),
    #[error("search stagnated above the defect target (final defect {:.3e})", .0.final_defect)]
    Diverged(Box<crate::search::SearchResult>),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
