use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("matrix is not unitary (residual {residual:.3e}, tolerance {tolerance:.1e})")]
    NotUnitary { residual: f64, tolerance: f64 },

    #[error("matrix is not special unitary (|det - 1| = {residual:.3e})")]
    NotSpecial { residual: f64 },

    #[error("U^dagger dU/dt has nonzero trace {residual:.3e}; strip the global phase first")]
    ResidualTrace { residual: f64 },

    #[error("generator is not traceless Hermitian (residual {residual:.3e})")]
    NotTracelessHermitian { residual: f64 },

    #[error("per-level phase rates must sum to zero, got sum {sum:.3e}")]
    NonzeroPhaseSum { sum: f64 },

    #[error("state is not normalized: Tr[alpha^dagger alpha] = {norm}")]
    NotNormalized { norm: f64 },

    #[error("coefficient matrix must have d_A <= d_B, got {d_a}x{d_b}")]
    RowsExceedColumns { d_a: usize, d_b: usize },

    #[error("purity {0} outside [0, 1]")]
    PurityOutOfRange(f64),

    #[error("purity direction must be a unit vector, |q_hat| = {0}")]
    NotUnitDirection(f64),

    #[error("density matrix has negative eigenvalue {eigenvalue:.3e}")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("invalid diagonal profile: sum x = {sum:.3e}, sum x^2 = {sum_sq:.3e}")]
    InvalidProfile { sum: f64, sum_sq: f64 },

    #[error("qutrit angle theta = {theta} outside the physical domain |theta| <= {bound}")]
    ThetaOutOfBounds { theta: f64, bound: f64 },

    #[error("time {0} outside the path domain")]
    TimeOutOfRange(f64),

    #[error("segment {index}: {reason}")]
    InvalidSegment { index: usize, reason: String },

    #[error(
        "coset factor is open at t = {t} (|V - 1| = {residual:.3e}); Cartan angles undefined there"
    )]
    OpenCosetFactor { t: f64, residual: f64 },

    #[error("Bloch path is not closed: {0}")]
    OpenPath(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error(
        "grid too coarse at t = {t}: phase increment {increment:.3} rad per step exceeds pi/4"
    )]
    GridTooCoarse { t: f64, increment: f64 },

    #[error("{0}")]
    Config(String),
}
