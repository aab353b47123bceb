use thiserror::Error;

pub type Result<T> = std::result::Result<T, QprobError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QprobError {
    #[error("matrix is not Hermitian: max |H - H^dagger| = {residual:.3e}")]
    NonHermitianInput { residual: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("not a density operator: {reason} (residual {residual:.3e})")]
    InvalidDensity { reason: &'static str, residual: f64 },

    #[error("not a valid channel: {reason} (residual {residual:.3e})")]
    InvalidChannel { reason: &'static str, residual: f64 },

    #[error("post-selected state is orthogonal to the initial state (|overlap| = {overlap:.3e})")]
    OrthogonalPostselection { overlap: f64 },

    #[error("operator is not an orthogonal projector (residual {residual:.3e})")]
    NotAProjector { residual: f64 },

    #[error("u-grid is ill conditioned for inversion (condition number {condition:.3e})")]
    IllConditionedGrid { condition: f64 },

    #[error("position grid too narrow: {outside:.3e} of the mass falls outside it")]
    GridTooNarrow { outside: f64 },

    #[error("thermal state is numerically singular (smallest eigenvalue {min_eigenvalue:.3e})")]
    SingularThermalState { min_eigenvalue: f64 },

    #[error("projector {index} has vanishing support on the state ({support:.3e})")]
    ZeroSupportProjector { index: usize, support: f64 },

    #[error("state is not positive semidefinite: {reason}")]
    NotPositiveSemidefinite { reason: String },

    #[error("Bogoliubov angle undefined at k = {k}, lambda = {lambda} (critical mode)")]
    UndefinedAngle { k: f64, lambda: f64 },

    #[error("atom count {count} exceeds the cap {cap}")]
    AtomExplosion { count: usize, cap: usize },

    #[error("unitary is not energy preserving (residual {residual:.3e})")]
    NotEnergyPreserving { residual: f64 },

    #[error("reduced state is not the local Gibbs state (residual {residual:.3e})")]
    NotLocallyThermal { residual: f64 },

    #[error("distribution has no atoms")]
    EmptyDistribution,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invariant violated: {name} (residual {residual:.3e})")]
    InvariantViolation { name: String, residual: f64 },
}

impl QprobError {
    /// Numerical failures as opposed to invalid inputs or broken invariants.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            QprobError::IllConditionedGrid { .. }
                | QprobError::AtomExplosion { .. }
                | QprobError::SingularThermalState { .. }
                | QprobError::GridTooNarrow { .. }
                | QprobError::UndefinedAngle { .. }
        )
    }
}
