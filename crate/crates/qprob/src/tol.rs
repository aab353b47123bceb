//! Default tolerances shared by every module. All public entry points that
//! take a tolerance fall back to these values.

/// Relative tolerance for merging eigenvalues into one spectral branch.
pub const GROUP_TOL: f64 = 1e-9;
/// Entrywise Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Density-operator trace and positivity checks.
pub const DENSITY_TOL: f64 = 1e-10;
/// Unitarity check, `U^dagger U = I`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Kraus completeness check.
pub const KRAUS_TOL: f64 = 1e-9;
/// Projector idempotence check.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Relative tolerance for coalescing atoms, scaled by the largest |eigenvalue|.
pub const COALESCE_TOL: f64 = 1e-9;
/// Largest admissible condition number for characteristic-function inversion.
pub const MAX_CONDITION: f64 = 1e12;
/// Smallest eigenvalue admitted when inverting a thermal state.
pub const MIN_THERMAL_EIGENVALUE: f64 = 1e-300;
/// Default cap on the number of atoms in an assembled distribution.
pub const ATOM_CAP: usize = 10_000_000;
/// Energy-preservation check of heat-exchange unitaries.
pub const ENERGY_PRESERVING_TOL: f64 = 1e-9;
/// Mass allowed outside a detector position grid.
pub const GRID_MASS_TOL: f64 = 1e-3;
