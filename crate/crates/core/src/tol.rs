//! Centralized numerical tolerances.
//!
//! Every validating constructor and consistency check draws its threshold
//! from one place so that a test or a CLI run can tighten or relax them
//! coherently.

/// Tolerance configuration shared by all validating constructors.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Exact algebraic identities: unitarity, orthonormality, round trips.
    pub algebraic: f64,
    /// Physicality checks: Hermiticity, unit trace, POVM completeness,
    /// state normalization.
    pub physicality: f64,
    /// Floor for eigenvalue positivity; the eigensolver itself contributes
    /// error at this scale on badly conditioned inputs.
    pub eigen_floor: f64,
    /// Largest dimension for which constructors run the full eigenvalue
    /// positivity check automatically. Above it only the diagonal is
    /// inspected; `DensityOperator::min_eigenvalue` remains available.
    pub psd_check_dim: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-12,
            physicality: 1e-10,
            eigen_floor: 1e-8,
            psd_check_dim: 256,
        }
    }
}

/// Hard cap on dense operator dimension (2^14 = 16384). Operations that
/// would produce anything larger fail with a sizing error instead of
/// attempting the allocation.
pub const DIM_CAP: usize = 1 << 14;
