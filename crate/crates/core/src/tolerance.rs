use crate::error::{AlgebraError, Result};
use crate::scalar::Real;

/// Numerical thresholds shared by every operation.
///
/// `pos_slack` is the absolute slack for positivity and identity checks,
/// `cluster_tol` the relative radius under which eigenvalues are merged,
/// `rank_cutoff` the relative threshold below which eigenvalues count as zero,
/// and `jacobi_off_tol` the relative off-diagonal mass at which the Jacobi
/// eigensolver stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig<T> {
    pub pos_slack: T,
    pub cluster_tol: T,
    pub rank_cutoff: T,
    pub jacobi_off_tol: T,
    pub max_sweeps: usize,
}

impl Default for ToleranceConfig<f64> {
    fn default() -> Self {
        Self {
            pos_slack: 1e-10,
            cluster_tol: 1e-8,
            rank_cutoff: 1e-10,
            jacobi_off_tol: 1e-14,
            max_sweeps: 100,
        }
    }
}

impl Default for ToleranceConfig<f32> {
    fn default() -> Self {
        Self {
            pos_slack: 1e-4,
            cluster_tol: 1e-3,
            rank_cutoff: 1e-5,
            jacobi_off_tol: 1e-6,
            max_sweeps: 100,
        }
    }
}

impl<T: Real> ToleranceConfig<T> {
    /// Checks that every threshold is strictly positive and that clustering
    /// is coarser than the rank cutoff.
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("pos_slack", self.pos_slack),
            ("cluster_tol", self.cluster_tol),
            ("rank_cutoff", self.rank_cutoff),
            ("jacobi_off_tol", self.jacobi_off_tol),
        ];
        for (name, v) in named {
            if !(v > T::zero() && v.is_finite()) {
                return Err(AlgebraError::InvalidTolerance(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        if self.max_sweeps == 0 {
            return Err(AlgebraError::InvalidTolerance(
                "max_sweeps must be at least 1".into(),
            ));
        }
        if self.cluster_tol <= self.rank_cutoff {
            return Err(AlgebraError::InvalidTolerance(format!(
                "cluster_tol ({}) must exceed rank_cutoff ({})",
                self.cluster_tol, self.rank_cutoff
            )));
        }
        Ok(())
    }

    /// Slack scaled by `1 + scale`, the form used by every residual check.
    pub fn slack(&self, scale: T) -> T {
        self.pos_slack * (T::one() + scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ToleranceConfig::<f64>::default().validate().unwrap();
        ToleranceConfig::<f32>::default().validate().unwrap();
    }

    #[test]
    fn rejects_inverted_cluster_and_rank() {
        let tol = ToleranceConfig::<f64> {
            cluster_tol: 1e-12,
            ..Default::default()
        };
        assert!(matches!(
            tol.validate(),
            Err(AlgebraError::InvalidTolerance(_))
        ));
    }

    #[test]
    fn rejects_non_positive() {
        let tol = ToleranceConfig::<f64> {
            pos_slack: 0.0,
            ..Default::default()
        };
        assert!(tol.validate().is_err());
    }
}
