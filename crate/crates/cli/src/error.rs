//! CLI failure type carrying the exit-code contract:
//!
//! * 1 — usage/validation errors and filesystem trouble
//! * 2 — numerical non-convergence or backend disagreement
//!
//! Exit 0 (success/pass) and exit 3 (duality verdict fail) are not errors:
//! those runs complete and write an envelope; the code is derived from the
//! payload verdict.

use ptcubic_core::{
    BasisError, DualityError, ModelError, PerturbationError, ShootingError,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad config file, violated precondition.
    #[error("{0}")]
    Usage(String),
    /// I/O trouble reading configs or writing outputs.
    #[error("{0}")]
    Filesystem(String),
    /// The requested computation ran but did not converge/agree.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Filesystem(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<BasisError> for CliError {
    fn from(e: BasisError) -> Self {
        match e {
            BasisError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            BasisError::Eig(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<ShootingError> for CliError {
    fn from(e: ShootingError) -> Self {
        match e {
            ShootingError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<PerturbationError> for CliError {
    fn from(e: PerturbationError) -> Self {
        // both non-Model variants are precondition violations, not failed
        // computations
        CliError::Usage(e.to_string())
    }
}

impl From<DualityError> for CliError {
    fn from(e: DualityError) -> Self {
        match e {
            DualityError::Model(m) => m.into(),
            DualityError::NegativeMassInput(_) | DualityError::GridNotAscending { .. } => {
                CliError::Usage(e.to_string())
            }
            DualityError::Basis(BasisError::InvalidConfig(_)) => CliError::Usage(e.to_string()),
            DualityError::Shooting(ShootingError::InvalidConfig(_)) => {
                CliError::Usage(e.to_string())
            }
            // keep the "failed at grid point m² = …" context but classify by
            // the underlying failure
            DualityError::SweepPointFailed { ref source, .. } => {
                match CliError::from_ref_kind(source) {
                    ErrKind::Usage => CliError::Usage(e.to_string()),
                    ErrKind::Numerical => CliError::Numerical(e.to_string()),
                }
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

enum ErrKind {
    Usage,
    Numerical,
}

impl CliError {
    fn from_ref_kind(e: &DualityError) -> ErrKind {
        match e {
            DualityError::Model(_)
            | DualityError::NegativeMassInput(_)
            | DualityError::GridNotAscending { .. }
            | DualityError::Basis(BasisError::InvalidConfig(_))
            | DualityError::Shooting(ShootingError::InvalidConfig(_)) => ErrKind::Usage,
            DualityError::SweepPointFailed { source, .. } => CliError::from_ref_kind(source),
            _ => ErrKind::Numerical,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_follow_the_contract() {
        assert_eq!(CliError::Usage("x".into()).code(), 1);
        assert_eq!(CliError::Filesystem("x".into()).code(), 1);
        assert_eq!(CliError::Numerical("x".into()).code(), 2);
    }

    #[test]
    fn sweep_failures_classify_by_the_inner_error() {
        let inner = DualityError::InsufficientLevels {
            m_squared: 0.5,
            requested: 4,
            converged: 2,
        };
        let wrapped = DualityError::SweepPointFailed {
            m_squared: 0.5,
            source: Box::new(inner),
        };
        let cli: CliError = wrapped.into();
        assert_eq!(cli.code(), 2);
        assert!(cli.to_string().contains("grid point"), "{cli}");
    }
}
