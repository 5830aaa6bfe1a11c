//! Exchange phases of identical particles.
//!
//! A full circulation of one particle around another is two successive
//! exchanges, so it contributes `2θ`. In three dimensions the circulation
//! can be contracted to a point, which forces `2θ ≡ 0` and leaves only
//! bosons and fermions; in two dimensions any `θ` is allowed.

use std::fmt;

use thiserror::Error;

use crate::phase::{canonicalize_phase, phase_distance, wrap, DomainError, GeometricPhase};

/// Tolerance for accepting a three-dimensional exchange phase as 0 or π.
pub const THREE_D_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpatialDimension {
    Two,
    Three,
}

impl SpatialDimension {
    pub fn from_int(d: i64) -> Result<Self, ExchangeError> {
        match d {
            2 => Ok(Self::Two),
            3 => Ok(Self::Three),
            other => Err(ExchangeError::UnsupportedDimension(other)),
        }
    }

    pub fn as_int(self) -> u8 {
        match self {
            Self::Two => 2,
            Self::Three => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExchangeError {
    #[error("spatial dimension must be 2 or 3, got {0}")]
    UnsupportedDimension(i64),

    #[error(
        "exchange phase {theta} is not allowed in three dimensions: a single exchange must give a factor +1 (boson) or -1 (fermion)"
    )]
    ForbiddenInThreeD { theta: f64 },

    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangePhase {
    theta: GeometricPhase,
    dimension: SpatialDimension,
}

impl ExchangePhase {
    /// In three dimensions `theta` must lie within [`THREE_D_TOL`] of 0 or π
    /// and is snapped to that value.
    pub fn new(theta: f64, dimension: SpatialDimension) -> Result<Self, ExchangeError> {
        let theta = canonicalize_phase(theta)?;
        let theta = match dimension {
            SpatialDimension::Two => theta,
            SpatialDimension::Three => {
                if phase_distance(theta, GeometricPhase::ZERO) <= THREE_D_TOL {
                    GeometricPhase::ZERO
                } else if phase_distance(theta, GeometricPhase::PI) <= THREE_D_TOL {
                    GeometricPhase::PI
                } else {
                    return Err(ExchangeError::ForbiddenInThreeD { theta: theta.value() });
                }
            }
        };
        Ok(Self { theta, dimension })
    }

    pub fn theta(&self) -> GeometricPhase {
        self.theta
    }

    pub fn dimension(&self) -> SpatialDimension {
        self.dimension
    }

    /// Phase from one full circulation, `2θ` reduced mod 2π.
    pub fn circulation_phase(&self) -> GeometricPhase {
        wrap(2.0 * self.theta.value())
    }

    pub fn classify(&self, tol: f64) -> Statistics {
        if phase_distance(self.theta, GeometricPhase::ZERO) <= tol {
            Statistics::Boson
        } else if phase_distance(self.theta, GeometricPhase::PI) <= tol {
            Statistics::Fermion
        } else {
            Statistics::Anyon(self.theta)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Statistics {
    Boson,
    Fermion,
    Anyon(GeometricPhase),
}

impl Statistics {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Boson => "boson",
            Self::Fermion => "fermion",
            Self::Anyon(_) => "anyon",
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Anyon(theta) => write!(f, "anyon(theta = {theta})"),
            other => f.write_str(other.name()),
        }
    }
}
