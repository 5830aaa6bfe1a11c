//! Shared numeric vocabulary: unit kets, phases on the circle, parameter
//! points and sampled parameter paths.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Tolerance on the Euclidean norm of a constructed [`QuantumState`].
pub const NORM_TOL: f64 = 1e-12;

/// Default tolerance for physics-level assertions.
pub const PHYSICS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("non-finite value {0} where a finite real was required")]
    NonFinite(f64),

    #[error("state dimension {0} is too small (need at least 2)")]
    StateTooSmall(usize),

    #[error("state has non-finite amplitude at index {0}")]
    NonFiniteAmplitude(usize),

    #[error("state has zero norm and cannot be normalized")]
    ZeroNorm,

    #[error("state norm {norm} differs from 1 by more than {tol:e}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("parameter point has no coordinates")]
    EmptyPoint,

    #[error("parameter point has non-finite coordinate at index {0}")]
    NonFiniteCoordinate(usize),

    #[error("path has {found} samples; at least {min} are required")]
    PathTooShort { found: usize, min: usize },

    #[error("path sample {index} has dimension {found}, expected {expected}")]
    MixedDimensions {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("winding count must be non-zero for a closed circuit")]
    ZeroWinding,
}

/// A normalized ket in a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(amps: Vec<Complex64>) -> Result<Self, DomainError> {
        if amps.len() < 2 {
            return Err(DomainError::StateTooSmall(amps.len()));
        }
        if let Some(i) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(DomainError::NonFiniteAmplitude(i));
        }
        let norm = l2_norm(&amps);
        if norm == 0.0 || !norm.is_finite() {
            return Err(DomainError::ZeroNorm);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { amps })
    }

    /// Builds a state from real amplitudes, normalizing them.
    pub fn from_real(amps: &[f64]) -> Result<Self, DomainError> {
        Self::new(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Accepts amplitudes that are already unit norm (within [`NORM_TOL`])
    /// without rescaling them.
    pub fn from_unit(amps: Vec<Complex64>) -> Result<Self, DomainError> {
        if amps.len() < 2 {
            return Err(DomainError::StateTooSmall(amps.len()));
        }
        let norm = l2_norm(&amps);
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(DomainError::NotNormalized { norm, tol: NORM_TOL });
        }
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    /// Multiplies every amplitude by `exp(i·alpha)`.
    pub fn rephased(&self, alpha: f64) -> QuantumState {
        self.scaled(Complex64::from_polar(1.0, alpha))
    }

    /// Multiplies by a unit-modulus factor. The caller guarantees `|factor| = 1`.
    pub(crate) fn scaled(&self, factor: Complex64) -> QuantumState {
        QuantumState {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Rephases so the largest-magnitude amplitude is real and positive.
    /// Ties (to relative 1e-12) resolve to the lowest index.
    pub fn with_canonical_phase(&self) -> QuantumState {
        let max = self.amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let pivot = self
            .amps
            .iter()
            .find(|a| a.norm() >= max * (1.0 - 1e-12))
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        self.scaled(pivot.conj() / pivot.norm())
    }

    /// Rephases `self` so that `⟨reference|result⟩` is real and non-negative.
    /// Returns the rephased state and the overlap magnitude.
    pub fn aligned_to(&self, reference: &QuantumState) -> (QuantumState, f64) {
        let ov = reference.inner(self);
        let mag = ov.norm();
        if mag == 0.0 {
            return (self.clone(), 0.0);
        }
        (self.scaled(ov.conj() / mag), mag)
    }
}

fn l2_norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// A phase reduced to its canonical representative in `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GeometricPhase(f64);

impl GeometricPhase {
    pub const ZERO: GeometricPhase = GeometricPhase(0.0);
    pub const PI: GeometricPhase = GeometricPhase(PI);

    pub fn value(self) -> f64 {
        self.0
    }

    /// Phase of a complex number. `arg(0)` is reported as 0.
    pub fn arg_of(z: Complex64) -> GeometricPhase {
        wrap(z.im.atan2(z.re))
    }

    /// Distance to another phase on the circle, see [`phase_distance`].
    pub fn distance(self, other: GeometricPhase) -> f64 {
        phase_distance(self, other)
    }
}

impl fmt::Display for GeometricPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<GeometricPhase> for f64 {
    fn from(p: GeometricPhase) -> f64 {
        p.0
    }
}

/// Reduces `x` modulo 2π into `(−π, π]`.
///
/// Values already in the canonical interval are returned bit-for-bit, so the
/// map is exactly idempotent.
pub fn canonicalize_phase(x: f64) -> Result<GeometricPhase, DomainError> {
    if !x.is_finite() {
        return Err(DomainError::NonFinite(x));
    }
    Ok(wrap(x))
}

/// Infallible reduction for values known to be finite.
pub(crate) fn wrap(x: f64) -> GeometricPhase {
    debug_assert!(x.is_finite());
    if x > -PI && x <= PI {
        // normalize -0.0
        return GeometricPhase(if x == 0.0 { 0.0 } else { x });
    }
    let y = x.rem_euclid(TAU);
    let y = if y > PI { y - TAU } else { y };
    GeometricPhase(if y == 0.0 { 0.0 } else { y })
}

/// `min_k |a − b − 2πk|`, always in `[0, π]`.
pub fn phase_distance(a: GeometricPhase, b: GeometricPhase) -> f64 {
    wrap(a.0 - b.0).0.abs()
}

/// A point in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPoint {
    coords: Vec<f64>,
}

impl ParameterPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, DomainError> {
        if coords.is_empty() {
            return Err(DomainError::EmptyPoint);
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(DomainError::NonFiniteCoordinate(i));
        }
        Ok(Self { coords })
    }

    /// The zero-dimensional point, only meaningful for parameter-free families.
    pub fn empty() -> Self {
        Self { coords: Vec::new() }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Copy of `self` with coordinate `j` shifted by `delta`.
    pub fn shifted(&self, j: usize, delta: f64) -> ParameterPoint {
        let mut coords = self.coords.clone();
        coords[j] += delta;
        ParameterPoint { coords }
    }

    pub(crate) fn translated(&self, delta: &[f64]) -> ParameterPoint {
        ParameterPoint {
            coords: self.coords.iter().zip(delta).map(|(a, b)| a + b).collect(),
        }
    }
}

/// A sampled path through parameter space.
///
/// A closed path does not repeat its first sample. The implicit closing point
/// is `samples[0] + closure_shift`: the shift is zero for ordinary loops and
/// carries the 2π·winding lift when a coordinate is an angle, so functions of
/// the coordinates (gauges) can be evaluated on the universal cover.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPath {
    samples: Vec<ParameterPoint>,
    closed: bool,
    closure_shift: Vec<f64>,
}

impl ParamPath {
    pub fn new(samples: Vec<ParameterPoint>, closed: bool) -> Result<Self, DomainError> {
        let dim = samples.first().map(ParameterPoint::dim).unwrap_or(0);
        Self::with_closure_shift(samples, closed, vec![0.0; dim])
    }

    pub fn with_closure_shift(
        samples: Vec<ParameterPoint>,
        closed: bool,
        closure_shift: Vec<f64>,
    ) -> Result<Self, DomainError> {
        let min = if closed { 3 } else { 1 };
        if samples.len() < min {
            return Err(DomainError::PathTooShort {
                found: samples.len(),
                min,
            });
        }
        let dim = samples[0].dim();
        if dim == 0 {
            return Err(DomainError::EmptyPoint);
        }
        for (index, s) in samples.iter().enumerate() {
            if s.dim() != dim {
                return Err(DomainError::MixedDimensions {
                    index,
                    expected: dim,
                    found: s.dim(),
                });
            }
        }
        if closure_shift.len() != dim {
            return Err(DomainError::DimensionMismatch {
                expected: dim,
                found: closure_shift.len(),
            });
        }
        if let Some(&bad) = closure_shift.iter().find(|c| !c.is_finite()) {
            return Err(DomainError::NonFinite(bad));
        }
        Ok(Self {
            samples,
            closed,
            closure_shift,
        })
    }

    /// Circle of fixed `radius` in polar coordinates `(r, phi)`, traversed
    /// `winding` times with `samples` points in total. The closing point
    /// sits at `phi = 2π·winding`.
    pub fn polar_circle(radius: f64, samples: usize, winding: i64) -> Result<Self, DomainError> {
        if winding == 0 {
            return Err(DomainError::ZeroWinding);
        }
        if !radius.is_finite() {
            return Err(DomainError::NonFinite(radius));
        }
        let total = TAU * winding as f64;
        let pts = (0..samples)
            .map(|k| ParameterPoint::new(vec![radius, total * k as f64 / samples as f64]))
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_closure_shift(pts, true, vec![0.0, total])
    }

    /// Circle in a Cartesian coordinate plane around `center`.
    pub fn cartesian_circle(
        center: [f64; 2],
        radius: f64,
        samples: usize,
        winding: i64,
    ) -> Result<Self, DomainError> {
        if winding == 0 {
            return Err(DomainError::ZeroWinding);
        }
        let total = TAU * winding as f64;
        let pts = (0..samples)
            .map(|k| {
                let t = total * k as f64 / samples as f64;
                ParameterPoint::new(vec![center[0] + radius * t.cos(), center[1] + radius * t.sin()])
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(pts, true)
    }

    pub fn samples(&self) -> &[ParameterPoint] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    pub fn closure_shift(&self) -> &[f64] {
        &self.closure_shift
    }

    /// The point reached after one full circuit (`None` for open paths).
    pub fn closing_point(&self) -> Option<ParameterPoint> {
        self.closed
            .then(|| self.samples[0].translated(&self.closure_shift))
    }

    /// Same path traversed backwards, starting from the same first sample.
    pub fn reversed(&self) -> ParamPath {
        let mut samples = Vec::with_capacity(self.samples.len());
        samples.push(self.samples[0].clone());
        if self.closed {
            // going backwards, the sample before index 0 lives one shift below
            let neg: Vec<f64> = self.closure_shift.iter().map(|c| -c).collect();
            samples.extend(self.samples[1..].iter().rev().map(|p| p.translated(&neg)));
            ParamPath {
                samples,
                closed: true,
                closure_shift: neg,
            }
        } else {
            samples.clear();
            samples.extend(self.samples.iter().rev().cloned());
            ParamPath {
                samples,
                closed: false,
                closure_shift: self.closure_shift.clone(),
            }
        }
    }
}
