//! Aharonov–Bohm phase of a charge circling an ideal solenoid.
//!
//! Outside the solenoid the vector potential is purely azimuthal,
//! `A = (Φ/2π) ẑ×ρ̂/ρ`, so its line integral along any straight segment is
//! `(Φ/2π)·Δθ` with `Δθ` the signed angle the segment subtends at the axis.
//! Line integrals are therefore evaluated exactly per segment and the phase
//! of a closed polygon is `winding × flux` up to rounding, for any shape.
//!
//! Units are natural (`q = ħ = c = 1`); [`COUPLING`] is the single factor
//! `q/ħc` to change for other unit systems.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::phase::{canonicalize_phase, phase_distance, wrap, DomainError, GeometricPhase};

/// `q/ħc` multiplying `∮A·dl` to give a phase.
pub const COUPLING: f64 = 1.0;

/// Minimum distance of a path from the solenoid axis.
pub const AXIS_CLEARANCE: f64 = 1e-9;

/// Maximum distance of the summed turning angle from a whole number of
/// turns.
pub const WINDING_RESIDUE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AbError {
    #[error("path passes within {distance:e} of the solenoid axis at segment {segment}; the potential is singular there")]
    Singularity { segment: usize, distance: f64 },

    #[error("point lies on the solenoid axis")]
    OnAxis,

    #[error("accumulated angle is {residue:e} turns away from an integer winding; refine the path")]
    Resolution { residue: f64 },

    #[error("a closed planar path needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("vertices {0} and {1} coincide")]
    RepeatedVertex(usize, usize),

    #[error("operation requires a closed path")]
    OpenPath,

    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }

    fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// An infinitely thin solenoid of total flux `flux` along the axis through
/// `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolenoidField {
    flux: f64,
    center: Point2,
}

impl SolenoidField {
    pub fn new(flux: f64, center: Point2) -> Result<Self, AbError> {
        if !flux.is_finite() {
            return Err(DomainError::NonFinite(flux).into());
        }
        if !center.is_finite() {
            return Err(DomainError::NonFinite(if center.x.is_finite() { center.y } else { center.x }).into());
        }
        Ok(Self { flux, center })
    }

    pub fn flux(&self) -> f64 {
        self.flux
    }

    pub fn center(&self) -> Point2 {
        self.center
    }
}

/// A polygonal path in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPath {
    vertices: Vec<Point2>,
    closed: bool,
}

impl PlanarPath {
    pub fn new(vertices: Vec<Point2>, closed: bool) -> Result<Self, AbError> {
        let min = if closed { 3 } else { 2 };
        if vertices.len() < min {
            return Err(AbError::TooFewVertices(vertices.len()));
        }
        if let Some(bad) = vertices.iter().find(|v| !v.is_finite()) {
            return Err(DomainError::NonFinite(if bad.x.is_finite() { bad.y } else { bad.x }).into());
        }
        let path = Self { vertices, closed };
        for (i, j) in path.segment_indices() {
            if path.vertices[i] == path.vertices[j] {
                return Err(AbError::RepeatedVertex(i, j));
            }
        }
        Ok(path)
    }

    /// Regular polygon approximating a circle, traversed `winding` times
    /// (negative for clockwise) with `samples` vertices in total.
    pub fn circle(center: Point2, radius: f64, samples: usize, winding: i64) -> Result<Self, AbError> {
        Self::ellipse(center, radius, radius, 0.0, samples, winding)
    }

    /// Ellipse with semi-axes `a`, `b` rotated by `tilt`.
    pub fn ellipse(
        center: Point2,
        a: f64,
        b: f64,
        tilt: f64,
        samples: usize,
        winding: i64,
    ) -> Result<Self, AbError> {
        if winding == 0 {
            return Err(DomainError::ZeroWinding.into());
        }
        let total = TAU * winding as f64;
        let (st, ct) = tilt.sin_cos();
        let vertices = (0..samples)
            .map(|k| {
                let t = total * k as f64 / samples as f64;
                let (u, v) = (a * t.cos(), b * t.sin());
                Point2::new(center.x + ct * u - st * v, center.y + st * u + ct * v)
            })
            .collect();
        Self::new(vertices, true)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// The same path traversed in the opposite direction.
    pub fn reversed(&self) -> PlanarPath {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self {
            vertices,
            closed: self.closed,
        }
    }

    fn segment_indices(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.vertices.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |k| (k, (k + 1) % n))
    }

    /// Signed angle subtended at `center` by each segment, in order.
    fn subtended_angles(&self, center: Point2) -> Result<Vec<f64>, AbError> {
        self.segment_indices()
            .enumerate()
            .map(|(segment, (i, j))| {
                let a = self.vertices[i].sub(center);
                let b = self.vertices[j].sub(center);
                let distance = segment_distance_to_origin(a, b);
                if distance <= AXIS_CLEARANCE {
                    return Err(AbError::Singularity { segment, distance });
                }
                let cross = a.x * b.y - a.y * b.x;
                let dot = a.x * b.x + a.y * b.y;
                Ok(cross.atan2(dot))
            })
            .collect()
    }
}

fn segment_distance_to_origin(a: Point2, b: Point2) -> f64 {
    let d = b.sub(a);
    let len2 = d.x * d.x + d.y * d.y;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (-(a.x * d.x + a.y * d.y) / len2).clamp(0.0, 1.0)
    };
    Point2::new(a.x + t * d.x, a.y + t * d.y).norm()
}

/// Neumaier-compensated sum in the given order.
fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `A(p) = (Φ/2π)(−(y−c_y), x−c_x)/ρ²`.
pub fn vector_potential(field: &SolenoidField, p: Point2) -> Result<[f64; 2], AbError> {
    let r = p.sub(field.center);
    let rho2 = r.x * r.x + r.y * r.y;
    if rho2.sqrt() <= 1e-12 {
        return Err(AbError::OnAxis);
    }
    let k = field.flux / TAU / rho2;
    Ok([-r.y * k, r.x * k])
}

/// Number of times the closed `path` encircles `center` (counter-clockwise
/// positive).
pub fn winding_number(path: &PlanarPath, center: Point2) -> Result<i64, AbError> {
    if !path.closed {
        return Err(AbError::OpenPath);
    }
    let turns = compensated_sum(&path.subtended_angles(center)?) / TAU;
    let rounded = turns.round();
    let residue = (turns - rounded).abs();
    if residue >= WINDING_RESIDUE_TOL {
        return Err(AbError::Resolution { residue });
    }
    Ok(rounded as i64)
}

/// Result of an Aharonov–Bohm line integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbPhase {
    /// `COUPLING · ∮A·dl`, not reduced mod 2π.
    pub raw: f64,
    pub canonical: GeometricPhase,
    pub winding: i64,
}

/// `COUPLING · ∮A·dl` around the closed `path`, integrated exactly segment
/// by segment.
pub fn ab_phase(field: &SolenoidField, path: &PlanarPath) -> Result<AbPhase, AbError> {
    if !path.closed {
        return Err(AbError::OpenPath);
    }
    let angles = path.subtended_angles(field.center)?;
    let total_angle = compensated_sum(&angles);
    let turns = total_angle / TAU;
    let residue = (turns - turns.round()).abs();
    if residue >= WINDING_RESIDUE_TOL {
        return Err(AbError::Resolution { residue });
    }
    let raw = COUPLING * field.flux / TAU * total_angle;
    Ok(AbPhase {
        raw,
        canonical: canonicalize_phase(raw)?,
        winding: turns.round() as i64,
    })
}

/// Outcome of testing whether two phases cancel mod 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complementarity {
    pub sum: GeometricPhase,
    pub vanishes: bool,
}

/// `sum = canonicalize(a + b)`; `vanishes` when `sum` is within `tol` of 0.
pub fn complementarity_check(a: GeometricPhase, b: GeometricPhase, tol: f64) -> Complementarity {
    let sum = wrap(a.value() + b.value());
    Complementarity {
        sum,
        vanishes: phase_distance(sum, GeometricPhase::ZERO) <= tol,
    }
}

/// The phase the rest of the system must contribute if the total
/// wavefunction is to be single-valued: `−ab_phase`, reduced mod 2π.
///
/// This is a *prediction* of the complementarity hypothesis, not a
/// first-principles calculation of any physical subsystem.
pub fn complementary_phase_hypothesis(field: &SolenoidField, path: &PlanarPath) -> Result<GeometricPhase, AbError> {
    Ok(wrap(-ab_phase(field, path)?.raw))
}
