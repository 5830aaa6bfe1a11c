//! Berry connection, loop phases and gauge transformations of state
//! sections.
//!
//! # Sign convention
//!
//! The connection is `A_j = Im⟨Ψ|∂_j Ψ⟩` and the loop phase is
//! `F(C) = ∮_C A·dR`, i.e. `(1/i)∮⟨Ψ|∇Ψ⟩·dR`. This is the *negative* of the
//! other common convention `γ = i∮⟨Ψ|∇Ψ⟩·dR`. For the lower band of the
//! two-level family `r[[cos φ, sin φ], [sin φ, −cos φ]]` on the unit circle
//! either convention gives π, which is where the two are easiest to confuse.
//!
//! Loop phases are computed from the discrete overlap product of the
//! sampled section, which is gauge invariant by construction. Quadrature of
//! sampled connection values ([`connection_quadrature`]) is kept as an
//! independent cross-check only.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::hamiltonian_dsl::HamiltonianFamily;
use crate::pancharatnam::{loop_phase_discrete, overlap_phase, OverlapChain, PancharatnamError};
use crate::phase::{phase_distance, wrap, DomainError, GeometricPhase, ParamPath, ParameterPoint, QuantumState};
use crate::spectral::{check_compat, continue_branch, eigh, SpectralError, StateSection, DEFAULT_GAP_TOL, MIN_STEP_OVERLAP};

/// Tolerance on a gauge's declared winding, in radians.
pub const GAUGE_WINDING_TOL: f64 = 1e-9;

/// Closure phases within this distance of 0 (π) count as single-valued
/// (sign-flipped).
pub const AUDIT_TOL: f64 = 1e-6;

/// Default finite-difference step relative to the coordinate scale.
pub const DEFAULT_STEP_SCALE: f64 = 1e-5;

// Estimated rounding noise (relative) above which a finite-difference step is
// refused.
const CANCELLATION_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BerryError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),

    #[error(transparent)]
    Pancharatnam(#[from] PancharatnamError),

    #[error(transparent)]
    Domain(#[from] DomainError),

    #[error("gauge function is non-finite at sample {index}")]
    NonFiniteGauge { index: usize },

    #[error("gauge declares winding {declared} but changes by {actual_turns} turns around the path")]
    GaugeWindingMismatch { declared: i64, actual_turns: f64 },

    #[error("finite-difference step must be positive and finite, got {0}")]
    InvalidStep(f64),

    #[error("finite-difference step {step:e} is so small that rounding dominates (estimated noise {noise:e})")]
    Cancellation { step: f64, noise: f64 },

    #[error("operation requires a closed path")]
    OpenPath,
}

/// The Berry connection at one parameter point, one component per
/// coordinate (radians per coordinate unit).
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionSample {
    pub point: ParameterPoint,
    pub components: Vec<f64>,
}

type GaugeFn = dyn Fn(&ParameterPoint) -> f64 + Send + Sync;

/// A real phase function `g(R)`, applied to states as `exp(i g(R))`.
///
/// A gauge may declare an integer winding `k`, meaning `g` changes by `2πk`
/// over the closed path it is used with; the declaration is verified on use.
/// Gauges without a declaration (such as the half-angle gauge) are legal
/// pointwise, and whether they make a section single-valued is left to
/// [`single_valuedness_audit`].
#[derive(Clone)]
pub struct GaugeFunction {
    func: Arc<GaugeFn>,
    declared_winding: Option<i64>,
    label: String,
}

impl GaugeFunction {
    pub fn new(
        label: impl Into<String>,
        winding: i64,
        func: impl Fn(&ParameterPoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            func: Arc::new(func),
            declared_winding: Some(winding),
            label: label.into(),
        }
    }

    pub fn pointwise(
        label: impl Into<String>,
        func: impl Fn(&ParameterPoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            func: Arc::new(func),
            declared_winding: None,
            label: label.into(),
        }
    }

    /// `g(R) = R_coordinate / 2`, the gauge that turns the sign-flipping
    /// lower spinor band into a single-valued one.
    pub fn half_angle(coordinate: usize) -> Self {
        Self::pointwise(format!("coord[{coordinate}]/2"), move |p| 0.5 * p.coords()[coordinate])
    }

    pub fn eval(&self, point: &ParameterPoint) -> f64 {
        (self.func)(point)
    }

    pub fn declared_winding(&self) -> Option<i64> {
        self.declared_winding
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Verifies the declared winding (if any) against `path`.
    pub fn check_winding(&self, path: &ParamPath) -> Result<(), BerryError> {
        let (Some(declared), Some(end)) = (self.declared_winding, path.closing_point()) else {
            return Ok(());
        };
        let change = self.eval(&end) - self.eval(&path.samples()[0]);
        if !change.is_finite() || (change - TAU * declared as f64).abs() > GAUGE_WINDING_TOL {
            return Err(BerryError::GaugeWindingMismatch {
                declared,
                actual_turns: change / TAU,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for GaugeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeFunction")
            .field("label", &self.label)
            .field("declared_winding", &self.declared_winding)
            .finish_non_exhaustive()
    }
}

/// Outcome of carrying a section once around its closed path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleValuednessAudit {
    /// `arg⟨ψ_end|ψ_0⟩` between the state carried around the circuit and
    /// the starting state.
    pub closure_phase: GeometricPhase,
    pub single_valued: bool,
    pub sign_flip: bool,
}

/// Default finite-difference step at `point`.
pub fn default_step(point: &ParameterPoint) -> f64 {
    DEFAULT_STEP_SCALE * coordinate_scale(point)
}

fn coordinate_scale(point: &ParameterPoint) -> f64 {
    point.coords().iter().fold(1.0f64, |m, c| m.max(c.abs()))
}

/// Berry connection `Im⟨Ψ|∂_j Ψ⟩` of band `band` at `point` by centered
/// differences.
///
/// The neighbours `R ± step·e_j` are phase-aligned to the center state by
/// parallel transport before differencing, so without a gauge the result is
/// the (vanishing) parallel-transport connection. With a gauge the states
/// are multiplied by `exp(i g)` first and the result is `∂_j g` to O(step²).
pub fn connection_numeric(
    family: &HamiltonianFamily,
    band: usize,
    point: &ParameterPoint,
    step: f64,
    gauge: Option<&GaugeFunction>,
) -> Result<ConnectionSample, BerryError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(BerryError::InvalidStep(step));
    }
    let noise = f64::EPSILON * (1.0 + coordinate_scale(point)) / step;
    if noise > CANCELLATION_LIMIT {
        return Err(BerryError::Cancellation { step, noise });
    }
    let single = ParamPath::new(vec![point.clone()], false)?;
    check_compat(family, &single, band)?;

    let band_state = |p: &ParameterPoint| -> Result<QuantumState, BerryError> {
        let sys = eigh(&family.evaluate(p).map_err(SpectralError::from)?)?;
        let gap = sys.band_gap(band);
        if gap < DEFAULT_GAP_TOL {
            return Err(SpectralError::Degeneracy { index: 0, gap }.into());
        }
        Ok(sys.eigenvectors[band].clone())
    };
    let gauged = |s: QuantumState, p: &ParameterPoint| -> Result<QuantumState, BerryError> {
        match gauge {
            None => Ok(s),
            Some(g) => {
                let v = g.eval(p);
                if !v.is_finite() {
                    return Err(BerryError::NonFiniteGauge { index: 0 });
                }
                Ok(s.rephased(v))
            }
        }
    };

    let center_raw = band_state(point)?;
    let center = gauged(center_raw.clone(), point)?;
    let mut components = Vec::with_capacity(point.dim());
    for j in 0..point.dim() {
        let side = |sign: f64| -> Result<QuantumState, BerryError> {
            let p = point.shifted(j, sign * step);
            let (aligned, overlap) = band_state(&p)?.aligned_to(&center_raw);
            if overlap < MIN_STEP_OVERLAP {
                return Err(SpectralError::Resolution {
                    index: 0,
                    next: 1,
                    overlap,
                }
                .into());
            }
            gauged(aligned, &p)
        };
        let plus = side(1.0)?;
        let minus = side(-1.0)?;
        let diff: Complex64 = center
            .amplitudes()
            .iter()
            .zip(plus.amplitudes().iter().zip(minus.amplitudes()))
            .map(|(c, (p, m))| c.conj() * (p - m))
            .sum();
        components.push(diff.im / (2.0 * step));
    }
    Ok(ConnectionSample {
        point: point.clone(),
        components,
    })
}

/// Multiplies state `k` by `exp(i g(R_k))`; the closure state is multiplied
/// by `exp(i g(R_end))` at the path's closing point.
pub fn apply_gauge(section: &StateSection, gauge: &GaugeFunction) -> Result<StateSection, BerryError> {
    let path = section.path();
    let factor = |index: usize, p: &ParameterPoint| -> Result<f64, BerryError> {
        let v = gauge.eval(p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(BerryError::NonFiniteGauge { index })
        }
    };
    let states = section
        .states()
        .iter()
        .zip(path.samples())
        .enumerate()
        .map(|(k, (s, p))| Ok(s.rephased(factor(k, p)?)))
        .collect::<Result<Vec<_>, BerryError>>()?;
    let closure = match (section.closure(), path.closing_point()) {
        (Some(c), Some(end)) => Some(c.rephased(factor(states.len(), &end)?)),
        _ => None,
    };
    Ok(StateSection::from_parts(
        path.clone(),
        section.band_index(),
        states,
        closure,
        format!("{} + gauge({})", section.gauge_label(), gauge.label()),
    ))
}

/// Continues the band along `path` and applies `gauge` if given, after
/// verifying the gauge's declared winding.
pub fn gauged_section(
    family: &HamiltonianFamily,
    band: usize,
    path: &ParamPath,
    gauge: Option<&GaugeFunction>,
    gap_tol: f64,
) -> Result<StateSection, BerryError> {
    let section = continue_branch(family, path, band, gap_tol)?;
    match gauge {
        None => Ok(section),
        Some(g) => {
            g.check_winding(path)?;
            apply_gauge(&section, g)
        }
    }
}

/// Discrete loop phase `arg ∏⟨ψ_k|ψ_{k+1 mod N}⟩` of a closed section.
pub fn section_loop_phase(section: &StateSection) -> Result<GeometricPhase, BerryError> {
    if !section.path().is_closed() {
        return Err(BerryError::OpenPath);
    }
    let chain = OverlapChain::closed(section.states().to_vec())?;
    Ok(loop_phase_discrete(&chain)?)
}

/// `F(C)` for band `band` around the closed `path`, canonicalized.
///
/// The optional gauge changes the intermediate section but not the
/// returned phase.
pub fn loop_integral(
    family: &HamiltonianFamily,
    band: usize,
    path: &ParamPath,
    gauge: Option<&GaugeFunction>,
) -> Result<GeometricPhase, BerryError> {
    if !path.is_closed() {
        return Err(BerryError::OpenPath);
    }
    let section = gauged_section(family, band, path, gauge, DEFAULT_GAP_TOL)?;
    section_loop_phase(&section)
}

/// Carries band `band` once around `path` and reports whether it returns
/// to itself.
pub fn single_valuedness_audit(
    family: &HamiltonianFamily,
    band: usize,
    path: &ParamPath,
    gauge: Option<&GaugeFunction>,
) -> Result<SingleValuednessAudit, BerryError> {
    if !path.is_closed() {
        return Err(BerryError::OpenPath);
    }
    audit_section(&gauged_section(family, band, path, gauge, DEFAULT_GAP_TOL)?)
}

pub fn audit_section(section: &StateSection) -> Result<SingleValuednessAudit, BerryError> {
    let closure = section.closure().ok_or(BerryError::OpenPath)?;
    let closure_phase = overlap_phase(closure, &section.states()[0])?;
    Ok(SingleValuednessAudit {
        closure_phase,
        single_valued: phase_distance(closure_phase, GeometricPhase::ZERO) <= AUDIT_TOL,
        sign_flip: phase_distance(closure_phase, GeometricPhase::PI) <= AUDIT_TOL,
    })
}

/// `max_k |Im⟨ψ_k|ψ_{k+1}⟩|`, how far the section is from satisfying
/// `A·dR = 0` step by step. Zero for sections with fewer than two states.
pub fn orthogonal_gauge_check(section: &StateSection) -> f64 {
    section
        .states()
        .windows(2)
        .map(|w| w[0].inner(&w[1]).im.abs())
        .fold(0.0, f64::max)
}

/// Raw (uncanonicalized) sum of step phases `Σ arg⟨ψ_k|ψ_{k+1}⟩` along the
/// section including the final step onto the closure state: the discrete
/// line integral `∮ A·dR` of this section's own connection.
///
/// For a single-valued section this equals the loop phase; in general
/// `loop phase ≡ connection integral + closure phase (mod 2π)`.
pub fn connection_line_integral(section: &StateSection) -> Result<f64, BerryError> {
    let closure = section.closure().ok_or(BerryError::OpenPath)?;
    let states = section.states();
    let steps = states.windows(2).map(|w| (&w[0], &w[1]));
    let last = std::iter::once((&states[states.len() - 1], closure));
    let mut total = 0.0;
    for (a, b) in steps.chain(last) {
        total += overlap_phase(a, b)?.value();
    }
    Ok(total)
}

/// Trapezoid-rule quadrature `Σ ½(A_k + A_{k+1})·ΔR_k` of sampled connection
/// values around the closed `path`. Slow and only first-principles in the
/// gauge the connection is sampled in; exists to cross-check
/// [`loop_integral`].
pub fn connection_quadrature(
    family: &HamiltonianFamily,
    band: usize,
    path: &ParamPath,
    gauge: Option<&GaugeFunction>,
) -> Result<f64, BerryError> {
    let end = path.closing_point().ok_or(BerryError::OpenPath)?;
    let mut points: Vec<ParameterPoint> = path.samples().to_vec();
    points.push(end);
    let samples = points
        .iter()
        .map(|p| connection_numeric(family, band, p, default_step(p), gauge))
        .collect::<Result<Vec<_>, _>>()?;
    let mut total = 0.0;
    for (k, w) in samples.windows(2).enumerate() {
        let (a, b) = (&points[k], &points[k + 1]);
        for j in 0..a.dim() {
            let dr = b.coords()[j] - a.coords()[j];
            total += 0.5 * (w[0].components[j] + w[1].components[j]) * dr;
        }
    }
    Ok(total)
}

/// Canonical phase of a raw line integral.
pub fn canonical(raw: f64) -> GeometricPhase {
    wrap(raw)
}
