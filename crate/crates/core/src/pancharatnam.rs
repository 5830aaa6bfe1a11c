//! Discrete geometric phases from chains of state overlaps.
//!
//! Two states are *in phase* (Pancharatnam) when `⟨a|b⟩` is real and
//! positive, equivalently when `‖a + b‖` is maximal over rephasings of `b`.
//! The relation is not transitive, and the failure of transitivity around a
//! closed chain is the discrete geometric phase
//!
//! ```text
//! F = arg ∏_k ⟨ψ_k|ψ_{k+1 mod N}⟩
//! ```
//!
//! taken over the *forward* product. This sign choice makes the continuum
//! limit equal `∮ Im⟨ψ|dψ⟩`.

use num_complex::Complex64;
use thiserror::Error;

use crate::phase::{GeometricPhase, QuantumState};

/// Overlaps at or below this magnitude have no meaningful phase.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PancharatnamError {
    #[error("states {first} and {second} are (nearly) orthogonal (|overlap| = {overlap:e}); their relative phase is undefined")]
    UndefinedPhase {
        first: usize,
        second: usize,
        overlap: f64,
    },

    #[error("a chain needs at least 2 states, got {0}")]
    TooFewStates(usize),

    #[error("state {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("a loop phase requires a closed chain")]
    OpenChain,
}

/// An ordered list of states whose consecutive overlaps (including the
/// wraparound pair when closed) are all non-orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapChain {
    states: Vec<QuantumState>,
    closed: bool,
}

impl OverlapChain {
    pub fn new(states: Vec<QuantumState>, closed: bool) -> Result<Self, PancharatnamError> {
        if states.len() < 2 {
            return Err(PancharatnamError::TooFewStates(states.len()));
        }
        let dim = states[0].dim();
        if let Some((index, s)) = states.iter().enumerate().find(|(_, s)| s.dim() != dim) {
            return Err(PancharatnamError::DimensionMismatch {
                index,
                expected: dim,
                found: s.dim(),
            });
        }
        let chain = Self { states, closed };
        for (i, j) in chain.pairs() {
            checked_overlap(&chain.states[i], &chain.states[j], i, j)?;
        }
        Ok(chain)
    }

    pub fn closed(states: Vec<QuantumState>) -> Result<Self, PancharatnamError> {
        Self::new(states, true)
    }

    pub fn open(states: Vec<QuantumState>) -> Result<Self, PancharatnamError> {
        Self::new(states, false)
    }

    pub fn states(&self) -> &[QuantumState] {
        &self.states
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Consecutive index pairs, with `(N−1, 0)` last when closed.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.states.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |k| (k, (k + 1) % n))
    }

    /// The chain started at index `k` instead of 0.
    pub fn rotated(&self, k: usize) -> OverlapChain {
        let mut states = self.states.clone();
        states.rotate_left(k % self.states.len());
        Self {
            states,
            closed: self.closed,
        }
    }

    /// The chain traversed backwards from the same first state.
    pub fn reversed(&self) -> OverlapChain {
        let mut states = Vec::with_capacity(self.states.len());
        if self.closed {
            states.push(self.states[0].clone());
            states.extend(self.states[1..].iter().rev().cloned());
        } else {
            states.extend(self.states.iter().rev().cloned());
        }
        Self {
            states,
            closed: self.closed,
        }
    }
}

fn checked_overlap(
    a: &QuantumState,
    b: &QuantumState,
    first: usize,
    second: usize,
) -> Result<Complex64, PancharatnamError> {
    let ov = a.inner(b);
    if ov.norm() <= ORTHOGONALITY_TOL {
        return Err(PancharatnamError::UndefinedPhase {
            first,
            second,
            overlap: ov.norm(),
        });
    }
    Ok(ov)
}

/// `arg⟨a|b⟩`; zero exactly when `a` and `b` are in phase.
pub fn overlap_phase(a: &QuantumState, b: &QuantumState) -> Result<GeometricPhase, PancharatnamError> {
    if a.dim() != b.dim() {
        return Err(PancharatnamError::DimensionMismatch {
            index: 1,
            expected: a.dim(),
            found: b.dim(),
        });
    }
    checked_overlap(a, b, 0, 1).map(GeometricPhase::arg_of)
}

/// Pancharatnam's criterion: `|arg⟨a|b⟩| ≤ tol`.
pub fn in_phase(a: &QuantumState, b: &QuantumState, tol: f64) -> Result<bool, PancharatnamError> {
    Ok(overlap_phase(a, b)?.value().abs() <= tol)
}

/// Intensity `‖a + e^{iα} b‖²` of the superposition with `b` rephased by
/// `alpha`. It equals `2 + 2|⟨a|b⟩| cos(α + arg⟨a|b⟩)`, maximal exactly when
/// `a` and `e^{iα} b` are in phase.
pub fn superposition_intensity(a: &QuantumState, b: &QuantumState, alpha: f64) -> f64 {
    let f = Complex64::from_polar(1.0, alpha);
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x + f * y).norm_sqr())
        .sum()
}

/// Product of the unit-modulus phase factors of the given overlaps,
/// accumulated left to right.
fn phase_product<I: IntoIterator<Item = Complex64>>(overlaps: I) -> Complex64 {
    overlaps.into_iter().fold(Complex64::new(1.0, 0.0), |acc, ov| {
        let p = acc * (ov / ov.norm());
        // keep the running product on the unit circle
        p / p.norm()
    })
}

/// `arg ∏ ⟨ψ_k|ψ_{k+1 mod N}⟩` over a closed chain.
pub fn loop_phase_discrete(chain: &OverlapChain) -> Result<GeometricPhase, PancharatnamError> {
    if !chain.closed {
        return Err(PancharatnamError::OpenChain);
    }
    let s = &chain.states;
    let overlaps = chain
        .pairs()
        .map(|(i, j)| checked_overlap(&s[i], &s[j], i, j))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GeometricPhase::arg_of(phase_product(overlaps)))
}

/// Rephases each state to be in phase with its (already transported)
/// predecessor.
///
/// The holonomy of a closed chain is `arg⟨t_{N−1}|ψ_0⟩`, the phase left over
/// on the closing step once every other step is in phase; it coincides with
/// [`loop_phase_discrete`]. An open chain has holonomy 0.
pub fn parallel_transport(
    chain: &OverlapChain,
) -> Result<(Vec<QuantumState>, GeometricPhase), PancharatnamError> {
    let s = &chain.states;
    let mut transported: Vec<QuantumState> = Vec::with_capacity(s.len());
    transported.push(s[0].clone());
    for k in 1..s.len() {
        let ov = checked_overlap(&transported[k - 1], &s[k], k - 1, k)?;
        transported.push(s[k].scaled(ov.conj() / ov.norm()));
    }
    let holonomy = if chain.closed {
        let n = s.len();
        let ov = checked_overlap(&transported[n - 1], &s[0], n - 1, 0)?;
        GeometricPhase::arg_of(ov)
    } else {
        GeometricPhase::ZERO
    };
    Ok((transported, holonomy))
}

/// `arg(⟨a|b⟩⟨b|c⟩⟨c|a⟩)`: zero exactly when "a in phase with b" and "b in
/// phase with c" imply "a in phase with c" for this triple.
pub fn transitivity_defect(
    a: &QuantumState,
    b: &QuantumState,
    c: &QuantumState,
) -> Result<GeometricPhase, PancharatnamError> {
    let chain = OverlapChain::closed(vec![a.clone(), b.clone(), c.clone()])?;
    loop_phase_discrete(&chain)
}
