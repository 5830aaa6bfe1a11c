//! Geometric phases of parameterized quantum systems.
//!
//! Three independent routes to the same quantity:
//!
//! * [`pancharatnam`]: discrete overlap products of explicit state chains,
//! * [`berry`]: connections and loop phases of eigenstate sections of a
//!   [`HamiltonianFamily`] written in a small matrix language
//!   ([`hamiltonian_dsl`]) and diagonalized by [`spectral`],
//! * [`aharonov_bohm`]: line integrals of a solenoid's vector potential.
//!
//! [`exchange_stats`] does the bookkeeping for exchange phases of identical
//! particles and [`spinor`] holds closed-form eigenstates of the two-level
//! reference family.
//!
//! ```
//! use holonomy_core::{berry, hamiltonian_dsl::builtin_spinor_family, ParamPath};
//! use std::f64::consts::PI;
//!
//! let family = builtin_spinor_family();
//! let path = ParamPath::polar_circle(1.0, 1000, 1).unwrap();
//! let phase = berry::loop_integral(&family, 0, &path, None).unwrap();
//! assert!((phase.value() - PI).abs() < 1e-9);
//! ```

pub mod aharonov_bohm;
pub mod berry;
pub mod exchange_stats;
pub mod hamiltonian_dsl;
pub mod pancharatnam;
pub mod phase;
pub mod spectral;
pub mod spinor;

pub use hamiltonian_dsl::{parse_family, HamiltonianFamily};
pub use phase::{canonicalize_phase, phase_distance, DomainError, GeometricPhase, ParamPath, ParameterPoint, QuantumState};
pub use spectral::{eigh, EigenSystem, HermitianMatrix, StateSection};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/phases.md")]
    mod phases {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/sections.md")]
    mod sections {}
    #[doc = include_str!("../../../book/src/pancharatnam.md")]
    mod pancharatnam {}
    #[doc = include_str!("../../../book/src/berry.md")]
    mod berry {}
    #[doc = include_str!("../../../book/src/aharonov_bohm.md")]
    mod aharonov_bohm {}
    #[doc = include_str!("../../../book/src/exchange.md")]
    mod exchange {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
