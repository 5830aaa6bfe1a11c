//! Closed-form eigenstates of the built-in spinor family
//! `H = r[[cos φ, sin φ],[sin φ, −cos φ]]`.
//!
//! These are independent of the parser and eigensolver and serve as the
//! reference the numerical pipeline is checked against.

use num_complex::Complex64;

use crate::phase::QuantumState;

/// Upper band, eigenvalue `+r`: `(cos φ/2, sin φ/2)`.
pub fn chi_plus(phi: f64) -> [f64; 2] {
    let (s, c) = (phi / 2.0).sin_cos();
    [c, s]
}

/// Lower band, eigenvalue `−r`: `(−sin φ/2, cos φ/2)`.
pub fn chi_minus(phi: f64) -> [f64; 2] {
    let (s, c) = (phi / 2.0).sin_cos();
    [-s, c]
}

/// `dχ₊/dφ`, which equals `½ χ₋`.
pub fn chi_plus_derivative(phi: f64) -> [f64; 2] {
    let m = chi_minus(phi);
    [0.5 * m[0], 0.5 * m[1]]
}

/// `dχ₋/dφ`, which equals `−½ χ₊`.
pub fn chi_minus_derivative(phi: f64) -> [f64; 2] {
    let p = chi_plus(phi);
    [-0.5 * p[0], -0.5 * p[1]]
}

/// `χ₋ e^{iφ/2}`, single-valued around the circuit.
pub fn x_minus(phi: f64) -> [Complex64; 2] {
    let m = chi_minus(phi);
    let g = Complex64::from_polar(1.0, phi / 2.0);
    [g * m[0], g * m[1]]
}

/// `Im⟨X₋|dX₋/dφ⟩` evaluated from the analytic derivative.
pub fn x_minus_connection(phi: f64) -> f64 {
    let x = x_minus(phi);
    let m = chi_minus(phi);
    let dm = chi_minus_derivative(phi);
    let g = Complex64::from_polar(1.0, phi / 2.0);
    let i_half = Complex64::new(0.0, 0.5);
    let dx = [g * (dm[0] + i_half * m[0]), g * (dm[1] + i_half * m[1])];
    (x[0].conj() * dx[0] + x[1].conj() * dx[1]).im
}

pub fn chi_minus_state(phi: f64) -> QuantumState {
    let m = chi_minus(phi);
    QuantumState::from_unit(vec![Complex64::new(m[0], 0.0), Complex64::new(m[1], 0.0)])
        .expect("analytic spinor is normalized")
}

pub fn chi_plus_state(phi: f64) -> QuantumState {
    let p = chi_plus(phi);
    QuantumState::from_unit(vec![Complex64::new(p[0], 0.0), Complex64::new(p[1], 0.0)])
        .expect("analytic spinor is normalized")
}

/// Central difference `(f(φ+h) − f(φ−h)) / 2h` of a two-component real
/// function.
pub fn central_difference(f: impl Fn(f64) -> [f64; 2], phi: f64, h: f64) -> [f64; 2] {
    let (p, m) = (f(phi + h), f(phi - h));
    [(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)]
}

/// Euclidean error of the central-difference `dχ₊/dφ` against `½χ₋` at `phi`.
pub fn stencil_error(phi: f64, h: f64) -> f64 {
    let fd = central_difference(chi_plus, phi, h);
    let exact = chi_plus_derivative(phi);
    (fd[0] - exact[0]).hypot(fd[1] - exact[1])
}
