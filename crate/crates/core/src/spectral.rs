//! Small dense Hermitian eigenproblems and smooth continuation of a single
//! eigenvector band along a sampled parameter path.
//!
//! 2×2 matrices are diagonalized in closed form; larger ones by cyclic
//! complex Jacobi rotations. Both are deterministic and dependency-free.

use num_complex::Complex64;
use thiserror::Error;

use crate::hamiltonian_dsl::{EvalError, HamiltonianFamily};
use crate::phase::{DomainError, ParamPath, QuantumState};

/// Default minimum spectral gap tolerated by [`continue_branch`].
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

/// Minimum `|⟨ψ_k|ψ_{k+1}⟩|` between consecutive samples of one band.
pub const MIN_STEP_OVERLAP: f64 = 0.5;

// Slack on MIN_STEP_OVERLAP so that overlaps sitting exactly on the bound
// (e.g. cos(π/3)) are not rejected by rounding.
const OVERLAP_SLACK: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("matrix is not Hermitian: max |H - H^dagger| = {max_deviation:e} exceeds {tolerance:e}")]
pub struct HermiticityError {
    pub max_deviation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    NotHermitian(#[from] HermiticityError),

    #[error("Jacobi iteration did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("spectral gap {gap:e} at sample {index} is below the tolerance; cannot continue the band through a degeneracy")]
    Degeneracy { index: usize, gap: f64 },

    #[error("overlap {overlap:.3} between samples {index} and {next} is below {MIN_STEP_OVERLAP}; refine the path sampling")]
    Resolution {
        index: usize,
        next: usize,
        overlap: f64,
    },

    #[error("band index {band} out of range for a {dim}-level family")]
    BandOutOfRange { band: usize, dim: usize },

    #[error("path has dimension {found} but the family takes {expected} parameters")]
    PathDimension { expected: usize, found: usize },

    #[error("the band does not return to its starting ray after one circuit (overlap {overlap:e}); the path is not closed in Hamiltonian space")]
    OpenCircuit { overlap: f64 },

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Dense N×N complex matrix known to be Hermitian within a tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Checks Hermiticity of row-major `data`; the matrix is kept exactly as
    /// given.
    pub fn new(n: usize, data: Vec<Complex64>, tol: f64) -> Result<Self, HermiticityError> {
        assert_eq!(data.len(), n * n, "data length must be n*n");
        let mut max_deviation = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (data[i * n + j] - data[j * n + i].conj()).norm();
                max_deviation = max_deviation.max(d);
            }
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN fails
        if !(max_deviation <= tol) {
            return Err(HermiticityError {
                max_deviation,
                tolerance: tol,
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>], tol: f64) -> Result<Self, HermiticityError> {
        let n = rows.len();
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(n, data, tol)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Eigenvalues in ascending order with paired orthonormal eigenvectors.
/// Each eigenvector carries the canonical phase (largest amplitude real
/// positive).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<QuantumState>,
}

impl EigenSystem {
    /// Gap between band `k` and its nearest neighbour (∞ for a 1-level
    /// system, which cannot occur for valid families).
    pub fn band_gap(&self, k: usize) -> f64 {
        let ev = &self.eigenvalues;
        let below = if k > 0 { ev[k] - ev[k - 1] } else { f64::INFINITY };
        let above = if k + 1 < ev.len() { ev[k + 1] - ev[k] } else { f64::INFINITY };
        below.min(above)
    }

    /// Smallest gap between adjacent eigenvalues.
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Hermitian eigendecomposition. Hermiticity was enforced when `h` was
/// built; the solvers read the upper triangle averaged with the lower.
pub fn eigh(h: &HermitianMatrix) -> Result<EigenSystem, SpectralError> {
    let (values, vectors) = if h.n == 2 { eigh_2x2(h) } else { eigh_jacobi(h)? };

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| QuantumState::new(vectors[k].clone()).map(|s| s.with_canonical_phase()))
        .collect::<Result<_, _>>()?;
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

fn eigh_2x2(h: &HermitianMatrix) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let a = h.get(0, 0).re;
    let d = h.get(1, 1).re;
    // average the off-diagonal pair so tiny Hermiticity noise is symmetric
    let b = (h.get(0, 1) + h.get(1, 0).conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let delta = 0.5 * (a - d);
    let r = delta.hypot(b.norm());
    let zero = Complex64::new(0.0, 0.0);
    if r == 0.0 {
        let e0 = vec![Complex64::new(1.0, 0.0), zero];
        let e1 = vec![zero, Complex64::new(1.0, 0.0)];
        return (vec![mean, mean], vec![e0, e1]);
    }
    // pick the algebraically stable column of (H − λ) in each case
    let (lower, upper) = if delta >= 0.0 {
        (
            vec![-b, Complex64::new(r + delta, 0.0)],
            vec![Complex64::new(r + delta, 0.0), b.conj()],
        )
    } else {
        (
            vec![Complex64::new(r - delta, 0.0), -b.conj()],
            vec![b, Complex64::new(r - delta, 0.0)],
        )
    };
    (vec![mean - r, mean + r], vec![lower, upper])
}

fn eigh_jacobi(h: &HermitianMatrix) -> Result<(Vec<f64>, Vec<Vec<Complex64>>), SpectralError> {
    let n = h.n;
    let mut a = h.data.clone();
    // symmetrize the working copy only; the caller's matrix is untouched
    for i in 0..n {
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
        for j in (i + 1)..n {
            let v = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = v;
            a[j * n + i] = v.conj();
        }
    }
    let mut v = HermitianMatrix::identity(n).data;
    let scale = h.frobenius_norm();
    let threshold = f64::EPSILON * scale;

    let off_norm = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(SpectralError::NoConvergence {
                sweeps,
                off_norm: off_norm(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let e = apq / mag;
                let tau = (a[q * n + q].re - a[p * n + p].re) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J restricted to (p, q): [[c, s], [−s·ē, c·ē]]
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = -e.conj() * s;
                let jqq = e.conj() * c;
                // A ← A·J
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * jpp + akq * jqp;
                    a[k * n + q] = akp * jpq + akq * jqq;
                }
                // A ← J†·A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[q * n + k] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
                // V ← V·J
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * jpp + vkq * jqp;
                    v[k * n + q] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i].re).collect();
    let vectors = (0..n).map(|k| (0..n).map(|i| v[i * n + k]).collect()).collect();
    Ok((values, vectors))
}

/// One eigenvector band sampled along a path, with its phases fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSection {
    path: ParamPath,
    band_index: usize,
    states: Vec<QuantumState>,
    closure: Option<QuantumState>,
    gauge_label: String,
}

impl StateSection {
    pub(crate) fn from_parts(
        path: ParamPath,
        band_index: usize,
        states: Vec<QuantumState>,
        closure: Option<QuantumState>,
        gauge_label: String,
    ) -> Self {
        debug_assert_eq!(path.len(), states.len());
        Self {
            path,
            band_index,
            states,
            closure,
            gauge_label,
        }
    }

    pub fn path(&self) -> &ParamPath {
        &self.path
    }

    pub fn band_index(&self) -> usize {
        self.band_index
    }

    pub fn states(&self) -> &[QuantumState] {
        &self.states
    }

    /// The state carried to the closing point after one full circuit, with
    /// the same phase convention as the rest of the section. `None` for open
    /// paths.
    pub fn closure(&self) -> Option<&QuantumState> {
        self.closure.as_ref()
    }

    pub fn gauge_label(&self) -> &str {
        &self.gauge_label
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Follows eigenvector band `band_index` (ascending rank) along `path`,
/// fixing each phase so consecutive overlaps are real and positive.
///
/// The first state takes the canonical phase (largest amplitude real
/// positive). For closed paths the band is carried one more step to the
/// closing point and stored as the section's closure.
pub fn continue_branch(
    family: &HamiltonianFamily,
    path: &ParamPath,
    band_index: usize,
    gap_tol: f64,
) -> Result<StateSection, SpectralError> {
    check_compat(family, path, band_index)?;

    let band_state = |index: usize, point| -> Result<QuantumState, SpectralError> {
        let sys = eigh(&family.evaluate(point)?)?;
        let gap = sys.band_gap(band_index);
        if gap < gap_tol {
            return Err(SpectralError::Degeneracy { index, gap });
        }
        Ok(sys.eigenvectors[band_index].clone())
    };

    let n = path.len();
    let mut states = Vec::with_capacity(n);
    states.push(band_state(0, &path.samples()[0])?.with_canonical_phase());
    for k in 1..n {
        let raw = band_state(k, &path.samples()[k])?;
        states.push(transport_step(&states[k - 1], &raw, k - 1, k)?);
    }

    let closure = match path.closing_point() {
        Some(end) => {
            let raw = band_state(0, &end)?;
            let carried = transport_step(&states[n - 1], &raw, n - 1, 0)?;
            let overlap = carried.inner(&states[0]).norm();
            if overlap < 1.0 - 1e-8 {
                return Err(SpectralError::OpenCircuit { overlap });
            }
            Some(carried)
        }
        None => None,
    };

    Ok(StateSection::from_parts(
        path.clone(),
        band_index,
        states,
        closure,
        "parallel-transport".to_string(),
    ))
}

fn transport_step(
    prev: &QuantumState,
    raw: &QuantumState,
    index: usize,
    next: usize,
) -> Result<QuantumState, SpectralError> {
    let (aligned, overlap) = raw.aligned_to(prev);
    if overlap < MIN_STEP_OVERLAP - OVERLAP_SLACK {
        return Err(SpectralError::Resolution {
            index,
            next,
            overlap,
        });
    }
    Ok(aligned)
}

/// All path samples whose smallest adjacent eigenvalue gap is strictly
/// below `gap_tol`, in ascending index order.
pub fn detect_degeneracies(
    family: &HamiltonianFamily,
    path: &ParamPath,
    gap_tol: f64,
) -> Result<Vec<(usize, f64)>, SpectralError> {
    if path.dim() != family.parameter_count() {
        return Err(SpectralError::PathDimension {
            expected: family.parameter_count(),
            found: path.dim(),
        });
    }
    let mut out = Vec::new();
    for (index, point) in path.samples().iter().enumerate() {
        let gap = eigh(&family.evaluate(point)?)?.min_gap();
        if gap < gap_tol {
            out.push((index, gap));
        }
    }
    Ok(out)
}

pub(crate) fn check_compat(
    family: &HamiltonianFamily,
    path: &ParamPath,
    band_index: usize,
) -> Result<(), SpectralError> {
    if path.dim() != family.parameter_count() {
        return Err(SpectralError::PathDimension {
            expected: family.parameter_count(),
            found: path.dim(),
        });
    }
    if band_index >= family.dim() {
        return Err(SpectralError::BandOutOfRange {
            band: band_index,
            dim: family.dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian_dsl::{builtin_spinor_family, parse_family};
    use crate::phase::ParameterPoint;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(c: &[f64]) -> ParameterPoint {
        ParameterPoint::new(c.to_vec()).unwrap()
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
        let mut data = vec![c(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = c(rng.gen_range(-2.0..2.0), 0.0);
            for j in (i + 1)..n {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                data[i * n + j] = z;
                data[j * n + i] = z.conj();
            }
        }
        HermitianMatrix::new(n, data, 0.0).unwrap()
    }

    fn assert_eigensystem_valid(h: &HermitianMatrix, sys: &EigenSystem) {
        let n = h.dim();
        assert!(sys.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        for i in 0..n {
            for j in 0..n {
                let ov = sys.eigenvectors[i].inner(&sys.eigenvectors[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ov - c(want, 0.0)).norm() <= 1e-10, "orthonormality {i},{j}: {ov}");
            }
            let v = sys.eigenvectors[i].amplitudes();
            let hv = h.apply(v);
            let res: f64 = hv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - b * sys.eigenvalues[i]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-9 * h.frobenius_norm().max(1e-300), "residual {res}");
        }
    }

    #[test]
    fn spinor_at_zero_angle() {
        let h = builtin_spinor_family().evaluate(&pt(&[1.0, 0.0])).unwrap();
        let sys = eigh(&h).unwrap();
        assert_eq!(sys.eigenvalues, vec![-1.0, 1.0]);
        assert!((sys.eigenvectors[0].inner(&QuantumState::from_real(&[0.0, 1.0]).unwrap())).norm() > 1.0 - 1e-15);
        assert!((sys.eigenvectors[1].inner(&QuantumState::from_real(&[1.0, 0.0]).unwrap())).norm() > 1.0 - 1e-15);
    }

    #[test]
    fn spinor_at_quarter_turn_uses_half_angles() {
        let h = builtin_spinor_family().evaluate(&pt(&[1.0, PI / 2.0])).unwrap();
        let sys = eigh(&h).unwrap();
        let plus = QuantumState::from_real(&[FRAC_PI_4.cos(), FRAC_PI_4.sin()]).unwrap();
        let minus = QuantumState::from_real(&[-FRAC_PI_4.sin(), FRAC_PI_4.cos()]).unwrap();
        assert!((sys.eigenvectors[1].inner(&plus).norm() - 1.0).abs() < 1e-14);
        assert!((sys.eigenvectors[0].inner(&minus).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_identity() {
        let sys = eigh(&HermitianMatrix::identity(2)).unwrap();
        assert_eq!(sys.eigenvalues, vec![1.0, 1.0]);
        assert_eigensystem_valid(&HermitianMatrix::identity(2), &sys);
        let sys = eigh(&HermitianMatrix::identity(4)).unwrap();
        assert_eq!(sys.eigenvalues, vec![1.0; 4]);
    }

    #[test]
    fn non_hermitian_rejected() {
        let err = HermitianMatrix::new(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1e-10)
            .unwrap_err();
        assert_eq!(err.max_deviation, 1.0);
        let err = HermitianMatrix::new(2, vec![c(1.0, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1e-10)
            .unwrap_err();
        assert_eq!(err.max_deviation, 1.0);
    }

    #[test]
    fn random_matrices_all_sizes() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for n in 2..=8 {
            for _ in 0..20 {
                let h = random_hermitian(&mut rng, n);
                let sys = eigh(&h).unwrap();
                assert_eigensystem_valid(&h, &sys);
                assert_eq!(eigh(&h).unwrap(), sys, "deterministic");
            }
        }
    }

    #[test]
    fn jacobi_agrees_with_closed_form_on_embedded_block() {
        // a 3x3 block-diagonal matrix whose 2x2 block is handled in closed form
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let h2 = random_hermitian(&mut rng, 2);
        let mut data = vec![c(0.0, 0.0); 9];
        for i in 0..2 {
            for j in 0..2 {
                data[i * 3 + j] = h2.get(i, j);
            }
        }
        data[8] = c(10.0, 0.0);
        let h3 = HermitianMatrix::new(3, data, 0.0).unwrap();
        let s2 = eigh(&h2).unwrap();
        let s3 = eigh(&h3).unwrap();
        for k in 0..2 {
            assert!((s2.eigenvalues[k] - s3.eigenvalues[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn eigenvalues_match_characteristic_polynomial() {
        let fam = crate::hamiltonian_dsl::builtin_spinor_cartesian_family();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let (x, y) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let sys = eigh(&fam.evaluate(&pt(&[x, y])).unwrap()).unwrap();
            // det(H − λ) = λ² − (x² + y²)
            let root = (x * x + y * y).sqrt();
            worst = worst.max((sys.eigenvalues[0] + root).abs());
            worst = worst.max((sys.eigenvalues[1] - root).abs());
        }
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn spectra_invariant_under_diagonal_unitary() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for n in [2usize, 3, 5] {
            for _ in 0..20 {
                let h = random_hermitian(&mut rng, n);
                let phases: Vec<Complex64> =
                    (0..n).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..6.3))).collect();
                let data = (0..n * n)
                    .map(|idx| {
                        let (i, j) = (idx / n, idx % n);
                        phases[i].conj() * h.get(i, j) * phases[j]
                    })
                    .collect();
                let g = HermitianMatrix::new(n, data, 1e-12).unwrap();
                let a = eigh(&h).unwrap().eigenvalues;
                let b = eigh(&g).unwrap().eigenvalues;
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn branch_on_unit_circle_is_parallel_transported() {
        let path = ParamPath::polar_circle(1.0, 360, 1).unwrap();
        let sec = continue_branch(&builtin_spinor_family(), &path, 0, DEFAULT_GAP_TOL).unwrap();
        assert_eq!(sec.len(), 360);
        assert_eq!(sec.gauge_label(), "parallel-transport");
        for w in sec.states().windows(2) {
            let ov = w[0].inner(&w[1]);
            assert!(ov.im.abs() <= 1e-10);
            assert!(ov.re > 0.0);
        }
        // the section follows |χ−(φ)⟩ = (−sin φ/2, cos φ/2) up to one global phase
        for (k, s) in sec.states().iter().enumerate() {
            let phi = 2.0 * PI * k as f64 / 360.0;
            let chi = QuantumState::from_real(&[-(phi / 2.0).sin(), (phi / 2.0).cos()]).unwrap();
            assert!((chi.inner(s) - c(1.0, 0.0)).norm() < 1e-12, "sample {k}");
        }
        // carried once around, the band comes back with a sign flip
        let closure = sec.closure().unwrap();
        assert!((closure.inner(&sec.states()[0]) - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn constant_family_gives_constant_state() {
        let fam = parse_family("[[1, 0],[0, -1]]", &["x", "y"]).unwrap();
        let path = ParamPath::cartesian_circle([0.3, 0.1], 2.0, 17, 1).unwrap();
        let sec = continue_branch(&fam, &path, 0, DEFAULT_GAP_TOL).unwrap();
        let want = QuantumState::from_real(&[0.0, 1.0]).unwrap();
        for s in sec.states() {
            assert_eq!(s, &want);
        }
    }

    #[test]
    fn branch_through_origin_is_degenerate() {
        let pts = vec![pt(&[1.0, 0.0]), pt(&[0.0, 0.0]), pt(&[1.0, 1.0])];
        let path = ParamPath::new(pts, false).unwrap();
        let err = continue_branch(&builtin_spinor_family(), &path, 0, DEFAULT_GAP_TOL).unwrap_err();
        assert_eq!(err, SpectralError::Degeneracy { index: 1, gap: 0.0 });
    }

    #[test]
    fn coarse_sampling_is_resolution_error() {
        let path = ParamPath::polar_circle(1.0, 3, 1).unwrap();
        // three samples sit exactly on the 0.5 bound and are accepted
        continue_branch(&builtin_spinor_family(), &path, 0, DEFAULT_GAP_TOL).unwrap();
        let pts = vec![pt(&[1.0, 0.0]), pt(&[1.0, 2.5]), pt(&[1.0, 5.0])];
        let path = ParamPath::new(pts, false).unwrap();
        let err = continue_branch(&builtin_spinor_family(), &path, 0, DEFAULT_GAP_TOL).unwrap_err();
        assert!(matches!(err, SpectralError::Resolution { index: 0, next: 1, .. }), "{err:?}");
    }

    #[test]
    fn band_and_dimension_checks() {
        let path = ParamPath::polar_circle(1.0, 8, 1).unwrap();
        assert_eq!(
            continue_branch(&builtin_spinor_family(), &path, 5, DEFAULT_GAP_TOL).unwrap_err(),
            SpectralError::BandOutOfRange { band: 5, dim: 2 }
        );
        let fam = parse_family("[[x, 0],[0, -x]]", &["x"]).unwrap();
        assert!(matches!(
            continue_branch(&fam, &path, 0, DEFAULT_GAP_TOL),
            Err(SpectralError::PathDimension { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn degeneracy_detection() {
        let fam = builtin_spinor_family();
        let circle = ParamPath::polar_circle(1.0, 100, 1).unwrap();
        assert!(detect_degeneracies(&fam, &circle, DEFAULT_GAP_TOL).unwrap().is_empty());
        assert!(detect_degeneracies(&fam, &circle, 1.999).unwrap().is_empty());

        let pts = vec![pt(&[1.0, 0.0]), pt(&[0.0, 0.0]), pt(&[0.5, 1.0])];
        let path = ParamPath::new(pts, false).unwrap();
        assert_eq!(detect_degeneracies(&fam, &path, 1e-6).unwrap(), vec![(1, 0.0)]);
        assert!(detect_degeneracies(&fam, &path, 0.0).unwrap().is_empty());
        assert_eq!(detect_degeneracies(&fam, &path, 1.5).unwrap(), vec![(1, 0.0), (2, 1.0)]);
    }
}
