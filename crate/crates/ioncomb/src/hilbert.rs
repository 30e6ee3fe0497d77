//! Complex linear algebra over qubit ⊗ truncated-Fock spaces.
//!
//! Basis ordering is spin-major: the amplitude of spin configuration `s` with
//! Fock level `n` lives at index `s * cutoff + n`. Spin configurations pack
//! ion 1 in the high bit and ion 2 in the low bit, with bit value 0 = |↓⟩ and
//! 1 = |↑⟩. All other modules go through the accessors here instead of doing
//! raw index math.
//!
//! Everything is dense: dimensions stay below a few hundred for the regimes
//! this crate targets, where dense eigendecomposition is fast and simple.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, SimError};

/// Leakage threshold above which propagation refuses to trust the truncated
/// basis.
pub const LEAKAGE_LIMIT: f64 = 1e-6;

/// Truncated harmonic-oscillator basis, levels 0..cutoff-1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    cutoff: usize,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(SimError::Invalid("Fock cutoff must be >= 2".into()));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Lowering operator a in the truncated basis.
    pub fn lowering(&self) -> DMatrix<Complex64> {
        let mut a = DMatrix::zeros(self.cutoff, self.cutoff);
        for n in 1..self.cutoff {
            a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        a
    }

    /// Number operator a†a as a real diagonal.
    pub fn number_diagonal(&self) -> Vec<f64> {
        (0..self.cutoff).map(|n| n as f64).collect()
    }
}

/// Joint spin-motion pure state over (qubit^m ⊗ Fock).
#[derive(Debug, Clone)]
pub struct QuantumState {
    num_qubits: usize,
    fock: FockSpace,
    amplitudes: DVector<Complex64>,
}

impl QuantumState {
    /// Normalized basis state |spin⟩ ⊗ |n⟩.
    pub fn basis_state(num_qubits: usize, fock: FockSpace, spin: usize, n: usize) -> Result<Self> {
        Self::check_qubits(num_qubits)?;
        let dim = (1 << num_qubits) * fock.cutoff();
        if spin >= 1 << num_qubits || n >= fock.cutoff() {
            return Err(SimError::Invalid(format!(
                "basis state (spin {spin}, n {n}) out of range"
            )));
        }
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[spin * fock.cutoff() + n] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, fock, amplitudes })
    }

    /// Build a state from an amplitude vector, normalizing it.
    pub fn from_amplitudes(
        num_qubits: usize,
        fock: FockSpace,
        amplitudes: DVector<Complex64>,
    ) -> Result<Self> {
        Self::check_qubits(num_qubits)?;
        let dim = (1 << num_qubits) * fock.cutoff();
        if amplitudes.len() != dim {
            return Err(SimError::Invalid(format!(
                "amplitude vector length {} does not match dimension {dim}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if norm < 1e-14 {
            return Err(SimError::Invalid("cannot normalize the zero vector".into()));
        }
        Ok(Self { num_qubits, fock, amplitudes: amplitudes / Complex64::new(norm, 0.0) })
    }

    fn check_qubits(num_qubits: usize) -> Result<()> {
        if num_qubits == 1 || num_qubits == 2 {
            Ok(())
        } else {
            Err(SimError::Invalid("num_qubits must be 1 or 2".into()))
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn fock(&self) -> FockSpace {
        self.fock
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut DVector<Complex64> {
        &mut self.amplitudes
    }

    /// Amplitude of |spin⟩ ⊗ |n⟩.
    pub fn amplitude(&self, spin: usize, n: usize) -> Complex64 {
        self.amplitudes[spin * self.fock.cutoff() + n]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Population of the joint basis state (spin, n).
    pub fn population(&self, spin: usize, n: usize) -> f64 {
        self.amplitude(spin, n).norm_sqr()
    }

    /// Total population of a spin configuration, summed over motion.
    pub fn spin_population(&self, spin: usize) -> f64 {
        let c = self.fock.cutoff();
        (0..c).map(|n| self.population(spin, n)).sum()
    }

    /// Population in the top two Fock levels, summed over spins. This is the
    /// truncation-leakage monitor. Levels 0 and 1 are never counted, so the
    /// monitor is inert for cutoff < 3 (the motion-decoupled case).
    pub fn leakage(&self) -> f64 {
        let c = self.fock.cutoff();
        (0..1 << self.num_qubits)
            .map(|s| {
                (c.saturating_sub(2).max(2)..c).map(|n| self.population(s, n)).sum::<f64>()
            })
            .sum()
    }
}

/// Reduced spin density matrix after tracing out motion.
#[derive(Debug, Clone)]
pub struct SpinDensityMatrix {
    matrix: DMatrix<Complex64>,
}

impl SpinDensityMatrix {
    /// Validated constructor: Hermitian within 1e-10, unit trace within
    /// 1e-10, positive semidefinite within -1e-9 on the smallest eigenvalue.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = matrix.nrows();
        if d != matrix.ncols() || (d != 2 && d != 4) {
            return Err(SimError::Invalid("spin density matrix must be 2x2 or 4x4".into()));
        }
        let herm_defect = (&matrix - matrix.adjoint()).camax();
        if herm_defect > 1e-10 {
            return Err(SimError::Invalid(format!(
                "density matrix not Hermitian: defect {herm_defect:.3e}"
            )));
        }
        let trace: Complex64 = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(SimError::Invalid(format!("density matrix trace {trace} != 1")));
        }
        let min_eig = matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &e| m.min(e));
        if min_eig < -1e-9 {
            return Err(SimError::Invalid(format!(
                "density matrix not positive semidefinite: min eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Diagonal population of spin configuration `s`.
    pub fn population(&self, s: usize) -> f64 {
        self.matrix[(s, s)].re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Overlap fidelity ⟨ψ|ρ|ψ⟩ with a pure target state.
    pub fn overlap(&self, target: &DVector<Complex64>) -> f64 {
        (target.adjoint() * &self.matrix * target)[(0, 0)].re
    }
}

/// ρ_spin[s, s'] = Σ_n ψ[s, n] conj(ψ[s', n]).
pub fn partial_trace_motion(state: &QuantumState) -> SpinDensityMatrix {
    let ns = 1 << state.num_qubits();
    let c = state.fock().cutoff();
    let mut rho = DMatrix::zeros(ns, ns);
    for s in 0..ns {
        for sp in 0..ns {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..c {
                acc += state.amplitude(s, n) * state.amplitude(sp, n).conj();
            }
            rho[(s, sp)] = acc;
        }
    }
    SpinDensityMatrix::from_matrix_unchecked(rho)
}

/// Hermitian matrix intended as the generator of a unitary.
#[derive(Debug, Clone)]
pub struct HermitianGenerator {
    matrix: DMatrix<Complex64>,
}

impl HermitianGenerator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(SimError::Invalid("generator must be square".into()));
        }
        let defect = (&matrix - matrix.adjoint()).camax();
        if defect > 1e-12 {
            return Err(SimError::Invalid(format!(
                "generator not Hermitian: defect {defect:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

/// Eigendecomposition of a Hermitian generator, reused to build
/// exp(−i·scale·G) for many scales. This is the unitary cache: one
/// factorization per generator, O(d²) per additional exponential applied to
/// a vector.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    vectors: DMatrix<Complex64>,
    values: DVector<f64>,
}

impl HermitianEig {
    pub fn new(gen: &HermitianGenerator) -> Self {
        let eig = gen.matrix.clone().symmetric_eigen();
        Self { vectors: eig.eigenvectors, values: eig.eigenvalues }
    }

    /// exp(−i·scale·G) as a dense matrix.
    pub fn exp_scaled(&self, scale: f64) -> DMatrix<Complex64> {
        let phases: Vec<Complex64> = self
            .values
            .iter()
            .map(|&e| Complex64::new(0.0, -scale * e).exp())
            .collect();
        // V · diag(phases) · V†
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        &scaled * self.vectors.adjoint()
    }

    /// exp(−i·scale·G)·v without forming the matrix.
    pub fn apply_exp(&self, scale: f64, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut coeffs = self.vectors.adjoint() * v;
        for (c, &e) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= Complex64::new(0.0, -scale * e).exp();
        }
        &self.vectors * coeffs
    }
}

/// exp(−i·scale·gen) via eigendecomposition.
pub fn unitary_exp(gen: &HermitianGenerator, scale: f64) -> DMatrix<Complex64> {
    HermitianEig::new(gen).exp_scaled(scale)
}

/// Displacement operator D(α) = exp(α a† − α* a) in the truncated basis.
///
/// Errors with `CutoffTooSmall` when the displaced ground state leaks more
/// than [`LEAKAGE_LIMIT`] into the top two levels.
pub fn displacement_operator(alpha: Complex64, fock: FockSpace) -> Result<DMatrix<Complex64>> {
    let a = fock.lowering();
    let adag = a.adjoint();
    // α a† − α* a is anti-Hermitian; i(α a† − α* a) is Hermitian and
    // exp(−i · 1 · H) recovers D(α).
    let h = (adag * alpha - a * alpha.conj()) * Complex64::new(0.0, 1.0);
    let gen = HermitianGenerator::new(h)?;
    let d = unitary_exp(&gen, 1.0);
    let c = fock.cutoff();
    let leak: f64 = (c.saturating_sub(2).max(1)..c).map(|n| d[(n, 0)].norm_sqr()).sum();
    if leak > LEAKAGE_LIMIT {
        return Err(SimError::CutoffTooSmall { leakage: leak, limit: LEAKAGE_LIMIT });
    }
    Ok(d)
}

/// Thermal Fock populations p_n = n̄ⁿ/(n̄+1)ⁿ⁺¹, renormalized over the
/// truncated basis. Errors if the truncated tail carries more than 1e-4 of
/// the untruncated distribution.
pub fn thermal_population(nbar: f64, fock: FockSpace) -> Result<Vec<f64>> {
    let tail = thermal_tail_mass(nbar, fock.cutoff());
    if tail > 1e-4 {
        return Err(SimError::CutoffTooSmall { leakage: tail, limit: 1e-4 });
    }
    Ok(thermal_population_renormalized(nbar, fock.cutoff()))
}

/// Untruncated probability mass at n >= cutoff.
pub fn thermal_tail_mass(nbar: f64, cutoff: usize) -> f64 {
    if nbar <= 0.0 {
        return 0.0;
    }
    (nbar / (nbar + 1.0)).powi(cutoff as i32)
}

/// Thermal populations renormalized on the truncated basis with no tail
/// check; callers that accept the truncation (the cooling rate model) use
/// this directly.
pub fn thermal_population_renormalized(nbar: f64, cutoff: usize) -> Vec<f64> {
    if nbar <= 0.0 {
        let mut p = vec![0.0; cutoff];
        p[0] = 1.0;
        return p;
    }
    let r = nbar / (nbar + 1.0);
    let mut p: Vec<f64> = (0..cutoff).map(|n| r.powi(n as i32) / (nbar + 1.0)).collect();
    let total: f64 = p.iter().sum();
    for x in &mut p {
        *x /= total;
    }
    p
}

// --- spin operator helpers ---------------------------------------------------

/// 2x2 identity.
pub fn id2() -> DMatrix<Complex64> {
    DMatrix::identity(2, 2)
}

/// σx in the (|↓⟩, |↑⟩) basis.
pub fn sigma_x() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
    ])
}

/// σy in the (|↓⟩, |↑⟩) basis, σy = −i(σ+ − σ−).
pub fn sigma_y() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(0.0, 0.0),
    ])
}

/// σz with σz|↑⟩ = +|↑⟩, i.e. diag(−1, +1) in the (|↓⟩, |↑⟩) basis.
pub fn sigma_z() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ])
}

/// σ+ = |↑⟩⟨↓|.
pub fn sigma_plus() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
    ])
}

/// Sum of ±1 spin-z values of configuration `s` over `num_qubits` ions.
pub fn total_sz(s: usize, num_qubits: usize) -> i32 {
    (0..num_qubits).map(|b| if s >> b & 1 == 1 { 1 } else { -1 }).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianGenerator {
        let m = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        HermitianGenerator::new((&m + m.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
    }

    fn random_state(num_qubits: usize, fock: FockSpace, rng: &mut impl Rng) -> QuantumState {
        let dim = (1 << num_qubits) * fock.cutoff();
        let v = DVector::from_fn(dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        QuantumState::from_amplitudes(num_qubits, fock, v).unwrap()
    }

    #[test]
    fn displacement_of_zero_is_identity() {
        let fock = FockSpace::new(20).unwrap();
        let d = displacement_operator(Complex64::new(0.0, 0.0), fock).unwrap();
        let defect = (&d - DMatrix::<Complex64>::identity(20, 20)).camax();
        assert!(defect < 1e-12);
    }

    #[test]
    fn displacement_builds_coherent_state() {
        // D(α)|0⟩ amplitudes against the coherent-state series
        // e^{−|α|²/2} αⁿ/√n!.
        let fock = FockSpace::new(30).unwrap();
        let alpha = Complex64::new(0.3, 0.4); // |α| = 0.5
        let d = displacement_operator(alpha, fock).unwrap();
        let mut fact = 1.0;
        for n in 0..25 {
            if n > 0 {
                fact *= n as f64;
            }
            let expected = (-alpha.norm_sqr() / 2.0).exp() * alpha.powu(n as u32) / fact.sqrt();
            assert!(
                (d[(n, 0)] - expected).norm() < 1e-8,
                "n = {n}: {} vs {expected}",
                d[(n, 0)]
            );
        }
    }

    #[test]
    fn displacement_inverse_pair() {
        let fock = FockSpace::new(20).unwrap();
        let eta = Complex64::new(0.0, 0.1);
        let d = displacement_operator(eta, fock).unwrap();
        let dinv = displacement_operator(-eta, fock).unwrap();
        let defect = (&d * &dinv - DMatrix::<Complex64>::identity(20, 20)).camax();
        assert!(defect < 1e-8);
    }

    #[test]
    fn displacement_composition_law() {
        // D(α)D(β) = e^{i Im(α β̄)} D(α+β) within 1e-6.
        let fock = FockSpace::new(25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let alpha = Complex64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
            let beta = Complex64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
            let lhs = displacement_operator(alpha, fock).unwrap()
                * displacement_operator(beta, fock).unwrap();
            let phase = Complex64::new(0.0, (alpha * beta.conj()).im).exp();
            let rhs = displacement_operator(alpha + beta, fock).unwrap() * phase;
            // compare on the low-n block, away from truncation
            let mut defect: f64 = 0.0;
            for i in 0..15 {
                for j in 0..15 {
                    defect = defect.max((lhs[(i, j)] - rhs[(i, j)]).norm());
                }
            }
            assert!(defect < 1e-6, "defect {defect:.2e}");
        }
    }

    #[test]
    fn displacement_cutoff_error() {
        let fock = FockSpace::new(4).unwrap();
        match displacement_operator(Complex64::new(1.5, 0.0), fock) {
            Err(SimError::CutoffTooSmall { .. }) => {}
            other => panic!("expected CutoffTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn thermal_ground_and_normalization() {
        let fock = FockSpace::new(30).unwrap();
        let p = thermal_population(0.0, fock).unwrap();
        assert_eq!(p[0], 1.0);
        assert!(p[1..].iter().all(|&x| x == 0.0));

        let p = thermal_population(1.0, fock).unwrap();
        let total: f64 = p.iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn thermal_mean_matches_nbar() {
        let fock = FockSpace::new(60).unwrap();
        let p = thermal_population(2.0, fock).unwrap();
        let mean: f64 = p.iter().enumerate().map(|(n, &pn)| n as f64 * pn).sum();
        assert!((mean - 2.0).abs() < 1e-3, "mean = {mean}");
    }

    #[test]
    fn thermal_cutoff_error() {
        let fock = FockSpace::new(10).unwrap();
        match thermal_population(5.0, fock) {
            Err(SimError::CutoffTooSmall { .. }) => {}
            other => panic!("expected CutoffTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let fock = FockSpace::new(5).unwrap();
        let state = QuantumState::basis_state(1, fock, 0, 0).unwrap();
        let rho = partial_trace_motion(&state);
        assert!((rho.population(0) - 1.0).abs() < 1e-14);
        assert!((rho.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_entangled_state() {
        // (|↓,0⟩ + |↑,1⟩)/√2 → diag(1/2, 1/2), purity 1/2.
        let fock = FockSpace::new(5).unwrap();
        let mut v = DVector::zeros(10);
        v[0] = Complex64::new(1.0, 0.0);
        v[5 + 1] = Complex64::new(1.0, 0.0);
        let state = QuantumState::from_amplitudes(1, fock, v).unwrap();
        let rho = partial_trace_motion(&state);
        assert!((rho.population(0) - 0.5).abs() < 1e-14);
        assert!((rho.population(1) - 0.5).abs() < 1e-14);
        assert!((rho.purity() - 0.5).abs() < 1e-14);
        assert!(rho.element(0, 1).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_random_states() {
        // Purity ≤ 1, trace = 1, Hermitian, on randomized states.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fock = FockSpace::new(8).unwrap();
        for _ in 0..20 {
            let state = random_state(2, fock, &mut rng);
            let rho = partial_trace_motion(&state);
            let checked = SpinDensityMatrix::new(rho.matrix().clone()).unwrap();
            assert!(checked.purity() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn unitary_exp_identity_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gen = random_hermitian(40, &mut rng);
        let u0 = unitary_exp(&gen, 0.0);
        assert!((&u0 - DMatrix::<Complex64>::identity(40, 40)).camax() < 1e-12);

        let u = unitary_exp(&gen, 0.7);
        let defect = (u.adjoint() * &u - DMatrix::<Complex64>::identity(40, 40)).camax();
        assert!(defect < 1e-10, "unitarity defect {defect:.2e}");
    }

    #[test]
    fn unitary_exp_pauli_identity() {
        // exp(−iθσx/2) = cos(θ/2) I − i sin(θ/2) σx.
        let theta = 0.83;
        let gen = HermitianGenerator::new(sigma_x()).unwrap();
        let u = unitary_exp(&gen, theta / 2.0);
        assert!((u[(0, 0)] - Complex64::new((theta / 2.0).cos(), 0.0)).norm() < 1e-12);
        assert!((u[(0, 1)] - Complex64::new(0.0, -(theta / 2.0).sin())).norm() < 1e-12);
    }

    #[test]
    fn apply_exp_matches_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gen = random_hermitian(12, &mut rng);
        let eig = HermitianEig::new(&gen);
        let v = DVector::from_fn(12, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let direct = eig.exp_scaled(0.31) * &v;
        let fast = eig.apply_exp(0.31, &v);
        assert!((direct - fast).camax() < 1e-12);
    }

    #[test]
    fn state_norm_and_leakage() {
        let fock = FockSpace::new(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let state = random_state(1, fock, &mut rng);
        assert!((state.norm() - 1.0).abs() < 1e-10);
        let manual = state.population(0, 4)
            + state.population(0, 5)
            + state.population(1, 4)
            + state.population(1, 5);
        assert!((state.leakage() - manual).abs() < 1e-15);
    }

    #[test]
    fn density_matrix_validation_rejects_bad_inputs() {
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.7, 0.0),
            Complex64::new(0.1, 0.2),
            Complex64::new(0.1, 0.2), // not conjugate-symmetric
            Complex64::new(0.3, 0.0),
        ]);
        assert!(SpinDensityMatrix::new(m).is_err());
    }
}
