//! Stroboscopic propagation under the delta-kick drive.
//!
//! Each picked pulse applies an instantaneous spin-flip kick with a
//! momentum displacement, followed by free evolution for one period:
//!
//! ```text
//! V = exp(−i H0 T) · exp(−i θp/2 (σ+ c_n D(iη) + σ− c̄_n D(iη)†))
//! ```
//!
//! with `H0 = ωt a†a + ½ ω0' Σ σz` and `c_n = Σ_t w_t e^{i(Δω_t nT + φ_t)}`
//! the per-pulse tone coefficient. The kick for any `c_n` is obtained from a
//! single eigendecomposition of the base generator: conjugation by spin-z
//! phases rotates the tone phase in, so propagation costs two dense
//! matrix-vector products per pulse.
//!
//! The first-order analytic amplitudes (geometric-series line shapes of the
//! carrier and first sidebands) live here too, as the approximation the
//! exact propagator is tested against.

use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::hilbert::{
    total_sz, FockSpace, HermitianEig, HermitianGenerator, QuantumState, LEAKAGE_LIMIT,
};

/// One drive tone of the kick.
#[derive(Debug, Clone, Copy)]
pub struct Tone {
    /// Net comb offset Δω in rad/s, relative to the spin frequency carried
    /// by the frame (`FrameConfig::omega_0_plus_dw`).
    pub delta_omega: f64,
    /// Static phase in radians.
    pub phase: f64,
    /// Amplitude weight; weights over all tones sum to 1.
    pub weight: f64,
}

/// Per-pulse drive configuration.
#[derive(Debug, Clone)]
pub struct KickConfig {
    /// Bloch-angle change per pulse, θp = Ω T.
    pub theta_p: f64,
    pub tones: Vec<Tone>,
    /// Lamb-Dicke parameter; 0 disables motion coupling.
    pub eta: f64,
    /// Time between picked pulses, seconds.
    pub period: f64,
}

impl KickConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_p >= 0.0) {
            return Err(SimError::Invalid("theta_p must be >= 0".into()));
        }
        if !(self.period > 0.0) {
            return Err(SimError::Invalid("period must be > 0".into()));
        }
        if self.tones.is_empty() {
            return Err(SimError::Invalid("at least one tone is required".into()));
        }
        let total: f64 = self.tones.iter().map(|t| t.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(SimError::Invalid(format!(
                "tone weights sum to {total}; must sum to 1"
            )));
        }
        Ok(())
    }

    /// Complex tone coefficient at pulse `n`, c_n = Σ w_t e^{−i(Δω_t nT + φ_t)}.
    /// The drive rotates clockwise on σ+, so a tone at Δω = +ωt meets the
    /// blue-sideband resonance.
    pub fn tone_coefficient(&self, pulse_index: u64) -> Complex64 {
        let t = pulse_index as f64 * self.period;
        self.tones
            .iter()
            .map(|tone| {
                Complex64::new(0.0, -(tone.delta_omega * t + tone.phase)).exp() * tone.weight
            })
            .sum()
    }
}

/// Free-evolution frame between kicks.
#[derive(Debug, Clone, Copy)]
pub struct FrameConfig {
    /// Trap frequency ωt in rad/s.
    pub omega_t: f64,
    /// Spin frequency ω0 + Δω in rad/s appearing in H0. Only its value
    /// modulo 2π/T matters; tones carry offsets relative to this frame.
    pub omega_0_plus_dw: f64,
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_t > 0.0) {
            return Err(SimError::Invalid("omega_t must be > 0".into()));
        }
        Ok(())
    }
}

/// Sideband branch of a resonance condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Carrier,
    Red,
    Blue,
}

/// Per-pulse accumulated phase ϑ of one branch, reduced to [0, 2π).
#[derive(Debug, Clone, Copy)]
pub struct ResonanceAngle {
    pub theta: f64,
    pub branch: Branch,
}

impl ResonanceAngle {
    /// ϑ = (ω0 − Δω ∓ ωt) T mod 2π for the given branch.
    pub fn new(frame: &FrameConfig, tone_delta_omega: f64, period: f64, branch: Branch) -> Self {
        let base = frame.omega_0_plus_dw - tone_delta_omega;
        let omega = match branch {
            Branch::Carrier => base,
            Branch::Red => base - frame.omega_t,
            Branch::Blue => base + frame.omega_t,
        };
        Self { theta: (omega * period).rem_euclid(std::f64::consts::TAU), branch }
    }
}

/// Σ_{n=0}^{N−1} e^{inϑ}, evaluated in closed form with the resonant limit
/// sin(Nϑ/2)/sin(ϑ/2) → N taken when ϑ is numerically at a multiple of 2π.
pub fn geometric_phase_sum(theta: f64, pulses: u64) -> Complex64 {
    let n = pulses as f64;
    // Wrap to (−π, π] first: the sum only depends on ϑ mod 2π, and keeping
    // the argument of sin(Nϑ/2) small avoids precision loss near resonance.
    let tau = std::f64::consts::TAU;
    let wrapped = theta - tau * (theta / tau).round();
    let half = 0.5 * wrapped;
    if half.sin().abs() < 1e-12 {
        // ϑ = 2πj: every term is 1.
        return Complex64::new(n, 0.0);
    }
    let envelope = (n * half).sin() / half.sin();
    Complex64::new(0.0, half * (n - 1.0)).exp() * envelope
}

/// First-order transition amplitudes after N pulses, per branch, from
/// resumming the kick series into geometric-series line shapes.
///
/// `carrier` multiplies σ+, `red` multiplies σ+a (amplitude for |↓,n⟩ →
/// |↑,n−1⟩ is `red`·√n), `blue` multiplies σ+a† (|↓,n⟩ → |↑,n+1⟩ is
/// `blue`·√(n+1)).
#[derive(Debug, Clone, Copy)]
pub struct BranchAmplitudes {
    pub carrier: Complex64,
    pub red: Complex64,
    pub blue: Complex64,
}

pub fn first_order_amplitudes(
    cfg: &KickConfig,
    frame: &FrameConfig,
    pulses: u64,
) -> BranchAmplitudes {
    let minus_i = Complex64::new(0.0, -1.0);
    let mut carrier = Complex64::new(0.0, 0.0);
    let mut red = Complex64::new(0.0, 0.0);
    let mut blue = Complex64::new(0.0, 0.0);
    for tone in &cfg.tones {
        let w = tone.weight * Complex64::new(0.0, tone.phase).exp();
        let tc = ResonanceAngle::new(frame, tone.delta_omega, cfg.period, Branch::Carrier);
        let tr = ResonanceAngle::new(frame, tone.delta_omega, cfg.period, Branch::Red);
        let tb = ResonanceAngle::new(frame, tone.delta_omega, cfg.period, Branch::Blue);
        // V^N ≈ e^{−iH0NT}(1 − i θp/2 Σ Q_n): the −i multiplies every
        // branch; the sideband terms carry an extra iη from the Lamb-Dicke
        // expansion of D(iη e^{iωt nT}).
        carrier += minus_i * w * (cfg.theta_p / 2.0) * geometric_phase_sum(tc.theta, pulses);
        let eta_factor = minus_i * Complex64::new(0.0, cfg.eta);
        red += eta_factor * w * (cfg.theta_p / 2.0) * geometric_phase_sum(tr.theta, pulses);
        blue += eta_factor * w * (cfg.theta_p / 2.0) * geometric_phase_sum(tb.theta, pulses);
    }
    BranchAmplitudes { carrier, red, blue }
}

/// First-order (in θp) transition probabilities out of |↓, n⟩, using the
/// exact single-phonon displacement matrix elements instead of their
/// η-linear approximation. The geometric resummation is unchanged: a time
/// phase on the displacement argument only multiplies the (m, n) element by
/// e^{iβ(m−n)}, which is exactly the phase the series sums over.
///
/// Relative to [`first_order_amplitudes`] this keeps the Debye-Waller factor
/// e^{−η²/2} and the √n/√(n+1) scaling, so it isolates the O(θp²)
/// truncation when compared against exact propagation.
#[derive(Debug, Clone, Copy)]
pub struct FirstOrderProbabilities {
    pub carrier: f64,
    pub red: f64,
    pub blue: f64,
}

pub fn first_order_probabilities(
    cfg: &KickConfig,
    frame: &FrameConfig,
    pulses: u64,
    fock: FockSpace,
    initial_n: usize,
) -> Result<FirstOrderProbabilities> {
    let d = crate::hilbert::displacement_operator(Complex64::new(0.0, cfg.eta), fock)?;
    let n = initial_n;
    let me_carrier = d[(n, n)];
    let me_red = if n > 0 { d[(n - 1, n)] } else { Complex64::new(0.0, 0.0) };
    let me_blue = if n + 1 < fock.cutoff() { d[(n + 1, n)] } else { Complex64::new(0.0, 0.0) };

    let minus_i = Complex64::new(0.0, -1.0);
    let mut carrier = Complex64::new(0.0, 0.0);
    let mut red = Complex64::new(0.0, 0.0);
    let mut blue = Complex64::new(0.0, 0.0);
    for tone in &cfg.tones {
        let w = tone.weight * Complex64::new(0.0, tone.phase).exp();
        let coeff = minus_i * w * (cfg.theta_p / 2.0);
        for (acc, branch, me) in [
            (&mut carrier, Branch::Carrier, me_carrier),
            (&mut red, Branch::Red, me_red),
            (&mut blue, Branch::Blue, me_blue),
        ] {
            let angle = ResonanceAngle::new(frame, tone.delta_omega, cfg.period, branch);
            *acc += coeff * me * geometric_phase_sum(angle.theta, pulses);
        }
    }
    Ok(FirstOrderProbabilities {
        carrier: carrier.norm_sqr(),
        red: red.norm_sqr(),
        blue: blue.norm_sqr(),
    })
}

/// Pulse count above which the first sidebands are resolved, (ωt T η)^{−1}.
pub fn min_pulses_for_resolution(omega_t: f64, period: f64, eta: f64) -> f64 {
    1.0 / (omega_t * period * eta)
}

/// Precomputed kick machinery for one (drive, frame, space) combination.
pub struct KickEngine {
    cfg: KickConfig,
    num_qubits: usize,
    fock: FockSpace,
    eig: HermitianEig,
    /// Spin-z sums per spin configuration, for the tone-phase conjugation.
    sz: Vec<i32>,
}

impl KickEngine {
    pub fn new(cfg: &KickConfig, num_qubits: usize, fock: FockSpace) -> Result<Self> {
        cfg.validate()?;
        let c = fock.cutoff();
        let ns = 1usize << num_qubits;
        let dim = ns * c;
        let d = crate::hilbert::displacement_operator(Complex64::new(0.0, cfg.eta), fock)?;
        let ddag = d.adjoint();
        // G0 = Σ_ions (σ+ ⊗ D + σ− ⊗ D†), equal illumination on all ions.
        let mut g0 = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        for s in 0..ns {
            for bit in 0..num_qubits {
                if s >> bit & 1 == 0 {
                    let sp = s | 1 << bit; // raise this ion
                    for i in 0..c {
                        for j in 0..c {
                            g0[(sp * c + i, s * c + j)] += d[(i, j)];
                            g0[(s * c + j, sp * c + i)] += ddag[(j, i)];
                        }
                    }
                }
            }
        }
        let gen = HermitianGenerator::new(g0)?;
        Ok(Self {
            cfg: cfg.clone(),
            num_qubits,
            fock,
            eig: HermitianEig::new(&gen),
            sz: (0..ns).map(|s| total_sz(s, num_qubits)).collect(),
        })
    }

    fn spin_phase(&self, psi: f64, sign: f64) -> Vec<Complex64> {
        self.sz
            .iter()
            .map(|&sz| Complex64::new(0.0, sign * psi * 0.5 * sz as f64).exp())
            .collect()
    }

    /// Apply the kick of pulse `n` to an amplitude vector in place.
    pub fn apply_kick(&self, amps: &mut nalgebra::DVector<Complex64>, pulse_index: u64) {
        let cn = self.cfg.tone_coefficient(pulse_index);
        let mag = cn.norm();
        if self.cfg.theta_p * mag == 0.0 {
            return;
        }
        let psi = cn.arg();
        let c = self.fock.cutoff();
        // kick = Rz(ψ) exp(−i θp|c|/2 G0) Rz(ψ)†
        let conj_in = self.spin_phase(psi, -1.0);
        let conj_out = self.spin_phase(psi, 1.0);
        for (s, ph) in conj_in.iter().enumerate() {
            for n in 0..c {
                amps[s * c + n] *= ph;
            }
        }
        *amps = self.eig.apply_exp(self.cfg.theta_p * mag / 2.0, amps);
        for (s, ph) in conj_out.iter().enumerate() {
            for n in 0..c {
                amps[s * c + n] *= ph;
            }
        }
    }

    /// Kick unitary of pulse `n` as a dense matrix.
    pub fn kick_matrix(&self, pulse_index: u64) -> nalgebra::DMatrix<Complex64> {
        let cn = self.cfg.tone_coefficient(pulse_index);
        let mag = cn.norm();
        let dim = (1usize << self.num_qubits) * self.fock.cutoff();
        if self.cfg.theta_p * mag == 0.0 {
            return nalgebra::DMatrix::identity(dim, dim);
        }
        let psi = cn.arg();
        let c = self.fock.cutoff();
        let mut u = self.eig.exp_scaled(self.cfg.theta_p * mag / 2.0);
        let conj_in = self.spin_phase(psi, -1.0);
        let conj_out = self.spin_phase(psi, 1.0);
        for si in 0..conj_out.len() {
            for sj in 0..conj_in.len() {
                let ph = conj_out[si] * conj_in[sj];
                for i in 0..c {
                    for j in 0..c {
                        u[(si * c + i, sj * c + j)] *= ph;
                    }
                }
            }
        }
        u
    }
}

/// The exact per-pulse kick unitary (no small-θp approximation).
pub fn kick_operator(
    cfg: &KickConfig,
    pulse_index: u64,
    num_qubits: usize,
    fock: FockSpace,
) -> Result<nalgebra::DMatrix<Complex64>> {
    Ok(KickEngine::new(cfg, num_qubits, fock)?.kick_matrix(pulse_index))
}

/// Aggregate numbers recorded over a propagation.
#[derive(Debug, Clone, Copy, Default)]
pub struct PropagationStats {
    /// Largest top-two-Fock-level population seen after any step.
    pub max_leakage: f64,
    pub steps: u64,
}

/// Step-by-step propagator, for callers that sample observables along the
/// pulse train. States are stored in the frame of H0; populations are frame
/// independent.
pub struct Propagator {
    engine: KickEngine,
    free_phases: Vec<Complex64>,
    state: QuantumState,
    stats: PropagationStats,
}

impl Propagator {
    pub fn new(state: QuantumState, cfg: &KickConfig, frame: &FrameConfig) -> Result<Self> {
        frame.validate()?;
        let fock = state.fock();
        let num_qubits = state.num_qubits();
        let engine = KickEngine::new(cfg, num_qubits, fock)?;
        let c = fock.cutoff();
        let ns = 1usize << num_qubits;
        let mut free_phases = Vec::with_capacity(ns * c);
        for s in 0..ns {
            let spin_term = 0.5 * frame.omega_0_plus_dw * total_sz(s, num_qubits) as f64;
            for n in 0..c {
                let e = frame.omega_t * n as f64 + spin_term;
                free_phases.push(Complex64::new(0.0, -e * cfg.period).exp());
            }
        }
        Ok(Self { engine, free_phases, state, stats: PropagationStats::default() })
    }

    /// Apply one pulse: kick at t_n = nT, then free evolution for T.
    pub fn step(&mut self) {
        let amps = self.state.amplitudes_mut();
        self.engine.apply_kick(amps, self.stats.steps);
        for (a, ph) in amps.iter_mut().zip(self.free_phases.iter()) {
            *a *= ph;
        }
        self.stats.steps += 1;
        self.stats.max_leakage = self.stats.max_leakage.max(self.state.leakage());
    }

    pub fn run(&mut self, pulses: u64) {
        for _ in 0..pulses {
            self.step();
        }
    }

    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    pub fn stats(&self) -> PropagationStats {
        self.stats
    }

    /// Error out if the truncation leaked; otherwise hand back the state.
    pub fn finish(self) -> Result<(QuantumState, PropagationStats)> {
        if self.stats.max_leakage > LEAKAGE_LIMIT {
            return Err(SimError::CutoffTooSmall {
                leakage: self.stats.max_leakage,
                limit: LEAKAGE_LIMIT,
            });
        }
        Ok((self.state, self.stats))
    }
}

/// Apply N pulses to a state. Deterministic; errors with `CutoffTooSmall`
/// if the leakage monitor trips at any step.
pub fn propagate(
    state: QuantumState,
    cfg: &KickConfig,
    frame: &FrameConfig,
    pulses: u64,
) -> Result<(QuantumState, PropagationStats)> {
    let mut prop = Propagator::new(state, cfg, frame)?;
    prop.run(pulses);
    prop.finish()
}
