//! The pulse train as a frequency comb.
//!
//! A periodic train of short pulses has a comb spectrum with teeth spaced by
//! the (effective) repetition rate and an envelope set by the Fourier
//! transform of a single pulse. Pairs of teeth separated by the qubit
//! splitting drive stimulated Raman transitions; this module holds the
//! bookkeeping for that resonance (the q parameter), the tooth amplitudes and
//! the resulting Rabi rates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::units::angular;

/// Fractional tolerance used to classify q as integer / half-integer.
pub const DEFAULT_TOL_Q: f64 = 1e-3;

/// Single-pulse envelope shape. The experiment uses sech pulses; the
/// gaussian option exists for robustness checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Envelope {
    Sech,
    Gaussian,
}

/// The laser pulse train: carrier, repetition rate, pulse shape, pulse
/// picking and average intensity.
#[derive(Debug, Clone)]
pub struct PulseTrainSpec {
    /// Carrier optical frequency νc in Hz.
    pub carrier_frequency: f64,
    /// Repetition rate νR in Hz, before pulse picking.
    pub rep_rate: f64,
    /// Pulse duration τ in seconds.
    pub pulse_duration: f64,
    pub envelope: Envelope,
    /// Pulse picker divisor n: one of every n pulses is kept.
    pub pick_divisor: u32,
    /// Number of pulses in the train.
    pub pulse_count: u64,
    /// Average intensity scaled to saturation, s = Ī/Isat.
    pub intensity_ratio: f64,
}

impl PulseTrainSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rep_rate > 0.0) {
            return Err(SimError::Invalid("rep_rate must be > 0".into()));
        }
        if !(self.pulse_duration > 0.0) {
            return Err(SimError::Invalid("pulse_duration must be > 0".into()));
        }
        if self.pick_divisor < 1 {
            return Err(SimError::Invalid("pick_divisor must be >= 1".into()));
        }
        if !(self.intensity_ratio >= 0.0) {
            return Err(SimError::Invalid("intensity_ratio must be >= 0".into()));
        }
        if !(self.carrier_frequency > 0.0) {
            return Err(SimError::Invalid("carrier_frequency must be > 0".into()));
        }
        // The delta-kick model needs pulses much shorter than the period.
        let duty = self.pulse_duration * self.rep_rate / self.pick_divisor as f64;
        if !(duty < 0.1) {
            return Err(SimError::Invalid(format!(
                "pulse_duration * effective rep rate = {duty:.3}; must be < 0.1 \
                 for the delta-kick model"
            )));
        }
        Ok(())
    }

    /// Time between picked pulses, T = pick_divisor / rep_rate.
    pub fn period(&self) -> f64 {
        self.pick_divisor as f64 / self.rep_rate
    }
}

/// One motional mode of the trap as seen by the Raman beams.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrapMode {
    /// Trap frequency ωt/2π in Hz.
    pub trap_frequency: f64,
    /// Lamb-Dicke parameter η.
    pub lamb_dicke: f64,
}

/// Atomic parameters of the ion.
#[derive(Debug, Clone)]
pub struct IonSpec {
    /// Hyperfine qubit splitting ω0/2π in Hz.
    pub qubit_splitting: f64,
    /// Raman detuning Δ/2π from the excited state, in Hz.
    pub detuning: f64,
    /// Excited-state linewidth γ/2π in Hz.
    pub linewidth: f64,
    /// Saturation intensity in W/cm².
    pub saturation_intensity: f64,
    pub modes: Vec<TrapMode>,
}

impl IonSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("qubit_splitting", self.qubit_splitting),
            ("linewidth", self.linewidth),
            ("saturation_intensity", self.saturation_intensity),
        ] {
            if !(v > 0.0) {
                return Err(SimError::Invalid(format!("{name} must be > 0")));
            }
        }
        if self.detuning == 0.0 || !self.detuning.is_finite() {
            return Err(SimError::Invalid("detuning must be finite and nonzero".into()));
        }
        // Adiabatic elimination of the excited state.
        if self.detuning.abs() / self.linewidth <= 100.0 {
            return Err(SimError::Invalid(format!(
                "|detuning|/linewidth = {:.1}; must exceed 100",
                self.detuning.abs() / self.linewidth
            )));
        }
        for m in &self.modes {
            if !(m.trap_frequency > 0.0) {
                return Err(SimError::Invalid("trap_frequency must be > 0".into()));
            }
            if !(m.lamb_dicke > 0.0 && m.lamb_dicke < 1.0) {
                return Err(SimError::Invalid("lamb_dicke must be in (0, 1)".into()));
            }
        }
        Ok(())
    }
}

/// AO frequency shifters on the two Raman beams. The net comb offset
/// Δω/2π = ν1 − ν2 is always derived, never stored.
#[derive(Debug, Clone)]
pub struct BeamGeometry {
    /// AO1 drive frequency ν1 in Hz.
    pub ao1_offset: f64,
    /// AO2 drive frequency ν2 in Hz.
    pub ao2_offset: f64,
    /// Extra tones applied to beam 1 as (offset Hz, amplitude fraction).
    pub tones_on_beam1: Vec<(f64, f64)>,
}

impl BeamGeometry {
    pub fn validate(&self) -> Result<()> {
        if self.tones_on_beam1.is_empty() {
            return Err(SimError::Invalid("tones_on_beam1 must not be empty".into()));
        }
        let total: f64 = self.tones_on_beam1.iter().map(|(_, a)| a).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(SimError::Invalid(format!(
                "beam tone amplitude fractions sum to {total}; must sum to 1"
            )));
        }
        Ok(())
    }

    /// Net comb offset Δω/2π = ν1 − ν2 in Hz, per tone on beam 1.
    pub fn net_offsets(&self) -> Vec<(f64, f64)> {
        self.tones_on_beam1
            .iter()
            .map(|&(off, amp)| (self.ao1_offset + off - self.ao2_offset, amp))
            .collect()
    }
}

/// Classification of the q parameter against the comb resonance condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QClass {
    Integer,
    HalfInteger,
    OffResonant,
}

impl QClass {
    pub fn as_str(self) -> &'static str {
        match self {
            QClass::Integer => "integer",
            QClass::HalfInteger => "half_integer",
            QClass::OffResonant => "off_resonant",
        }
    }
}

/// Comb spacing after pulse picking, νR / n.
pub fn effective_rep_rate(spec: &PulseTrainSpec) -> f64 {
    spec.rep_rate / spec.pick_divisor as f64
}

/// The resonance parameter q = ω0 / 2πνR (with the effective rep rate) and
/// its classification at tolerance `tol_q`.
pub fn q_parameter_with_tol(ion: &IonSpec, spec: &PulseTrainSpec, tol_q: f64) -> (f64, QClass) {
    let q = ion.qubit_splitting / effective_rep_rate(spec);
    let class = if (q - q.round()).abs() < tol_q {
        QClass::Integer
    } else {
        let half = (q - 0.5).round() + 0.5;
        if (q - half).abs() < tol_q {
            QClass::HalfInteger
        } else {
            QClass::OffResonant
        }
    };
    (q, class)
}

/// [`q_parameter_with_tol`] at the default tolerance.
pub fn q_parameter(ion: &IonSpec, spec: &PulseTrainSpec) -> (f64, QClass) {
    q_parameter_with_tol(ion, spec, DEFAULT_TOL_Q)
}

/// Spectral envelope f̃(ω) of a single pulse (relative units, real).
fn envelope_spectrum(spec: &PulseTrainSpec, omega: f64) -> f64 {
    let tau = spec.pulse_duration;
    match spec.envelope {
        // f(t) = sech(πt/τ)  →  f̃(ω) = τ sech(ωτ/2)
        Envelope::Sech => tau / (0.5 * omega * tau).cosh(),
        // f(t) = exp(−t²/2τ²)  →  f̃(ω) = τ√(2π) exp(−ω²τ²/2)
        Envelope::Gaussian => {
            tau * (std::f64::consts::TAU).sqrt() * (-0.5 * (omega * tau).powi(2)).exp()
        }
    }
}

/// Amplitude of comb tooth k, E_k = νR f̃(2πk νR), in relative units.
/// Real for the even envelopes supported here.
pub fn comb_tooth_amplitude(spec: &PulseTrainSpec, tooth_index: i64) -> Complex64 {
    let nu = effective_rep_rate(spec);
    let omega = angular(tooth_index as f64 * nu);
    Complex64::new(nu * envelope_spectrum(spec, omega), 0.0)
}

/// Normalized tooth-sum overlap Σ_l E_l E_{l−q} / Σ_l E_l², evaluated over
/// teeth within ±5/τ of the carrier. `shift` displaces the summation window,
/// which must not change the result (carrier-envelope offset irrelevance).
pub fn tooth_overlap_sum(spec: &PulseTrainSpec, q: i64, shift: i64) -> f64 {
    let nu = effective_rep_rate(spec);
    let half_window = (5.0 / (spec.pulse_duration * nu)).ceil() as i64;
    let mut num = 0.0;
    let mut den = 0.0;
    for l in -half_window..=half_window {
        let e_l = comb_tooth_amplitude(spec, l + shift).re;
        let e_lq = comb_tooth_amplitude(spec, l + shift - q).re;
        num += e_l * e_lq;
        den += e_l * e_l;
    }
    num / den
}

/// The finite-bandwidth suppression factor of the Raman Rabi rate for sech
/// pulses, ω0τ / (e^{ω0τ/2} − e^{−ω0τ/2}).
pub fn suppression_factor(omega0_tau: f64) -> f64 {
    if omega0_tau == 0.0 {
        return 1.0;
    }
    omega0_tau / (2.0 * (0.5 * omega0_tau).sinh())
}

/// Resonant Raman Rabi rate of the comb, in both the closed sech form and
/// the discrete tooth-sum form.
#[derive(Debug, Clone, Copy)]
pub struct RabiRate {
    /// Resonant Rabi rate Ω in rad/s (closed form).
    pub omega: f64,
    /// Time-averaged rate Ω0 = s γ²/2Δ in rad/s.
    pub omega0: f64,
    /// Ω/Ω0, in (0, 1].
    pub suppression: f64,
    /// Discrete comb-tooth sum evaluation of Ω, rad/s, normalized so it is
    /// directly comparable to `omega`.
    pub omega_tooth_sum: f64,
}

/// Closed-form Rabi rate with no resonance gate. Valid as the per-pulse
/// drive strength regardless of whether the accumulated pulse-to-pulse phase
/// is resonant.
pub fn rabi_rate_closed_form(ion: &IonSpec, spec: &PulseTrainSpec) -> RabiRate {
    let gamma = angular(ion.linewidth);
    let delta = angular(ion.detuning);
    let omega0 = spec.intensity_ratio * gamma * gamma / (2.0 * delta);
    let omega0_tau = angular(ion.qubit_splitting) * spec.pulse_duration;
    let suppression = suppression_factor(omega0_tau);
    let q_round = (ion.qubit_splitting / effective_rep_rate(spec)).round() as i64;
    let tooth = tooth_overlap_sum(spec, q_round, 0);
    RabiRate {
        omega: omega0 * suppression,
        omega0,
        suppression,
        omega_tooth_sum: omega0 * tooth,
    }
}

/// Resonant Raman Rabi rate; errors unless q classifies as integer.
pub fn raman_rabi_frequency_with_tol(
    ion: &IonSpec,
    spec: &PulseTrainSpec,
    tol_q: f64,
) -> Result<RabiRate> {
    let (q, class) = q_parameter_with_tol(ion, spec, tol_q);
    if class != QClass::Integer {
        return Err(SimError::NotOnResonance { q, class: class.as_str() });
    }
    Ok(rabi_rate_closed_form(ion, spec))
}

pub fn raman_rabi_frequency(ion: &IonSpec, spec: &PulseTrainSpec) -> Result<RabiRate> {
    raman_rabi_frequency_with_tol(ion, spec, DEFAULT_TOL_Q)
}

/// Bloch-angle change per picked pulse, θp = Ω T.
pub fn pulse_area_with_tol(ion: &IonSpec, spec: &PulseTrainSpec, tol_q: f64) -> Result<f64> {
    let rate = raman_rabi_frequency_with_tol(ion, spec, tol_q)?;
    Ok(rate.omega * spec.period())
}

pub fn pulse_area(ion: &IonSpec, spec: &PulseTrainSpec) -> Result<f64> {
    pulse_area_with_tol(ion, spec, DEFAULT_TOL_Q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_laser(pick: u32) -> PulseTrainSpec {
        PulseTrainSpec {
            carrier_frequency: 802e12,
            rep_rate: 80.78e6,
            pulse_duration: 1e-12,
            envelope: Envelope::Sech,
            pick_divisor: pick,
            pulse_count: 1000,
            intensity_ratio: 3333.0,
        }
    }

    fn reference_ion() -> IonSpec {
        IonSpec {
            qubit_splitting: 12.6428e9,
            detuning: 9e12,
            linewidth: 19.6e6,
            saturation_intensity: 0.15,
            modes: vec![TrapMode { trap_frequency: 1.64e6, lamb_dicke: 0.1 }],
        }
    }

    #[test]
    fn effective_rep_rate_divides_by_pick() {
        assert!((effective_rep_rate(&reference_laser(1)) - 80.78e6).abs() < 1.0);
        assert!((effective_rep_rate(&reference_laser(2)) - 40.39e6).abs() < 1.0);
        assert!((effective_rep_rate(&reference_laser(3)) - 26.9267e6).abs() < 100.0);
    }

    #[test]
    fn q_parameter_reference_values() {
        // The published νR = 80.78 MHz is rounded, so the ratios land ~0.01
        // to ~0.03 away from the locked half-integer/integer values; a loose
        // tolerance recovers the experiment's classification.
        let ion = reference_ion();
        let (q1, c1) = q_parameter_with_tol(&ion, &reference_laser(1), 0.02);
        assert!((q1 - 156.51).abs() < 0.05, "q1 = {q1}");
        assert_eq!(c1, QClass::HalfInteger);
        let (q2, c2) = q_parameter_with_tol(&ion, &reference_laser(2), 0.02);
        assert!((q2 - 313.0).abs() < 0.05, "q2 = {q2}");
        assert_eq!(c2, QClass::Integer);
        let (q3, c3) = q_parameter_with_tol(&ion, &reference_laser(3), 0.03);
        assert!((q3 - 469.5).abs() < 0.05, "q3 = {q3}");
        assert_eq!(c3, QClass::HalfInteger);
    }

    #[test]
    fn q_parameter_equal_frequencies() {
        let mut ion = reference_ion();
        let mut laser = reference_laser(1);
        ion.qubit_splitting = 80.78e6;
        laser.rep_rate = 80.78e6;
        let (q, class) = q_parameter(&ion, &laser);
        assert_eq!(q, 1.0);
        assert_eq!(class, QClass::Integer);
    }

    #[test]
    fn q_parameter_scales_with_pick() {
        let ion = reference_ion();
        let (q1, _) = q_parameter(&ion, &reference_laser(1));
        let (q3, _) = q_parameter(&ion, &reference_laser(3));
        assert!((q3 - 3.0 * q1).abs() < 1e-9 * q3);
    }

    #[test]
    fn tooth_amplitude_even_and_peaked_at_zero() {
        let laser = reference_laser(1);
        let e0 = comb_tooth_amplitude(&laser, 0).re;
        for k in 1..2000_i64 {
            let ek = comb_tooth_amplitude(&laser, k).re;
            let emk = comb_tooth_amplitude(&laser, -k).re;
            assert!((ek - emk).abs() <= 1e-15 * e0.abs());
            assert!(ek <= e0);
        }
    }

    #[test]
    fn suppression_value_and_limits() {
        assert!((suppression_factor(0.08) - 0.99973).abs() < 1e-5);
        assert_eq!(suppression_factor(0.0), 1.0);
        // monotone decreasing, bounded in (0, 1]
        let mut prev = 1.0;
        for i in 1..200 {
            let s = suppression_factor(i as f64 * 0.05);
            assert!(s > 0.0 && s <= 1.0);
            assert!(s < prev);
            prev = s;
        }
    }

    #[test]
    fn closed_form_matches_tooth_sum() {
        // τ = 1 ps, νR = 80.78 MHz with n = 2 so that q is integer.
        let ion = reference_ion();
        let laser = reference_laser(2);
        let rate = raman_rabi_frequency_with_tol(&ion, &laser, 0.05).unwrap();
        let rel = (rate.omega - rate.omega_tooth_sum).abs() / rate.omega.abs();
        assert!(rel < 1e-3, "rel = {rel:.2e}");
    }

    #[test]
    fn tooth_sum_invariant_under_index_shift() {
        let laser = reference_laser(2);
        let s0 = tooth_overlap_sum(&laser, 313, 0);
        let s1 = tooth_overlap_sum(&laser, 313, 17);
        let s2 = tooth_overlap_sum(&laser, 313, -313);
        assert!((s0 - s1).abs() < 1e-9 * s0);
        assert!((s0 - s2).abs() < 1e-9 * s0);
    }

    #[test]
    fn not_on_resonance_error() {
        let ion = reference_ion();
        let laser = reference_laser(1); // half-integer q
        match raman_rabi_frequency_with_tol(&ion, &laser, 0.02) {
            Err(SimError::NotOnResonance { class, .. }) => assert_eq!(class, "half_integer"),
            other => panic!("expected NotOnResonance, got {other:?}"),
        }
    }

    #[test]
    fn pulse_area_zero_and_proportionality() {
        let ion = reference_ion();
        let mut laser = reference_laser(2);
        laser.intensity_ratio = 0.0;
        assert_eq!(pulse_area_with_tol(&ion, &laser, 0.05).unwrap(), 0.0);

        laser.intensity_ratio = 3333.0;
        let theta2 = pulse_area_with_tol(&ion, &laser, 0.05).unwrap();
        // Same Ω at half the effective rep rate doubles θp; compare through
        // the Ω-normalized area.
        let rate = raman_rabi_frequency_with_tol(&ion, &laser, 0.05).unwrap();
        assert!((theta2 - rate.omega * laser.period()).abs() < 1e-12 * theta2.abs());
    }

    #[test]
    fn pulse_area_ms_gate_numbers() {
        // Ω/2π = 46.3 kHz, T = 12.379 ns → θp ≈ 3.60e-3 rad.
        let theta = angular(46.3e3) * 12.379e-9;
        assert!((theta - 3.60e-3).abs() < 0.01e-3);
    }

    #[test]
    fn delta_kick_validity_enforced() {
        let mut laser = reference_laser(1);
        laser.pulse_duration = 0.5 / effective_rep_rate(&laser);
        assert!(laser.validate().is_err());
    }

    // --- sampled-train DFT oracle -------------------------------------------

    /// |DFT| of a sampled sech pulse train at angular frequency `omega`.
    fn sampled_train_dft(tau: f64, period: f64, n_pulses: usize, dt: f64, omega: f64) -> f64 {
        let total = period * n_pulses as f64;
        let samples = (total / dt).round() as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..samples {
            let t = i as f64 * dt;
            // pulse centers at (n + 1/2) T keep the tails inside the window
            let n = (t / period).floor();
            let tc = t - (n + 0.5) * period;
            let f = 1.0 / (std::f64::consts::PI * tc / tau).cosh();
            acc += f * Complex64::new(0.0, -omega * t).exp();
        }
        acc.norm() * dt
    }

    #[test]
    fn tooth_ratio_matches_sampled_train() {
        // Toy units: T = 1, τ = 0.02. Tooth k sits at ω = 2πk.
        let tau = 0.02;
        let period = 1.0;
        let n_pulses = 32;
        let dt = tau / 40.0;
        let k = 16_i64;

        let spec = PulseTrainSpec {
            carrier_frequency: 1.0,
            rep_rate: 1.0,
            pulse_duration: tau,
            envelope: Envelope::Sech,
            pick_divisor: 1,
            pulse_count: n_pulses as u64,
            intensity_ratio: 1.0,
        };
        let analytic = comb_tooth_amplitude(&spec, k).re / comb_tooth_amplitude(&spec, 0).re;
        let f0 = sampled_train_dft(tau, period, n_pulses, dt, 0.0);
        let fk = sampled_train_dft(tau, period, n_pulses, dt, angular(k as f64));
        let measured = fk / f0;
        let rel = (measured - analytic).abs() / analytic;
        assert!(rel < 1e-4, "analytic {analytic:.6}, measured {measured:.6}, rel {rel:.2e}");
    }

    #[test]
    fn tooth_width_scales_inverse_with_pulse_count() {
        // FWHM of the k = 0 tooth of the sampled train halves when the pulse
        // count doubles.
        let tau = 0.02;
        let period = 1.0;
        let dt = tau / 20.0;

        let fwhm = |n_pulses: usize| -> f64 {
            let peak = sampled_train_dft(tau, period, n_pulses, dt, 0.0);
            let half = peak / 2.0;
            // bracket the half-power point between 0 and the first null
            let mut lo = 0.0;
            let mut hi = angular(1.0 / n_pulses as f64);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if sampled_train_dft(tau, period, n_pulses, dt, mid) > half {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo + hi // symmetric line: full width = 2 × half-width
        };

        let w1 = fwhm(16);
        let w2 = fwhm(32);
        let ratio = w1 / w2;
        assert!((ratio - 2.0).abs() < 0.04, "FWHM ratio = {ratio}");
    }
}
