//! TOML experiment configuration: schema, semantic validation, presets.
//!
//! All frequencies are in Hz, times in seconds, angles in radians. Unknown
//! keys are rejected; semantic validation reports every violation at once.

use serde::Deserialize;

use crate::comb::{BeamGeometry, Envelope, IonSpec, PulseTrainSpec, TrapMode};
use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Rabi,
    Spectrum,
    Cool,
    Msgate,
    Parity,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Rabi => "rabi",
            Task::Spectrum => "spectrum",
            Task::Cool => "cool",
            Task::Msgate => "msgate",
            Task::Parity => "parity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IonSection {
    pub qubit_splitting: f64,
    pub detuning: f64,
    pub linewidth: f64,
    pub saturation_intensity: f64,
    pub modes: Vec<ModeSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub trap_frequency: f64,
    pub lamb_dicke: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSection {
    pub carrier_frequency: f64,
    pub rep_rate: f64,
    pub pulse_duration: f64,
    pub envelope: Envelope,
    #[serde(default = "default_pick")]
    pub pick_divisor: u32,
    #[serde(default)]
    pub pulse_count: u64,
    pub intensity_ratio: f64,
}

fn default_pick() -> u32 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamsSection {
    pub ao1_offset: f64,
    pub ao2_offset: f64,
    /// (offset Hz, amplitude fraction) tones added to beam 1.
    pub tones_on_beam1: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiSection {
    /// Scan from 0 to max_duration over `points` samples.
    pub max_duration: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub delta_omega_start: f64,
    pub delta_omega_stop: f64,
    pub points: usize,
    pub probe_duration: f64,
    pub theta_p: f64,
    /// Initial n̄ per ion mode, same order as [[ion.modes]].
    pub initial_nbar: Vec<f64>,
    /// Recompute every grid point with the exact propagator (single mode
    /// only); also switched on by the CLI --exact flag.
    #[serde(default)]
    pub exact: bool,
    /// Fock cutoff for the exact recomputation.
    #[serde(default = "default_spectrum_cutoff")]
    pub fock_cutoff: usize,
}

fn default_spectrum_cutoff() -> usize {
    30
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolSection {
    pub cycles: u32,
    pub pulses_per_cycle: u32,
    pub initial_nbar: f64,
    #[serde(default)]
    pub recoil_heating_per_cycle: f64,
    pub fock_cutoff: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    /// Per-tone carrier Rabi rate Ω/2π in Hz.
    pub rabi_frequency: f64,
    pub initial_nbar: f64,
    pub fock_cutoff: usize,
    /// Tone detuning δ/2π in Hz; omitted → closed loop at δ = 2ηΩ.
    #[serde(default)]
    pub detuning: Option<f64>,
    /// Evolve for this fraction of t_g (default 1).
    #[serde(default = "default_one")]
    pub time_fraction: f64,
}

fn default_one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParitySection {
    pub phi_points: usize,
    #[serde(default)]
    pub detection_epsilon: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: String,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    /// Reserved for stochastic extensions; recorded in the manifest.
    #[serde(default)]
    pub seed: u64,
    pub ion: IonSection,
    pub laser: LaserSection,
    #[serde(default)]
    pub beams: Option<BeamsSection>,
    #[serde(default)]
    pub rabi: Option<RabiSection>,
    #[serde(default)]
    pub spectrum: Option<SpectrumSection>,
    #[serde(default)]
    pub cool: Option<CoolSection>,
    #[serde(default)]
    pub msgate: Option<GateSection>,
    #[serde(default)]
    pub parity: Option<ParitySection>,
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn ion_spec(&self) -> IonSpec {
        IonSpec {
            qubit_splitting: self.ion.qubit_splitting,
            detuning: self.ion.detuning,
            linewidth: self.ion.linewidth,
            saturation_intensity: self.ion.saturation_intensity,
            modes: self
                .ion
                .modes
                .iter()
                .map(|m| TrapMode {
                    trap_frequency: m.trap_frequency,
                    lamb_dicke: m.lamb_dicke,
                })
                .collect(),
        }
    }

    pub fn laser_spec(&self) -> PulseTrainSpec {
        PulseTrainSpec {
            carrier_frequency: self.laser.carrier_frequency,
            rep_rate: self.laser.rep_rate,
            pulse_duration: self.laser.pulse_duration,
            envelope: self.laser.envelope,
            pick_divisor: self.laser.pick_divisor,
            pulse_count: self.laser.pulse_count,
            intensity_ratio: self.laser.intensity_ratio,
        }
    }

    pub fn beam_geometry(&self) -> Option<BeamGeometry> {
        self.beams.as_ref().map(|b| BeamGeometry {
            ao1_offset: b.ao1_offset,
            ao2_offset: b.ao2_offset,
            tones_on_beam1: b.tones_on_beam1.clone(),
        })
    }

    /// Semantic validation; collects every violation instead of stopping
    /// at the first.
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        fn check(errors: &mut Vec<String>, path: &str, r: Result<()>) {
            if let Err(e) = r {
                errors.push(format!("{path}: {e}"));
            }
        }
        check(&mut errors, "ion", self.ion_spec().validate());
        check(&mut errors, "laser", self.laser_spec().validate());
        if let Some(b) = self.beam_geometry() {
            check(&mut errors, "beams", b.validate());
        }

        let require = |errors: &mut Vec<String>, present: bool, name: &str| {
            if !present {
                errors.push(format!("{name}: section required for task = \"{name}\"", ));
            }
        };
        match self.task {
            Task::Rabi => require(&mut errors, self.rabi.is_some(), "rabi"),
            Task::Spectrum => require(&mut errors, self.spectrum.is_some(), "spectrum"),
            Task::Cool => require(&mut errors, self.cool.is_some(), "cool"),
            Task::Msgate => require(&mut errors, self.msgate.is_some(), "msgate"),
            Task::Parity => {
                require(&mut errors, self.msgate.is_some(), "msgate");
                require(&mut errors, self.parity.is_some(), "parity");
            }
        }

        if let Some(r) = &self.rabi {
            if !(r.max_duration > 0.0) {
                errors.push("rabi.max_duration: must be > 0".into());
            }
            if r.points < 2 {
                errors.push("rabi.points: must be >= 2".into());
            }
        }
        if let Some(s) = &self.spectrum {
            if !(s.delta_omega_start < s.delta_omega_stop) {
                errors.push("spectrum.delta_omega_start: must be < delta_omega_stop".into());
            }
            if s.points < 2 {
                errors.push("spectrum.points: must be >= 2".into());
            }
            if !(s.probe_duration > 0.0) {
                errors.push("spectrum.probe_duration: must be > 0".into());
            }
            if !(s.theta_p > 0.0) {
                errors.push("spectrum.theta_p: must be > 0".into());
            }
            if s.initial_nbar.len() != self.ion.modes.len() {
                errors.push(format!(
                    "spectrum.initial_nbar: {} entries for {} ion modes",
                    s.initial_nbar.len(),
                    self.ion.modes.len()
                ));
            }
            if s.initial_nbar.iter().any(|&n| n < 0.0) {
                errors.push("spectrum.initial_nbar: entries must be >= 0".into());
            }
            if s.exact && self.ion.modes.len() != 1 {
                errors.push("spectrum.exact: exact propagation supports one mode".into());
            }
        }
        if let Some(c) = &self.cool {
            let cfg = crate::spectroscopy::CoolingConfig {
                cycles: c.cycles,
                pulses_per_cycle: c.pulses_per_cycle,
                initial_nbar: c.initial_nbar,
                recoil_heating_per_cycle: c.recoil_heating_per_cycle,
                fock_cutoff: c.fock_cutoff,
            };
            check(&mut errors, "cool", cfg.validate());
        }
        if let Some(g) = &self.msgate {
            if self.ion.modes.is_empty() {
                errors.push("msgate: requires at least one ion mode".into());
            } else {
                check(&mut errors, "msgate", self.gate_config().validate());
            }
            if !(g.time_fraction > 0.0) {
                errors.push("msgate.time_fraction: must be > 0".into());
            }
        }
        if let Some(p) = &self.parity {
            if p.phi_points < 3 {
                errors.push("parity.phi_points: must be >= 3".into());
            }
            if !(0.0..0.5).contains(&p.detection_epsilon) {
                errors.push("parity.detection_epsilon: must be in [0, 0.5)".into());
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(SimError::Schema(errors))
        }
    }

    /// MS-gate configuration derived from the msgate section and the first
    /// ion mode. Panics if either is missing; gate tasks validate first.
    pub fn gate_config(&self) -> crate::msgate::GateConfig {
        let g = self.msgate.as_ref().expect("msgate section");
        let m = &self.ion.modes[0];
        crate::msgate::GateConfig {
            rabi_frequency: g.rabi_frequency,
            mode: TrapMode {
                trap_frequency: m.trap_frequency,
                lamb_dicke: m.lamb_dicke,
            },
            nbar: g.initial_nbar,
            period: self.laser.pick_divisor as f64 / self.laser.rep_rate,
            fock_cutoff: g.fock_cutoff,
            detuning_override: g.detuning,
        }
    }
}

/// Parse and validate a TOML configuration. Structural errors (syntax,
/// types, unknown keys) surface one at a time from the parser; semantic
/// errors are collected and reported together.
pub fn validate_config(raw: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        toml::from_str(raw).map_err(|e| SimError::Schema(vec![e.to_string()]))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Bundled preset names, in documented order.
pub const PRESET_NAMES: [&str; 5] = [
    "fig3_integer_q",
    "fig3_half_q",
    "fig4a_spectrum",
    "fig4b_cooling",
    "fig5_parity",
];

/// TOML text of a bundled preset, or None for an unknown name.
///
/// The two flopping presets lock the repetition rate so the resonance
/// parameter lands exactly on an integer (after picking every second
/// pulse) or a half integer, as the hardware lock does; the nominal
/// 80.78 MHz rounds to q residuals of order 10⁻².
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "fig3_integer_q" => Some(
            r#"# Carrier Rabi flopping with the comb locked on resonance:
# every second pulse is picked and the rep rate is tuned so the spin
# splitting is an exact multiple of the effective comb spacing.
task = "rabi"

[ion]
qubit_splitting = 12.6428e9
detuning = 9.0e12
linewidth = 19.6e6
saturation_intensity = 0.15

[[ion.modes]]
trap_frequency = 1.64e6
lamb_dicke = 0.1

[laser]
carrier_frequency = 802.0e12
rep_rate = 80.7846645367412141e6   # 2*12.6428 GHz / 313
pulse_duration = 1.0e-12
envelope = "sech"
pick_divisor = 2
intensity_ratio = 3333.0

[rabi]
max_duration = 40.0e-6
points = 161

[output]
path = "fig3_integer_q.csv"
format = "csv"
"#,
        ),
        "fig3_half_q" => Some(
            r#"# Carrier drive with the comb tuned to a half-integer resonance
# parameter: pulse-to-pulse contributions cancel pairwise and the qubit
# stays dark.
task = "rabi"

[ion]
qubit_splitting = 12.6428e9
detuning = 9.0e12
linewidth = 19.6e6
saturation_intensity = 0.15

[[ion.modes]]
trap_frequency = 1.64e6
lamb_dicke = 0.1

[laser]
carrier_frequency = 802.0e12
rep_rate = 80.7847284345047923e6   # 12.6428 GHz / 156.5
pulse_duration = 1.0e-12
envelope = "sech"
pick_divisor = 1
intensity_ratio = 3333.0

[rabi]
max_duration = 40.0e-6
points = 161

[output]
path = "fig3_half_q.csv"
format = "csv"
"#,
        ),
        "fig4a_spectrum" => Some(
            r#"# Resolved-sideband spectrum: carrier plus red/blue sidebands of two
# transverse modes. The second mode frequency is illustrative.
task = "spectrum"

[ion]
qubit_splitting = 12.6428e9
detuning = 9.0e12
linewidth = 19.6e6
saturation_intensity = 0.15

[[ion.modes]]
trap_frequency = 1.64e6
lamb_dicke = 0.1

[[ion.modes]]
trap_frequency = 1.78e6
lamb_dicke = 0.096

[laser]
carrier_frequency = 802.0e12
rep_rate = 80.78e6
pulse_duration = 1.0e-12
envelope = "sech"
pick_divisor = 1
intensity_ratio = 3333.0

[spectrum]
delta_omega_start = -2.2e6
delta_omega_stop = 2.2e6
points = 441
probe_duration = 80.0e-6
theta_p = 2.0e-4
initial_nbar = [0.5, 0.5]

[output]
path = "fig4a_spectrum.csv"
format = "csv"
"#,
        ),
        "fig4b_cooling" => Some(
            r#"# Sideband cooling from the Doppler limit to the motional ground
# state with the swept-reference rate model.
task = "cool"

[ion]
qubit_splitting = 12.6428e9
detuning = 9.0e12
linewidth = 19.6e6
saturation_intensity = 0.15

[[ion.modes]]
trap_frequency = 1.64e6
lamb_dicke = 0.1

[laser]
carrier_frequency = 802.0e12
rep_rate = 80.78e6
pulse_duration = 1.0e-12
envelope = "sech"
pick_divisor = 1
intensity_ratio = 3333.0

[cool]
cycles = 60
pulses_per_cycle = 12
initial_nbar = 10.0
fock_cutoff = 80

[output]
path = "fig4b_cooling.csv"
format = "csv"
"#,
        ),
        "fig5_parity" => Some(
            r#"# Two-ion entangling gate at the closed-loop detuning followed by a
# parity scan of the analysis phase.
task = "parity"

[ion]
qubit_splitting = 12.6428e9
detuning = 9.0e12
linewidth = 19.6e6
saturation_intensity = 0.15

[[ion.modes]]
trap_frequency = 1.64e6
lamb_dicke = 0.1

[laser]
carrier_frequency = 802.0e12
rep_rate = 80.78e6
pulse_duration = 1.0e-12
envelope = "sech"
pick_divisor = 1
intensity_ratio = 3333.0

[msgate]
rabi_frequency = 46.3e3
initial_nbar = 0.0
fock_cutoff = 20

[parity]
phi_points = 48

[output]
path = "fig5_parity.csv"
format = "csv"
"#,
        ),
        _ => None,
    }
}
