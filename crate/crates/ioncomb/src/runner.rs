//! Experiment orchestration: dispatch a validated config to the physics
//! modules and serialize results deterministically.
//!
//! Output files are accompanied by a `<path>.manifest.json` recording the
//! config hash, tool version, warnings and leakage maxima; a run that dies
//! on a truncated Fock basis still writes the manifest with the failure.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::comb::effective_rep_rate;
use crate::config::{ExperimentConfig, OutputFormat, Task};
use crate::error::{Result, SimError};
use crate::msgate::{
    fidelity_witness, gate_parameters, ms_evolve_numeric_stats, parity_scan,
};
use crate::spectroscopy::{
    carrier_rabi_scan_stats, flip_probability_exact, sideband_cool, sideband_spectrum,
    CoolingConfig, SpectrumScanConfig,
};

/// Options layered over the config file by the CLI.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Force the exact propagator in spectrum scans.
    pub exact: bool,
    pub out_override: Option<PathBuf>,
    pub format_override: Option<OutputFormat>,
}

/// Provenance record written next to every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_sha256: String,
    pub tool_version: String,
    /// Unix timestamp, seconds.
    pub timestamp: u64,
    pub task: String,
    pub seed: u64,
    /// Largest monitored top-of-Fock-basis population; 0 when the task
    /// involved no truncated propagation.
    pub max_leakage: f64,
    pub warnings: Vec<String>,
    pub wall_time_s: f64,
    /// Present when the run failed after validation.
    pub error: Option<String>,
}

/// In-memory result of a run, before any file IO.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub csv: String,
    pub json: String,
    pub manifest: RunManifest,
    pub out_path: PathBuf,
    pub format: OutputFormat,
}

fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    let step = (stop - start) / (points - 1) as f64;
    (0..points).map(|i| start + i as f64 * step).collect()
}

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

struct TaskOutput {
    csv: String,
    json: serde_json::Value,
    max_leakage: f64,
    warnings: Vec<String>,
}

fn run_rabi(cfg: &ExperimentConfig) -> Result<TaskOutput> {
    let section = cfg.rabi.as_ref().expect("validated");
    let durations = linspace(0.0, section.max_duration, section.points);
    let (rows, leakage) =
        carrier_rabi_scan_stats(&cfg.ion_spec(), &cfg.laser_spec(), &durations)?;
    let mut csv = String::from("time_s,p_up\n");
    for &(t, p) in &rows {
        csv.push_str(&format!("{},{}\n", fmt(t), fmt(p)));
    }
    let json = json!({
        "rows": rows.iter().map(|&(t, p)| json!({"time_s": t, "p_up": p})).collect::<Vec<_>>(),
    });
    Ok(TaskOutput { csv, json, max_leakage: leakage, warnings: Vec::new() })
}

fn run_spectrum(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<TaskOutput> {
    let section = cfg.spectrum.as_ref().expect("validated");
    let period = 1.0 / effective_rep_rate(&cfg.laser_spec());
    let scan = SpectrumScanConfig {
        delta_omega_grid: linspace(
            section.delta_omega_start,
            section.delta_omega_stop,
            section.points,
        ),
        probe_duration: section.probe_duration,
        period,
        modes: cfg.ion_spec().modes.clone(),
        initial_nbar: section.initial_nbar.clone(),
        theta_p: section.theta_p,
    };
    let mut result = sideband_spectrum(&scan)?;
    let exact = section.exact || opts.exact;
    if exact {
        if scan.modes.len() != 1 {
            return Err(SimError::Invalid(
                "exact spectrum evaluation supports a single mode".into(),
            ));
        }
        use rayon::prelude::*;
        let exact_probs: Result<Vec<f64>> = scan
            .delta_omega_grid
            .par_iter()
            .map(|&dw| flip_probability_exact(&scan, dw, section.fock_cutoff))
            .collect();
        for (row, p) in result.rows.iter_mut().zip(exact_probs?) {
            row.flip_probability = p;
        }
    }
    let mut csv = String::from("delta_omega_hz,p_flip,branch\n");
    for row in &result.rows {
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt(row.delta_omega),
            fmt(row.flip_probability),
            row.branch_labels.join(";")
        ));
    }
    let json = json!({
        "pulses": result.pulses,
        "theta_p": result.theta_p,
        "exact": exact,
        "rows": result.rows.iter().map(|r| json!({
            "delta_omega_hz": r.delta_omega,
            "p_flip": r.flip_probability,
            "branch": r.branch_labels,
        })).collect::<Vec<_>>(),
    });
    Ok(TaskOutput { csv, json, max_leakage: 0.0, warnings: result.warnings })
}

fn run_cool(cfg: &ExperimentConfig) -> Result<TaskOutput> {
    let section = cfg.cool.as_ref().expect("validated");
    let cooling = CoolingConfig {
        cycles: section.cycles,
        pulses_per_cycle: section.pulses_per_cycle,
        initial_nbar: section.initial_nbar,
        recoil_heating_per_cycle: section.recoil_heating_per_cycle,
        fock_cutoff: section.fock_cutoff,
    };
    let steps = sideband_cool(&cooling)?;
    let reached = steps.iter().find(|s| s.nbar <= 0.03).map(|s| s.cycle);
    let mut csv = String::from("cycle,nbar\n");
    for s in &steps {
        csv.push_str(&format!("{},{}\n", s.cycle, fmt(s.nbar)));
    }
    let mut warnings = Vec::new();
    if reached.is_none() {
        warnings.push(format!(
            "cooling did not reach nbar <= 0.03 within {} cycles (final {:.4})",
            section.cycles,
            steps.last().map(|s| s.nbar).unwrap_or(f64::NAN)
        ));
    }
    let json = json!({
        "cycles_to_ground": reached,
        "rows": steps.iter().map(|s| json!({"cycle": s.cycle, "nbar": s.nbar})).collect::<Vec<_>>(),
    });
    Ok(TaskOutput { csv, json, max_leakage: 0.0, warnings })
}

fn run_msgate(cfg: &ExperimentConfig) -> Result<TaskOutput> {
    let section = cfg.msgate.as_ref().expect("validated");
    let gate = cfg.gate_config();
    let params = gate_parameters(&gate)?;
    let t = params.gate_time * section.time_fraction;
    let (rho, leakage) = ms_evolve_numeric_stats(&gate, t)?;
    let mut csv = String::from("row,col,re,im\n");
    for i in 0..4 {
        for j in 0..4 {
            let e = rho.element(i, j);
            csv.push_str(&format!("{},{},{},{}\n", i, j, fmt(e.re), fmt(e.im)));
        }
    }
    let json = json!({
        "detuning_hz": params.detuning,
        "gate_time_s": params.gate_time,
        "pulses": params.pulses,
        "evolved_time_s": t,
        "purity": rho.purity(),
        "elements": (0..4).map(|i| (0..4).map(|j| {
            let e = rho.element(i, j);
            json!([e.re, e.im])
        }).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    Ok(TaskOutput { csv, json, max_leakage: leakage, warnings: Vec::new() })
}

fn run_parity(cfg: &ExperimentConfig) -> Result<TaskOutput> {
    let gate_section = cfg.msgate.as_ref().expect("validated");
    let parity_section = cfg.parity.as_ref().expect("validated");
    let gate = cfg.gate_config();
    let params = gate_parameters(&gate)?;
    let t = params.gate_time * gate_section.time_fraction;
    let (rho, leakage) = ms_evolve_numeric_stats(&gate, t)?;
    let phis: Vec<f64> = (0..parity_section.phi_points)
        .map(|i| i as f64 * TAU / parity_section.phi_points as f64)
        .collect();
    let (points, fit) = parity_scan(&rho, &phis)?;
    let witness = fidelity_witness(&rho, &phis, parity_section.detection_epsilon)?;
    let mut csv = String::from("phi_rad,parity\n");
    for &(phi, p) in &points {
        csv.push_str(&format!("{},{}\n", fmt(phi), fmt(p)));
    }
    let json = json!({
        "detuning_hz": params.detuning,
        "gate_time_s": params.gate_time,
        "fit": {
            "amplitude": fit.amplitude,
            "phase": fit.phase,
            "offset": fit.offset,
        },
        "witness": {
            "even_population": witness.even_population,
            "parity_amplitude": witness.parity_amplitude,
            "fidelity": witness.fidelity,
            "fidelity_conservative": witness.fidelity_conservative,
            "entangled": witness.entangled,
        },
        "rows": points.iter().map(|&(phi, p)| json!({"phi_rad": phi, "parity": p})).collect::<Vec<_>>(),
    });
    Ok(TaskOutput { csv, json, max_leakage: leakage, warnings: Vec::new() })
}

/// Validate and execute a configuration, returning the serialized outputs
/// without touching the filesystem.
pub fn execute(raw: &str, opts: &RunOptions) -> Result<RunArtifacts> {
    let cfg = crate::config::validate_config(raw)?;
    let started = Instant::now();
    let hash = sha256_hex(raw);
    let outcome = match cfg.task {
        Task::Rabi => run_rabi(&cfg),
        Task::Spectrum => run_spectrum(&cfg, opts),
        Task::Cool => run_cool(&cfg),
        Task::Msgate => run_msgate(&cfg),
        Task::Parity => run_parity(&cfg),
    };
    let wall = started.elapsed().as_secs_f64();
    let out_path = opts
        .out_override
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output.path));
    let format = opts.format_override.unwrap_or(cfg.output.format);
    let manifest = |leakage: f64, warnings: Vec<String>, error: Option<String>| RunManifest {
        config_sha256: hash.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: unix_now(),
        task: cfg.task.as_str().to_string(),
        seed: cfg.seed,
        max_leakage: leakage,
        warnings,
        wall_time_s: wall,
        error,
    };
    match outcome {
        Ok(task_out) => {
            let json = serde_json::to_string_pretty(&json!({
                "task": cfg.task.as_str(),
                "result": task_out.json,
            }))
            .expect("serializable");
            Ok(RunArtifacts {
                csv: task_out.csv,
                json: json + "\n",
                manifest: manifest(task_out.max_leakage, task_out.warnings, None),
                out_path,
                format,
            })
        }
        Err(e) => {
            // still hand back a manifest so the caller can record the failure
            let m = manifest(0.0, Vec::new(), Some(e.to_string()));
            write_manifest(&out_path, &m)?;
            Err(e)
        }
    }
}

fn manifest_path(out_path: &Path) -> PathBuf {
    let mut name = out_path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out_path.with_file_name(name)
}

fn write_manifest(out_path: &Path, manifest: &RunManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest).expect("serializable") + "\n";
    std::fs::write(manifest_path(out_path), text)
        .map_err(|e| SimError::Invalid(format!("cannot write manifest: {e}")))
}

/// Execute a configuration and write the output file plus its manifest.
pub fn run_to_files(raw: &str, opts: &RunOptions) -> Result<PathBuf> {
    let artifacts = execute(raw, opts)?;
    let payload = match artifacts.format {
        OutputFormat::Csv => artifacts.csv.as_str(),
        OutputFormat::Json => artifacts.json.as_str(),
    };
    std::fs::write(&artifacts.out_path, payload)
        .map_err(|e| SimError::Invalid(format!("cannot write output: {e}")))?;
    write_manifest(&artifacts.out_path, &artifacts.manifest)?;
    Ok(artifacts.out_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;

    #[test]
    fn rabi_preset_flops_and_half_q_stays_dark() {
        let opts = RunOptions::default();
        let integer = execute(preset("fig3_integer_q").unwrap(), &opts).unwrap();
        let half = execute(preset("fig3_half_q").unwrap(), &opts).unwrap();
        let max_p = |csv: &str| {
            csv.lines()
                .skip(1)
                .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
                .fold(0.0_f64, f64::max)
        };
        assert!(max_p(&integer.csv) > 0.99);
        assert!(max_p(&half.csv) < 1e-3);
    }

    #[test]
    fn spectrum_preset_labels_carrier_and_sidebands() {
        let artifacts =
            execute(preset("fig4a_spectrum").unwrap(), &RunOptions::default()).unwrap();
        let body = &artifacts.csv;
        assert!(body.starts_with("delta_omega_hz,p_flip,branch\n"));
        for label in ["carrier", "red0", "blue0", "red1", "blue1"] {
            assert!(body.contains(label), "missing {label}");
        }
        assert!(artifacts.manifest.warnings.is_empty());
    }

    #[test]
    fn cooling_preset_reaches_ground_state() {
        let artifacts =
            execute(preset("fig4b_cooling").unwrap(), &RunOptions::default()).unwrap();
        let final_nbar: f64 = artifacts
            .csv
            .lines()
            .last()
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        assert!(final_nbar <= 0.03, "final nbar {final_nbar}");
        assert!(artifacts.json.contains("cycles_to_ground"));
    }

    #[test]
    fn parity_preset_reports_entanglement() {
        let artifacts =
            execute(preset("fig5_parity").unwrap(), &RunOptions::default()).unwrap();
        let json: serde_json::Value = serde_json::from_str(&artifacts.json).unwrap();
        let witness = &json["result"]["witness"];
        assert!(witness["entangled"].as_bool().unwrap());
        assert!(witness["fidelity"].as_f64().unwrap() > 0.99);
        assert!(artifacts.manifest.max_leakage < 1e-6);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let opts = RunOptions::default();
        let a = execute(preset("fig4b_cooling").unwrap(), &opts).unwrap();
        let b = execute(preset("fig4b_cooling").unwrap(), &opts).unwrap();
        assert_eq!(a.csv, b.csv);
        assert_eq!(a.json, b.json);
    }

    #[test]
    fn invalid_config_is_schema_error() {
        let bad = preset("fig3_integer_q").unwrap().replace("task = \"rabi\"", "task = \"dance\"");
        assert!(matches!(
            execute(&bad, &RunOptions::default()),
            Err(SimError::Schema(_))
        ));
    }

    #[test]
    fn exact_flag_matches_first_order_spectrum() {
        // narrow single-mode scan around the blue sideband
        let text = preset("fig4a_spectrum")
            .unwrap()
            .replace(
                "[[ion.modes]]\ntrap_frequency = 1.78e6\nlamb_dicke = 0.096\n\n",
                "",
            )
            .replace("initial_nbar = [0.5, 0.5]", "initial_nbar = [0.2]")
            .replace("delta_omega_start = -2.2e6", "delta_omega_start = 1.60e6")
            .replace("delta_omega_stop = 2.2e6", "delta_omega_stop = 1.68e6")
            .replace("points = 441", "points = 5")
            .replace("probe_duration = 80.0e-6", "probe_duration = 40.0e-6");
        let first = execute(&text, &RunOptions::default()).unwrap();
        let exact = execute(
            &text,
            &RunOptions { exact: true, ..Default::default() },
        )
        .unwrap();
        let col = |csv: &str| {
            csv.lines()
                .skip(1)
                .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
                .collect::<Vec<f64>>()
        };
        for (p1, p2) in col(&first.csv).iter().zip(col(&exact.csv)) {
            assert!((p1 - p2).abs() < 2e-2 * p1.max(1e-6), "{p1} vs {p2}");
        }
    }

    #[test]
    fn files_and_manifest_written() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("cool.csv");
        let opts = RunOptions {
            out_override: Some(out.clone()),
            ..Default::default()
        };
        let path = run_to_files(preset("fig4b_cooling").unwrap(), &opts).unwrap();
        assert_eq!(path, out);
        assert!(out.exists());
        let manifest_file = dir.path().join("cool.csv.manifest.json");
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(manifest_file).unwrap()).unwrap();
        assert_eq!(manifest["task"], "cool");
        assert!(manifest["error"].is_null());
        assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    }
}
