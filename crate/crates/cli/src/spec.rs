//! Experiment spec files: JSON schema, defaults, and validation.
//!
//! One experiment per file. `resolve` fills every default the run will use,
//! and the resolved spec is embedded verbatim in JSON results so a result
//! file always names the exact parameters that produced it.

use serde::{Deserialize, Serialize};

use dmbm_core::analysis::CapacityNorm;
use dmbm_core::benchmarks::{BenchmarkConfig, System};
use dmbm_core::constellation::RotationAngle;
use dmbm_core::dmbm::DmbmConfig;
use dmbm_core::montecarlo::{Scheme, StoppingRule};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Ber,
    Theory,
    AngleSweep,
    Capacity,
    Complexity,
    Efficiency,
    Compare,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ExperimentKind::Ber => "ber",
            ExperimentKind::Theory => "theory",
            ExperimentKind::AngleSweep => "angle-sweep",
            ExperimentKind::Capacity => "capacity",
            ExperimentKind::Complexity => "complexity",
            ExperimentKind::Efficiency => "efficiency",
            ExperimentKind::Compare => "compare",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AberSource {
    Theory,
    Simulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapacityNormSpec {
    Activation,
    Pair,
}

impl From<CapacityNormSpec> for CapacityNorm {
    fn from(n: CapacityNormSpec) -> Self {
        match n {
            CapacityNormSpec::Activation => CapacityNorm::ActivationScaled,
            CapacityNormSpec::Pair => CapacityNorm::PairScaled,
        }
    }
}

/// Inclusive arithmetic grid, e.g. SNR points in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn expand(&self) -> CliResult<Vec<f64>> {
        if !self.start.is_finite() || !self.stop.is_finite() || !self.step.is_finite() {
            return Err(CliError::Validation("grid bounds must be finite".into()));
        }
        if self.stop < self.start {
            return Err(CliError::Validation(format!(
                "grid stop {} below start {}",
                self.stop, self.start
            )));
        }
        if self.step <= 0.0 {
            return Err(CliError::Validation(format!(
                "grid step must be positive, got {}",
                self.step
            )));
        }
        let mut points = Vec::new();
        let mut i = 0u64;
        loop {
            let v = self.start + self.step * i as f64;
            if v > self.stop + 1e-9 {
                break;
            }
            points.push(v);
            i += 1;
            if i > 1_000_000 {
                return Err(CliError::Validation("grid has more than 1e6 points".into()));
            }
        }
        if points.is_empty() {
            return Err(CliError::Validation("grid is empty".into()));
        }
        Ok(points)
    }
}

fn default_seed() -> u64 {
    1
}

fn default_min_bit_errors() -> u64 {
    StoppingRule::default().min_bit_errors
}

fn default_max_trials() -> u64 {
    StoppingRule::default().max_trials
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoppingSpec {
    #[serde(default = "default_min_bit_errors")]
    pub min_bit_errors: u64,
    #[serde(default = "default_max_trials")]
    pub max_trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_ber_floor: Option<f64>,
}

impl Default for StoppingSpec {
    fn default() -> Self {
        Self {
            min_bit_errors: default_min_bit_errors(),
            max_trials: default_max_trials(),
            target_ber_floor: None,
        }
    }
}

impl From<StoppingSpec> for StoppingRule {
    fn from(s: StoppingSpec) -> Self {
        StoppingRule {
            min_bit_errors: s.min_bit_errors,
            max_trials: s.max_trials,
            target_ber_floor: s.target_ber_floor,
        }
    }
}

/// One scheme entry of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// DMBM, SM, QSM, MBM, or DSM.
    pub system: String,
    /// QAM order.
    pub m: usize,
    /// Transmit antennas (SM/QSM/DSM; also the complexity formulas).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_t: Option<usize>,
    /// RF mirrors (MBM/DMBM; also the complexity formulas).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_rf: Option<usize>,
    /// Receive antennas.
    pub n_r: usize,
    /// Rotation-angle override in degrees (DMBM/DSM with untabulated M).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_deg: Option<f64>,
    /// Row label in result files; defaults to the parameters spelled out.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl SystemSpec {
    pub fn system(&self) -> CliResult<System> {
        self.system
            .parse::<System>()
            .map_err(CliError::from)
    }

    fn angle(&self, m: usize) -> CliResult<RotationAngle> {
        match self.phi_deg {
            Some(deg) => Ok(RotationAngle::from_degrees(deg)),
            None => Ok(dmbm_core::constellation::optimum_angle(m)?),
        }
    }

    /// Builds the simulated transceiver this entry describes.
    pub fn build_scheme(&self) -> CliResult<Scheme> {
        let system = self.system()?;
        let need = |v: Option<usize>, what: &str| {
            v.ok_or_else(|| {
                CliError::Validation(format!("{} requires the '{what}' field", self.system))
            })
        };
        let scheme = match system {
            System::Dmbm => {
                let m_rf = need(self.m_rf, "m_rf")?;
                Scheme::Dmbm(DmbmConfig::with_angle(
                    self.m,
                    m_rf,
                    self.n_r,
                    self.angle(self.m)?,
                )?)
            }
            System::Sm => Scheme::Bench(BenchmarkConfig::sm(self.m, need(self.n_t, "n_t")?, self.n_r)?),
            System::Qsm => {
                Scheme::Bench(BenchmarkConfig::qsm(self.m, need(self.n_t, "n_t")?, self.n_r)?)
            }
            System::Mbm => {
                Scheme::Bench(BenchmarkConfig::mbm(self.m, need(self.m_rf, "m_rf")?, self.n_r)?)
            }
            System::Dsm => Scheme::Bench(BenchmarkConfig::dsm_with_angle(
                self.m,
                need(self.n_t, "n_t")?,
                self.n_r,
                self.angle(self.m)?,
            )?),
        };
        Ok(scheme)
    }

    pub fn default_label(&self) -> String {
        let mut label = format!("{} M={}", self.system.to_ascii_uppercase(), self.m);
        if let Some(n_t) = self.n_t {
            label.push_str(&format!(" n_T={n_t}"));
        }
        if let Some(m_rf) = self.m_rf {
            label.push_str(&format!(" m_rf={m_rf}"));
        }
        label.push_str(&format!(" n_R={}", self.n_r));
        label
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.default_label())
    }
}

/// A full experiment description, one per spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub systems: Vec<SystemSpec>,
    /// SNR grid in dB (all kinds except complexity).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<GridSpec>,
    /// Rotation-angle grid in degrees (angle-sweep only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_deg: Option<GridSpec>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub stopping: StoppingSpec,
    /// Channel draws for capacity Monte Carlo (default 2000).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_samples: Option<usize>,
    /// Symbol duration for throughput (default 1.0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_s: Option<f64>,
    /// ABER source inside the throughput formula (default theory).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aber_source: Option<AberSource>,
    /// Capacity normalization switch (default activation).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity_norm: Option<CapacityNormSpec>,
    /// Union-bound pair-table cap on eta (default 12).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_cap: Option<usize>,
    /// Output path; overridable from the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    /// Output format (default csv); overridable from the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Validation(format!("spec does not parse: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Fills every default the experiment will use and validates the result.
    pub fn resolve(
        &self,
        seed_override: Option<u64>,
        format_override: Option<Format>,
    ) -> CliResult<ExperimentSpec> {
        let mut spec = self.clone();
        if let Some(seed) = seed_override {
            spec.seed = seed;
        }
        if let Some(format) = format_override {
            spec.format = Some(format);
        }
        spec.format.get_or_insert(Format::Csv);
        for sys in &mut spec.systems {
            let label = sys.label();
            sys.label = Some(label);
        }
        match spec.kind {
            ExperimentKind::Capacity => {
                spec.channel_samples.get_or_insert(2000);
                spec.capacity_norm.get_or_insert(CapacityNormSpec::Activation);
            }
            ExperimentKind::Theory => {
                spec.eta_cap.get_or_insert(12);
            }
            ExperimentKind::Efficiency => {
                if spec.snr_db.is_some() {
                    spec.tau_s.get_or_insert(1.0);
                    spec.aber_source.get_or_insert(AberSource::Theory);
                    spec.eta_cap.get_or_insert(12);
                }
            }
            _ => {}
        }
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> CliResult<()> {
        if self.systems.is_empty() {
            return Err(CliError::Validation("no systems listed".into()));
        }
        for sys in &self.systems {
            let label = sys.label();
            if label.contains(',') || label.contains('\n') || label.contains('\r') {
                return Err(CliError::Validation(format!(
                    "label '{label}' contains a separator character"
                )));
            }
        }
        let snr = |what: &str| -> CliResult<Vec<f64>> {
            self.snr_db
                .ok_or_else(|| CliError::Validation(format!("{what} needs an snr_db grid")))?
                .expand()
        };
        match self.kind {
            ExperimentKind::Ber | ExperimentKind::Compare => {
                snr("a BER experiment")?;
                self.check_stopping()?;
                for sys in &self.systems {
                    sys.build_scheme()?;
                }
            }
            ExperimentKind::Theory => {
                snr("a theory experiment")?;
                for sys in &self.systems {
                    sys.build_scheme()?;
                }
            }
            ExperimentKind::AngleSweep => {
                snr("an angle sweep")?;
                self.check_stopping()?;
                let grid = self
                    .angle_deg
                    .ok_or_else(|| {
                        CliError::Validation("an angle sweep needs an angle_deg grid".into())
                    })?
                    .expand()?;
                if grid.iter().any(|a| !(0.0..360.0).contains(a)) {
                    return Err(CliError::Validation(
                        "angle grid must lie in [0, 360) degrees".into(),
                    ));
                }
                if self.systems.len() != 1 || self.systems[0].system()? != System::Dmbm {
                    return Err(CliError::Validation(
                        "an angle sweep takes exactly one DMBM system".into(),
                    ));
                }
                // The swept angle replaces any fixed one.
                let mut probe = self.systems[0].clone();
                probe.phi_deg = Some(0.0);
                probe.build_scheme()?;
            }
            ExperimentKind::Capacity => {
                snr("a capacity experiment")?;
                if self.channel_samples == Some(0) {
                    return Err(CliError::Validation("channel_samples must be positive".into()));
                }
                for sys in &self.systems {
                    let system = sys.system()?;
                    if system == System::Qsm {
                        return Err(CliError::Validation(
                            "capacity analysis covers SM, MBM, DSM, and DMBM".into(),
                        ));
                    }
                    self.capacity_config(sys)?;
                }
            }
            ExperimentKind::Complexity => {
                for sys in &self.systems {
                    self.complexity_params(sys)?;
                }
            }
            ExperimentKind::Efficiency => {
                // Without an SNR grid the experiment reports energy saving
                // only; with one it adds ABER-weighted throughput per point.
                if let Some(grid) = self.snr_db {
                    grid.expand()?;
                    for sys in &self.systems {
                        sys.build_scheme()?;
                    }
                }
                if let Some(tau) = self.tau_s {
                    if !(tau > 0.0) {
                        return Err(CliError::Validation(format!(
                            "tau_s must be positive, got {tau}"
                        )));
                    }
                }
                self.reference_eta()?;
                for sys in &self.systems {
                    self.spectral_efficiency_of(sys)?;
                }
            }
        }
        Ok(())
    }

    fn check_stopping(&self) -> CliResult<()> {
        let rule: StoppingRule = self.stopping.into();
        if rule.min_bit_errors == 0 || rule.max_trials == 0 {
            return Err(CliError::Validation(
                "stopping rule needs positive min_bit_errors and max_trials".into(),
            ));
        }
        Ok(())
    }

    /// Table-formula parameters (m, n_t, m_rf, n_r) of a system entry.
    pub fn complexity_params(&self, sys: &SystemSpec) -> CliResult<(System, usize, usize, usize, usize)> {
        let system = sys.system()?;
        let needs_nt = matches!(system, System::Sm | System::Qsm | System::Dsm);
        let n_t = if needs_nt {
            sys.n_t.ok_or_else(|| {
                CliError::Validation(format!("{} requires the 'n_t' field", sys.system))
            })?
        } else {
            sys.n_t.unwrap_or(1)
        };
        let m_rf = sys.m_rf.ok_or_else(|| {
            CliError::Validation(format!(
                "{} requires the 'm_rf' field (the shared load parameter)",
                sys.system
            ))
        })?;
        // Surface bad parameters (non-power-of-two M or n_T) now.
        dmbm_core::analysis::complexity(system, sys.m, n_t, m_rf, sys.n_r)?;
        Ok((system, sys.m, n_t, m_rf, sys.n_r))
    }

    pub fn spectral_efficiency_of(&self, sys: &SystemSpec) -> CliResult<f64> {
        let system = sys.system()?;
        let n_t = sys.n_t.unwrap_or(1);
        let m_rf = sys.m_rf.unwrap_or(0);
        Ok(dmbm_core::analysis::spectral_efficiency(
            system, sys.m, n_t, m_rf,
        )?)
    }

    /// DMBM spectral efficiency the energy saving is measured against.
    pub fn reference_eta(&self) -> CliResult<f64> {
        let dmbm = self
            .systems
            .iter()
            .find(|s| s.system().ok() == Some(System::Dmbm))
            .ok_or_else(|| {
                CliError::Validation(
                    "an efficiency experiment needs a DMBM entry as the reference".into(),
                )
            })?;
        self.spectral_efficiency_of(dmbm)
    }

    pub fn capacity_config(&self, sys: &SystemSpec) -> CliResult<dmbm_core::analysis::CapacityConfig> {
        let system = sys.system()?;
        let norm: CapacityNorm = self
            .capacity_norm
            .unwrap_or(CapacityNormSpec::Activation)
            .into();
        let cfg = dmbm_core::analysis::CapacityConfig {
            system,
            n_t: sys.n_t.unwrap_or(0),
            m_rf: sys.m_rf.unwrap_or(0),
            n_rx: sys.n_r,
            norm,
        };
        match system {
            System::Sm | System::Dsm if cfg.n_t == 0 => Err(CliError::Validation(format!(
                "{} requires the 'n_t' field",
                sys.system
            ))),
            System::Mbm | System::Dmbm if cfg.m_rf == 0 => Err(CliError::Validation(format!(
                "{} requires the 'm_rf' field",
                sys.system
            ))),
            _ => Ok(cfg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_compare() -> &'static str {
        r#"{
            "kind": "compare",
            "systems": [
                {"system": "DMBM", "m": 4, "m_rf": 3, "n_r": 4},
                {"system": "MBM", "m": 4, "m_rf": 8, "n_r": 4}
            ],
            "snr_db": {"start": 0, "stop": 10, "step": 5}
        }"#
    }

    #[test]
    fn parses_and_resolves_defaults() {
        let spec = ExperimentSpec::from_json(minimal_compare()).unwrap();
        let resolved = spec.resolve(None, None).unwrap();
        assert_eq!(resolved.seed, 1);
        assert_eq!(resolved.format, Some(Format::Csv));
        assert_eq!(resolved.stopping.min_bit_errors, 200);
        assert_eq!(
            resolved.systems[0].label.as_deref(),
            Some("DMBM M=4 m_rf=3 n_R=4")
        );
    }

    #[test]
    fn seed_override_wins() {
        let spec = ExperimentSpec::from_json(minimal_compare()).unwrap();
        let resolved = spec.resolve(Some(99), Some(Format::Json)).unwrap();
        assert_eq!(resolved.seed, 99);
        assert_eq!(resolved.format, Some(Format::Json));
    }

    #[test]
    fn empty_grid_is_validation_error() {
        let text = minimal_compare().replace(r#""step": 5"#, r#""step": -1"#);
        let spec = ExperimentSpec::from_json(&text).unwrap();
        assert!(matches!(
            spec.resolve(None, None),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn unknown_system_is_validation_error() {
        let text = minimal_compare().replace("\"MBM\"", "\"XYZ\"");
        let spec = ExperimentSpec::from_json(&text).unwrap();
        let err = spec.resolve(None, None).unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
        assert!(err.to_string().contains("XYZ"), "{err}");
    }

    #[test]
    fn invalid_m_is_validation_error() {
        let text = minimal_compare().replace(r#""m": 4, "m_rf": 3"#, r#""m": 5, "m_rf": 3"#);
        let spec = ExperimentSpec::from_json(&text).unwrap();
        assert!(matches!(
            spec.resolve(None, None),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn grid_expansion() {
        let grid = GridSpec {
            start: 0.0,
            stop: 20.0,
            step: 5.0,
        };
        assert_eq!(grid.expand().unwrap(), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        let single = GridSpec {
            start: 13.0,
            stop: 13.0,
            step: 1.0,
        };
        assert_eq!(single.expand().unwrap(), vec![13.0]);
    }

    #[test]
    fn angle_sweep_constraints() {
        let text = r#"{
            "kind": "angle-sweep",
            "systems": [{"system": "DMBM", "m": 4, "m_rf": 2, "n_r": 4}],
            "snr_db": {"start": 13, "stop": 13, "step": 1},
            "angle_deg": {"start": 0, "stop": 90, "step": 5}
        }"#;
        ExperimentSpec::from_json(text)
            .unwrap()
            .resolve(None, None)
            .unwrap();

        let two = text.replace(
            r#"[{"system": "DMBM", "m": 4, "m_rf": 2, "n_r": 4}]"#,
            r#"[{"system": "DMBM", "m": 4, "m_rf": 2, "n_r": 4}, {"system": "MBM", "m": 4, "m_rf": 2, "n_r": 4}]"#,
        );
        assert!(ExperimentSpec::from_json(&two)
            .unwrap()
            .resolve(None, None)
            .is_err());
    }

    #[test]
    fn capacity_rejects_qsm() {
        let text = r#"{
            "kind": "capacity",
            "systems": [{"system": "QSM", "m": 4, "n_t": 4, "n_r": 4}],
            "snr_db": {"start": 0, "stop": 10, "step": 5}
        }"#;
        assert!(ExperimentSpec::from_json(text)
            .unwrap()
            .resolve(None, None)
            .is_err());
    }

    #[test]
    fn efficiency_needs_dmbm_reference() {
        let text = r#"{
            "kind": "efficiency",
            "systems": [{"system": "SM", "m": 4, "n_t": 4, "n_r": 4}],
            "snr_db": {"start": 0, "stop": 10, "step": 5}
        }"#;
        let err = ExperimentSpec::from_json(text)
            .unwrap()
            .resolve(None, None)
            .unwrap_err();
        assert!(err.to_string().contains("DMBM"), "{err}");
    }

    #[test]
    fn resolved_spec_round_trips_through_json() {
        let spec = ExperimentSpec::from_json(minimal_compare()).unwrap();
        let resolved = spec.resolve(Some(7), None).unwrap();
        let text = resolved.to_json();
        let back = ExperimentSpec::from_json(&text).unwrap();
        assert_eq!(back, resolved);
        assert_eq!(back.to_json(), text);
    }
}
