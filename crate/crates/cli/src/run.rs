//! Experiment dispatch: build schemes from a resolved spec, run the
//! simulation or analysis, and persist the result file.

use std::path::{Path, PathBuf};

use dmbm_core::analysis::{self, PairTable};
use dmbm_core::benchmarks::System;
use dmbm_core::channel::snr_db_to_n0;
use dmbm_core::montecarlo::{run_angle_sweep, run_ber, Progress, Scheme};

use crate::error::{CliError, CliResult};
use crate::results::{
    AngleRow, BerRow, CapacityRow, ComplexityRow, Document, EfficiencyRow, Rows, TheoryRow,
};
use crate::spec::{AberSource, ExperimentKind, ExperimentSpec, Format, SystemSpec};

/// Command-line overrides applied on top of the spec file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DMBM_OUT_DIR";

/// Runs an experiment described by a resolved spec.
pub fn run_experiment(spec: &ExperimentSpec, progress: &dyn Progress) -> CliResult<Rows> {
    match spec.kind {
        ExperimentKind::Ber | ExperimentKind::Compare => run_ber_kind(spec, progress),
        ExperimentKind::Theory => run_theory(spec),
        ExperimentKind::AngleSweep => run_sweep(spec, progress),
        ExperimentKind::Capacity => run_capacity(spec),
        ExperimentKind::Complexity => run_complexity(spec),
        ExperimentKind::Efficiency => run_efficiency(spec, progress),
    }
}

fn snr_grid(spec: &ExperimentSpec) -> CliResult<Vec<f64>> {
    spec.snr_db
        .ok_or_else(|| CliError::Validation("missing snr_db grid".into()))?
        .expand()
}

fn run_ber_kind(spec: &ExperimentSpec, progress: &dyn Progress) -> CliResult<Rows> {
    let grid = snr_grid(spec)?;
    let rule = spec.stopping.into();
    let mut rows = Vec::new();
    for sys in &spec.systems {
        let scheme = sys.build_scheme()?;
        let curve = run_ber(&scheme, &grid, &rule, spec.seed, progress)?;
        for p in &curve.points {
            rows.push(BerRow {
                snr_db: p.snr_db,
                system: sys.label(),
                trials: p.trials,
                bit_errors: p.bit_errors,
                ber: p.ber,
                ci95: p.ci95,
            });
        }
    }
    Ok(Rows::Ber(rows))
}

fn pair_table_for(sys: &SystemSpec, eta_cap: usize) -> CliResult<(PairTable, usize)> {
    match sys.build_scheme()? {
        Scheme::Dmbm(cfg) => Ok((PairTable::build_capped(&cfg, eta_cap)?, cfg.n_rx())),
        Scheme::Bench(cfg) => Ok((PairTable::build_bench(&cfg, eta_cap)?, cfg.n_rx())),
    }
}

fn run_theory(spec: &ExperimentSpec) -> CliResult<Rows> {
    let grid = snr_grid(spec)?;
    let eta_cap = spec.eta_cap.unwrap_or(12);
    let mut rows = Vec::new();
    for sys in &spec.systems {
        let (table, n_rx) = pair_table_for(sys, eta_cap)?;
        for &snr_db in &grid {
            rows.push(TheoryRow {
                snr_db,
                system: sys.label(),
                aber: table.aber(snr_db_to_n0(snr_db), n_rx),
            });
        }
    }
    Ok(Rows::Theory(rows))
}

fn run_sweep(spec: &ExperimentSpec, progress: &dyn Progress) -> CliResult<Rows> {
    let snrs = snr_grid(spec)?;
    let angles = spec
        .angle_deg
        .ok_or_else(|| CliError::Validation("missing angle_deg grid".into()))?
        .expand()?;
    let sys = &spec.systems[0];
    let m_rf = sys
        .m_rf
        .ok_or_else(|| CliError::Validation("DMBM requires the 'm_rf' field".into()))?;
    let rule = spec.stopping.into();
    let mut rows = Vec::new();
    for &snr_db in &snrs {
        let sweep = run_angle_sweep(
            sys.m,
            m_rf,
            sys.n_r,
            snr_db,
            &angles,
            &rule,
            spec.seed,
            progress,
        )?;
        for ap in &sweep.points {
            rows.push(AngleRow {
                snr_db,
                angle_deg: ap.angle_deg,
                system: sys.label(),
                trials: ap.point.trials,
                bit_errors: ap.point.bit_errors,
                ber: ap.point.ber,
                ci95: ap.point.ci95,
            });
        }
    }
    Ok(Rows::AngleSweep(rows))
}

fn run_capacity(spec: &ExperimentSpec) -> CliResult<Rows> {
    let grid = snr_grid(spec)?;
    let samples = spec.channel_samples.unwrap_or(2000);
    let mut rows = Vec::new();
    for sys in &spec.systems {
        let cfg = spec.capacity_config(sys)?;
        for &snr_db in &grid {
            let est = analysis::capacity_mc(&cfg, snr_db_to_n0(snr_db), samples, spec.seed)?;
            rows.push(CapacityRow {
                snr_db,
                system: sys.label(),
                capacity_bits: est.mean,
                stderr: est.std_error,
            });
        }
    }
    Ok(Rows::Capacity(rows))
}

fn run_complexity(spec: &ExperimentSpec) -> CliResult<Rows> {
    let mut rows = Vec::new();
    for sys in &spec.systems {
        let (system, m, n_t, m_rf, n_r) = spec.complexity_params(sys)?;
        let rm = analysis::complexity(system, m, n_t, m_rf, n_r)?;
        // The shared load is the DMBM spectral efficiency of the tuple.
        let eta = analysis::spectral_efficiency(System::Dmbm, m, n_t, m_rf)?;
        rows.push(ComplexityRow {
            system: sys.label(),
            eta,
            real_multiplications: rm,
        });
    }
    Ok(Rows::Complexity(rows))
}

fn run_efficiency(spec: &ExperimentSpec, progress: &dyn Progress) -> CliResult<Rows> {
    let reference_eta = spec.reference_eta()?;
    if spec.snr_db.is_none() {
        // Energy-saving table only.
        let mut rows = Vec::new();
        for sys in &spec.systems {
            let eta_c = spec.spectral_efficiency_of(sys)?;
            rows.push(crate::results::EnergyRow {
                system: sys.label(),
                eta: eta_c,
                energy_saving_percent: analysis::energy_saving(eta_c, reference_eta)?,
            });
        }
        return Ok(Rows::EnergySaving(rows));
    }
    let grid = snr_grid(spec)?;
    let tau_s = spec.tau_s.unwrap_or(1.0);
    let source = spec.aber_source.unwrap_or(AberSource::Theory);
    let eta_cap = spec.eta_cap.unwrap_or(12);
    let mut rows = Vec::new();
    for sys in &spec.systems {
        let eta_c = spec.spectral_efficiency_of(sys)?;
        let saving = analysis::energy_saving(eta_c, reference_eta)?;
        let abers: Vec<f64> = match source {
            AberSource::Theory => {
                let (table, n_rx) = pair_table_for(sys, eta_cap)?;
                grid.iter()
                    .map(|&snr| table.aber(snr_db_to_n0(snr), n_rx))
                    .collect()
            }
            AberSource::Simulated => {
                let scheme = sys.build_scheme()?;
                let curve = run_ber(&scheme, &grid, &spec.stopping.into(), spec.seed, progress)?;
                curve.points.iter().map(|p| p.ber).collect()
            }
        };
        for (&snr_db, &aber) in grid.iter().zip(&abers) {
            // The union bound can exceed 1 at very low SNR; clamp so the
            // throughput formula keeps its [0, eta] range.
            let aber = aber.min(1.0);
            rows.push(EfficiencyRow {
                system: sys.label(),
                eta: eta_c,
                energy_saving_percent: saving,
                snr_db,
                aber,
                throughput: analysis::throughput(aber, eta_c, tau_s)?,
            });
        }
    }
    Ok(Rows::Efficiency(rows))
}

fn default_file_stem(spec_path: &Path) -> String {
    spec_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".to_string())
}

/// Where the result file goes: --out flag, then the spec's `out`, then
/// `$DMBM_OUT_DIR/<spec-stem>.<ext>`, then `./<spec-stem>.<ext>`.
pub fn resolve_out_path(spec_path: &Path, spec: &ExperimentSpec, ov: &Overrides) -> PathBuf {
    let format = spec.format.unwrap_or(Format::Csv);
    if let Some(out) = &ov.out {
        return out.clone();
    }
    if let Some(out) = &spec.out {
        return PathBuf::from(out);
    }
    let name = format!("{}.{}", default_file_stem(spec_path), format.extension());
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(name),
        None => PathBuf::from(name),
    }
}

/// Reads, resolves, runs, and persists one experiment spec file.
///
/// Returns the path of the result file written.
pub fn run_spec_file(
    spec_path: &Path,
    expected_kind: ExperimentKind,
    ov: &Overrides,
    progress: &dyn Progress,
) -> CliResult<PathBuf> {
    let spec = load_and_resolve(spec_path, expected_kind, ov)?;
    let rows = run_experiment(&spec, progress)?;
    let out_path = resolve_out_path(spec_path, &spec, ov);
    let contents = match spec.format.unwrap_or(Format::Csv) {
        Format::Csv => rows.to_csv(),
        Format::Json => Document::new(&spec, rows).to_json(),
    };
    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(&out_path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out_path.display())))?;
    Ok(out_path)
}

/// Parses a spec file and resolves it against the overrides, checking that
/// its kind matches the invoked subcommand.
pub fn load_and_resolve(
    spec_path: &Path,
    expected_kind: ExperimentKind,
    ov: &Overrides,
) -> CliResult<ExperimentSpec> {
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", spec_path.display())))?;
    let spec = ExperimentSpec::from_json(&text)?;
    if spec.kind != expected_kind {
        return Err(CliError::Validation(format!(
            "spec kind '{}' does not match the '{}' subcommand",
            spec.kind, expected_kind
        )));
    }
    spec.resolve(ov.seed, ov.format)
}

/// Parses and resolves a spec file of any kind (the `validate` subcommand).
pub fn validate_spec_file(spec_path: &Path, ov: &Overrides) -> CliResult<ExperimentSpec> {
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", spec_path.display())))?;
    ExperimentSpec::from_json(&text)?.resolve(ov.seed, ov.format)
}
