//! Python bindings for the DMBM toolkit.
//!
//! Exposes the constellation tools, the DMBM modem, the Monte Carlo engine,
//! and the analysis formulas as the `dmbm_py` extension module. Build with
//! `cargo build --release -p dmbm-python`; the smoke test under `python/`
//! shows how to load the resulting cdylib directly.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use dmbm_core::analysis;
use dmbm_core::benchmarks::System;
use dmbm_core::channel::{snr_db_to_n0, ChannelMatrix};
use dmbm_core::constellation::{build_qam, optimum_angle, RotationAngle};
use dmbm_core::dmbm::{encode, ml_detect, DmbmConfig};
use dmbm_core::error::Error;
use dmbm_core::montecarlo::{self, NoProgress, Scheme, StoppingRule};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Config(m) | Error::Contract(m) => PyValueError::new_err(m),
        Error::Resource(m) => PyRuntimeError::new_err(m),
    }
}

fn parse_system(tag: &str) -> PyResult<System> {
    tag.parse::<System>().map_err(to_py_err)
}

/// Channel matrix from a list of rows (n_r lists of complex entries).
fn channel_from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<ChannelMatrix> {
    let n_rx = rows.len();
    if n_rx == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(PyValueError::new_err(
            "H must be a nonempty rectangular list of rows",
        ));
    }
    let n_cols = rows[0].len();
    let cols: Vec<Vec<Complex64>> = (0..n_cols)
        .map(|k| (0..n_rx).map(|i| rows[i][k]).collect())
        .collect();
    Ok(ChannelMatrix::from_columns(n_rx, &cols))
}

fn build_scheme(
    system: &str,
    m: usize,
    n_t: Option<usize>,
    m_rf: Option<usize>,
    n_r: usize,
    phi_deg: Option<f64>,
) -> PyResult<Scheme> {
    use dmbm_core::benchmarks::BenchmarkConfig;
    let need = |v: Option<usize>, what: &str| {
        v.ok_or_else(|| PyValueError::new_err(format!("{system} requires {what}")))
    };
    let angle = |m: usize| -> PyResult<RotationAngle> {
        match phi_deg {
            Some(deg) => Ok(RotationAngle::from_degrees(deg)),
            None => optimum_angle(m).map_err(to_py_err),
        }
    };
    let scheme = match parse_system(system)? {
        System::Dmbm => Scheme::Dmbm(
            DmbmConfig::with_angle(m, need(m_rf, "m_rf")?, n_r, angle(m)?).map_err(to_py_err)?,
        ),
        System::Sm => {
            Scheme::Bench(BenchmarkConfig::sm(m, need(n_t, "n_t")?, n_r).map_err(to_py_err)?)
        }
        System::Qsm => {
            Scheme::Bench(BenchmarkConfig::qsm(m, need(n_t, "n_t")?, n_r).map_err(to_py_err)?)
        }
        System::Mbm => {
            Scheme::Bench(BenchmarkConfig::mbm(m, need(m_rf, "m_rf")?, n_r).map_err(to_py_err)?)
        }
        System::Dsm => Scheme::Bench(
            BenchmarkConfig::dsm_with_angle(m, need(n_t, "n_t")?, n_r, angle(m)?)
                .map_err(to_py_err)?,
        ),
    };
    Ok(scheme)
}

/// Gray-labeled unit-energy QAM alphabet.
#[pyclass(name = "Constellation")]
struct PyConstellation {
    inner: dmbm_core::constellation::Constellation,
}

#[pymethods]
impl PyConstellation {
    #[new]
    fn new(m: usize) -> PyResult<Self> {
        Ok(Self {
            inner: build_qam(m).map_err(to_py_err)?,
        })
    }

    /// Points ordered by their MSB-first label value.
    fn points(&self) -> Vec<Complex64> {
        self.inner.points().to_vec()
    }

    fn bits_per_symbol(&self) -> usize {
        self.inner.bits_per_symbol()
    }

    fn map_bits(&self, bits: Vec<u8>) -> PyResult<Complex64> {
        self.inner.map_bits(&bits).map_err(to_py_err)
    }

    fn demap(&self, symbol: Complex64) -> Vec<u8> {
        self.inner.demap(symbol)
    }

    fn average_energy(&self) -> f64 {
        self.inner.average_energy()
    }

    fn __repr__(&self) -> String {
        format!("Constellation(M={})", self.inner.order())
    }
}

/// One estimated BER point.
#[pyclass(name = "BerPoint")]
#[derive(Clone)]
struct PyBerPoint {
    #[pyo3(get)]
    snr_db: f64,
    #[pyo3(get)]
    trials: u64,
    #[pyo3(get)]
    bit_errors: u64,
    #[pyo3(get)]
    ber: f64,
    #[pyo3(get)]
    ci95: f64,
    #[pyo3(get)]
    completed: bool,
}

#[pymethods]
impl PyBerPoint {
    fn __repr__(&self) -> String {
        format!(
            "BerPoint(snr_db={}, trials={}, bit_errors={}, ber={:e})",
            self.snr_db, self.trials, self.bit_errors, self.ber
        )
    }
}

impl From<montecarlo::BerPoint> for PyBerPoint {
    fn from(p: montecarlo::BerPoint) -> Self {
        Self {
            snr_db: p.snr_db,
            trials: p.trials,
            bit_errors: p.bit_errors,
            ber: p.ber,
            ci95: p.ci95,
            completed: p.completed,
        }
    }
}

/// DMBM encoder and exhaustive ML detector.
#[pyclass(name = "DmbmModem")]
struct PyDmbmModem {
    cfg: DmbmConfig,
}

#[pymethods]
impl PyDmbmModem {
    #[new]
    #[pyo3(signature = (m, m_rf, n_r, phi_deg=None))]
    fn new(m: usize, m_rf: usize, n_r: usize, phi_deg: Option<f64>) -> PyResult<Self> {
        let cfg = match phi_deg {
            Some(deg) => DmbmConfig::with_angle(m, m_rf, n_r, RotationAngle::from_degrees(deg)),
            None => DmbmConfig::new(m, m_rf, n_r),
        }
        .map_err(to_py_err)?;
        Ok(Self { cfg })
    }

    #[getter]
    fn eta(&self) -> usize {
        self.cfg.eta()
    }

    #[getter]
    fn r(&self) -> usize {
        self.cfg.r()
    }

    #[getter]
    fn phi_deg(&self) -> f64 {
        self.cfg.phi().degrees()
    }

    /// Encode an eta-bit block: returns (k1, k2, s1, s2, dense).
    fn encode(
        &self,
        bits: Vec<u8>,
    ) -> PyResult<(usize, usize, Complex64, Complex64, Vec<Complex64>)> {
        let cw = encode(&bits, &self.cfg).map_err(to_py_err)?;
        Ok((cw.k1, cw.k2, cw.s1, cw.s2, cw.dense(&self.cfg)))
    }

    /// ML-detect a received vector against a channel given as rows.
    /// Returns (bits, k1, k2, metric).
    fn detect(
        &self,
        y: Vec<Complex64>,
        h_rows: Vec<Vec<Complex64>>,
    ) -> PyResult<(Vec<u8>, usize, usize, f64)> {
        let h = channel_from_rows(h_rows)?;
        let res = ml_detect(&y, &h, &self.cfg).map_err(to_py_err)?;
        Ok((res.bits, res.k1, res.k2, res.metric))
    }

    fn __repr__(&self) -> String {
        format!(
            "DmbmModem(M={}, m_rf={}, n_r={}, phi_deg={:.1})",
            self.cfg.m(),
            self.cfg.m_rf(),
            self.cfg.n_rx(),
            self.cfg.phi().degrees()
        )
    }
}

/// Tabulated BER-optimal rotation angle in degrees.
#[pyfunction]
fn optimum_angle_deg(m: usize) -> PyResult<f64> {
    Ok(optimum_angle(m).map_err(to_py_err)?.degrees())
}

/// Monte Carlo BER curve for any supported system.
#[pyfunction]
#[pyo3(signature = (system, m, n_r, snr_db, *, n_t=None, m_rf=None, phi_deg=None,
                    seed=1, min_bit_errors=200, max_trials=10_000_000))]
#[allow(clippy::too_many_arguments)]
fn run_ber(
    system: &str,
    m: usize,
    n_r: usize,
    snr_db: Vec<f64>,
    n_t: Option<usize>,
    m_rf: Option<usize>,
    phi_deg: Option<f64>,
    seed: u64,
    min_bit_errors: u64,
    max_trials: u64,
) -> PyResult<Vec<PyBerPoint>> {
    let scheme = build_scheme(system, m, n_t, m_rf, n_r, phi_deg)?;
    let rule = StoppingRule {
        min_bit_errors,
        max_trials,
        target_ber_floor: None,
    };
    let curve =
        montecarlo::run_ber(&scheme, &snr_db, &rule, seed, &NoProgress).map_err(to_py_err)?;
    Ok(curve.points.into_iter().map(PyBerPoint::from).collect())
}

/// BER versus rotation angle at a fixed SNR; returns (angle_deg, BerPoint) pairs.
#[pyfunction]
#[pyo3(signature = (m, m_rf, n_r, snr_db, angles_deg, *, seed=1, min_bit_errors=200,
                    max_trials=10_000_000))]
#[allow(clippy::too_many_arguments)]
fn run_angle_sweep(
    m: usize,
    m_rf: usize,
    n_r: usize,
    snr_db: f64,
    angles_deg: Vec<f64>,
    seed: u64,
    min_bit_errors: u64,
    max_trials: u64,
) -> PyResult<Vec<(f64, PyBerPoint)>> {
    let rule = StoppingRule {
        min_bit_errors,
        max_trials,
        target_ber_floor: None,
    };
    let sweep =
        montecarlo::run_angle_sweep(m, m_rf, n_r, snr_db, &angles_deg, &rule, seed, &NoProgress)
            .map_err(to_py_err)?;
    Ok(sweep
        .points
        .into_iter()
        .map(|p| (p.angle_deg, PyBerPoint::from(p.point)))
        .collect())
}

/// Union-bound theoretical average BER of a DMBM link over an SNR grid.
#[pyfunction]
#[pyo3(signature = (m, m_rf, n_r, snr_db, *, phi_deg=None, eta_cap=12))]
fn theoretical_aber(
    m: usize,
    m_rf: usize,
    n_r: usize,
    snr_db: Vec<f64>,
    phi_deg: Option<f64>,
    eta_cap: usize,
) -> PyResult<Vec<f64>> {
    let cfg = match phi_deg {
        Some(deg) => DmbmConfig::with_angle(m, m_rf, n_r, RotationAngle::from_degrees(deg)),
        None => DmbmConfig::new(m, m_rf, n_r),
    }
    .map_err(to_py_err)?;
    let table = analysis::PairTable::build_capped(&cfg, eta_cap).map_err(to_py_err)?;
    Ok(snr_db
        .iter()
        .map(|&snr| table.aber(snr_db_to_n0(snr), n_r))
        .collect())
}

/// Closed-form unconditional pairwise error probability.
#[pyfunction]
fn upep_closed(d_sq: f64, n0: f64, n_rx: usize) -> f64 {
    analysis::upep_closed_d2(d_sq, n0, n_rx)
}

/// Quadrature oracle for the unconditional pairwise error probability.
#[pyfunction]
fn upep_numeric(d_sq: f64, n0: f64, n_rx: usize) -> f64 {
    analysis::upep_numeric_d2(d_sq, n0, n_rx)
}

/// Ergodic capacity estimates (mean, std_error) over an SNR grid.
#[pyfunction]
#[pyo3(signature = (system, n_r, snr_db, *, n_t=0, m_rf=0, channel_samples=2000, seed=1))]
fn capacity(
    system: &str,
    n_r: usize,
    snr_db: Vec<f64>,
    n_t: usize,
    m_rf: usize,
    channel_samples: usize,
    seed: u64,
) -> PyResult<Vec<(f64, f64)>> {
    let cfg = analysis::CapacityConfig {
        system: parse_system(system)?,
        n_t,
        m_rf,
        n_rx: n_r,
        norm: analysis::CapacityNorm::ActivationScaled,
    };
    snr_db
        .iter()
        .map(|&snr| {
            analysis::capacity_mc(&cfg, snr_db_to_n0(snr), channel_samples, seed)
                .map(|est| (est.mean, est.std_error))
                .map_err(to_py_err)
        })
        .collect()
}

/// ML-detection cost in real multiplications (shared-load formulas).
#[pyfunction]
#[pyo3(signature = (system, m, n_r, *, n_t=1, m_rf=0))]
fn complexity(system: &str, m: usize, n_r: usize, n_t: usize, m_rf: usize) -> PyResult<f64> {
    analysis::complexity(parse_system(system)?, m, n_t, m_rf, n_r).map_err(to_py_err)
}

/// Bits per channel use of a scheme.
#[pyfunction]
#[pyo3(signature = (system, m, *, n_t=1, m_rf=0))]
fn spectral_efficiency(system: &str, m: usize, n_t: usize, m_rf: usize) -> PyResult<f64> {
    analysis::spectral_efficiency(parse_system(system)?, m, n_t, m_rf).map_err(to_py_err)
}

/// Energy saved per block against a reference spectral efficiency, percent.
#[pyfunction]
fn energy_saving(eta_c: f64, eta: f64) -> PyResult<f64> {
    analysis::energy_saving(eta_c, eta).map_err(to_py_err)
}

/// Throughput (1 - ABER) * eta / tau_s.
#[pyfunction]
#[pyo3(signature = (aber, eta, *, tau_s=1.0))]
fn throughput(aber: f64, eta: f64, tau_s: f64) -> PyResult<f64> {
    analysis::throughput(aber, eta, tau_s).map_err(to_py_err)
}

/// SNR(dB) to noise spectral density with Es = 1.
#[pyfunction]
fn snr_to_n0(snr_db: f64) -> f64 {
    snr_db_to_n0(snr_db)
}

#[pymodule]
fn dmbm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyConstellation>()?;
    m.add_class::<PyDmbmModem>()?;
    m.add_class::<PyBerPoint>()?;
    m.add_function(wrap_pyfunction!(optimum_angle_deg, m)?)?;
    m.add_function(wrap_pyfunction!(run_ber, m)?)?;
    m.add_function(wrap_pyfunction!(run_angle_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_aber, m)?)?;
    m.add_function(wrap_pyfunction!(upep_closed, m)?)?;
    m.add_function(wrap_pyfunction!(upep_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(capacity, m)?)?;
    m.add_function(wrap_pyfunction!(complexity, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(energy_saving, m)?)?;
    m.add_function(wrap_pyfunction!(throughput, m)?)?;
    m.add_function(wrap_pyfunction!(snr_to_n0, m)?)?;
    Ok(())
}
