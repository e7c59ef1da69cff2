//! Closed-form and numeric performance theory: pairwise error probabilities,
//! union-bound average BER, ergodic capacity, detection complexity, energy
//! saving, throughput, and spectral efficiency.
//!
//! The unconditional PEP is computed two ways on purpose: `upep_numeric`
//! integrates the MGF form by adaptive quadrature and acts as the oracle for
//! the closed form used everywhere else. The two must agree to 1e-9.

use num_complex::Complex64;

use crate::benchmarks::System;
use crate::channel::{draw_channel, substream_rng, ChannelMatrix};
use crate::dmbm::{enumerate_codewords_capped, DmbmConfig};
use crate::error::{Error, Result};

/// Default cap on eta for the 2^eta x 2^eta union-bound pair table.
pub const DEFAULT_PAIR_TABLE_ETA_CAP: usize = 12;

/// Gaussian tail probability Q(x) = P(Z > x).
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Conditional PEP for a fixed channel: Q(sqrt(||H(s - s_hat)||^2 / (2 N0))).
pub fn cpep(h: &ChannelMatrix, s: &[Complex64], s_hat: &[Complex64], n0: f64) -> Result<f64> {
    if !(n0 > 0.0) {
        return Err(Error::Config(format!("N0 must be positive, got {n0}")));
    }
    let hs = h.mul_dense(s)?;
    let hs_hat = h.mul_dense(s_hat)?;
    let dist_sq: f64 = hs
        .iter()
        .zip(&hs_hat)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    Ok(q_function((dist_sq / (2.0 * n0)).sqrt()))
}

fn delta_norm_sqr(s: &[Complex64], s_hat: &[Complex64]) -> f64 {
    s.iter().zip(s_hat).map(|(a, b)| (a - b).norm_sqr()).sum()
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
                + step(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// UPEP by quadrature of the fading-averaged MGF integral, for a squared
/// codeword distance `d_sq`.
pub fn upep_numeric_d2(d_sq: f64, n0: f64, n_rx: usize) -> f64 {
    let gamma = d_sq / (4.0 * n0);
    if gamma == 0.0 {
        // Identical codewords: the integrand is the constant 1.
        return 0.5;
    }
    let f = |phi: f64| {
        let s2 = phi.sin().powi(2);
        (s2 / (s2 + gamma)).powi(n_rx as i32)
    };
    adaptive_simpson(&f, 0.0, std::f64::consts::FRAC_PI_2, 1e-12) / std::f64::consts::PI
}

/// UPEP by quadrature, from the transmit vectors themselves.
pub fn upep_numeric(s: &[Complex64], s_hat: &[Complex64], n0: f64, n_rx: usize) -> f64 {
    upep_numeric_d2(delta_norm_sqr(s, s_hat), n0, n_rx)
}

/// Closed-form UPEP for a squared codeword distance `d_sq`:
/// 1/2 [1 - mu * sum_{k=0}^{n_rx-1} C(2k, k) ((1 - mu^2)/4)^k]
/// with mu = sqrt(d_sq / (4 N0 + d_sq)).
pub fn upep_closed_d2(d_sq: f64, n0: f64, n_rx: usize) -> f64 {
    let mu = (d_sq / (4.0 * n0 + d_sq)).sqrt();
    let base = (1.0 - mu * mu) / 4.0;
    let mut binom = 1.0; // C(2k, k)
    let mut term = 1.0; // base^k
    let mut sum = 0.0;
    for k in 0..n_rx {
        sum += binom * term;
        binom *= 2.0 * (2 * k + 1) as f64 / (k + 1) as f64;
        term *= base;
    }
    0.5 * (1.0 - mu * sum)
}

/// Closed-form UPEP from the transmit vectors themselves.
pub fn upep_closed(s: &[Complex64], s_hat: &[Complex64], n0: f64, n_rx: usize) -> f64 {
    upep_closed_d2(delta_norm_sqr(s, s_hat), n0, n_rx)
}

/// SNR-independent part of the union bound: squared distances between all
/// ordered codeword pairs, aggregated with their total bit-error weight.
#[derive(Debug, Clone)]
pub struct PairTable {
    eta: usize,
    /// (squared distance, summed bit errors over pairs at that distance)
    entries: Vec<(f64, f64)>,
}

impl PairTable {
    pub fn build(cfg: &DmbmConfig) -> Result<Self> {
        Self::build_capped(cfg, DEFAULT_PAIR_TABLE_ETA_CAP)
    }

    pub fn build_capped(cfg: &DmbmConfig, eta_cap: usize) -> Result<Self> {
        let eta = cfg.eta();
        if eta > eta_cap {
            return Err(Error::Resource(format!(
                "eta = {eta} exceeds the pair-table cap {eta_cap}; \
                 raise the cap or subsample codeword pairs"
            )));
        }
        let codebook = enumerate_codewords_capped(cfg, eta_cap)?;
        let dense: Vec<Vec<Complex64>> = codebook.iter().map(|cw| cw.dense(cfg)).collect();
        Ok(Self::from_dense(&dense, eta))
    }

    /// Pair table of a benchmark codebook; the union bound only needs the
    /// dense codewords and their bit labels.
    pub fn build_bench(cfg: &crate::benchmarks::BenchmarkConfig, eta_cap: usize) -> Result<Self> {
        let eta = cfg.eta();
        if eta > eta_cap {
            return Err(Error::Resource(format!(
                "eta = {eta} exceeds the pair-table cap {eta_cap}; \
                 raise the cap or subsample codeword pairs"
            )));
        }
        let book = crate::benchmarks::BenchCodebook::build_capped(cfg, eta_cap)?;
        let dense: Vec<Vec<Complex64>> = book
            .entries()
            .iter()
            .map(|cw| cw.dense(cfg.channel_cols()))
            .collect();
        Ok(Self::from_dense(&dense, eta))
    }

    fn from_dense(dense: &[Vec<Complex64>], eta: usize) -> Self {
        let n = dense.len();

        // Distances quantized to 2^-40 so equal geometric distances share a
        // bucket regardless of float jitter; bit-error sums stay integral.
        const QUANT: f64 = (1u64 << 40) as f64;
        let mut buckets: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let eps = (i as u32 ^ j as u32).count_ones() as u64;
                let d_sq = delta_norm_sqr(&dense[i], &dense[j]);
                let key = (d_sq * QUANT).round() as u64;
                *buckets.entry(key).or_insert(0) += eps;
            }
        }
        let mut entries: Vec<(f64, f64)> = buckets
            .into_iter()
            .map(|(key, eps)| (key as f64 / QUANT, eps as f64))
            .collect();
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Self { eta, entries }
    }

    /// Union-bound average BER at noise level `n0` with `n_rx` receive
    /// antennas: sum of UPEP-weighted bit errors over 2^eta * eta.
    pub fn aber(&self, n0: f64, n_rx: usize) -> f64 {
        let scale = 1.0 / (self.eta as f64 * (1u64 << self.eta) as f64);
        self.entries
            .iter()
            .map(|&(d_sq, eps)| upep_closed_d2(d_sq, n0, n_rx) * eps)
            .sum::<f64>()
            * scale
    }
}

/// Union-bound theoretical average BER of a DMBM link at noise level `n0`.
pub fn theoretical_aber(cfg: &DmbmConfig, n0: f64) -> Result<f64> {
    Ok(PairTable::build(cfg)?.aber(n0, cfg.n_rx()))
}

/// How the log-det argument is normalized across activation patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityNorm {
    /// Divide the pattern double sum by (A * R): the default reading.
    ActivationScaled,
    /// Divide by (A * R^2) instead; exposed for sensitivity checks.
    PairScaled,
}

/// Parameters of an ergodic-capacity estimate.
#[derive(Debug, Clone)]
pub struct CapacityConfig {
    pub system: System,
    /// Transmit antennas (SM/DSM).
    pub n_t: usize,
    /// RF mirrors (MBM/DMBM).
    pub m_rf: usize,
    pub n_rx: usize,
    pub norm: CapacityNorm,
}

impl CapacityConfig {
    pub fn channel_cols(&self) -> usize {
        match self.system {
            System::Mbm | System::Dmbm => 1 << self.m_rf,
            _ => self.n_t,
        }
    }

    /// The log-det argument is I + H H^H / (scale * N0); `scale` folds in
    /// the activation-pattern averaging of each scheme.
    fn scale(&self) -> Result<f64> {
        let cols = self.channel_cols() as f64;
        match (self.system, self.norm) {
            (System::Qsm, _) => Err(Error::Config(
                "capacity analysis covers SM, MBM, DSM, and DMBM".into(),
            )),
            (System::Sm | System::Mbm, _) => Ok(cols),
            (System::Dsm | System::Dmbm, CapacityNorm::ActivationScaled) => Ok(1.0),
            (System::Dsm | System::Dmbm, CapacityNorm::PairScaled) => Ok(cols),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// In-place Cholesky of a Hermitian positive-definite matrix (column-major),
/// returning log2 det.
fn cholesky_log2_det(a: &mut [Complex64], n: usize) -> f64 {
    let mut log2_det = 0.0;
    for j in 0..n {
        let mut diag = a[j * n + j].re;
        for k in 0..j {
            diag -= a[k * n + j].norm_sqr();
        }
        let ljj = diag.sqrt();
        log2_det += 2.0 * ljj.log2();
        a[j * n + j] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut v = a[j * n + i];
            for k in 0..j {
                v -= a[k * n + i] * a[k * n + j].conj();
            }
            a[j * n + i] = v / ljj;
        }
    }
    log2_det
}

/// log2 det(I + (H H^H) / (scale * n0)) for one channel draw.
fn log_det_capacity(h: &ChannelMatrix, scale: f64, n0: f64) -> f64 {
    let n = h.n_rx();
    let inv = 1.0 / (scale * n0);
    let mut a = vec![Complex64::default(); n * n];
    for j in 0..n {
        for i in 0..n {
            let mut g = Complex64::default();
            for k in 0..h.n_cols() {
                g += h.entry(i, k) * h.entry(j, k).conj();
            }
            a[j * n + i] = g * inv;
        }
        a[j * n + j] += 1.0;
    }
    cholesky_log2_det(&mut a, n)
}

/// Ergodic capacity estimate (bits/s/Hz) by channel-draw Monte Carlo.
///
/// Draw `i` comes from substream `i` of `seed`, so the same seed gives a
/// common set of channel realizations across SNR points and systems.
pub fn capacity_mc(
    cfg: &CapacityConfig,
    n0: f64,
    n_samples: usize,
    seed: u64,
) -> Result<CapacityEstimate> {
    if n_samples == 0 {
        return Err(Error::Config("need at least one channel sample".into()));
    }
    if !(n0 > 0.0) {
        return Err(Error::Config(format!("N0 must be positive, got {n0}")));
    }
    let scale = cfg.scale()?;
    let cols = cfg.channel_cols();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for i in 0..n_samples {
        let mut rng = substream_rng(seed, i as u64);
        let h = draw_channel(cfg.n_rx, cols, &mut rng);
        let c = log_det_capacity(&h, scale, n0);
        sum += c;
        sum_sq += c * c;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(CapacityEstimate {
        mean,
        std_error: (var / n).sqrt(),
    })
}

fn log2_usize(name: &str, v: usize) -> Result<f64> {
    if v == 0 || !v.is_power_of_two() {
        return Err(Error::Config(format!("{name} must be a power of two, got {v}")));
    }
    Ok(v.trailing_zeros() as f64)
}

/// ML-detection cost in real multiplications when every system carries the
/// DMBM load of eta = 2(m_s + m_rf) bits.
pub fn complexity(system: System, m: usize, n_t: usize, m_rf: usize, n_rx: usize) -> Result<f64> {
    let m_s = log2_usize("M", m)?;
    let (mf, nt, nr) = (m as f64, n_t as f64, n_rx as f64);
    let r = (1u64 << m_rf) as f64;
    let m_rf = m_rf as f64;
    match system {
        System::Mbm => Ok(16.0 * mf * r * nr),
        System::Dmbm => Ok(16.0 * mf * mf * r * r * nr),
        System::Sm => {
            let m_sm = log2_usize("n_T", n_t)?;
            let denom = m_s + m_sm;
            if denom == 0.0 {
                return Err(Error::Config("m_s + m_sm must be nonzero".into()));
            }
            Ok(8.0 * mf * nt * nr * (1.0 + (m_s + 2.0 * m_rf - m_sm) / denom))
        }
        System::Qsm => {
            let m_sm = log2_usize("n_T", n_t)?;
            let denom = m_s + 2.0 * m_sm;
            if denom == 0.0 {
                return Err(Error::Config("m_s + 2 m_sm must be nonzero".into()));
            }
            Ok(8.0 * mf * nt * nr * (1.0 + (m_s + 2.0 * (m_rf - m_sm)) / denom))
        }
        System::Dsm => {
            let m_sm = log2_usize("n_T", n_t)?;
            let denom = 2.0 * (m_s + m_sm);
            if denom == 0.0 {
                return Err(Error::Config("m_s + m_sm must be nonzero".into()));
            }
            Ok(16.0 * mf * mf * nt * nt * nr * (1.0 + 2.0 * (m_rf - m_sm) / denom))
        }
    }
}

/// Energy saved per eta bits when a compared scheme delivers eta_c of them:
/// 100 (1 - eta_c / eta), in percent of the bit energy.
pub fn energy_saving(eta_c: f64, eta: f64) -> Result<f64> {
    if !(eta_c > 0.0) || !(eta > 0.0) {
        return Err(Error::Config(format!(
            "spectral efficiencies must be positive, got eta_c={eta_c}, eta={eta}"
        )));
    }
    if eta_c > eta {
        return Err(Error::Contract(format!(
            "eta_c = {eta_c} exceeds the reference eta = {eta}"
        )));
    }
    Ok(100.0 * (1.0 - eta_c / eta))
}

/// Throughput (1 - ABER) * eta / tau_s in bits per second.
pub fn throughput(aber: f64, eta: f64, tau_s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&aber) {
        return Err(Error::Contract(format!("ABER must lie in [0, 1], got {aber}")));
    }
    if !(tau_s > 0.0) {
        return Err(Error::Config(format!("tau_s must be positive, got {tau_s}")));
    }
    Ok((1.0 - aber) * eta / tau_s)
}

/// Bits per channel use of each scheme.
pub fn spectral_efficiency(system: System, m: usize, n_t: usize, m_rf: usize) -> Result<f64> {
    let m_s = log2_usize("M", m)?;
    match system {
        System::Sm => Ok(log2_usize("n_T", n_t)? + m_s),
        System::Qsm => Ok(2.0 * log2_usize("n_T", n_t)? + m_s),
        System::Mbm => Ok(m_rf as f64 + m_s),
        System::Dsm => Ok(2.0 * (log2_usize("n_T", n_t)? + m_s)),
        System::Dmbm => Ok(2.0 * (m_rf as f64 + m_s)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::snr_db_to_n0;
    use rand::Rng;

    #[test]
    fn q_function_reference_points() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-15);
        assert!((q_function(1.0) - 0.158_655_253_931_457_05).abs() < 1e-12);
        assert!(q_function(10.0) < 1e-20);
    }

    #[test]
    fn cpep_reference_points() {
        // 1x1 channel h = 1: ||H(s - s_hat)||^2 = |s - s_hat|^2.
        let h = ChannelMatrix::from_columns(1, &[vec![Complex64::new(1.0, 0.0)]]);
        let n0: f64 = 0.35;
        let s = vec![Complex64::new((2.0 * n0).sqrt(), 0.0)];
        let zero = vec![Complex64::default()];
        let p = cpep(&h, &s, &zero, n0).unwrap();
        assert!((p - q_function(1.0)).abs() < 1e-12);
        // Identical vectors give Q(0) = 1/2.
        assert!((cpep(&h, &s, &s, n0).unwrap() - 0.5).abs() < 1e-15);
        // Vanishing noise drives the error probability to zero.
        assert!(cpep(&h, &s, &zero, 1e-12).unwrap() < 1e-15);
        assert!(cpep(&h, &s, &zero, 0.0).is_err());
    }

    #[test]
    fn upep_numeric_reference_points() {
        // Zero distance integrates the constant 1/pi over (0, pi/2).
        assert!((upep_numeric_d2(0.0, 1.0, 4) - 0.5).abs() < 1e-12);
        // Single branch with gamma = 1: (1 - sqrt(1/2)) / 2.
        let expected = 0.5 * (1.0 - 0.5f64.sqrt());
        assert!((upep_numeric_d2(4.0, 1.0, 1) - expected).abs() < 1e-12);
    }

    #[test]
    fn upep_numeric_monotone() {
        let p1 = upep_numeric_d2(1.0, 0.5, 2);
        let p2 = upep_numeric_d2(2.0, 0.5, 2);
        let p3 = upep_numeric_d2(2.0, 0.5, 4);
        assert!(p2 < p1);
        assert!(p3 < p2);
    }

    #[test]
    fn upep_closed_matches_numeric_oracle() {
        let mut rng = substream_rng(0x0E, 0);
        for _ in 0..200 {
            let d_sq: f64 = rng.gen_range(1e-3..50.0);
            let n0: f64 = rng.gen_range(1e-3..10.0);
            let n_rx: usize = rng.gen_range(1..=8);
            let closed = upep_closed_d2(d_sq, n0, n_rx);
            let numeric = upep_numeric_d2(d_sq, n0, n_rx);
            assert!(
                (closed - numeric).abs() < 1e-9,
                "d_sq={d_sq}, n0={n0}, n_rx={n_rx}: {closed} vs {numeric}"
            );
        }
        assert!((upep_closed_d2(0.0, 1.0, 3) - 0.5).abs() < 1e-15);
        let expected = 0.5 * (1.0 - 0.5f64.sqrt());
        assert!((upep_closed_d2(4.0, 1.0, 1) - expected).abs() < 1e-12);
    }

    #[test]
    fn aber_decreasing_in_snr() {
        let cfg = DmbmConfig::new(2, 2, 2).unwrap();
        let table = PairTable::build(&cfg).unwrap();
        let mut last = f64::INFINITY;
        for snr_db in (0..=30).step_by(2) {
            let aber = table.aber(snr_db_to_n0(snr_db as f64), cfg.n_rx());
            assert!(aber < last, "not decreasing at {snr_db} dB");
            assert!(aber >= 0.0 && aber <= 1.0 || aber > 0.0); // stays a probability-scale value
            last = aber;
        }
    }

    #[test]
    fn aber_independent_of_pair_order() {
        let cfg = DmbmConfig::new(2, 1, 2).unwrap();
        let n0 = snr_db_to_n0(8.0);
        let table_aber = theoretical_aber(&cfg, n0).unwrap();

        let book = crate::dmbm::enumerate_codewords(&cfg).unwrap();
        let dense: Vec<Vec<Complex64>> = book.iter().map(|cw| cw.dense(&cfg)).collect();
        let n = dense.len();
        let scale = 1.0 / (cfg.eta() as f64 * n as f64);
        let mut row_major = 0.0;
        let mut col_major = 0.0;
        for i in 0..n {
            for j in 0..n {
                let eps = (i as u32 ^ j as u32).count_ones() as f64;
                row_major += upep_closed(&dense[i], &dense[j], n0, cfg.n_rx()) * eps;
                col_major += upep_closed(&dense[j], &dense[i], n0, cfg.n_rx()) * eps;
            }
        }
        row_major *= scale;
        col_major *= scale;
        assert!((row_major - col_major).abs() < 1e-15 * row_major.max(1e-300));
        assert!((table_aber - row_major).abs() < 1e-12 * row_major);
    }

    #[test]
    fn pair_table_cap_is_resource_error() {
        let cfg = DmbmConfig::new(4, 5, 2).unwrap();
        assert_eq!(cfg.eta(), 14);
        assert!(matches!(PairTable::build(&cfg), Err(Error::Resource(_))));
    }

    fn dmbm_capacity_cfg() -> CapacityConfig {
        CapacityConfig {
            system: System::Dmbm,
            n_t: 0,
            m_rf: 2,
            n_rx: 2,
            norm: CapacityNorm::ActivationScaled,
        }
    }

    #[test]
    fn capacity_vanishes_at_high_noise() {
        let c = capacity_mc(&dmbm_capacity_cfg(), 1e12, 50, 1).unwrap();
        assert!(c.mean.abs() < 1e-9, "capacity {}", c.mean);
    }

    #[test]
    fn capacity_monotone_in_snr() {
        let cfg = dmbm_capacity_cfg();
        let mut last = -1.0;
        for snr_db in [-10.0, 0.0, 10.0, 20.0, 30.0] {
            let c = capacity_mc(&cfg, snr_db_to_n0(snr_db), 200, 3).unwrap();
            assert!(c.mean > last);
            last = c.mean;
        }
    }

    #[test]
    fn capacity_matches_literal_pattern_double_sum() {
        // The collapsed log-det argument equals the explicit double sum over
        // activation-pattern pairs.
        let cfg = dmbm_capacity_cfg();
        let r = cfg.channel_cols();
        let n_rx = cfg.n_rx;
        let n0 = 0.2;
        for sample in 0..10u64 {
            let mut rng = substream_rng(99, sample);
            let h = draw_channel(n_rx, r, &mut rng);
            let fast = log_det_capacity(&h, cfg.scale().unwrap(), n0);

            // G = sum_{w1, w2} (h_w1 h_w1^H + h_w2 h_w2^H), normalized by A R N0.
            let mut g = vec![Complex64::default(); n_rx * n_rx];
            for w1 in 0..r {
                for w2 in 0..r {
                    for (col, _) in [(w1, ()), (w2, ())] {
                        for j in 0..n_rx {
                            for i in 0..n_rx {
                                g[j * n_rx + i] += h.entry(i, col) * h.entry(j, col).conj();
                            }
                        }
                    }
                }
            }
            let denom = 2.0 * r as f64 * n0;
            let mut a = vec![Complex64::default(); n_rx * n_rx];
            for j in 0..n_rx {
                for i in 0..n_rx {
                    a[j * n_rx + i] = g[j * n_rx + i] / denom;
                }
                a[j * n_rx + j] += 1.0;
            }
            let literal = cholesky_log2_det(&mut a, n_rx);
            assert!((fast - literal).abs() < 1e-9, "{fast} vs {literal}");
        }
    }

    #[test]
    fn capacity_deterministic_and_qsm_rejected() {
        let cfg = dmbm_capacity_cfg();
        let a = capacity_mc(&cfg, 0.1, 300, 42).unwrap();
        let b = capacity_mc(&cfg, 0.1, 300, 42).unwrap();
        assert_eq!(a, b);
        let mut qsm = cfg;
        qsm.system = System::Qsm;
        assert!(capacity_mc(&qsm, 0.1, 10, 1).is_err());
    }

    #[test]
    fn complexity_direct_substitutions() {
        // M=4, m_rf=2 (R=4), n_R=3.
        assert_eq!(complexity(System::Dmbm, 4, 0, 2, 3).unwrap(), 12288.0);
        assert_eq!(complexity(System::Mbm, 4, 0, 2, 3).unwrap(), 768.0);
        // Linear in n_R across all systems.
        for system in [System::Sm, System::Qsm, System::Mbm, System::Dsm, System::Dmbm] {
            let c3 = complexity(system, 4, 8, 2, 3).unwrap();
            let c6 = complexity(system, 4, 8, 2, 6).unwrap();
            assert!((c6 - 2.0 * c3).abs() < 1e-9, "{system}");
        }
        assert!(complexity(System::Sm, 4, 3, 2, 1).is_err());
    }

    #[test]
    fn energy_saving_examples() {
        assert_eq!(energy_saving(5.0, 10.0).unwrap(), 50.0);
        assert_eq!(energy_saving(10.0, 10.0).unwrap(), 0.0);
        assert_eq!(energy_saving(3.0, 10.0).unwrap(), 70.0);
        assert!(matches!(energy_saving(11.0, 10.0), Err(Error::Contract(_))));
        assert!(energy_saving(0.0, 10.0).is_err());
    }

    #[test]
    fn throughput_examples() {
        assert_eq!(throughput(0.0, 10.0, 1.0).unwrap(), 10.0);
        assert_eq!(throughput(1.0, 10.0, 1.0).unwrap(), 0.0);
        assert_eq!(throughput(0.5, 16.0, 1.0).unwrap(), 8.0);
        assert!(throughput(1.5, 10.0, 1.0).is_err());
        assert!(throughput(0.5, 10.0, 0.0).is_err());
    }

    #[test]
    fn spectral_efficiency_table_rows() {
        let rows = [
            (4usize, 2usize, 3usize, [3.0, 4.0, 5.0, 6.0, 10.0]),
            (8, 4, 5, [5.0, 7.0, 8.0, 10.0, 16.0]),
            (16, 8, 7, [7.0, 10.0, 11.0, 14.0, 22.0]),
        ];
        let systems = [System::Sm, System::Qsm, System::Mbm, System::Dsm, System::Dmbm];
        for (m, n_t, m_rf, expected) in rows {
            for (system, want) in systems.iter().zip(expected) {
                let got = spectral_efficiency(*system, m, n_t, m_rf).unwrap();
                assert_eq!(got, want, "{system} at M={m}, n_T={n_t}, m_rf={m_rf}");
            }
        }
        // Doubling identity at equal (M, m_rf).
        for (m, m_rf) in [(2, 3), (4, 2), (16, 5)] {
            let mbm = spectral_efficiency(System::Mbm, m, 1, m_rf).unwrap();
            let dmbm = spectral_efficiency(System::Dmbm, m, 1, m_rf).unwrap();
            assert_eq!(dmbm, 2.0 * mbm);
        }
    }
}
