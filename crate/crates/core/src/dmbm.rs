//! Double media-based modulation: bit splitting, MAP-index selection,
//! transmission-vector assembly, and the exhaustive ML detector.
//!
//! A block of eta = 2(m_s + m_rf) source bits is split as b = [b1 b2]. The
//! 2 m_s bits of b1 pick two QAM symbols s1 and s2; the 2 m_rf bits of b2
//! pick two mirror activation patterns k1 and k2 out of R = 2^m_rf. The
//! transmit vector carries s1 at position k1 and the rotated s2 e^{j phi} at
//! position k2 (superposed when k1 = k2). Index bits map MSB-first, so
//! [0 0] selects the 1st MAP and [1 1] the 4th.

use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::constellation::{
    bits_to_index, build_qam, index_to_bits, optimum_angle, rotate, Constellation, RotationAngle,
};
use crate::error::{Error, Result};

/// Default cap on eta for exhaustive codebook enumeration (2^eta entries).
pub const DEFAULT_ETA_CAP: usize = 20;

/// Full parameter set of a DMBM link.
#[derive(Debug, Clone)]
pub struct DmbmConfig {
    constellation: Constellation,
    m_rf: usize,
    n_rx: usize,
    phi: RotationAngle,
}

impl DmbmConfig {
    /// Config with the tabulated optimum rotation angle for `m`.
    pub fn new(m: usize, m_rf: usize, n_rx: usize) -> Result<Self> {
        let phi = optimum_angle(m)?;
        Self::with_angle(m, m_rf, n_rx, phi)
    }

    /// Config with an explicit rotation angle (required for untabulated M).
    pub fn with_angle(m: usize, m_rf: usize, n_rx: usize, phi: RotationAngle) -> Result<Self> {
        if m < 2 {
            return Err(Error::Config(format!("DMBM needs M >= 2, got {m}")));
        }
        if m_rf == 0 {
            return Err(Error::Config("DMBM needs at least one RF mirror".into()));
        }
        if n_rx == 0 {
            return Err(Error::Config("need at least one receive antenna".into()));
        }
        Ok(Self {
            constellation: build_qam(m)?,
            m_rf,
            n_rx,
            phi,
        })
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn m(&self) -> usize {
        self.constellation.order()
    }

    /// m_s = log2(M).
    pub fn m_s(&self) -> usize {
        self.constellation.bits_per_symbol()
    }

    pub fn m_rf(&self) -> usize {
        self.m_rf
    }

    /// R = 2^m_rf mirror activation patterns.
    pub fn r(&self) -> usize {
        1 << self.m_rf
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn phi(&self) -> RotationAngle {
        self.phi
    }

    /// eta = 2(m_s + m_rf) bits per channel use.
    pub fn eta(&self) -> usize {
        2 * (self.m_s() + self.m_rf)
    }
}

/// One transmit decision: the two MAP indices (1-based), the two unrotated
/// symbols, and the source-bit value they encode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Codeword {
    pub index: u32,
    pub k1: usize,
    pub k2: usize,
    pub s1: Complex64,
    pub s2: Complex64,
}

impl Codeword {
    /// Decodes `index` (MSB-first value of the eta source bits).
    pub fn from_index(index: u32, cfg: &DmbmConfig) -> Self {
        let m_s = cfg.m_s();
        let m_rf = cfg.m_rf();
        let r_mask = (cfg.r() - 1) as u32;
        let m_mask = (cfg.m() - 1) as u32;
        let k2 = (index & r_mask) as usize + 1;
        let k1 = ((index >> m_rf) & r_mask) as usize + 1;
        let s2_label = ((index >> (2 * m_rf)) & m_mask) as usize;
        let s1_label = ((index >> (2 * m_rf + m_s)) & m_mask) as usize;
        Self {
            index,
            k1,
            k2,
            s1: cfg.constellation.point(s1_label),
            s2: cfg.constellation.point(s2_label),
        }
    }

    /// Source bits, MSB first: [s1 bits | s2 bits | k1 bits | k2 bits].
    pub fn bits(&self, cfg: &DmbmConfig) -> Vec<u8> {
        index_to_bits(self.index as usize, cfg.eta())
    }

    /// Length-R transmission vector with the rotation applied to s2.
    pub fn dense(&self, cfg: &DmbmConfig) -> Vec<Complex64> {
        let mut s = vec![Complex64::default(); cfg.r()];
        s[self.k1 - 1] += self.s1;
        s[self.k2 - 1] += rotate(self.s2, cfg.phi());
        s
    }
}

/// Splits an eta-bit block into (b1, b2) = (2 m_s symbol bits, 2 m_rf index bits).
pub fn split_bits(bits: &[u8], cfg: &DmbmConfig) -> Result<(Vec<u8>, Vec<u8>)> {
    if bits.len() != cfg.eta() {
        return Err(Error::Contract(format!(
            "expected {} bits, got {}",
            cfg.eta(),
            bits.len()
        )));
    }
    let split = 2 * cfg.m_s();
    Ok((bits[..split].to_vec(), bits[split..].to_vec()))
}

/// Encodes an eta-bit block into a codeword.
pub fn encode(bits: &[u8], cfg: &DmbmConfig) -> Result<Codeword> {
    if bits.len() != cfg.eta() {
        return Err(Error::Contract(format!(
            "expected {} bits, got {}",
            cfg.eta(),
            bits.len()
        )));
    }
    Ok(Codeword::from_index(bits_to_index(bits) as u32, cfg))
}

/// Enumerates all 2^eta codewords, list position = source-bit value.
pub fn enumerate_codewords(cfg: &DmbmConfig) -> Result<Vec<Codeword>> {
    enumerate_codewords_capped(cfg, DEFAULT_ETA_CAP)
}

pub fn enumerate_codewords_capped(cfg: &DmbmConfig, eta_cap: usize) -> Result<Vec<Codeword>> {
    if cfg.eta() > eta_cap {
        return Err(Error::Resource(format!(
            "eta = {} exceeds the enumeration cap {eta_cap} (2^eta codewords)",
            cfg.eta()
        )));
    }
    Ok((0..1u32 << cfg.eta())
        .map(|i| Codeword::from_index(i, cfg))
        .collect())
}

/// Outcome of the exhaustive ML search.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub k1: usize,
    pub k2: usize,
    pub s1: Complex64,
    pub s2: Complex64,
    pub index: u32,
    pub bits: Vec<u8>,
    pub metric: f64,
}

/// Exhaustive ML detector with per-channel-realization precomputation.
///
/// Reusable across trials: `new` captures the configuration, `detect` scans
/// all M^2 R^2 candidates in codeword-index order (ties fall to the lowest
/// index) at a cost of one n_rx-term residual per candidate.
#[derive(Debug, Clone)]
pub struct DmbmDetector {
    m: usize,
    r: usize,
    n_rx: usize,
    m_s: usize,
    m_rf: usize,
    points: Vec<Complex64>,
    rotated: Vec<Complex64>,
    first: Vec<Complex64>,
    second: Vec<Complex64>,
    z: Vec<Complex64>,
}

impl DmbmDetector {
    pub fn new(cfg: &DmbmConfig) -> Self {
        let points = cfg.constellation().points().to_vec();
        let rotated = points.iter().map(|&p| rotate(p, cfg.phi())).collect();
        let (m, r, n_rx) = (cfg.m(), cfg.r(), cfg.n_rx());
        Self {
            m,
            r,
            n_rx,
            m_s: cfg.m_s(),
            m_rf: cfg.m_rf(),
            points,
            rotated,
            first: vec![Complex64::default(); m * r * n_rx],
            second: vec![Complex64::default(); m * r * n_rx],
            z: vec![Complex64::default(); n_rx],
        }
    }

    /// Returns (codeword index, metric).
    pub fn detect(&mut self, y: &[Complex64], h: &ChannelMatrix) -> Result<(u32, f64)> {
        let (index, metric, _) = self.detect_impl::<false>(y, h)?;
        Ok((index, metric))
    }

    /// `detect` plus the number of scalar residual evaluations performed,
    /// which is exactly 2^eta * n_rx for the full scan.
    pub fn detect_counted(&mut self, y: &[Complex64], h: &ChannelMatrix) -> Result<(u32, f64, u64)> {
        self.detect_impl::<true>(y, h)
    }

    fn detect_impl<const COUNT: bool>(
        &mut self,
        y: &[Complex64],
        h: &ChannelMatrix,
    ) -> Result<(u32, f64, u64)> {
        if y.len() != self.n_rx || h.n_rx() != self.n_rx || h.n_cols() != self.r {
            return Err(Error::Contract(format!(
                "detector expects y of length {} and an {}x{} channel, got y {} and {}x{}",
                self.n_rx,
                self.n_rx,
                self.r,
                y.len(),
                h.n_rx(),
                h.n_cols()
            )));
        }
        let n_rx = self.n_rx;
        // Candidate components h_k * p for every (symbol, MAP) pair.
        for (s, &p) in self.points.iter().enumerate() {
            for k in 0..self.r {
                let col = h.column(k);
                let dst = (s * self.r + k) * n_rx;
                for i in 0..n_rx {
                    self.first[dst + i] = col[i] * p;
                }
            }
        }
        for (s, &p) in self.rotated.iter().enumerate() {
            for k in 0..self.r {
                let col = h.column(k);
                let dst = (s * self.r + k) * n_rx;
                for i in 0..n_rx {
                    self.second[dst + i] = col[i] * p;
                }
            }
        }

        let mut best_metric = f64::INFINITY;
        let mut best_index = 0u32;
        let mut ops = 0u64;
        // Loop nest order (s1, s2, k1, k2) matches ascending codeword index,
        // so the strict < keeps the lowest index on ties.
        for s1 in 0..self.m {
            for s2 in 0..self.m {
                for k1 in 0..self.r {
                    let a = &self.first[(s1 * self.r + k1) * n_rx..][..n_rx];
                    for (zi, (&yi, &ai)) in self.z.iter_mut().zip(y.iter().zip(a)) {
                        *zi = yi - ai;
                    }
                    for k2 in 0..self.r {
                        let b = &self.second[(s2 * self.r + k2) * n_rx..][..n_rx];
                        let mut d = 0.0;
                        for (zi, bi) in self.z.iter().zip(b) {
                            d += (zi - bi).norm_sqr();
                        }
                        if COUNT {
                            ops += n_rx as u64;
                        }
                        if d < best_metric {
                            best_metric = d;
                            best_index = ((((s1 << self.m_s | s2) << self.m_rf) | k1) as u32)
                                << self.m_rf
                                | k2 as u32;
                        }
                    }
                }
            }
        }
        Ok((best_index, best_metric, ops))
    }
}

/// One-shot exhaustive ML detection of a received vector.
pub fn ml_detect(y: &[Complex64], h: &ChannelMatrix, cfg: &DmbmConfig) -> Result<DetectionResult> {
    let mut det = DmbmDetector::new(cfg);
    let (index, metric) = det.detect(y, h)?;
    let cw = Codeword::from_index(index, cfg);
    Ok(DetectionResult {
        k1: cw.k1,
        k2: cw.k2,
        s1: cw.s1,
        s2: cw.s2,
        index,
        bits: cw.bits(cfg),
        metric,
    })
}
