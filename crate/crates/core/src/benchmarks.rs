//! Reference transceivers used for comparison: spatial modulation (SM),
//! quadrature SM (QSM), media-based modulation (MBM), and double SM (DSM).
//!
//! All four follow the same conventions as the DMBM path: unit-average-energy
//! QAM symbols, MSB-first bit-to-index mapping with symbol bits ahead of
//! index bits, and exhaustive ML detection with ties broken by the lowest
//! codeword index. DSM rotates its second symbol by the same tabulated angle
//! as DMBM.

use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::constellation::{
    bits_to_index, build_qam, index_to_bits, optimum_angle, rotate, Constellation, RotationAngle,
};
use crate::dmbm::DEFAULT_ETA_CAP;
use crate::error::{Error, Result};

/// The modulation schemes covered by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    Dmbm,
    Sm,
    Qsm,
    Mbm,
    Dsm,
}

impl System {
    pub fn tag(self) -> &'static str {
        match self {
            System::Dmbm => "DMBM",
            System::Sm => "SM",
            System::Qsm => "QSM",
            System::Mbm => "MBM",
            System::Dsm => "DSM",
        }
    }
}

impl std::fmt::Display for System {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DMBM" => Ok(System::Dmbm),
            "SM" => Ok(System::Sm),
            "QSM" => Ok(System::Qsm),
            "MBM" => Ok(System::Mbm),
            "DSM" => Ok(System::Dsm),
            other => Err(Error::Config(format!("unknown system tag '{other}'"))),
        }
    }
}

/// Parameters of one benchmark transceiver.
#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    system: System,
    constellation: Constellation,
    n_t: usize,
    m_rf: usize,
    n_rx: usize,
    phi: RotationAngle,
}

fn check_power_of_two(name: &str, v: usize) -> Result<usize> {
    if v == 0 || !v.is_power_of_two() {
        return Err(Error::Config(format!("{name} must be a power of two, got {v}")));
    }
    Ok(v.trailing_zeros() as usize)
}

impl BenchmarkConfig {
    pub fn sm(m: usize, n_t: usize, n_rx: usize) -> Result<Self> {
        check_power_of_two("n_T", n_t)?;
        Self::build(System::Sm, m, n_t, 0, n_rx, RotationAngle::from_radians(0.0))
    }

    pub fn qsm(m: usize, n_t: usize, n_rx: usize) -> Result<Self> {
        check_power_of_two("n_T", n_t)?;
        Self::build(System::Qsm, m, n_t, 0, n_rx, RotationAngle::from_radians(0.0))
    }

    pub fn mbm(m: usize, m_rf: usize, n_rx: usize) -> Result<Self> {
        if m_rf == 0 {
            return Err(Error::Config("MBM needs at least one RF mirror".into()));
        }
        Self::build(System::Mbm, m, 0, m_rf, n_rx, RotationAngle::from_radians(0.0))
    }

    /// DSM with the same tabulated rotation angle as DMBM.
    pub fn dsm(m: usize, n_t: usize, n_rx: usize) -> Result<Self> {
        let phi = optimum_angle(m)?;
        Self::dsm_with_angle(m, n_t, n_rx, phi)
    }

    pub fn dsm_with_angle(m: usize, n_t: usize, n_rx: usize, phi: RotationAngle) -> Result<Self> {
        check_power_of_two("n_T", n_t)?;
        Self::build(System::Dsm, m, n_t, 0, n_rx, phi)
    }

    fn build(
        system: System,
        m: usize,
        n_t: usize,
        m_rf: usize,
        n_rx: usize,
        phi: RotationAngle,
    ) -> Result<Self> {
        if n_rx == 0 {
            return Err(Error::Config("need at least one receive antenna".into()));
        }
        Ok(Self {
            system,
            constellation: build_qam(m)?,
            n_t,
            m_rf,
            n_rx,
            phi,
        })
    }

    pub fn system(&self) -> System {
        self.system
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn m(&self) -> usize {
        self.constellation.order()
    }

    pub fn m_s(&self) -> usize {
        self.constellation.bits_per_symbol()
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn m_rf(&self) -> usize {
        self.m_rf
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn phi(&self) -> RotationAngle {
        self.phi
    }

    /// log2(n_T), the antenna-index bits of the spatial schemes.
    pub fn m_sm(&self) -> usize {
        self.n_t.trailing_zeros() as usize
    }

    /// Bits per channel use of the scheme.
    pub fn eta(&self) -> usize {
        let m_s = self.m_s();
        match self.system {
            System::Sm => m_s + self.m_sm(),
            System::Qsm => m_s + 2 * self.m_sm(),
            System::Mbm => m_s + self.m_rf,
            System::Dsm => 2 * (m_s + self.m_sm()),
            System::Dmbm => unreachable!("DMBM is not a benchmark config"),
        }
    }

    /// Number of channel columns the scheme selects from.
    pub fn channel_cols(&self) -> usize {
        match self.system {
            System::Mbm => 1 << self.m_rf,
            _ => self.n_t,
        }
    }

    /// Codeword for a source-bit value, as (position, value) terms.
    fn sparse(&self, index: u32) -> SparseCodeword {
        let m_s = self.m_s();
        let m_mask = (self.m() - 1) as u32;
        match self.system {
            System::Sm => {
                let m_sm = self.m_sm();
                let a = (index & ((1 << m_sm) - 1)) as usize;
                let s_label = ((index >> m_sm) & m_mask) as usize;
                SparseCodeword {
                    index,
                    terms: [
                        (a, self.constellation.point(s_label)),
                        (0, Complex64::default()),
                    ],
                }
            }
            System::Qsm => {
                let m_sm = self.m_sm();
                let mask = (1u32 << m_sm) - 1;
                let a_im = (index & mask) as usize;
                let a_re = ((index >> m_sm) & mask) as usize;
                let s_label = ((index >> (2 * m_sm)) & m_mask) as usize;
                let s = self.constellation.point(s_label);
                SparseCodeword {
                    index,
                    terms: [
                        (a_re, Complex64::new(s.re, 0.0)),
                        (a_im, Complex64::new(0.0, s.im)),
                    ],
                }
            }
            System::Mbm => {
                let k = (index & ((1 << self.m_rf) - 1)) as usize;
                let s_label = ((index >> self.m_rf) & m_mask) as usize;
                SparseCodeword {
                    index,
                    terms: [
                        (k, self.constellation.point(s_label)),
                        (0, Complex64::default()),
                    ],
                }
            }
            System::Dsm => {
                let m_sm = self.m_sm();
                let mask = (1u32 << m_sm) - 1;
                let a2 = (index & mask) as usize;
                let a1 = ((index >> m_sm) & mask) as usize;
                let s2_label = ((index >> (2 * m_sm)) & m_mask) as usize;
                let s1_label = ((index >> (2 * m_sm + m_s)) & m_mask) as usize;
                SparseCodeword {
                    index,
                    terms: [
                        (a1, self.constellation.point(s1_label)),
                        (a2, rotate(self.constellation.point(s2_label), self.phi)),
                    ],
                }
            }
            System::Dmbm => unreachable!(),
        }
    }
}

/// A benchmark codeword: at most two active channel columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseCodeword {
    pub index: u32,
    pub terms: [(usize, Complex64); 2],
}

impl SparseCodeword {
    pub fn dense(&self, n_cols: usize) -> Vec<Complex64> {
        let mut s = vec![Complex64::default(); n_cols];
        for &(pos, val) in &self.terms {
            s[pos] += val;
        }
        s
    }
}

/// Encodes a source-bit block into the scheme's dense transmission vector.
pub fn encode_bench(bits: &[u8], cfg: &BenchmarkConfig) -> Result<Vec<Complex64>> {
    if bits.len() != cfg.eta() {
        return Err(Error::Contract(format!(
            "expected {} bits, got {}",
            cfg.eta(),
            bits.len()
        )));
    }
    let cw = cfg.sparse(bits_to_index(bits) as u32);
    Ok(cw.dense(cfg.channel_cols()))
}

/// The full enumerated codebook of a benchmark scheme, in index order.
#[derive(Debug, Clone)]
pub struct BenchCodebook {
    eta: usize,
    n_cols: usize,
    entries: Vec<SparseCodeword>,
}

impl BenchCodebook {
    pub fn build(cfg: &BenchmarkConfig) -> Result<Self> {
        Self::build_capped(cfg, DEFAULT_ETA_CAP)
    }

    pub fn build_capped(cfg: &BenchmarkConfig, eta_cap: usize) -> Result<Self> {
        let eta = cfg.eta();
        if eta > eta_cap {
            return Err(Error::Resource(format!(
                "eta = {eta} exceeds the enumeration cap {eta_cap} (2^eta codewords)"
            )));
        }
        Ok(Self {
            eta,
            n_cols: cfg.channel_cols(),
            entries: (0..1u32 << eta).map(|i| cfg.sparse(i)).collect(),
        })
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn entries(&self) -> &[SparseCodeword] {
        &self.entries
    }
}

/// Exhaustive ML detection over a prebuilt benchmark codebook.
///
/// Returns (codeword index, metric); ties go to the lowest index.
pub fn detect_with_codebook(
    y: &[Complex64],
    h: &ChannelMatrix,
    book: &BenchCodebook,
) -> Result<(u32, f64)> {
    if y.len() != h.n_rx() || h.n_cols() != book.n_cols {
        return Err(Error::Contract(format!(
            "detector expects y of length {} and {} channel columns, got y {} and {}x{}",
            h.n_rx(),
            book.n_cols,
            y.len(),
            h.n_rx(),
            h.n_cols()
        )));
    }
    let mut best = (0u32, f64::INFINITY);
    for cw in &book.entries {
        let (p1, v1) = cw.terms[0];
        let (p2, v2) = cw.terms[1];
        let c1 = h.column(p1);
        let c2 = h.column(p2);
        let mut d = 0.0;
        for i in 0..y.len() {
            d += (y[i] - c1[i] * v1 - c2[i] * v2).norm_sqr();
        }
        if d < best.1 {
            best = (cw.index, d);
        }
    }
    Ok(best)
}

/// One-shot ML detection returning the decoded source bits.
pub fn ml_detect_bench(
    y: &[Complex64],
    h: &ChannelMatrix,
    cfg: &BenchmarkConfig,
) -> Result<Vec<u8>> {
    let book = BenchCodebook::build(cfg)?;
    let (index, _) = detect_with_codebook(y, h, &book)?;
    Ok(index_to_bits(index as usize, cfg.eta()))
}
