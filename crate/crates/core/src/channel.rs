//! Rayleigh fading channel and AWGN generation, SNR bookkeeping, and the
//! received-signal model y = H s + w.
//!
//! Every random quantity is drawn from a counter-based substream of a master
//! seed (one ChaCha stream per trial index), so simulations are reproducible
//! bit for bit regardless of how trials are scheduled across workers.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Complex n_rx x n_cols matrix stored column-major; column k is the channel
/// realization seen when resource k (MAP or antenna) is active.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    n_rx: usize,
    n_cols: usize,
    data: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn zeros(n_rx: usize, n_cols: usize) -> Self {
        Self {
            n_rx,
            n_cols,
            data: vec![Complex64::default(); n_rx * n_cols],
        }
    }

    pub fn from_columns(n_rx: usize, cols: &[Vec<Complex64>]) -> Self {
        let mut m = Self::zeros(n_rx, cols.len());
        for (k, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), n_rx);
            m.data[k * n_rx..(k + 1) * n_rx].copy_from_slice(col);
        }
        m
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Column k, zero-based.
    pub fn column(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.n_rx..(k + 1) * self.n_rx]
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[col * self.n_rx + row]
    }

    /// Dense matrix-vector product H s.
    pub fn mul_dense(&self, s: &[Complex64]) -> Result<Vec<Complex64>> {
        if s.len() != self.n_cols {
            return Err(Error::Contract(format!(
                "vector length {} does not match {} channel columns",
                s.len(),
                self.n_cols
            )));
        }
        let mut y = vec![Complex64::default(); self.n_rx];
        for (k, &sk) in s.iter().enumerate() {
            if sk == Complex64::default() {
                continue;
            }
            let col = self.column(k);
            for (yi, &hk) in y.iter_mut().zip(col) {
                *yi += hk * sk;
            }
        }
        Ok(y)
    }
}

/// Noise level bookkeeping around SNR(dB) = 10 log10(Es/N0) with Es = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub n0: f64,
}

impl NoiseSpec {
    pub fn from_snr_db(snr_db: f64) -> Self {
        Self {
            snr_db,
            n0: snr_db_to_n0(snr_db),
        }
    }

    pub fn from_n0(n0: f64) -> Result<Self> {
        if !(n0 > 0.0) {
            return Err(Error::Config(format!("N0 must be positive, got {n0}")));
        }
        Ok(Self {
            snr_db: n0_to_snr_db(n0),
            n0,
        })
    }
}

/// N0 = 10^(-snr_db/10) with Es = 1.
pub fn snr_db_to_n0(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

pub fn n0_to_snr_db(n0: f64) -> f64 {
    -10.0 * n0.log10()
}

/// One circularly-symmetric CN(0, 1) draw: (a + jb)/sqrt(2), a,b ~ N(0,1).
#[inline]
pub fn standard_complex<R: rand::Rng>(rng: &mut R) -> Complex64 {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

/// Fills `h` with i.i.d. CN(0, 1) entries.
pub fn draw_channel_into<R: rand::Rng>(h: &mut ChannelMatrix, rng: &mut R) {
    for e in h.data.iter_mut() {
        *e = standard_complex(rng);
    }
}

/// Draws an n_rx x n_cols Rayleigh channel matrix with CN(0, 1) entries.
pub fn draw_channel<R: rand::Rng>(n_rx: usize, n_cols: usize, rng: &mut R) -> ChannelMatrix {
    let mut h = ChannelMatrix::zeros(n_rx, n_cols);
    draw_channel_into(&mut h, rng);
    h
}

/// Draws n_rx i.i.d. CN(0, N0) noise samples (variance N0/2 per dimension).
pub fn draw_noise<R: rand::Rng>(n_rx: usize, n0: f64, rng: &mut R) -> Result<Vec<Complex64>> {
    if !(n0 > 0.0) {
        return Err(Error::Config(format!("N0 must be positive, got {n0}")));
    }
    let sigma = n0.sqrt();
    Ok((0..n_rx).map(|_| standard_complex(rng) * sigma).collect())
}

/// Received signal y = H s + w.
pub fn transmit(h: &ChannelMatrix, s: &[Complex64], w: &[Complex64]) -> Result<Vec<Complex64>> {
    if w.len() != h.n_rx() {
        return Err(Error::Contract(format!(
            "noise length {} does not match {} receive antennas",
            w.len(),
            h.n_rx()
        )));
    }
    let mut y = h.mul_dense(s)?;
    for (yi, wi) in y.iter_mut().zip(w) {
        *yi += wi;
    }
    Ok(y)
}

/// Generator for substream `stream` of master seed `seed`.
///
/// Streams with distinct indices are independent ChaCha streams, so trial
/// outcomes do not depend on worker scheduling or on how many other trials
/// ran before them.
pub fn substream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
