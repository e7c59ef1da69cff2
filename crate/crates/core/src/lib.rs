//! Link-level simulation and analysis library for double media-based
//! modulation (DMBM) and the benchmark index-modulation schemes SM, QSM,
//! MBM, and DSM.
//!
//! The library covers the full desk-scale experiment loop: Gray-mapped QAM
//! alphabets, encoders and exhaustive ML detectors for all five schemes,
//! Rayleigh/AWGN channel generation with reproducible substream seeding,
//! closed-form error/capacity/complexity analysis, and a deterministic
//! parallel Monte Carlo engine.

pub mod analysis;
pub mod benchmarks;
pub mod channel;
pub mod constellation;
pub mod dmbm;
pub mod error;
pub mod montecarlo;

pub use error::{Error, Result};
