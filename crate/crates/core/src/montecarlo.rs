//! Seeded parallel Monte Carlo engine for BER-vs-SNR curves and
//! rotation-angle sweeps.
//!
//! Determinism contract: trial `t` of a run draws everything it needs (source
//! bits, channel, unit-variance noise) from substream `t` of the master seed,
//! and trials are scheduled in fixed-size rounds whose extent depends only on
//! the accumulated integer totals. Worker count therefore never changes any
//! output, and the same trial indices re-run across SNR points, angle points,
//! and compared systems act as common random numbers.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::benchmarks::{detect_with_codebook, BenchCodebook, BenchmarkConfig, System};
use crate::channel::{draw_channel_into, standard_complex, ChannelMatrix};
use crate::dmbm::{Codeword, DmbmConfig, DmbmDetector};
use crate::error::{Error, Result};

/// Trials per parallel work item.
const BATCH: u64 = 1024;
/// First-round trial budget; rounds double up to `MAX_ROUND`.
const FIRST_ROUND: u64 = 2048;
const MAX_ROUND: u64 = 1 << 18;

/// When to stop accumulating trials at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    /// Stop once this many bit errors were seen (uniform relative accuracy).
    pub min_bit_errors: u64,
    /// Hard trial cap per point; points that hit it are flagged incomplete.
    pub max_trials: u64,
    /// Abandon the rest of the curve when a completed point estimates a BER
    /// below this floor.
    pub target_ber_floor: Option<f64>,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            min_bit_errors: 200,
            max_trials: 10_000_000,
            target_ber_floor: None,
        }
    }
}

impl StoppingRule {
    fn validate(&self) -> Result<()> {
        if self.min_bit_errors == 0 {
            return Err(Error::Config("min_bit_errors must be at least 1".into()));
        }
        if self.max_trials == 0 {
            return Err(Error::Config("max_trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// One estimated point of a BER curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub trials: u64,
    pub bit_errors: u64,
    /// bit_errors / (trials * eta).
    pub ber: f64,
    /// Normal-approximation 95% half-width on the bit-error proportion.
    pub ci95: f64,
    /// Whether `min_bit_errors` was reached before the trial cap.
    pub completed: bool,
}

/// BER estimates over an SNR grid for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub system: System,
    pub eta: usize,
    pub points: Vec<BerPoint>,
}

/// One estimated point of a rotation-angle sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePoint {
    pub angle_deg: f64,
    pub point: BerPoint,
}

/// BER versus rotation angle at a fixed SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSweep {
    pub snr_db: f64,
    pub points: Vec<AnglePoint>,
}

impl AngleSweep {
    /// Angle of the smallest estimated BER (first on ties).
    pub fn argmin_angle_deg(&self) -> Option<f64> {
        self.points
            .iter()
            .min_by(|a, b| a.point.ber.partial_cmp(&b.point.ber).unwrap())
            .map(|p| p.angle_deg)
    }
}

/// A scheme the engine can simulate.
#[derive(Debug, Clone)]
pub enum Scheme {
    Dmbm(DmbmConfig),
    Bench(BenchmarkConfig),
}

impl Scheme {
    pub fn system(&self) -> System {
        match self {
            Scheme::Dmbm(_) => System::Dmbm,
            Scheme::Bench(b) => b.system(),
        }
    }

    pub fn eta(&self) -> usize {
        match self {
            Scheme::Dmbm(c) => c.eta(),
            Scheme::Bench(b) => b.eta(),
        }
    }

    pub fn n_rx(&self) -> usize {
        match self {
            Scheme::Dmbm(c) => c.n_rx(),
            Scheme::Bench(b) => b.n_rx(),
        }
    }

    pub fn channel_cols(&self) -> usize {
        match self {
            Scheme::Dmbm(c) => c.r(),
            Scheme::Bench(b) => b.channel_cols(),
        }
    }
}

/// Receives machine-readable progress updates (point index, trials, errors).
pub trait Progress: Sync {
    fn on_progress(&self, point_index: usize, trials: u64, bit_errors: u64);
}

/// Discards progress updates.
pub struct NoProgress;

impl Progress for NoProgress {
    fn on_progress(&self, _: usize, _: u64, _: u64) {}
}

enum Codec<'a> {
    Dmbm {
        cfg: &'a DmbmConfig,
        phasor: Complex64,
        detector: DmbmDetector,
    },
    Bench {
        book: &'a BenchCodebook,
    },
}

impl Codec<'_> {
    /// (position, value) terms of the transmit vector for a source-bit value.
    #[inline]
    fn terms(&self, index: u32) -> [(usize, Complex64); 2] {
        match self {
            Codec::Dmbm { cfg, phasor, .. } => {
                let cw = Codeword::from_index(index, cfg);
                [(cw.k1 - 1, cw.s1), (cw.k2 - 1, cw.s2 * phasor)]
            }
            Codec::Bench { book } => book.entries()[index as usize].terms,
        }
    }

    #[inline]
    fn detect(&mut self, y: &[Complex64], h: &ChannelMatrix) -> Result<u32> {
        match self {
            Codec::Dmbm { detector, .. } => Ok(detector.detect(y, h)?.0),
            Codec::Bench { book } => Ok(detect_with_codebook(y, h, book)?.0),
        }
    }
}

struct PointRunner<'a> {
    scheme: &'a Scheme,
    book: Option<BenchCodebook>,
    seed: u64,
    rule: StoppingRule,
}

impl<'a> PointRunner<'a> {
    fn new(scheme: &'a Scheme, seed: u64, rule: StoppingRule) -> Result<Self> {
        rule.validate()?;
        let book = match scheme {
            Scheme::Dmbm(_) => None,
            Scheme::Bench(cfg) => Some(BenchCodebook::build(cfg)?),
        };
        Ok(Self {
            scheme,
            book,
            seed,
            rule,
        })
    }

    fn codec(&self) -> Codec<'_> {
        match self.scheme {
            Scheme::Dmbm(cfg) => Codec::Dmbm {
                cfg,
                phasor: cfg.phi().phasor(),
                detector: DmbmDetector::new(cfg),
            },
            Scheme::Bench(_) => Codec::Bench {
                book: self.book.as_ref().expect("benchmark codebook"),
            },
        }
    }

    /// Bit errors over trials [start, start + len).
    fn run_batch(&self, n0: f64, start: u64, len: u64) -> Result<u64> {
        let n_rx = self.scheme.n_rx();
        let cols = self.scheme.channel_cols();
        let eta = self.scheme.eta();
        let codebook_size = 1u64 << eta;
        let sigma = n0.sqrt();
        let template = ChaCha8Rng::seed_from_u64(self.seed);

        let mut codec = self.codec();
        let mut h = ChannelMatrix::zeros(n_rx, cols);
        let mut y = vec![Complex64::default(); n_rx];
        let mut errors = 0u64;
        for t in start..start + len {
            let mut rng = template.clone();
            rng.set_stream(t);
            let tx = rng.gen_range(0..codebook_size) as u32;
            draw_channel_into(&mut h, &mut rng);
            let [(p1, v1), (p2, v2)] = codec.terms(tx);
            let (c1, c2) = (h.column(p1), h.column(p2));
            for i in 0..n_rx {
                y[i] = c1[i] * v1 + c2[i] * v2;
            }
            if n0 > 0.0 {
                for yi in y.iter_mut() {
                    *yi += standard_complex(&mut rng) * sigma;
                }
            }
            let rx = codec.detect(&y, &h)?;
            errors += (tx ^ rx).count_ones() as u64;
        }
        Ok(errors)
    }

    fn run_point(
        &self,
        point_index: usize,
        snr_db: f64,
        progress: &dyn Progress,
    ) -> Result<BerPoint> {
        if snr_db.is_nan() {
            return Err(Error::Config("SNR grid contains NaN".into()));
        }
        // snr = +inf is the noiseless diagnostic mode (N0 = 0).
        let n0 = crate::channel::snr_db_to_n0(snr_db);
        let eta = self.scheme.eta() as u64;

        let mut trials = 0u64;
        let mut bit_errors = 0u64;
        let mut round = FIRST_ROUND;
        while trials < self.rule.max_trials && bit_errors < self.rule.min_bit_errors {
            let this_round = round.min(self.rule.max_trials - trials);
            let n_batches = this_round.div_ceil(BATCH);
            let round_errors: u64 = (0..n_batches)
                .into_par_iter()
                .map(|b| {
                    let start = trials + b * BATCH;
                    let len = BATCH.min(trials + this_round - start);
                    self.run_batch(n0, start, len)
                })
                .try_reduce(|| 0, |a, b| Ok(a + b))?;
            trials += this_round;
            bit_errors += round_errors;
            progress.on_progress(point_index, trials, bit_errors);
            round = (round * 2).min(MAX_ROUND);
        }

        let total_bits = trials * eta;
        let ber = bit_errors as f64 / total_bits as f64;
        let ci95 = 1.96 * (ber * (1.0 - ber) / total_bits as f64).sqrt();
        Ok(BerPoint {
            snr_db,
            trials,
            bit_errors,
            ber,
            ci95,
            completed: bit_errors >= self.rule.min_bit_errors,
        })
    }
}

/// Estimates the BER of `scheme` at every SNR grid point.
pub fn run_ber(
    scheme: &Scheme,
    snr_grid_db: &[f64],
    rule: &StoppingRule,
    seed: u64,
    progress: &dyn Progress,
) -> Result<BerCurve> {
    if snr_grid_db.is_empty() {
        return Err(Error::Config("SNR grid is empty".into()));
    }
    let runner = PointRunner::new(scheme, seed, *rule)?;
    let mut points = Vec::with_capacity(snr_grid_db.len());
    for (i, &snr_db) in snr_grid_db.iter().enumerate() {
        let point = runner.run_point(i, snr_db, progress)?;
        let stop = rule
            .target_ber_floor
            .map(|floor| point.completed && point.ber < floor)
            .unwrap_or(false);
        points.push(point);
        if stop {
            break;
        }
    }
    Ok(BerCurve {
        system: scheme.system(),
        eta: scheme.eta() as usize,
        points,
    })
}

/// Estimates DMBM BER at one SNR for every rotation angle in the grid,
/// sharing trial substreams across angles (common random numbers).
pub fn run_angle_sweep(
    m: usize,
    m_rf: usize,
    n_rx: usize,
    snr_db: f64,
    angle_grid_deg: &[f64],
    rule: &StoppingRule,
    seed: u64,
    progress: &dyn Progress,
) -> Result<AngleSweep> {
    if angle_grid_deg.is_empty() {
        return Err(Error::Config("angle grid is empty".into()));
    }
    let mut points = Vec::with_capacity(angle_grid_deg.len());
    for (i, &angle_deg) in angle_grid_deg.iter().enumerate() {
        let cfg = DmbmConfig::with_angle(
            m,
            m_rf,
            n_rx,
            crate::constellation::RotationAngle::from_degrees(angle_deg),
        )?;
        let scheme = Scheme::Dmbm(cfg);
        let runner = PointRunner::new(&scheme, seed, *rule)?;
        let point = runner.run_point(i, snr_db, progress)?;
        points.push(AnglePoint { angle_deg, point });
    }
    Ok(AngleSweep { snr_db, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_rule(min_errors: u64, max_trials: u64) -> StoppingRule {
        StoppingRule {
            min_bit_errors: min_errors,
            max_trials,
            target_ber_floor: None,
        }
    }

    fn dmbm_scheme(m: usize, m_rf: usize, n_rx: usize) -> Scheme {
        Scheme::Dmbm(DmbmConfig::new(m, m_rf, n_rx).unwrap())
    }

    #[test]
    fn noiseless_mode_is_error_free() {
        let curve = run_ber(
            &dmbm_scheme(4, 2, 2),
            &[f64::INFINITY],
            &quick_rule(10, 5_000),
            1,
            &NoProgress,
        )
        .unwrap();
        assert_eq!(curve.points[0].bit_errors, 0);
        assert_eq!(curve.points[0].ber, 0.0);
        assert!(!curve.points[0].completed);
        assert_eq!(curve.points[0].trials, 5_000);
    }

    #[test]
    fn ber_strictly_decreasing_over_snr() {
        let curve = run_ber(
            &dmbm_scheme(2, 2, 2),
            &[0.0, 5.0, 10.0, 15.0, 20.0],
            &quick_rule(200, 2_000_000),
            7,
            &NoProgress,
        )
        .unwrap();
        for pair in curve.points.windows(2) {
            assert!(pair[0].completed && pair[1].completed);
            assert!(
                pair[1].ber < pair[0].ber,
                "{} dB -> {} dB: {} vs {}",
                pair[0].snr_db,
                pair[1].snr_db,
                pair[0].ber,
                pair[1].ber
            );
        }
    }

    #[test]
    fn fewer_mirrors_perform_better() {
        // At fixed M and n_R the BER improves as m_rf goes down; common
        // random numbers make the comparison stable at modest error counts.
        let rule = quick_rule(400, 2_000_000);
        let snr = [15.0];
        let mut bers = Vec::new();
        for m_rf in [2, 3, 4] {
            let curve = run_ber(&dmbm_scheme(2, m_rf, 2), &snr, &rule, 11, &NoProgress).unwrap();
            assert!(curve.points[0].completed);
            bers.push(curve.points[0].ber);
        }
        assert!(bers[0] < bers[1] && bers[1] < bers[2], "{bers:?}");
    }

    #[test]
    fn deterministic_across_runs_and_thread_counts() {
        let scheme = dmbm_scheme(2, 1, 2);
        let rule = quick_rule(50, 20_000);
        let grid = [6.0, 12.0];
        let run = || run_ber(&scheme, &grid, &rule, 99, &NoProgress).unwrap();
        let base = run();
        assert_eq!(base, run());
        for threads in [1usize, 3] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let other = pool.install(run);
            assert_eq!(base, other, "thread count {threads} changed the result");
        }
    }

    #[test]
    fn benchmark_schemes_run_and_complete() {
        for scheme in [
            Scheme::Bench(BenchmarkConfig::sm(4, 4, 2).unwrap()),
            Scheme::Bench(BenchmarkConfig::qsm(4, 2, 2).unwrap()),
            Scheme::Bench(BenchmarkConfig::mbm(4, 2, 2).unwrap()),
            Scheme::Bench(BenchmarkConfig::dsm(4, 2, 2).unwrap()),
        ] {
            let curve = run_ber(&scheme, &[8.0], &quick_rule(100, 500_000), 5, &NoProgress).unwrap();
            assert!(curve.points[0].completed, "{}", scheme.system());
            assert!(curve.points[0].ber > 0.0);
        }
    }

    #[test]
    fn angle_sweep_prefers_tabulated_angle() {
        // Coarse sweep around the M=4 optimum at 45 degrees.
        let sweep = run_angle_sweep(
            4,
            1,
            4,
            13.0,
            &[15.0, 30.0, 45.0, 60.0, 75.0],
            &quick_rule(400, 500_000),
            17,
            &NoProgress,
        )
        .unwrap();
        assert_eq!(sweep.argmin_angle_deg(), Some(45.0));
    }

    #[test]
    fn ber_floor_truncates_curve() {
        let rule = StoppingRule {
            min_bit_errors: 100,
            max_trials: 1_000_000,
            target_ber_floor: Some(1e-2),
        };
        let curve = run_ber(
            &dmbm_scheme(2, 1, 4),
            &[0.0, 10.0, 20.0, 30.0],
            &rule,
            3,
            &NoProgress,
        )
        .unwrap();
        assert!(curve.points.len() < 4, "floor did not trigger");
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(run_ber(
            &dmbm_scheme(2, 1, 1),
            &[],
            &StoppingRule::default(),
            1,
            &NoProgress
        )
        .is_err());
    }

    #[test]
    fn progress_reports_monotone_totals() {
        use std::sync::Mutex;
        struct Capture(Mutex<Vec<(usize, u64, u64)>>);
        impl Progress for Capture {
            fn on_progress(&self, p: usize, t: u64, e: u64) {
                self.0.lock().unwrap().push((p, t, e));
            }
        }
        let capture = Capture(Mutex::new(Vec::new()));
        run_ber(
            &dmbm_scheme(2, 1, 1),
            &[5.0],
            &quick_rule(500, 100_000),
            2,
            &capture,
        )
        .unwrap();
        let events = capture.0.into_inner().unwrap();
        assert!(!events.is_empty());
        for pair in events.windows(2) {
            assert!(pair[1].1 > pair[0].1);
            assert!(pair[1].2 >= pair[0].2);
        }
    }
}
