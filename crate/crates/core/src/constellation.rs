//! Gray-mapped rectangular M-QAM constellations, symbol rotation, and the
//! tabulated BER-optimal rotation angles.
//!
//! Constellations are normalized to unit average symbol energy, so the SNR
//! definition Es/N0 holds with Es = 1 for every order. Square orders use an
//! L x L grid; non-square powers of two use the conventional (2L) x L
//! rectangle. M = 2 is BPSK on the real axis and M = 1 is the degenerate
//! single-point alphabet used by index-only schemes.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Rotation angle in radians, normalized into [0, 2*pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationAngle {
    radians: f64,
}

impl RotationAngle {
    pub fn from_radians(radians: f64) -> Self {
        let tau = std::f64::consts::TAU;
        let mut r = radians % tau;
        if r < 0.0 {
            r += tau;
        }
        Self { radians: r }
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Self::from_radians(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.radians
    }

    pub fn degrees(self) -> f64 {
        self.radians.to_degrees()
    }

    /// The unit phasor e^{j*phi} applied to the second symbol of a pair.
    pub fn phasor(self) -> Complex64 {
        Complex64::from_polar(1.0, self.radians)
    }
}

/// Rotates a symbol by `phi`, preserving its magnitude.
pub fn rotate(s: Complex64, phi: RotationAngle) -> Complex64 {
    s * phi.phasor()
}

/// BER-optimal rotation angle for the supported QAM orders.
///
/// Orders outside the table need an explicit user-supplied angle.
pub fn optimum_angle(m: usize) -> Result<RotationAngle> {
    let degrees = match m {
        2 => 90.0,
        4 => 45.0,
        8 => 60.0,
        16 => 70.0,
        _ => {
            return Err(Error::Config(format!(
                "no tabulated rotation angle for M={m}; supply one explicitly"
            )))
        }
    };
    Ok(RotationAngle::from_degrees(degrees))
}

/// A Gray-labeled M-QAM alphabet with unit average symbol energy.
///
/// `points[v]` is the symbol whose label is the MSB-first bit string with
/// integer value `v`.
#[derive(Debug, Clone)]
pub struct Constellation {
    order: usize,
    bits_per_symbol: usize,
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn order(&self) -> usize {
        self.order
    }

    /// m_s = log2(M).
    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Symbol for a label given as its MSB-first integer value.
    pub fn point(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    /// Maps a bit string of length m_s onto its labeled symbol.
    pub fn map_bits(&self, bits: &[u8]) -> Result<Complex64> {
        if bits.len() != self.bits_per_symbol {
            return Err(Error::Contract(format!(
                "expected {} bits, got {}",
                self.bits_per_symbol,
                bits.len()
            )));
        }
        Ok(self.points[bits_to_index(bits)])
    }

    /// Hard-decision demapping: label bits of the nearest constellation point.
    pub fn demap(&self, s: Complex64) -> Vec<u8> {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (v, p) in self.points.iter().enumerate() {
            let d = (s - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = v;
            }
        }
        index_to_bits(best, self.bits_per_symbol)
    }

    /// Average symbol energy; 1.0 up to rounding for every built alphabet.
    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.order as f64
    }
}

/// MSB-first bit string to integer value.
pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| {
        debug_assert!(b <= 1);
        (acc << 1) | b as usize
    })
}

/// Integer value to MSB-first bit string of the given width.
pub fn index_to_bits(value: usize, width: usize) -> Vec<u8> {
    (0..width)
        .rev()
        .map(|i| ((value >> i) & 1) as u8)
        .collect()
}

fn gray_decode(g: usize) -> usize {
    let mut i = g;
    let mut shift = 1;
    while (g >> shift) > 0 {
        i ^= g >> shift;
        shift += 1;
    }
    i
}

/// Builds the Gray-labeled rectangular M-QAM alphabet.
///
/// The first ceil(m_s/2) label bits Gray-select the in-phase level (ascending
/// left to right) and the remaining bits Gray-select the quadrature level
/// (descending top to bottom), which reproduces the usual quadrant labeling
/// where `10 -> 1+j` and `01 -> -1-j` for M = 4 before normalization.
pub fn build_qam(m: usize) -> Result<Constellation> {
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::Config(format!(
            "QAM order must be a power of two, got {m}"
        )));
    }
    let bits_per_symbol = m.trailing_zeros() as usize;
    if m == 1 {
        return Ok(Constellation {
            order: 1,
            bits_per_symbol: 0,
            points: vec![Complex64::new(1.0, 0.0)],
        });
    }

    let mi = bits_per_symbol.div_ceil(2);
    let mq = bits_per_symbol / 2;
    let li = 1usize << mi;
    let lq = 1usize << mq;

    // Mean square of the +-1, +-3, ... level set is (L^2 - 1) / 3.
    let energy = ((li * li - 1) as f64 + (lq * lq - 1) as f64) / 3.0;
    let scale = 1.0 / energy.sqrt();

    let mut points = vec![Complex64::default(); m];
    for label in 0..m {
        let gi = label >> mq;
        let gq = label & (lq - 1);
        let level_i = gray_decode(gi);
        let level_q = gray_decode(gq);
        let re = (2 * level_i) as f64 - (li - 1) as f64;
        let im = (lq - 1) as f64 - (2 * level_q) as f64;
        points[label] = Complex64::new(re * scale, im * scale);
    }

    Ok(Constellation {
        order: m,
        bits_per_symbol,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() < tol,
            "expected {b}, got {a} (|diff|={})",
            (a - b).norm()
        );
    }

    #[test]
    fn qpsk_matches_unnormalized_quadrant_labels() {
        // Pre-normalization points are {+-1 +- j}; the built alphabet carries
        // the same labels scaled by 1/sqrt(2).
        let c = build_qam(4).unwrap();
        assert_close(
            c.map_bits(&[1, 0]).unwrap(),
            Complex64::new(1.0, 1.0) / SQRT2,
            1e-12,
        );
        assert_close(
            c.map_bits(&[0, 1]).unwrap(),
            Complex64::new(-1.0, -1.0) / SQRT2,
            1e-12,
        );
    }

    #[test]
    fn bpsk_is_real_axis_pair() {
        let c = build_qam(2).unwrap();
        let mut pts: Vec<f64> = c.points().iter().map(|p| p.re).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(pts, vec![-1.0, 1.0]);
        assert!(c.points().iter().all(|p| p.im == 0.0));
    }

    #[test]
    fn unit_average_energy_all_orders() {
        for m in [1, 2, 4, 8, 16, 64, 256] {
            let c = build_qam(m).unwrap();
            assert!(
                (c.average_energy() - 1.0).abs() < 1e-12,
                "M={m}: energy {}",
                c.average_energy()
            );
        }
    }

    #[test]
    fn points_distinct_and_labels_bijective() {
        for m in [2, 4, 8, 16, 64] {
            let c = build_qam(m).unwrap();
            assert_eq!(c.points().len(), m);
            for i in 0..m {
                for j in (i + 1)..m {
                    assert!((c.point(i) - c.point(j)).norm() > 1e-9, "M={m}: {i} == {j}");
                }
            }
            // Round trip over every label.
            for v in 0..m {
                let bits = index_to_bits(v, c.bits_per_symbol());
                let p = c.map_bits(&bits).unwrap();
                assert_eq!(c.demap(p), bits);
            }
        }
    }

    #[test]
    fn gray_property_rectangular_neighbors() {
        // Nearest grid neighbors differ in exactly one label bit.
        for m in [4, 8, 16, 64] {
            let c = build_qam(m).unwrap();
            let dmin = (0..m)
                .flat_map(|i| (0..m).map(move |j| (i, j)))
                .filter(|(i, j)| i != j)
                .map(|(i, j)| (c.point(i) - c.point(j)).norm())
                .fold(f64::INFINITY, f64::min);
            for i in 0..m {
                for j in (i + 1)..m {
                    if (c.point(i) - c.point(j)).norm() < dmin * 1.001 {
                        let diff = (i ^ j).count_ones();
                        assert_eq!(diff, 1, "M={m}: labels {i:b} and {j:b} are neighbors");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(build_qam(3), Err(Error::Config(_))));
        assert!(matches!(build_qam(0), Err(Error::Config(_))));
        assert!(matches!(build_qam(12), Err(Error::Config(_))));
    }

    #[test]
    fn map_bits_wrong_length_is_contract_violation() {
        let c = build_qam(4).unwrap();
        assert!(matches!(c.map_bits(&[1]), Err(Error::Contract(_))));
    }

    #[test]
    fn rotation_worked_example() {
        // (-1 - j) e^{j45} = -sqrt(2) j, the -1.41j of the unnormalized walkthrough.
        let out = rotate(Complex64::new(-1.0, -1.0), RotationAngle::from_degrees(45.0));
        assert_close(out, Complex64::new(0.0, -SQRT2), 1e-12);
        // Identity and quarter turn.
        let s = Complex64::new(0.3, -0.7);
        assert_close(rotate(s, RotationAngle::from_degrees(0.0)), s, 1e-15);
        assert_close(
            rotate(Complex64::new(1.0, 0.0), RotationAngle::from_degrees(90.0)),
            Complex64::new(0.0, 1.0),
            1e-12,
        );
    }

    #[test]
    fn optimum_angle_table() {
        for (m, expected) in [(2, 90.0), (4, 45.0), (8, 60.0), (16, 70.0)] {
            let got = optimum_angle(m).unwrap().degrees();
            assert!((got - expected).abs() < 1e-12, "M={m}: {got}");
        }
        assert!(matches!(optimum_angle(32), Err(Error::Config(_))));
    }

    #[test]
    fn angle_normalization() {
        assert!((RotationAngle::from_degrees(-90.0).degrees() - 270.0).abs() < 1e-9);
        assert!((RotationAngle::from_degrees(405.0).degrees() - 45.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn rotate_preserves_magnitude(re in -10.0f64..10.0, im in -10.0f64..10.0, deg in -720.0f64..720.0) {
            let s = Complex64::new(re, im);
            let phi = RotationAngle::from_degrees(deg);
            let r = rotate(s, phi);
            prop_assert!((r.norm() - s.norm()).abs() < 1e-12);
            // Rotating back restores the symbol.
            let back = rotate(r, RotationAngle::from_degrees(-deg));
            prop_assert!((back - s).norm() < 1e-12);
        }

        #[test]
        fn map_demap_round_trip(m_exp in 1usize..7, v in 0usize..64) {
            let m = 1usize << m_exp;
            let c = build_qam(m).unwrap();
            let bits = index_to_bits(v % m, c.bits_per_symbol());
            let p = c.map_bits(&bits).unwrap();
            prop_assert_eq!(c.demap(p), bits);
        }
    }
}
