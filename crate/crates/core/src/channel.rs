//! Antipodal modulation over an AWGN channel and per-section branch costs.
//!
//! Bit 0 maps to `+1` and bit 1 to `-1` (unit symbol energy). SNR values
//! are `E_s/N_0` in dB, so the noise variance is `1 / (2 * 10^(snr/10))`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::trellis::TailBitingTrellis;

pub fn modulate(c: &BitVec) -> Vec<f64> {
    (0..c.len())
        .map(|i| if c.get(i) { -1.0 } else { 1.0 })
        .collect()
}

/// Per-dimension noise variance `N_0 / 2` for unit symbol energy.
pub fn noise_variance(snr_db: f64) -> f64 {
    1.0 / (2.0 * 10f64.powf(snr_db / 10.0))
}

/// `E_b/N_0` for a code of the given rate, from `E_s/N_0`.
pub fn ebn0_db(esn0_db: f64, rate: f64) -> f64 {
    esn0_db - 10.0 * rate.log10()
}

/// Adds i.i.d. Gaussian noise of variance `noise_variance(snr_db)`, drawn
/// from a ChaCha8 stream seeded with `seed`.
pub fn add_awgn(x: &[f64], snr_db: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    add_awgn_with(x, snr_db, &mut rng)
}

pub fn add_awgn_with<R: rand::Rng + ?Sized>(x: &[f64], snr_db: f64, rng: &mut R) -> Vec<f64> {
    let sigma = noise_variance(snr_db).sqrt();
    let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
    x.iter().map(|&xi| xi + normal.sample(rng)).collect()
}

/// A received frame together with its branch cost tables.
#[derive(Clone, Debug)]
pub struct SoftInput {
    pub r: Vec<f64>,
    pub snr_db: Option<f64>,
    /// `costs[t][label]`: squared Euclidean distance between the received
    /// symbols of section `t` and the modulated `label`.
    pub costs: Vec<Vec<f64>>,
}

impl SoftInput {
    #[inline]
    pub fn cost(&self, section: usize, label: u32) -> f64 {
        self.costs[section][label as usize]
    }
}

/// Builds the per-section, per-label cost tables for `r`. A path's cost is
/// the squared Euclidean distance between `r` and its modulated label.
pub fn branch_costs(t: &TailBitingTrellis, r: &[f64]) -> Result<SoftInput> {
    branch_costs_for_widths(t.widths(), r)
}

pub fn branch_costs_for_widths(widths: &[usize], r: &[f64]) -> Result<SoftInput> {
    let total: usize = widths.iter().sum();
    if r.len() != total {
        return Err(Error::LengthMismatch {
            expected: total,
            actual: r.len(),
        });
    }
    let mut costs = Vec::with_capacity(widths.len());
    let mut off = 0;
    for &w in widths {
        let sym = &r[off..off + w];
        // cost of sending 0 / 1 on each bit
        let zero: Vec<f64> = sym.iter().map(|&y| (y - 1.0) * (y - 1.0)).collect();
        let one: Vec<f64> = sym.iter().map(|&y| (y + 1.0) * (y + 1.0)).collect();
        let table = (0..1u32 << w)
            .map(|label| {
                (0..w)
                    .map(|k| if (label >> k) & 1 == 1 { one[k] } else { zero[k] })
                    .sum()
            })
            .collect();
        costs.push(table);
        off += w;
    }
    Ok(SoftInput {
        r: r.to_vec(),
        snr_db: None,
        costs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    #[test]
    fn modulation_map() {
        assert_eq!(modulate(&bv("0000000")), vec![1.0; 7]);
        assert_eq!(
            modulate(&bv("1100110")),
            vec![-1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0]
        );
        let (a, b) = (bv("1010011"), bv("0110101"));
        let (ma, mb, ms) = (modulate(&a), modulate(&b), modulate(&a.xor(&b)));
        for i in 0..7 {
            assert_eq!(ms[i], ma[i] * mb[i]);
        }
    }

    #[test]
    fn noise_variance_formula() {
        assert_eq!(noise_variance(0.0), 0.5);
        assert!((noise_variance(10.0) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn awgn_is_seed_repeatable() {
        let x = vec![1.0; 64];
        assert_eq!(add_awgn(&x, 2.0, 7), add_awgn(&x, 2.0, 7));
        assert_ne!(add_awgn(&x, 2.0, 7), add_awgn(&x, 2.0, 8));
    }

    #[test]
    fn awgn_empirical_variance() {
        let x = vec![0.0; 1_000_000];
        let y = add_awgn(&x, 0.0, 42);
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / y.len() as f64;
        assert!((var - 0.5).abs() / 0.5 < 0.01, "variance {var}");
    }

    #[test]
    fn branch_cost_tables() {
        let widths = [2, 1];
        let s = branch_costs_for_widths(&widths, &[1.0, -1.0, 1.0]).unwrap();
        // label bit k is symbol k: 0b10 means (0, 1)
        assert_eq!(s.cost(0, 0b10), 0.0);
        assert_eq!(s.cost(0, 0b00), 4.0);
        assert_eq!(s.cost(1, 1), 4.0);
        assert!(s.costs.iter().flatten().all(|&c| c >= 0.0));
        assert!(matches!(
            branch_costs_for_widths(&widths, &[0.0; 4]),
            Err(Error::LengthMismatch { expected: 3, actual: 4 })
        ));
    }
}
