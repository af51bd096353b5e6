//! BPSK mapping, AWGN, LLR generation, and the counter-based random
//! streams that make Monte-Carlo runs reproducible for any worker count.

use crate::decode::DEFAULT_LLR_CAP;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Noise standard deviation for unit-energy BPSK at the given Eb/N0:
/// `σ = sqrt(1 / (2 · R · 10^(dB/10)))`.
pub fn sigma_from_ebn0(ebn0_db: f64, rate: f64) -> f64 {
    assert!(rate > 0.0 && rate <= 1.0, "rate must be in (0, 1]");
    (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

/// Channel LLR of an observation `y` under BPSK(0→+1, 1→−1) in noise of
/// standard deviation `sigma`: `2y/σ²`.
#[inline]
pub fn llr_from_sample(y: f64, sigma: f64) -> f64 {
    2.0 * y / (sigma * sigma)
}

/// Transmit a codeword over BPSK/AWGN and return the channel LLRs,
/// saturated at the default cap.
pub fn transmit<R: Rng>(codeword: &[u8], sigma: f64, rng: &mut R) -> Vec<f64> {
    assert!(sigma > 0.0, "sigma must be positive");
    codeword
        .iter()
        .map(|&b| {
            let s = 1.0 - 2.0 * (b & 1) as f64;
            let y = s + sigma * rng.sample::<f64, _>(StandardNormal);
            llr_from_sample(y, sigma).clamp(-DEFAULT_LLR_CAP, DEFAULT_LLR_CAP)
        })
        .collect()
}

/// Saturated LLRs of a noiseless observation of `codeword`.
pub fn noiseless_llrs(codeword: &[u8], cap: f64) -> Vec<f64> {
    codeword.iter().map(|&b| if b & 1 == 0 { cap } else { -cap }).collect()
}

/// Deterministic substream derivation: fold tag words into the master
/// seed with a splitmix-style finalizer. Identical tag tuples always
/// give identical streams — the property the parallel harness relies on.
pub fn substream(seed: u64, tags: &[u64]) -> ChaCha12Rng {
    let mut h = mix(seed ^ 0x9E3779B97F4A7C15);
    for &t in tags {
        h = mix(h ^ t);
    }
    ChaCha12Rng::seed_from_u64(h)
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Domain separation tags for the substreams.
pub mod domain {
    /// Monte-Carlo frame simulation.
    pub const SIM: u64 = 1;
    /// Genetic-algorithm fitness evaluation (common random numbers).
    pub const FITNESS: u64 = 2;
    /// Genetic-algorithm selection and operators.
    pub const EVOLVE: u64 = 3;
}

/// Gaussian tail probability `Q(x)`, used by closed-form BER checks.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc_scalar(x / std::f64::consts::SQRT_2)
}

fn erfc_scalar(x: f64) -> f64 {
    // rational approximation, ~1.5e-7 absolute error; plenty for
    // Monte-Carlo sanity bounds
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        poly
    } else {
        2.0 - poly
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_formula_values() {
        assert!((sigma_from_ebn0(0.0, 1.0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert!((sigma_from_ebn0(3.0, 0.5) - 0.70795).abs() < 1e-5);
        // very low SNR: sigma grows without bound
        assert!(sigma_from_ebn0(-60.0, 0.5) > 100.0);
    }

    #[test]
    fn llr_is_two_y_over_sigma_squared() {
        assert_eq!(llr_from_sample(0.0, 1.3), 0.0);
        assert!((llr_from_sample(1.0, 1.0) - 2.0).abs() < 1e-12);
        assert!((llr_from_sample(-0.5, 2.0) + 0.25).abs() < 1e-12);
    }

    #[test]
    fn transmit_is_capped_at_tiny_sigma() {
        let mut rng = substream(1, &[0]);
        let llr = transmit(&[0, 1, 0, 1], 1e-6, &mut rng);
        assert_eq!(llr, vec![40.0, -40.0, 40.0, -40.0]);
    }

    #[test]
    fn transmit_statistics_match_model() {
        let sigma = 0.8;
        let mut rng = substream(7, &[1]);
        let n = 200_000;
        let llr = transmit(&vec![0u8; n], sigma, &mut rng);
        // E[llr] = 2/σ²
        let mean: f64 = llr.iter().sum::<f64>() / n as f64;
        let expect = 2.0 / (sigma * sigma);
        assert!((mean - expect).abs() < 0.05, "mean {mean} vs {expect}");
    }

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let mut a = substream(5, &[domain::SIM, 0, 3]);
        let mut b = substream(5, &[domain::SIM, 0, 3]);
        let mut c = substream(5, &[domain::SIM, 1, 3]);
        let (xa, xb, xc): (u64, u64, u64) = (a.gen(), b.gen(), c.gen());
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn q_function_reference_points() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-7);
        assert!((q_function(1.0) - 0.158655).abs() < 1e-5);
        assert!((q_function(3.0) - 0.00134990).abs() < 1e-6);
    }
}
