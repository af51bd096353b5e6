//! Minimum-distance and minimum-weight-codeword-count estimation.
//!
//! [`brute_force_spectrum`] enumerates the whole codebook (Gray-code
//! order, one row XOR per step) and is exact. [`scl_spectrum_estimate`]
//! probes the code with a list decode of the noiseless all-zero word:
//! by channel symmetry the low-metric leaf paths are the low-weight
//! codewords, so the minimum nonzero weight seen is an upper bound on
//! d_min and the count at that weight a lower bound on A_dmin. With
//! `L = 2^K` the whole tree survives and the estimate is exact.

use crate::channel::noiseless_llrs;
use crate::decode::{scl_leaf_paths, DecoderConfig};
use crate::polar::{kron_generator, PolarCode};
use std::collections::BTreeMap;
use thiserror::Error;

/// Largest information length brute force will enumerate (2^K words).
pub const BRUTE_FORCE_MAX_K: usize = 24;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("brute force supports K ≤ {BRUTE_FORCE_MAX_K}, got K={0}")]
    InfoLengthTooLarge(usize),
    #[error("list size must be ≥ 2, got {0}")]
    ListTooSmall(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumResult {
    /// Minimum nonzero codeword weight (exact or an upper bound).
    pub d_min: usize,
    /// Weight -> codeword count. Brute force fills every weight; the
    /// list estimate reports only the minimum observed weight.
    pub counts: BTreeMap<usize, u64>,
    pub exact: bool,
    /// List size used by the estimator; 0 for brute force.
    pub list_size_used: usize,
}

impl SpectrumResult {
    /// Count at the minimum weight, `A_{d_min}`.
    pub fn min_weight_count(&self) -> u64 {
        self.counts.get(&self.d_min).copied().unwrap_or(0)
    }

    /// One-line rendering used by the CLI.
    pub fn summary(&self) -> String {
        format!(
            "d_min={} A_{}={} exact={} L={}",
            self.d_min,
            self.d_min,
            self.min_weight_count(),
            self.exact,
            self.list_size_used
        )
    }
}

/// Exact weight enumerator by Gray-code enumeration of all 2^K
/// information words.
pub fn brute_force_spectrum(code: &PolarCode) -> Result<SpectrumResult, SpectrumError> {
    let k = code.info_len();
    if k > BRUTE_FORCE_MAX_K {
        return Err(SpectrumError::InfoLengthTooLarge(k));
    }
    let n = code.block_len();
    let words = n.div_ceil(64);
    let g = kron_generator(code.stages());
    // packed generator rows for the information positions
    let rows: Vec<Vec<u64>> = code
        .info_set()
        .iter()
        .map(|&i| g.matrix().row_words(i).to_vec())
        .collect();

    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut acc = vec![0u64; words];
    let total = 1u64 << k;
    for m in 1..total {
        let flip = (m.trailing_zeros()) as usize;
        for (a, r) in acc.iter_mut().zip(&rows[flip]) {
            *a ^= r;
        }
        let w: u32 = acc.iter().map(|x| x.count_ones()).sum();
        *counts.entry(w as usize).or_insert(0) += 1;
    }
    let d_min = *counts.keys().next().expect("nonzero codewords exist");
    Ok(SpectrumResult { d_min, counts, exact: true, list_size_used: 0 })
}

/// List-probing estimate: decode the noiseless all-zero word with final
/// selection disabled and report the minimum nonzero weight among the
/// surviving re-encoded paths.
pub fn scl_spectrum_estimate(
    code: &PolarCode,
    list_size: usize,
) -> Result<SpectrumResult, SpectrumError> {
    Ok(scl_spectrum_with_witnesses(code, list_size)?.0)
}

/// Estimate plus the minimum-weight codewords found, for re-verification.
pub fn scl_spectrum_with_witnesses(
    code: &PolarCode,
    list_size: usize,
) -> Result<(SpectrumResult, Vec<Vec<u8>>), SpectrumError> {
    if list_size < 2 {
        return Err(SpectrumError::ListTooSmall(list_size));
    }
    let config = DecoderConfig::default();
    let llr = noiseless_llrs(&vec![0u8; code.block_len()], config.llr_cap);
    let paths = scl_leaf_paths(code, &llr, list_size, &config).expect("valid inputs");

    let mut d_min = usize::MAX;
    let mut witnesses: Vec<Vec<u8>> = Vec::new();
    for p in &paths {
        let w = p.codeword.iter().filter(|&&b| b == 1).count();
        if w == 0 {
            continue;
        }
        match w.cmp(&d_min) {
            std::cmp::Ordering::Less => {
                d_min = w;
                witnesses.clear();
                witnesses.push(p.codeword.clone());
            }
            std::cmp::Ordering::Equal => witnesses.push(p.codeword.clone()),
            std::cmp::Ordering::Greater => {}
        }
    }
    assert!(d_min < usize::MAX, "a list of size ≥ 2 contains a nonzero codeword");
    let mut counts = BTreeMap::new();
    counts.insert(d_min, witnesses.len() as u64);
    Ok((
        SpectrumResult { d_min, counts, exact: false, list_size_used: list_size },
        witnesses,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::construct_bhattacharyya;
    use crate::tanner::dense_parity_check;

    #[test]
    fn repetition_code() {
        let code = PolarCode::new(2, &[1]).unwrap();
        let s = brute_force_spectrum(&code).unwrap();
        assert_eq!(s.d_min, 2);
        assert_eq!(s.min_weight_count(), 1);
        assert!(s.exact);
    }

    #[test]
    fn p84_is_first_order_reed_muller() {
        // P(8,4) with A={4,6,7,8} spans the weight enumerator 1 + 14z⁴ + z⁸
        let code = PolarCode::new(8, &[3, 5, 6, 7]).unwrap();
        let s = brute_force_spectrum(&code).unwrap();
        assert_eq!(s.d_min, 4);
        assert_eq!(s.counts[&4], 14);
        assert_eq!(s.counts[&8], 1);
        assert_eq!(s.counts.values().sum::<u64>(), 15);
    }

    /// Independent enumeration: count words of each weight by checking
    /// every length-N binary vector against the dense parity checks.
    #[test]
    fn brute_force_matches_parity_check_enumeration() {
        let code = construct_bhattacharyya(8, 4, 0.5).unwrap();
        let h = dense_parity_check(&code);
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for x in 1u32..256 {
            let bits: Vec<u8> = (0..8).map(|b| ((x >> b) & 1) as u8).collect();
            if h.is_codeword(&bits) {
                *counts.entry(x.count_ones() as usize).or_insert(0) += 1;
            }
        }
        let s = brute_force_spectrum(&code).unwrap();
        assert_eq!(s.counts, counts);
    }

    #[test]
    fn rate_one_has_unit_distance() {
        let code = PolarCode::new(4, &[0, 1, 2, 3]).unwrap();
        let s = brute_force_spectrum(&code).unwrap();
        assert_eq!(s.d_min, 1);
        assert_eq!(s.counts[&1], 4);
    }

    #[test]
    fn brute_force_rejects_large_k() {
        let code = construct_bhattacharyya(64, 32, 0.5).unwrap();
        assert!(matches!(
            brute_force_spectrum(&code),
            Err(SpectrumError::InfoLengthTooLarge(32))
        ));
    }

    #[test]
    fn estimator_rejects_trivial_list() {
        let code = PolarCode::new(4, &[2, 3]).unwrap();
        assert!(matches!(scl_spectrum_estimate(&code, 1), Err(SpectrumError::ListTooSmall(1))));
    }

    #[test]
    fn full_list_equals_brute_force_for_all_small_codes() {
        for n in [4usize, 8, 16] {
            for k in 2..=n.min(8) {
                let code = construct_bhattacharyya(n, k, 0.5).unwrap();
                let brute = brute_force_spectrum(&code).unwrap();
                let est = scl_spectrum_estimate(&code, 1 << k).unwrap();
                assert_eq!(est.d_min, brute.d_min, "P({n},{k})");
                assert_eq!(est.min_weight_count(), brute.min_weight_count(), "P({n},{k})");
            }
        }
    }

    #[test]
    fn estimate_is_monotone_in_list_size() {
        let code = construct_bhattacharyya(32, 16, 0.5).unwrap();
        let mut last_d = usize::MAX;
        let mut last_count = 0u64;
        for l in [4usize, 16, 64, 256, 1024] {
            let s = scl_spectrum_estimate(&code, l).unwrap();
            assert!(s.d_min <= last_d, "d_min must not grow with L");
            if s.d_min == last_d {
                assert!(s.min_weight_count() >= last_count);
            }
            last_d = s.d_min;
            last_count = s.min_weight_count();
        }
    }

    #[test]
    fn witnesses_reverify_against_dense_checks() {
        let code = construct_bhattacharyya(16, 8, 0.5).unwrap();
        let h = dense_parity_check(&code);
        let (s, wit) = scl_spectrum_with_witnesses(&code, 64).unwrap();
        assert_eq!(wit.len() as u64, s.min_weight_count());
        for w in &wit {
            assert!(h.is_codeword(w));
            assert_eq!(w.iter().filter(|&&b| b == 1).count(), s.d_min);
        }
    }

    #[test]
    fn summary_format() {
        let code = PolarCode::new(2, &[1]).unwrap();
        let s = brute_force_spectrum(&code).unwrap();
        assert_eq!(s.summary(), "d_min=2 A_2=1 exact=true L=0");
    }
}
