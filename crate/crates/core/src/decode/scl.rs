//! Successive cancellation list decoding.
//!
//! Array-based implementation: each path carries per-depth LLR buffers
//! and partial-sum buffers (`2N` of each), cloned on path splits. The
//! path metric uses the exact update
//! `PM += ln(1 + exp(-(1-2u)·λ))`, which makes the accumulated metric a
//! monotone transform of the path posterior; with the full tree kept
//! (`L = 2^K`) the lowest-metric leaf is the maximum-likelihood codeword.
//! Ties break toward the lower candidate index (parent path first, then
//! the u=0 branch), so results are deterministic.

use super::{boxplus, clamp_llr, softplus_neg, DecodeError, DecodeResult, DecoderConfig};
use crate::polar::PolarCode;

/// One surviving leaf path.
#[derive(Debug, Clone)]
pub struct SclPath {
    pub metric: f64,
    pub u: Vec<u8>,
    pub codeword: Vec<u8>,
}

struct PathState {
    metric: f64,
    /// Decision LLR buffers per depth d in 1..=n, length N >> d.
    llr: Vec<Vec<f64>>,
    /// Partial-sum buffers per depth d in 0..=n, length N >> d. Entry 0
    /// holds the codeword once the last leaf is processed.
    sums: Vec<Vec<u8>>,
    u: Vec<u8>,
}

impl PathState {
    fn fresh(n: usize, stages: usize) -> PathState {
        PathState {
            metric: 0.0,
            llr: (1..=stages).map(|d| vec![0.0; n >> d]).collect(),
            sums: (0..=stages).map(|d| vec![0u8; n >> d]).collect(),
            u: Vec::with_capacity(n),
        }
    }
}

/// Run list decoding and return every surviving leaf path, best metric
/// first. This is the engine behind [`decode_scl`] and the
/// list-probing weight-spectrum estimator.
pub fn scl_leaf_paths(
    code: &PolarCode,
    llr: &[f64],
    list_size: usize,
    config: &DecoderConfig,
) -> Result<Vec<SclPath>, DecodeError> {
    let n = code.block_len();
    if llr.len() != n {
        return Err(DecodeError::LlrLengthMismatch { expected: n, got: llr.len() });
    }
    if list_size == 0 {
        return Err(DecodeError::EmptyList);
    }
    let cap = config.llr_cap;
    let stages = code.stages();
    let channel: Vec<f64> = llr.iter().map(|&x| clamp_llr(x, cap)).collect();

    let mut paths: Vec<PathState> = vec![PathState::fresh(n, stages)];
    for phase in 0..n {
        // refresh decision LLRs down to the leaf for every path
        for p in paths.iter_mut() {
            refresh_llrs(p, &channel, phase, stages, n, cap);
        }
        let frozen = code.is_frozen(phase);
        if frozen {
            for p in paths.iter_mut() {
                let lam = leaf_llr(p, stages);
                p.metric += softplus_neg(lam);
                p.u.push(0);
                propagate_sums(p, phase, 0, stages);
            }
            continue;
        }
        // branch every path on u ∈ {0, 1}, keep the best `list_size`
        let mut cand: Vec<(f64, usize, u8)> = Vec::with_capacity(paths.len() * 2);
        for (idx, p) in paths.iter().enumerate() {
            let lam = leaf_llr(p, stages);
            cand.push((p.metric + softplus_neg(lam), idx, 0));
            cand.push((p.metric + softplus_neg(-lam), idx, 1));
        }
        cand.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("metrics are finite")
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        cand.truncate(list_size);

        let mut slots: Vec<Option<PathState>> = paths.into_iter().map(Some).collect();
        let mut uses = vec![0u8; slots.len()];
        for &(_, idx, _) in &cand {
            uses[idx] += 1;
        }
        let mut next: Vec<PathState> = Vec::with_capacity(cand.len());
        for &(metric, idx, bit) in &cand {
            let mut state = if uses[idx] > 1 {
                uses[idx] -= 1;
                slots[idx].as_ref().expect("parent still present").clone_state()
            } else {
                slots[idx].take().expect("parent present on last use")
            };
            state.metric = metric;
            state.u.push(bit);
            propagate_sums(&mut state, phase, bit, stages);
            next.push(state);
        }
        paths = next;
    }

    paths.sort_by(|a, b| a.metric.partial_cmp(&b.metric).expect("finite").then(a.u.cmp(&b.u)));
    Ok(paths
        .into_iter()
        .map(|p| SclPath { metric: p.metric, codeword: p.sums[0].clone(), u: p.u })
        .collect())
}

impl PathState {
    fn clone_state(&self) -> PathState {
        PathState {
            metric: self.metric,
            llr: self.llr.clone(),
            sums: self.sums.clone(),
            u: self.u.clone(),
        }
    }
}

#[inline]
fn leaf_llr(p: &PathState, stages: usize) -> f64 {
    if stages == 0 {
        unreachable!("block length is at least 2");
    }
    p.llr[stages - 1][0]
}

/// Depth-d LLR buffer access: depth 0 is the shared channel vector.
#[inline]
fn llr_at<'a>(p: &'a PathState, channel: &'a [f64], d: usize) -> &'a [f64] {
    if d == 0 {
        channel
    } else {
        &p.llr[d - 1]
    }
}

/// Recompute the decision LLRs needed for leaf `phase`.
///
/// At phase 0 the whole left spine is fresh f-messages. Otherwise the
/// node at depth `n − trailing_zeros(phase)` turns into a right child
/// (one g-message from its parent and the stored left partial sums),
/// and everything below it is f-messages again.
fn refresh_llrs(p: &mut PathState, channel: &[f64], phase: usize, stages: usize, n: usize, cap: f64) {
    let start_depth = if phase == 0 {
        1
    } else {
        let k = phase.trailing_zeros() as usize;
        let d = stages - k;
        let half = n >> d;
        let (parent_llr, sums) = (llr_at(p, channel, d - 1).to_vec(), &p.sums[d]);
        let out: Vec<f64> = (0..half)
            .map(|j| {
                let sign = 1.0 - 2.0 * sums[j] as f64;
                clamp_llr(parent_llr[j + half] + sign * parent_llr[j], cap)
            })
            .collect();
        p.llr[d - 1] = out;
        d + 1
    };
    for d in start_depth..=stages {
        let half = n >> d;
        let parent = llr_at(p, channel, d - 1);
        let out: Vec<f64> = (0..half)
            .map(|j| clamp_llr(boxplus(parent[j], parent[j + half]), cap))
            .collect();
        p.llr[d - 1] = out;
    }
}

/// Fold the decided leaf back up: while the completed node is a right
/// child, combine with the stored left-sibling sums.
fn propagate_sums(p: &mut PathState, phase: usize, bit: u8, stages: usize) {
    let mut seg = vec![bit];
    let mut d = stages;
    while d > 0 && (phase >> (stages - d)) & 1 == 1 {
        let left = &p.sums[d];
        let len = seg.len();
        let mut parent = vec![0u8; 2 * len];
        for j in 0..len {
            parent[j] = left[j] ^ seg[j];
            parent[j + len] = seg[j];
        }
        seg = parent;
        d -= 1;
    }
    p.sums[d] = seg;
}

/// List decode and return the lowest-metric path.
pub fn decode_scl(
    code: &PolarCode,
    llr: &[f64],
    list_size: usize,
    config: &DecoderConfig,
) -> Result<DecodeResult, DecodeError> {
    let paths = scl_leaf_paths(code, llr, list_size, config)?;
    let best = &paths[0];
    Ok(DecodeResult {
        info_est: code.info_set().iter().map(|&i| best.u[i]).collect(),
        codeword_est: best.codeword.clone(),
        iterations_used: 1,
        converged: true,
        path_metric: Some(best.metric),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::noiseless_llrs;
    use crate::decode::decode_sc;
    use crate::polar::construct_bhattacharyya;

    fn xorshift(state: &mut u64) -> f64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        (*state >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn noiseless_recovery() {
        let code = construct_bhattacharyya(16, 8, 0.5).unwrap();
        let config = DecoderConfig::default();
        for word in [0u32, 1, 77, 200, 255] {
            let info: Vec<u8> = (0..8).map(|b| ((word >> b) & 1) as u8).collect();
            let cw = code.encode(&info).unwrap();
            let out = decode_scl(&code, &noiseless_llrs(&cw, 20.0), 4, &config).unwrap();
            assert_eq!(out.info_est, info);
            assert_eq!(out.codeword_est, cw);
        }
    }

    #[test]
    fn list_one_equals_sc_bit_exact() {
        let code = construct_bhattacharyya(16, 8, 0.5).unwrap();
        let config = DecoderConfig::default();
        let mut state = 42u64;
        for _ in 0..2000 {
            let llr: Vec<f64> = (0..16).map(|_| 10.0 * (xorshift(&mut state) - 0.5)).collect();
            let sc = decode_sc(&code, &llr, &config).unwrap();
            let scl = decode_scl(&code, &llr, 1, &config).unwrap();
            assert_eq!(sc.info_est, scl.info_est);
            assert_eq!(sc.codeword_est, scl.codeword_est);
        }
    }

    /// Correlation score proportional to the log likelihood of a
    /// codeword on a memoryless channel with the given LLRs.
    fn ml_score(cw: &[u8], llr: &[f64]) -> f64 {
        cw.iter().zip(llr).map(|(&b, &l)| (1.0 - 2.0 * b as f64) * l).sum()
    }

    #[test]
    fn full_list_is_maximum_likelihood() {
        let code = PolarCode::new(8, &[3, 5, 6, 7]).unwrap();
        let config = DecoderConfig::default();
        let codebook: Vec<Vec<u8>> = (0u32..16)
            .map(|w| {
                let info: Vec<u8> = (0..4).map(|b| ((w >> b) & 1) as u8).collect();
                code.encode(&info).unwrap()
            })
            .collect();
        let mut state = 7u64;
        for _ in 0..2000 {
            let llr: Vec<f64> = (0..8).map(|_| 6.0 * (xorshift(&mut state) - 0.5)).collect();
            let out = decode_scl(&code, &llr, 16, &config).unwrap();
            let best = codebook.iter().map(|c| ml_score(c, &llr)).fold(f64::MIN, f64::max);
            let got = ml_score(&out.codeword_est, &llr);
            assert!(got >= best - 1e-9, "SCL picked score {got}, ML best {best}");
        }
    }

    #[test]
    fn leaf_paths_cover_whole_codebook() {
        let code = construct_bhattacharyya(8, 3, 0.5).unwrap();
        let config = DecoderConfig::default();
        let llr = vec![config.llr_cap; 8];
        let paths = scl_leaf_paths(&code, &llr, 8, &config).unwrap();
        assert_eq!(paths.len(), 8);
        // all-zero codeword is the best path on a noiseless all-zero input
        assert_eq!(paths[0].codeword, vec![0u8; 8]);
        // every path re-encodes consistently
        for p in &paths {
            let mut u = p.u.clone();
            crate::polar::polar_transform(&mut u);
            assert_eq!(u, p.codeword);
        }
    }

    #[test]
    fn rejects_zero_list() {
        let code = PolarCode::new(4, &[1, 2, 3]).unwrap();
        assert!(matches!(
            decode_scl(&code, &[1.0; 4], 0, &DecoderConfig::default()),
            Err(DecodeError::EmptyList)
        ));
    }
}
