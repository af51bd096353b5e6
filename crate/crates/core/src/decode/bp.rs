//! Iterative belief propagation on the stage-structured encoder graph.
//!
//! Messages live on a `(n+1) × N` grid: `r[s][i]` flows rightward into
//! column `s`, `l[s][i]` leftward. Each butterfly couples
//! `(s,i), (s,i+2^s), (s+1,i), (s+1,i+2^s)` through the check
//! `x_up = u_up ⊕ u_low` with the lower wire shared. One iteration is a
//! full right-going pass followed by a full left-going pass (flooding).

use super::{boxplus, clamp_llr, hard_decision, DecodeError, DecodeResult, DecoderConfig};
use crate::polar::PolarCode;

pub fn decode_bp(
    code: &PolarCode,
    llr: &[f64],
    config: &DecoderConfig,
) -> Result<DecodeResult, DecodeError> {
    let n = code.block_len();
    if llr.len() != n {
        return Err(DecodeError::LlrLengthMismatch { expected: n, got: llr.len() });
    }
    let stages = code.stages();
    let cap = config.llr_cap;

    // r[0]: priors on the u side; l[stages]: channel LLRs
    let mut r = vec![vec![0.0f64; n]; stages + 1];
    let mut l = vec![vec![0.0f64; n]; stages + 1];
    for i in 0..n {
        r[0][i] = if code.is_frozen(i) { cap } else { 0.0 };
        l[stages][i] = clamp_llr(llr[i], cap);
    }

    let mut iterations_used = config.max_iters;
    let mut converged = false;
    let mut u_hat = vec![0u8; n];
    let mut x_hat = vec![0u8; n];
    for iter in 1..=config.max_iters {
        // right-going pass
        for s in 0..stages {
            let stride = 1 << s;
            for i in 0..n {
                if (i >> s) & 1 == 1 {
                    continue;
                }
                let (a, b) = (r[s][i], r[s][i + stride]);
                let (lc, ld) = (l[s + 1][i], l[s + 1][i + stride]);
                r[s + 1][i] = clamp_llr(boxplus(a, b + ld), cap);
                r[s + 1][i + stride] = clamp_llr(b + boxplus(a, lc), cap);
            }
        }
        // left-going pass
        for s in (0..stages).rev() {
            let stride = 1 << s;
            for i in 0..n {
                if (i >> s) & 1 == 1 {
                    continue;
                }
                let (a, b) = (r[s][i], r[s][i + stride]);
                let (lc, ld) = (l[s + 1][i], l[s + 1][i + stride]);
                l[s][i] = clamp_llr(boxplus(lc, b + ld), cap);
                l[s][i + stride] = clamp_llr(ld + boxplus(a, lc), cap);
            }
        }
        for i in 0..n {
            u_hat[i] = if code.is_frozen(i) { 0 } else { hard_decision(r[0][i] + l[0][i]) };
            x_hat[i] = hard_decision(r[stages][i] + l[stages][i]);
        }
        let reencoded = code.transform(&u_hat);
        if reencoded == x_hat {
            iterations_used = iter;
            converged = true;
            break;
        }
    }

    let codeword_est = code.transform(&u_hat);
    let info_est = code.info_set().iter().map(|&i| u_hat[i]).collect();
    Ok(DecodeResult {
        info_est,
        codeword_est,
        iterations_used,
        converged,
        path_metric: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::noiseless_llrs;
    use crate::polar::construct_bhattacharyya;

    #[test]
    fn noiseless_converges_first_iteration() {
        let code = construct_bhattacharyya(16, 8, 0.5).unwrap();
        let config = DecoderConfig::default();
        for word in [0u32, 3, 150, 255] {
            let info: Vec<u8> = (0..8).map(|b| ((word >> b) & 1) as u8).collect();
            let cw = code.encode(&info).unwrap();
            let out = decode_bp(&code, &noiseless_llrs(&cw, 20.0), &config).unwrap();
            assert!(out.converged);
            assert_eq!(out.iterations_used, 1);
            assert_eq!(out.info_est, info);
            assert_eq!(out.codeword_est, cw);
        }
    }

    #[test]
    fn repetition_code_is_map_sum() {
        // P(2,1): the decision equals the sign of llr1 + llr2
        let code = PolarCode::new(2, &[1]).unwrap();
        let config = DecoderConfig::default();
        for (a, b) in [(2.0, -0.5), (-2.0, 0.5), (-1.0, -1.0), (3.0, 3.0), (1.0, -1.0)] {
            let out = decode_bp(&code, &[a, b], &config).unwrap();
            let map_bit = ((a + b) < 0.0) as u8;
            assert_eq!(out.info_est, vec![map_bit], "llrs ({a},{b})");
        }
    }

    #[test]
    fn no_nan_for_extreme_inputs() {
        let code = construct_bhattacharyya(8, 4, 0.5).unwrap();
        let config = DecoderConfig { max_iters: 20, ..DecoderConfig::default() };
        let out = decode_bp(&code, &[1e6, -1e6, 1e6, -1e6, 0.0, 1e6, -1e6, 1e6], &config).unwrap();
        assert!(out.codeword_est.iter().all(|&b| b <= 1));
    }
}
