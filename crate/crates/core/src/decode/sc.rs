//! Successive cancellation decoding.

use super::{boxplus, clamp_llr, hard_decision, DecodeError, DecodeResult, DecoderConfig};
use crate::polar::PolarCode;

/// Standard recursive SC decode with the exact boxplus kernel.
pub fn decode_sc(
    code: &PolarCode,
    llr: &[f64],
    config: &DecoderConfig,
) -> Result<DecodeResult, DecodeError> {
    let n = code.block_len();
    if llr.len() != n {
        return Err(DecodeError::LlrLengthMismatch { expected: n, got: llr.len() });
    }
    let cap = config.llr_cap;
    let clamped: Vec<f64> = llr.iter().map(|&x| clamp_llr(x, cap)).collect();
    let frozen: Vec<bool> = (0..n).map(|i| code.is_frozen(i)).collect();
    let u = sc_recurse(&clamped, &frozen, cap);
    let codeword_est = code.transform(&u);
    let info_est = code.info_set().iter().map(|&i| u[i]).collect();
    Ok(DecodeResult {
        info_est,
        codeword_est,
        iterations_used: 1,
        converged: true,
        path_metric: None,
    })
}

fn sc_recurse(llr: &[f64], frozen: &[bool], cap: f64) -> Vec<u8> {
    let n = llr.len();
    if n == 1 {
        return vec![if frozen[0] { 0 } else { hard_decision(llr[0]) }];
    }
    let half = n / 2;
    let f_llr: Vec<f64> = (0..half)
        .map(|i| clamp_llr(boxplus(llr[i], llr[i + half]), cap))
        .collect();
    let u_left = sc_recurse(&f_llr, &frozen[..half], cap);

    // partial sums of the left half drive the g function
    let mut v_left = u_left.clone();
    crate::polar::polar_transform(&mut v_left);
    let g_llr: Vec<f64> = (0..half)
        .map(|i| {
            let sign = 1.0 - 2.0 * v_left[i] as f64;
            clamp_llr(llr[i + half] + sign * llr[i], cap)
        })
        .collect();
    let u_right = sc_recurse(&g_llr, &frozen[half..], cap);

    let mut u = u_left;
    u.extend_from_slice(&u_right);
    u
}
