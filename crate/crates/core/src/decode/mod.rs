//! Decoding algorithms.
//!
//! Two families: successive cancellation ([`decode_sc`], [`decode_scl`])
//! working on the code directly, and message passing — [`decode_bp`] on
//! the stage-structured encoder factor graph, [`decode_spa`] /
//! [`decode_nms`] as conventional flooding decoders on a pruned
//! [`TannerGraph`](crate::tanner::TannerGraph).
//!
//! LLR convention throughout: `llr = log(P(bit=0) / P(bit=1))`, so
//! positive means zero. Ties (`llr == 0`) decide to bit 0. All message
//! updates saturate at `±llr_cap`, which keeps every quantity finite for
//! arbitrary finite input.

mod bp;
mod sc;
mod scl;
mod spa;

pub use bp::decode_bp;
pub use sc::decode_sc;
pub use scl::{decode_scl, scl_leaf_paths, SclPath};
pub use spa::{decode_nms, decode_spa, SpaEngine};

use thiserror::Error;

pub const DEFAULT_LLR_CAP: f64 = 40.0;
pub const DEFAULT_MAX_ITERS: usize = 200;
pub const DEFAULT_MIN_SUM_SCALE: f64 = 0.75;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("expected {expected} channel LLRs, got {got}")]
    LlrLengthMismatch { expected: usize, got: usize },
    #[error("list size must be at least 1")]
    EmptyList,
}

/// Knobs shared by the decoders; not every field applies to every one.
#[derive(Debug, Clone)]
pub struct DecoderConfig {
    /// Iteration budget for the message-passing decoders.
    pub max_iters: usize,
    /// List size for [`decode_scl`].
    pub list_size: usize,
    /// Saturation magnitude for every LLR-domain quantity.
    pub llr_cap: f64,
    /// Check-node scaling for [`decode_nms`].
    pub min_sum_scale: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            max_iters: DEFAULT_MAX_ITERS,
            list_size: 1,
            llr_cap: DEFAULT_LLR_CAP,
            min_sum_scale: DEFAULT_MIN_SUM_SCALE,
        }
    }
}

/// Outcome of one decode call.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Estimated information bits (empty when the decoder has no
    /// information-set knowledge, e.g. SPA on an imported graph).
    pub info_est: Vec<u8>,
    pub codeword_est: Vec<u8>,
    pub iterations_used: usize,
    pub converged: bool,
    /// Path metric of the selected path (list decoding only).
    pub path_metric: Option<f64>,
}

#[inline]
pub fn clamp_llr(x: f64, cap: f64) -> f64 {
    x.clamp(-cap, cap)
}

/// Hard decision: nonnegative LLR decides 0.
#[inline]
pub fn hard_decision(llr: f64) -> u8 {
    (llr < 0.0) as u8
}

/// Exact pairwise boxplus `2·atanh(tanh(a/2)·tanh(b/2))` in the
/// numerically stable sign/magnitude form.
#[inline]
pub fn boxplus(a: f64, b: f64) -> f64 {
    let sign = a.signum() * b.signum();
    let m = a.abs().min(b.abs());
    sign * m + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

/// `softplus(-x) = ln(1 + exp(-x))`, stable for both signs.
#[inline]
pub fn softplus_neg(x: f64) -> f64 {
    if x >= 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boxplus_matches_tanh_form() {
        let naive = |a: f64, b: f64| 2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh();
        for (a, b) in [(0.5, 1.5), (-2.0, 3.0), (4.0, -4.0), (0.1, -0.2), (6.0, 6.0)] {
            assert!((boxplus(a, b) - naive(a, b)).abs() < 1e-9, "({a},{b})");
        }
    }

    #[test]
    fn boxplus_zero_annihilates() {
        assert_eq!(boxplus(0.0, 5.0), 0.0);
        assert_eq!(boxplus(-3.0, 0.0), 0.0);
    }

    #[test]
    fn boxplus_degree_two_passthrough() {
        // 2·atanh(tanh(2.5)) = 5 up to saturation effects
        assert!((boxplus(5.0, 1e9_f64.min(700.0)) - 5.0).abs() < 1e-6);
    }

    #[test]
    fn boxplus_no_nan_for_extremes() {
        for &a in &[1e6, -1e6, 0.0, 1e-12] {
            for &b in &[1e6, -1e6, 0.0, -1e-12] {
                assert!(boxplus(a, b).is_finite(), "({a},{b})");
            }
        }
    }

    #[test]
    fn softplus_neg_is_stable() {
        assert!((softplus_neg(0.0) - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((softplus_neg(800.0) - 0.0).abs() < 1e-12);
        assert!((softplus_neg(-800.0) - 800.0).abs() < 1e-9);
    }

    #[test]
    fn hard_decision_tie_is_zero() {
        assert_eq!(hard_decision(0.0), 0);
        assert_eq!(hard_decision(1e-30), 0);
        assert_eq!(hard_decision(-1e-30), 1);
    }
}
