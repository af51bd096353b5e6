//! Conventional flooding decoders on a Tanner graph.
//!
//! Channel variables take their prior from the channel LLRs through the
//! graph's channel order; punctured variables start at zero; a channel
//! variable that pruning forced to zero gets a known-bit prior of
//! `+llr_cap`. Check updates use the exact boxplus rule
//! ([`decode_spa`]) or the scaled min-sum approximation ([`decode_nms`]).
//! Hard decisions over *all* variables are syndrome-checked every
//! iteration; the decoders stop as soon as every check is satisfied.

use super::{boxplus, clamp_llr, hard_decision, DecodeError, DecodeResult, DecoderConfig};
use crate::polar::PolarCode;
use crate::tanner::TannerGraph;

#[derive(Debug, Clone, Copy)]
enum CheckRule {
    Exact,
    MinSum { scale: f64 },
}

/// Precomputed flooding engine for one graph: edge layout in CSR form,
/// reusable across decode calls. Hold one engine per worker; a call
/// allocates only its own message scratch.
pub struct SpaEngine<'g> {
    graph: &'g TannerGraph,
    /// edge ids grouped by check: cn_edges[c] covers edges of check c
    cn_edge_start: Vec<usize>,
    /// variable of each edge, in check-major order
    edge_vn: Vec<usize>,
    /// edges incident to each variable (into the check-major array)
    vn_edges: Vec<Vec<usize>>,
    num_edges: usize,
}

impl<'g> SpaEngine<'g> {
    pub fn graph(&self) -> &'g TannerGraph {
        self.graph
    }

    pub fn new(graph: &'g TannerGraph) -> Self {
        let mut cn_edge_start = Vec::with_capacity(graph.num_cns() + 1);
        let mut edge_vn = Vec::new();
        let mut vn_edges = vec![Vec::new(); graph.num_vns()];
        for c in 0..graph.num_cns() {
            cn_edge_start.push(edge_vn.len());
            for &v in graph.cn_vars(c) {
                vn_edges[v].push(edge_vn.len());
                edge_vn.push(v);
            }
        }
        cn_edge_start.push(edge_vn.len());
        let num_edges = edge_vn.len();
        SpaEngine { graph, cn_edge_start, edge_vn, vn_edges, num_edges }
    }

    fn priors(&self, llr: &[f64], cap: f64) -> Result<Vec<f64>, DecodeError> {
        let graph = self.graph;
        if llr.len() != graph.channel_order().len() {
            return Err(DecodeError::LlrLengthMismatch {
                expected: graph.channel_order().len(),
                got: llr.len(),
            });
        }
        let mut prior = vec![0.0f64; graph.num_vns()];
        for (pos, &v) in graph.channel_order().iter().enumerate() {
            prior[v] = clamp_llr(llr[pos], cap);
        }
        for v in 0..graph.num_vns() {
            if graph.is_forced_zero(v) {
                prior[v] = cap;
            }
        }
        Ok(prior)
    }

    fn decode(
        &self,
        code: Option<&PolarCode>,
        llr: &[f64],
        config: &DecoderConfig,
        rule: CheckRule,
    ) -> Result<DecodeResult, DecodeError> {
        let graph = self.graph;
        let cap = config.llr_cap;
        let prior = self.priors(llr, cap)?;

        // v->c messages initialized to priors
        let mut var_msg: Vec<f64> = self.edge_vn.iter().map(|&v| prior[v]).collect();
        let mut chk_msg = vec![0.0f64; self.num_edges];
        let mut total = prior.clone();
        let mut hard: Vec<u8> = total.iter().map(|&t| hard_decision(t)).collect();

        let mut iterations_used = config.max_iters;
        let mut converged = false;
        let mut fwd: Vec<f64> = Vec::new();
        let mut bwd: Vec<f64> = Vec::new();
        for iter in 1..=config.max_iters {
            // check update: leave-one-out combine via forward/backward scans
            for c in 0..graph.num_cns() {
                let (s, e) = (self.cn_edge_start[c], self.cn_edge_start[c + 1]);
                let deg = e - s;
                if deg == 0 {
                    continue;
                }
                fwd.clear();
                fwd.resize(deg + 1, f64::INFINITY);
                bwd.clear();
                bwd.resize(deg + 1, f64::INFINITY);
                match rule {
                    CheckRule::Exact => {
                        // identity of boxplus is +infinity; fold pairwise
                        for k in 0..deg {
                            fwd[k + 1] = combine_exact(fwd[k], var_msg[s + k]);
                            bwd[deg - 1 - k] =
                                combine_exact(bwd[deg - k], var_msg[s + deg - 1 - k]);
                        }
                        for k in 0..deg {
                            chk_msg[s + k] = clamp_llr(combine_exact(fwd[k], bwd[k + 1]), cap);
                        }
                    }
                    CheckRule::MinSum { scale } => {
                        for k in 0..deg {
                            fwd[k + 1] = combine_minsum(fwd[k], var_msg[s + k]);
                            bwd[deg - 1 - k] =
                                combine_minsum(bwd[deg - k], var_msg[s + deg - 1 - k]);
                        }
                        for k in 0..deg {
                            let m = combine_minsum(fwd[k], bwd[k + 1]);
                            chk_msg[s + k] = clamp_llr(scale * m, cap);
                        }
                    }
                }
            }
            // variable update and posteriors
            total.copy_from_slice(&prior);
            for eid in 0..self.num_edges {
                total[self.edge_vn[eid]] += chk_msg[eid];
            }
            for v in 0..graph.num_vns() {
                total[v] = clamp_llr(total[v], cap);
            }
            for (eid, m) in var_msg.iter_mut().enumerate() {
                *m = clamp_llr(total[self.edge_vn[eid]] - chk_msg[eid], cap);
            }
            for (v, h) in hard.iter_mut().enumerate() {
                *h = hard_decision(total[v]);
            }
            if self.syndrome_clear(&hard) {
                iterations_used = iter;
                converged = true;
                break;
            }
        }

        let codeword_est: Vec<u8> = graph.channel_order().iter().map(|&v| hard[v]).collect();
        let info_est = match code {
            Some(code) if code.block_len() == codeword_est.len() => {
                code.extract_info(&codeword_est)
            }
            _ => Vec::new(),
        };
        Ok(DecodeResult {
            info_est,
            codeword_est,
            iterations_used,
            converged,
            path_metric: None,
        })
    }

    fn syndrome_clear(&self, hard: &[u8]) -> bool {
        for c in 0..self.graph.num_cns() {
            let (s, e) = (self.cn_edge_start[c], self.cn_edge_start[c + 1]);
            let parity = self.edge_vn[s..e].iter().fold(0u8, |acc, &v| acc ^ hard[v]);
            if parity != 0 {
                return false;
            }
        }
        true
    }
}

/// Pairwise boxplus with +infinity as the identity element.
#[inline]
fn combine_exact(acc: f64, m: f64) -> f64 {
    if acc.is_infinite() {
        m
    } else {
        boxplus(acc, m)
    }
}

/// Min-sum combine: product of signs, minimum of magnitudes.
#[inline]
fn combine_minsum(acc: f64, m: f64) -> f64 {
    if acc.is_infinite() {
        m
    } else {
        acc.signum() * m.signum() * acc.abs().min(m.abs())
    }
}

/// Flooding sum-product decoding on a (pruned) Tanner graph.
///
/// `code` enables information-bit recovery by re-encoding the estimated
/// codeword (the generator is self-inverse); pass `None` for graphs with
/// no known information set.
pub fn decode_spa(
    graph: &TannerGraph,
    code: Option<&PolarCode>,
    llr: &[f64],
    config: &DecoderConfig,
) -> Result<DecodeResult, DecodeError> {
    SpaEngine::new(graph).decode(code, llr, config, CheckRule::Exact)
}

/// Flooding decoding with the normalized min-sum check rule.
pub fn decode_nms(
    graph: &TannerGraph,
    code: Option<&PolarCode>,
    llr: &[f64],
    config: &DecoderConfig,
) -> Result<DecodeResult, DecodeError> {
    SpaEngine::new(graph).decode(code, llr, config, CheckRule::MinSum { scale: config.min_sum_scale })
}

impl<'g> SpaEngine<'g> {
    /// Exact-rule decode through a prebuilt engine.
    pub fn decode_spa(
        &self,
        code: Option<&PolarCode>,
        llr: &[f64],
        config: &DecoderConfig,
    ) -> Result<DecodeResult, DecodeError> {
        self.decode(code, llr, config, CheckRule::Exact)
    }

    /// Scaled-min-sum decode through a prebuilt engine.
    pub fn decode_nms(
        &self,
        code: Option<&PolarCode>,
        llr: &[f64],
        config: &DecoderConfig,
    ) -> Result<DecodeResult, DecodeError> {
        self.decode(code, llr, config, CheckRule::MinSum { scale: config.min_sum_scale })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::noiseless_llrs;
    use crate::polar::PolarCode;
    use crate::tanner::{full_bipartite, prune, stage_values, TannerGraph};

    fn p84_graph() -> (PolarCode, TannerGraph) {
        let code = PolarCode::new(8, &[3, 5, 6, 7]).unwrap();
        let graph = prune(&full_bipartite(&code));
        (code, graph)
    }

    #[test]
    fn single_check_hand_computed_posteriors() {
        // one check over two channel variables, priors (+5, -1):
        // the check passes each prior through to the other side, so the
        // totals are (5 - 1 + boxplus... ) = (+4, +4) and both decide 0
        let g = TannerGraph::from_adjacency(2, &[vec![0, 1]], &[false, false]);
        let out = decode_spa(&g, None, &[5.0, -1.0], &DecoderConfig::default()).unwrap();
        assert!(out.converged);
        assert_eq!(out.codeword_est, vec![0, 0]);
    }

    #[test]
    fn minsum_equals_exact_on_degree_two_check() {
        let g = TannerGraph::from_adjacency(2, &[vec![0, 1]], &[false, false]);
        let config = DecoderConfig { min_sum_scale: 1.0, max_iters: 1, ..Default::default() };
        let spa = decode_spa(&g, None, &[5.0, -1.0], &config).unwrap();
        let nms = decode_nms(&g, None, &[5.0, -1.0], &config).unwrap();
        assert_eq!(spa.codeword_est, nms.codeword_est);
    }

    #[test]
    fn noiseless_all_zero_converges_first_iteration() {
        let (code, graph) = p84_graph();
        let llr = noiseless_llrs(&[0u8; 8], 20.0);
        let out = decode_spa(&graph, Some(&code), &llr, &DecoderConfig::default()).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations_used, 1);
        assert_eq!(out.codeword_est, vec![0u8; 8]);
        assert_eq!(out.info_est, vec![0u8; 4]);

        let nms = decode_nms(&graph, Some(&code), &llr, &DecoderConfig::default()).unwrap();
        assert!(nms.converged);
        assert_eq!(nms.iterations_used, 1);
    }

    #[test]
    fn exhaustive_noiseless_codebook_p84() {
        let (code, graph) = p84_graph();
        let config = DecoderConfig::default();
        let engine = SpaEngine::new(&graph);
        for word in 0u32..16 {
            let info: Vec<u8> = (0..4).map(|b| ((word >> b) & 1) as u8).collect();
            let cw = code.encode(&info).unwrap();
            let llr = noiseless_llrs(&cw, 20.0);
            let out = engine.decode_spa(Some(&code), &llr, &config).unwrap();
            assert!(out.converged);
            assert_eq!(out.codeword_est, cw);
            assert_eq!(out.info_est, info);
        }
    }

    #[test]
    fn punctured_posteriors_match_forward_evaluation() {
        let (code, graph) = p84_graph();
        let config = DecoderConfig::default();
        let engine = SpaEngine::new(&graph);
        for word in 0u32..16 {
            let info: Vec<u8> = (0..4).map(|b| ((word >> b) & 1) as u8).collect();
            let mut u = vec![0u8; 8];
            for (&pos, &b) in code.info_set().iter().zip(&info) {
                u[pos] = b;
            }
            let expect = graph
                .assignment_from_stage_values(&stage_values(&code, &u))
                .unwrap();
            let cw = code.encode(&info).unwrap();
            let llr = noiseless_llrs(&cw, 20.0);
            // decode and read back every variable's hard decision
            let prior = engine.priors(&llr, config.llr_cap).unwrap();
            let _ = prior;
            let out = engine.decode_spa(Some(&code), &llr, &config).unwrap();
            assert!(out.converged);
            // channel assignment matches the forward evaluation
            for (pos, &v) in graph.channel_order().iter().enumerate() {
                assert_eq!(expect[v], cw[pos]);
            }
            assert_eq!(out.codeword_est, cw);
        }
    }

    #[test]
    fn rate_one_graph_converges_trivially() {
        let code = PolarCode::new(4, &[0, 1, 2, 3]).unwrap();
        let graph = prune(&full_bipartite(&code));
        assert_eq!(graph.num_cns(), 0);
        let out = decode_spa(&graph, Some(&code), &[1.0, -1.0, 0.5, -0.5], &DecoderConfig::default())
            .unwrap();
        assert!(out.converged);
        assert_eq!(out.codeword_est, vec![0, 1, 0, 1]);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let (_, graph) = p84_graph();
        assert!(decode_spa(&graph, None, &[0.0; 7], &DecoderConfig::default()).is_err());
    }

    #[test]
    fn extreme_inputs_stay_finite() {
        let (code, graph) = p84_graph();
        let config = DecoderConfig { max_iters: 50, ..Default::default() };
        let llr = [1e6, -1e6, 1e6, 1e6, -1e6, 0.0, -1e6, 1e6];
        let out = decode_spa(&graph, Some(&code), &llr, &config).unwrap();
        assert!(out.codeword_est.iter().all(|&b| b <= 1));
    }
}
