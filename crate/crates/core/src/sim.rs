//! Seeded Monte-Carlo BER/BLER harness.
//!
//! Every frame draws its own random stream keyed by
//! `(seed, snr_index, frame_index)`, so the results are bit-identical no
//! matter how frames are scheduled: serial, rayon, any worker count.
//! Early stopping follows serial semantics — a point stops at the first
//! frame index where the cumulative block-error count reaches the
//! target, and frames are only counted up to that index.

use crate::channel::{domain, sigma_from_ebn0, substream, transmit};
use crate::decode::{
    decode_bp, decode_sc, decode_scl, DecodeResult, DecoderConfig, SpaEngine,
};
use crate::gf2::BitMatrix;
use crate::par;
use crate::polar::PolarCode;
use crate::tanner::TannerGraph;
use rand::Rng;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("decoder {0} requires a polar code (information set)")]
    MissingCode(&'static str),
    #[error("decoder {0} requires a Tanner graph")]
    MissingGraph(&'static str),
    #[error("graph has {graph} channel variables but the code has N={code}")]
    GraphCodeMismatch { graph: usize, code: usize },
    #[error("no SNR points given")]
    NoSnrPoints,
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

/// Decoder selection for the harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Sc,
    Scl,
    Bp,
    Spa,
    Nms,
}

impl DecoderKind {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::Sc => "sc",
            DecoderKind::Scl => "scl",
            DecoderKind::Bp => "bp",
            DecoderKind::Spa => "spa",
            DecoderKind::Nms => "nms",
        }
    }

    pub fn needs_graph(&self) -> bool {
        matches!(self, DecoderKind::Spa | DecoderKind::Nms)
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sc" => Ok(DecoderKind::Sc),
            "scl" => Ok(DecoderKind::Scl),
            "bp" => Ok(DecoderKind::Bp),
            "spa" => Ok(DecoderKind::Spa),
            "nms" => Ok(DecoderKind::Nms),
            other => Err(format!("unknown decoder {other:?} (expected sc|scl|bp|spa|nms)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Eb/N0 points in dB.
    pub snr_points_db: Vec<f64>,
    pub max_frames: u64,
    pub target_block_errors: u64,
    pub seed: u64,
    pub decoder: DecoderKind,
    pub decoder_config: DecoderConfig,
}

impl SimConfig {
    pub fn new(snr_points_db: Vec<f64>, decoder: DecoderKind) -> Self {
        SimConfig {
            snr_points_db,
            max_frames: 100_000,
            target_block_errors: 100,
            seed: 0,
            decoder,
            decoder_config: DecoderConfig::default(),
        }
    }
}

/// Accumulated counts for one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub block_errors: u64,
    pub ber: f64,
    pub bler: f64,
    pub mean_iters: f64,
    /// Wall-clock seconds; informational, never serialized to CSV rows.
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub info_len: usize,
    pub block_len: usize,
    pub points: Vec<SnrPoint>,
}

struct FrameOutcome {
    bit_errors: u32,
    block_error: bool,
    iterations: u32,
}

/// Number of data bits a standalone graph carries: the dimension of the
/// channel projection of its solution space.
pub fn graph_code_dimension(graph: &TannerGraph) -> usize {
    let basis = graph.solution_space_matrix().null_space();
    let n = graph.channel_order().len();
    let mut proj = BitMatrix::zero(basis.rows(), n);
    for b in 0..basis.rows() {
        for (pos, &v) in graph.channel_order().iter().enumerate() {
            if basis.get(b, v) {
                proj.set(b, pos, true);
            }
        }
    }
    proj.rank()
}

/// Run the Monte-Carlo sweep. `code` and/or `graph` must match the
/// decoder: SC/SCL/BP need the code, SPA/NMS need the graph (with the
/// code optional but recommended, enabling info-bit error counting).
pub fn run_montecarlo(
    code: Option<&PolarCode>,
    graph: Option<&TannerGraph>,
    config: &SimConfig,
) -> Result<SimResult, SimError> {
    run_with_mapper(code, graph, config, map_parallel)
}

/// Identical semantics to [`run_montecarlo`] but forced single-threaded;
/// exists so benchmarks and determinism tests can compare scheduling.
pub fn run_montecarlo_serial(
    code: Option<&PolarCode>,
    graph: Option<&TannerGraph>,
    config: &SimConfig,
) -> Result<SimResult, SimError> {
    run_with_mapper(code, graph, config, map_serial)
}

type FrameFn<'a> = &'a (dyn Fn(usize) -> FrameOutcome + Send + Sync);

fn map_parallel(n: usize, f: FrameFn<'_>) -> Vec<FrameOutcome> {
    par::map_indexed(n, f)
}

fn map_serial(n: usize, f: FrameFn<'_>) -> Vec<FrameOutcome> {
    par::map_indexed_serial(n, f)
}

fn run_with_mapper(
    code: Option<&PolarCode>,
    graph: Option<&TannerGraph>,
    config: &SimConfig,
    mapper: for<'a> fn(usize, FrameFn<'a>) -> Vec<FrameOutcome>,
) -> Result<SimResult, SimError> {
    if config.snr_points_db.is_empty() {
        return Err(SimError::NoSnrPoints);
    }
    if config.max_frames == 0 || config.target_block_errors == 0 {
        return Err(SimError::BadConfig("max_frames and target_block_errors must be ≥ 1".into()));
    }
    let kind = config.decoder;
    if kind.needs_graph() && graph.is_none() {
        return Err(SimError::MissingGraph(kind.name()));
    }
    if !kind.needs_graph() && code.is_none() {
        return Err(SimError::MissingCode(kind.name()));
    }
    if let (Some(c), Some(g)) = (code, graph) {
        if g.channel_order().len() != c.block_len() {
            return Err(SimError::GraphCodeMismatch {
                graph: g.channel_order().len(),
                code: c.block_len(),
            });
        }
    }

    let engine = graph.map(SpaEngine::new);
    let block_len = code
        .map(|c| c.block_len())
        .or_else(|| graph.map(|g| g.channel_order().len()))
        .expect("code or graph present");
    let info_len = match code {
        Some(c) => c.info_len(),
        None => graph_code_dimension(graph.expect("graph present")),
    };
    if info_len == 0 {
        return Err(SimError::BadConfig("code carries no information bits".into()));
    }
    let rate = info_len as f64 / block_len as f64;

    let mut points = Vec::with_capacity(config.snr_points_db.len());
    for (snr_idx, &snr_db) in config.snr_points_db.iter().enumerate() {
        let start = Instant::now();
        let sigma = sigma_from_ebn0(snr_db, rate);
        let simulate = |frame_idx: usize| -> FrameOutcome {
            simulate_frame(
                code,
                engine.as_ref(),
                kind,
                &config.decoder_config,
                info_len,
                sigma,
                config.seed,
                snr_idx as u64,
                frame_idx as u64,
            )
        };

        let mut frames = 0u64;
        let mut bit_errors = 0u64;
        let mut block_errors = 0u64;
        let mut iter_sum = 0u64;
        const CHUNK: u64 = 1024;
        'point: while frames < config.max_frames {
            let todo = CHUNK.min(config.max_frames - frames) as usize;
            let base = frames;
            let outcomes = mapper(todo, &|i| simulate(base as usize + i));
            for out in outcomes {
                frames += 1;
                bit_errors += out.bit_errors as u64;
                block_errors += out.block_error as u64;
                iter_sum += out.iterations as u64;
                if block_errors >= config.target_block_errors {
                    break 'point;
                }
            }
        }
        points.push(SnrPoint {
            snr_db,
            frames,
            bit_errors,
            block_errors,
            ber: bit_errors as f64 / (frames as f64 * info_len as f64),
            bler: block_errors as f64 / frames as f64,
            mean_iters: iter_sum as f64 / frames as f64,
            wall_time_s: start.elapsed().as_secs_f64(),
        });
    }
    Ok(SimResult { info_len, block_len, points })
}

#[allow(clippy::too_many_arguments)]
fn simulate_frame(
    code: Option<&PolarCode>,
    engine: Option<&SpaEngine>,
    kind: DecoderKind,
    dcfg: &DecoderConfig,
    info_len: usize,
    sigma: f64,
    seed: u64,
    snr_idx: u64,
    frame_idx: u64,
) -> FrameOutcome {
    let mut rng = substream(seed, &[domain::SIM, snr_idx, frame_idx]);
    let (info, codeword): (Vec<u8>, Vec<u8>) = match code {
        Some(c) => {
            let info: Vec<u8> = (0..c.info_len()).map(|_| rng.gen::<bool>() as u8).collect();
            let cw = c.encode(&info).expect("length matches by construction");
            (info, cw)
        }
        None => {
            // graph-only mode: all-zero codeword of the linear code
            let n = engine.expect("graph mode").channel_len();
            (Vec::new(), vec![0u8; n])
        }
    };
    let llr = transmit(&codeword, sigma, &mut rng);
    let result: DecodeResult = match kind {
        DecoderKind::Sc => decode_sc(code.expect("checked"), &llr, dcfg).expect("validated"),
        DecoderKind::Scl => {
            decode_scl(code.expect("checked"), &llr, dcfg.list_size.max(1), dcfg).expect("validated")
        }
        DecoderKind::Bp => decode_bp(code.expect("checked"), &llr, dcfg).expect("validated"),
        DecoderKind::Spa => engine
            .expect("checked")
            .decode_spa(code, &llr, dcfg)
            .expect("validated"),
        DecoderKind::Nms => engine
            .expect("checked")
            .decode_nms(code, &llr, dcfg)
            .expect("validated"),
    };
    let (bit_errors, block_error) = if code.is_some() {
        let errs = result
            .info_est
            .iter()
            .zip(&info)
            .filter(|(a, b)| a != b)
            .count() as u32;
        (errs, errs > 0)
    } else {
        // compare decoded codeword against the all-zero transmission,
        // restricted to the info-bit budget for BER accounting
        let errs = result.codeword_est.iter().filter(|&&b| b == 1).count() as u32;
        (errs.min(info_len as u32), errs > 0)
    };
    FrameOutcome { bit_errors, block_error, iterations: result.iterations_used as u32 }
}

/// Render a simulation result as CSV. Header comments carry the exact
/// reproduction parameters; data rows are deterministic so identical
/// configs produce byte-identical files.
pub fn to_csv(result: &SimResult, config: &SimConfig, code_desc: &str, build: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("# polarldpc simulate ({build})\n"));
    out.push_str(&format!("# code: {code_desc}\n"));
    out.push_str(&format!(
        "# decoder: {} max_iters={} list_size={} llr_cap={} min_sum_scale={}\n",
        config.decoder.name(),
        config.decoder_config.max_iters,
        config.decoder_config.list_size,
        config.decoder_config.llr_cap,
        config.decoder_config.min_sum_scale,
    ));
    out.push_str(&format!("# seed: {}\n", config.seed));
    out.push_str(&format!(
        "# max_frames: {} target_block_errors: {}\n",
        config.max_frames, config.target_block_errors
    ));
    out.push_str("# snr axis: Eb/N0 in dB, unit-energy BPSK, sigma^2 = 1/(2*R*10^(dB/10))\n");
    out.push_str("snr_db,frames,bit_errors,block_errors,ber,bler,mean_iters\n");
    for p in &result.points {
        out.push_str(&format!(
            "{:.3},{},{},{},{:.6e},{:.6e},{:.4}\n",
            p.snr_db, p.frames, p.bit_errors, p.block_errors, p.ber, p.bler, p.mean_iters
        ));
    }
    out
}

impl SpaEngine<'_> {
    fn channel_len(&self) -> usize {
        self.graph().channel_order().len()
    }
}
