//! Polar codes decoded as LDPC codes.
//!
//! This crate builds polar codes, derives their dense and sparse (Tanner
//! graph) parity-check representations, prunes the sparse graph down to a
//! form a conventional flooding sum-product decoder can use, and searches
//! for better information sets with a genetic algorithm whose fitness is
//! the measured error rate of that decoder.
//!
//! The pieces fit together as a pipeline:
//!
//! 1. [`polar`] — code construction (Bhattacharyya, 5G reliability
//!    sequence) and `O(N log N)` encoding.
//! 2. [`tanner`] — unrolled factor graph, bipartite re-grouping, pruning
//!    to fixpoint, structural diagnostics, alist I/O.
//! 3. [`decode`] — SC, SC list, factor-graph BP, and flooding SPA /
//!    normalized min-sum on the pruned graph.
//! 4. [`sim`] — seeded BPSK/AWGN Monte-Carlo BER/BLER harness,
//!    deterministic for any worker count.
//! 5. [`genalg`] — decoder-in-the-loop information-set optimization.
//! 6. [`spectrum`] — minimum-distance estimation, brute force and
//!    list-decoder based.

pub mod channel;
pub mod decode;
pub mod genalg;
pub mod gf2;
pub mod polar;
pub mod sim;
pub mod spectrum;
pub mod tanner;

mod par;

pub use polar::{GeneratorMatrix, PolarCode};
pub use tanner::{DenseParityCheck, TannerGraph};
pub use tanner::GraphStats;
