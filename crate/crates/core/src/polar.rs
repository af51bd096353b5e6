//! Polar code construction, generator-matrix algebra and encoding.
//!
//! A code is described by its block length `N = 2^n` and the information
//! set `A` of positions that carry data; the remaining positions are
//! frozen to zero. Encoding is the `O(N log N)` butterfly transform; the
//! dense generator matrix is only materialized on demand (tests, parity
//! checks, spectrum oracles).
//!
//! Indices are 0-based throughout the API. The on-disk info-set format
//! and everything user-facing is 1-based; conversion happens in
//! [`write_info_set`] / [`read_info_set`].

use crate::gf2::BitMatrix;
use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;
use thiserror::Error;

/// Largest supported block length. The embedded reliability sequence and
/// the dense-matrix helpers are sized for this.
pub const MAX_BLOCK_LEN: usize = 1024;

#[derive(Debug, Error)]
pub enum PolarError {
    #[error("block length {0} is not a power of 2 in 2..={MAX_BLOCK_LEN}")]
    InvalidBlockLength(usize),
    #[error("information length {k} out of range for N={n}")]
    InvalidInfoLength { n: usize, k: usize },
    #[error("information set invalid: {0}")]
    InvalidInfoSet(String),
    #[error("5G sequence construction supports N in 32..=1024, got {0}")]
    UnsupportedFiveGLength(usize),
    #[error("expected {expected} info bits, got {got}")]
    InfoLengthMismatch { expected: usize, got: usize },
    #[error("design erasure probability must be in (0,1), got {0}")]
    InvalidErasure(f64),
    #[error("info-set file, line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A polar code `P(N, K)`: block length, information set, frozen set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolarCode {
    block_len: usize,
    stages: usize,
    info_set: Vec<usize>,
    frozen_set: Vec<usize>,
}

impl PolarCode {
    /// Build a code from an explicit information set (0-based indices).
    pub fn new(block_len: usize, info_set: &[usize]) -> Result<Self, PolarError> {
        if !block_len.is_power_of_two() || block_len < 2 || block_len > MAX_BLOCK_LEN {
            return Err(PolarError::InvalidBlockLength(block_len));
        }
        let set: BTreeSet<usize> = info_set.iter().copied().collect();
        if set.len() != info_set.len() {
            return Err(PolarError::InvalidInfoSet("duplicate indices".into()));
        }
        if set.is_empty() || set.len() > block_len {
            return Err(PolarError::InvalidInfoLength { n: block_len, k: set.len() });
        }
        if let Some(&max) = set.iter().next_back() {
            if max >= block_len {
                return Err(PolarError::InvalidInfoSet(format!(
                    "index {max} out of range for N={block_len}"
                )));
            }
        }
        let info_set: Vec<usize> = set.iter().copied().collect();
        let frozen_set: Vec<usize> = (0..block_len).filter(|i| !set.contains(i)).collect();
        Ok(PolarCode {
            block_len,
            stages: block_len.trailing_zeros() as usize,
            info_set,
            frozen_set,
        })
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn info_len(&self) -> usize {
        self.info_set.len()
    }

    /// Number of polarization stages, `log2(N)`.
    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn rate(&self) -> f64 {
        self.info_set.len() as f64 / self.block_len as f64
    }

    /// Information positions, 0-based, ascending.
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    /// Frozen positions, 0-based, ascending.
    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    pub fn is_frozen(&self, pos: usize) -> bool {
        self.info_set.binary_search(&pos).is_err()
    }

    /// Encode `info_bits` (values 0/1) into a length-N codeword.
    pub fn encode(&self, info_bits: &[u8]) -> Result<Vec<u8>, PolarError> {
        if info_bits.len() != self.info_set.len() {
            return Err(PolarError::InfoLengthMismatch {
                expected: self.info_set.len(),
                got: info_bits.len(),
            });
        }
        let mut u = vec![0u8; self.block_len];
        for (&pos, &bit) in self.info_set.iter().zip(info_bits) {
            u[pos] = bit & 1;
        }
        polar_transform(&mut u);
        Ok(u)
    }

    /// Apply the polar transform to a full-length u-vector. Since the
    /// transform is self-inverse over GF(2), this also maps a codeword
    /// back to its u-vector.
    pub fn transform(&self, word: &[u8]) -> Vec<u8> {
        assert_eq!(word.len(), self.block_len);
        let mut x = word.to_vec();
        polar_transform(&mut x);
        x
    }

    /// Recover the info bits of a codeword by re-encoding (`G` is
    /// self-inverse) and reading off the information positions.
    pub fn extract_info(&self, codeword: &[u8]) -> Vec<u8> {
        let u = self.transform(codeword);
        self.info_set.iter().map(|&i| u[i]).collect()
    }
}

/// In-place butterfly computing `x = u · G_N` with `G_N` the n-fold
/// Kronecker power of [[1,0],[1,1]] in natural (non bit-reversed) order.
pub fn polar_transform(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut stride = 1;
    while stride < n {
        let mut base = 0;
        while base < n {
            for i in base..base + stride {
                bits[i] ^= bits[i + stride];
            }
            base += 2 * stride;
        }
        stride *= 2;
    }
}

/// The dense polar generator matrix `G_{2^n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    n: usize,
    matrix: BitMatrix,
}

impl GeneratorMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn row_support(&self, r: usize) -> Vec<usize> {
        self.matrix.row_support(r)
    }

    pub fn col_support(&self, c: usize) -> Vec<usize> {
        self.matrix.col_support(c)
    }

    /// `u · G` over GF(2).
    pub fn encode(&self, u: &[u8]) -> Vec<u8> {
        self.matrix.vec_mul(u)
    }
}

/// Build `G_{2^n}` in natural row order. Entry (i, j) is 1 iff the bits
/// of j are a subset of the bits of i.
pub fn kron_generator(stages: usize) -> GeneratorMatrix {
    let n = 1usize << stages;
    assert!(n <= MAX_BLOCK_LEN, "generator capped at N={MAX_BLOCK_LEN}");
    let mut m = BitMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            if j & i == j {
                m.set(i, j, true);
            }
        }
    }
    GeneratorMatrix { n, matrix: m }
}

/// Bhattacharyya parameters of the N synthesized channels of a BEC with
/// erasure probability `eps`, in natural order.
pub fn bhattacharyya_parameters(block_len: usize, eps: f64) -> Vec<f64> {
    let mut z = vec![eps];
    while z.len() < block_len {
        let mut next = Vec::with_capacity(z.len() * 2);
        for &zi in &z {
            next.push(2.0 * zi - zi * zi); // minus transform
            next.push(zi * zi); // plus transform
        }
        z = next;
    }
    z
}

/// Information set of the K channels with the smallest Bhattacharyya
/// parameter after `log2(N)` polarization levels of a BEC(`eps`).
/// Ties break toward the larger index.
pub fn construct_bhattacharyya(
    block_len: usize,
    info_len: usize,
    design_erasure: f64,
) -> Result<PolarCode, PolarError> {
    if !(0.0..=1.0).contains(&design_erasure) || design_erasure == 0.0 || design_erasure == 1.0 {
        return Err(PolarError::InvalidErasure(design_erasure));
    }
    if !block_len.is_power_of_two() || block_len < 2 || block_len > MAX_BLOCK_LEN {
        return Err(PolarError::InvalidBlockLength(block_len));
    }
    if info_len == 0 || info_len > block_len {
        return Err(PolarError::InvalidInfoLength { n: block_len, k: info_len });
    }
    let z = bhattacharyya_parameters(block_len, design_erasure);
    let mut order: Vec<usize> = (0..block_len).collect();
    order.sort_by(|&a, &b| {
        z[a].partial_cmp(&z[b])
            .expect("Bhattacharyya parameters are finite")
            .then(b.cmp(&a))
    });
    PolarCode::new(block_len, &order[..info_len])
}

/// Reliability sequence from the embedded 5G asset: indices 0..1023 in
/// increasing reliability order (most reliable last).
pub fn reliability_sequence() -> &'static [usize] {
    static SEQ: OnceLock<Vec<usize>> = OnceLock::new();
    SEQ.get_or_init(|| {
        parse_reliability_asset(include_str!("../assets/nr_reliability_1024.txt"))
            .expect("embedded reliability asset is well-formed")
    })
}

/// Parse a reliability-sequence asset: one 1-based index per line, most
/// reliable last. Returns 0-based indices.
pub fn parse_reliability_asset(text: &str) -> Result<Vec<usize>, PolarError> {
    let mut seq = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: usize = line.parse().map_err(|_| PolarError::ParseError {
            line: lineno + 1,
            msg: format!("expected an index, got {line:?}"),
        })?;
        if v == 0 {
            return Err(PolarError::ParseError {
                line: lineno + 1,
                msg: "indices are 1-based".into(),
            });
        }
        seq.push(v - 1);
    }
    let n = seq.len();
    let mut seen = vec![false; n];
    for &v in &seq {
        if v >= n || seen[v] {
            return Err(PolarError::ParseError {
                line: 0,
                msg: format!("sequence is not a permutation of 1..={n}"),
            });
        }
        seen[v] = true;
    }
    Ok(seq)
}

/// Information set per the embedded nested reliability sequence: the K
/// most reliable indices among those below N.
pub fn construct_5g(block_len: usize, info_len: usize) -> Result<PolarCode, PolarError> {
    if !(32..=1024).contains(&block_len) || !block_len.is_power_of_two() {
        return Err(PolarError::UnsupportedFiveGLength(block_len));
    }
    if info_len == 0 || info_len > block_len {
        return Err(PolarError::InvalidInfoLength { n: block_len, k: info_len });
    }
    let filtered: Vec<usize> = reliability_sequence()
        .iter()
        .copied()
        .filter(|&i| i < block_len)
        .collect();
    debug_assert_eq!(filtered.len(), block_len);
    PolarCode::new(block_len, &filtered[block_len - info_len..])
}

/// Serialize an info set: line 1 `N K`, line 2 the 1-based information
/// indices, ascending.
pub fn format_info_set(code: &PolarCode) -> String {
    let idx: Vec<String> = code.info_set.iter().map(|&i| (i + 1).to_string()).collect();
    format!("{} {}\n{}\n", code.block_len, code.info_set.len(), idx.join(" "))
}

pub fn write_info_set(code: &PolarCode, path: &Path) -> Result<(), PolarError> {
    std::fs::write(path, format_info_set(code))?;
    Ok(())
}

/// Parse the info-set file format produced by [`format_info_set`].
pub fn parse_info_set(text: &str) -> Result<PolarCode, PolarError> {
    let mut lines = text.lines().enumerate();
    let (lineno, header) = lines
        .next()
        .ok_or(PolarError::ParseError { line: 1, msg: "empty file".into() })?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(PolarError::ParseError { line: lineno + 1, msg: "expected `N K`".into() })?;
    let k: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(PolarError::ParseError { line: lineno + 1, msg: "expected `N K`".into() })?;
    if parts.next().is_some() {
        return Err(PolarError::ParseError {
            line: lineno + 1,
            msg: "trailing tokens after `N K`".into(),
        });
    }
    let (lineno, body) = lines
        .next()
        .ok_or(PolarError::ParseError { line: 2, msg: "missing index line".into() })?;
    let mut indices = Vec::with_capacity(k);
    for tok in body.split_whitespace() {
        let v: usize = tok.parse().map_err(|_| PolarError::ParseError {
            line: lineno + 1,
            msg: format!("bad index {tok:?}"),
        })?;
        if v == 0 || v > n {
            return Err(PolarError::ParseError {
                line: lineno + 1,
                msg: format!("index {v} out of range 1..={n}"),
            });
        }
        indices.push(v - 1);
    }
    if indices.len() != k {
        return Err(PolarError::ParseError {
            line: lineno + 1,
            msg: format!("expected {k} indices, got {}", indices.len()),
        });
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PolarError::ParseError {
            line: lineno + 1,
            msg: "indices must be strictly ascending".into(),
        });
    }
    PolarCode::new(n, &indices)
}

pub fn read_info_set(path: &Path) -> Result<PolarCode, PolarError> {
    parse_info_set(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code_8_4() -> PolarCode {
        // information set {4,6,7,8} in 1-based notation
        PolarCode::new(8, &[3, 5, 6, 7]).unwrap()
    }

    #[test]
    fn kernel_is_g2() {
        let g = kron_generator(1);
        assert_eq!(g.row_support(0), vec![0]);
        assert_eq!(g.row_support(1), vec![0, 1]);
    }

    #[test]
    fn g8_column_supports() {
        // columns 1,2,3,5 (1-based) of G_8 carry the parity checks of the
        // frozen positions of P(8,4); their supports are fixed.
        let g = kron_generator(3);
        assert_eq!(g.col_support(0), vec![0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(g.col_support(1), vec![1, 3, 5, 7]);
        assert_eq!(g.col_support(2), vec![2, 3, 6, 7]);
        assert_eq!(g.col_support(4), vec![4, 5, 6, 7]);
    }

    #[test]
    fn generator_is_self_inverse() {
        for stages in 0..=10 {
            let g = kron_generator(stages);
            let sq = g.matrix().mul(g.matrix());
            assert_eq!(sq, BitMatrix::identity(1 << stages), "n={stages}");
        }
    }

    #[test]
    fn encode_zero_and_all_ones() {
        let code = code_8_4();
        assert_eq!(code.encode(&[0, 0, 0, 0]).unwrap(), vec![0; 8]);
        // only u_8 = 1: the last row of G_8 is all-ones
        assert_eq!(code.encode(&[0, 0, 0, 1]).unwrap(), vec![1; 8]);
    }

    #[test]
    fn encode_matches_dense_generator() {
        let code = code_8_4();
        let g = kron_generator(3);
        let info = [1u8, 0, 1, 0];
        let mut u = vec![0u8; 8];
        for (&pos, &b) in code.info_set().iter().zip(&info) {
            u[pos] = b;
        }
        assert_eq!(code.encode(&info).unwrap(), g.encode(&u));
    }

    #[test]
    fn encode_is_linear() {
        let code = construct_bhattacharyya(16, 8, 0.5).unwrap();
        let mut rng = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        for _ in 0..50 {
            let a: Vec<u8> = (0..8).map(|_| (next() & 1) as u8).collect();
            let b: Vec<u8> = (0..8).map(|_| (next() & 1) as u8).collect();
            let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let ca = code.encode(&a).unwrap();
            let cb = code.encode(&b).unwrap();
            let cs = code.encode(&sum).unwrap();
            let cxor: Vec<u8> = ca.iter().zip(&cb).map(|(x, y)| x ^ y).collect();
            assert_eq!(cs, cxor);
        }
    }

    #[test]
    fn extract_info_inverts_encode() {
        let code = construct_bhattacharyya(32, 11, 0.5).unwrap();
        let info: Vec<u8> = (0..11).map(|i| (i % 2) as u8).collect();
        let cw = code.encode(&info).unwrap();
        assert_eq!(code.extract_info(&cw), info);
    }

    #[test]
    fn bhattacharyya_p84() {
        let z = bhattacharyya_parameters(8, 0.5);
        let expect = [0.99609, 0.87891, 0.80859, 0.31641, 0.68359, 0.19141, 0.12109, 0.00391];
        for (got, want) in z.iter().zip(expect) {
            assert!((got - want).abs() < 5e-6, "{got} vs {want}");
        }
        let code = construct_bhattacharyya(8, 4, 0.5).unwrap();
        assert_eq!(code.info_set(), &[3, 5, 6, 7]);
    }

    #[test]
    fn bhattacharyya_n2() {
        for eps in [0.1, 0.5, 0.9] {
            let code = construct_bhattacharyya(2, 1, eps).unwrap();
            assert_eq!(code.info_set(), &[1]);
        }
    }

    /// Independent oracle: evaluate Z for one index by walking its bits
    /// from the most significant polarization level down.
    fn z_of_index(stages: usize, idx: usize, eps: f64) -> f64 {
        let mut z = eps;
        for level in (0..stages).rev() {
            if (idx >> level) & 1 == 1 {
                z = z * z;
            } else {
                z = 2.0 * z - z * z;
            }
        }
        z
    }

    #[test]
    fn bhattacharyya_n16_against_recursive_oracle() {
        let z = bhattacharyya_parameters(16, 0.5);
        for (i, &zi) in z.iter().enumerate() {
            let want = z_of_index(4, i, 0.5);
            assert!((zi - want).abs() < 1e-12, "index {i}: {zi} vs {want}");
        }
        let code = construct_bhattacharyya(16, 8, 0.5).unwrap();
        let mut order: Vec<usize> = (0..16).collect();
        order.sort_by(|&a, &b| z[a].partial_cmp(&z[b]).unwrap().then(b.cmp(&a)));
        let mut expect: Vec<usize> = order[..8].to_vec();
        expect.sort_unstable();
        assert_eq!(code.info_set(), &expect[..]);
    }

    #[test]
    fn bhattacharyya_cardinality() {
        for k in 1..=16 {
            let code = construct_bhattacharyya(16, k, 0.5).unwrap();
            assert_eq!(code.info_len(), k);
            assert!(code.info_set().iter().all(|&i| i < 16));
        }
    }

    #[test]
    fn five_g_full_rate() {
        let code = construct_5g(1024, 1024).unwrap();
        assert_eq!(code.info_set(), (0..1024).collect::<Vec<_>>());
    }

    #[test]
    fn five_g_nested() {
        let small = construct_5g(32, 8).unwrap();
        let large = construct_5g(32, 16).unwrap();
        let large_set: BTreeSet<usize> = large.info_set().iter().copied().collect();
        assert!(small.info_set().iter().all(|i| large_set.contains(i)));
    }

    #[test]
    fn five_g_rejects_unsupported_lengths() {
        assert!(matches!(construct_5g(16, 8), Err(PolarError::UnsupportedFiveGLength(16))));
        assert!(matches!(construct_5g(2048, 8), Err(PolarError::UnsupportedFiveGLength(_))));
    }

    #[test]
    fn reliability_sequence_is_permutation() {
        let seq = reliability_sequence();
        assert_eq!(seq.len(), 1024);
        let mut seen = vec![false; 1024];
        for &v in seq {
            assert!(!seen[v]);
            seen[v] = true;
        }
        // most reliable last
        assert_eq!(seq[1023], 1023);
        assert_eq!(seq[0], 0);
    }

    #[test]
    fn info_set_file_round_trip() {
        let code = code_8_4();
        let text = format_info_set(&code);
        assert_eq!(text, "8 4\n4 6 7 8\n");
        let back = parse_info_set(&text).unwrap();
        assert_eq!(back, code);
    }

    #[test]
    fn info_set_parse_errors_carry_line_numbers() {
        let err = parse_info_set("8 4\n4 6 7 nine\n").unwrap_err();
        match err {
            PolarError::ParseError { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse_info_set("8 4\n4 6 7\n").is_err());
        assert!(parse_info_set("8 4\n4 6 7 9\n").is_err());
        assert!(parse_info_set("").is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PolarCode::new(6, &[0]).is_err());
        assert!(PolarCode::new(8, &[8]).is_err());
        assert!(PolarCode::new(8, &[]).is_err());
        assert!(construct_bhattacharyya(8, 4, 0.0).is_err());
        assert!(construct_bhattacharyya(8, 4, 1.0).is_err());
        assert!(construct_bhattacharyya(8, 0, 0.5).is_err());
    }
}
