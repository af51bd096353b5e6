//! Dense GF(2) linear algebra on bit-packed rows.
//!
//! Small utility used for generator/parity matrices, codebook enumeration
//! and the exhaustive solution-space checks in the test suite. Rows are
//! packed into `u64` words so that row operations are word-wide XORs.

/// A dense binary matrix over GF(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64).max(1);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        let w = self.data[r * self.words_per_row + c / 64];
        (w >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.words_per_row + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// XOR row `src` into row `dst`.
    pub fn xor_rows(&mut self, dst: usize, src: usize) {
        let (d, s) = (dst * self.words_per_row, src * self.words_per_row);
        for k in 0..self.words_per_row {
            let v = self.data[s + k];
            self.data[d + k] ^= v;
        }
    }

    /// Column indices with a 1 in row `r`, ascending.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.get(r, c)).collect()
    }

    /// Row indices with a 1 in column `c`, ascending.
    pub fn col_support(&self, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.get(r, c)).collect()
    }

    /// Matrix product over GF(2). `self.cols` must equal `rhs.rows`.
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = BitMatrix::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    let (d, s) = (r * out.words_per_row, c * rhs.words_per_row);
                    for k in 0..out.words_per_row {
                        out.data[d + k] ^= rhs.data[s + k];
                    }
                }
            }
        }
        out
    }

    /// Row vector (as 0/1 bytes) times `self`.
    pub fn vec_mul(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.rows, "dimension mismatch");
        let mut acc = vec![0u64; self.words_per_row];
        for (r, &bit) in v.iter().enumerate() {
            if bit & 1 == 1 {
                for k in 0..self.words_per_row {
                    acc[k] ^= self.data[r * self.words_per_row + k];
                }
            }
        }
        (0..self.cols).map(|c| ((acc[c / 64] >> (c % 64)) & 1) as u8).collect()
    }

    /// `self` times a column vector (as 0/1 bytes); returns one byte per row.
    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        let mut packed = vec![0u64; self.words_per_row];
        for (c, &bit) in v.iter().enumerate() {
            if bit & 1 == 1 {
                packed[c / 64] |= 1 << (c % 64);
            }
        }
        (0..self.rows)
            .map(|r| {
                let mut acc = 0u64;
                for k in 0..self.words_per_row {
                    acc ^= self.data[r * self.words_per_row + k] & packed[k];
                }
                (acc.count_ones() & 1) as u8
            })
            .collect()
    }

    /// In-place Gaussian elimination to row echelon form; returns the rank.
    pub fn rank(mut self) -> usize {
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let pivot = (rank..self.rows).find(|&r| self.get(r, c));
            let Some(p) = pivot else { continue };
            self.data.swap_chunks(rank, p, self.words_per_row);
            for r in 0..self.rows {
                if r != rank && self.get(r, c) {
                    self.xor_rows(r, rank);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Basis of the right null space: all `x` with `self · xᵀ = 0`.
    /// Returned as one matrix row per basis vector.
    pub fn null_space(&self) -> BitMatrix {
        let n = self.cols;
        let mut m = self.clone();
        let mut pivot_col_of_row = Vec::new();
        let mut rank = 0;
        for c in 0..n {
            if rank == m.rows {
                break;
            }
            let pivot = (rank..m.rows).find(|&r| m.get(r, c));
            let Some(p) = pivot else { continue };
            m.data.swap_chunks(rank, p, m.words_per_row);
            for r in 0..m.rows {
                if r != rank && m.get(r, c) {
                    m.xor_rows(r, rank);
                }
            }
            pivot_col_of_row.push(c);
            rank += 1;
        }
        let pivot_set: std::collections::BTreeSet<usize> =
            pivot_col_of_row.iter().copied().collect();
        let free: Vec<usize> = (0..n).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = BitMatrix::zero(free.len(), n);
        for (bi, &fc) in free.iter().enumerate() {
            basis.set(bi, fc, true);
            for (ri, &pc) in pivot_col_of_row.iter().enumerate() {
                if m.get(ri, fc) {
                    basis.set(bi, pc, true);
                }
            }
        }
        basis
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }
}

trait SwapChunks {
    fn swap_chunks(&mut self, a: usize, b: usize, chunk: usize);
}

impl SwapChunks for Vec<u64> {
    fn swap_chunks(&mut self, a: usize, b: usize, chunk: usize) {
        if a == b {
            return;
        }
        for k in 0..chunk {
            self.swap(a * chunk + k, b * chunk + k);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_mul() {
        let id = BitMatrix::identity(5);
        let mut m = BitMatrix::zero(5, 5);
        m.set(0, 3, true);
        m.set(2, 2, true);
        m.set(4, 0, true);
        assert_eq!(id.mul(&m), m);
        assert_eq!(m.mul(&id), m);
    }

    #[test]
    fn rank_and_null_space() {
        // rows: [1 1 0], [0 1 1] -> rank 2, null space spanned by [1 1 1]
        let mut m = BitMatrix::zero(2, 3);
        m.set(0, 0, true);
        m.set(0, 1, true);
        m.set(1, 1, true);
        m.set(1, 2, true);
        assert_eq!(m.clone().rank(), 2);
        let ns = m.null_space();
        assert_eq!(ns.rows(), 1);
        assert_eq!(ns.row_support(0), vec![0, 1, 2]);
        assert_eq!(m.mul_vec(&[1, 1, 1]), vec![0, 0]);
    }

    #[test]
    fn vec_mul_matches_mul_vec_transpose() {
        let mut m = BitMatrix::zero(3, 4);
        m.set(0, 0, true);
        m.set(0, 2, true);
        m.set(1, 1, true);
        m.set(2, 3, true);
        m.set(2, 0, true);
        let v = [1u8, 0, 1];
        let row = m.vec_mul(&v);
        // compare against naive computation
        let mut naive = vec![0u8; 4];
        for r in 0..3 {
            if v[r] == 1 {
                for c in 0..4 {
                    naive[c] ^= m.get(r, c) as u8;
                }
            }
        }
        assert_eq!(row, naive);
    }

    #[test]
    fn wide_matrix_crosses_word_boundary() {
        let mut m = BitMatrix::zero(2, 130);
        m.set(0, 0, true);
        m.set(0, 129, true);
        m.set(1, 64, true);
        assert_eq!(m.row_support(0), vec![0, 129]);
        assert_eq!(m.col_support(64), vec![1]);
        assert_eq!(m.clone().rank(), 2);
    }
}
