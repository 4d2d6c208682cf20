use std::fmt;

use serde::{Deserialize, Serialize};

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Fixed-length vector over GF(2), packed 64 bits per word.
///
/// Bits beyond `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVec { len, words: vec![u64::MAX; words_for(len)] };
        v.clear_tail();
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Indicator vector of `indices` (repeated indices cancel mod 2).
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = BitVec::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = BitVec { len, words };
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    /// Number of positions where the two vectors differ.
    pub fn distance(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + bit)
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Restriction to the listed coordinates, in order (repeats allowed).
    pub fn select(&self, coords: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(coords.len());
        for (t, &c) in coords.iter().enumerate() {
            if self.get(c) {
                out.set(t, true);
            }
        }
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[")?;
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, "]")
    }
}

/// Dense row-major GF(2) matrix.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "HexMatrix", try_from = "HexMatrix")]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            m.row_mut(i).copy_from_slice(r.words());
        }
        m
    }

    /// Build from 0/1 entries given row by row.
    pub fn from_dense(cols: usize, entries: &[Vec<u8>]) -> Self {
        let mut m = BitMatrix::zeros(entries.len(), cols);
        for (i, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (j, &e) in row.iter().enumerate() {
                if e & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        (self.data[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + j / WORD_BITS];
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row_vec(&self, i: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row(i).to_vec())
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn col_weight(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, j)).count()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (wi, &w) in self.row(i).iter().enumerate() {
                let mut rest = w;
                while rest != 0 {
                    let j = wi * WORD_BITS + rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Submatrix keeping the listed rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows.len(), self.cols);
        for (t, &r) in rows.iter().enumerate() {
            let src = self.row(r).to_vec();
            m.row_mut(t).copy_from_slice(&src);
        }
        m
    }

    /// Submatrix keeping the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (t, &c) in cols.iter().enumerate() {
                if self.get(i, c) {
                    m.set(i, t, true);
                }
            }
        }
        m
    }

    /// Matrix-vector product `M x`.
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols);
        let mut out = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            let parity: u32 =
                self.row(i).iter().zip(x.words()).map(|(a, b)| (a & b).count_ones()).sum();
            if parity % 2 == 1 {
                out.set(i, true);
            }
        }
        out
    }

    /// XOR row `src` into row `dst`, touching only words from `from_word` on.
    #[inline]
    fn xor_rows(&mut self, dst: usize, src: usize, from_word: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (d_off, s_off) = (dst * s, src * s);
        if dst < src {
            let (lo, hi) = self.data.split_at_mut(s_off);
            for w in from_word..s {
                lo[d_off + w] ^= hi[w];
            }
        } else {
            let (lo, hi) = self.data.split_at_mut(d_off);
            for w in from_word..s {
                hi[w] ^= lo[s_off + w];
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// Gaussian elimination in place with ascending column pivots. When
    /// `reduce_above` is set the result is in reduced row echelon form.
    /// Returns the pivot columns; the first `pivots.len()` rows are nonzero.
    fn eliminate(&mut self, reduce_above: bool) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let (wi, bit) = (c / WORD_BITS, 1u64 << (c % WORD_BITS));
            let Some(p) = (r..self.rows).find(|&i| self.data[i * self.stride + wi] & bit != 0) else {
                continue;
            };
            self.swap_rows(p, r);
            let start = if reduce_above { 0 } else { r + 1 };
            for i in start..self.rows {
                if i != r && self.data[i * self.stride + wi] & bit != 0 {
                    self.xor_rows(i, r, wi);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate(false).len()
    }

    /// Reduced row echelon form with its pivot columns.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate(true);
        (m, pivots)
    }

    /// Basis of the right kernel `{x : M x = 0}`.
    pub fn kernel_basis(&self) -> super::LinearCode {
        let (reduced, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let basis: Vec<BitVec> = (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = BitVec::zeros(self.cols);
                x.set(f, true);
                for (row, &p) in pivots.iter().enumerate() {
                    if reduced.get(row, f) {
                        x.set(p, true);
                    }
                }
                x
            })
            .collect();
        super::LinearCode::from_generators(self.cols, basis)
    }

    pub fn to_hex_rows(&self) -> Vec<String> {
        (0..self.rows)
            .map(|i| {
                let bytes: Vec<u8> = self
                    .row(i)
                    .iter()
                    .flat_map(|w| w.to_le_bytes())
                    .take(self.cols.div_ceil(8))
                    .collect();
                hex::encode(bytes)
            })
            .collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                write!(f, "{}", self.get(i, j) as u8)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// JSON form of a [`BitMatrix`]: each row as little-endian hex bytes.
#[derive(Serialize, Deserialize)]
struct HexMatrix {
    rows: usize,
    cols: usize,
    hex_rows: Vec<String>,
}

impl From<BitMatrix> for HexMatrix {
    fn from(m: BitMatrix) -> Self {
        HexMatrix { rows: m.rows, cols: m.cols, hex_rows: m.to_hex_rows() }
    }
}

impl TryFrom<HexMatrix> for BitMatrix {
    type Error = String;

    fn try_from(h: HexMatrix) -> Result<Self, Self::Error> {
        if h.hex_rows.len() != h.rows {
            return Err(format!("expected {} rows, got {}", h.rows, h.hex_rows.len()));
        }
        let mut m = BitMatrix::zeros(h.rows, h.cols);
        for (i, s) in h.hex_rows.iter().enumerate() {
            let bytes = hex::decode(s).map_err(|e| e.to_string())?;
            if bytes.len() != h.cols.div_ceil(8) {
                return Err(format!("row {i}: wrong byte length"));
            }
            let mut words = vec![0u64; m.stride];
            for (b, &byte) in bytes.iter().enumerate() {
                words[b / 8] |= (byte as u64) << (8 * (b % 8));
            }
            let row = BitVec::from_words(h.cols, words);
            m.row_mut(i).copy_from_slice(row.words());
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_bits_stay_clear() {
        let v = BitVec::ones(70);
        assert_eq!(v.weight(), 70);
        assert_eq!(v.words()[1], (1u64 << 6) - 1);
    }

    #[test]
    fn zero_and_identity_rank() {
        assert_eq!(BitMatrix::zeros(5, 9).rank(), 0);
        assert_eq!(BitMatrix::identity(130).rank(), 130);
    }

    #[test]
    fn kernel_of_zero_matrix_is_everything() {
        let k = BitMatrix::zeros(3, 7).kernel_basis();
        assert_eq!(k.dimension(), 7);
    }

    #[test]
    fn parity_row_kernel_is_even_weight_code() {
        let m = BitMatrix::from_dense(4, &[vec![1, 1, 1, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.dimension(), 3);
        assert!(k.basis().iter().all(|b| b.weight() % 2 == 0));
    }

    #[test]
    fn transpose_is_involution() {
        let m = BitMatrix::from_dense(3, &[vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(m.transpose().transpose(), m);
        assert!(m.transpose().get(2, 1));
    }

    #[test]
    fn hex_json_roundtrip() {
        let m = BitMatrix::from_dense(
            11,
            &[vec![1, 0, 1, 1, 0, 0, 0, 0, 1, 0, 1], vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]],
        );
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("hex_rows"));
        let back: BitMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
