use rand::Rng;

use super::{BitMatrix, BitVec};
use crate::error::{Error, Result};

/// Largest dimension for which operations may enumerate every codeword
/// (2^25 ≈ 3.4e7 words).
pub const MAX_ENUMERATION_DIM: usize = 25;

/// A binary linear code, stored as a basis in reduced row echelon form.
///
/// Pivots are ascending, so two codes are equal as subspaces exactly when
/// their stored bases are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    len: usize,
    basis: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl LinearCode {
    /// The span of `generators` (which need not be independent).
    pub fn from_generators(len: usize, generators: Vec<BitVec>) -> Self {
        let (reduced, pivots) = BitMatrix::from_rows(len, &generators).rref();
        let basis = (0..pivots.len()).map(|i| reduced.row_vec(i)).collect();
        LinearCode { len, basis, pivots }
    }

    pub fn zero(len: usize) -> Self {
        LinearCode { len, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(len: usize) -> Self {
        LinearCode::from_generators(len, (0..len).map(|i| BitVec::from_indices(len, [i])).collect())
    }

    /// Ambient length `n` (the code lives in GF(2)^n).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Shannon entropy of the uniform distribution on the code, in nats.
    pub fn entropy(&self) -> f64 {
        self.dimension() as f64 * std::f64::consts::LN_2
    }

    pub fn contains(&self, x: &BitVec) -> bool {
        assert_eq!(x.len(), self.len);
        let mut rest = x.clone();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if rest.get(p) {
                rest.xor_assign(row);
            }
        }
        rest.is_zero()
    }

    pub fn is_subspace_of(&self, other: &LinearCode) -> bool {
        self.len == other.len && self.basis.iter().all(|b| other.contains(b))
    }

    /// Generator matrix with the basis as rows.
    pub fn generator_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(self.len, &self.basis)
    }

    /// The `len × dim` matrix whose row `v` lists coordinate `v` of every
    /// basis vector. Projection dimensions are ranks of row subsets of it.
    pub fn coordinate_matrix(&self) -> BitMatrix {
        self.generator_matrix().transpose()
    }

    /// Image of the code under restriction to `coords` (in order; repeated
    /// coordinates give repeated positions).
    pub fn project(&self, coords: &[usize]) -> LinearCode {
        let restricted = self.basis.iter().map(|b| b.select(coords)).collect();
        LinearCode::from_generators(coords.len(), restricted)
    }

    pub fn projection_dim(&self, coords: &[usize]) -> usize {
        self.coordinate_matrix().select_rows(coords).rank()
    }

    /// A uniformly random codeword.
    pub fn uniform_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        let mut x = BitVec::zeros(self.len);
        for b in &self.basis {
            if rng.gen::<bool>() {
                x.xor_assign(b);
            }
        }
        x
    }

    fn check_enumerable(&self) -> Result<()> {
        if self.dimension() > MAX_ENUMERATION_DIM {
            return Err(Error::resource(format!(
                "code dimension {} exceeds enumeration cap {MAX_ENUMERATION_DIM}",
                self.dimension()
            )));
        }
        Ok(())
    }

    /// Visit every codeword once, in Gray-code order starting from zero.
    pub fn for_each_codeword<F: FnMut(&BitVec)>(&self, mut visit: F) -> Result<()> {
        self.check_enumerable()?;
        let mut x = BitVec::zeros(self.len);
        visit(&x);
        for step in 1u64..(1u64 << self.dimension()) {
            x.xor_assign(&self.basis[step.trailing_zeros() as usize]);
            visit(&x);
        }
        Ok(())
    }

    /// `spectrum[w]` = number of codewords of weight `w`.
    pub fn weight_spectrum(&self) -> Result<Vec<u64>> {
        let mut spectrum = vec![0u64; self.len + 1];
        self.for_each_codeword(|x| spectrum[x.weight()] += 1)?;
        Ok(spectrum)
    }

    /// Minimum nonzero weight, or `None` for the zero code.
    pub fn min_weight(&self) -> Result<Option<usize>> {
        let spectrum = self.weight_spectrum()?;
        Ok(spectrum.iter().enumerate().skip(1).find(|(_, &c)| c > 0).map(|(w, _)| w))
    }

    /// Checks whether every word has weight `≤ δ|A|` or `≥ (1-δ)|A|`, where
    /// `A` is the full coordinate set. If so, the dimension must be at most
    /// `2δ|A| + 1`; a violation is reported as [`Error::Invariant`].
    pub fn big_or_small_dimension_check(&self, delta: f64) -> Result<bool> {
        if !(0.0..1.0 / 3.0).contains(&delta) {
            return Err(Error::invalid(format!("delta must lie in [0, 1/3), got {delta}")));
        }
        let size = self.len as f64;
        let mut holds = true;
        self.for_each_codeword(|y| {
            let w = y.weight() as f64;
            if w > delta * size && w < (1.0 - delta) * size {
                holds = false;
            }
        })?;
        if holds && self.dimension() as f64 > 2.0 * delta * size + 1.0 {
            return Err(Error::Invariant(format!(
                "dimension {} exceeds 2*delta*|A|+1 = {}",
                self.dimension(),
                2.0 * delta * size + 1.0
            )));
        }
        Ok(holds)
    }
}
