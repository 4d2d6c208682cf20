//! Bit-packed linear algebra over GF(2).
//!
//! Matrices are dense and row-major with 64-bit words; elimination picks
//! pivots in ascending column order so echelon forms are deterministic.

mod bits;
mod code;

pub use bits::{BitMatrix, BitVec};
pub use code::{LinearCode, MAX_ENUMERATION_DIM};

/// GF(2) rank of `m`.
pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

/// Basis of `{x : m x = 0}`.
pub fn kernel_basis(m: &BitMatrix) -> LinearCode {
    m.kernel_basis()
}
