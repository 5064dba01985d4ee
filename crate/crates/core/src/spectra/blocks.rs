use std::ops::Range;

use crate::error::{Error, Result};
use crate::operator::{Basis, CMatrix, OperatorMatrix};
use crate::scalar::Real;

/// Relative tolerance per unit of dimension for calling an operator
/// block diagonal.
pub const BLOCK_DIAGONAL_TOL: f64 = 1e-12;

/// Index ranges of `V_0, W_0, W_1, …, W_{n-1}` in canonical Haar order.
pub fn block_ranges(n: u32) -> Vec<Range<usize>> {
    let mut out = vec![0..1];
    for m in 0..n {
        out.push((1usize << m)..(1usize << (m + 1)));
    }
    out
}

/// Diagonal blocks of a Haar-basis operator together with the Frobenius
/// norm of everything outside them.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockList<T: Real> {
    pub blocks: Vec<CMatrix<T>>,
    pub off_block_residual: T,
}

impl<T: Real> BlockList<T> {
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.nrows()).sum()
    }

    /// `off_block_residual ≤ 1e-12 · dim`.
    pub fn is_block_diagonal(&self) -> bool {
        self.off_block_residual <= T::lit(BLOCK_DIAGONAL_TOL) * T::from_usize(self.dim()).unwrap()
    }

    /// Block on `W_m`.
    pub fn detail(&self, m: u32) -> Option<&CMatrix<T>> {
        self.blocks.get(m as usize + 1)
    }
}

pub fn extract_blocks<T: Real>(m: &OperatorMatrix<T>) -> Result<BlockList<T>> {
    m.require_basis(Basis::Haar)?;
    let e = m.entries();
    let blocks = block_ranges(m.resolution())
        .into_iter()
        .map(|r| e.view((r.start, r.start), (r.len(), r.len())).into_owned())
        .collect();
    Ok(BlockList { blocks, off_block_residual: off_block_part(m)?.frobenius_norm() })
}

fn split<T: Real>(m: &OperatorMatrix<T>, keep_blocks: bool) -> Result<OperatorMatrix<T>> {
    if m.basis() != Basis::Haar {
        return Err(Error::Basis { expected: Basis::Haar, found: m.basis() });
    }
    let n = m.resolution();
    let ranges = block_ranges(n);
    let mut level = vec![0usize; m.dim()];
    for (b, r) in ranges.iter().enumerate() {
        for i in r.clone() {
            level[i] = b;
        }
    }
    let mut e = m.entries().clone();
    for ((i, j), z) in (0..m.dim()).flat_map(|j| (0..m.dim()).map(move |i| (i, j))).zip(e.iter_mut()) {
        if (level[i] == level[j]) != keep_blocks {
            *z = num_complex::Complex::new(T::zero(), T::zero());
        }
    }
    Ok(OperatorMatrix::from_parts(n, Basis::Haar, e))
}

/// Haar-basis operator with its diagonal blocks zeroed.
pub fn off_block_part<T: Real>(m: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
    split(m, false)
}

/// Haar-basis operator with everything outside its diagonal blocks zeroed.
pub fn block_diagonal_part<T: Real>(m: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
    split(m, true)
}
