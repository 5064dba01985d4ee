use num_traits::Float;

use super::blocks::{block_ranges, block_diagonal_part, off_block_part};
use crate::error::{Error, Result};
use crate::haar::conjugate_to_haar;
use crate::operator::OperatorMatrix;
use crate::periodized::{build_projected, PeriodizedKind};
use crate::scalar::Real;

/// Off-block part of `C_y` in the Haar basis together with its decay
/// statistics.
#[derive(Debug, Clone)]
pub struct RemainderReport<T: Real> {
    /// `R`, Haar basis.
    pub matrix: OperatorMatrix<T>,
    /// Largest `|R_ij|` over rows in `V_0, W_0, …, W_{n-1}`.
    pub per_scale_max: Vec<T>,
    /// Zero-based `(row, column)` of the largest entry.
    pub argmax: (usize, usize),
    pub max_magnitude: T,
    /// `max |R + offblock(haar K)|`.
    pub identity_residual: T,
    /// Frobenius norm of the off-block part of `haar(C_y + K)`.
    pub corrected_off_block: T,
}

impl<T: Real> RemainderReport<T> {
    pub fn argmax_in_corner(&self, size: usize) -> bool {
        self.argmax.0 < size && self.argmax.1 < size
    }

    /// `|R_ij|` as a dense row-major grid.
    pub fn magnitude_grid(&self) -> Vec<Vec<T>> {
        let d = self.matrix.dim();
        (0..d).map(|i| (0..d).map(|j| self.matrix.get(i, j).norm()).collect()).collect()
    }
}

pub fn remainder_matrix<T: Real>(n: u32) -> Result<RemainderReport<T>> {
    if n < 2 {
        return Err(Error::Range("remainder analysis needs n ≥ 2".into()));
    }
    let cy = conjugate_to_haar(&build_projected(PeriodizedKind::<T>::Cy, n)?)?;
    let k = conjugate_to_haar(&build_projected(PeriodizedKind::<T>::K, n)?)?;
    let r = off_block_part(&cy)?;
    let rk = off_block_part(&k)?;
    let identity_residual = r.add(&rk)?.max_abs();
    let corrected_off_block = off_block_part(&cy.add(&k)?)?.frobenius_norm();
    debug_assert!(block_diagonal_part(&r)?.max_abs() == T::zero());

    let d = r.dim();
    let mut argmax = (0, 0);
    let mut max_magnitude = T::zero();
    for j in 0..d {
        for i in 0..d {
            let a = r.get(i, j).norm();
            if a > max_magnitude || (a == max_magnitude && (i, j) < argmax) {
                max_magnitude = a;
                argmax = (i, j);
            }
        }
    }
    let per_scale_max = block_ranges(n)
        .into_iter()
        .map(|rows| {
            rows.flat_map(|i| (0..d).map(move |j| (i, j)))
                .map(|(i, j)| r.get(i, j).norm())
                .fold(T::zero(), Float::max)
        })
        .collect();
    Ok(RemainderReport {
        matrix: r,
        per_scale_max,
        argmax,
        max_magnitude,
        identity_residual,
        corrected_off_block,
    })
}
