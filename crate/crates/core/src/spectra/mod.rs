//! Block recurrences, block extraction from Haar-basis operators, closed-form
//! spectra and eigenvectors, and the remainder-matrix analysis.

mod blocks;
mod eigen;
mod recurrence;
mod remainder;

pub use blocks::{
    block_diagonal_part, block_ranges, extract_blocks, off_block_part, BlockList,
    BLOCK_DIAGONAL_TOL,
};
pub use eigen::{dense_eig_oracle, max_residual, normalize_phase, DenseEigen};
pub use recurrence::{
    eig_recurrence_theta, eigenpair_residual, recurrence_apply_theta, recurrence_d, recurrence_d_minus, recurrence_d_plus,
    recurrence_d_theta, spectrum_closed_form, EigenPair, PhaseConvention, Sign,
};
pub use remainder::{remainder_matrix, RemainderReport};
