//! Multiresolution representation of qubit arrays on `L2(0,1]`.
//!
//! An `n`-qubit basis state with address bits `ε_1 … ε_n` is identified with
//! the normalized indicator of a dyadic interval, so qubit states become step
//! functions and array-wide operators become operators on `L2(0,1]`. The
//! crate provides the dyadic addressing, the fast Haar transform, gate action
//! on step functions, exact projections of the periodized operators, their
//! block structure in the Haar basis, and the field dynamics induced by the
//! eigenstates of the corrected equator operator.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the `F64`
//! aliases below fix the common case.

pub mod dynamics;
pub mod dyadic;
pub mod error;
pub mod gates;
pub mod haar;
pub mod io;
pub mod operator;
pub mod periodized;
pub mod scalar;
pub mod spectra;
pub mod verify;

pub use dyadic::{bits_to_index, borel, index_to_bits, BitString, CellPoint, DyadicInterval, DyadicVector};
pub use error::{Error, Result};
pub use gates::{apply_gate, dft_oracle, gate_matrix, qft_borel, GateKind, GateTag};
pub use haar::{conjugate_from_haar, conjugate_to_haar, haar_forward, haar_inverse, haar_matrix, HaarVector};
pub use operator::{Basis, CMatrix, OperatorMatrix};
pub use periodized::{apply_periodized, build_projected, BuildOptions, PeriodizedKind, Truncation};
pub use scalar::{LinalgReal, Real};
pub use spectra::{BlockList, EigenPair, PhaseConvention, Sign};

pub type DyadicVectorF64 = DyadicVector<f64>;
pub type HaarVectorF64 = HaarVector<f64>;
pub type OperatorMatrixF64 = OperatorMatrix<f64>;
pub type PeriodizedKindF64 = PeriodizedKind<f64>;
pub type BlockListF64 = BlockList<f64>;
pub type EigenPairF64 = EigenPair<f64>;
pub type EigenstateF64 = dynamics::Eigenstate<f64>;
pub type FlowParamsF64 = dynamics::FlowParams<f64>;
pub type WignerGridF64 = dynamics::WignerGrid<f64>;

pub type DyadicVectorF32 = DyadicVector<f32>;
pub type OperatorMatrixF32 = OperatorMatrix<f32>;
