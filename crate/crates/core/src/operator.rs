//! Dense operator matrices tagged with resolution and basis.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicVector;
use crate::error::{Error, Result};
use crate::scalar::{self, Real};

/// Dense complex matrix.
pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Coordinate system an [`OperatorMatrix`] is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `G_{n,0}, …, G_{n,2^n-1}`.
    Scaling,
    /// `G_{0,0}, H_{0,0}, H_{1,0}, H_{1,1}, …` in canonical order.
    Haar,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Scaling => f.write_str("scaling"),
            Basis::Haar => f.write_str("haar"),
        }
    }
}

/// Square `2^n × 2^n` operator at resolution `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T: Real> {
    n: u32,
    basis: Basis,
    entries: CMatrix<T>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn new(n: u32, basis: Basis, entries: CMatrix<T>) -> Result<Self> {
        let dim = 1usize << n;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::Dimension(format!(
                "resolution {n} needs a {dim}x{dim} matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if !entries.iter().all(scalar::is_finite) {
            return Err(Error::InvalidData("non-finite matrix entry".into()));
        }
        Ok(Self { n, basis, entries })
    }

    pub(crate) fn from_parts(n: u32, basis: Basis, entries: CMatrix<T>) -> Self {
        debug_assert_eq!(entries.nrows(), 1usize << n);
        Self { n, basis, entries }
    }

    pub fn zeros(n: u32, basis: Basis) -> Self {
        let d = 1usize << n;
        Self { n, basis, entries: CMatrix::zeros(d, d) }
    }

    pub fn identity(n: u32, basis: Basis) -> Self {
        let d = 1usize << n;
        Self { n, basis, entries: CMatrix::identity(d, d) }
    }

    pub fn resolution(&self) -> u32 {
        self.n
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix<T> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[(row, col)]
    }

    pub(crate) fn require_basis(&self, expected: Basis) -> Result<()> {
        if self.basis != expected {
            return Err(Error::Basis { expected, found: self.basis });
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "resolutions {} and {} differ",
                self.n, other.n
            )));
        }
        other.require_basis(self.basis)
    }

    /// Matrix-vector product. Only meaningful for scaling-basis operators,
    /// whose coordinates match [`DyadicVector`].
    pub fn apply(&self, v: &DyadicVector<T>) -> Result<DyadicVector<T>> {
        self.require_basis(Basis::Scaling)?;
        if v.resolution() != self.n {
            return Err(Error::Dimension(format!(
                "operator at resolution {} applied to vector at resolution {}",
                self.n,
                v.resolution()
            )));
        }
        let d = self.dim();
        let x = v.coeffs();
        let mut out = vec![Complex::new(T::zero(), T::zero()); d];
        // column-major: accumulate column by column
        for (j, xj) in x.iter().enumerate() {
            if xj.re == T::zero() && xj.im == T::zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.entries.column(j).iter()) {
                *o += a * xj;
            }
        }
        Ok(DyadicVector::from_vec_unchecked(self.n, out))
    }

    pub fn adjoint(&self) -> Self {
        Self { n: self.n, basis: self.basis, entries: self.entries.transpose().map(|z| z.conj()) }
    }

    pub fn transpose(&self) -> Self {
        Self { n: self.n, basis: self.basis, entries: self.entries.transpose() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { n: self.n, basis: self.basis, entries: &self.entries + &other.entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { n: self.n, basis: self.basis, entries: &self.entries - &other.entries })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { n: self.n, basis: self.basis, entries: &self.entries * &other.entries })
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self { n: self.n, basis: self.basis, entries: self.entries.map(|z| z * c) }
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_compatible(other)?;
        Ok(max_abs_diff(&self.entries, &other.entries))
    }

    /// Largest `|M_ij - conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let d = self.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in i..d {
                let e = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                worst = worst.max(e);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }
}

/// Largest entrywise modulus of `a - b` for equally shaped matrices.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(T::zero(), T::max)
}
