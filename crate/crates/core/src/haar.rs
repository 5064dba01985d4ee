//! Discrete Haar transform between the scaling basis and the canonically
//! ordered Haar basis `G_{0,0}, H_{0,0}, H_{1,0}, H_{1,1}, H_{2,0}, …`.
//!
//! Coefficient `2^m + k` of a [`HaarVector`] multiplies `H_{m,k}`; index 0
//! multiplies `G_{0,0}`. Vectors go through the O(N) pyramid; the dense
//! [`haar_matrix`] is built independently by sampling the Haar functions and
//! is meant as a reference.

use num_complex::Complex;

use crate::dyadic::DyadicVector;
use crate::error::{Error, Result};
use crate::operator::{Basis, CMatrix, OperatorMatrix};
use crate::scalar::{self, Real};

/// Haar coefficients `(c_0; c_{0,0}; c_{1,0}, c_{1,1}; …)` at resolution `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarVector<T: Real> {
    n: u32,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> HaarVector<T> {
    pub fn new(n: u32, coeffs: Vec<Complex<T>>) -> Result<Self> {
        // same shape rules as the scaling-basis vector
        let v = DyadicVector::new(n, coeffs)?;
        Ok(Self { n, coeffs: v.into_coeffs() })
    }

    pub fn resolution(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    pub fn norm(&self) -> T {
        scalar::norm2(&self.coeffs)
    }

    /// `c_0`, the coefficient of `G_{0,0}`.
    pub fn coarse(&self) -> Complex<T> {
        self.coeffs[0]
    }

    /// The `2^m` detail coefficients `c_{m,0} … c_{m,2^m-1}` spanning `W_m`.
    pub fn scale_slice(&self, m: u32) -> Result<&[Complex<T>]> {
        if m >= self.n {
            return Err(Error::Range(format!(
                "scale {m} not present at resolution {}",
                self.n
            )));
        }
        let s = 1usize << m;
        Ok(&self.coeffs[s..2 * s])
    }
}

/// Free-function form of [`HaarVector::scale_slice`].
pub fn scale_slice<T: Real>(h: &HaarVector<T>, m: u32) -> Result<&[Complex<T>]> {
    h.scale_slice(m)
}

/// In-place forward pyramid on a buffer of length `2^n`.
pub(crate) fn forward_in_place<T: Real>(buf: &mut [Complex<T>], scratch: &mut Vec<Complex<T>>) {
    let r = T::FRAC_1_SQRT_2();
    scratch.resize(buf.len(), Complex::new(T::zero(), T::zero()));
    let mut len = buf.len();
    while len > 1 {
        let half = len / 2;
        for i in 0..half {
            let a = buf[2 * i];
            let b = buf[2 * i + 1];
            scratch[i] = (a + b).scale(r);
            scratch[half + i] = (a - b).scale(r);
        }
        buf[..len].copy_from_slice(&scratch[..len]);
        len = half;
    }
}

pub(crate) fn inverse_in_place<T: Real>(buf: &mut [Complex<T>], scratch: &mut Vec<Complex<T>>) {
    let r = T::FRAC_1_SQRT_2();
    scratch.resize(buf.len(), Complex::new(T::zero(), T::zero()));
    let mut len = 2;
    while len <= buf.len() {
        let half = len / 2;
        for i in 0..half {
            let s = buf[i];
            let d = buf[half + i];
            scratch[2 * i] = (s + d).scale(r);
            scratch[2 * i + 1] = (s - d).scale(r);
        }
        buf[..len].copy_from_slice(&scratch[..len]);
        len *= 2;
    }
}

pub fn haar_forward<T: Real>(v: &DyadicVector<T>) -> HaarVector<T> {
    let mut buf = v.coeffs().to_vec();
    forward_in_place(&mut buf, &mut Vec::new());
    HaarVector { n: v.resolution(), coeffs: buf }
}

pub fn haar_inverse<T: Real>(h: &HaarVector<T>) -> DyadicVector<T> {
    let mut buf = h.coeffs.clone();
    inverse_in_place(&mut buf, &mut Vec::new());
    DyadicVector::from_vec_unchecked(h.n, buf)
}

/// Value of `H_{m,k}` (or `G_{0,0}` for `row == 0`) at `x`, unnormalized
/// sampling of the continuous basis function.
fn haar_function_at<T: Real>(row: usize, x: T) -> T {
    if row == 0 {
        return if x > T::zero() && x <= T::one() { T::one() } else { T::zero() };
    }
    let m = usize::BITS - 1 - row.leading_zeros();
    let k = row - (1usize << m);
    let y = T::pow2(m as i32) * x - T::from_usize(k).unwrap();
    let half = T::lit(0.5);
    let amp = T::pow2(m as i32).sqrt();
    if y > T::zero() && y <= half {
        amp
    } else if y > half && y <= T::one() {
        -amp
    } else {
        T::zero()
    }
}

/// Dense `T_H`: row `r` is the discretized `r`-th canonical basis function,
/// sampled at cell midpoints and scaled by `2^{-n/2}`.
pub fn haar_matrix<T: Real>(n: u32) -> OperatorMatrix<T> {
    let d = 1usize << n;
    let h = T::pow2(-(n as i32));
    let w = h.sqrt();
    let entries = CMatrix::from_fn(d, d, |r, j| {
        let mid = (T::from_usize(j).unwrap() + T::lit(0.5)) * h;
        scalar::creal(haar_function_at(r, mid) * w)
    });
    OperatorMatrix::from_parts(n, Basis::Haar, entries)
}

fn transform_columns<T: Real>(m: &mut CMatrix<T>, inverse: bool) {
    let mut scratch = Vec::new();
    for mut col in m.column_iter_mut() {
        let buf = col.as_mut_slice();
        if inverse {
            inverse_in_place(buf, &mut scratch);
        } else {
            forward_in_place(buf, &mut scratch);
        }
    }
}

fn two_sided<T: Real>(m: &CMatrix<T>, inverse: bool) -> CMatrix<T> {
    // T M T^T: columns first, then rows via transposition. T_H is real.
    let mut a = m.clone();
    transform_columns(&mut a, inverse);
    let mut at = a.transpose();
    transform_columns(&mut at, inverse);
    at.transpose()
}

/// `T_H · M · T_H†` for a scaling-basis operator, in O(N²).
pub fn conjugate_to_haar<T: Real>(m: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
    m.require_basis(Basis::Scaling)?;
    Ok(OperatorMatrix::from_parts(m.resolution(), Basis::Haar, two_sided(m.entries(), false)))
}

/// Inverse of [`conjugate_to_haar`].
pub fn conjugate_from_haar<T: Real>(m: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
    m.require_basis(Basis::Haar)?;
    Ok(OperatorMatrix::from_parts(m.resolution(), Basis::Scaling, two_sided(m.entries(), true)))
}
