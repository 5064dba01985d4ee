//! Dyadic addressing: bit strings, dyadic cells and the scaling-basis
//! coefficient vectors that carry qubit states on (0,1].
//!
//! Bit order is fixed crate-wide: digit `ε_1` is the most significant bit of
//! a cell index, so the string `ε_1 … ε_n` addresses the cell
//! `I_{n,k} = (k 2^{-n}, (k+1) 2^{-n}]` with `k = Σ ε_j 2^{n-j}`.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{self, Real};

/// Largest resolution for which cell indices fit in a `usize`.
pub const MAX_INDEX_BITS: u32 = usize::BITS - 1;

/// Ordered sequence of binary digits, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidData(format!("bit value {b} is not 0 or 1")));
        }
        if bits.len() as u32 > MAX_INDEX_BITS {
            return Err(Error::Range(format!(
                "{} bits exceed the addressable limit {MAX_INDEX_BITS}",
                bits.len()
            )));
        }
        Ok(Self(bits))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    /// The string with one more digit appended at the fine end.
    pub fn pushed(&self, bit: u8) -> Result<Self> {
        let mut bits = self.0.clone();
        bits.push(bit);
        Self::new(bits)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// `k = Σ_j ε_j 2^{n-j}`.
pub fn bits_to_index(b: &BitString) -> usize {
    b.bits().iter().fold(0usize, |k, &bit| (k << 1) | bit as usize)
}

pub fn index_to_bits(k: usize, n: u32) -> Result<BitString> {
    check_index(k, n)?;
    let bits = (1..=n).map(|j| ((k >> (n - j)) & 1) as u8).collect();
    Ok(BitString(bits))
}

fn check_index(k: usize, n: u32) -> Result<()> {
    if n > MAX_INDEX_BITS {
        return Err(Error::Range(format!("resolution {n} exceeds {MAX_INDEX_BITS}")));
    }
    if k >= 1usize << n {
        return Err(Error::Range(format!("index {k} outside 0..2^{n}")));
    }
    Ok(())
}

/// The left-open, right-closed cell `I_{n,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    n: u32,
    k: usize,
}

impl DyadicInterval {
    pub fn new(n: u32, k: usize) -> Result<Self> {
        check_index(k, n)?;
        Ok(Self { n, k })
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn index(&self) -> usize {
        self.k
    }

    /// `(left, right)`; the left endpoint is excluded.
    pub fn endpoints<T: Real>(&self) -> (T, T) {
        let h = T::pow2(-(self.n as i32));
        let k = T::from_usize(self.k).unwrap();
        (k * h, (k + T::one()) * h)
    }

    pub fn measure<T: Real>(&self) -> T {
        T::pow2(-(self.n as i32))
    }

    pub fn address(&self) -> BitString {
        index_to_bits(self.k, self.n).expect("valid by construction")
    }

    /// The two children `I_{n+1,2k}` and `I_{n+1,2k+1}`.
    pub fn children(&self) -> (Self, Self) {
        (
            Self { n: self.n + 1, k: 2 * self.k },
            Self { n: self.n + 1, k: 2 * self.k + 1 },
        )
    }
}

/// A point in the open interior of `I_{m,j}`. Its first `m` binary digits are
/// the address bits of `j`, independent of where in the cell it sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellPoint {
    resolution: u32,
    cell: usize,
}

impl CellPoint {
    pub fn new(resolution: u32, cell: usize) -> Result<Self> {
        check_index(cell, resolution)?;
        Ok(Self { resolution, cell })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn cell(&self) -> usize {
        self.cell
    }

    /// Digit `ε_k`, `1 ≤ k ≤ resolution`.
    pub fn epsilon_digit(&self, k: u32) -> Result<u8> {
        if k == 0 || k > self.resolution {
            return Err(Error::Resolution(format!(
                "digit {k} requested from a point resolved to {} digits",
                self.resolution
            )));
        }
        Ok(((self.cell >> (self.resolution - k)) & 1) as u8)
    }
}

/// Coefficients of a function in `V_n` with respect to `G_{n,0}, …, G_{n,2^n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicVector<T: Real> {
    n: u32,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> DyadicVector<T> {
    pub fn new(n: u32, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if n > MAX_INDEX_BITS {
            return Err(Error::Range(format!("resolution {n} exceeds {MAX_INDEX_BITS}")));
        }
        if coeffs.len() != 1usize << n {
            return Err(Error::Dimension(format!(
                "resolution {n} needs {} coefficients, got {}",
                1usize << n,
                coeffs.len()
            )));
        }
        if !coeffs.iter().all(scalar::is_finite) {
            return Err(Error::InvalidData("non-finite coefficient".into()));
        }
        Ok(Self { n, coeffs })
    }

    pub(crate) fn from_vec_unchecked(n: u32, coeffs: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(coeffs.len(), 1usize << n);
        Self { n, coeffs }
    }

    pub fn from_real(n: u32, values: &[T]) -> Result<Self> {
        Self::new(n, values.iter().map(|&x| scalar::creal(x)).collect())
    }

    pub fn zeros(n: u32) -> Self {
        Self { n, coeffs: vec![Complex::new(T::zero(), T::zero()); 1usize << n] }
    }

    /// Unit coefficient on `G_{n,k}`.
    pub fn basis(n: u32, k: usize) -> Result<Self> {
        check_index(k, n)?;
        let mut v = Self::zeros(n);
        v.coeffs[k] = Complex::new(T::one(), T::zero());
        Ok(v)
    }

    /// The normalized constant function `χ_(0,1]` at resolution `n`.
    pub fn constant(n: u32) -> Self {
        let c = T::pow2(-(n as i32)).sqrt();
        Self { n, coeffs: vec![scalar::creal(c); 1usize << n] }
    }

    pub fn resolution(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    pub fn norm(&self) -> T {
        scalar::norm2(&self.coeffs)
    }

    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_same_resolution(other)?;
        Ok(scalar::inner(&self.coeffs, &other.coeffs))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same_resolution(other)?;
        Ok(scalar::max_abs_diff(&self.coeffs, &other.coeffs))
    }

    fn check_same_resolution(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "resolutions {} and {} differ",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// Mean of the represented function over (0,1], i.e. `⟨χ, v⟩`.
    pub fn mean(&self) -> Complex<T> {
        let w = T::pow2(-(self.n as i32)).sqrt();
        self.coeffs
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
            .scale(w)
    }

    /// Cell values `f(x)` of the represented step function, i.e. coefficient
    /// times `2^{n/2}`.
    pub fn cell_values(&self) -> Vec<Complex<T>> {
        let s = T::pow2(self.n as i32).sqrt();
        self.coeffs.iter().map(|z| z.scale(s)).collect()
    }

    /// Rewrites the vector at a finer resolution `m ≥ n`: every `G_{n,k}`
    /// spreads evenly over its `2^{m-n}` refinements with weight
    /// `2^{-(m-n)/2}`. Isometric.
    pub fn embed(&self, m: u32) -> Result<Self> {
        if m < self.n {
            return Err(Error::Range(format!(
                "cannot embed resolution {} into coarser resolution {m}",
                self.n
            )));
        }
        if m > MAX_INDEX_BITS {
            return Err(Error::Range(format!("resolution {m} exceeds {MAX_INDEX_BITS}")));
        }
        let d = m - self.n;
        let reps = 1usize << d;
        let w = T::pow2(-(d as i32)).sqrt();
        let mut coeffs = Vec::with_capacity(self.coeffs.len() * reps);
        for z in &self.coeffs {
            let zw = z.scale(w);
            coeffs.extend(std::iter::repeat(zw).take(reps));
        }
        Ok(Self { n: m, coeffs })
    }

    /// Orthogonal projection onto `V_n`, `n ≤` the current resolution.
    /// Adjoint of [`embed`](Self::embed).
    pub fn project(&self, n: u32) -> Result<Self> {
        if n > self.n {
            return Err(Error::Range(format!(
                "cannot project resolution {} onto finer resolution {n}",
                self.n
            )));
        }
        let d = self.n - n;
        let reps = 1usize << d;
        let w = T::pow2(-(d as i32)).sqrt();
        let coeffs = self
            .coeffs
            .chunks(reps)
            .map(|c| {
                c.iter()
                    .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
                    .scale(w)
            })
            .collect();
        Ok(Self { n, coeffs })
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_resolution(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { n: self.n, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_resolution(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { n: self.n, coeffs })
    }
}

/// Borel image of a basis ket: the unit vector on `G_{n,k}` with
/// `k = bits_to_index(b)`. The empty string maps to `G_{0,0}`.
pub fn borel<T: Real>(b: &BitString) -> DyadicVector<T> {
    DyadicVector::basis(b.len() as u32, bits_to_index(b)).expect("in range by construction")
}
