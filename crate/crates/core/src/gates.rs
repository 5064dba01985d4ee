//! Local gates acting on Borel-picture vectors.
//!
//! A gate on qubit `k` touches digit `ε_k` of every cell address: at
//! resolution `n` that is bit `n - k` of the cell index. Matrices follow the
//! usual conventions `σ_+ = [[0,0],[1,0]]`, `σ_- = [[0,1],[0,0]]` and
//! `σ_y = iσ_+ - iσ_-`; cells that would be sent outside (0,1] contribute
//! nothing.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::dyadic::DyadicVector;
use crate::error::{Error, Result};
use crate::operator::{Basis, CMatrix, OperatorMatrix};
use crate::scalar::{self, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateTag {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl GateTag {
    pub const ALL: [GateTag; 5] = [GateTag::X, GateTag::Y, GateTag::Z, GateTag::Plus, GateTag::Minus];

    /// The 2×2 matrix, row-major.
    pub fn matrix<T: Real>(self) -> [[Complex<T>; 2]; 2] {
        let o = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        match self {
            GateTag::X => [[o, one], [one, o]],
            GateTag::Y => [[o, -i], [i, o]],
            GateTag::Z => [[one, o], [o, -one]],
            GateTag::Plus => [[o, o], [one, o]],
            GateTag::Minus => [[o, one], [o, o]],
        }
    }

    /// Where a basis component with digit `bit` goes: `Some((flips, coeff))`
    /// or `None` if it is annihilated.
    #[inline]
    pub(crate) fn column_action<T: Real>(self, bit: u8) -> Option<(bool, Complex<T>)> {
        let one = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        match (self, bit) {
            (GateTag::X, _) => Some((true, one)),
            (GateTag::Z, 0) => Some((false, one)),
            (GateTag::Z, _) => Some((false, -one)),
            (GateTag::Plus, 0) => Some((true, one)),
            (GateTag::Plus, _) => None,
            (GateTag::Minus, 0) => None,
            (GateTag::Minus, _) => Some((true, one)),
            (GateTag::Y, 0) => Some((true, i)),
            (GateTag::Y, _) => Some((true, -i)),
        }
    }
}

impl fmt::Display for GateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateTag::X => "x",
            GateTag::Y => "y",
            GateTag::Z => "z",
            GateTag::Plus => "plus",
            GateTag::Minus => "minus",
        };
        f.write_str(s)
    }
}

impl FromStr for GateTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(GateTag::X),
            "y" => Ok(GateTag::Y),
            "z" => Ok(GateTag::Z),
            "plus" | "+" => Ok(GateTag::Plus),
            "minus" | "-" => Ok(GateTag::Minus),
            other => Err(Error::InvalidData(format!("unknown gate `{other}`"))),
        }
    }
}

/// A single-qubit gate placed on qubit `k ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GateKind {
    tag: GateTag,
    qubit: u32,
}

impl GateKind {
    pub fn new(tag: GateTag, qubit: u32) -> Result<Self> {
        if qubit == 0 {
            return Err(Error::Range("qubits are numbered from 1".into()));
        }
        Ok(Self { tag, qubit })
    }

    pub fn tag(&self) -> GateTag {
        self.tag
    }

    pub fn qubit(&self) -> u32 {
        self.qubit
    }
}

/// Scatters `weight · σ^k v` into `out` (both at resolution `n`).
pub(crate) fn accumulate_gate_action<T: Real>(
    tag: GateTag,
    k: u32,
    n: u32,
    weight: Complex<T>,
    v: &[Complex<T>],
    out: &mut [Complex<T>],
) {
    let shift = n - k;
    let mask = 1usize << shift;
    for (j, x) in v.iter().enumerate() {
        let bit = ((j >> shift) & 1) as u8;
        if let Some((flip, c)) = tag.column_action::<T>(bit) {
            let target = if flip { j ^ mask } else { j };
            out[target] += c * weight * x;
        }
    }
}

/// Adds `weight · σ^k` to a dense scaling-basis matrix at resolution `n`.
pub(crate) fn accumulate_gate_matrix<T: Real>(
    tag: GateTag,
    k: u32,
    n: u32,
    weight: Complex<T>,
    m: &mut CMatrix<T>,
) {
    let shift = n - k;
    let mask = 1usize << shift;
    for j in 0..1usize << n {
        let bit = ((j >> shift) & 1) as u8;
        if let Some((flip, c)) = tag.column_action::<T>(bit) {
            let target = if flip { j ^ mask } else { j };
            m[(target, j)] += c * weight;
        }
    }
}

/// Gate action through the digit formulas, O(2^n).
pub fn apply_gate<T: Real>(g: GateKind, v: &DyadicVector<T>) -> Result<DyadicVector<T>> {
    let n = v.resolution();
    if g.qubit > n {
        return Err(Error::Resolution(format!(
            "qubit {} is not resolved at resolution {n}; embed first",
            g.qubit
        )));
    }
    let mut out = vec![Complex::new(T::zero(), T::zero()); v.len()];
    accumulate_gate_action(g.tag, g.qubit, n, Complex::new(T::one(), T::zero()), v.coeffs(), &mut out);
    Ok(DyadicVector::from_vec_unchecked(n, out))
}

/// `I ⊗ … ⊗ σ ⊗ … ⊗ I` with `σ` in slot `k`, built by explicit Kronecker
/// products.
pub fn gate_matrix<T: Real>(g: GateKind, n: u32) -> Result<OperatorMatrix<T>> {
    if g.qubit > n {
        return Err(Error::Range(format!("qubit {} outside 1..={n}", g.qubit)));
    }
    let s = g.tag.matrix::<T>();
    let small = DMatrix::from_row_slice(2, 2, &[s[0][0], s[0][1], s[1][0], s[1][1]]);
    let eye = DMatrix::<Complex<T>>::identity(2, 2);
    let mut acc = DMatrix::<Complex<T>>::identity(1, 1);
    for slot in 1..=n {
        let factor = if slot == g.qubit { &small } else { &eye };
        acc = acc.kronecker(factor);
    }
    Ok(OperatorMatrix::from_parts(n, Basis::Scaling, acc))
}

fn hadamard<T: Real>(a: &mut [Complex<T>], mask: usize) {
    let r = T::FRAC_1_SQRT_2();
    for j in 0..a.len() {
        if j & mask == 0 {
            let x = a[j];
            let y = a[j | mask];
            a[j] = (x + y).scale(r);
            a[j | mask] = (x - y).scale(r);
        }
    }
}

/// Quantum Fourier transform in the Borel picture, executed as the standard
/// circuit of Hadamards, controlled phases and a final qubit reversal.
///
/// Maps `G_{n,l}` to `2^{-n/2} Σ_k e^{2πikl/2^n} G_{n,k}`.
pub fn qft_borel<T: Real>(v: &DyadicVector<T>) -> DyadicVector<T> {
    let n = v.resolution();
    let mut a = v.coeffs().to_vec();
    let mask = |q: u32| 1usize << (n - q);
    for q in 1..=n {
        hadamard(&mut a, mask(q));
        for m in 2..=(n - q + 1) {
            let control = mask(q + m - 1);
            let both = mask(q) | control;
            let angle = T::TAU() / T::pow2(m as i32);
            let phase = Complex::from_polar(T::one(), angle);
            for (j, z) in a.iter_mut().enumerate() {
                if j & both == both {
                    *z *= phase;
                }
            }
        }
    }
    for q in 1..=n / 2 {
        let (lo, hi) = (mask(q), mask(n + 1 - q));
        for j in 0..a.len() {
            // swap components whose two digits differ, once per pair
            if j & lo != 0 && j & hi == 0 {
                a.swap(j, j ^ lo ^ hi);
            }
        }
    }
    DyadicVector::from_vec_unchecked(n, a)
}

/// Direct O(N²) DFT with kernel `e^{+2πikl/N}` and factor `N^{-1/2}`.
pub fn dft_oracle<T: Real>(v: &DyadicVector<T>) -> DyadicVector<T> {
    let big_n = v.len();
    let norm = T::from_usize(big_n).unwrap().sqrt().recip();
    let base = T::TAU() / T::from_usize(big_n).unwrap();
    let out = (0..big_n)
        .map(|k| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (l, x) in v.coeffs().iter().enumerate() {
                // reduce k*l mod N to keep the angle small
                let kl = (k * l) % big_n;
                acc += Complex::from_polar(T::one(), base * T::from_usize(kl).unwrap()) * x;
            }
            acc.scale(norm)
        })
        .collect();
    DyadicVector::from_vec_unchecked(v.resolution(), out)
}

/// Segment of a kernel support in `(0,1]²`, from `(x0,y0)` to `(x1,y1)`,
/// carrying a Dirac mass of the given weight. `x` is the output variable,
/// `y` the integration variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub weight: Complex<f64>,
}

impl Segment {
    pub fn length(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }
}

/// Support of the distributional kernel of a single gate, one segment per
/// affected cell at resolution `k`.
pub fn kernel_support(g: GateKind) -> Vec<Segment> {
    support_with_weight(g, 1.0)
}

fn support_with_weight(g: GateKind, scale: f64) -> Vec<Segment> {
    let k = g.qubit;
    let h = 0.5f64.powi(k as i32);
    let mut out = Vec::new();
    for j in 0..1usize << k {
        let bit = (j & 1) as u8;
        let x0 = j as f64 * h;
        let x1 = x0 + h;
        let shift = if bit == 0 { h } else { -h };
        let seg = |dy: f64, w: Complex<f64>| Segment {
            x0,
            y0: x0 + dy,
            x1,
            y1: x1 + dy,
            weight: w * scale,
        };
        let one = Complex::new(1.0, 0.0);
        let i = Complex::new(0.0, 1.0);
        match (g.tag, bit) {
            (GateTag::X, _) => out.push(seg(shift, one)),
            (GateTag::Y, 0) => out.push(seg(shift, -i)),
            (GateTag::Y, _) => out.push(seg(shift, i)),
            (GateTag::Z, 0) => out.push(seg(0.0, one)),
            (GateTag::Z, _) => out.push(seg(0.0, -one)),
            (GateTag::Plus, 1) => out.push(seg(shift, one)),
            (GateTag::Minus, 0) => out.push(seg(shift, one)),
            _ => {}
        }
    }
    out
}

/// Kernel support of the array-wide sum `Σ_{k ≤ depth} 2^{-k} σ^k`.
pub fn periodized_support(tag: GateTag, depth: u32) -> Vec<Segment> {
    (1..=depth)
        .flat_map(|k| {
            let g = GateKind { tag, qubit: k };
            support_with_weight(g, 0.5f64.powi(k as i32))
        })
        .collect()
}

/// Distance between two vectors under the gate action and its Kronecker
/// matrix, summed over all basis inputs. Used by verification code.
pub fn oracle_gap<T: Real>(g: GateKind, n: u32) -> Result<T> {
    let m = gate_matrix::<T>(g, n)?;
    let mut worst = T::zero();
    for j in 0..1usize << n {
        let e = DyadicVector::basis(n, j)?;
        let a = apply_gate(g, &e)?;
        let b = m.apply(&e)?;
        worst = worst.max(scalar::max_abs_diff(a.coeffs(), b.coeffs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn assert_vec(got: &DyadicVector<f64>, want: &[Complex<f64>]) {
        assert!(scalar::max_abs_diff(got.coeffs(), want) < 1e-14, "{:?}", got.coeffs());
    }

    #[test]
    fn apply_examples() {
        let x1 = GateKind::new(GateTag::X, 1).unwrap();
        let e0 = DyadicVector::<f64>::basis(2, 0).unwrap();
        assert_eq!(apply_gate(x1, &e0).unwrap(), DyadicVector::basis(2, 2).unwrap());

        let z1 = GateKind::new(GateTag::Z, 1).unwrap();
        let e1 = DyadicVector::<f64>::basis(1, 1).unwrap();
        assert_vec(&apply_gate(z1, &e1).unwrap(), &[c(0.0, 0.0), c(-1.0, 0.0)]);

        let y1 = GateKind::new(GateTag::Y, 1).unwrap();
        let e0 = DyadicVector::<f64>::basis(1, 0).unwrap();
        assert_vec(&apply_gate(y1, &e0).unwrap(), &[c(0.0, 0.0), c(0.0, 1.0)]);
    }

    #[test]
    fn lemma_example_two_qubits() {
        // σ_x^1 (z00 G20 + z01 G21 + z10 G22 + z11 G23)
        let z = [c(1.0, 0.0), c(2.0, 0.5), c(-3.0, 0.0), c(0.0, 4.0)];
        let v = DyadicVector::new(2, z.to_vec()).unwrap();
        let out = apply_gate(GateKind::new(GateTag::X, 1).unwrap(), &v).unwrap();
        assert_vec(&out, &[z[2], z[3], z[0], z[1]]);
    }

    #[test]
    fn resolution_errors() {
        let v = DyadicVector::<f64>::constant(1);
        let g = GateKind::new(GateTag::X, 2).unwrap();
        assert!(matches!(apply_gate(g, &v), Err(Error::Resolution(_))));
        assert!(matches!(gate_matrix::<f64>(g, 1), Err(Error::Range(_))));
        assert!(GateKind::new(GateTag::X, 0).is_err());
    }

    #[test]
    fn matrix_examples() {
        let x = gate_matrix::<f64>(GateKind::new(GateTag::X, 1).unwrap(), 1).unwrap();
        assert_eq!(x.get(0, 1), c(1.0, 0.0));
        assert_eq!(x.get(1, 0), c(1.0, 0.0));
        assert_eq!(x.get(0, 0), c(0.0, 0.0));

        let z = gate_matrix::<f64>(GateKind::new(GateTag::Z, 2).unwrap(), 2).unwrap();
        for (i, d) in [1.0, -1.0, 1.0, -1.0].iter().enumerate() {
            for j in 0..4 {
                let want = if i == j { *d } else { 0.0 };
                assert_eq!(z.get(i, j), c(want, 0.0));
            }
        }

        let m = gate_matrix::<f64>(GateKind::new(GateTag::Minus, 1).unwrap(), 1).unwrap();
        assert_eq!(m.get(0, 1), c(1.0, 0.0));
        assert_eq!(m.get(1, 0) + m.get(0, 0) + m.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn digit_action_matches_kronecker_small() {
        for n in 1..=4 {
            for k in 1..=n {
                for tag in GateTag::ALL {
                    let g = GateKind::new(tag, k).unwrap();
                    assert!(oracle_gap::<f64>(g, n).unwrap() <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn qft_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let e0 = DyadicVector::<f64>::basis(1, 0).unwrap();
        assert_vec(&qft_borel(&e0), &[c(r, 0.0), c(r, 0.0)]);

        let e1 = DyadicVector::<f64>::basis(2, 1).unwrap();
        let want = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        assert_vec(&qft_borel(&e1), &want);
        assert_vec(&dft_oracle(&e1), &want);

        let ones = DyadicVector::<f64>::from_real(3, &[1.0; 8]).unwrap();
        let out = qft_borel(&ones);
        assert_abs_diff_eq!(out.coeffs()[0].re, 8f64.sqrt(), epsilon = 1e-14);
        assert!(out.coeffs()[1..].iter().all(|z| z.norm() < 1e-14));
        let out = dft_oracle(&ones);
        assert_abs_diff_eq!(out.coeffs()[0].re, 8f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn kernel_support_examples() {
        let m = kernel_support(GateKind::new(GateTag::Minus, 1).unwrap());
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].x0, m[0].y0, m[0].x1, m[0].y1), (0.0, 0.5, 0.5, 1.0));

        let p = kernel_support(GateKind::new(GateTag::Plus, 1).unwrap());
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].x0, p[0].y0, p[0].x1, p[0].y1), (0.5, 0.0, 1.0, 0.5));

        let x = kernel_support(GateKind::new(GateTag::X, 2).unwrap());
        assert_eq!(x.len(), 4);
        for s in &x {
            assert_abs_diff_eq!(s.length(), 2f64.sqrt() / 4.0, epsilon = 1e-15);
            assert!(s.y0 >= 0.0 && s.y1 <= 1.0);
        }
    }

    #[test]
    fn periodized_support_counts() {
        let s = periodized_support(GateTag::X, 4);
        assert_eq!(s.len(), 2 + 4 + 8 + 16);
        let total: f64 = s.iter().map(|s| s.weight.re * (s.x1 - s.x0)).sum();
        // each level carries total mass 2^{-k}
        assert_abs_diff_eq!(total, 1.0 - 1.0 / 16.0, epsilon = 1e-15);
    }
}
