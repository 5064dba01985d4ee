use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use super::eigen::normalize_phase;
use crate::error::{Error, Result};
use crate::operator::CMatrix;
use crate::scalar::{self, Real};

/// Placement of the phases in the equator block recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// `½[[D, e^{-iθ} I], [e^{iθ} I, D]]`, which is what
    /// `cos θ D + i sin θ (D_+ - D_-)` produces.
    #[default]
    Derived,
    /// `½[[D, e^{iθ} I], [e^{-iθ} I, D]]`. Unitarily equivalent to
    /// [`Derived`](Self::Derived) by a diagonal phase.
    Conjugate,
}

impl FromStr for PhaseConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derived" => Ok(Self::Derived),
            "conjugate" => Ok(Self::Conjugate),
            other => Err(Error::InvalidData(format!("unknown phase convention `{other}`"))),
        }
    }
}

/// `D_0 = [0]`, `D_{m+1} = ½[[D_m, a I], [b I, D_m]]`.
fn doubling<T: Real>(n: u32, upper: Complex<T>, lower: Complex<T>) -> CMatrix<T> {
    let half = T::lit(0.5);
    let mut d = CMatrix::<T>::zeros(1, 1);
    for m in 0..n {
        let s = 1usize << m;
        let mut next = CMatrix::zeros(2 * s, 2 * s);
        next.view_mut((0, 0), (s, s)).copy_from(&d);
        next.view_mut((s, s), (s, s)).copy_from(&d);
        for i in 0..s {
            next[(i, s + i)] = upper;
            next[(s + i, i)] = lower;
        }
        next.iter_mut().for_each(|z| *z = z.scale(half));
        d = next;
    }
    d
}

/// Block of `C_x` on `W_n`.
pub fn recurrence_d<T: Real>(n: u32) -> CMatrix<T> {
    let one = scalar::creal(T::one());
    doubling(n, one, one)
}

/// Block of `P_-` on `W_n`; strictly upper triangular.
pub fn recurrence_d_minus<T: Real>(n: u32) -> CMatrix<T> {
    doubling(n, scalar::creal(T::one()), scalar::creal(T::zero()))
}

/// Block of `P_+` on `W_n`, the adjoint of [`recurrence_d_minus`].
pub fn recurrence_d_plus<T: Real>(n: u32) -> CMatrix<T> {
    doubling(n, scalar::creal(T::zero()), scalar::creal(T::one()))
}

/// Block of `C_θ + sin θ K` on `W_n`. Hermitian for every θ.
pub fn recurrence_d_theta<T: Real>(n: u32, theta: T, convention: PhaseConvention) -> CMatrix<T> {
    let e = Complex::from_polar(T::one(), theta);
    match convention {
        PhaseConvention::Derived => doubling(n, e.conj(), e),
        PhaseConvention::Conjugate => doubling(n, e, e.conj()),
    }
}

fn apply_doubling<T: Real>(x: &[Complex<T>], upper: Complex<T>, lower: Complex<T>) -> Vec<Complex<T>> {
    if x.len() == 1 {
        return vec![scalar::creal(T::zero())];
    }
    let (a, b) = x.split_at(x.len() / 2);
    let (da, db) = (apply_doubling(a, upper, lower), apply_doubling(b, upper, lower));
    let half = T::lit(0.5);
    let top = da.iter().zip(b).map(|(d, y)| (d + upper * y).scale(half));
    let bottom = db.iter().zip(a).map(|(d, y)| (d + lower * y).scale(half));
    top.chain(bottom).collect()
}

/// `D_n^θ x` in `O(n 2^n)` without forming the matrix.
pub fn recurrence_apply_theta<T: Real>(
    theta: T,
    convention: PhaseConvention,
    x: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    if !x.len().is_power_of_two() {
        return Err(Error::Dimension(format!("length {} is not a power of two", x.len())));
    }
    let e = Complex::from_polar(T::one(), theta);
    Ok(match convention {
        PhaseConvention::Derived => apply_doubling(x, e.conj(), e),
        PhaseConvention::Conjugate => apply_doubling(x, e, e.conj()),
    })
}

/// `{±(2k+1)/2^n : k = 0 … 2^{n-1}-1}`, ascending.
pub fn spectrum_closed_form<T: Real>(n: u32) -> Result<Vec<T>> {
    if n < 1 {
        return Err(Error::Range("closed-form spectrum needs n ≥ 1".into()));
    }
    let h = T::pow2(-(n as i32));
    let half = 1usize << (n - 1);
    let mut out = Vec::with_capacity(2 * half);
    for k in (0..half).rev() {
        out.push(-T::from_usize(2 * k + 1).unwrap() * h);
    }
    for k in 0..half {
        out.push(T::from_usize(2 * k + 1).unwrap() * h);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_real<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "p" | "1" | "+1" => Ok(Sign::Plus),
            "-" | "minus" | "m" | "-1" => Ok(Sign::Minus),
            other => Err(Error::InvalidData(format!("unknown sign `{other}`"))),
        }
    }
}

/// Eigenpair of an equator block `D_n^θ`, labelled so that
/// `value = s (2k+1) / 2^level`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T: Real> {
    pub value: Complex<T>,
    pub vector: Vec<Complex<T>>,
    pub level: u32,
    pub k: usize,
    pub sign: Sign,
    pub theta: T,
}

/// All `2^n` eigenpairs of `D_n^θ` by the doubling recurrence: an eigenpair
/// `(μ, v)` at level `m` yields `((μ ± 1)/2, (a v, ±v)/√2)` at level `m+1`,
/// with `a = e^{∓iθ}` matching the phase convention. Sorted by ascending
/// eigenvalue; each vector has its first nonzero entry real and positive.
pub fn eig_recurrence_theta<T: Real>(
    n: u32,
    theta: T,
    convention: PhaseConvention,
) -> Result<Vec<EigenPair<T>>> {
    if n < 1 {
        return Err(Error::Range("eigenvector recurrence starts at n = 1".into()));
    }
    let a = match convention {
        PhaseConvention::Derived => Complex::from_polar(T::one(), -theta),
        PhaseConvention::Conjugate => Complex::from_polar(T::one(), theta),
    };
    let r = T::FRAC_1_SQRT_2();
    // eigenvalue kept as the odd integer p in p / 2^m
    let mut level: Vec<(i64, Vec<Complex<T>>)> = vec![(0, vec![scalar::creal(T::one())])];
    for m in 0..n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (p, v) in &level {
            for s in [1i64, -1] {
                let mut w = Vec::with_capacity(2 * v.len());
                w.extend(v.iter().map(|z| a * z * r));
                w.extend(v.iter().map(|z| z.scale(r * T::from_i64(s).unwrap())));
                next.push((p + s * (1i64 << m), w));
            }
        }
        level = next;
    }
    level.sort_by_key(|(p, _)| *p);
    let scale = T::pow2(-(n as i32));
    Ok(level
        .into_iter()
        .map(|(p, mut vector)| {
            normalize_phase(&mut vector);
            EigenPair {
                value: scalar::creal(T::from_i64(p).unwrap() * scale),
                vector,
                level: n,
                k: ((p.unsigned_abs() - 1) / 2) as usize,
                sign: if p > 0 { Sign::Plus } else { Sign::Minus },
                theta,
            }
        })
        .collect())
}

/// `‖M v - λ v‖`.
pub fn eigenpair_residual<T: Real>(m: &CMatrix<T>, pair: &EigenPair<T>) -> T {
    let d = m.nrows();
    assert_eq!(d, pair.vector.len(), "dimension mismatch");
    let mut acc = T::zero();
    for i in 0..d {
        let mut s = -pair.value * pair.vector[i];
        for (j, vj) in pair.vector.iter().enumerate() {
            s += m[(i, j)] * vj;
        }
        acc += s.norm_sqr();
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::max_abs_diff;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn mat(rows: &[&[Complex<f64>]]) -> CMatrix<f64> {
        let d = rows.len();
        CMatrix::from_fn(d, d, |i, j| rows[i][j])
    }

    #[test]
    fn d_examples() {
        assert_eq!(recurrence_d::<f64>(0), mat(&[&[c(0.0, 0.0)]]));
        let z = c(0.0, 0.0);
        let h = c(0.5, 0.0);
        assert_eq!(recurrence_d::<f64>(1), mat(&[&[z, h], &[h, z]]));
        assert_eq!(recurrence_d_minus::<f64>(1), mat(&[&[z, h], &[z, z]]));
        assert_eq!(recurrence_d_plus::<f64>(1), mat(&[&[z, z], &[h, z]]));
    }

    #[test]
    fn d_minus_is_nilpotent() {
        for n in 0..=6u32 {
            let d = recurrence_d_minus::<f64>(n);
            let mut p = CMatrix::identity(d.nrows(), d.ncols());
            for _ in 0..=n {
                p = &p * &d;
            }
            assert!(p.iter().all(|z| z.norm() == 0.0), "n={n}");
        }
    }

    #[test]
    fn d_plus_is_adjoint_and_sum_is_d() {
        for n in 0..=5 {
            let m = recurrence_d_minus::<f64>(n);
            let p = recurrence_d_plus::<f64>(n);
            assert_eq!(p, m.transpose());
            assert_eq!(&m + &p, recurrence_d(n));
        }
    }

    #[test]
    fn theta_recurrence() {
        let t = 0.9f64;
        let d1 = recurrence_d_theta(1, t, PhaseConvention::Conjugate);
        let e = Complex::from_polar(1.0, t);
        assert!((d1[(0, 1)] - e * 0.5).norm() < 1e-16);
        assert!((d1[(1, 0)] - e.conj() * 0.5).norm() < 1e-16);
        for n in 0..=5 {
            assert_eq!(recurrence_d_theta(n, 0.0, PhaseConvention::Derived), recurrence_d::<f64>(n));
            let d = recurrence_d_theta(n, t, PhaseConvention::Derived);
            assert!(max_abs_diff(&d, &d.transpose().map(|z| z.conj())) == 0.0);
            // derived = cos θ D + i sin θ (D_+ - D_-)
            let want = recurrence_d::<f64>(n) * c(t.cos(), 0.0)
                + (recurrence_d_plus::<f64>(n) - recurrence_d_minus::<f64>(n)) * c(0.0, t.sin());
            assert!(max_abs_diff(&d, &want) < 1e-15);
        }
    }

    #[test]
    fn fast_apply_matches_matrix() {
        let x: Vec<Complex<f64>> = (0..32).map(|i| c((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        for conv in [PhaseConvention::Derived, PhaseConvention::Conjugate] {
            let d = recurrence_d_theta(5, 1.3, conv);
            let want = &d * nalgebra::DVector::from_vec(x.clone());
            let got = recurrence_apply_theta(1.3, conv, &x).unwrap();
            assert!(want.iter().zip(&got).all(|(a, b)| (a - b).norm() < 1e-14));
        }
        assert!(recurrence_apply_theta(0.0, PhaseConvention::Derived, &x[..3]).is_err());
    }

    #[test]
    fn closed_form_spectrum() {
        assert_eq!(spectrum_closed_form::<f64>(1).unwrap(), vec![-0.5, 0.5]);
        assert_eq!(
            spectrum_closed_form::<f64>(3).unwrap(),
            vec![-0.875, -0.625, -0.375, -0.125, 0.125, 0.375, 0.625, 0.875]
        );
        assert!(spectrum_closed_form::<f64>(0).is_err());
    }

    #[test]
    fn eigen_recurrence_level_one() {
        let t = 0.4f64;
        for conv in [PhaseConvention::Derived, PhaseConvention::Conjugate] {
            let pairs = eig_recurrence_theta(1, t, conv).unwrap();
            assert_eq!(pairs.len(), 2);
            assert_eq!(pairs[0].value, c(-0.5, 0.0));
            assert_eq!(pairs[1].value, c(0.5, 0.0));
            assert_eq!((pairs[1].k, pairs[1].sign), (0, Sign::Plus));
            let d = recurrence_d_theta(1, t, conv);
            for p in &pairs {
                assert!(eigenpair_residual(&d, p) < 1e-15);
                assert!(p.vector[0].im == 0.0 && p.vector[0].re > 0.0);
            }
        }
    }

    #[test]
    fn eigen_recurrence_doubles_and_matches_closed_form() {
        for n in 1..=7u32 {
            for t in [0.0, 1.0, std::f64::consts::FRAC_PI_3, 2.5] {
                let pairs = eig_recurrence_theta(n, t, PhaseConvention::Derived).unwrap();
                assert_eq!(pairs.len(), 1 << n);
                let vals: Vec<f64> = pairs.iter().map(|p| p.value.re).collect();
                assert_eq!(vals, spectrum_closed_form::<f64>(n).unwrap());
                let d = recurrence_d_theta(n, t, PhaseConvention::Derived);
                for p in &pairs {
                    assert!(eigenpair_residual(&d, p) < 1e-12);
                    let s: f64 = p.sign.as_real();
                    assert_eq!(p.value.re, s * (2 * p.k + 1) as f64 / (1u64 << n) as f64);
                }
            }
        }
    }
}
