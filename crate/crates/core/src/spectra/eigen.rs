use nalgebra::{Schur, SymmetricEigen};
use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::operator::CMatrix;
use crate::scalar::{LinalgReal, Real};

const MAX_ITERATIONS: usize = 10_000;

/// Rotates `v` so its first entry of non-negligible modulus is real and
/// positive.
pub fn normalize_phase<T: Real>(v: &mut [Complex<T>]) {
    let peak = v.iter().map(|z| z.norm()).fold(T::zero(), Float::max);
    let cut = peak * T::lit(1e-10);
    if let Some(z) = v.iter().find(|z| z.norm() > cut).copied() {
        let u = z.conj() / z.norm();
        v.iter_mut().for_each(|w| *w = *w * u);
    }
}

/// Eigen-decomposition of a dense matrix. Hermitian input gets real
/// eigenvalues and orthonormal eigenvectors (columns); general input gets
/// eigenvalues only, from a complex Schur form.
#[derive(Debug, Clone)]
pub struct DenseEigen<T: Real> {
    pub values: Vec<Complex<T>>,
    pub vectors: Option<CMatrix<T>>,
    pub hermitian: bool,
}

/// Eigenvalues are sorted by real part, then imaginary part.
pub fn dense_eig_oracle<T: LinalgReal>(m: &CMatrix<T>) -> Result<DenseEigen<T>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", m.nrows(), m.ncols())));
    }
    let d = m.nrows();
    let scale = m.iter().map(|z| z.norm()).fold(T::one(), Float::max);
    let tol = T::lit(1e-12) * scale;
    let hermitian =
        (0..d).all(|i| (i..d).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol));
    let eps = <T as Float>::epsilon();
    if hermitian {
        let se = SymmetricEigen::try_new(m.clone(), eps, MAX_ITERATIONS)
            .ok_or_else(|| Error::Convergence("Hermitian eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
        let mut vectors = CMatrix::zeros(d, d);
        for (c, &k) in order.iter().enumerate() {
            let mut col: Vec<Complex<T>> = se.eigenvectors.column(k).iter().copied().collect();
            normalize_phase(&mut col);
            for (r, z) in col.into_iter().enumerate() {
                vectors[(r, c)] = z;
            }
        }
        let values = order.iter().map(|&k| Complex::new(se.eigenvalues[k], T::zero())).collect();
        return Ok(DenseEigen { values, vectors: Some(vectors), hermitian: true });
    }
    let schur = Schur::try_new(m.clone(), eps, MAX_ITERATIONS)
        .ok_or_else(|| Error::Convergence("Schur decomposition did not converge".into()))?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::Convergence("Schur form is not triangular".into()))?;
    let mut values: Vec<Complex<T>> = ev.iter().copied().collect();
    values.sort_by(|a, b| {
        a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(DenseEigen { values, vectors: None, hermitian: false })
}

/// `max_k ‖M v_k - λ_k v_k‖` over the columns of a Hermitian decomposition.
pub fn max_residual<T: LinalgReal>(m: &CMatrix<T>, eig: &DenseEigen<T>) -> Option<T> {
    let vecs = eig.vectors.as_ref()?;
    let mut worst = T::zero();
    for (k, lam) in eig.values.iter().enumerate() {
        let v = vecs.column(k).into_owned();
        let r = m * &v - v * *lam;
        let n = r.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b);
        worst = Float::max(worst, Float::sqrt(n));
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{recurrence_d_minus, recurrence_d_theta, spectrum_closed_form, PhaseConvention};

    #[test]
    fn hermitian_matches_closed_form() {
        for n in 1..=6u32 {
            let d = recurrence_d_theta::<f64>(n, 0.7, PhaseConvention::Derived);
            let e = dense_eig_oracle(&d).unwrap();
            assert!(e.hermitian);
            let want = spectrum_closed_form::<f64>(n).unwrap();
            for (a, b) in e.values.iter().zip(&want) {
                assert!((a.re - b).abs() < 1e-12 && a.im == 0.0);
            }
            assert!(max_residual(&d, &e).unwrap() < 1e-12);
        }
    }

    #[test]
    fn general_path() {
        let d = recurrence_d_minus::<f64>(3);
        let e = dense_eig_oracle(&d).unwrap();
        assert!(!e.hermitian && e.vectors.is_none());
        assert_eq!(e.values.len(), 8);
        assert!(e.values.iter().all(|z| z.norm() < 1e-6));
    }

    #[test]
    fn rejects_rectangular() {
        assert!(dense_eig_oracle(&CMatrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn phase_normalization() {
        let mut v = vec![Complex::new(0.0, 0.0), Complex::new(0.0, -2.0), Complex::new(1.0, 0.0)];
        normalize_phase(&mut v);
        assert!((v[1] - Complex::new(2.0, 0.0)).norm() < 1e-15);
        assert!((v[2] - Complex::new(0.0, 1.0)).norm() < 1e-15);
    }
}
