//! Reduced qubit-array/field model: eigenstates of the corrected equator
//! operator and the Wigner-plane flow they induce on the field mode.
//!
//! Code units: `ħ = ω = 1`, time in radians of oscillator phase.

use num_complex::Complex;

use crate::dyadic::DyadicVector;
use crate::error::{Error, Result};
use crate::haar::{haar_inverse, HaarVector};
use crate::operator::{Basis, CMatrix, OperatorMatrix};
use crate::periodized::{apply_periodized, check_dense, PeriodizedKind};
use crate::scalar::{self, Real};
use crate::spectra::{eig_recurrence_theta, spectrum_closed_form, PhaseConvention, Sign};

/// Coupling `λ` and array eigenvalue `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams<T: Real> {
    lambda: T,
    energy: T,
}

impl<T: Real> FlowParams<T> {
    pub fn new(lambda: T, energy: T) -> Result<Self> {
        if !lambda.is_finite() || !energy.is_finite() {
            return Err(Error::InvalidData("flow parameters must be finite".into()));
        }
        if energy.abs() > T::one() {
            return Err(Error::Range(format!("|E| = {} exceeds 1", energy.abs())));
        }
        Ok(Self { lambda, energy })
    }

    /// `E = s (2k+1) / 2^n`.
    pub fn from_labels(lambda: T, n: u32, k: usize, s: Sign) -> Result<Self> {
        check_labels(n, k)?;
        Self::new(lambda, label_energy(n, k, s))
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn energy(&self) -> T {
        self.energy
    }

    /// Center of rotation `(-λE, 0)`.
    pub fn center(&self) -> (T, T) {
        (-self.lambda * self.energy, T::zero())
    }
}

fn check_labels(n: u32, k: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Range("eigenvalue labels need n ≥ 1".into()));
    }
    if n > 62 || k >= 1usize << (n - 1) {
        return Err(Error::Range(format!("k = {k} out of range for n = {n}")));
    }
    Ok(())
}

fn label_energy<T: Real>(n: u32, k: usize, s: Sign) -> T {
    s.as_real::<T>() * T::from_usize(2 * k + 1).unwrap() * T::pow2(-(n as i32))
}

/// Phase-space point reached at time `t` from `(q0, p0)`: a rotation by `t`
/// about `(-λE, 0)`, oriented so that `dq/dt = p` and
/// `dp/dt = -(q + λE)`. Satisfies `∂_t f = (q+λE) ∂_p f - p ∂_q f` for
/// `f(t, x) = f(0, flow(x, -t))`.
pub fn characteristic_flow<T: Real>(q0: T, p0: T, t: T, fp: &FlowParams<T>) -> (T, T) {
    let shift = fp.lambda * fp.energy;
    let (s, c) = t.sin_cos();
    let u = q0 + shift;
    (c * u + s * p0 - shift, -s * u + c * p0)
}

/// `(t, q, p)` sampled at `steps + 1` evenly spaced times in `[0, t_end]`.
pub fn trajectory<T: Real>(
    q0: T,
    p0: T,
    t_end: T,
    steps: usize,
    fp: &FlowParams<T>,
) -> Vec<(T, T, T)> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|i| {
            let t = t_end * T::from_usize(i).unwrap() / T::from_usize(steps).unwrap();
            let (q, p) = characteristic_flow(q0, p0, t, fp);
            (t, q, p)
        })
        .collect()
}

/// Rotation centers `-λE` for every eigenvalue at level `n`, ascending.
pub fn rotation_centers<T: Real>(n: u32, lambda: T) -> Result<Vec<T>> {
    let mut c: Vec<T> = spectrum_closed_form::<T>(n)?.into_iter().map(|e| -lambda * e).collect();
    c.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(c)
}

/// Normalized bivariate Gaussian density on the `(q, p)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian<T: Real> {
    pub mean: (T, T),
    /// `[[var_q, cov], [cov, var_p]]`.
    pub cov: [[T; 2]; 2],
}

impl<T: Real> Gaussian<T> {
    pub fn new(mean: (T, T), cov: [[T; 2]; 2]) -> Result<Self> {
        let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
        if cov[0][1] != cov[1][0] || cov[0][0] <= T::zero() || det <= T::zero() {
            return Err(Error::InvalidData("covariance must be symmetric positive definite".into()));
        }
        Ok(Self { mean, cov })
    }

    pub fn isotropic(q: T, p: T, sigma: T) -> Result<Self> {
        let v = sigma * sigma;
        Self::new((q, p), [[v, T::zero()], [T::zero(), v]])
    }

    pub fn eval(&self, q: T, p: T) -> T {
        let [[a, b], [_, d]] = self.cov;
        let det = a * d - b * b;
        let (x, y) = (q - self.mean.0, p - self.mean.1);
        let quad = (d * x * x - T::lit(2.0) * b * x * y + a * y * y) / det;
        (-quad / T::lit(2.0)).exp() / (T::TAU() * det.sqrt())
    }

    /// Exact image under the flow: mean carried along the characteristic,
    /// covariance rotated.
    pub fn evolve(&self, t: T, fp: &FlowParams<T>) -> Self {
        let mean = characteristic_flow(self.mean.0, self.mean.1, t, fp);
        let (s, c) = t.sin_cos();
        let r = [[c, s], [-s, c]];
        let mut cov = [[T::zero(); 2]; 2];
        for (i, ri) in r.iter().enumerate() {
            for (j, rj) in r.iter().enumerate() {
                let mut acc = T::zero();
                for a in 0..2 {
                    for b in 0..2 {
                        acc += ri[a] * self.cov[a][b] * rj[b];
                    }
                }
                cov[i][j] = acc;
            }
        }
        cov[1][0] = cov[0][1];
        Self { mean, cov }
    }
}

/// Real samples `f(q_i, p_j)` on a uniform node grid, stored row-major
/// with `q` along rows.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid<T: Real> {
    q_range: (T, T),
    p_range: (T, T),
    nq: usize,
    np: usize,
    samples: Vec<T>,
    integral: T,
}

impl<T: Real> WignerGrid<T> {
    pub fn new(q_range: (T, T), p_range: (T, T), nq: usize, np: usize, samples: Vec<T>) -> Result<Self> {
        if nq < 2 || np < 2 {
            return Err(Error::Dimension("grid needs at least 2 nodes per axis".into()));
        }
        if samples.len() != nq * np {
            return Err(Error::Dimension(format!(
                "{nq}x{np} grid needs {} samples, got {}",
                nq * np,
                samples.len()
            )));
        }
        if !(q_range.0 < q_range.1 && p_range.0 < p_range.1) {
            return Err(Error::Range("grid ranges must be increasing".into()));
        }
        if !samples.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidData("non-finite grid sample".into()));
        }
        let mut g = Self { q_range, p_range, nq, np, samples, integral: T::zero() };
        g.integral = g.riemann_sum();
        Ok(g)
    }

    pub fn sample(q_range: (T, T), p_range: (T, T), nq: usize, np: usize, f: impl Fn(T, T) -> T) -> Result<Self> {
        let dq = (q_range.1 - q_range.0) / T::from_usize(nq.max(2) - 1).unwrap();
        let dp = (p_range.1 - p_range.0) / T::from_usize(np.max(2) - 1).unwrap();
        let mut samples = Vec::with_capacity(nq * np);
        for i in 0..nq {
            let q = q_range.0 + dq * T::from_usize(i).unwrap();
            for j in 0..np {
                samples.push(f(q, p_range.0 + dp * T::from_usize(j).unwrap()));
            }
        }
        Self::new(q_range, p_range, nq, np, samples)
    }

    pub fn q_range(&self) -> (T, T) {
        self.q_range
    }

    pub fn p_range(&self) -> (T, T) {
        self.p_range
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nq, self.np)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    /// Riemann sum recorded at construction.
    pub fn integral(&self) -> T {
        self.integral
    }

    fn steps(&self) -> (T, T) {
        (
            (self.q_range.1 - self.q_range.0) / T::from_usize(self.nq - 1).unwrap(),
            (self.p_range.1 - self.p_range.0) / T::from_usize(self.np - 1).unwrap(),
        )
    }

    fn riemann_sum(&self) -> T {
        let (dq, dp) = self.steps();
        self.samples.iter().copied().sum::<T>() * dq * dp
    }

    pub fn node(&self, i: usize, j: usize) -> (T, T) {
        let (dq, dp) = self.steps();
        (
            self.q_range.0 + dq * T::from_usize(i).unwrap(),
            self.p_range.0 + dp * T::from_usize(j).unwrap(),
        )
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.samples[i * self.np + j]
    }

    /// Bilinear interpolation; zero outside the grid.
    pub fn value_at(&self, q: T, p: T) -> T {
        let (dq, dp) = self.steps();
        let x = (q - self.q_range.0) / dq;
        let y = (p - self.p_range.0) / dp;
        let last_q = T::from_usize(self.nq - 1).unwrap();
        let last_p = T::from_usize(self.np - 1).unwrap();
        if !(x >= T::zero() && y >= T::zero() && x <= last_q && y <= last_p) {
            return T::zero();
        }
        let i = x.floor().to_usize().unwrap().min(self.nq - 2);
        let j = y.floor().to_usize().unwrap().min(self.np - 2);
        let fx = x - T::from_usize(i).unwrap();
        let fy = y - T::from_usize(j).unwrap();
        let one = T::one();
        self.get(i, j) * (one - fx) * (one - fy)
            + self.get(i + 1, j) * fx * (one - fy)
            + self.get(i, j + 1) * (one - fx) * fy
            + self.get(i + 1, j + 1) * fx * fy
    }
}

/// Result of evolving a grid, with its mass bookkeeping.
#[derive(Debug, Clone)]
pub struct WignerEvolution<T: Real> {
    pub grid: WignerGrid<T>,
    pub initial_mass: T,
    pub final_mass: T,
}

impl<T: Real> WignerEvolution<T> {
    pub fn relative_mass_change(&self) -> T {
        let scale = self.initial_mass.abs().max(T::min_positive_value());
        (self.final_mass - self.initial_mass).abs() / scale
    }
}

/// `f(t, x) = f(0, flow(x, -t))`, resampled bilinearly on the same grid.
pub fn evolve_wigner<T: Real>(f0: &WignerGrid<T>, t: T, fp: &FlowParams<T>) -> WignerEvolution<T> {
    let mut samples = Vec::with_capacity(f0.samples.len());
    for i in 0..f0.nq {
        for j in 0..f0.np {
            let (q, p) = f0.node(i, j);
            let (q0, p0) = characteristic_flow(q, p, -t, fp);
            samples.push(f0.value_at(q0, p0));
        }
    }
    let grid = WignerGrid::new(f0.q_range, f0.p_range, f0.nq, f0.np, samples)
        .expect("resampled grid keeps its shape");
    WignerEvolution { initial_mass: f0.integral, final_mass: grid.integral, grid }
}

/// Eigenvector of `C_θ + sin θ K` with eigenvalue `s (2k+1)/2^n`. It lives
/// in the `W_n` detail space, so it is represented at resolution `n + 1`.
#[derive(Debug, Clone)]
pub struct Eigenstate<T: Real> {
    pub n: u32,
    pub k: usize,
    pub sign: Sign,
    pub theta: T,
    pub energy: T,
    pub haar: HaarVector<T>,
    pub samples: DyadicVector<T>,
    /// `‖(C_θ + sin θ K) Φ - E Φ‖` at resolution `n + 1`.
    pub residual: T,
}

pub fn eigenstate<T: Real>(n: u32, k: usize, s: Sign, theta: T) -> Result<Eigenstate<T>> {
    check_labels(n, k)?;
    check_dense(n + 1)?;
    if !theta.is_finite() {
        return Err(Error::InvalidData("θ must be finite".into()));
    }
    let pair = eig_recurrence_theta(n, theta, PhaseConvention::Derived)?
        .into_iter()
        .find(|p| p.k == k && p.sign == s)
        .expect("recurrence yields every label");
    let res = n + 1;
    let mut coeffs = vec![scalar::creal(T::zero()); 1usize << res];
    coeffs[(1usize << n)..].copy_from_slice(&pair.vector);
    let haar = HaarVector::new(res, coeffs)?;
    let samples = haar_inverse(&haar);
    let image = apply_periodized(PeriodizedKind::CThetaCorrected(theta), &samples)?;
    let energy = pair.value.re;
    let residual = image.sub(&samples.scale(scalar::creal(energy)))?.norm();
    Ok(Eigenstate { n, k, sign: s, theta, energy, haar, samples, residual })
}

/// All `2^n` eigenstates at level `n`, ordered by ascending eigenvalue.
pub fn eigenstate_bank<T: Real>(n: u32, theta: T) -> Result<Vec<Eigenstate<T>>> {
    check_labels(n, 0)?;
    let half = 1usize << (n - 1);
    let mut out = Vec::with_capacity(2 * half);
    for k in (0..half).rev() {
        out.push(eigenstate(n, k, Sign::Minus, theta)?);
    }
    for k in 0..half {
        out.push(eigenstate(n, k, Sign::Plus, theta)?);
    }
    Ok(out)
}

/// Diagonal matrix of cell averages of `Ω (x - 1/2)`.
pub fn multiplier_v<T: Real>(n: u32, omega: T) -> Result<OperatorMatrix<T>> {
    if n < 1 {
        return Err(Error::Range("multiplier needs n ≥ 1".into()));
    }
    check_dense(n)?;
    let d = 1usize << n;
    let h = T::pow2(-(n as i32 + 1));
    let half = T::lit(0.5);
    let mut e = CMatrix::<T>::zeros(d, d);
    for j in 0..d {
        e[(j, j)] = Complex::new(omega * (T::from_usize(2 * j + 1).unwrap() * h - half), T::zero());
    }
    OperatorMatrix::new(n, Basis::Scaling, e)
}
