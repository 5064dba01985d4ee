//! Array-wide ("periodized") operators at finite resolution.
//!
//! The finite-array operators `Σ_{k≤n} λ_k σ^k` are built exactly. The
//! infinite-array operators (`λ_k = 2^{-k}`) are compressed to `V_n` as
//! `Π_n C Π_n`: the gate terms with `k ≤ n` act on resolved digits, and the
//! unresolved ones average to a multiple of the identity. That tail is
//! `2^{-n} I` for `C_x`, `2^{-n-1} I` for `C_±`, and cancels for `C_y`.
//! `C_z` and `V` are multipliers and compress to their cell averages.
//!
//! `L` is the antiderivative `u ↦ ∫_0^x u`. Its Galerkin matrix has `2^{-n}`
//! strictly below the diagonal and `2^{-n-1}` on it.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Float;

use crate::dyadic::DyadicVector;
use crate::error::{Error, Result};
use crate::gates::{self, GateTag};
use crate::operator::{Basis, CMatrix, OperatorMatrix};
use crate::scalar::{self, LinalgReal, Real};

/// Largest resolution for dense operators unless `MULTIRES_MAX_N` says
/// otherwise. A 4096² complex matrix takes about 268 MB.
pub const DEFAULT_MAX_RESOLUTION: u32 = 12;

/// Dense-operator resolution cap: `MULTIRES_MAX_N` if set and parsable,
/// [`DEFAULT_MAX_RESOLUTION`] otherwise.
pub fn max_resolution() -> u32 {
    std::env::var("MULTIRES_MAX_N")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_RESOLUTION)
}

pub(crate) fn check_dense(n: u32) -> Result<()> {
    let max = max_resolution();
    if n > max {
        return Err(Error::ResourceLimit { n, max });
    }
    Ok(())
}

/// Unit-sphere weights `(α, β, γ)` for `α C_x + β C_y + γ C_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochWeights<T: Real> {
    alpha: T,
    beta: T,
    gamma: T,
}

impl<T: Real> BlochWeights<T> {
    pub fn new(alpha: T, beta: T, gamma: T) -> Result<Self> {
        let r2 = alpha * alpha + beta * beta + gamma * gamma;
        if !r2.is_finite() || (r2 - T::one()).abs() > T::lit(1e-9) {
            return Err(Error::InvalidData(format!(
                "Bloch weights must satisfy α²+β²+γ² = 1, got {r2}"
            )));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeriodizedKind<T: Real> {
    Cx,
    Cy,
    Cz,
    CPlus,
    CMinus,
    /// Antiderivative.
    L,
    /// Transpose of `L`.
    LT,
    /// `i(Lᵀ - L)`.
    K,
    /// `C_- + L`.
    PMinus,
    /// `C_+ + Lᵀ`.
    PPlus,
    /// `cos θ C_x + sin θ C_y`.
    CTheta(T),
    /// `C_θ + sin θ K`.
    CThetaCorrected(T),
    /// Multiplier `x - 1/2`.
    V,
    Bloch(BlochWeights<T>),
}

impl<T: Real> PeriodizedKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            PeriodizedKind::Cx => "cx",
            PeriodizedKind::Cy => "cy",
            PeriodizedKind::Cz => "cz",
            PeriodizedKind::CPlus => "cplus",
            PeriodizedKind::CMinus => "cminus",
            PeriodizedKind::L => "l",
            PeriodizedKind::LT => "lt",
            PeriodizedKind::K => "k",
            PeriodizedKind::PMinus => "pminus",
            PeriodizedKind::PPlus => "pplus",
            PeriodizedKind::CTheta(_) => "ctheta",
            PeriodizedKind::CThetaCorrected(_) => "ctheta-corrected",
            PeriodizedKind::V => "v",
            PeriodizedKind::Bloch(_) => "bloch",
        }
    }

    /// Parses an operator name; `theta` is required for the equator kinds and
    /// `bloch` for the Bloch kind.
    pub fn parse(name: &str, theta: Option<T>, bloch: Option<BlochWeights<T>>) -> Result<Self> {
        let need_theta = || {
            theta.ok_or_else(|| Error::InvalidData(format!("operator `{name}` needs θ")))
        };
        Ok(match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "cx" => Self::Cx,
            "cy" => Self::Cy,
            "cz" => Self::Cz,
            "cplus" | "c+" => Self::CPlus,
            "cminus" | "c-" => Self::CMinus,
            "l" => Self::L,
            "lt" | "l'" => Self::LT,
            "k" => Self::K,
            "pminus" | "p-" => Self::PMinus,
            "pplus" | "p+" => Self::PPlus,
            "ctheta" => Self::CTheta(need_theta()?),
            "ctheta-corrected" | "cthetacorrected" => Self::CThetaCorrected(need_theta()?),
            "v" => Self::V,
            "bloch" => Self::Bloch(bloch.ok_or_else(|| {
                Error::InvalidData("operator `bloch` needs weights".into())
            })?),
            other => return Err(Error::InvalidData(format!("unknown operator `{other}`"))),
        })
    }
}

impl<T: Real> fmt::Display for PeriodizedKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether to include the contribution of unresolved qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// Exact compression `Π_n C Π_n`.
    #[default]
    Projected,
    /// Only the gate terms `k ≤ n`.
    Naive,
}

impl FromStr for Truncation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on" | "projected" => Ok(Truncation::Projected),
            "off" | "naive" => Ok(Truncation::Naive),
            other => Err(Error::InvalidData(format!("unknown tail mode `{other}`"))),
        }
    }
}

/// Discrete form of the antiderivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AntiderivativeForm {
    /// Galerkin projection of `∫_0^x`.
    #[default]
    Galerkin,
    /// 0/1 matrix with ones strictly above the diagonal, without the `2^{-n}`
    /// quadrature weight.
    Appendix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BuildOptions {
    pub truncation: Truncation,
    pub antiderivative: AntiderivativeForm,
}

/// Coefficients `λ_1 … λ_n` of a finite array.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaWeights<T: Real>(Vec<T>);

impl<T: Real> LambdaWeights<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidData("at least one weight is required".into()));
        }
        if !weights.iter().all(|w| w.is_finite()) {
            return Err(Error::InvalidData("non-finite weight".into()));
        }
        Ok(Self(weights))
    }

    /// `λ_k = 2^{-k}`, `k = 1..=n`.
    pub fn dyadic(n: u32) -> Result<Self> {
        Self::new((1..=n as i32).map(|k| T::pow2(-k)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn gate(self) -> GateTag {
        match self {
            Axis::X => GateTag::X,
            Axis::Y => GateTag::Y,
            Axis::Z => GateTag::Z,
        }
    }
}

/// `Σ_k λ_k σ^k` along `axis`, with `n = λ.len()`.
pub fn build_finite_array<T: Real>(axis: Axis, lambda: &LambdaWeights<T>) -> Result<OperatorMatrix<T>> {
    let n = lambda.len() as u32;
    check_dense(n)?;
    let d = 1usize << n;
    let mut m = CMatrix::zeros(d, d);
    for (k, &w) in (1..=n).zip(lambda.as_slice()) {
        gates::accumulate_gate_matrix(axis.gate(), k, n, scalar::creal(w), &mut m);
    }
    Ok(OperatorMatrix::from_parts(n, Basis::Scaling, m))
}

/// Every signed sum `Σ ε_k λ_k`, `ε_k = ±1`, sorted ascending.
pub fn finite_eigs_closed_form<T: Real>(lambda: &LambdaWeights<T>) -> Vec<T> {
    let n = lambda.len();
    let mut out: Vec<T> = (0..1usize << n)
        .map(|j| {
            lambda
                .as_slice()
                .iter()
                .enumerate()
                .map(|(k, &l)| if (j >> (n - 1 - k)) & 1 == 0 { l } else { -l })
                .sum()
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    out
}

fn dyadic_gate_sum<T: Real>(tag: GateTag, n: u32, scale: Complex<T>, m: &mut CMatrix<T>) {
    for k in 1..=n {
        gates::accumulate_gate_matrix(tag, k, n, scale * T::pow2(-(k as i32)), m);
    }
}

fn add_identity<T: Real>(m: &mut CMatrix<T>, c: Complex<T>) {
    for i in 0..m.nrows() {
        m[(i, i)] += c;
    }
}

/// Cell average of `1 - 2x` over `I_{n,j}`.
fn cz_cell_average<T: Real>(n: u32, j: usize) -> T {
    T::one() - T::from_usize(2 * j + 1).unwrap() * T::pow2(-(n as i32))
}

fn antiderivative_matrix<T: Real>(n: u32, form: AntiderivativeForm) -> CMatrix<T> {
    let d = 1usize << n;
    match form {
        AntiderivativeForm::Galerkin => {
            let h = T::pow2(-(n as i32));
            CMatrix::from_fn(d, d, |i, j| {
                if i > j {
                    scalar::creal(h)
                } else if i == j {
                    scalar::creal(h * T::lit(0.5))
                } else {
                    scalar::creal(T::zero())
                }
            })
        }
        AntiderivativeForm::Appendix => CMatrix::from_fn(d, d, |i, j| {
            scalar::creal(if i < j { T::one() } else { T::zero() })
        }),
    }
}

/// `Π_n C Π_n` with default options.
pub fn build_projected<T: Real>(kind: PeriodizedKind<T>, n: u32) -> Result<OperatorMatrix<T>> {
    build_with(kind, n, BuildOptions::default())
}

pub fn build_with<T: Real>(
    kind: PeriodizedKind<T>,
    n: u32,
    opts: BuildOptions,
) -> Result<OperatorMatrix<T>> {
    if n < 1 {
        return Err(Error::Range("periodized operators need n ≥ 1".into()));
    }
    check_dense(n)?;
    Ok(OperatorMatrix::from_parts(n, Basis::Scaling, assemble(kind, n, opts)))
}

fn assemble<T: Real>(kind: PeriodizedKind<T>, n: u32, opts: BuildOptions) -> CMatrix<T> {
    let d = 1usize << n;
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let projected = opts.truncation == Truncation::Projected;
    let tail = |e: i32| if projected { T::pow2(e) } else { T::zero() };
    let combine = |parts: &[(Complex<T>, PeriodizedKind<T>)]| {
        let mut m = CMatrix::zeros(d, d);
        for &(c, k) in parts {
            if c != Complex::new(T::zero(), T::zero()) {
                m += assemble(k, n, opts) * c;
            }
        }
        m
    };
    match kind {
        PeriodizedKind::Cx => {
            let mut m = CMatrix::zeros(d, d);
            dyadic_gate_sum(GateTag::X, n, one, &mut m);
            add_identity(&mut m, scalar::creal(tail(-(n as i32))));
            m
        }
        PeriodizedKind::Cy => {
            let mut m = CMatrix::zeros(d, d);
            dyadic_gate_sum(GateTag::Y, n, one, &mut m);
            m
        }
        PeriodizedKind::CPlus | PeriodizedKind::CMinus => {
            let tag = if kind == PeriodizedKind::CPlus { GateTag::Plus } else { GateTag::Minus };
            let mut m = CMatrix::zeros(d, d);
            dyadic_gate_sum(tag, n, one, &mut m);
            add_identity(&mut m, scalar::creal(tail(-(n as i32) - 1)));
            m
        }
        PeriodizedKind::Cz => {
            CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |j, _| {
                scalar::creal(cz_cell_average::<T>(n, j))
            }))
        }
        PeriodizedKind::V => CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |j, _| {
            scalar::creal(-cz_cell_average::<T>(n, j) * T::lit(0.5))
        })),
        PeriodizedKind::L => antiderivative_matrix(n, opts.antiderivative),
        PeriodizedKind::LT => antiderivative_matrix(n, opts.antiderivative).transpose(),
        PeriodizedKind::K => combine(&[(i, PeriodizedKind::LT), (-i, PeriodizedKind::L)]),
        PeriodizedKind::PMinus => combine(&[(one, PeriodizedKind::CMinus), (one, PeriodizedKind::L)]),
        PeriodizedKind::PPlus => combine(&[(one, PeriodizedKind::CPlus), (one, PeriodizedKind::LT)]),
        PeriodizedKind::CTheta(theta) => combine(&[
            (scalar::creal(theta.cos()), PeriodizedKind::Cx),
            (scalar::creal(theta.sin()), PeriodizedKind::Cy),
        ]),
        PeriodizedKind::CThetaCorrected(theta) => combine(&[
            (one, PeriodizedKind::CTheta(theta)),
            (scalar::creal(theta.sin()), PeriodizedKind::K),
        ]),
        PeriodizedKind::Bloch(w) => combine(&[
            (scalar::creal(w.alpha), PeriodizedKind::Cx),
            (scalar::creal(w.beta), PeriodizedKind::Cy),
            (scalar::creal(w.gamma), PeriodizedKind::Cz),
        ]),
    }
}

/// Applies `Π_n C Π_n` to a vector at its own resolution without forming a
/// matrix: O(n·2^n) through the digit formulas, with prefix sums for `L`.
pub fn apply_periodized<T: Real>(kind: PeriodizedKind<T>, v: &DyadicVector<T>) -> Result<DyadicVector<T>> {
    apply_with(kind, v, BuildOptions::default())
}

pub fn apply_with<T: Real>(
    kind: PeriodizedKind<T>,
    v: &DyadicVector<T>,
    opts: BuildOptions,
) -> Result<DyadicVector<T>> {
    let n = v.resolution();
    if n < 1 {
        return Err(Error::Range("periodized operators need n ≥ 1".into()));
    }
    let mut out = vec![Complex::new(T::zero(), T::zero()); v.len()];
    accumulate_apply(kind, n, opts, Complex::new(T::one(), T::zero()), v.coeffs(), &mut out);
    Ok(DyadicVector::from_vec_unchecked(n, out))
}

fn accumulate_apply<T: Real>(
    kind: PeriodizedKind<T>,
    n: u32,
    opts: BuildOptions,
    w: Complex<T>,
    x: &[Complex<T>],
    out: &mut [Complex<T>],
) {
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let projected = opts.truncation == Truncation::Projected;
    let gate_sum = |tag: GateTag, out: &mut [Complex<T>]| {
        for k in 1..=n {
            gates::accumulate_gate_action(tag, k, n, w * T::pow2(-(k as i32)), x, out);
        }
    };
    let identity = |c: T, out: &mut [Complex<T>]| {
        if projected {
            for (o, z) in out.iter_mut().zip(x) {
                *o += w * z * c;
            }
        }
    };
    let sub = |k: PeriodizedKind<T>, c: Complex<T>, out: &mut [Complex<T>]| {
        if c != Complex::new(T::zero(), T::zero()) {
            accumulate_apply(k, n, opts, w * c, x, out);
        }
    };
    match kind {
        PeriodizedKind::Cx => {
            gate_sum(GateTag::X, out);
            identity(T::pow2(-(n as i32)), out);
        }
        PeriodizedKind::Cy => gate_sum(GateTag::Y, out),
        PeriodizedKind::CPlus => {
            gate_sum(GateTag::Plus, out);
            identity(T::pow2(-(n as i32) - 1), out);
        }
        PeriodizedKind::CMinus => {
            gate_sum(GateTag::Minus, out);
            identity(T::pow2(-(n as i32) - 1), out);
        }
        PeriodizedKind::Cz => {
            for (j, (o, z)) in out.iter_mut().zip(x).enumerate() {
                *o += w * z * cz_cell_average::<T>(n, j);
            }
        }
        PeriodizedKind::V => {
            for (j, (o, z)) in out.iter_mut().zip(x).enumerate() {
                *o -= w * z * (cz_cell_average::<T>(n, j) * T::lit(0.5));
            }
        }
        PeriodizedKind::L | PeriodizedKind::LT => {
            let lower = matches!(kind, PeriodizedKind::L)
                == matches!(opts.antiderivative, AntiderivativeForm::Galerkin);
            let (strict, diag) = match opts.antiderivative {
                AntiderivativeForm::Galerkin => {
                    let h = T::pow2(-(n as i32));
                    (h, h * T::lit(0.5))
                }
                AntiderivativeForm::Appendix => (T::one(), T::zero()),
            };
            // running sum over j < i (lower) or j > i (upper)
            let mut acc = Complex::new(T::zero(), T::zero());
            let mut step = |idx: usize, out: &mut [Complex<T>]| {
                out[idx] += w * (acc * strict + x[idx] * diag);
                acc += x[idx];
            };
            if lower {
                (0..x.len()).for_each(|idx| step(idx, out));
            } else {
                (0..x.len()).rev().for_each(|idx| step(idx, out));
            }
        }
        PeriodizedKind::K => {
            sub(PeriodizedKind::LT, i, out);
            sub(PeriodizedKind::L, -i, out);
        }
        PeriodizedKind::PMinus => {
            sub(PeriodizedKind::CMinus, one, out);
            sub(PeriodizedKind::L, one, out);
        }
        PeriodizedKind::PPlus => {
            sub(PeriodizedKind::CPlus, one, out);
            sub(PeriodizedKind::LT, one, out);
        }
        PeriodizedKind::CTheta(t) => {
            sub(PeriodizedKind::Cx, scalar::creal(t.cos()), out);
            sub(PeriodizedKind::Cy, scalar::creal(t.sin()), out);
        }
        PeriodizedKind::CThetaCorrected(t) => {
            sub(PeriodizedKind::CTheta(t), one, out);
            sub(PeriodizedKind::K, scalar::creal(t.sin()), out);
        }
        PeriodizedKind::Bloch(b) => {
            sub(PeriodizedKind::Cx, scalar::creal(b.alpha), out);
            sub(PeriodizedKind::Cy, scalar::creal(b.beta), out);
            sub(PeriodizedKind::Cz, scalar::creal(b.gamma), out);
        }
    }
}

/// `‖M χ_n - χ_n‖` for `M ∈ {P_-, P_+}` and the normalized constant `χ_n`.
pub fn fixed_vector_check<T: Real>(kind: PeriodizedKind<T>, n: u32) -> Result<T> {
    if !matches!(kind, PeriodizedKind::PMinus | PeriodizedKind::PPlus) {
        return Err(Error::InvalidData(format!(
            "fixed-vector check applies to pminus/pplus, not {}",
            kind.name()
        )));
    }
    let m = build_projected(kind, n)?;
    let chi = DyadicVector::constant(n);
    Ok(m.apply(&chi)?.sub(&chi)?.norm())
}

/// Largest singular value.
pub fn operator_norm<T: LinalgReal>(m: &OperatorMatrix<T>) -> T {
    let svd = nalgebra::linalg::SVD::new(m.entries().clone(), false, false);
    svd.singular_values.iter().fold(T::zero(), |a, &s| Float::max(a, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::conjugate_to_haar;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn assert_entries(m: &OperatorMatrix<f64>, rows: &[&[f64]]) {
        for (i, row) in rows.iter().enumerate() {
            for (j, &want) in row.iter().enumerate() {
                let got = m.get(i, j);
                assert!((got - c(want)).norm() < 1e-15, "({i},{j}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn finite_array_examples() {
        let z = build_finite_array(Axis::Z, &LambdaWeights::new(vec![0.5, 0.25]).unwrap()).unwrap();
        assert_entries(
            &z,
            &[
                &[0.75, 0.0, 0.0, 0.0],
                &[0.0, 0.25, 0.0, 0.0],
                &[0.0, 0.0, -0.25, 0.0],
                &[0.0, 0.0, 0.0, -0.75],
            ],
        );
        let x = build_finite_array(Axis::X, &LambdaWeights::new(vec![0.5]).unwrap()).unwrap();
        assert_entries(&x, &[&[0.0, 0.5], &[0.5, 0.0]]);
        assert!(LambdaWeights::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn closed_form_eigs() {
        let e = finite_eigs_closed_form(&LambdaWeights::new(vec![0.5, 0.25]).unwrap());
        assert_eq!(e, vec![-0.75, -0.25, 0.25, 0.75]);
        let e = finite_eigs_closed_form(&LambdaWeights::new(vec![1.0]).unwrap());
        assert_eq!(e, vec![-1.0, 1.0]);
    }

    #[test]
    fn projected_examples() {
        let half = [&[0.5, 0.5][..], &[0.5, 0.5][..]];
        assert_entries(&build_projected(PeriodizedKind::PMinus, 1).unwrap(), &half);
        assert_entries(&build_projected(PeriodizedKind::Cx, 1).unwrap(), &half);
        let cz = build_projected::<f64>(PeriodizedKind::Cz, 2).unwrap();
        for (j, d) in [0.75, 0.25, -0.25, -0.75].iter().enumerate() {
            assert_eq!(cz.get(j, j), c(*d));
        }
        let hp = conjugate_to_haar(&build_projected::<f64>(PeriodizedKind::PMinus, 1).unwrap()).unwrap();
        assert_entries(&hp, &[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(matches!(build_projected::<f64>(PeriodizedKind::Cx, 0), Err(Error::Range(_))));
    }

    #[test]
    fn antiderivative_entries() {
        let l = build_projected::<f64>(PeriodizedKind::L, 2).unwrap();
        assert_entries(
            &l,
            &[
                &[0.125, 0.0, 0.0, 0.0],
                &[0.25, 0.125, 0.0, 0.0],
                &[0.25, 0.25, 0.125, 0.0],
                &[0.25, 0.25, 0.25, 0.125],
            ],
        );
        let opts = BuildOptions { antiderivative: AntiderivativeForm::Appendix, ..Default::default() };
        let a = build_with::<f64>(PeriodizedKind::L, 2, opts).unwrap();
        assert_eq!(a.get(0, 3), c(1.0));
        assert_eq!(a.get(3, 0), c(0.0));
        assert_eq!(a.get(1, 1), c(0.0));
    }

    #[test]
    fn cz_matches_gate_sum() {
        for n in 1..=6 {
            let cz = build_projected::<f64>(PeriodizedKind::Cz, n).unwrap();
            let sum = build_finite_array(Axis::Z, &LambdaWeights::dyadic(n).unwrap()).unwrap();
            assert!(cz.max_abs_diff(&sum).unwrap() < 1e-15);
        }
    }

    #[test]
    fn tails_toggle() {
        let opts = BuildOptions { truncation: Truncation::Naive, ..Default::default() };
        let naive = build_with::<f64>(PeriodizedKind::Cx, 1, opts).unwrap();
        assert_entries(&naive, &[&[0.0, 0.5], &[0.5, 0.0]]);
        let cy_naive = build_with::<f64>(PeriodizedKind::Cy, 3, opts).unwrap();
        let cy = build_projected::<f64>(PeriodizedKind::Cy, 3).unwrap();
        assert_eq!(cy_naive, cy);
    }

    #[test]
    fn apply_matches_matrix() {
        let kinds = [
            PeriodizedKind::Cx,
            PeriodizedKind::Cy,
            PeriodizedKind::Cz,
            PeriodizedKind::CPlus,
            PeriodizedKind::CMinus,
            PeriodizedKind::L,
            PeriodizedKind::LT,
            PeriodizedKind::K,
            PeriodizedKind::PMinus,
            PeriodizedKind::PPlus,
            PeriodizedKind::CTheta(0.7),
            PeriodizedKind::CThetaCorrected(2.1),
            PeriodizedKind::V,
            PeriodizedKind::Bloch(BlochWeights::new(0.6, 0.0, 0.8).unwrap()),
        ];
        let v = DyadicVector::new(
            4,
            (0..16).map(|j| Complex::new((j as f64 * 0.37).sin(), (j as f64 * 0.11).cos())).collect(),
        )
        .unwrap();
        for appendix in [false, true] {
            for trunc in [Truncation::Projected, Truncation::Naive] {
                let opts = BuildOptions {
                    truncation: trunc,
                    antiderivative: if appendix {
                        AntiderivativeForm::Appendix
                    } else {
                        AntiderivativeForm::Galerkin
                    },
                };
                for k in kinds {
                    let a = apply_with(k, &v, opts).unwrap();
                    let b = build_with(k, 4, opts).unwrap().apply(&v).unwrap();
                    assert!(a.max_abs_diff(&b).unwrap() < 1e-13, "{k}");
                }
            }
        }
    }

    #[test]
    fn cminus_on_constant_is_one_minus_x() {
        let n = 4;
        let chi = DyadicVector::<f64>::constant(n);
        let out = apply_periodized(PeriodizedKind::CMinus, &chi).unwrap();
        // cell averages of 1 - x times the normalization of χ
        for (j, z) in out.cell_values().iter().enumerate() {
            let avg = 1.0 - (j as f64 + 0.5) / 16.0;
            assert_abs_diff_eq!(z.re, avg, epsilon = 1e-15);
        }
        let cx = apply_periodized(PeriodizedKind::Cx, &chi).unwrap();
        assert!(cx.max_abs_diff(&chi).unwrap() < 1e-15);
    }

    #[test]
    fn fixed_vectors() {
        assert_eq!(fixed_vector_check::<f64>(PeriodizedKind::PMinus, 1).unwrap(), 0.0);
        assert!(fixed_vector_check::<f64>(PeriodizedKind::PMinus, 6).unwrap() <= 1e-12);
        assert!(fixed_vector_check::<f64>(PeriodizedKind::PPlus, 6).unwrap() <= 1e-12);
        assert!(fixed_vector_check::<f64>(PeriodizedKind::Cx, 2).is_err());
    }

    #[test]
    fn norms() {
        let i = OperatorMatrix::<f64>::identity(3, Basis::Scaling);
        assert_abs_diff_eq!(operator_norm(&i), 1.0, epsilon = 1e-12);
        let x = build_finite_array(Axis::X, &LambdaWeights::new(vec![0.5]).unwrap()).unwrap();
        assert_abs_diff_eq!(operator_norm(&x), 0.5, epsilon = 1e-12);
        let ct = build_projected(PeriodizedKind::CTheta(1.0), 8).unwrap();
        assert!(operator_norm(&ct) <= 1.0 + 1e-10);
    }

    #[test]
    fn bloch_weights_validated() {
        assert!(BlochWeights::new(1.0, 1.0, 0.0).is_err());
        assert!(BlochWeights::new(0.0, 0.0, 1.0).is_ok());
        assert!(PeriodizedKind::<f64>::parse("ctheta", None, None).is_err());
        assert_eq!(
            PeriodizedKind::<f64>::parse("pminus", None, None).unwrap(),
            PeriodizedKind::PMinus
        );
    }

    #[test]
    fn resource_limit() {
        if std::env::var_os("MULTIRES_MAX_N").is_none() {
            assert!(matches!(
                build_projected::<f64>(PeriodizedKind::Cx, DEFAULT_MAX_RESOLUTION + 1),
                Err(Error::ResourceLimit { .. })
            ));
        }
    }
}
