//! Self-checks reproducing the library's numerical claims. Each criterion
//! is a list of named measurements with tolerances; a criterion passes when
//! every measurement does.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dyadic::DyadicVector;
use crate::dynamics::{characteristic_flow, evolve_wigner, rotation_centers, FlowParams, Gaussian, WignerGrid};
use crate::error::{Error, Result};
use crate::gates::{dft_oracle, oracle_gap, qft_borel, GateKind, GateTag};
use crate::haar::{conjugate_to_haar, haar_forward, haar_inverse, haar_matrix};
use crate::operator::{max_abs_diff, CMatrix, OperatorMatrix};
use crate::periodized::{
    apply_periodized, build_finite_array, build_projected, finite_eigs_closed_form, fixed_vector_check,
    operator_norm, Axis, LambdaWeights, PeriodizedKind,
};
use crate::spectra::{
    dense_eig_oracle, eig_recurrence_theta, extract_blocks, recurrence_apply_theta, recurrence_d,
    recurrence_d_minus, recurrence_d_plus, recurrence_d_theta, remainder_matrix, spectrum_closed_form,
    PhaseConvention,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Haar,
    Gates,
    Finite,
    Blocks,
    Equator,
    Eigvec,
    Fixed,
    Norm,
    Remainder,
    Qft,
    Adjoint,
    Dynamics,
    Density,
}

impl Criterion {
    pub const ALL: [Criterion; 13] = [
        Criterion::Haar,
        Criterion::Gates,
        Criterion::Finite,
        Criterion::Blocks,
        Criterion::Equator,
        Criterion::Eigvec,
        Criterion::Fixed,
        Criterion::Norm,
        Criterion::Remainder,
        Criterion::Qft,
        Criterion::Adjoint,
        Criterion::Dynamics,
        Criterion::Density,
    ];

    pub fn number(self) -> usize {
        Self::ALL.iter().position(|&c| c == self).unwrap() + 1
    }

    pub fn key(self) -> &'static str {
        match self {
            Criterion::Haar => "haar",
            Criterion::Gates => "gates",
            Criterion::Finite => "finite",
            Criterion::Blocks => "blocks",
            Criterion::Equator => "equator",
            Criterion::Eigvec => "eigvec",
            Criterion::Fixed => "fixed",
            Criterion::Norm => "norm",
            Criterion::Remainder => "remainder",
            Criterion::Qft => "qft",
            Criterion::Adjoint => "adjoint",
            Criterion::Dynamics => "dynamics",
            Criterion::Density => "density",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Criterion::Haar => "Haar transform unitarity",
            Criterion::Gates => "gate action equals Kronecker matrix",
            Criterion::Finite => "finite-array spectra and block pattern",
            Criterion::Blocks => "block structure of projected P- and P+",
            Criterion::Equator => "corrected equator blocks",
            Criterion::Eigvec => "eigenvector recurrence residuals",
            Criterion::Fixed => "fixed vectors of P- and P+",
            Criterion::Norm => "operator norm bounds",
            Criterion::Remainder => "remainder identity and corner concentration",
            Criterion::Qft => "QFT circuit equals DFT",
            Criterion::Adjoint => "antiderivative skew-adjointness",
            Criterion::Dynamics => "Wigner-plane flow",
            Criterion::Density => "spectrum density",
        }
    }

    /// Resolution used when none is requested.
    pub fn default_n(self) -> u32 {
        match self {
            Criterion::Haar => 12,
            Criterion::Gates | Criterion::Finite | Criterion::Norm | Criterion::Qft => 8,
            _ => 10,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.key() == s || c.number().to_string() == s)
            .ok_or_else(|| Error::InvalidData(format!("unknown criterion `{s}`")))
    }
}

/// One measured quantity compared against its tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance, passed: measured <= tolerance }
    }

    fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), measured: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, passed: ok }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub number: usize,
    pub n: u32,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub seconds: f64,
}

impl CriterionReport {
    /// The failing check with the largest measured/tolerance ratio, or the
    /// tightest passing one.
    pub fn worst(&self) -> Option<&Check> {
        let ratio = |c: &Check| if c.tolerance > 0.0 { c.measured / c.tolerance } else { c.measured };
        self.checks
            .iter()
            .filter(|c| c.passed == self.passed)
            .max_by(|a, b| ratio(a).partial_cmp(&ratio(b)).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// `PASS [ 4] blocks: … (max … ≤ …)`.
    pub fn summary_line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let worst = self
            .worst()
            .map(|c| format!("{} = {:.3e} (tol {:.1e})", c.name, c.measured, c.tolerance))
            .unwrap_or_default();
        format!(
            "{verdict} [{:>2}] {:<9} n={:<2} {:>7.2}s  {}",
            self.number,
            self.criterion.key(),
            self.n,
            self.seconds,
            worst
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Overrides every criterion's default resolution.
    pub n: Option<u32>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { n: None, seed: 0x5eed }
    }
}

pub fn run(criteria: &[Criterion], opts: &VerifyOptions) -> Result<Vec<CriterionReport>> {
    criteria.iter().map(|&c| run_one(c, opts)).collect()
}

pub fn run_one(criterion: Criterion, opts: &VerifyOptions) -> Result<CriterionReport> {
    let n = opts.n.unwrap_or_else(|| criterion.default_n());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ criterion.number() as u64);
    let start = Instant::now();
    let mut notes = Vec::new();
    let checks = match criterion {
        Criterion::Haar => haar(n, &mut rng)?,
        Criterion::Gates => gates(n)?,
        Criterion::Finite => finite(n)?,
        Criterion::Blocks => blocks(n)?,
        Criterion::Equator => equator(n)?,
        Criterion::Eigvec => eigvec(n)?,
        Criterion::Fixed => fixed(n)?,
        Criterion::Norm => norm(n, &mut notes)?,
        Criterion::Remainder => remainder(n, &mut notes)?,
        Criterion::Qft => qft(n, &mut rng)?,
        Criterion::Adjoint => adjoint(n, &mut rng)?,
        Criterion::Dynamics => dynamics(n)?,
        Criterion::Density => density(n, &mut notes)?,
    };
    Ok(CriterionReport {
        criterion,
        number: criterion.number(),
        n,
        passed: checks.iter().all(|c| c.passed),
        checks,
        notes,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn random_vector(n: u32, rng: &mut impl Rng) -> DyadicVector<f64> {
    let c: Vec<Complex<f64>> = (0..1usize << n)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let v = DyadicVector::new(n, c).expect("finite");
    let s = 1.0 / v.norm();
    v.scale(Complex::new(s, 0.0))
}

fn haar(n_max: u32, rng: &mut impl Rng) -> Result<Vec<Check>> {
    let (mut round, mut parseval, mut dense) = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..=n_max {
        for _ in 0..4 {
            let v = random_vector(n, rng);
            let h = haar_forward(&v);
            round = round.max(haar_inverse(&h).max_abs_diff(&v)?);
            parseval = parseval.max((h.norm() - v.norm()).abs());
        }
        if n <= 10 {
            let m = haar_matrix::<f64>(n);
            for j in 0..1usize << n {
                let col = haar_forward(&DyadicVector::<f64>::basis(n, j)?);
                for (i, z) in col.coeffs().iter().enumerate() {
                    let d: Complex<f64> = *z - m.get(i, j);
                    dense = dense.max(d.norm());
                }
            }
        }
    }
    Ok(vec![
        Check::at_most("round-trip error", round, 1e-12),
        Check::at_most("Parseval error", parseval, 1e-12),
        Check::at_most("fast vs dense", dense, 1e-12),
    ])
}

fn gates(n_max: u32) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        for k in 1..=n {
            for tag in GateTag::ALL {
                worst = worst.max(oracle_gap::<f64>(GateKind::new(tag, k)?, n)?);
            }
        }
    }
    Ok(vec![Check::at_most("action vs Kronecker", worst, 1e-13)])
}

fn finite(n_max: u32) -> Result<Vec<Check>> {
    let mut spectra_err = 0.0f64;
    for n in 1..=n_max {
        let lambda = LambdaWeights::<f64>::dyadic(n)?;
        let m = build_finite_array(Axis::X, &lambda)?;
        let eig = dense_eig_oracle(m.entries())?;
        let want = finite_eigs_closed_form(&lambda);
        for (a, b) in eig.values.iter().zip(&want) {
            spectra_err = spectra_err.max((a - b).norm());
        }
    }
    let lambda = LambdaWeights::<f64>::dyadic(2)?;
    let (l1, l2) = (lambda.as_slice()[0], lambda.as_slice()[1]);
    let h = conjugate_to_haar(&build_finite_array(Axis::X, &lambda)?)?;
    let mut want = CMatrix::<f64>::zeros(4, 4);
    want[(0, 0)] = (l1 + l2).into();
    want[(1, 1)] = (l2 - l1).into();
    want[(2, 2)] = (-l2).into();
    want[(3, 3)] = (-l2).into();
    want[(2, 3)] = l1.into();
    want[(3, 2)] = l1.into();
    Ok(vec![
        Check::at_most("eigenvalues vs signed sums", spectra_err, 1e-10),
        Check::at_most("n=2 Haar block pattern", max_abs_diff(h.entries(), &want), 1e-12),
    ])
}

fn haar_projected(kind: PeriodizedKind<f64>, n: u32) -> Result<OperatorMatrix<f64>> {
    conjugate_to_haar(&build_projected(kind, n)?)
}

fn blocks(n_max: u32) -> Result<Vec<Check>> {
    let (mut off, mut entry) = (0.0f64, 0.0f64);
    for n in 1..=n_max {
        for (kind, rec) in [
            (PeriodizedKind::PMinus, recurrence_d_minus::<f64> as fn(u32) -> CMatrix<f64>),
            (PeriodizedKind::PPlus, recurrence_d_plus::<f64>),
        ] {
            let bl = extract_blocks(&haar_projected(kind, n)?)?;
            off = off.max(bl.off_block_residual);
            entry = entry.max((bl.blocks[0][(0, 0)] - Complex::new(1.0, 0.0)).norm());
            for m in 0..n {
                entry = entry.max(max_abs_diff(bl.detail(m).unwrap(), &rec(m)));
            }
        }
    }
    Ok(vec![
        Check::at_most("off-block Frobenius residual", off, 1e-12),
        Check::at_most("blocks vs recurrence", entry, 1e-12),
    ])
}

fn sorted_real_eigs(m: &CMatrix<f64>) -> Result<Vec<f64>> {
    Ok(dense_eig_oracle(m)?.values.iter().map(|z| z.re).collect())
}

fn equator(n: u32) -> Result<Vec<Check>> {
    const DENSE_LEVEL: u32 = 7;
    let (mut off, mut coarse, mut entry, mut spectra_err, mut swapped, mut zero) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for theta in [0.0, FRAC_PI_3, FRAC_PI_2, 1.0, PI] {
        let bl = extract_blocks(&haar_projected(PeriodizedKind::CThetaCorrected(theta), n)?)?;
        off = off.max(bl.off_block_residual);
        coarse = coarse.max((bl.blocks[0][(0, 0)] - Complex::new(theta.cos(), 0.0)).norm());
        for m in 0..n {
            let block = bl.detail(m).unwrap();
            entry = entry.max(max_abs_diff(block, &recurrence_d_theta(m, theta, PhaseConvention::Derived)));
            if theta == 0.0 {
                zero = zero.max(max_abs_diff(block, &recurrence_d(m)));
            }
            if (1..=DENSE_LEVEL).contains(&m) {
                let got = sorted_real_eigs(block)?;
                let closed = spectrum_closed_form::<f64>(m)?;
                let pform = sorted_real_eigs(&recurrence_d_theta(m, theta, PhaseConvention::Conjugate))?;
                for ((g, c), p) in got.iter().zip(&closed).zip(&pform) {
                    spectra_err = spectra_err.max((g - c).abs());
                    swapped = swapped.max((g - p).abs());
                }
            }
        }
    }
    Ok(vec![
        Check::at_most("off-block Frobenius residual", off, 1e-12),
        Check::at_most("coarse block vs cos θ", coarse, 1e-12),
        Check::at_most("blocks vs phase recurrence", entry, 1e-12),
        Check::at_most("block spectra vs ±(2k+1)/2^m", spectra_err, 1e-10),
        Check::at_most("block spectra vs conjugate-placement recurrence", swapped, 1e-10),
        Check::at_most("θ=0 blocks vs D recurrence", zero, 1e-15),
    ])
}

fn eigvec(n_max: u32) -> Result<Vec<Check>> {
    let (mut resid, mut unit, mut count) = (0.0f64, 0.0f64, true);
    for n in 1..=n_max {
        for j in 0..8 {
            let theta = TAU * j as f64 / 8.0 + 0.1;
            let pairs = eig_recurrence_theta(n, theta, PhaseConvention::Derived)?;
            count &= pairs.len() == 1usize << n;
            for p in &pairs {
                let dv = recurrence_apply_theta(theta, PhaseConvention::Derived, &p.vector)?;
                let r: f64 = dv.iter().zip(&p.vector).map(|(a, v)| (a - p.value * v).norm_sqr()).sum();
                resid = resid.max(r.sqrt());
                let norm: f64 = p.vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                unit = unit.max((norm - 1.0).abs());
            }
        }
    }
    Ok(vec![
        Check::at_most("max ‖Dv - λv‖", resid, 1e-10),
        Check::at_most("max |‖v‖ - 1|", unit, 1e-12),
        Check::holds("2^n pairs per level", count),
    ])
}

fn fixed(n_max: u32) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        worst = worst.max(fixed_vector_check(PeriodizedKind::<f64>::PMinus, n)?);
        worst = worst.max(fixed_vector_check(PeriodizedKind::<f64>::PPlus, n)?);
    }
    Ok(vec![Check::at_most("‖Pχ - χ‖", worst, 1e-12)])
}

/// `max(|cos θ|, (2^{n-1}-1)/2^{n-1})`, the exact norm of the projected
/// corrected operator at resolution `n`.
pub fn corrected_norm_exact(n: u32, theta: f64) -> f64 {
    let top = 1.0 - 0.5f64.powi(n as i32 - 1);
    theta.cos().abs().max(top)
}

fn norm(n: u32, notes: &mut Vec<String>) -> Result<Vec<Check>> {
    let target = 1.0 - 0.5f64.powi(n as i32);
    let (mut excess, mut dev, mut exact_dev) = (0.0f64, 0.0f64, 0.0f64);
    let mut worst_theta = 0.0;
    for j in 0..32 {
        let theta = TAU * j as f64 / 32.0;
        let c = operator_norm(&build_projected(PeriodizedKind::CTheta(theta), n)?);
        excess = excess.max(c - 1.0);
        let k = operator_norm(&build_projected(PeriodizedKind::CThetaCorrected(theta), n)?);
        if (k - target).abs() > dev {
            dev = (k - target).abs();
            worst_theta = theta;
        }
        exact_dev = exact_dev.max((k - corrected_norm_exact(n, theta)).abs());
    }
    notes.push(format!(
        "corrected norm deviates most from (2^n-1)/2^n at θ = {worst_theta:.4}; \
         max deviation from max(|cos θ|, (2^(n-1)-1)/2^(n-1)) is {exact_dev:.3e}"
    ));
    Ok(vec![
        Check::at_most("‖C_θ‖ - 1", excess.max(0.0), 1e-10),
        Check::at_most("|‖C_θ + sin θ K‖ - (2^n-1)/2^n|", dev, 1e-10),
    ])
}

fn remainder(n: u32, notes: &mut Vec<String>) -> Result<Vec<Check>> {
    let rep = remainder_matrix::<f64>(n)?;
    notes.push(format!(
        "largest |R| = {:.4} at (row {}, col {}), zero-based",
        rep.max_magnitude, rep.argmax.0, rep.argmax.1
    ));
    Ok(vec![
        Check::at_most("R + offblock(haar K)", rep.identity_residual, 1e-13),
        Check::at_most("offblock(haar(C_y + K)) Frobenius", rep.corrected_off_block, 1e-12),
        Check::holds("argmax in leading 4x4 corner", rep.argmax_in_corner(4)),
    ])
}

fn qft(n_max: u32, rng: &mut impl Rng) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        for _ in 0..100 {
            let v = random_vector(n, rng);
            worst = worst.max(qft_borel(&v).max_abs_diff(&dft_oracle(&v))?);
        }
    }
    Ok(vec![Check::at_most("QFT vs DFT", worst, 1e-12)])
}

fn adjoint(n_max: u32, rng: &mut impl Rng) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    let mean_zero = |v: DyadicVector<f64>| {
        let m = v.coeffs().iter().sum::<Complex<f64>>() / v.len() as f64;
        DyadicVector::new(v.resolution(), v.coeffs().iter().map(|z| z - m).collect()).expect("finite")
    };
    for n in 1..=n_max {
        for _ in 0..8 {
            let f = mean_zero(random_vector(n, rng));
            let g = mean_zero(random_vector(n, rng));
            let lf = apply_periodized(PeriodizedKind::L, &f)?;
            let lg = apply_periodized(PeriodizedKind::L, &g)?;
            worst = worst.max((g.inner(&lf)? + lg.inner(&f)?).norm());
        }
    }
    Ok(vec![Check::at_most("|⟨g,Lf⟩ + ⟨Lg,f⟩|", worst, 1e-14)])
}

fn dynamics(n_max: u32) -> Result<Vec<Check>> {
    let lambda = 1.5;
    let (mut period, mut fixed, mut spacing) = (0.0f64, 0.0f64, 0.0f64);
    for e in [-1.0, -0.375, 0.0, 0.625, 1.0] {
        let fp = FlowParams::new(lambda, e)?;
        for (q, p) in [(0.0, 0.0), (1.0, -2.0), (-3.5, 0.25)] {
            let (a, b) = characteristic_flow(q, p, TAU, &fp);
            period = period.max((a - q).abs().max((b - p).abs()));
        }
        let (cq, cp) = fp.center();
        for t in [0.3, 1.0, PI, 7.5] {
            let (a, b) = characteristic_flow(cq, cp, t, &fp);
            fixed = fixed.max((a - cq).abs().max((b - cp).abs()));
        }
    }
    for n in 1..=n_max {
        let c = rotation_centers(n, lambda)?;
        let step = lambda * 2f64.powi(1 - n as i32);
        for w in c.windows(2) {
            spacing = spacing.max((w[1] - w[0] - step).abs());
        }
    }
    let fp = FlowParams::new(1.0, 0.625)?;
    let g = Gaussian::isotropic(0.8, -0.4, 0.5)?;
    let grid = WignerGrid::sample((-5.0, 5.0), (-5.0, 5.0), 512, 512, |q, p| g.eval(q, p))?;
    let mass = evolve_wigner(&grid, TAU, &fp).relative_mass_change();
    Ok(vec![
        Check::at_most("t = 2π flow vs identity", period, 1e-12),
        Check::at_most("(-λE, 0) displacement", fixed, 1e-14),
        Check::at_most("center spacing vs λ 2^(1-n)", spacing, 1e-12),
        Check::at_most("relative mass change, 512² grid, one period", mass, 1e-3),
    ])
}

fn density(n_max: u32, notes: &mut Vec<String>) -> Result<Vec<Check>> {
    let mut pts = vec![-1.0, 1.0];
    for n in 1..=n_max {
        pts.extend(spectrum_closed_form::<f64>(n)?);
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let (gap, at) = pts
        .windows(2)
        .map(|w| (w[1] - w[0], 0.5 * (w[0] + w[1])))
        .fold((0.0, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
    notes.push(format!(
        "largest gap {gap:.3e} centred at {at}; covering radius {:.3e}",
        gap / 2.0
    ));
    Ok(vec![Check::at_most("max gap between adjacent points", gap, 0.5f64.powi(n_max as i32))])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(c: Criterion, n: u32) -> CriterionReport {
        run_one(c, &VerifyOptions { n: Some(n), ..Default::default() }).unwrap()
    }

    #[test]
    fn parse_and_number() {
        assert_eq!("blocks".parse::<Criterion>().unwrap(), Criterion::Blocks);
        assert_eq!("13".parse::<Criterion>().unwrap(), Criterion::Density);
        assert_eq!(Criterion::Remainder.number(), 9);
        assert!("nope".parse::<Criterion>().is_err());
    }

    #[test]
    fn small_runs_pass() {
        for c in [
            Criterion::Haar,
            Criterion::Gates,
            Criterion::Finite,
            Criterion::Blocks,
            Criterion::Equator,
            Criterion::Eigvec,
            Criterion::Fixed,
            Criterion::Remainder,
            Criterion::Qft,
            Criterion::Adjoint,
            Criterion::Dynamics,
        ] {
            let r = small(c, 4);
            assert!(r.passed, "{}", r.summary_line());
            assert!(r.summary_line().starts_with("PASS"));
        }
    }

    #[test]
    fn exact_corrected_norm_formula() {
        for theta in [0.0, 0.4, FRAC_PI_2] {
            let k = operator_norm(&build_projected(PeriodizedKind::CThetaCorrected(theta), 5).unwrap());
            assert!((k - corrected_norm_exact(5, theta)).abs() < 1e-10);
        }
    }
}
