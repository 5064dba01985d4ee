use std::fmt;
use std::fs;

use anyhow::{Context, Result};
use num_complex::Complex;
use serde::Serialize;

use multires::dynamics::{self, evolve_wigner, trajectory, FlowParams, Gaussian, WignerGrid};
use multires::gates::{kernel_support, periodized_support, Segment};
use multires::io::{self, fmt_num, BlockListJson, GridJson, OperatorJson, VectorJson};
use multires::periodized::{
    build_finite_array, build_with, max_resolution, AntiderivativeForm, Axis, BlochWeights, BuildOptions,
    LambdaWeights, PeriodizedKind, Truncation,
};
use multires::spectra::{
    eig_recurrence_theta, extract_blocks, recurrence_apply_theta, remainder_matrix, PhaseConvention, Sign,
};
use multires::verify::{self, Criterion, VerifyOptions};
use multires::{conjugate_to_haar, haar_forward, haar_inverse, qft_borel, DyadicVector, Error, GateKind, GateTag};
use multires::{HaarVector, OperatorMatrix};

use crate::output::{emit, Bundle, Format};
use crate::{
    BasisArg, BlocksArgs, BuildArgs, Command, ConventionArg, DynamicsArgs, EigenstateArgs, Figure, FiguresArgs,
    HaarArgs, LForm, OperatorArgs, QftArgs, RemainderArgs, SpectrumArgs, SupportArgs, Tail, VectorSource,
    VerifyArgs,
};

/// Inconsistent or missing arguments that clap cannot catch on its own.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Returns whether every verification criterion passed; other commands
/// always return `true` on success.
pub fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Haar(a) => haar(a),
        Command::Build(a) => build(a),
        Command::Blocks(a) => blocks(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Eigenstate(a) => eigenstate(a),
        Command::Remainder(a) => remainder(a),
        Command::Qft(a) => qft(a),
        Command::Dynamics(a) => dynamics(a),
        Command::Support(a) => support(a),
        Command::Figures(a) => figures(a),
        Command::Verify(a) => verify(a),
    }
}

fn load_vector(src: &VectorSource) -> Result<DyadicVector<f64>> {
    match (&src.input, src.n, src.cell) {
        (Some(path), _, _) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let j: VectorJson = io::from_json(&text)?;
            Ok(DyadicVector::try_from(&j)?)
        }
        (None, Some(n), Some(cell)) => Ok(DyadicVector::basis(n, cell)?),
        _ => Err(usage("give --input FILE or --n N --cell K")),
    }
}

#[derive(Serialize)]
struct CoeffsJson<'a> {
    n: u32,
    basis: &'a str,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn coeffs_out(n: u32, basis: &str, z: &[Complex<f64>], fmt: Format) -> Result<String> {
    Ok(match fmt {
        Format::Json => io::to_json(&CoeffsJson {
            n,
            basis,
            re: z.iter().map(|c| c.re).collect(),
            im: z.iter().map(|c| c.im).collect(),
        })?,
        Format::Csv => {
            let mut s = String::from("index,re,im\n");
            for (i, c) in z.iter().enumerate() {
                s.push_str(&format!("{i},{},{}\n", fmt_num(c.re), fmt_num(c.im)));
            }
            s
        }
    })
}

fn haar(a: HaarArgs) -> Result<bool> {
    let v = load_vector(&a.source)?;
    let text = if a.inverse {
        let h = HaarVector::new(v.resolution(), v.coeffs().to_vec())?;
        let out = haar_inverse(&h);
        coeffs_out(out.resolution(), "scaling", out.coeffs(), a.output.format)?
    } else {
        let h = haar_forward(&v);
        coeffs_out(h.resolution(), "haar", h.coeffs(), a.output.format)?
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(true)
}

fn build_operator(a: &OperatorArgs) -> Result<OperatorMatrix<f64>> {
    let op = a.op.to_ascii_lowercase();
    if let Some(axis) = op.strip_prefix("array-") {
        let axis = match axis {
            "x" => Axis::X,
            "y" => Axis::Y,
            "z" => Axis::Z,
            other => return Err(usage(format!("unknown array axis `{other}`"))),
        };
        return Ok(build_finite_array(axis, &LambdaWeights::dyadic(a.n)?)?);
    }
    let bloch = match &a.bloch {
        Some(w) => Some(BlochWeights::new(w[0], w[1], w[2])?),
        None => None,
    };
    let kind = PeriodizedKind::parse(&op, a.theta, bloch)?;
    let opts = BuildOptions {
        truncation: match a.tail {
            Tail::On => Truncation::Projected,
            Tail::Off => Truncation::Naive,
        },
        antiderivative: lform(a.antiderivative),
    };
    Ok(build_with(kind, a.n, opts)?)
}

fn lform(f: LForm) -> AntiderivativeForm {
    match f {
        LForm::Galerkin => AntiderivativeForm::Galerkin,
        LForm::Appendix => AntiderivativeForm::Appendix,
    }
}

fn sparse_csv(header: &str, rows: impl Iterator<Item = (String, Complex<f64>)>) -> String {
    let mut s = format!("{header},re,im\n");
    for (key, z) in rows {
        if z.re != 0.0 || z.im != 0.0 {
            s.push_str(&format!("{key},{},{}\n", fmt_num(z.re), fmt_num(z.im)));
        }
    }
    s
}

fn matrix_entries(m: &multires::CMatrix<f64>) -> impl Iterator<Item = (usize, usize, Complex<f64>)> + '_ {
    let c = m.ncols();
    (0..m.nrows()).flat_map(move |i| (0..c).map(move |j| (i, j, m[(i, j)])))
}

fn build(a: BuildArgs) -> Result<bool> {
    let mut m = build_operator(&a.operator)?;
    if a.basis == BasisArg::Haar {
        m = conjugate_to_haar(&m)?;
    }
    let text = match a.output.format {
        Format::Json => io::to_json(&OperatorJson::from(&m))?,
        Format::Csv => sparse_csv("row,col", matrix_entries(m.entries()).map(|(i, j, z)| (format!("{i},{j}"), z))),
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(true)
}

fn blocks(a: BlocksArgs) -> Result<bool> {
    let m = conjugate_to_haar(&build_operator(&a.operator)?)?;
    let bl = extract_blocks(&m)?;
    let text = match a.output.format {
        Format::Json => io::to_json(&BlockListJson::from(&bl))?,
        Format::Csv => sparse_csv(
            "block,row,col",
            bl.blocks
                .iter()
                .enumerate()
                .flat_map(|(b, blk)| matrix_entries(blk).map(move |(i, j, z)| (format!("{b},{i},{j}"), z)).collect::<Vec<_>>()),
        ),
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(true)
}

fn check_limit(n: u32) -> Result<()> {
    let max = max_resolution();
    if n > max {
        return Err(Error::ResourceLimit { n, max }.into());
    }
    Ok(())
}

#[derive(Serialize)]
struct PairJson {
    n: u32,
    k: usize,
    s: String,
    theta: f64,
    eigenvalue: f64,
    residual: f64,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn spectrum(a: SpectrumArgs) -> Result<bool> {
    check_limit(a.n)?;
    let conv = match a.convention {
        ConventionArg::Derived => PhaseConvention::Derived,
        ConventionArg::Conjugate => PhaseConvention::Conjugate,
    };
    let pairs = eig_recurrence_theta(a.n, a.theta, conv)?;
    let mut rows = Vec::with_capacity(pairs.len());
    for p in pairs {
        let dv = recurrence_apply_theta(a.theta, conv, &p.vector)?;
        let r = dv.iter().zip(&p.vector).map(|(x, v)| (x - p.value * v).norm_sqr()).sum::<f64>().sqrt();
        rows.push((p, r));
    }
    let text = match a.format {
        Format::Csv => io::spectrum_csv(&rows)?,
        Format::Json => io::to_json(
            &rows
                .iter()
                .map(|(p, r)| PairJson {
                    n: p.level,
                    k: p.k,
                    s: p.sign.to_string(),
                    theta: p.theta,
                    eigenvalue: p.value.re,
                    residual: *r,
                    re: p.vector.iter().map(|z| z.re).collect(),
                    im: p.vector.iter().map(|z| z.im).collect(),
                })
                .collect::<Vec<_>>(),
        )?,
    };
    emit(a.out.as_deref(), &text)?;
    Ok(true)
}

#[derive(Serialize)]
struct EigenstateJson {
    n: u32,
    k: usize,
    s: String,
    theta: f64,
    energy: f64,
    resolution: u32,
    residual: f64,
    haar: VectorJson,
    samples: VectorJson,
}

fn eigenstate_json(e: &dynamics::Eigenstate<f64>) -> Result<String> {
    let (re, im) = e.haar.coeffs().iter().map(|z| (z.re, z.im)).unzip();
    Ok(io::to_json(&EigenstateJson {
        n: e.n,
        k: e.k,
        s: e.sign.to_string(),
        theta: e.theta,
        energy: e.energy,
        resolution: e.samples.resolution(),
        residual: e.residual,
        haar: VectorJson { n: e.haar.resolution(), re, im },
        samples: VectorJson::from(&e.samples),
    })?)
}

fn eigenstate(a: EigenstateArgs) -> Result<bool> {
    let e = dynamics::eigenstate(a.n, a.k, a.s, a.theta)?;
    let text = match a.output.format {
        Format::Json => eigenstate_json(&e)?,
        Format::Csv => io::eigenstate_csv(&e)?,
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(true)
}

#[derive(Serialize)]
struct RemainderJson {
    n: u32,
    per_scale_max: Vec<f64>,
    argmax: [usize; 2],
    max_magnitude: f64,
    identity_residual: f64,
    corrected_off_block: f64,
}

fn remainder_stats(n: u32, rep: &multires::spectra::RemainderReport<f64>) -> Result<String> {
    Ok(io::to_json(&RemainderJson {
        n,
        per_scale_max: rep.per_scale_max.clone(),
        argmax: [rep.argmax.0, rep.argmax.1],
        max_magnitude: rep.max_magnitude,
        identity_residual: rep.identity_residual,
        corrected_off_block: rep.corrected_off_block,
    })?)
}

fn remainder(a: RemainderArgs) -> Result<bool> {
    let rep = remainder_matrix::<f64>(a.n)?;
    let text = match a.output.format {
        Format::Json => remainder_stats(a.n, &rep)?,
        Format::Csv => io::real_grid_csv(&rep.magnitude_grid())?,
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(true)
}

fn qft(a: QftArgs) -> Result<bool> {
    let v = load_vector(&a.source)?;
    let out = qft_borel(&v);
    emit(a.output.out.as_deref(), &coeffs_out(out.resolution(), "scaling", out.coeffs(), a.output.format)?)?;
    Ok(true)
}

#[derive(Serialize)]
struct EvolutionJson {
    lambda: f64,
    energy: f64,
    t: f64,
    initial_mass: f64,
    final_mass: f64,
    relative_mass_change: f64,
    grid: GridJson,
}

#[derive(Serialize)]
struct TrajectoryJson {
    lambda: f64,
    energy: f64,
    center: [f64; 2],
    points: Vec<[f64; 3]>,
}

fn flow_params(a: &DynamicsArgs) -> Result<FlowParams<f64>> {
    match (a.energy, a.n, a.k, a.s) {
        (Some(e), _, _, _) => Ok(FlowParams::new(a.lambda, e)?),
        (None, Some(n), Some(k), Some(s)) => Ok(FlowParams::from_labels(a.lambda, n, k, s)?),
        _ => Err(usage("give --E or all of --n, --k, --s")),
    }
}

fn dynamics(a: DynamicsArgs) -> Result<bool> {
    let fp = flow_params(&a)?;
    let text = if let Some(nodes) = a.grid {
        if nodes < 2 || nodes > 4096 {
            return Err(usage("--grid must lie in 2..=4096"));
        }
        let g = Gaussian::isotropic(a.q0, a.p0, a.sigma)?;
        let w = (-a.extent, a.extent);
        let grid = WignerGrid::sample(w, w, nodes, nodes, |q, p| g.eval(q, p))?;
        let ev = evolve_wigner(&grid, a.t, &fp);
        match a.format {
            Format::Json => io::to_json(&EvolutionJson {
                lambda: fp.lambda(),
                energy: fp.energy(),
                t: a.t,
                initial_mass: ev.initial_mass,
                final_mass: ev.final_mass,
                relative_mass_change: ev.relative_mass_change(),
                grid: GridJson::from(&ev.grid),
            })?,
            Format::Csv => {
                let rows: Vec<Vec<f64>> =
                    ev.grid.samples().chunks(nodes).map(|r| r.to_vec()).collect();
                io::real_grid_csv(&rows)?
            }
        }
    } else {
        let pts = trajectory(a.q0, a.p0, a.t, a.steps, &fp);
        match a.format {
            Format::Csv => io::trajectory_csv(&pts)?,
            Format::Json => io::to_json(&TrajectoryJson {
                lambda: fp.lambda(),
                energy: fp.energy(),
                center: [fp.center().0, fp.center().1],
                points: pts.iter().map(|&(t, q, p)| [t, q, p]).collect(),
            })?,
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(true)
}

fn gate_tag(op: &str, periodized: bool) -> Result<GateTag> {
    let op = op.to_ascii_lowercase();
    let name = match op.strip_prefix('c') {
        Some(rest) if periodized && !rest.is_empty() => rest.to_string(),
        _ => op,
    };
    Ok(name.parse::<GateTag>()?)
}

#[derive(Serialize)]
struct SegmentJson {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    weight_re: f64,
    weight_im: f64,
}

fn segments_out(segs: &[Segment], fmt: Format) -> Result<String> {
    Ok(match fmt {
        Format::Csv => io::kernel_csv(segs)?,
        Format::Json => io::to_json(
            &segs
                .iter()
                .map(|s| SegmentJson {
                    x0: s.x0,
                    y0: s.y0,
                    x1: s.x1,
                    y1: s.y1,
                    weight_re: s.weight.re,
                    weight_im: s.weight.im,
                })
                .collect::<Vec<_>>(),
        )?,
    })
}

const MAX_SUPPORT_DEPTH: u32 = 16;

fn support(a: SupportArgs) -> Result<bool> {
    let tag = gate_tag(&a.op, a.periodized)?;
    let segs = if a.periodized {
        if a.depth == 0 || a.depth > MAX_SUPPORT_DEPTH {
            return Err(usage(format!("--depth must lie in 1..={MAX_SUPPORT_DEPTH}")));
        }
        periodized_support(tag, a.depth)
    } else {
        if a.qubit > MAX_SUPPORT_DEPTH {
            return Err(usage(format!("--qubit must be at most {MAX_SUPPORT_DEPTH}")));
        }
        kernel_support(GateKind::new(tag, a.qubit)?)
    };
    emit(a.out.as_deref(), &segments_out(&segs, a.format)?)?;
    Ok(true)
}

fn mask_csv(m: &OperatorMatrix<f64>) -> Result<String> {
    let d = m.dim();
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if m.get(i, j).norm() > 1e-12 { 1.0 } else { 0.0 }).collect())
        .collect();
    Ok(io::real_grid_csv(&rows)?)
}

fn figures(a: FiguresArgs) -> Result<bool> {
    let mut bundle = Bundle::new(&a.out);
    match a.which {
        Figure::Support => {
            let depth = a.n.unwrap_or(6);
            if depth == 0 || depth > MAX_SUPPORT_DEPTH {
                return Err(usage(format!("--n must lie in 1..={MAX_SUPPORT_DEPTH}")));
            }
            let ops: Vec<String> = match &a.op {
                Some(op) => vec![op.to_ascii_lowercase()],
                None => ["cx", "cy", "cz", "cplus", "cminus"].map(String::from).to_vec(),
            };
            for op in ops {
                let segs = periodized_support(gate_tag(&op, true)?, depth);
                bundle.add(format!("support_{op}.csv"), io::kernel_csv(&segs)?);
            }
        }
        Figure::Eigenstates => {
            let n = a.n.unwrap_or(3);
            let theta = a.theta.unwrap_or(std::f64::consts::FRAC_PI_3);
            for e in dynamics::eigenstate_bank(n, theta)? {
                let s = if e.sign == Sign::Plus { "plus" } else { "minus" };
                bundle.add(format!("eigenstate_n{n}_{s}_k{}.csv", e.k), io::eigenstate_csv(&e)?);
            }
        }
        Figure::Remainder => {
            let n = a.n.unwrap_or(10);
            let rep = remainder_matrix::<f64>(n)?;
            bundle.add("remainder_magnitude.csv", io::real_grid_csv(&rep.magnitude_grid())?);
            bundle.add("remainder_stats.json", remainder_stats(n, &rep)?);
        }
        Figure::Blocks => {
            let n = a.n.unwrap_or(6);
            let opts = BuildOptions { antiderivative: lform(a.antiderivative), ..Default::default() };
            let kinds: Vec<(String, PeriodizedKind<f64>)> = match &a.op {
                Some(op) => vec![(op.to_ascii_lowercase(), PeriodizedKind::parse(op, a.theta, None)?)],
                None => vec![
                    ("pminus".into(), PeriodizedKind::PMinus),
                    ("pplus".into(), PeriodizedKind::PPlus),
                    ("cy_plus_k".into(), PeriodizedKind::CThetaCorrected(std::f64::consts::FRAC_PI_2)),
                ],
            };
            for (name, kind) in kinds {
                let m = conjugate_to_haar(&build_with(kind, n, opts)?)?;
                bundle.add(format!("mask_{name}.csv"), mask_csv(&m)?);
            }
        }
    }
    for p in bundle.commit()? {
        eprintln!("wrote {}", p.display());
    }
    Ok(true)
}

fn verify(a: VerifyArgs) -> Result<bool> {
    let criteria: Vec<Criterion> = if a.only.is_empty() {
        Criterion::ALL.to_vec()
    } else {
        a.only
            .iter()
            .map(|s| s.trim().parse::<Criterion>().map_err(|e| usage(e.to_string())))
            .collect::<Result<_>>()?
    };
    let opts = VerifyOptions { n: a.n, seed: a.seed };
    let mut reports = Vec::with_capacity(criteria.len());
    for c in criteria {
        let r = verify::run_one(c, &opts)?;
        eprintln!("{}", r.summary_line());
        for note in &r.notes {
            eprintln!("       {note}");
        }
        reports.push(r);
    }
    let all = reports.iter().all(|r| r.passed);
    let text = match a.format {
        Format::Json => io::to_json(&reports)?,
        Format::Csv => {
            let mut s = String::from("number,criterion,n,check,measured,tolerance,passed\n");
            for r in &reports {
                for c in &r.checks {
                    s.push_str(&format!(
                        "{},{},{},\"{}\",{},{},{}\n",
                        r.number,
                        r.criterion,
                        r.n,
                        c.name,
                        fmt_num(c.measured),
                        fmt_num(c.tolerance),
                        c.passed
                    ));
                }
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(all)
}
