//! JSON and CSV encodings of vectors, operators, block lists, grids and
//! the tabular outputs. Numbers are written in shortest round-trip form so
//! identical inputs give byte-identical output.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicVector;
use crate::dynamics::{Eigenstate, WignerGrid};
use crate::error::{Error, Result};
use crate::gates::Segment;
use crate::operator::{Basis, CMatrix, OperatorMatrix};
use crate::scalar::Real;
use crate::spectra::{BlockList, EigenPair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub n: u32,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub n: u32,
    pub basis: Basis,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockListJson {
    pub sizes: Vec<usize>,
    pub blocks: Vec<MatrixJson>,
    pub off_block_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridJson {
    pub q_range: [f64; 2],
    pub p_range: [f64; 2],
    pub nq: usize,
    pub np: usize,
    pub integral: f64,
    pub samples: Vec<f64>,
}

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".into()
    } else if (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn split<T: Real>(z: &[Complex<T>]) -> (Vec<f64>, Vec<f64>) {
    z.iter().map(|c| (c.re.as_f64(), c.im.as_f64())).unzip()
}

fn join<T: Real>(re: &[f64], im: &[f64]) -> Result<Vec<Complex<T>>> {
    if re.len() != im.len() {
        return Err(Error::InvalidData(format!(
            "real and imaginary parts differ in length ({} vs {})",
            re.len(),
            im.len()
        )));
    }
    Ok(re.iter().zip(im).map(|(&a, &b)| Complex::new(T::lit(a), T::lit(b))).collect())
}

fn matrix_json<T: Real>(m: &CMatrix<T>) -> MatrixJson {
    let (re, im) = m
        .row_iter()
        .map(|r| r.iter().map(|z| (z.re.as_f64(), z.im.as_f64())).unzip())
        .unzip();
    MatrixJson { re, im }
}

fn matrix_from_rows<T: Real>(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<CMatrix<T>> {
    let d = re.len();
    if im.len() != d || re.iter().chain(im).any(|r| r.len() != d) {
        return Err(Error::InvalidData("matrix parts must be square and equally shaped".into()));
    }
    Ok(CMatrix::from_fn(d, d, |i, j| Complex::new(T::lit(re[i][j]), T::lit(im[i][j]))))
}

impl<T: Real> From<&DyadicVector<T>> for VectorJson {
    fn from(v: &DyadicVector<T>) -> Self {
        let (re, im) = split(v.coeffs());
        Self { n: v.resolution(), re, im }
    }
}

impl<T: Real> TryFrom<&VectorJson> for DyadicVector<T> {
    type Error = Error;

    fn try_from(j: &VectorJson) -> Result<Self> {
        DyadicVector::new(j.n, join(&j.re, &j.im)?)
    }
}

impl<T: Real> From<&OperatorMatrix<T>> for OperatorJson {
    fn from(m: &OperatorMatrix<T>) -> Self {
        let MatrixJson { re, im } = matrix_json(m.entries());
        Self { n: m.resolution(), basis: m.basis(), re, im }
    }
}

impl<T: Real> TryFrom<&OperatorJson> for OperatorMatrix<T> {
    type Error = Error;

    fn try_from(j: &OperatorJson) -> Result<Self> {
        OperatorMatrix::new(j.n, j.basis, matrix_from_rows(&j.re, &j.im)?)
    }
}

impl<T: Real> From<&BlockList<T>> for BlockListJson {
    fn from(b: &BlockList<T>) -> Self {
        Self {
            sizes: b.sizes(),
            blocks: b.blocks.iter().map(matrix_json).collect(),
            off_block_residual: b.off_block_residual.as_f64(),
        }
    }
}

impl<T: Real> From<&WignerGrid<T>> for GridJson {
    fn from(g: &WignerGrid<T>) -> Self {
        let (nq, np) = g.shape();
        Self {
            q_range: [g.q_range().0.as_f64(), g.q_range().1.as_f64()],
            p_range: [g.p_range().0.as_f64(), g.p_range().1.as_f64()],
            nq,
            np,
            integral: g.integral().as_f64(),
            samples: g.samples().iter().map(|x| x.as_f64()).collect(),
        }
    }
}

impl<T: Real> TryFrom<&GridJson> for WignerGrid<T> {
    type Error = Error;

    fn try_from(j: &GridJson) -> Result<Self> {
        WignerGrid::new(
            (T::lit(j.q_range[0]), T::lit(j.q_range[1])),
            (T::lit(j.p_range[0]), T::lit(j.p_range[1])),
            j.nq,
            j.np,
            j.samples.iter().map(|&x| T::lit(x)).collect(),
        )
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<S: Serialize>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidData(format!("JSON encoding failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<'a, D: Deserialize<'a>>(text: &'a str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::InvalidData(format!("malformed JSON: {e}")))
}

fn csv_table<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Error::InvalidData(format!("CSV encoding failed: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidData(format!("CSV encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Rows of `n,k,s,theta,eigenvalue,residual`.
pub fn spectrum_csv<T: Real>(pairs: &[(EigenPair<T>, T)]) -> Result<String> {
    csv_table(
        &["n", "k", "s", "theta", "eigenvalue", "residual"],
        pairs.iter().map(|(p, r)| {
            vec![
                p.level.to_string(),
                p.k.to_string(),
                p.sign.to_string(),
                fmt_num(p.theta.as_f64()),
                fmt_num(p.value.re.as_f64()),
                fmt_num(r.as_f64()),
            ]
        }),
    )
}

/// Rows of `x0,y0,x1,y1,weight_re,weight_im`.
pub fn kernel_csv(segments: &[Segment]) -> Result<String> {
    csv_table(
        &["x0", "y0", "x1", "y1", "weight_re", "weight_im"],
        segments.iter().map(|s| {
            [s.x0, s.y0, s.x1, s.y1, s.weight.re, s.weight.im].iter().map(|&x| fmt_num(x)).collect::<Vec<_>>()
        }),
    )
}

/// Rows of `t,q,p`.
pub fn trajectory_csv<T: Real>(points: &[(T, T, T)]) -> Result<String> {
    csv_table(
        &["t", "q", "p"],
        points.iter().map(|(t, q, p)| vec![fmt_num(t.as_f64()), fmt_num(q.as_f64()), fmt_num(p.as_f64())]),
    )
}

/// Rows of `cell,x_mid,re,im` holding the function values of a sampled
/// eigenstate on its cells.
pub fn eigenstate_csv<T: Real>(state: &Eigenstate<T>) -> Result<String> {
    let n = state.samples.resolution();
    let h = 0.5f64.powi(n as i32);
    csv_table(
        &["cell", "x_mid", "re", "im"],
        state.samples.cell_values().iter().enumerate().map(|(j, z)| {
            vec![
                j.to_string(),
                fmt_num((j as f64 + 0.5) * h),
                fmt_num(z.re.as_f64()),
                fmt_num(z.im.as_f64()),
            ]
        }),
    )
}

/// Dense real matrix as CSV without a header.
pub fn real_grid_csv<T: Real>(rows: &[Vec<T>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in rows {
        w.write_record(r.iter().map(|x| fmt_num(x.as_f64())))
            .map_err(|e| Error::InvalidData(format!("CSV encoding failed: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidData(format!("CSV encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{eig_recurrence_theta, PhaseConvention};

    #[test]
    fn vector_round_trip() {
        let v = DyadicVector::<f64>::new(1, vec![Complex::new(0.5, -1.0), Complex::new(2.0, 0.25)]).unwrap();
        let text = to_json(&VectorJson::from(&v)).unwrap();
        let back: VectorJson = from_json(&text).unwrap();
        assert_eq!(DyadicVector::<f64>::try_from(&back).unwrap(), v);
    }

    #[test]
    fn operator_round_trip_and_shape_errors() {
        let m = OperatorMatrix::<f64>::identity(2, Basis::Haar);
        let j = OperatorJson::from(&m);
        assert!(to_json(&j).unwrap().contains("\"basis\": \"haar\""));
        assert_eq!(OperatorMatrix::<f64>::try_from(&j).unwrap(), m);
        let bad = OperatorJson { n: 1, basis: Basis::Scaling, re: vec![vec![0.0]], im: vec![vec![0.0]] };
        assert!(OperatorMatrix::<f64>::try_from(&bad).is_err());
        assert!(from_json::<OperatorJson>("{").is_err());
    }

    #[test]
    fn spectrum_table() {
        let pairs: Vec<_> = eig_recurrence_theta::<f64>(1, 0.0, PhaseConvention::Derived)
            .unwrap()
            .into_iter()
            .map(|p| (p, 0.0))
            .collect();
        let s = spectrum_csv(&pairs).unwrap();
        assert_eq!(s, "n,k,s,theta,eigenvalue,residual\n1,0,-,0,-0.5,0\n1,0,+,0,0.5,0\n");
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(3.5e-17), "3.5e-17");
        assert_eq!(fmt_num(1e20), "1e20");
    }

    #[test]
    fn trajectory_table() {
        let s = trajectory_csv(&[(0.0f64, 1.0, -0.5)]).unwrap();
        assert_eq!(s, "t,q,p\n0,1,-0.5\n");
    }
}
