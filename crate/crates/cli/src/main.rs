mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use multires::spectra::Sign;
use multires::Error;
use output::Format;

/// Haar/Borel multiresolution tools for qubit arrays.
#[derive(Debug, Parser)]
#[command(name = "multires", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Forward or inverse Haar transform of a vector.
    Haar(HaarArgs),
    /// Matrix of a projected operator or finite array.
    Build(BuildArgs),
    /// Diagonal blocks of an operator in the Haar basis.
    Blocks(BlocksArgs),
    /// Eigenpairs of the equator block recurrence.
    Spectrum(SpectrumArgs),
    /// One eigenstate of the corrected equator operator.
    Eigenstate(EigenstateArgs),
    /// Off-block remainder of C_y in the Haar basis.
    Remainder(RemainderArgs),
    /// Quantum Fourier transform of a vector.
    Qft(QftArgs),
    /// Wigner-plane trajectory or grid evolution of the field mode.
    Dynamics(DynamicsArgs),
    /// Kernel support segments of a gate or periodized operator.
    Support(SupportArgs),
    /// Data files behind the figures.
    Figures(FiguresArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct VectorSource {
    /// JSON vector `{n, re, im}`.
    #[arg(long, conflicts_with_all = ["n", "cell"])]
    input: Option<PathBuf>,
    /// Resolution of a unit basis vector.
    #[arg(long, requires = "cell")]
    n: Option<u32>,
    /// Cell index of a unit basis vector.
    #[arg(long, requires = "n")]
    cell: Option<usize>,
}

#[derive(Debug, Args)]
struct HaarArgs {
    #[command(flatten)]
    source: VectorSource,
    /// Treat the input as Haar coefficients and return cell coefficients.
    #[arg(long)]
    inverse: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    Scaling,
    Haar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Tail {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LForm {
    Galerkin,
    Appendix,
}

#[derive(Debug, Args)]
struct OperatorArgs {
    /// cx, cy, cz, cplus, cminus, l, lt, k, pminus, pplus, ctheta,
    /// ctheta-corrected, v, bloch, or array-x / array-y / array-z for the
    /// finite array with weights 2^-k.
    #[arg(long)]
    op: String,
    #[arg(long)]
    n: u32,
    /// Angle for the equator kinds; accepts forms like `pi/3`.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// `alpha,beta,gamma` on the unit sphere.
    #[arg(long, value_delimiter = ',', num_args = 3, allow_hyphen_values = true)]
    bloch: Option<Vec<f64>>,
    /// Include the contribution of qubits beyond resolution n.
    #[arg(long, value_enum, default_value = "on")]
    tail: Tail,
    #[arg(long, value_enum, default_value = "galerkin")]
    antiderivative: LForm,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[command(flatten)]
    operator: OperatorArgs,
    #[arg(long, value_enum, default_value = "scaling")]
    basis: BasisArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct BlocksArgs {
    #[command(flatten)]
    operator: OperatorArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Derived,
    Conjugate,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, default_value = "0")]
    theta: f64,
    #[arg(long, value_enum, default_value = "derived")]
    convention: ConventionArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct EigenstateArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: usize,
    /// `+` or `-`.
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    s: Sign,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, default_value = "0")]
    theta: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct RemainderArgs {
    #[arg(long, default_value_t = 10)]
    n: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct QftArgs {
    #[command(flatten)]
    source: VectorSource,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct DynamicsArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    lambda: f64,
    /// Array eigenvalue; alternatively give --n, --k, --s.
    #[arg(long = "E", alias = "energy", allow_hyphen_values = true, conflicts_with_all = ["n", "k", "s"])]
    energy: Option<f64>,
    #[arg(long, requires_all = ["k", "s"])]
    n: Option<u32>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    s: Option<Sign>,
    /// Accepted for labelling; the eigenvalue does not depend on it.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    q0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    p0: f64,
    /// Final time in radians of oscillator phase.
    #[arg(long, value_parser = parse_angle, default_value = "2pi")]
    t: f64,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Evolve a Gaussian centred at (q0, p0) on a square grid with this many
    /// nodes per side instead of tracing a trajectory.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Half-width of the grid window.
    #[arg(long, default_value_t = 5.0)]
    extent: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct SupportArgs {
    /// x, y, z, plus, minus; with --periodized also cx, cy, … .
    #[arg(long)]
    op: String,
    /// Qubit acted on by a single gate.
    #[arg(long, default_value_t = 1)]
    qubit: u32,
    /// Emit the union over qubits 1..=depth with weights 2^-k.
    #[arg(long)]
    periodized: bool,
    #[arg(long, default_value_t = 6)]
    depth: u32,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    Support,
    Eigenstates,
    Remainder,
    Blocks,
}

#[derive(Debug, Args)]
struct FiguresArgs {
    #[arg(long, value_enum)]
    which: Figure,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long)]
    op: Option<String>,
    #[arg(long, value_enum, default_value = "galerkin")]
    antiderivative: LForm,
    /// Directory receiving the files.
    #[arg(long, default_value = "figures")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated criteria (names or numbers); all when omitted.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Resolution for every selected criterion instead of its default.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Machine-readable report destination.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    let bad = || format!("cannot read `{s}` as an angle");
    let value = if let Some(pos) = t.find("pi") {
        let coef = match &t[..pos] {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        };
        let rest = &t[pos + 2..];
        let div = match rest {
            "" => 1.0,
            r => r.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
        };
        coef * std::f64::consts::PI / div
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit status: 1 verification failure, 2 bad input, 3 resource limit.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::ResourceLimit { .. }) => 3,
        Some(Error::Convergence(_)) => 1,
        Some(_) => 2,
        None => match err.downcast_ref::<commands::UsageError>() {
            Some(_) => 2,
            None => 1,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/3").unwrap(), PI / 3.0);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("inf").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
