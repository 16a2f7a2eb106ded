//! Command-line front end: argument definitions, file formats, and command
//! dispatch with a fixed exit-code contract.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage, 3 infeasible or
//! undecided parameters, 4 IO or file format.

pub mod format;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use eitff_core::eitff::{
    block_coherence, build_eitff, eitff_exists, naimark_complement, omp_guarantee, omp_trials,
    principal_angles, verify_eitff, FusionFrame, Variant,
};
use eitff_core::radon_hurwitz::{decompose_r, rho_number};
use eitff_core::symmetry::{
    check_certificate, find_witness, probe_symmetry, totally_symmetric_exists, Existence,
    Permutation,
};
use eitff_core::{Error, Field};
use serde::Serialize;
use serde_json::json;

use format::{field_tag, CertificateFile, FrameFile, Metadata};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(String),
    Format(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Format(m) => write!(f, "format error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::Format(_) => EXIT_IO,
            CliError::Core(e) => match e {
                Error::Domain(_) => EXIT_USAGE,
                Error::Infeasible { .. } | Error::UnknownFeasibility(_) => EXIT_INFEASIBLE,
                Error::Shape { .. } => EXIT_IO,
                Error::InvalidInput(_) | Error::Singular { .. } | Error::Numeric(_) => EXIT_FAIL,
            },
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    #[value(name = "R")]
    R,
    #[value(name = "C")]
    C,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Field {
        match f {
            FieldArg::R => Field::Real,
            FieldArg::C => Field::Complex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Generic,
    Skew,
    TotallySymmetric,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Generic => Variant::Generic,
            VariantArg::Skew => Variant::Skew,
            VariantArg::TotallySymmetric => Variant::TotallySymmetric,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "eitff", version, about = "Build, verify and certify Radon–Hurwitz EITFFs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Params {
    #[arg(long, value_enum)]
    pub field: FieldArg,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radon–Hurwitz number and the decomposition r = (2a+1)·2^(4b+c)
    Rho {
        #[arg(long, value_enum)]
        field: FieldArg,
        #[arg(long)]
        r: usize,
    },
    /// Construct an EITFF(2r, r, n) and write it as JSON
    Build {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "generic")]
        variant: VariantArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check tightness, equi-isoclinism, Welch equality and the Gerzon bound
    Verify {
        frame: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Write a Naimark complement of a tight frame
    Naimark {
        frame: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Principal angles (radians) for every pair of subspaces
    Angles { frame: PathBuf },
    /// Symmetry certificates
    Sym {
        #[command(subcommand)]
        command: SymCommand,
    },
    /// Whether an EITFF (or a totally symmetric one) exists
    Exists {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        total: bool,
    },
    /// Block orthogonal matching pursuit on a frame dictionary
    Omp {
        #[command(subcommand)]
        command: OmpCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum SymCommand {
    /// Search for a unitary realizing a permutation of the subspaces
    Witness {
        frame: PathBuf,
        /// one-line image, e.g. "2 1 3 4"
        #[arg(long)]
        perm: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate against a frame
    Check {
        frame: PathBuf,
        cert: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Classify the symmetry group as total, alternating or other
    Probe {
        frame: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum OmpCommand {
    /// Seeded random k-block-sparse recovery trials
    Demo {
        frame: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
}

/// Frame with shapes checked but members possibly non-isometric.
pub fn load_frame_unchecked(path: &Path) -> CliResult<FusionFrame> {
    read_json::<FrameFile>(path)?.to_frame()
}

pub fn load_frame(path: &Path) -> CliResult<FusionFrame> {
    let f = load_frame_unchecked(path)?;
    Ok(FusionFrame::new(f.field, f.isometries)?)
}

fn emit<T: Serialize>(value: &T, path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Format(e.to_string()))?;
    match path {
        Some(p) => fs::write(p, text + "\n").map_err(|e| io_err(p, e)),
        None => writeln!(out, "{text}").map_err(|e| CliError::Io(e.to_string())),
    }
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| CliError::Io(e.to_string()))
    };
}

fn variant_name(v: VariantArg) -> &'static str {
    match v {
        VariantArg::Generic => "generic",
        VariantArg::Skew => "skew",
        VariantArg::TotallySymmetric => "totally-symmetric",
    }
}

/// Runs one command, writing its report to `out`; returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    match &cli.command {
        Command::Rho { field, r } => {
            let rho = rho_number((*field).into(), *r)?;
            let dec = decompose_r(*r)?;
            say!(out, "rho={rho} a={} b={} c={}", dec.a, dec.b, dec.c)?;
            Ok(EXIT_PASS)
        }
        Command::Build { params, variant, out: path } => {
            let field: Field = params.field.into();
            let frame = build_eitff(field, params.r, params.n, (*variant).into())?;
            let meta = Metadata {
                variant: Some(variant_name(*variant).into()),
                params: json!({"field": field_tag(field), "r": params.r, "n": params.n}),
                seed: None,
            };
            emit(&FrameFile::from_frame(&frame, meta), path.as_deref(), out)?;
            Ok(EXIT_PASS)
        }
        Command::Verify { frame, tol } => {
            let f = load_frame_unchecked(frame)?;
            let rep = verify_eitff(&f, *tol)?;
            say!(
                out,
                "tightness={:e} equiisoclinic={:e} welch_gap={:e} coherence={} gerzon={}",
                rep.tightness_residual,
                rep.equiisoclinic_residual,
                rep.welch_gap,
                rep.block_coherence,
                if rep.gerzon_ok { "ok" } else { "fail" }
            )?;
            let pass = rep.pass();
            say!(
                out,
                "isometry={:e} welch_bound={} tol={:e} result={}",
                rep.isometry_residual,
                rep.welch_bound,
                rep.tolerance,
                if pass { "pass" } else { "fail" }
            )?;
            Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Naimark { frame, out: path } => {
            let f = load_frame(frame)?;
            let c = naimark_complement(&f)?;
            let meta = Metadata {
                variant: Some("naimark-complement".into()),
                params: json!({"field": field_tag(f.field), "d": f.d, "r": f.r, "n": f.n}),
                seed: None,
            };
            emit(&FrameFile::from_frame(&c, meta), path.as_deref(), out)?;
            Ok(EXIT_PASS)
        }
        Command::Angles { frame } => {
            let f = load_frame(frame)?;
            for ((i, j), angles) in principal_angles(&f)? {
                let list: Vec<String> = angles.iter().map(|a| a.to_string()).collect();
                say!(out, "{} {} angles={}", i + 1, j + 1, list.join(","))?;
            }
            Ok(EXIT_PASS)
        }
        Command::Sym { command } => run_sym(command, out),
        Command::Exists { params, total } => {
            let field: Field = params.field.into();
            if *total {
                let v = totally_symmetric_exists(field, params.r, params.n)?;
                say!(out, "{}: {}", v.answer, v.reason)?;
                Ok(if v.answer == Existence::No { EXIT_INFEASIBLE } else { EXIT_PASS })
            } else {
                let (yes, reason) = eitff_exists(field, params.r, params.n)?;
                say!(out, "{}: {reason}", if yes { "yes" } else { "no" })?;
                Ok(if yes { EXIT_PASS } else { EXIT_INFEASIBLE })
            }
        }
        Command::Omp {
            command: OmpCommand::Demo { frame, k, trials, seed },
        } => {
            let f = load_frame(frame)?;
            let got = omp_trials(&f, *k, *trials, *seed)?;
            let mu = block_coherence(&f)?;
            say!(out, "recovered={got}/{trials}")?;
            say!(out, "coherence={mu} guarantee=k<{}", omp_guarantee(mu))?;
            Ok(EXIT_PASS)
        }
    }
}

fn parse_perm(text: &str) -> CliResult<Permutation> {
    text.parse().map_err(|e: Error| CliError::Usage(format!("--perm: {e}")))
}

fn run_sym(command: &SymCommand, out: &mut dyn Write) -> CliResult<i32> {
    match command {
        SymCommand::Witness { frame, perm, seed, tol, out: path } => {
            let f = load_frame(frame)?;
            let sigma = parse_perm(perm)?;
            if sigma.n() != f.n {
                return Err(CliError::Usage(format!("--perm has {} points, frame has {}", sigma.n(), f.n)));
            }
            match find_witness(&f, &sigma, *tol, *seed)? {
                Some(cert) => {
                    if path.is_some() {
                        say!(out, "residual={:e}", cert.residual)?;
                    }
                    emit(&CertificateFile::from_certificate(&cert), path.as_deref(), out)?;
                    Ok(EXIT_PASS)
                }
                None => {
                    say!(out, "no witness found for {sigma} at tol={tol:e}")?;
                    Ok(EXIT_FAIL)
                }
            }
        }
        SymCommand::Check { frame, cert, tol } => {
            let f = load_frame(frame)?;
            let (sigma, upsilon) = read_json::<CertificateFile>(cert)?.parts()?;
            let residual = check_certificate(&f, &sigma, &upsilon)?;
            let unitarity = upsilon.unitarity_residual();
            let pass = residual <= *tol && unitarity <= *tol;
            say!(
                out,
                "residual={residual:e} unitarity={unitarity:e} result={}",
                if pass { "pass" } else { "fail" }
            )?;
            Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
        }
        SymCommand::Probe { frame, seed, tol } => {
            let f = load_frame(frame)?;
            let probe = probe_symmetry(&f, *tol, *seed)?;
            say!(out, "symmetry={} (numerically-decided)", probe.class)?;
            Ok(EXIT_PASS)
        }
    }
}

/// Parses arguments and runs; errors are reported on stderr.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "eitff: {e}");
            e.exit_code()
        }
    }
}
