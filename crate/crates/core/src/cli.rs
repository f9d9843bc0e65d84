//! Command-line driver: dominant eigenvalue of a Matrix Market file with
//! value precision and index width chosen at run time.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::Parser;
use serde::Serialize;
use thiserror::Error;

use crate::dispatch::{for_id_with_stats, DispatchError, DispatchStats, Kernel2};
use crate::eig::{EigError, PowerMethod, PowerMethodConfig, PowerMethodResult};
use crate::mmio::{matrix_bytes, CooMatrix, MatrixMarketReader, MatrixReader, MmioError};
use crate::select::{
    min_index_width, select_id, width_ladder, FloatPrecision, FloatTypes, IndexTypes, IndexWidth,
    SelectError,
};

type Canonical = (FloatTypes, IndexTypes);

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const PARSE: i32 = 4;
    pub const NUMERICAL: i32 = 5;
    pub const INTERNAL: i32 = 70;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Matrix(#[from] MmioError),
    #[error(transparent)]
    Numerical(EigError),
    #[error("dispatch failed: {0}")]
    Dispatch(#[from] DispatchError),
}

impl From<EigError> for CliError {
    fn from(e: EigError) -> Self {
        match e {
            EigError::Matrix(m) => CliError::Matrix(m),
            EigError::NoIterations => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Matrix(MmioError::Io(_)) => exit::IO,
            CliError::Matrix(MmioError::IndexTooNarrow { .. }) => exit::USAGE,
            CliError::Matrix(_) => exit::PARSE,
            CliError::Numerical(_) => exit::NUMERICAL,
            CliError::Dispatch(_) => exit::INTERNAL,
        }
    }
}

/// Index width flag: `auto` or a fixed width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexChoice {
    Auto,
    Fixed(IndexWidth),
}

impl FromStr for IndexChoice {
    type Err = SelectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(IndexChoice::Auto),
            other => other.parse().map(IndexChoice::Fixed),
        }
    }
}

/// A fixed `(precision, width)` pair, written `single,16` or `f32,u16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectCase(pub FloatPrecision, pub IndexWidth);

impl FromStr for DirectCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (f, i) = s
            .split_once(',')
            .ok_or_else(|| format!("expected PRECISION,WIDTH, got {s:?}"))?;
        let precision = match f.trim() {
            "f32" => FloatPrecision::Single,
            "f64" => FloatPrecision::Double,
            other => other.parse().map_err(|e: SelectError| e.to_string())?,
        };
        let width = i.trim().parse().map_err(|e: SelectError| e.to_string())?;
        Ok(DirectCase(precision, width))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "forid",
    version,
    about = "Dominant eigenvalue of a symmetric Matrix Market matrix"
)]
pub struct Args {
    /// Matrix Market coordinate file holding one triangle of a symmetric matrix.
    pub matrix: PathBuf,

    /// Number of power-method iterations.
    #[arg(value_parser = clap::value_parser!(u64).range(1..))]
    pub iterations: u64,

    /// Floating-point precision: single or double.
    #[arg(long, default_value = "double", conflicts_with = "direct")]
    pub precision: FloatPrecision,

    /// Index width: auto, 8, 16, 32 or 64.
    #[arg(long, default_value = "auto", conflicts_with = "direct")]
    pub index: IndexChoice,

    /// Call the PRECISION,WIDTH instance directly instead of dispatching.
    #[arg(long, value_name = "PRECISION,WIDTH")]
    pub direct: Option<DirectCase>,

    /// Print a JSON report to stderr.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    ForId,
    Direct(FloatPrecision, IndexWidth),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub matrix_path: PathBuf,
    pub iterations: u64,
    pub precision: FloatPrecision,
    pub width_override: Option<IndexWidth>,
    pub stats: bool,
    pub mode: Mode,
}

impl From<Args> for RunConfig {
    fn from(a: Args) -> Self {
        let width_override = match a.index {
            IndexChoice::Auto => None,
            IndexChoice::Fixed(w) => Some(w),
        };
        RunConfig {
            matrix_path: a.matrix,
            iterations: a.iterations,
            precision: a.precision,
            width_override,
            stats: a.stats,
            mode: match a.direct {
                Some(DirectCase(p, w)) => Mode::Direct(p, w),
                None => Mode::ForId,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub lambda: f64,
    pub width_bits: u32,
    pub precision: FloatPrecision,
    pub dispatch_comparisons: u64,
    pub invocation_ns: u64,
    pub application_ns: u64,
    pub matrix_bytes: u64,
}

/// Calls the `(precision, width)` member of `kernel` without resolution.
fn direct<K: Kernel2>(kernel: &mut K, precision: FloatPrecision, width: IndexWidth) -> K::Output {
    use FloatPrecision::*;
    use IndexWidth::*;
    match (precision, width) {
        (Single, U8) => kernel.apply::<f32, u8>(),
        (Single, U16) => kernel.apply::<f32, u16>(),
        (Single, U32) => kernel.apply::<f32, u32>(),
        (Single, U64) => kernel.apply::<f32, u64>(),
        (Double, U8) => kernel.apply::<f64, u8>(),
        (Double, U16) => kernel.apply::<f64, u16>(),
        (Double, U32) => kernel.apply::<f64, u32>(),
        (Double, U64) => kernel.apply::<f64, u64>(),
    }
}

fn nanos(d: Duration) -> u64 {
    u64::try_from(d.as_nanos()).unwrap_or(u64::MAX)
}

pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    let pm_config = PowerMethodConfig::new(config.iterations)?;
    let mut source = MatrixMarketReader::open(&config.matrix_path)?;
    let header = source.read_header()?;

    let n = u128::from(header.n);
    let narrowest = min_index_width(n).map_err(|e| CliError::Usage(e.to_string()))?;
    let (precision, width) = match config.mode {
        Mode::Direct(p, w) => (p, w),
        Mode::ForId => (config.precision, config.width_override.unwrap_or(narrowest)),
    };
    if width < narrowest {
        return Err(CliError::Usage(format!(
            "{}-bit indices cannot address {} rows (need at least {})",
            width.bits(),
            header.n,
            narrowest.bits()
        )));
    }

    let ids = match (config.mode, config.width_override) {
        (Mode::ForId, None) => [precision.id(), select_id(&width_ladder(n))],
        _ => [precision.id(), width.id()],
    };

    let mut reader = MatrixReader {
        source: &mut source,
        header,
    };
    let mut comparisons = 0;
    let matrix: CooMatrix = match config.mode {
        Mode::ForId => {
            let mut stats = DispatchStats::default();
            let m = for_id_with_stats::<Canonical, _>(&mut reader, ids, &mut stats)??;
            comparisons += stats.comparisons;
            m
        }
        Mode::Direct(p, w) => direct(&mut reader, p, w)?,
    };

    let mut pm = PowerMethod::new(&matrix, pm_config);
    let (result, before, after): (PowerMethodResult, Instant, Instant) = match config.mode {
        Mode::ForId => {
            let mut stats = DispatchStats::default();
            let before = Instant::now();
            let r = for_id_with_stats::<Canonical, _>(&mut pm, ids, &mut stats)??;
            let after = Instant::now();
            comparisons += stats.comparisons;
            (r, before, after)
        }
        Mode::Direct(p, w) => {
            let before = Instant::now();
            let r = direct(&mut pm, p, w)?;
            (r, before, Instant::now())
        }
    };
    let entered = result.timing.map_or(before, |t| t.entered);

    Ok(RunReport {
        lambda: result.lambda,
        width_bits: matrix.width().bits(),
        precision: matrix.precision(),
        dispatch_comparisons: comparisons,
        invocation_ns: nanos(entered.saturating_duration_since(before)),
        application_ns: nanos(after.saturating_duration_since(before)),
        matrix_bytes: matrix_bytes(header, matrix.width(), matrix.precision())?,
    })
}

fn significant_digits(s: &str) -> usize {
    let mantissa = s.split(['e', 'E']).next().unwrap_or("");
    mantissa
        .chars()
        .filter(char::is_ascii_digit)
        .skip_while(|&c| c == '0')
        .count()
}

/// Shortest representation that reads back to the same bits, padded with
/// zeros to at least six significant digits.
pub fn format_lambda(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let plain = v == 0.0 || (1e-4..1e15).contains(&v.abs());
    let s = if plain {
        format!("{v}")
    } else {
        format!("{v:e}")
    };
    if significant_digits(&s) >= 6 {
        s
    } else if plain {
        let magnitude = if v == 0.0 {
            0
        } else {
            v.abs().log10().floor() as i32
        };
        let decimals = (5 - magnitude).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}

/// The human-readable result line.
pub fn lambda_line(lambda: f64) -> String {
    format!("Lambda: {}", format_lambda(lambda))
}

/// Parses `args`, runs, and writes to `out` / `err`. Returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let rendered = e.render().to_string();
            let _ = if code == exit::OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let config = RunConfig::from(args);
    match run(&config) {
        Ok(report) => {
            if config.stats {
                let json = serde_json::to_string(&report).expect("report serializes");
                let _ = writeln!(err, "{json}");
            }
            match writeln!(out, "{}", lambda_line(report.lambda)) {
                Ok(()) => exit::OK,
                Err(_) => exit::IO,
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    main_with(std::env::args_os(), &mut out, &mut err)
}
