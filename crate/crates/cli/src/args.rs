use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::grid::{AlphaList, RealGrid, SizeGrid};

#[derive(Debug, Parser)]
#[command(
    name = "gaussent",
    version,
    about = "Entanglement of Gaussian states of harmonic chains"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Half-size entropy and E_M over a mass grid
    KappaScan(ScanArgs),
    /// Half-size entropy against chain size, with optional log-size fit
    SizeScan(ScanArgs),
    /// Entropy of every region length at fixed size, with optional log-sin fit
    SigmaScan(ScanArgs),
    /// Sorted entropy contributions and largest density-matrix eigenvalues
    Spectrum(ScanArgs),
    /// Time evolution of the moments under a chain Hamiltonian
    Evolve(ScanArgs),
    /// Conformal fits of a previously written size-scan or sigma-scan CSV
    Fit(ScanArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::KappaScan(_) => "kappa-scan",
            Command::SizeScan(_) => "size-scan",
            Command::SigmaScan(_) => "sigma-scan",
            Command::Spectrum(_) => "spectrum",
            Command::Evolve(_) => "evolve",
            Command::Fit(_) => "fit",
        }
    }

    pub fn args(&self) -> &ScanArgs {
        match self {
            Command::KappaScan(a)
            | Command::SizeScan(a)
            | Command::SigmaScan(a)
            | Command::Spectrum(a)
            | Command::Evolve(a)
            | Command::Fit(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogBaseArg {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Arith {
    Double,
    /// Double-double chain construction; resolves mode ratios down to ~1e-28
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitModeArg {
    /// Slope and offset by least squares
    Free,
    /// Slope fixed to --fit-slope, offset by least squares
    Fixed,
    /// Slope fixed, offset matched to the outermost points
    Anchored,
}

/// Quantity computed per region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Entropy,
    /// `E_M = 1 - tr ρᴹ / (tr ρ)ᴹ`.
    ProductId(u32),
}

impl Measure {
    pub fn column(self) -> String {
        match self {
            Measure::Entropy => "S".into(),
            Measure::ProductId(m) => format!("E{m}"),
        }
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let order = match s {
            "entropy" | "S" => return Ok(Measure::Entropy),
            _ if s.starts_with("eM:") => &s[3..],
            _ if s.starts_with('e') || s.starts_with('E') => &s[1..],
            _ => return Err(format!("unknown measure `{s}` (expected entropy, e2 or eM:M)")),
        };
        match order.parse::<u32>() {
            Ok(m) if m >= 2 => Ok(Measure::ProductId(m)),
            _ => Err(format!("measure `{s}` needs an integer order M >= 2")),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Entropy => f.write_str("entropy"),
            Measure::ProductId(m) => write!(f, "eM:{m}"),
        }
    }
}

/// Flags shared by every subcommand; each uses the subset it needs. Every
/// flag can also be given in a `--config` file as `name = value`.
#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Flat key=value file mirroring these flags; explicit flags win
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Chain sizes N: list, pow2:lo:hi or range:lo:hi[:step]
    #[arg(short = 'N', long = "sites", default_value = "100")]
    pub sites: SizeGrid,

    /// Masses κ: list, log:lo:hi:count or lin:lo:hi:count
    #[arg(long, default_value = "1e-4")]
    pub kappa: RealGrid,

    /// Boundary twist: 0 periodic, 1 antiperiodic (list allowed)
    #[arg(long, default_value = "0")]
    pub alpha: AlphaList,

    /// Fixed system length Λ; sets the lattice constant to Λ/N
    #[arg(long)]
    pub length: Option<f64>,

    /// Lattice constant a, used when --length is absent
    #[arg(long, default_value_t = 1.0)]
    pub lattice_const: f64,

    /// Region fraction ℓ/N for kappa-scan and size-scan
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,

    /// First site of the region
    #[arg(long, default_value_t = 0)]
    pub region_start: usize,

    /// Region length ℓ (a grid for sigma-scan; overrides --sigma)
    #[arg(long)]
    pub region_len: Option<SizeGrid>,

    /// Columns to compute: entropy, e2, eM:M (comma list)
    #[arg(long, value_delimiter = ',')]
    pub measure: Vec<Measure>,

    /// Output file (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Significant digits of floating-point output
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=17))]
    pub precision: u32,

    /// Worker threads (default: all cores); never changes the output
    #[arg(long)]
    pub threads: Option<usize>,

    /// Abort on any failed state validation instead of warning
    #[arg(long)]
    pub strict_validation: bool,

    /// Entropy unit: 2 (ebits) or e (nats)
    #[arg(long, value_enum, default_value_t = LogBaseArg::Two)]
    pub log_base: LogBaseArg,

    /// Drop the edge points ℓ = 1 and ℓ = N-1 from log-sin fits
    #[arg(long)]
    pub trim: bool,

    /// Append conformal fits to size-scan and sigma-scan output
    #[arg(long)]
    pub fit: bool,

    #[arg(long, value_enum, default_value_t = FitModeArg::Free)]
    pub fit_mode: FitModeArg,

    /// Slope used by the fixed and anchored fit modes
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub fit_slope: f64,

    /// Conformality verdict: largest accepted |slope - 1/3|
    #[arg(long, default_value_t = 0.05)]
    pub slope_tolerance: f64,

    /// Conformality verdict: largest accepted rms residual
    #[arg(long, default_value_t = 0.05)]
    pub max_rms: f64,

    #[arg(long, value_enum, default_value_t = Arith::Double)]
    pub arith: Arith,

    /// Number of largest density-matrix eigenvalues in spectrum reports
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,

    /// Initial state as a kernel-parameter JSON file instead of a chain ground state
    #[arg(long, value_name = "FILE")]
    pub theta: Option<PathBuf>,

    /// Write the final evolved state as a kernel-parameter JSON file
    #[arg(long, value_name = "FILE")]
    pub theta_out: Option<PathBuf>,

    #[arg(long, default_value_t = 1.0)]
    pub t_final: f64,

    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,

    /// Record every n-th integration step (the final time is always recorded)
    #[arg(long, default_value_t = 100)]
    pub sample_every: usize,

    /// Evolve under a chain of this mass instead of --kappa
    #[arg(long)]
    pub quench_kappa: Option<f64>,

    /// Input CSV for the fit subcommand
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,

    /// Safety cap on evaluations, checked before any computation
    #[arg(long, default_value_t = 1_000_000)]
    pub max_evals: usize,
}

impl ScanArgs {
    /// Every parameter that can change the output, sorted by flag name.
    /// `out`, `threads` and `config` are excluded.
    pub fn echo(&self) -> Vec<(String, String)> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        let path = |p: &Option<PathBuf>| opt(p.as_ref().map(|p| p.display().to_string()));
        let enum_name = |v: &dyn ValueEnumName| v.value_name();
        let measures = self.measure.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",");
        let mut out = vec![
            ("alpha", self.alpha.to_string()),
            ("arith", enum_name(&self.arith)),
            ("dt", self.dt.to_string()),
            ("fit", self.fit.to_string()),
            ("fit-mode", enum_name(&self.fit_mode)),
            ("fit-slope", self.fit_slope.to_string()),
            ("format", enum_name(&self.format)),
            ("input", path(&self.input)),
            ("kappa", self.kappa.to_string()),
            ("lattice-const", self.lattice_const.to_string()),
            ("length", opt(self.length.map(|l| l.to_string()))),
            ("log-base", enum_name(&self.log_base)),
            ("max-evals", self.max_evals.to_string()),
            ("max-rms", self.max_rms.to_string()),
            (
                "measure",
                if measures.is_empty() {
                    "default".into()
                } else {
                    measures
                },
            ),
            ("precision", self.precision.to_string()),
            ("quench-kappa", opt(self.quench_kappa.map(|k| k.to_string()))),
            ("region-len", opt(self.region_len.as_ref().map(|r| r.to_string()))),
            ("region-start", self.region_start.to_string()),
            ("sample-every", self.sample_every.to_string()),
            ("sigma", self.sigma.to_string()),
            ("sites", self.sites.to_string()),
            ("slope-tolerance", self.slope_tolerance.to_string()),
            ("strict-validation", self.strict_validation.to_string()),
            ("t-final", self.t_final.to_string()),
            ("theta", path(&self.theta)),
            ("theta-out", path(&self.theta_out)),
            ("top-k", self.top_k.to_string()),
            ("trim", self.trim.to_string()),
        ];
        out.sort_by(|a, b| a.0.cmp(b.0));
        out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

trait ValueEnumName {
    fn value_name(&self) -> String;
}

impl<T: ValueEnum> ValueEnumName for T {
    fn value_name(&self) -> String {
        self.to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }
}
