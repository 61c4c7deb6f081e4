use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use thermowitness::{Boundary, Couplings, Family, ModelSpec, SignConvention, SiteCount};

#[derive(Debug, Parser)]
#[command(name = "thermowitness", version, about = "Thermodynamical entanglement witnesses for Heisenberg chains")]
pub struct Cli {
    #[command(flatten)]
    pub shared: SharedArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Xxx,
    Xx,
    Xyz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryArg {
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignArg {
    AsPrinted,
    SingletGround,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    #[default]
    Csv,
    Json,
}

/// Flags accepted by every subcommand. Values from `--config` fill in
/// whatever is not given on the command line.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharedArgs {
    /// TOML file with any of the shared keys (model, n, j, b, kt, ...)
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum, global = true)]
    pub model: Option<ModelArg>,

    /// Number of sites
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Exchange coupling J (Jx for --model xyz)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub j: Option<f64>,

    /// Jy for --model xyz (defaults to J)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub jy: Option<f64>,

    /// Jz for --model xyz (defaults to J)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub jz: Option<f64>,

    /// Magnetic field B
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<f64>,

    /// Temperature kT
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kt: Option<f64>,

    #[arg(long, value_enum, global = true)]
    pub boundary: Option<BoundaryArg>,

    #[arg(long, value_enum, global = true)]
    pub sign: Option<SignArg>,

    #[arg(long, value_enum, global = true)]
    pub out: Option<OutFormat>,

    /// Write the region plot to this SVG file (scan only)
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Tolerance override (bisection target for boundary, identity checks for validate)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

impl SharedArgs {
    /// Command-line values win; the config file fills the gaps.
    pub fn merged(self) -> Result<SharedArgs, String> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = load_config(&path)?;
        Ok(SharedArgs {
            config: self.config,
            model: self.model.or(file.model),
            n: self.n.or(file.n),
            j: self.j.or(file.j),
            jy: self.jy.or(file.jy),
            jz: self.jz.or(file.jz),
            b: self.b.or(file.b),
            kt: self.kt.or(file.kt),
            boundary: self.boundary.or(file.boundary),
            sign: self.sign.or(file.sign),
            out: self.out.or(file.out),
            svg: self.svg.or(file.svg),
            seed: self.seed.or(file.seed),
            tol: self.tol.or(file.tol),
        })
    }

    pub fn out_format(&self) -> OutFormat {
        self.out.unwrap_or_default()
    }

    pub fn coupling(&self) -> f64 {
        self.j.unwrap_or(1.0)
    }

    pub fn field(&self) -> f64 {
        self.b.unwrap_or(0.0)
    }

    pub fn model_spec(&self) -> Result<ModelSpec, String> {
        let n = self.n.ok_or("--n is required for a finite chain")?;
        let j = self.coupling();
        let boundary = match self.boundary.unwrap_or(BoundaryArg::Periodic) {
            BoundaryArg::Periodic => Boundary::Periodic,
            BoundaryArg::Open => Boundary::Open,
        };
        let sign = match self.sign.unwrap_or(SignArg::SingletGround) {
            SignArg::AsPrinted => SignConvention::AsPrinted,
            SignArg::SingletGround => SignConvention::SingletGround,
        };
        let (family, couplings) = match self.model.unwrap_or(ModelArg::Xxx) {
            ModelArg::Xxx => (Family::XXX, Couplings::isotropic(j)),
            ModelArg::Xx => (Family::XX, Couplings::xx(j)),
            ModelArg::Xyz => {
                (Family::GeneralXYZ, Couplings { jx: j, jy: self.jy.unwrap_or(j), jz: self.jz.unwrap_or(j) })
            }
        };
        if !matches!(self.model, Some(ModelArg::Xyz) | None) && (self.jy.is_some() || self.jz.is_some()) {
            return Err("--jy/--jz only apply to --model xyz".into());
        }
        Ok(ModelSpec {
            family,
            couplings,
            field: self.field(),
            n_sites: SiteCount::Finite(n),
            boundary,
            sign_convention: sign,
        })
    }
}

fn load_config(path: &Path) -> Result<SharedArgs, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the witness for a finite chain or for measured (U, M)
    Witness(WitnessArgs),
    /// Sample the thermodynamic-limit XX witness over (kT/|J|, B/|J|)
    Scan(ScanArgs),
    /// Trace the W = 1 boundary kT_c(B)
    Boundary(BoundaryArgs),
    /// Exact thermal observables of a finite chain
    Exact(ExactArgs),
    /// Run the self-check suite
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// Use measured --u and --m instead of a model
    #[arg(long)]
    pub measured: bool,

    /// Measured total internal energy
    #[arg(long, allow_hyphen_values = true, requires = "measured")]
    pub u: Option<f64>,

    /// Measured total magnetization
    #[arg(long, allow_hyphen_values = true, requires = "measured")]
    pub m: Option<f64>,

    /// Low-temperature approximation for the ferromagnetic XXX chain (needs J > 0, B > 0)
    #[arg(long, conflicts_with = "measured")]
    pub lowtemp: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 0.05)]
    pub kt_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub kt_max: f64,
    #[arg(long, default_value_t = 60)]
    pub kt_count: usize,
    #[arg(long, default_value_t = 0.0)]
    pub b_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub b_max: f64,
    #[arg(long, default_value_t = 60)]
    pub b_count: usize,
    /// Output file (stdout when omitted)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Use the printed magnetization integrand instead of the ln Z derivative
    #[arg(long = "eq9-as-printed")]
    pub printed_magnetization: bool,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    /// Explicit fields B/|J| (comma separated); overrides --b-min/--b-max/--b-count
    #[arg(long, value_delimiter = ',')]
    pub b_values: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub b_min: f64,
    #[arg(long, default_value_t = 1.5)]
    pub b_max: f64,
    #[arg(long, default_value_t = 31)]
    pub b_count: usize,
    #[arg(long, default_value_t = 0.01)]
    pub kt_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub kt_max: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long = "eq9-as-printed")]
    pub printed_magnetization: bool,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    /// Also report the concurrence of this nearest-neighbor pair index
    #[arg(long)]
    pub pair: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long = "eq9-as-printed")]
    pub printed_magnetization: bool,
    /// Random product states per separable-bound check
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}
