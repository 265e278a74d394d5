use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use tefdyn::catalog::parse_complex;
use tefdyn::raster::{Classifier, Viewport};
use tefdyn::{EntireMap, SamplerConfig, C64};

#[derive(Debug, Parser)]
#[command(
    name = "tefdyn",
    version,
    about = "Dynamics of transcendental entire maps: scans, branches, tracts, renders"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// JSON object of flag values for the subcommand; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads (output bytes do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a basin classification image (PGM or PNG by extension).
    Render(RenderArgs),
    /// Cylindrical derivative infima over |f(z)| > R.
    EtaScan(EtaScanArgs),
    /// Spherical expansion infimum over |f(z)| > R.
    SphericalScan(SphericalScanArgs),
    /// (1+|z|^tau)|f'(z)| over preimages of a disc around a singular value.
    PolyScan(PolyScanArgs),
    /// Hyperbolic-to-cylindrical derivative over a region.
    EtaOmega(EtaOmegaArgs),
    /// Try to certify hyperbolicity with a disc B(0, r).
    Certify(CertifyArgs),
    /// Continue an inverse branch to its maximal disc.
    TraceBranch(TraceBranchArgs),
    /// Tracts over a disc tangent to a singular value, with angular measures.
    Tracts(TractsArgs),
    /// Search the parameter where the orbit of 2πin lands on a repelling fixed point.
    Instability(InstabilityArgs),
    /// Zeros of f1 in a range of imaginary parts.
    ZerosF1(ZerosArgs),
    /// Run the acceptance suite and write summary.csv.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Render(_) => "render",
            Command::EtaScan(_) => "eta-scan",
            Command::SphericalScan(_) => "spherical-scan",
            Command::PolyScan(_) => "poly-scan",
            Command::EtaOmega(_) => "eta-omega",
            Command::Certify(_) => "certify",
            Command::TraceBranch(_) => "trace-branch",
            Command::Tracts(_) => "tracts",
            Command::Instability(_) => "instability",
            Command::ZerosF1(_) => "zeros-f1",
            Command::Report(_) => "report",
        }
    }
}

fn map_id(s: &str) -> Result<String, String> {
    s.parse::<EntireMap>().map(|_| s.to_string()).map_err(|e| e.to_string())
}

fn complex(s: &str) -> Result<C64, String> {
    parse_complex(s).ok_or_else(|| format!("expected RE,IM, got `{s}`"))
}

fn size(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected WIDTHxHEIGHT, got `{s}`");
    let (w, h) = s.split_once('x').ok_or_else(bad)?;
    Ok((w.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?))
}

/// Comma-separated numbers. Fields using it are spelled `::std::vec::Vec`
/// so clap takes the whole list as one value.
fn list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number `{t}` in `{s}`"))
        })
        .collect()
}

pub fn map_of(id: &str) -> EntireMap {
    id.parse().expect("validated by the argument parser")
}

#[derive(Debug, Args, Serialize)]
pub struct RenderArgs {
    #[arg(long, value_parser = map_id)]
    pub map: String,
    #[arg(long, allow_hyphen_values = true, default_value = "-3,9,-13,13")]
    pub viewport: Viewport,
    #[arg(long, value_parser = size, default_value = "800x800")]
    pub size: (usize, usize),
    #[arg(long, default_value_t = 500)]
    pub budget: usize,
    /// escape-right, basins or drift-basins; defaults by map.
    #[arg(long)]
    pub classifier: Option<Classifier>,
    #[arg(long, default_value_t = 1e-6)]
    pub convergence: f64,
    #[arg(long, default_value_t = 50.0)]
    pub escape_re: f64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Sample-set controls shared by the scans.
#[derive(Debug, Args, Serialize)]
pub struct SamplerArgs {
    #[arg(long, default_value_t = SamplerConfig::default().r_min)]
    pub r_min: f64,
    #[arg(long, default_value_t = SamplerConfig::default().r_max)]
    pub r_max: f64,
    #[arg(long, default_value_t = SamplerConfig::default().steps_per_octave)]
    pub steps_per_octave: u32,
    #[arg(long, default_value_t = SamplerConfig::default().angles)]
    pub angles: u32,
    #[arg(long, default_value_t = SamplerConfig::default().probes)]
    pub probes: usize,
    #[arg(long, default_value_t = SamplerConfig::default().refine_rounds)]
    pub refine_rounds: u32,
    #[arg(long)]
    pub no_grid: bool,
    #[arg(long, default_value_t = SamplerConfig::default().curve_modulus)]
    pub curve_modulus: f64,
    #[arg(long, default_value_t = SamplerConfig::default().curve_tracts)]
    pub curve_tracts: usize,
}

impl SamplerArgs {
    pub fn config(&self) -> SamplerConfig {
        SamplerConfig {
            r_min: self.r_min,
            r_max: self.r_max,
            steps_per_octave: self.steps_per_octave,
            angles: self.angles,
            probes: self.probes,
            refine_rounds: self.refine_rounds,
            use_grid: !self.no_grid,
            curve_modulus: self.curve_modulus,
            curve_tracts: self.curve_tracts,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EtaScanArgs {
    #[arg(long, value_parser = map_id)]
    pub map: String,
    #[arg(long, value_parser = list, default_value = "1e2,1e4,1e8")]
    pub thresholds: ::std::vec::Vec<f64>,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SphericalScanArgs {
    #[arg(long, value_parser = map_id)]
    pub map: String,
    #[arg(long, default_value_t = 1e6)]
    pub threshold: f64,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PolyScanArgs {
    #[arg(long, value_parser = map_id)]
    pub map: String,
    /// Singular value `RE,IM`.
    #[arg(long, value_parser = complex, allow_hyphen_values = true, default_value = "0,0")]
    pub s: C64,
    /// Radius of the disc U around `s`.
    #[arg(long, default_value_t = 0.1)]
    pub u_radius: f64,
    #[arg(long, default_value_t = 4.0)]
    pub tau: f64,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EtaOmegaArgs {
    #[arg(long, value_parser = map_id)]
    pub map: String,
    /// `right:A` (Re z > A), `exterior:R` (|z| > R) or `unit-disc`.
    #[arg(long, allow_hyphen_values = true, default_value = "right:0")]
    pub omega: String,
    #[arg(long, value_parser = list, default_value = "1e2,1e4,1e8")]
    pub thresholds: ::std::vec::Vec<f64>,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyArgs {
    #[arg(long, value_parser = map_id)]
    pub map: String,
    /// Candidate radii, tried in order.
    #[arg(long, value_parser = list, default_value = "0.5,1,2,4")]
    pub radii: ::std::vec::Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TraceBranchArgs {
    #[arg(long, value_parser = map_id)]
    pub map: String,
    /// Basepoint `RE,IM` of the branch.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub z0: C64,
    #[arg(long, default_value_t = 1e3)]
    pub max_radius: f64,
    /// Also trace the asymptotic curve up to this modulus when the obstruction is asymptotic.
    #[arg(long)]
    pub curve_modulus: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TractsArgs {
    #[arg(long, value_parser = map_id)]
    pub map: String,
    #[arg(long, value_parser = complex, allow_hyphen_values = true, default_value = "0,0")]
    pub s: C64,
    /// Centre of U; defaults to `s`.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub u_center: Option<C64>,
    #[arg(long, default_value_t = 0.1)]
    pub u_radius: f64,
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    /// Radii at which angular measures are taken.
    #[arg(long, value_parser = list, default_value = "1e2,1e3")]
    pub x: ::std::vec::Vec<f64>,
    /// Directory for per-tract boundary CSVs.
    #[arg(long)]
    pub boundaries: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct InstabilityArgs {
    #[arg(long, default_value_t = 1)]
    pub p: u8,
    #[arg(long, default_value_t = 1000, allow_hyphen_values = true)]
    pub n: i64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ZerosArgs {
    #[arg(long, default_value_t = 900.0)]
    pub im_min: f64,
    #[arg(long, default_value_t = 1100.0)]
    pub im_max: f64,
    #[arg(long, default_value_t = 2)]
    pub per_strip: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

impl Cli {
    pub fn subcommand_names() -> Vec<String> {
        use clap::CommandFactory;
        Cli::command()
            .get_subcommands()
            .map(|c| c.get_name().to_string())
            .collect()
    }
}
