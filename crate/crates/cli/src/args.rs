use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tlq_core::{builtin_chart, BuiltinKind, Chart, ChartKind, PhysParams, Tolerances};

use crate::{usage, Failure};

#[derive(Debug, Parser)]
#[command(name = "tlq", version, about = "Thin-layer quantization on curved surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print mean curvature, Gaussian curvature and geometric potential.
    Curvature(CurvatureArgs),
    /// Run the operator identity suite and report residuals.
    Verify(VerifyArgs),
    /// Lowest eigenvalues of the Hamiltonian with analytic comparison.
    Spectrum(SpectrumArgs),
    /// Evolve a state and log observables at every step.
    Evolve(EvolveArgs),
    /// Residuals of the force, torque and radiality identities across resolutions.
    Convergence(ConvergenceArgs),
    /// Write an operator matrix in the CQOP binary container.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChartName {
    Sphere,
    Cylinder,
    Ring,
}

#[derive(Debug, Args)]
pub struct ChartArgs {
    /// Built-in surface.
    #[arg(long, value_enum, conflicts_with = "chart_file")]
    pub chart: Option<ChartName>,
    /// Radius of the built-in surface.
    #[arg(long = "R", default_value_t = 1.0)]
    pub radius: f64,
    /// Axial period of the cylinder.
    #[arg(long = "Lz")]
    pub lz: Option<f64>,
    /// Orthogonal curvilinear chart in JSON.
    #[arg(long)]
    pub chart_file: Option<PathBuf>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
}

/// Default cylinder period when `--Lz` is not given.
pub const DEFAULT_LZ: f64 = 2.0 * std::f64::consts::PI;

impl ChartArgs {
    pub fn load(&self) -> Result<Chart, Failure> {
        let chart = match (&self.chart, &self.chart_file) {
            (Some(name), None) => {
                let params = PhysParams::new(self.hbar.unwrap_or(1.0), self.mass.unwrap_or(1.0))?;
                let kind = match name {
                    ChartName::Sphere => BuiltinKind::Sphere,
                    ChartName::Cylinder => BuiltinKind::Cylinder,
                    ChartName::Ring => BuiltinKind::Ring,
                };
                builtin_chart(kind, self.radius, Some(self.lz.unwrap_or(DEFAULT_LZ)), params)?
            }
            (None, Some(path)) => {
                let chart = Chart::from_json_file(path)?;
                if self.hbar.is_some() || self.mass.is_some() {
                    let p = chart.params();
                    let params = PhysParams::new(
                        self.hbar.unwrap_or(p.hbar),
                        self.mass.unwrap_or(p.mass),
                    )?;
                    chart.with_params(params)?
                } else {
                    chart
                }
            }
            _ => return Err(usage("give either --chart or --chart-file")),
        };
        Ok(chart)
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Grid resolution `N1xN2` (a single `N` for the ring).
    #[arg(long, value_parser = parse_resolution)]
    pub res: Option<(usize, usize)>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

impl GridArgs {
    pub fn resolution(&self, chart: &Chart) -> (usize, usize) {
        self.res.unwrap_or_else(|| default_resolution(chart))
    }
}

pub fn default_resolution(chart: &Chart) -> (usize, usize) {
    match chart.kind() {
        ChartKind::Sphere { .. } => (24, 48),
        ChartKind::Ring { .. } => (64, 1),
        ChartKind::Cylinder { .. } | ChartKind::Custom => (32, 32),
    }
}

pub fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected N1xN2 or N, got '{s}'");
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok((s.trim().parse().map_err(|_| bad())?, 1)),
    }
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (id, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected CHECKID=VALUE, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("bad tolerance value in '{s}'"))?;
    Ok((id.trim().to_string(), v))
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[command(flatten)]
    pub chart: ChartArgs,
    /// Directory for `curvature.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub chart: ChartArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Override a check tolerance, e.g. `force.equivalence=1e-9`.
    #[arg(long = "tol", value_parser = parse_tolerance)]
    pub tol: Vec<(String, f64)>,
    /// Directory for `report.json` and `report.txt`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    pub json: bool,
}

impl VerifyArgs {
    pub fn tolerances(&self) -> Result<Tolerances, Failure> {
        let mut t = Tolerances::new();
        for (id, v) in &self.tol {
            t.set(id, *v)?;
        }
        Ok(t)
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub chart: ChartArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Number of eigenvalues.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Directory for `spectrum.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub chart: ChartArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Start from a Gaussian packet (needs --sigma).
    #[arg(long, conflicts_with = "mode")]
    pub packet: bool,
    /// Packet width in radians.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Phase windings of the packet.
    #[arg(long, default_value_t = tlq_core::dynamics::DEFAULT_L0, allow_hyphen_values = true)]
    pub l0: i64,
    /// Packet center `Q1,Q2` in chart coordinates (default: equator, or the
    /// middle of the cylinder).
    #[arg(long, value_parser = parse_pair_f64, allow_hyphen_values = true)]
    pub center: Option<(f64, f64)>,
    /// Start from a single mode `L,M` (sphere) or `N,K` (cylinder, ring).
    #[arg(long, value_parser = parse_pair_i64, allow_hyphen_values = true)]
    pub mode: Option<(i64, i64)>,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Directory for `evolution.csv` and `summary.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let bad = || format!("expected A,B, got '{s}'");
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_pair_f64(s: &str) -> Result<(f64, f64), String> {
    parse_pair(s)
}

fn parse_pair_i64(s: &str) -> Result<(i64, i64), String> {
    parse_pair(s)
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub chart: ChartArgs,
    /// Comma-separated resolutions, e.g. `8x16,16x32,32x64`.
    #[arg(long, value_delimiter = ',', value_parser = parse_resolution, required = true)]
    pub res: Vec<(usize, usize)>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Directory for `convergence.csv` and `convergence.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorName {
    H,
    V2,
    Laplacian,
    Px,
    Py,
    Pz,
    Lx,
    Ly,
    Lz,
    Fx,
    Fy,
    Fz,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub chart: ChartArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Operator to write.
    #[arg(long, value_enum)]
    pub op: OperatorName,
    /// Directory for `<op>.cqop`.
    #[arg(long)]
    pub out: PathBuf,
}
