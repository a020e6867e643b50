use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "larmor",
    version,
    about = "Exact Larmor precession of spin-1/2 particles through a uniform field region"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one (v, B, a, theta) point.
    Scan(ScanArgs),
    /// One scan row per value of a swept parameter.
    #[command(visible_alias = "sweep")]
    Table(TableArgs),
    /// Spectral spin densities of a Gaussian packet, one file per swept value.
    Packet(PacketArgs),
    /// Rotator width reproducing a target standard probability.
    Calibrate(CalibrateArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    #[value(name = "B")]
    B,
    #[value(name = "v")]
    V,
    #[value(name = "a")]
    A,
    #[value(name = "theta")]
    Theta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::B => "B",
            SweepParam::V => "v",
            SweepParam::A => "a",
            SweepParam::Theta => "theta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PacketParam {
    #[value(name = "B")]
    B,
    #[value(name = "v")]
    V,
}

/// Beam, field and particle inputs shared by every evaluating command.
#[derive(Debug, Clone, Default, Args)]
pub struct PointArgs {
    /// Field strength in tesla.
    #[arg(long = "B", value_name = "TESLA", allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Incident speed in m/s.
    #[arg(
        long = "v",
        value_name = "M_PER_S",
        group = "beam",
        allow_hyphen_values = true
    )]
    pub v: Option<f64>,
    /// Incident kinetic energy in eV.
    #[arg(
        long = "E-eV",
        value_name = "EV",
        group = "beam",
        allow_hyphen_values = true
    )]
    pub e_ev: Option<f64>,
    /// Incident wavenumber in 1/m.
    #[arg(
        long = "k",
        value_name = "PER_M",
        group = "beam",
        allow_hyphen_values = true
    )]
    pub k: Option<f64>,
    /// Field region width in m (default: calibrated width).
    #[arg(long, value_name = "M", allow_hyphen_values = true)]
    pub width: Option<f64>,
    /// Analyzer angle in rad, measured from +x.
    #[arg(long, value_name = "RAD", allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Continue the barrier channel analytically below threshold.
    #[arg(long)]
    pub allow_evanescent: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout if omitted); output directory for `packet`.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// JSON config with particle, field and beam defaults.
    #[arg(long, value_name = "PATH", env = "LARMOR_CONFIG")]
    pub config: Option<PathBuf>,
}

/// Values for a swept parameter: an explicit list or a range.
#[derive(Debug, Clone, Default, Args)]
pub struct ValuesArgs {
    /// Comma-separated list.
    #[arg(
        long,
        value_name = "LIST",
        allow_hyphen_values = true,
        conflicts_with = "range"
    )]
    pub values: Option<String>,
    /// `lo:hi:n` (linear) or `lo:hi:n:log`, endpoints included.
    #[arg(long, value_name = "LO:HI:N[:log]", allow_hyphen_values = true)]
    pub range: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub point: PointArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    /// Parameter to sweep.
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[command(flatten)]
    pub values: ValuesArgs,
    #[command(flatten)]
    pub point: PointArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PacketArgs {
    /// Parameter to sweep: field or central speed.
    #[arg(long, value_enum)]
    pub param: PacketParam,
    #[command(flatten)]
    pub values: ValuesArgs,
    /// Spectral standard deviation relative to the central wavenumber.
    #[arg(long, value_name = "REL", default_value_t = larmor_core::wavepacket::DEFAULT_SIGMA_REL)]
    pub sigma_rel: f64,
    /// Odd number of k-grid points.
    #[arg(long, default_value_t = larmor_core::wavepacket::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Use the transmission-conditioned modified probability.
    #[arg(long)]
    pub normalized: bool,
    /// Drop evanescent grid points instead of failing.
    #[arg(long, conflicts_with = "allow_evanescent")]
    pub truncate: bool,
    #[command(flatten)]
    pub point: PointArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    /// Probability the standard formula must reproduce.
    #[arg(long, value_name = "P", allow_hyphen_values = true)]
    pub target_p: f64,
    /// Root index among the positive rotation angles (0 = smallest).
    #[arg(long, default_value_t = 0, conflicts_with = "anchor")]
    pub branch: usize,
    /// Extra `B:v:p` anchor; the branch fitting all anchors best is chosen.
    #[arg(long, value_name = "B:V:P")]
    pub anchor: Vec<String>,
    /// Largest branch considered in a joint fit.
    #[arg(long, default_value_t = 8)]
    pub max_branch: usize,
    #[command(flatten)]
    pub point: PointArgs,
}
