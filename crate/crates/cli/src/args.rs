use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "casimir",
    version,
    about = "Casimir pressure, reflectance and dispersion-relation sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate permittivities on the imaginary or real frequency axis.
    Epsilon(EpsilonArgs),
    /// Plate-plate pressure against separation for several models.
    Pressure(PressureArgs),
    /// Sphere-plate force gradient, optionally against measured data.
    Gradient(GradientArgs),
    /// Reflectances and their deviation from the local Drude values.
    Reflectance(ReflectanceArgs),
    /// Check the dispersion relations of the nonlocal permittivities.
    KkVerify(KkArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum ModelKind {
    Drude,
    Nonlocal,
    Plasma,
    Perfect,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Drude => "drude",
            ModelKind::Nonlocal => "nonlocal",
            ModelKind::Plasma => "plasma",
            ModelKind::Perfect => "perfect",
        }
    }

    /// Short tag used in ratio column names.
    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::Drude => "drude",
            ModelKind::Nonlocal => "nl",
            ModelKind::Plasma => "pl",
            ModelKind::Perfect => "ideal",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Named parameter set.
    #[arg(long, default_value = casimir_core::response::GOLD_DEFAULT)]
    pub preset: String,
    /// Plasma frequency in eV (overrides the preset).
    #[arg(long)]
    pub omega_p: Option<f64>,
    /// Relaxation frequency in eV (overrides the preset).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Transverse velocity in units of the Fermi velocity.
    #[arg(long)]
    pub vt: Option<f64>,
    /// Longitudinal velocity in units of the Fermi velocity.
    #[arg(long)]
    pub vl: Option<f64>,
    /// Temperature in K.
    #[arg(long, default_value_t = 300.0)]
    pub temp: f64,
    /// Tabulated optical data (energy eV, n, k) for the interband core.
    #[arg(long)]
    pub optical_data: Option<PathBuf>,
    /// Output format; defaults to csv (json for kk-verify).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write data here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Grid {
    #[arg(long)]
    pub points: Option<usize>,
    /// Use logarithmic spacing.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Imag,
    Real,
}

#[derive(Debug, Clone, Args)]
pub struct EpsilonArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Axis::Imag)]
    pub axis: Axis,
    /// Transverse wave vector ħc k⊥ in eV.
    #[arg(long, default_value_t = 0.0)]
    pub kperp: f64,
    #[arg(long, default_value_t = 0.05)]
    pub freq_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub freq_max: f64,
    #[command(flatten)]
    pub grid: Grid,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ModelKind::Drude, ModelKind::Nonlocal, ModelKind::Plasma])]
    pub models: Vec<ModelKind>,
}

#[derive(Debug, Clone, Args)]
pub struct PressureArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ModelKind::Drude, ModelKind::Nonlocal, ModelKind::Plasma])]
    pub models: Vec<ModelKind>,
    /// Smallest separation in μm.
    #[arg(long, default_value_t = 1.0)]
    pub a_min: f64,
    #[arg(long, default_value_t = 7.0)]
    pub a_max: f64,
    #[command(flatten)]
    pub grid: Grid,
    #[arg(long, default_value_t = casimir_core::lifshitz::DEFAULT_QUAD_TOL)]
    pub quad_tol: f64,
    #[arg(long, default_value_t = casimir_core::lifshitz::DEFAULT_TERM_TOL)]
    pub term_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GradientArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = ModelKind::Nonlocal)]
    pub model: ModelKind,
    /// Sphere radius in μm.
    #[arg(long)]
    pub radius: f64,
    /// Constant beyond-proximity coefficient.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// RMS roughness of the sphere in μm.
    #[arg(long, default_value_t = 0.0)]
    pub delta_s: f64,
    /// RMS roughness of the plate in μm.
    #[arg(long, default_value_t = 0.0)]
    pub delta_p: f64,
    /// With --expt the grid bounds only filter the measured separations.
    #[arg(long)]
    pub a_min: Option<f64>,
    #[arg(long)]
    pub a_max: Option<f64>,
    #[command(flatten)]
    pub grid: Grid,
    /// Measured gradients: a[μm], Fprime[N/m], sigma[N/m].
    #[arg(long)]
    pub expt: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReflectanceArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = ModelKind::Nonlocal)]
    pub model: ModelKind,
    /// Incidence angle: "60deg" or radians.
    #[arg(long, value_parser = parse_angle)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub omega_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega_max: f64,
    #[command(flatten)]
    pub grid: Grid,
}

#[derive(Debug, Clone, Args)]
pub struct KkArgs {
    #[command(flatten)]
    pub common: Common,
    /// Transverse wave vectors in eV, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.2, 1.0])]
    pub kperp: Vec<f64>,
    /// "all" or a comma-separated list of relation ids.
    #[arg(long, default_value = "all")]
    pub relations: String,
    #[arg(long, default_value_t = 0.05)]
    pub freq_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub freq_max: f64,
    /// Number of log-spaced grid points.
    #[arg(long, default_value_t = 40)]
    pub points: usize,
    /// Largest acceptable residual.
    #[arg(long, default_value_t = 1e-4)]
    pub threshold: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub window: f64,
    #[arg(long, default_value_t = 1e4)]
    pub cutoff: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

/// Parses "60deg", "60 deg", "60°", "1.2rad" or a bare number of radians.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, degrees) = if let Some(v) = t.strip_suffix("deg") {
        (v, true)
    } else if let Some(v) = t.strip_suffix('°') {
        (v, true)
    } else if let Some(v) = t.strip_suffix("rad") {
        (v, false)
    } else {
        (t, false)
    };
    let x: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("cannot read angle {s:?}; use e.g. 60deg or 1.047"))?;
    if !x.is_finite() {
        return Err(format!("angle must be finite, got {s:?}"));
    }
    Ok(if degrees { x.to_radians() } else { x })
}
