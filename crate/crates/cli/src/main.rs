//! `fuzzybox`: data behind the window, operator, commutator, mass, potential
//! and force curves of the coherent-state quantization of a particle in a
//! box, plus oracle cross-checks and trajectory runs.

mod commands;
mod config;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Settings;
use crate::table::emit;

/// Failure classes, one exit code each.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Io(String),
    Config(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Config(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "fuzzybox",
    version,
    about = "Coherent-state quantization of a particle in an interval"
)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand. Lengths are in model units, momenta
/// `p` in units of ℏ/q0, times in units of m q0²/ℏ.
#[derive(Args, Debug, Default)]
struct Common {
    /// Left endpoint
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Right endpoint (default a + 10 q0)
    #[arg(long, global = true, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Use the half-line (a, ∞)
    #[arg(long, global = true)]
    half_line: bool,
    /// Quantization length
    #[arg(long, global = true)]
    ell: Option<f64>,
    /// Reduced Planck constant
    #[arg(long, global = true)]
    hbar: Option<f64>,
    /// Particle mass
    #[arg(long, global = true)]
    mass: Option<f64>,
    /// Unit of length
    #[arg(long, global = true)]
    q0: Option<f64>,
    /// Sampling step
    #[arg(long, global = true)]
    grid_h: Option<f64>,
    /// Write `<name>.csv` files into this directory instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// File of `key = value` lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated `key=value` overrides
    #[arg(long, global = true)]
    params: Option<String>,
    /// Momentum in units of ℏ/q0
    #[arg(long, global = true, allow_hyphen_values = true)]
    p: Option<f64>,
    /// Start position or probe centre
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<f64>,
    /// Probe width
    #[arg(long, global = true)]
    width: Option<f64>,
    /// Final time
    #[arg(long, global = true)]
    t_end: Option<f64>,
    /// Integration step
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Keep every n-th trajectory sample
    #[arg(long, global = true)]
    stride: Option<usize>,
    /// Left end of the sampled range
    #[arg(long, global = true, allow_hyphen_values = true)]
    x_min: Option<f64>,
    /// Right end of the sampled range
    #[arg(long, global = true, allow_hyphen_values = true)]
    x_max: Option<f64>,
    /// First probe centre
    #[arg(long, global = true, allow_hyphen_values = true)]
    c_min: Option<f64>,
    /// Last probe centre
    #[arg(long, global = true, allow_hyphen_values = true)]
    c_max: Option<f64>,
    /// Spacing of probe centres
    #[arg(long, global = true)]
    c_step: Option<f64>,
    /// Members of the classical-limit sequence
    #[arg(long, global = true)]
    levels: Option<usize>,
}

impl Common {
    fn flags(&self) -> Settings {
        Settings {
            a: self.a,
            b: self.b,
            half_line: self.half_line.then_some(true),
            ell: self.ell,
            hbar: self.hbar,
            mass: self.mass,
            q0: self.q0,
            grid_h: self.grid_h,
            out: self.out.clone(),
            p: self.p,
            q: self.q,
            width: self.width,
            t_end: self.t_end,
            dt: self.dt,
            stride: self.stride,
            x_min: self.x_min,
            x_max: self.x_max,
            c_min: self.c_min,
            c_max: self.c_max,
            c_step: self.c_step,
            levels: self.levels,
        }
    }

    fn resolve(&self) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        if let Some(path) = &self.config {
            s = s.overlay(Settings::from_file(path)?);
        }
        if let Some(list) = &self.params {
            s = s.overlay(Settings::from_params(list)?);
        }
        let s = s.overlay(self.flags());
        s.validate()?;
        Ok(s)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Window profile B and its derivatives
    Window,
    /// Position symbol Q and spectral density
    Operator,
    /// Commutator function and its departure from 1
    Commutator,
    /// ⟨C_om⟩ for Gaussian probes as a function of their centre
    Uncertainty,
    /// Induced position-dependent mass
    Mass,
    /// Induced potentials V⁻ and V⁺ in units of ℏ²/(m q0²)
    Potentials,
    /// Semi-classical force in units of ℏ²/(2 m q0²)
    Force,
    /// Semi-classical portraits of the restricted observables
    Portrait {
        /// Evaluate by phase-space quadrature instead of closed forms
        #[arg(long)]
        quadrature: bool,
    },
    /// Quantization oracle versus assembled matrices
    QuantizeCheck,
    /// Semi-classical trajectory
    Simulate {
        /// Emit the hard-wall reference flight instead
        #[arg(long)]
        hard_wall: bool,
    },
    /// Penetration depth along the classical-limit sequence
    LimitStudy,
    /// Regenerate every figure dataset
    Figures {
        #[arg(long, required = true)]
        all: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut settings = cli.common.resolve()?;
    let (tables, failures, name) = match &cli.command {
        Command::Window => (commands::window(&settings, "window")?, 0, "window"),
        Command::Operator => (commands::operator(&settings, "operator")?, 0, "operator"),
        Command::Commutator => (
            commands::commutator(&settings, "commutator")?,
            0,
            "commutator",
        ),
        Command::Uncertainty => (
            commands::uncertainty(&settings, "uncertainty")?,
            0,
            "uncertainty",
        ),
        Command::Mass => (commands::mass_profile(&settings, "mass")?, 0, "mass"),
        Command::Potentials => (
            commands::potentials(&settings, "potentials")?,
            0,
            "potentials",
        ),
        Command::Force => (commands::force(&settings, "force")?, 0, "force"),
        Command::Portrait { quadrature } => (
            commands::portraits(&settings, "portrait", *quadrature)?,
            0,
            "portrait",
        ),
        Command::QuantizeCheck => {
            let (t, failures) = commands::quantize_check(&settings, "quantize_check")?;
            (t, failures, "quantize-check")
        }
        Command::Simulate { hard_wall } => (
            commands::simulate(&settings, "simulate", *hard_wall)?,
            0,
            "simulate",
        ),
        Command::LimitStudy => (
            commands::limit_study(&settings, "limit_study")?,
            0,
            "limit-study",
        ),
        Command::Figures { .. } => {
            if settings.out.is_none() {
                settings.out = Some(PathBuf::from("figures"));
            }
            (commands::figures(&settings)?, 0, "figures")
        }
    };
    emit(&tables, name, &settings)?;
    if failures > 0 {
        return Err(CliError::Numerical(format!(
            "{failures} checks exceeded their tolerance"
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fuzzybox: {e}");
            ExitCode::from(e.code())
        }
    }
}
