use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Casimir pressure, free energy and entropy of a planar cavity, plus the
/// mode analysis of its walls.
#[derive(Debug, Parser)]
#[command(name = "casimir", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Casimir pressure (negative = attraction).
    Force(ThermoArgs),
    /// Internal energy per unit area, by two independent routes.
    Energy(ThermoArgs),
    /// Helmholtz free energy per unit area.
    FreeEnergy(ThermoArgs),
    /// Entropy per unit area.
    Entropy(ThermoArgs),
    /// Wall density of states across a real-frequency window.
    Dos(DosArgs),
    /// Cavity modes of delayed walls in a real-frequency window.
    Modes(ModesArgs),
    /// Unitarity, flux balance and delay-form checks of one interface.
    SmatrixCheck(SmatrixArgs),
}

/// Settings shared by every subcommand. Each may also be given in the
/// `--config` file as `key = value`, using the flag name without dashes.
#[derive(Debug, Args, Default)]
pub struct Common {
    /// Key-value config file; flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// `si` or `natural` (lengths in units of --length-unit, c = ħ = k_B = 1).
    #[arg(long, value_name = "si|natural")]
    pub units: Option<String>,
    /// Length unit of natural units [m].
    #[arg(long, value_name = "M")]
    pub length_unit: Option<String>,
    /// Relative tolerance.
    #[arg(long, value_name = "REL")]
    pub tol: Option<String>,
    /// Output file (default: stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    #[arg(long, value_name = "csv|json")]
    pub format: Option<String>,
    /// Worker threads (default: logical processors).
    #[arg(long, value_name = "N")]
    pub jobs: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct Cavity {
    #[arg(long, value_name = "SPEC")]
    pub mirror1: Option<String>,
    #[arg(long, value_name = "SPEC")]
    pub mirror2: Option<String>,
    #[arg(long, value_name = "L")]
    pub gap: Option<String>,
    #[arg(long, value_name = "START:STOP:COUNT:log|lin")]
    pub gap_sweep: Option<String>,
}

#[derive(Debug, Args)]
pub struct ThermoArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub cavity: Cavity,
    #[arg(long, value_name = "T")]
    pub temperature: Option<String>,
    #[arg(long, value_name = "START:STOP:COUNT:log|lin")]
    pub temperature_sweep: Option<String>,
}

#[derive(Debug, Args)]
pub struct DosArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub cavity: Cavity,
    /// Constant real product r1·r2, instead of --mirror1/--mirror2.
    #[arg(long, value_name = "R", allow_hyphen_values = true)]
    pub r_product: Option<String>,
    #[arg(long, value_name = "A:B")]
    pub window: Option<String>,
    /// Frequencies sampled across the window, endpoints included.
    #[arg(long, value_name = "N")]
    pub points: Option<String>,
    /// In-plane wavevector.
    #[arg(long, value_name = "Q")]
    pub q: Option<String>,
    #[arg(long, value_name = "s|p")]
    pub polarization: Option<String>,
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub cavity: Cavity,
    /// Constant real product r1·r2, instead of --mirror1/--mirror2.
    #[arg(long, value_name = "R", allow_hyphen_values = true)]
    pub r_product: Option<String>,
    #[arg(long, value_name = "A:B")]
    pub window: Option<String>,
    #[arg(long, value_name = "Q")]
    pub q: Option<String>,
    #[arg(long, value_name = "s|p")]
    pub polarization: Option<String>,
    /// Re-injection delay of both walls, or `T1,T2` (required).
    #[arg(long, value_name = "T")]
    pub delay: Option<String>,
    /// Emit one census record (counts and density estimate) instead of the mode list.
    #[arg(long)]
    pub census: bool,
}

#[derive(Debug, Args)]
pub struct SmatrixArgs {
    #[command(flatten)]
    pub common: Common,
    /// Vacuum-side reflection amplitude, e.g. `0.3+0.4i`.
    #[arg(long, value_name = "COMPLEX", allow_hyphen_values = true)]
    pub r: Option<String>,
    #[arg(long, value_name = "propagating|evanescent")]
    pub sector: Option<String>,
    /// k_v for propagating waves, κ_v for evanescent ones.
    #[arg(long, value_name = "K")]
    pub k_vacuum: Option<String>,
    #[arg(long, value_name = "K")]
    pub k_dielectric: Option<String>,
    /// Free phase δ of the interface (default: π propagating, 0 evanescent).
    #[arg(long, value_name = "RAD", allow_hyphen_values = true)]
    pub phase: Option<String>,
    /// Round-trip phases ωT for the delay-form comparison.
    #[arg(long, value_name = "START:STOP:COUNT:log|lin")]
    pub sweep: Option<String>,
}
