use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::grid_spec::{parse_complex, parse_radii, GridSpec, Radii};

#[derive(Debug, Clone, Parser)]
#[command(name = "hschwarz", version, about = "Harmonic Schwarzian derivatives of planar harmonic maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate a quantity of one map over the grid.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Map name.
        #[arg(long)]
        map: String,
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Step of the finite-difference route used for the route deviation.
        #[arg(long, default_value_t = 1e-3)]
        stencil_step: f64,
    },
    /// Decide whether two maps have the same harmonic Schwarzian (JSON verdict).
    CheckEqual {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        #[arg(long, default_value_t = hschwarz::equivalence::FIELD_TOL)]
        tol_field: f64,
        #[arg(long, default_value_t = hschwarz::equivalence::WITNESS_TOL)]
        tol_witness: f64,
        /// Base point `re,im` for the normalization step (default: first admissible grid point).
        #[arg(long, value_parser = parse_complex)]
        base_point: Option<Complex64>,
    },
    /// Normalize a map at a base point (JSON document plus transformation record).
    Normalize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        map: String,
        /// Base point `re,im`.
        #[arg(long, value_parser = parse_complex, default_value = "0,0")]
        w: Complex64,
    },
    /// Run verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        first: String,
        /// Second map; defaults to the first.
        #[arg(long)]
        second: Option<String>,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = hschwarz::equivalence::FIELD_TOL)]
        tol_field: f64,
        /// Base point `re,im` for normalizing the pair (default: first admissible grid point).
        #[arg(long, value_parser = parse_complex)]
        base_point: Option<Complex64>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Map document (JSON lines); `-` reads standard input.
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated radii.
    #[arg(long, value_parser = parse_radii)]
    pub grid_radii: Option<Radii>,
    #[arg(long, default_value_t = 16)]
    pub grid_angles: usize,
    /// Extra grid point `re,im`; repeatable.
    #[arg(long = "grid-point", value_parser = parse_complex)]
    pub grid_points: Vec<Complex64>,
    #[arg(long, default_value_t = 0.8)]
    pub max_radius: f64,
    /// Output format. `normalize` always writes JSON; `check-equal` writes a
    /// one-row summary for `csv`.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl Common {
    pub fn grid_spec(&self) -> GridSpec {
        let default = GridSpec::default();
        GridSpec {
            radii: self.grid_radii.clone().map(|r| r.0).unwrap_or(default.radii),
            angles: self.grid_angles,
            extra: self.grid_points.clone(),
            max_radius: self.max_radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Value,
    Jacobian,
    Dilatation,
    Preschwarzian,
    Schwarzian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Invariance,
    Prop31,
    Thm33,
    Corollary,
    Phi,
    Limits,
    All,
}
