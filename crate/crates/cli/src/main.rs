mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hypercox::andreev::Regime;

#[derive(Parser, Debug)]
#[command(name = "hypercox", version, about = "Hyperbolic Coxeter polyhedra: Andreev checks, Haken classification, volumes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RegimeArg {
    Strict,
    Ideal,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Strict => Regime::StrictCompact,
            RegimeArg::Ideal => Regime::AllowIdeal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Listed,
    Any,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeChoice {
    Strict,
    Ideal,
    All,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a polyhedron file and check it is a valid abstract polyhedron.
    Validate { file: PathBuf },
    /// Run the Andreev conditions on a labeled polyhedron.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "strict")]
        regime: RegimeArg,
    },
    /// List k-circuits.
    Circuits {
        file: PathBuf,
        /// Only this length; all lengths 3..=cap otherwise.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(4..))]
        cap: u64,
        #[arg(long)]
        prismatic_only: bool,
    },
    /// Decide whether the polyhedron is large (Haken) or small.
    Classify {
        file: PathBuf,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(4..))]
        cap: u64,
    },
    /// Solve for face normals and vertices in the hyperboloid model.
    Realize {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "strict")]
        regime: RegimeArg,
        #[arg(long, default_value_t = 1e-10, value_parser = positive)]
        residual: f64,
        /// Seed for a randomized starting configuration.
        #[arg(long)]
        perturb: Option<u64>,
    },
    /// Volume by integrating the Schläfli formula along a deformation path.
    Volume {
        file: PathBuf,
        /// Report twice the volume.
        #[arg(long)]
        doubled: bool,
        #[arg(long, default_value_t = 1e-8, value_parser = positive)]
        tol: f64,
        #[arg(long, default_value_t = 1e-10, value_parser = positive)]
        residual: f64,
        /// `linear`, or a path file of waypoints.
        #[arg(long, default_value = "linear")]
        path: String,
        /// Integration starts at this parameter value.
        #[arg(long, default_value_t = 1e-4, value_parser = positive)]
        epsilon: f64,
    },
    /// Enumerate admissible labelings up to symmetry.
    Census {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_label: u32,
        #[arg(long, value_enum, default_value = "strict")]
        regime: RegimeArg,
        /// Also integrate the volume of every row.
        #[arg(long)]
        volumes: bool,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
        /// Refuse to enumerate more candidates than this.
        #[arg(long, default_value_t = 50_000_000)]
        budget: u128,
    },
    /// Placements of three 3-labels on the cube.
    ThreeThrees {
        #[arg(long, value_enum, default_value = "strict")]
        regime: RegimeArg,
        /// Integrate the volume of one placement per orbit.
        #[arg(long)]
        volumes: bool,
    },
    /// Lobachevsky function at an angle (`pi/6`, `2pi/5`, `0.3`).
    Lob { theta: String },
    /// Volume of the ideal tetrahedron with dihedral angles a, b, c.
    Idealtet { a: String, b: String, c: String },
    /// Square pyramids with ideal apex against the published table.
    PyramidTable {
        #[arg(long, value_enum, default_value = "all")]
        convention: ConventionArg,
        #[arg(long, value_enum, default_value = "all")]
        regime: RegimeChoice,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(3..))]
        max_label: u32,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{s} is not a positive number"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = commands::run(&cli.command);
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", outcome.output);
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(outcome.code)
}
