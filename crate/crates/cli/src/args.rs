use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "conevol", version, about = "Cone volume measures, SCC checks and the antipodal volume bound")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for random bodies and solver restarts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Hull coplanarity tolerance, relative to the diameter.
    #[arg(long, global = true)]
    pub coplanar_tol: Option<f64>,

    /// SCC equality tolerance, relative to the total mass.
    #[arg(long, global = true)]
    pub equality_tol: Option<f64>,

    /// Residual below which the planar solver reports a solution.
    #[arg(long, global = true)]
    pub solver_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// φ(α, β, n) and its minimiser; each argument takes a value or start:stop:step.
    Phi {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        n: String,
    },
    /// ρ₀(γ, n) with its bracket and τ.
    Rho0 {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        n: String,
    },
    /// Cone volume measure of a polytope given by vertices.
    ConeVolume {
        /// Polytope JSON; stdin if omitted.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Subspace concentration check of a measure or of a polytope's cone volume measure.
    CheckScc {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Only essential subspaces.
        #[arg(long)]
        essential: bool,
    },
    /// Volume bound for a facet pair ±u, or for every antipodal pair if no direction is given.
    VerifyAntipodal {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
    },
    /// Equality body over a centred base given in coordinates of u⊥.
    Extremal {
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        /// Defaults to the last coordinate axis.
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Planar equality trapezoid.
    Trapezoid {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
    },
    /// Truncated pyramid P_r with its essential-subspace reports.
    TruncatedPyramid {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: f64,
    },
    /// Solve the pentagon family μ_ε over a grid of ε.
    PentagonScan {
        #[arg(long, default_value_t = 0.49)]
        alpha: f64,
        #[arg(long, default_value_t = 0.09)]
        beta: f64,
        #[arg(long, default_value = "0.01:0.5:0.01")]
        eps: String,
    },
    /// Random polytope: hull of points on the sphere, optionally symmetric or cut by a slab.
    RandomBody {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        symmetric: bool,
        #[arg(long, conflicts_with = "symmetric")]
        slab: bool,
    },
}
