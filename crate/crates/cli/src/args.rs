use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "psatz", version, about = "Weighted-l1 projections onto truncated cones and Positivstellensatz searches")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Project f onto the truncated preordering or quadratic module.
    #[command(allow_negative_numbers = true)]
    Project {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Which primal formulation to solve.
        #[arg(long, value_enum, default_value_t = Form::Lambda)]
        form: Form,
        /// Also solve the moment dual and report the primal/dual gap.
        #[arg(long)]
        check_dual: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Test membership of f in the cone at level d.
    #[command(allow_negative_numbers = true)]
    Certify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Search d = 1..dmax for a certificate of f + eps*q_d.
    #[command(allow_negative_numbers = true)]
    Psatz {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        dmax: Option<u32>,
        /// weighted: q_d = 1 + sum x_i^2k/(2k)!; power: q_d = 1 + sum x_i^2d.
        #[arg(long)]
        mode: Option<String>,
        /// Sampled points of K for the nonnegativity sanity check.
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Necessary conditions for a moment file to come from a measure on K.
    #[command(allow_negative_numbers = true)]
    MomentsCheck {
        /// Moment file (`n <n> degree <2d> [measure]` header, then `a1 .. an value` lines).
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        system: Option<PathBuf>,
        /// Order of the localizing conditions; defaults to half the file degree.
        #[arg(long)]
        d: Option<u32>,
        /// Also test M_k(f y) ⪰ 0 for k ≤ d.
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
        /// Number of Carleman terms to report per variable.
        #[arg(long)]
        carleman: Option<u32>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write the SDP of a projection, dual or membership problem in SDPA format.
    #[command(allow_negative_numbers = true)]
    ExportSdpa {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value_t = Which::Lambda)]
        problem_kind: Which,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// L1 projections of the Motzkin-like polynomial for d = 3, 4, 5.
    #[command(allow_negative_numbers = true)]
    ReproMotzkin {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Lambda,
    General,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Lambda,
    General,
    Dual,
    Membership,
}

#[derive(Args, Debug, Default)]
pub struct ProblemArgs {
    /// System file (`n`, `cone` and `g:` lines). Without it K = R^n.
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// The polynomial, e.g. "x1^2*x2^2*(x1^2+x2^2-1)+1/27".
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Number of variables when no system file is given.
    #[arg(long)]
    pub nvars: Option<usize>,
    #[arg(long)]
    pub norm: Option<String>,
    /// quadratic or preorder; overrides the system file.
    #[arg(long)]
    pub cone: Option<String>,
    #[arg(long)]
    pub d: Option<u32>,
    /// Cone level t ≥ d; defaults to d.
    #[arg(long)]
    pub t: Option<u32>,
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// key=value file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
    /// Write the certificate or report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub feas_tol: Option<f64>,
    #[arg(long)]
    pub gap_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}
