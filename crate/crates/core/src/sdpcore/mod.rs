//! Block-diagonal SDPs: data model, interior-point solver, SDPA export and an
//! independent certificate check.

mod check;
mod problem;
mod sdpa;
mod solver;

pub use check::{check_certificate, CertificateReport};
pub use problem::{BlockKind, BlockSparse, BlockSpec, Constraint, SdpProblem, Sense};
pub use sdpa::{export_sdpa, parse_sdpa};
pub use solver::{solve, SdpSolution, SolveStatus, SolverConfig};
