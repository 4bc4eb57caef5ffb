//! Truncated moment sequences and the matrices built from them.

mod diagnostics;
mod io;
mod localizing;
mod matrix;
mod sequence;

pub use diagnostics::{
    carleman_diagnostic, kmoment_condition_check, support_nonnegativity_test, CarlemanSeries,
    CarlemanTerm, KMomentReport, KMomentVerdict, LocalizingCheck, SupportVerdict,
};
pub use io::{format_moments, parse_moments};
pub use localizing::{build_basis_matrices, localizing_matrix, moment_matrix, BasisMatrixSet};
pub use matrix::{SparseSym, Spectrum, SymMatrix, PSD_TOL};
pub use sequence::{dual_norm, riesz, MomentSequence};
