//! Solver and analysis toolkit for polynomial complementarity problems
//!
//! ```text
//! find x ∈ R^n with f(x) ≥ 0, g(x) ≥ 0, <f(x), g(x)> = 0
//! ```
//!
//! where `f, g: R^n -> R^n` are polynomial maps. The crate enumerates
//! solution sets through index-set decomposition, tracks continuation paths
//! of the natural map `m(x) = min{f(x), g(x)}`, probes existence and
//! compactness hypotheses by sampling, and checks Hölderian error bounds
//! `c·dist(x, SOL)^α ≤ ‖m(x)‖` against brute-force distances.

// Negated comparisons are used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod diagnostics;
pub mod enumerate;
pub mod error;
pub mod genericity;
pub mod homotopy;
pub mod index_set;
pub mod instance;
pub mod io;
pub mod lemke;
pub mod linalg;
pub mod poly;
pub mod residuals;
pub mod sampling;

pub use enumerate::{
    certify_solution, distance_to_solutions, enumerate_solutions, solve_subsystem, Certification,
    SolutionCertificate, SolutionSet, SolveConfig,
};
pub use error::{PcpError, Result};
pub use index_set::IndexSet;
pub use instance::PcpInstance;
pub use lemke::{lemke_lcp, LemkeOutcome};
pub use poly::{Monomial, PolyMap, Polynomial};
pub use residuals::{leading_min_map, min_phi, natural_map, phi_i, r_residual, scalar_min_bound};
