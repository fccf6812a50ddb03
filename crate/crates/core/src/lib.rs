//! Tableau-based synthesis, extension checking and model checking of
//! partial Kripke models for K, LTL and CTL.
//!
//! Given a partial model `M` with root `s` and a formula `Φ`, [`solver::solve`]
//! decides whether some admissible extension of `M` satisfies `Φ` at `s` and,
//! if so, returns one. [`oracle`] answers the same question by bounded brute
//! force and [`checker`] evaluates formulas on complete models.

pub mod checker;
pub mod dot;
mod error;
pub mod gen;
pub mod models;
pub mod oracle;
pub mod solver;
pub mod syntax;
pub mod tableau;

pub use error::{Error, Result};
pub use models::{ExtensionPolicy, PartialModel, SynthesizedModel};
pub use solver::{decide_epm, decide_mcpm, solve, solve_sat, Verdict};
pub use syntax::{parse, to_nnf, Formula, LogicId};
pub use tableau::Status;
