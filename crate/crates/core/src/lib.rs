//! Cellular homology of level sets of Morse functions.
//!
//! The crate is organized around a single substrate, [`chaincore::CellComplex`]:
//! a finite graded CW complex given by integer incidence data. On top of it:
//!
//! - [`homology`] computes Betti numbers and torsion over `Q`, `F_p`, `Z` and
//!   `Z_k` (the latter via universal coefficients), relative homology of pairs,
//!   induced maps and orders of cycle classes. All arithmetic is exact.
//! - [`levelset`] extracts level sets `f^-1(a)`, bands `f^-1[a,b]` and sublevel
//!   sets of simplexwise-linear fields (and of rectangular grid samples), and
//!   sweeps their homology across levels.
//! - [`morserules`] is a decision engine: given a description of a critical
//!   level being passed, it answers whether the level-set topology MUST change,
//!   MAY fail to change, or no rule applies, citing the rule that fired. It
//!   also checks computed sweeps against the admissible Betti-number deltas.
//! - [`mechanics`] builds concrete scenarios: reference spaces, twisted circle
//!   bundles, collapsed bundles over Hill regions, the quadratic spherical
//!   pendulum and the planar restricted 3-body problem.
//! - [`scenario`] is the config/report layer shared by the CLI.

pub mod chaincore;
pub mod homology;
pub mod levelset;
pub mod mechanics;
pub mod morserules;
pub mod scenario;

pub use chaincore::{CellComplex, CellId, CoefficientSpec, ComplexBuilder};
pub use homology::HomologySummary;
