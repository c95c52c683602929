//! Discovery of sub-interval relationships (SIRs) between pairs of time
//! series: maximal-sum-length sets of disjoint, sufficiently long,
//! sufficiently strong intervals under a lock-step relationship measure.
//!
//! The exact solver ([`dp::solve_dp`]) is a weighted-interval-scheduling
//! dynamic program, quadratic in the series length. The partitioned solver
//! ([`pdp::solve_pdp`]) first finds timestamps no strong interval can
//! cross, splits there, and solves each piece independently; it returns the
//! same optimum and runs in close to linear time on typical data.
//!
//! On top of the solvers sit a randomization significance test
//! ([`significance`]), dataset-level batch mining with candidate selection
//! and redundancy pruning ([`pipeline`]), and CSV ingestion with the usual
//! preprocessing transforms ([`ingest`]).

pub mod dp;
mod error;
mod exec;
pub mod ingest;
pub mod measures;
pub mod pdp;
pub mod pipeline;
pub mod significance;
mod stats;
pub mod types;

pub use dp::{solve_dp, solve_dp_with_stats, solve_exhaustive, SolveStats};
pub use error::{Error, Result};
pub use measures::{MeasureEngine, MeasureKind, Orientation};
pub use pdp::{solve_pdp, solve_pdp_with_stats};
pub use types::{validate_sir, Interval, MinerConfig, SirResult, TimeSeries};
