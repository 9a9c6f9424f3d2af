//! Uniform sampling of constrained lattice paths with the peak/valley
//! Markov chain.
//!
//! Paths have `n` steps of `+a` or `-b` and belong to one of four families
//! (meanders, paths above a wall, excursions, culminating paths). The chain
//! picks a position with a concave weight profile and exchanges a peak and
//! a valley there; its grand coupling is monotone, which gives exact samples
//! by coupling from the past. The [`oracle`] module recomputes every
//! quantity by brute force on small instances.

pub mod cftp;
pub mod chain;
pub mod error;
pub mod flip;
pub mod oracle;
pub mod path;
pub mod rng;
pub mod weights;

pub use cftp::{cftp_sample, longest_chain_bound, Cftp, CftpResult};
pub use chain::{coupling_time, estimate_functional, mcmc_run, CouplingOutcome, Functional, Init};
pub use error::{PathError, Result};
pub use flip::{chain_step, flip_raw, Direction, FlipInstruction, Tail};
pub use path::{
    d1, partial_le, pointwise_max, pointwise_min, FamilyConstraint, FamilyKind, FamilySpec, LatticePath, PathRecord,
    Step, StepParams,
};
pub use rng::TupleStream;
pub use weights::{WeightMode, WeightTable};

/// Step count for which the contraction bound guarantees total variation at
/// most `tv_target` from any start: `2 · ⌈(2/3) n²(n+1) ln(n(n+1) / (2 tv_target))⌉`.
/// The factor 2 accounts for the end-pair contraction being half the
/// interior one.
pub fn default_steps(n: usize, tv_target: f64) -> u64 {
    let nf = n as f64;
    let t = (2.0 / 3.0) * nf * nf * (nf + 1.0) * (nf * (nf + 1.0) / (2.0 * tv_target)).ln();
    2 * t.max(0.0).ceil() as u64
}
