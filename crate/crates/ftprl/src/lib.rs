//! Online convex optimization with adaptively chosen quadratic
//! regularization.
//!
//! The algorithms here follow the regularized leader with quadratic
//! regularizers centered at the current play; the regularization matrices
//! are chosen online from the gradients observed so far. Three schedules are
//! provided — per-coordinate diagonal, coordinate-constant, and a
//! transformed scheme for ellipsoidal feasible sets — together with an
//! online-gradient-descent baseline, online tracking of the regret-bound
//! function they minimize, post-hoc optimal bounds over matrix families, and
//! competitive-ratio verification.
//!
//! The `examples/` directory has one runnable program per capability; the
//! `ftprl` binary exposes the same machinery as `run`, `bound`, `compare`,
//! and `gen` subcommands.

pub mod bounds;
pub mod cli;
pub mod learner;
pub mod linalg;
pub mod loss;
pub mod problems;
pub mod project;
pub mod runner;
pub mod set;

pub use bounds::{
    box_approximation_ratio, competitive_ratio, posthoc_const_sphere, posthoc_diag_box,
    posthoc_fullpsd_sphere, posthoc_lp_diag, sqrt_sum_inequality, BoundTracker, BoundsError,
    PosthocFamily, PosthocOptimizer, PosthocResult,
};
pub use learner::{
    LearnerConfig, LearnerError, LearnerState, OgdSchedule, RegAccumulator, StepRecord, Variant,
};
pub use linalg::{DiagPsd, LinalgError, SymPd, Vector};
pub use loss::{abs_subgradient, linearize, quadratic_subgradient, LinearLoss};
pub use problems::{
    bad_family_instance, read_trace, write_trace, GeneratorKind, GeneratorSpec, GradientTrace,
    ProblemError, SplitMix64,
};
pub use project::{project, ProjectError, ProjectionProblem};
pub use runner::{run, run_trace, RegretReport, RoundView, RunError, RunOutcome};
pub use set::{dual_exponent, FeasibleSet, SetError, MEMBERSHIP_TOL};
