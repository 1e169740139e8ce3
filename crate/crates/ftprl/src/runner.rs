//! Drives a learner over a gradient trace, accumulating realized losses,
//! the tracked bound, the learner's closed-form bound, a post-hoc bound for
//! the matching regularization family, and the competitive ratio.

use crate::bounds::{posthoc_const_sphere, posthoc_diag_box, BoundTracker, BoundsError};
use crate::learner::{LearnerConfig, LearnerError, LearnerState, StepRecord, Variant};
use crate::linalg::Vector;
use crate::problems::GradientTrace;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("trace dimension {trace} does not match set dimension {set}")]
    DimensionMismatch { trace: usize, set: usize },
    #[error("infeasible play at round {round}")]
    Infeasible { round: usize },
    #[error("non-finite loss at round {round}")]
    NonFiniteLoss { round: usize },
}

/// One experiment's results. `regret = cumulative_loss - comparator_loss`;
/// `kappa = tracked_bound_BR / posthoc_bound` when the post-hoc bound is
/// positive.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RegretReport {
    pub schema: u32,
    pub learner: String,
    pub rounds: usize,
    pub cumulative_loss: f64,
    pub comparator_loss: f64,
    pub regret: f64,
    #[serde(rename = "tracked_bound_BR")]
    pub tracked_bound_br: f64,
    pub closed_form_bound: f64,
    pub posthoc_bound: f64,
    pub kappa: f64,
    pub wall_time_ms: u64,
}

/// Per-round view handed to the observer callback while a run is in flight.
pub struct RoundView<'a> {
    /// 1-based round index.
    pub t: usize,
    /// Problem-space gradient.
    pub g: &'a Vector,
    /// Problem-space play the gradient was observed at.
    pub x_played: &'a Vector,
    /// Realized loss `g^T x_t`.
    pub loss: f64,
    pub cumulative_loss: f64,
    pub record: &'a StepRecord,
    pub tracker: &'a BoundTracker,
}

pub struct RunOutcome {
    pub report: RegretReport,
    /// Native-space comparator point.
    pub comparator: Vector,
}

/// Runs `config`'s learner over the trace. The observer fires once per round
/// after the learner has stepped and the bound tracker has been updated.
pub fn run_trace<F>(
    config: &LearnerConfig,
    trace: &GradientTrace,
    mut on_round: F,
) -> Result<RunOutcome, RunError>
where
    F: FnMut(RoundView<'_>),
{
    let started = std::time::Instant::now();
    let set = config.feasible_set.clone();
    if trace.rounds() > 0 && trace.n() != set.dim() {
        return Err(RunError::DimensionMismatch {
            trace: trace.n(),
            set: set.dim(),
        });
    }
    let mut learner = LearnerState::new(config.clone())?;
    let native_set = learner.native_set().clone();
    let mut tracker = BoundTracker::new(set.dim());
    let mut cumulative = 0.0;
    let mut g_sum = Vector::zeros(set.dim());
    for (idx, g) in trace.iter().enumerate() {
        let t = idx + 1;
        let x = learner.play().clone();
        if !set.contains(&x) {
            return Err(RunError::Infeasible { round: t });
        }
        let loss = g.dot(&x);
        if !loss.is_finite() {
            return Err(RunError::NonFiniteLoss { round: t });
        }
        cumulative += loss;
        g_sum.add_assign(&g);
        let record = learner.step(&g)?;
        tracker.track_round(&native_set, &record.q_diag, &record.g_native)?;
        on_round(RoundView {
            t,
            g: &g,
            x_played: &x,
            loss,
            cumulative_loss: cumulative,
            record: &record,
            tracker: &tracker,
        });
    }
    let comparator_point = set.linear_minimizer(&g_sum);
    let comparator_loss = g_sum.dot(&comparator_point);
    let regret = cumulative - comparator_loss;

    let g_total_seeded: f64 = learner.accumulator().grad_sq_sum.iter().sum();
    let closed_form_bound = match config.variant {
        Variant::Diag => {
            let w = learner.native_widths();
            let g = &learner.accumulator().grad_sq_sum;
            2.0 * (0..w.dim())
                .map(|i| w[i] * g[i].sqrt())
                .sum::<f64>()
        }
        Variant::Const | Variant::Scale | Variant::Ogd => {
            2.0 * learner.native_diameter() * g_total_seeded.sqrt()
        }
    };

    // post-hoc family matched to the learner's guarantee, over the observed
    // (seed-free) gradients in native coordinates
    let posthoc_bound = match config.variant {
        Variant::Diag => {
            let r = posthoc_diag_box(learner.native_widths(), tracker.per_coord_g())?;
            r.bound_value
        }
        Variant::Const | Variant::Scale | Variant::Ogd => {
            let g_total = tracker.g_total();
            if g_total > 0.0 {
                posthoc_const_sphere(learner.native_diameter(), g_total)?.bound_value
            } else {
                0.0
            }
        }
    };
    let tracked = tracker.value();
    let kappa = if posthoc_bound > 0.0 {
        tracked / posthoc_bound
    } else {
        0.0
    };
    let native_comparator = {
        let native_g = learner.accumulator().g_sum.clone();
        learner.native_set().linear_minimizer(&native_g)
    };
    Ok(RunOutcome {
        report: RegretReport {
            schema: 1,
            learner: config.variant.name().to_string(),
            rounds: trace.rounds(),
            cumulative_loss: cumulative,
            comparator_loss,
            regret,
            tracked_bound_br: tracked,
            closed_form_bound,
            posthoc_bound,
            kappa,
            wall_time_ms: started.elapsed().as_millis() as u64,
        },
        comparator: native_comparator,
    })
}

/// Convenience wrapper discarding per-round data.
pub fn run(config: &LearnerConfig, trace: &GradientTrace) -> Result<RegretReport, RunError> {
    run_trace(config, trace, |_| {}).map(|o| o.report)
}
