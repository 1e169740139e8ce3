//! Online learners: the proximally-regularized leader recurrence with
//! per-coordinate (`Diag`), coordinate-constant (`Const`), and transformed
//! (`Scale`) regularization schedules, plus an online-gradient-descent
//! baseline.
//!
//! All variants share one update. After observing gradient `g_t` at the
//! played point `x_t`, the cumulative regularization diagonal `lambda_sum`
//! grows by a variant-specific increment, and the next point is
//!
//! ```text
//! u_{t+1} = (q_sum - g_sum) / lambda_sum        (entrywise)
//! x_{t+1} = project(F, diag(sqrt(lambda_sum)), u_{t+1})
//! ```
//!
//! where `q_sum` accumulates `lambda_t .* x_t`. The increments are chosen so
//! `lambda_sum` tracks `(2/D_i) sqrt(sum g^2)` per coordinate (`Diag`) or
//! `(2/D) sqrt(sum ||g||^2)` globally (`Const`). `Scale` runs `Const` on the
//! unit-ball instance obtained by mapping gradients through `A^{-1}` and maps
//! the play back.

use crate::linalg::{DiagPsd, SymPd, Vector};
use crate::project::{project, ProjectError};
use crate::set::FeasibleSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("gradient dimension {got} does not match problem dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite gradient entry at index {0}")]
    NonFiniteGradient(usize),
    #[error("variant {variant} requires {requirement}")]
    VariantMismatch {
        variant: &'static str,
        requirement: &'static str,
    },
    #[error("degenerate feasible set: {0}")]
    DegenerateSet(&'static str),
    #[error("epsilon seed must be nonnegative and finite, got {0}")]
    BadEpsilonSeed(f64),
    #[error(transparent)]
    Projection(#[from] ProjectError),
    #[error("numeric failure: {0}")]
    NumericFailure(&'static str),
}

/// Which regularization schedule drives the recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Diag,
    Const,
    Scale,
    Ogd,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Diag => "diag",
            Variant::Const => "const",
            Variant::Scale => "scale",
            Variant::Ogd => "ogd",
        }
    }
}

/// Step-size schedule for the gradient-descent baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OgdSchedule {
    /// `eta_t = D / (2 sqrt(G_t))` with `G_t` the running squared-gradient sum.
    AdaptiveGlobal,
    /// Fixed step size.
    Constant(f64),
    /// `eta_t = c / sqrt(t)`.
    InvSqrtRound(f64),
}

#[derive(Debug, Clone)]
pub struct LearnerConfig {
    pub variant: Variant,
    /// Virtual first-round gradient magnitude seeding the squared-gradient
    /// accumulators, so the first regularization matrix is strictly positive
    /// definite. Zero disables the seed (useful for exact hand traces).
    pub epsilon_seed: f64,
    pub feasible_set: FeasibleSet,
    pub ogd_schedule: OgdSchedule,
}

impl LearnerConfig {
    pub fn new(variant: Variant, feasible_set: FeasibleSet) -> Self {
        LearnerConfig {
            variant,
            epsilon_seed: 1e-6,
            feasible_set,
            ogd_schedule: OgdSchedule::AdaptiveGlobal,
        }
    }

    pub fn with_epsilon_seed(mut self, eps: f64) -> Self {
        self.epsilon_seed = eps;
        self
    }

    pub fn with_ogd_schedule(mut self, schedule: OgdSchedule) -> Self {
        self.ogd_schedule = schedule;
        self
    }
}

/// Running per-coordinate regularization state.
#[derive(Debug, Clone)]
pub struct RegAccumulator {
    /// Diagonal of the cumulative regularization matrix (nondecreasing).
    pub lambda_sum: Vector,
    /// Sum of `lambda_t .* x_t` across rounds.
    pub q_sum: Vector,
    /// Sum of observed gradients.
    pub g_sum: Vector,
    /// Per-coordinate sum of squared gradients, including the seed.
    pub grad_sq_sum: Vector,
    pub round: usize,
}

impl RegAccumulator {
    fn new(n: usize, epsilon_seed: f64) -> Self {
        RegAccumulator {
            lambda_sum: Vector::zeros(n),
            q_sum: Vector::zeros(n),
            g_sum: Vector::zeros(n),
            grad_sq_sum: Vector::from_raw(vec![epsilon_seed * epsilon_seed; n]),
            round: 0,
        }
    }
}

/// Everything a caller needs to audit one round: the native-space points,
/// the gradient in native coordinates, and the regularization increment.
///
/// "Native" is the space the recurrence runs in: identical to the problem
/// space except for `Scale`, which works on the transformed unit-ball
/// instance.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub x_before_native: Vector,
    pub x_after_native: Vector,
    pub g_native: Vector,
    /// Diagonal of this round's regularization increment.
    pub q_diag: Vector,
    /// Diagonal of the cumulative regularization after the update.
    pub lambda_after: Vector,
}

#[derive(Debug)]
struct ScaleTransform {
    a_inv: SymPd,
}

/// Single-owner learner state, mutated sequentially round by round.
#[derive(Debug)]
pub struct LearnerState {
    config: LearnerConfig,
    /// Problem-space play.
    x: Vector,
    /// Native-space play (transformed for `Scale`).
    x_native: Vector,
    acc: RegAccumulator,
    native_set: FeasibleSet,
    widths: Vector,
    diameter: f64,
    transform: Option<ScaleTransform>,
}

impl LearnerState {
    pub fn new(config: LearnerConfig) -> Result<Self, LearnerError> {
        if !config.epsilon_seed.is_finite() || config.epsilon_seed < 0.0 {
            return Err(LearnerError::BadEpsilonSeed(config.epsilon_seed));
        }
        let n = config.feasible_set.dim();
        let (native_set, transform) = match config.variant {
            Variant::Scale => match &config.feasible_set {
                FeasibleSet::TransformedBall { a, p } => {
                    let inner = FeasibleSet::lp_ball(n, *p, 1.0)
                        .expect("unit ball parameters are valid");
                    let t = ScaleTransform { a_inv: a.inverse() };
                    (inner, Some(t))
                }
                _ => {
                    return Err(LearnerError::VariantMismatch {
                        variant: "scale",
                        requirement: "a transformed-ball feasible set",
                    })
                }
            },
            _ => (config.feasible_set.clone(), None),
        };
        let widths = native_set.widths();
        let diameter = native_set.l2_diameter();
        match config.variant {
            Variant::Diag => {
                if widths.iter().all(|w| *w == 0.0) {
                    return Err(LearnerError::DegenerateSet("all coordinate widths are zero"));
                }
            }
            Variant::Const | Variant::Scale | Variant::Ogd => {
                if diameter.is_nan() || diameter <= 0.0 {
                    return Err(LearnerError::DegenerateSet("zero diameter"));
                }
            }
        }
        Ok(LearnerState {
            x: Vector::zeros(n),
            x_native: Vector::zeros(n),
            acc: RegAccumulator::new(n, config.epsilon_seed),
            native_set,
            widths,
            diameter,
            transform,
            config,
        })
    }

    /// The point currently played, in problem coordinates.
    pub fn play(&self) -> &Vector {
        &self.x
    }

    pub fn native_play(&self) -> &Vector {
        &self.x_native
    }

    pub fn native_set(&self) -> &FeasibleSet {
        &self.native_set
    }

    pub fn accumulator(&self) -> &RegAccumulator {
        &self.acc
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    /// Cached per-coordinate widths of the native set.
    pub fn native_widths(&self) -> &Vector {
        &self.widths
    }

    /// Cached L2 diameter of the native set.
    pub fn native_diameter(&self) -> f64 {
        self.diameter
    }

    /// Observe the gradient of round `t` at the played point and advance to
    /// round `t + 1`.
    pub fn step(&mut self, g: &Vector) -> Result<StepRecord, LearnerError> {
        let n = self.x.dim();
        if g.dim() != n {
            return Err(LearnerError::DimensionMismatch {
                expected: n,
                got: g.dim(),
            });
        }
        for (i, v) in g.iter().enumerate() {
            if !v.is_finite() {
                return Err(LearnerError::NonFiniteGradient(i));
            }
        }
        match self.config.variant {
            Variant::Diag => {
                let g_eff = self.mask_frozen(g);
                let cells = self.acc.grad_sq_sum.as_mut_slice();
                for i in 0..n {
                    if self.widths[i] > 0.0 {
                        cells[i] += g_eff[i] * g_eff[i];
                    }
                }
                let lambda_bar = Vector::from_raw(
                    (0..n)
                        .map(|i| {
                            if self.widths[i] > 0.0 {
                                2.0 / self.widths[i] * self.acc.grad_sq_sum[i].sqrt()
                            } else {
                                0.0
                            }
                        })
                        .collect(),
                );
                self.core_step(&g_eff, lambda_bar)
            }
            Variant::Const => {
                let lambda_bar = self.const_lambda_bar(g);
                self.core_step(&g.clone(), lambda_bar)
            }
            Variant::Scale => {
                let g_hat = self
                    .transform
                    .as_ref()
                    .expect("scale learner carries a transform")
                    .a_inv
                    .apply(g);
                let lambda_bar = self.const_lambda_bar(&g_hat);
                let rec = self.core_step(&g_hat, lambda_bar)?;
                let t = self.transform.as_ref().expect("transform present");
                self.x = t.a_inv.apply(&self.x_native);
                self.x
                    .validate()
                    .map_err(|_| LearnerError::NumericFailure("non-finite play"))?;
                Ok(rec)
            }
            Variant::Ogd => self.ogd_step(g),
        }
    }

    fn mask_frozen(&self, g: &Vector) -> Vector {
        if self.widths.iter().all(|w| *w > 0.0) {
            return g.clone();
        }
        Vector::from_raw(
            g.iter()
                .enumerate()
                .map(|(i, v)| if self.widths[i] > 0.0 { *v } else { 0.0 })
                .collect(),
        )
    }

    fn const_lambda_bar(&mut self, g_native: &Vector) -> Vector {
        let n = g_native.dim();
        let cells = self.acc.grad_sq_sum.as_mut_slice();
        for i in 0..n {
            cells[i] += g_native[i] * g_native[i];
        }
        let total: f64 = self.acc.grad_sq_sum.iter().sum();
        let alpha_bar = 2.0 * total.sqrt() / self.diameter;
        Vector::from_raw(vec![alpha_bar; n])
    }

    /// Shared recurrence: given the updated cumulative diagonal, advance
    /// `q_sum`, `g_sum`, and the play.
    fn core_step(
        &mut self,
        g_native: &Vector,
        lambda_bar: Vector,
    ) -> Result<StepRecord, LearnerError> {
        let n = g_native.dim();
        let x_before = self.x_native.clone();
        let lambda_inc = lambda_bar.sub(&self.acc.lambda_sum);
        debug_assert!(lambda_inc.iter().all(|v| *v >= 0.0));
        self.acc.q_sum.add_assign(&lambda_inc.hadamard(&x_before));
        self.acc.g_sum.add_assign(g_native);
        let u = Vector::from_raw(
            (0..n)
                .map(|i| {
                    if lambda_bar[i] > 0.0 {
                        (self.acc.q_sum[i] - self.acc.g_sum[i]) / lambda_bar[i]
                    } else {
                        // no regularization and no gradient seen: stay put
                        x_before[i]
                    }
                })
                .collect(),
        );
        u.validate()
            .map_err(|_| LearnerError::NumericFailure("non-finite unconstrained leader"))?;
        // inactive coordinates get unit weight; they are already at their
        // pinned value so the projection leaves them alone
        let weights = DiagPsd::new(Vector::from_raw(
            lambda_bar
                .iter()
                .map(|l| if *l > 0.0 { l.sqrt() } else { 1.0 })
                .collect(),
        ))
        .expect("nonnegative by construction");
        let x_next = project(&self.native_set, &weights, &u)?;
        x_next
            .validate()
            .map_err(|_| LearnerError::NumericFailure("non-finite play"))?;
        self.acc.lambda_sum = lambda_bar.clone();
        self.acc.round += 1;
        self.x_native = x_next.clone();
        if self.transform.is_none() {
            self.x = x_next.clone();
        }
        Ok(StepRecord {
            x_before_native: x_before,
            x_after_native: x_next,
            g_native: g_native.clone(),
            q_diag: lambda_inc,
            lambda_after: lambda_bar,
        })
    }

    fn ogd_step(&mut self, g: &Vector) -> Result<StepRecord, LearnerError> {
        let n = g.dim();
        let cells = self.acc.grad_sq_sum.as_mut_slice();
        for i in 0..n {
            cells[i] += g[i] * g[i];
        }
        let total: f64 = self.acc.grad_sq_sum.iter().sum();
        let round = self.acc.round + 1;
        let eta = match self.config.ogd_schedule {
            OgdSchedule::AdaptiveGlobal => {
                if total > 0.0 {
                    self.diameter / (2.0 * total.sqrt())
                } else {
                    0.0
                }
            }
            OgdSchedule::Constant(c) => c,
            OgdSchedule::InvSqrtRound(c) => c / (round as f64).sqrt(),
        };
        let x_before = self.x_native.clone();
        let target = x_before.sub(&g.scale(eta));
        target
            .validate()
            .map_err(|_| LearnerError::NumericFailure("non-finite descent target"))?;
        let x_next = project(&self.native_set, &DiagPsd::identity(n), &target)?;
        // implied coordinate-constant regularization, for bound tracking
        let alpha_bar = if eta > 0.0 { 1.0 / eta } else { 0.0 };
        let prev = self.acc.lambda_sum[0];
        let alpha_bar = alpha_bar.max(prev);
        let lambda_bar = Vector::from_raw(vec![alpha_bar; n]);
        let lambda_inc = lambda_bar.sub(&self.acc.lambda_sum);
        self.acc.q_sum.add_assign(&lambda_inc.hadamard(&x_before));
        self.acc.g_sum.add_assign(g);
        self.acc.lambda_sum = lambda_bar.clone();
        self.acc.round += 1;
        self.x_native = x_next.clone();
        self.x = x_next.clone();
        Ok(StepRecord {
            x_before_native: x_before,
            x_after_native: x_next,
            g_native: g.clone(),
            q_diag: lambda_inc,
            lambda_after: lambda_bar,
        })
    }
}
