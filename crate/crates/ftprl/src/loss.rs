//! Linear losses and the subgradient reduction.
//!
//! A round's convex loss enters the learners only through a subgradient at
//! the played point, so regret against the linearizations upper-bounds true
//! regret and we can treat every loss as linear.

use crate::linalg::Vector;

/// A linear loss `x -> g^T x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearLoss {
    g: Vector,
}

impl LinearLoss {
    pub fn new(g: Vector) -> Self {
        LinearLoss { g }
    }

    pub fn gradient(&self) -> &Vector {
        &self.g
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        self.g.dot(x)
    }
}

/// Wrap a subgradient of the round's loss at the played point. The observed
/// loss value does not enter the linearized game, only the gradient does.
pub fn linearize(_loss_value: f64, g: Vector) -> LinearLoss {
    LinearLoss::new(g)
}

/// Gradient of the squared distance `||x - center||_2^2`.
pub fn quadratic_subgradient(x: &Vector, center: &Vector) -> Vector {
    x.sub(center).scale(2.0)
}

/// Subgradient of `sum_i |x_i|`; at a kink the midpoint 0 is chosen.
pub fn abs_subgradient(x: &Vector) -> Vector {
    Vector::new(
        x.iter()
            .map(|v| {
                if *v > 0.0 {
                    1.0
                } else if *v < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            })
            .collect(),
    )
    .expect("signs are finite")
}
