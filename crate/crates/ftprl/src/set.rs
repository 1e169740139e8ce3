//! Parametric feasible-set families: axis-aligned boxes, L2/Lp balls, and
//! linearly transformed balls `{x : ||Ax||_p <= 1}`.
//!
//! Every set contains the origin. The geometry queries used by the learners
//! (per-coordinate widths, L2 diameter, linear minimizer) have closed forms
//! for each family.

use crate::linalg::{SymPd, Vector};
use thiserror::Error;

/// Absolute tolerance for membership tests, absorbing floating-point drift
/// from projections (which are exact only in exact arithmetic).
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SetError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("set must contain the origin: coordinate {0} has bounds [{1}, {2}]")]
    OriginExcluded(usize, f64, f64),
    #[error("box has zero width in every coordinate")]
    AllWidthsZero,
    #[error("box bounds inverted at coordinate {0}")]
    InvertedBounds(usize),
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("Lp exponent must lie in [1, inf], got {0}")]
    BadExponent(f64),
    #[error("dimension must be at least 1")]
    ZeroDim,
}

#[derive(Debug, Clone)]
pub enum FeasibleSet {
    /// `{x : lo_i <= x_i <= hi_i}` with `lo_i <= 0 <= hi_i`.
    Box { lo: Vector, hi: Vector },
    /// `{x : ||x||_2 <= radius}`.
    L2Ball { dim: usize, radius: f64 },
    /// `{x : ||x||_p <= radius}` with `p` in [1, inf]; `f64::INFINITY`
    /// is the max-norm.
    LpBall { dim: usize, p: f64, radius: f64 },
    /// `{x : ||Ax||_p <= 1}` for symmetric positive-definite `A`.
    TransformedBall { a: SymPd, p: f64 },
}

fn validate_exponent(p: f64) -> Result<(), SetError> {
    if p.is_nan() || p < 1.0 {
        return Err(SetError::BadExponent(p));
    }
    Ok(())
}

/// Exponent of the dual norm: 1/p + 1/q = 1.
pub fn dual_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

impl FeasibleSet {
    pub fn box_set(lo: Vector, hi: Vector) -> Result<Self, SetError> {
        if lo.dim() != hi.dim() {
            return Err(SetError::DimensionMismatch(lo.dim(), hi.dim()));
        }
        if lo.dim() == 0 {
            return Err(SetError::ZeroDim);
        }
        let mut any_positive = false;
        for i in 0..lo.dim() {
            if hi[i] < lo[i] {
                return Err(SetError::InvertedBounds(i));
            }
            if lo[i] > 0.0 || hi[i] < 0.0 {
                return Err(SetError::OriginExcluded(i, lo[i], hi[i]));
            }
            if hi[i] - lo[i] > 0.0 {
                any_positive = true;
            }
        }
        if !any_positive {
            return Err(SetError::AllWidthsZero);
        }
        Ok(FeasibleSet::Box { lo, hi })
    }

    pub fn l2_ball(dim: usize, radius: f64) -> Result<Self, SetError> {
        if dim == 0 {
            return Err(SetError::ZeroDim);
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(SetError::BadRadius(radius));
        }
        Ok(FeasibleSet::L2Ball { dim, radius })
    }

    pub fn lp_ball(dim: usize, p: f64, radius: f64) -> Result<Self, SetError> {
        if dim == 0 {
            return Err(SetError::ZeroDim);
        }
        validate_exponent(p)?;
        if !radius.is_finite() || radius <= 0.0 {
            return Err(SetError::BadRadius(radius));
        }
        Ok(FeasibleSet::LpBall { dim, p, radius })
    }

    pub fn transformed_ball(a: SymPd, p: f64) -> Result<Self, SetError> {
        validate_exponent(p)?;
        Ok(FeasibleSet::TransformedBall { a, p })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Box { lo, .. } => lo.dim(),
            FeasibleSet::L2Ball { dim, .. } => *dim,
            FeasibleSet::LpBall { dim, .. } => *dim,
            FeasibleSet::TransformedBall { a, .. } => a.dim(),
        }
    }

    /// Per-coordinate widths `D_i = max_{x, x' in F} |x_i - x'_i|`.
    ///
    /// For a transformed ball the width along `e_i` is twice the dual norm of
    /// the `i`th column of `A^{-1}`.
    pub fn widths(&self) -> Vector {
        match self {
            FeasibleSet::Box { lo, hi } => hi.sub(lo),
            FeasibleSet::L2Ball { dim, radius } => {
                Vector::from_raw(vec![2.0 * radius; *dim])
            }
            FeasibleSet::LpBall { dim, radius, .. } => {
                Vector::from_raw(vec![2.0 * radius; *dim])
            }
            FeasibleSet::TransformedBall { a, p } => {
                let n = a.dim();
                let q = dual_exponent(*p);
                let mut w = Vec::with_capacity(n);
                for i in 0..n {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    let col = a.apply_inverse(&Vector::from_raw(e));
                    w.push(2.0 * col.norm_lp(q));
                }
                Vector::from_raw(w)
            }
        }
    }

    /// L2 diameter `max_{y, y' in F} ||y - y'||_2`.
    pub fn l2_diameter(&self) -> f64 {
        match self {
            FeasibleSet::Box { lo, hi } => hi.sub(lo).norm_l2(),
            FeasibleSet::L2Ball { radius, .. } => 2.0 * radius,
            FeasibleSet::LpBall { dim, p, radius } => {
                if *p >= 2.0 {
                    // farthest pair is +-r in every coordinate direction,
                    // scaled onto the Lp sphere
                    let n = *dim as f64;
                    if p.is_infinite() {
                        2.0 * radius * n.sqrt()
                    } else {
                        2.0 * radius * n.powf(0.5 - 1.0 / p)
                    }
                } else {
                    2.0 * radius
                }
            }
            FeasibleSet::TransformedBall { a, p } => {
                if *p == 2.0 {
                    2.0 / a.min_eigenvalue()
                } else {
                    2.0 * max_l2_over_lp_ball(a, *p)
                }
            }
        }
    }

    /// `argmin_{x in F} c^T x`.
    pub fn linear_minimizer(&self, c: &Vector) -> Vector {
        assert_eq!(self.dim(), c.dim(), "linear_minimizer dimension mismatch");
        match self {
            FeasibleSet::Box { lo, hi } => Vector::from_raw(
                c.iter()
                    .enumerate()
                    .map(|(i, ci)| {
                        if *ci > 0.0 {
                            lo[i]
                        } else if *ci < 0.0 {
                            hi[i]
                        } else {
                            0.0
                        }
                    })
                    .collect(),
            ),
            FeasibleSet::L2Ball { dim, radius } => {
                let norm = c.norm_l2();
                if norm == 0.0 {
                    Vector::zeros(*dim)
                } else {
                    c.scale(-radius / norm)
                }
            }
            FeasibleSet::LpBall { dim, p, radius } => {
                lp_ball_linear_minimizer(*dim, *p, *radius, c)
            }
            FeasibleSet::TransformedBall { a, p } => {
                // substitute y = Ax: min over ||y||_p <= 1 of (A^{-1}c)^T y
                let c_hat = a.apply_inverse(c);
                let y = lp_ball_linear_minimizer(a.dim(), *p, 1.0, &c_hat);
                a.apply_inverse(&y)
            }
        }
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.contains_with_tol(x, MEMBERSHIP_TOL)
    }

    pub fn contains_with_tol(&self, x: &Vector, tol: f64) -> bool {
        if self.dim() != x.dim() {
            return false;
        }
        match self {
            FeasibleSet::Box { lo, hi } => (0..x.dim())
                .all(|i| x[i] >= lo[i] - tol && x[i] <= hi[i] + tol),
            FeasibleSet::L2Ball { radius, .. } => x.norm_l2() <= radius + tol,
            FeasibleSet::LpBall { p, radius, .. } => x.norm_lp(*p) <= radius + tol,
            FeasibleSet::TransformedBall { a, p } => a.apply(x).norm_lp(*p) <= 1.0 + tol,
        }
    }
}

/// Minimizer of `c^T x` over `{||x||_p <= r}`: the negative dual-norm
/// extreme point.
fn lp_ball_linear_minimizer(dim: usize, p: f64, r: f64, c: &Vector) -> Vector {
    if c.iter().all(|v| *v == 0.0) {
        return Vector::zeros(dim);
    }
    if p == 1.0 {
        // all mass on a coordinate of largest |c_i|
        let mut best = 0;
        for i in 1..dim {
            if c[i].abs() > c[best].abs() {
                best = i;
            }
        }
        let mut x = vec![0.0; dim];
        x[best] = -r * c[best].signum();
        return Vector::from_raw(x);
    }
    if p.is_infinite() {
        return Vector::from_raw(
            c.iter()
                .map(|ci| if *ci == 0.0 { 0.0 } else { -r * ci.signum() })
                .collect(),
        );
    }
    if p == 2.0 {
        return c.scale(-r / c.norm_l2());
    }
    let q = dual_exponent(p);
    let cq = c.norm_lp(q);
    Vector::from_raw(
        c.iter()
            .map(|ci| {
                if *ci == 0.0 {
                    0.0
                } else {
                    -r * ci.signum() * (ci.abs() / cq).powf(q - 1.0)
                }
            })
            .collect(),
    )
}

/// `max ||A^{-1} y||_2 over ||y||_p <= 1`, the half-diameter of a transformed
/// Lp ball. Exact for p in {1, 2}; for other exponents a multi-start
/// projected ascent estimate (the quantity is only needed for diagnostics
/// on those sets, never by the core recurrences).
fn max_l2_over_lp_ball(a: &SymPd, p: f64) -> f64 {
    let n = a.dim();
    if p == 2.0 {
        return 1.0 / a.min_eigenvalue();
    }
    if p == 1.0 {
        // extreme points of the cross-polytope are +-e_i
        let mut best: f64 = 0.0;
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            best = best.max(a.apply_inverse(&Vector::from_raw(e)).norm_l2());
        }
        return best;
    }
    let mut starts: Vec<Vector> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        starts.push(Vector::from_raw(e));
    }
    // sign-vector starts cover the L-infinity vertices
    let corners = 1usize << n.min(12);
    for mask in 0..corners {
        let v: Vec<f64> = (0..n)
            .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
            .collect();
        let v = Vector::from_raw(v);
        let nrm = v.norm_lp(p);
        starts.push(v.scale(1.0 / nrm));
    }
    let mut best: f64 = 0.0;
    for y0 in starts {
        let mut y = y0;
        for _ in 0..200 {
            let img = a.apply_inverse(&y);
            let nrm = img.norm_l2();
            if nrm == 0.0 {
                break;
            }
            // gradient of ||A^{-1}y|| is A^{-1}(A^{-1}y)/||..||
            let grad = a.apply_inverse(&img).scale(1.0 / nrm);
            let stepped = y.add(&grad.scale(0.5 / grad.norm_l2().max(1e-300)));
            let scaled = stepped.scale(1.0 / stepped.norm_lp(p));
            if scaled.sub(&y).norm_linf() < 1e-12 {
                y = scaled;
                break;
            }
            y = scaled;
        }
        best = best.max(a.apply_inverse(&y).norm_l2());
    }
    best
}
