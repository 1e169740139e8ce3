//! Shared helpers for the integration suites: seeded random instances and an
//! audited runner that retains per-round data for bound verification.

#![allow(dead_code)]

use ftprl::*;

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub fn vec_from(rng: &mut SplitMix64, n: usize, lo: f64, hi: f64) -> Vector {
    Vector::new((0..n).map(|_| rng.uniform(lo, hi)).collect()).unwrap()
}

/// Random orthogonal matrix by Gram-Schmidt on Gaussian columns.
pub fn random_rotation(rng: &mut SplitMix64, n: usize) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        for c in &cols {
            let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            for i in 0..n {
                v[i] -= dot * c[i];
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        for x in &mut v {
            *x /= norm;
        }
        cols.push(v);
    }
    // columns into rows: R[i][j] = col_j[i]
    (0..n)
        .map(|i| (0..n).map(|j| cols[j][i]).collect())
        .collect()
}

/// Random symmetric positive-definite matrix with eigenvalues in [lo, hi].
pub fn random_sympd(rng: &mut SplitMix64, n: usize, lo: f64, hi: f64) -> SymPd {
    let r = random_rotation(rng, n);
    let eigs: Vec<f64> = (0..n).map(|_| rng.uniform(lo, hi)).collect();
    // A = R diag(e) R^T
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += r[i][k] * eigs[k] * r[j][k];
            }
            rows[i][j] = acc;
        }
    }
    SymPd::new(rows).unwrap()
}

pub fn random_box(rng: &mut SplitMix64, n: usize) -> FeasibleSet {
    let lo = Vector::new((0..n).map(|_| -rng.uniform(0.1, 2.0)).collect()).unwrap();
    let hi = Vector::new((0..n).map(|_| rng.uniform(0.1, 2.0)).collect()).unwrap();
    FeasibleSet::box_set(lo, hi).unwrap()
}

pub fn random_ball(rng: &mut SplitMix64, n: usize) -> FeasibleSet {
    FeasibleSet::l2_ball(n, rng.uniform(0.5, 2.0)).unwrap()
}

pub fn random_ellipsoid(rng: &mut SplitMix64, n: usize) -> FeasibleSet {
    FeasibleSet::transformed_ball(random_sympd(rng, n, 0.6, 2.5), 2.0).unwrap()
}

/// Uniform [-1, 1] gradient rows.
pub fn uniform_trace(rng: &mut SplitMix64, n: usize, rounds: usize) -> GradientTrace {
    GradientTrace::from_rows((0..rounds).map(|_| vec_from(rng, n, -1.0, 1.0)).collect()).unwrap()
}

/// A feasible point of the set, by rejection from its bounding box or by
/// scaling into the ball.
pub fn random_feasible(rng: &mut SplitMix64, set: &FeasibleSet) -> Vector {
    let n = set.dim();
    match set {
        FeasibleSet::Box { lo, hi } => Vector::new(
            (0..n).map(|i| rng.uniform(lo[i], hi[i])).collect(),
        )
        .unwrap(),
        _ => loop {
            let w = set.widths();
            let cand = Vector::new(
                (0..n)
                    .map(|i| rng.uniform(-w[i] / 2.0, w[i] / 2.0))
                    .collect(),
            )
            .unwrap();
            if set.contains_with_tol(&cand, 0.0) {
                return cand;
            }
        },
    }
}

/// One audited run: the report plus the per-round quantities needed to check
/// the regret bound chain in native coordinates.
pub struct Audited {
    pub report: RegretReport,
    /// Realized linearized regret in native coordinates.
    pub native_regret: f64,
    /// Quadratic penalty accumulated at the native comparator.
    pub r1t_at_comparator: f64,
    /// Total inverse-norm gradient penalty (the bound's right term).
    pub right_sum: f64,
    /// Worst per-round violation of g (x_t - x_{t+1}) <= ||A_t^{-1} g||^2.
    pub per_round_violation: f64,
    pub per_round_checks: usize,
    /// Sum of next-play losses, for the be-the-regularized-leader check.
    pub next_play_loss: f64,
    pub tracked_bound: f64,
}

pub fn audited_run(config: &LearnerConfig, trace: &GradientTrace) -> Audited {
    struct Row {
        x_before: Vector,
        x_after: Vector,
        g: Vector,
        q_diag: Vector,
        lambda_after: Vector,
    }
    let mut rows: Vec<Row> = Vec::with_capacity(trace.rounds());
    let mut tracked = 0.0;
    let outcome = run_trace(config, trace, |view| {
        rows.push(Row {
            x_before: view.record.x_before_native.clone(),
            x_after: view.record.x_after_native.clone(),
            g: view.record.g_native.clone(),
            q_diag: view.record.q_diag.clone(),
            lambda_after: view.record.lambda_after.clone(),
        });
        tracked = view.tracker.value();
    })
    .expect("audited run failed");
    let n = trace.n().max(1);
    let mut g_sum = Vector::zeros(n);
    for row in &rows {
        g_sum.add_assign(&row.g);
    }
    let comparator = &outcome.comparator;
    let mut cumulative = 0.0;
    let mut next_play_loss = 0.0;
    let mut r1t = 0.0;
    let mut right = 0.0;
    let mut violation = f64::NEG_INFINITY;
    for row in &rows {
        cumulative += row.g.dot(&row.x_before);
        next_play_loss += row.g.dot(&row.x_after);
        let mut inv_norm_sq = 0.0;
        for i in 0..n {
            let d = comparator[i] - row.x_before[i];
            r1t += 0.5 * row.q_diag[i] * d * d;
            if row.g[i] != 0.0 {
                inv_norm_sq += row.g[i] * row.g[i] / row.lambda_after[i];
            }
        }
        right += inv_norm_sq;
        let progress = row.g.dot(&row.x_before.sub(&row.x_after));
        violation = violation.max(progress - inv_norm_sq);
    }
    let native_regret = cumulative - g_sum.dot(comparator);
    Audited {
        report: outcome.report,
        native_regret,
        r1t_at_comparator: r1t,
        right_sum: right,
        per_round_violation: if rows.is_empty() { 0.0 } else { violation },
        per_round_checks: rows.len(),
        next_play_loss,
        tracked_bound: tracked,
    }
}
