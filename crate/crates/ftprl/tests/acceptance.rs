//! Acceptance suite: one test per numbered criterion, each printing a
//! pass/fail line. Tolerances are pinned in the assertions.
//!
//! Run with `cargo test -p ftprl --test acceptance -- --nocapture`.

mod common;

use common::*;
use ftprl::*;
use std::time::Instant;

const SQRT2: f64 = std::f64::consts::SQRT_2;

struct Criterion {
    id: usize,
    desc: &'static str,
    ok: bool,
    detail: String,
}

impl Criterion {
    fn report(self) {
        println!(
            "criterion {:>2}: {} — {} ({})",
            self.id,
            if self.ok { "PASS" } else { "FAIL" },
            self.desc,
            self.detail
        );
        assert!(self.ok, "criterion {} failed: {}", self.id, self.detail);
    }
}

/// The shared random-instance suite: (set, trace) pairs cycling through
/// boxes, balls, and ellipsoids with uniform [-1, 1] gradients.
fn suite_instance(k: usize) -> (FeasibleSet, GradientTrace) {
    let mut rng = SplitMix64::new(0xACCE_0000 + k as u64);
    let n = 1 + rng.below(10);
    let rounds = 1 + rng.below(200);
    let set = match k % 3 {
        0 => random_box(&mut rng, n),
        1 => random_ball(&mut rng, n),
        _ => random_ellipsoid(&mut rng, n),
    };
    (set, uniform_trace(&mut rng, n, rounds))
}

fn suite_variants(set: &FeasibleSet) -> Vec<Variant> {
    let mut v = vec![Variant::Diag, Variant::Const];
    if matches!(set, FeasibleSet::TransformedBall { .. }) {
        v.push(Variant::Scale);
    }
    v
}

#[test]
fn criterion_01_regret_bound_holds_on_random_traces() {
    let start = Instant::now();
    let mut worst = f64::NEG_INFINITY;
    let mut runs = 0usize;
    for k in 0..500 {
        let (set, trace) = suite_instance(k);
        for variant in suite_variants(&set) {
            let config =
                LearnerConfig::new(variant, set.clone()).with_epsilon_seed(1e-6);
            let audit = audited_run(&config, &trace);
            let slack =
                audit.native_regret - (audit.r1t_at_comparator + audit.right_sum);
            worst = worst.max(slack);
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-6 && elapsed.as_secs_f64() < 30.0;
    Criterion {
        id: 1,
        desc: "regret <= comparator penalty + gradient penalty on 500 random instances",
        ok,
        detail: format!("{runs} runs, worst slack {worst:.2e}, {elapsed:.1?}"),
    }
    .report();
}

#[test]
fn criterion_02_diag_closed_form_bound() {
    let mut worst_regret_slack = f64::NEG_INFINITY;
    let mut worst_tracked_slack = f64::NEG_INFINITY;
    for k in 0..500 {
        let (set, trace) = suite_instance(k);
        let config = LearnerConfig::new(Variant::Diag, set).with_epsilon_seed(1e-6);
        let audit = audited_run(&config, &trace);
        let bound = audit.report.closed_form_bound;
        worst_regret_slack = worst_regret_slack.max(audit.report.regret - bound);
        worst_tracked_slack = worst_tracked_slack.max(audit.tracked_bound - bound);
    }
    let ok = worst_regret_slack <= 0.0 && worst_tracked_slack <= 1e-9;
    Criterion {
        id: 2,
        desc: "per-coordinate regret and tracked bound within the closed form",
        ok,
        detail: format!(
            "regret slack {worst_regret_slack:.2e}, tracked slack {worst_tracked_slack:.2e}"
        ),
    }
    .report();
}

#[test]
fn criterion_03_sqrt2_competitiveness() {
    let mut worst_box = f64::NEG_INFINITY;
    let mut worst_sphere = f64::NEG_INFINITY;
    let mut boxes = 0usize;
    for k in 0..500 {
        let (set, trace) = suite_instance(k);
        if matches!(set, FeasibleSet::Box { .. }) {
            let config =
                LearnerConfig::new(Variant::Diag, set.clone()).with_epsilon_seed(1e-6);
            let audit = audited_run(&config, &trace);
            let posthoc = audit.report.posthoc_bound;
            worst_box = worst_box.max(audit.tracked_bound - SQRT2 * posthoc);
            boxes += 1;
        }
        // replay every trace on the unit sphere for the constant scheme
        let sphere = FeasibleSet::l2_ball(trace.n(), 1.0).unwrap();
        let config = LearnerConfig::new(Variant::Const, sphere).with_epsilon_seed(1e-6);
        let audit = audited_run(&config, &trace);
        let posthoc = audit.report.posthoc_bound;
        worst_sphere = worst_sphere.max(audit.tracked_bound - SQRT2 * posthoc);
    }
    let ok = worst_box <= 1e-6 && worst_sphere <= 1e-6;
    Criterion {
        id: 3,
        desc: "tracked bound within sqrt(2) of the post-hoc optimum (boxes and sphere)",
        ok,
        detail: format!(
            "{boxes} boxes worst {worst_box:.2e}; 500 sphere runs worst {worst_sphere:.2e}"
        ),
    }
    .report();
}

#[test]
fn criterion_04_lazy_projection_equivalence() {
    let mut rng = SplitMix64::new(0xACCE_4444);
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    let f = |q: &DiagPsd, h: &Vector, x: &Vector| h.dot(x) + 0.5 * x.dot(&q.apply(x));
    for family in 0..4 {
        for _ in 0..200 {
            let n = 1 + rng.below(3);
            let set = match family {
                0 => random_box(&mut rng, n),
                1 => random_ball(&mut rng, n),
                2 => {
                    let p = [1.0, 1.5, 3.0, f64::INFINITY][rng.below(4)];
                    FeasibleSet::lp_ball(n, p, rng.uniform(0.5, 2.0)).unwrap()
                }
                _ => random_ellipsoid(&mut rng, n),
            };
            let q = DiagPsd::new(vec_from(&mut rng, n, 0.2, 5.0)).unwrap();
            let h = vec_from(&mut rng, n, -2.0, 2.0);
            let u = q.inverse().unwrap().apply(&h).scale(-1.0);
            let lazy = project(&set, &q.sqrt(), &u).unwrap();
            // independent oracle: projected gradient with Euclidean steps
            let step = 1.0 / q.max_entry();
            let eye = DiagPsd::identity(n);
            let mut x = Vector::zeros(n);
            for _ in 0..50_000 {
                let grad = h.add(&q.apply(&x));
                let next = project(&set, &eye, &x.sub(&grad.scale(step))).unwrap();
                let delta = next.sub(&x).norm_linf();
                x = next;
                if delta < 1e-12 {
                    break;
                }
            }
            worst = worst.max((f(&q, &h, &lazy) - f(&q, &h, &x)).abs());
            cases += 1;
        }
    }
    let ok = worst <= 1e-6;
    Criterion {
        id: 4,
        desc: "unconstrained-then-project equals direct constrained minimization",
        ok,
        detail: format!("{cases} cases, worst objective gap {worst:.2e}"),
    }
    .report();
}

#[test]
fn criterion_05_contraction_and_per_round_inequality() {
    let mut rng = SplitMix64::new(0xACCE_5555);
    let mut checks = 0usize;
    let mut worst = f64::NEG_INFINITY;
    // projection contraction across families (exact paths carry the bulk)
    let plan: &[(usize, usize)] = &[
        (0, 25_000), // box
        (1, 20_000), // L2 ball
        (2, 3_000),  // L1 ball
        (3, 200),    // p = 1.5 (iterative)
        (4, 200),    // p = 3 (iterative)
        (5, 3_000),  // max-norm ball
        (6, 6_000),  // ellipsoid
    ];
    for &(family, cases) in plan {
        for _ in 0..cases {
            let n = 1 + rng.below(5);
            let set = match family {
                0 => random_box(&mut rng, n),
                1 => random_ball(&mut rng, n),
                2 => FeasibleSet::lp_ball(n, 1.0, rng.uniform(0.5, 2.0)).unwrap(),
                3 => FeasibleSet::lp_ball(n, 1.5, rng.uniform(0.5, 2.0)).unwrap(),
                4 => FeasibleSet::lp_ball(n, 3.0, rng.uniform(0.5, 2.0)).unwrap(),
                5 => FeasibleSet::lp_ball(n, f64::INFINITY, rng.uniform(0.5, 2.0))
                    .unwrap(),
                _ => random_ellipsoid(&mut rng, n),
            };
            let (lo, hi) = if (3..=4).contains(&family) {
                (0.5, 2.0)
            } else {
                (0.3, 4.0)
            };
            let a = DiagPsd::new(vec_from(&mut rng, n, lo, hi)).unwrap().sqrt();
            let u1 = vec_from(&mut rng, n, -3.0, 3.0);
            let u2 = vec_from(&mut rng, n, -3.0, 3.0);
            let x1 = project(&set, &a, &u1).unwrap();
            let x2 = project(&set, &a, &u2).unwrap();
            let slack =
                a.apply(&x2.sub(&x1)).norm_l2() - a.apply(&u1.sub(&u2)).norm_l2();
            worst = worst.max(slack);
            checks += 1;
        }
    }
    // per-round progress inequality on random learner runs
    for k in 0..300 {
        let mut rng = SplitMix64::new(0xACCE_6000 + k as u64);
        let n = 1 + rng.below(6);
        let rounds = 20 + rng.below(100);
        let set = match k % 3 {
            0 => random_box(&mut rng, n),
            1 => random_ball(&mut rng, n),
            _ => random_ellipsoid(&mut rng, n),
        };
        let trace = uniform_trace(&mut rng, n, rounds);
        for variant in suite_variants(&set) {
            let config = LearnerConfig::new(variant, set.clone());
            let audit = audited_run(&config, &trace);
            worst = worst.max(audit.per_round_violation);
            checks += audit.per_round_checks;
        }
    }
    let ok = worst <= 1e-9 && checks >= 100_000;
    Criterion {
        id: 5,
        desc: "projection contraction and per-round progress inequality",
        ok,
        detail: format!("{checks} checks, worst violation {worst:.2e}"),
    }
    .report();
}

#[test]
fn criterion_06_lp_posthoc_dichotomy() {
    // p = 4 with unequal gradient mass: diagonal strictly beats constant
    let g = Vector::new(vec![1.0, 16.0]).unwrap();
    let numeric = posthoc_lp_diag(4.0, &g).unwrap();
    let best_const = 2.0 * (2.0 * 2f64.sqrt() * 17.0).sqrt();
    let margin = best_const - numeric.bound_value;

    // grid-search oracle over (lambda_1, lambda_2)
    let mut grid_best = f64::INFINITY;
    let steps = 800;
    for i in 0..steps {
        let l1 = 10f64.powf(-2.0 + 4.0 * (i as f64) / (steps as f64 - 1.0));
        for j in 0..steps {
            let l2 = 10f64.powf(-2.0 + 4.0 * (j as f64) / (steps as f64 - 1.0));
            grid_best =
                grid_best.min(2.0 * (l1 * l1 + l2 * l2).sqrt() + 1.0 / l1 + 16.0 / l2);
        }
    }
    let grid_confirms = numeric.bound_value <= grid_best + 1e-4 * grid_best
        && grid_best < best_const - 1e-3;

    // p <= 2: the optimizer is coordinate-constant
    let mut constant_ok = true;
    for p in [1.0, 1.5, 2.0] {
        let r = posthoc_lp_diag(p, &g).unwrap();
        match r.optimizer {
            PosthocOptimizer::Scalar(a) => constant_ok &= a > 0.0,
            PosthocOptimizer::Diagonal(d) => {
                let hi = d.diag().iter().cloned().fold(f64::MIN, f64::max);
                let lo = d.diag().iter().cloned().fold(f64::MAX, f64::min);
                constant_ok &= (hi - lo).abs() <= 1e-6 * hi;
            }
        }
    }
    let ok = margin >= 1e-3 && grid_confirms && constant_ok;
    Criterion {
        id: 6,
        desc: "diagonal post-hoc beats constant for p > 2, is constant for p <= 2",
        ok,
        detail: format!(
            "margin {margin:.4}, numeric {:.6} vs grid {grid_best:.6}",
            numeric.bound_value
        ),
    }
    .report();
}

#[test]
fn criterion_07_transformed_instance_equivalence() {
    let a = SymPd::from_diag(&[1.0, 2.0]).unwrap();
    let set = FeasibleSet::transformed_ball(a.clone(), 2.0).unwrap();
    let a_inv = a.inverse();
    let mut worst_loss_gap = 0.0f64;
    let mut bounds_ok = true;
    for seed in 0..100u64 {
        let mut rng = SplitMix64::new(0xACCE_7000 + seed);
        let rounds = 1 + rng.below(80);
        let trace = uniform_trace(&mut rng, 2, rounds);
        let mut scale =
            LearnerState::new(LearnerConfig::new(Variant::Scale, set.clone())).unwrap();
        let inner = FeasibleSet::lp_ball(2, 2.0, 1.0).unwrap();
        let mut cst = LearnerState::new(LearnerConfig::new(Variant::Const, inner)).unwrap();
        let mut g_raw = [0.0f64; 2];
        let mut g_hat_sq = [0.0f64; 2];
        for g in trace.iter() {
            let g_hat = a_inv.apply(&g);
            worst_loss_gap =
                worst_loss_gap.max((g.dot(scale.play()) - g_hat.dot(cst.play())).abs());
            scale.step(&g).unwrap();
            cst.step(&g_hat).unwrap();
            for i in 0..2 {
                g_raw[i] += g[i] * g[i];
                g_hat_sq[i] += g_hat[i] * g_hat[i];
            }
        }
        // the transformed closed form never exceeds the direct one
        let direct = 4.0 * (g_raw[0] + g_raw[1]).sqrt();
        let transformed = 4.0 * (g_hat_sq[0] + g_hat_sq[1]).sqrt();
        bounds_ok &= transformed <= direct + 1e-9;
    }
    let ok = worst_loss_gap <= 1e-9 && bounds_ok;
    Criterion {
        id: 7,
        desc: "transformed scheme matches the unit-ball run and improves the bound",
        ok,
        detail: format!("worst per-round loss gap {worst_loss_gap:.2e}"),
    }
    .report();
}

#[test]
fn criterion_08_heavy_tail_scaling() {
    let start = Instant::now();
    let n = 1000usize;
    let rounds = 10_000usize;
    let alpha = 1.5;
    let set = FeasibleSet::box_set(
        Vector::new(vec![-0.5; n]).unwrap(),
        Vector::new(vec![0.5; n]).unwrap(),
    )
    .unwrap();
    let predicted: f64 = (1..=n)
        .map(|i| (rounds as f64 * (i as f64).powf(-alpha)).sqrt())
        .sum();
    let mut ok = true;
    let mut detail = String::new();
    for seed in 0..5u64 {
        let spec = GeneratorSpec::heavy_tail(seed, n, rounds, alpha).unwrap();
        let trace = spec.generate();
        let mut g = vec![0.0f64; n];
        for row in trace.iter() {
            for i in 0..n {
                g[i] += row[i] * row[i];
            }
        }
        let observed: f64 = g.iter().map(|x| x.sqrt()).sum();
        let ratio = observed / predicted;
        let diag = run(&LearnerConfig::new(Variant::Diag, set.clone()), &trace).unwrap();
        let cst = run(&LearnerConfig::new(Variant::Const, set.clone()), &trace).unwrap();
        let seed_ok = (0.5..=2.0).contains(&ratio) && diag.regret < cst.regret;
        ok &= seed_ok;
        detail.push_str(&format!(
            "seed {seed}: ratio {ratio:.3} diag {:.0} const {:.0}; ",
            diag.regret, cst.regret
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 120.0;
    detail.push_str(&format!("{elapsed:.1?}"));
    Criterion {
        id: 8,
        desc: "heavy-tail gradients: bound scaling within 2x, diag beats const",
        ok,
        detail,
    }
    .report();
}

#[test]
fn criterion_09_blocked_family_trend() {
    let mut ok = true;
    let mut detail = String::new();
    for seed in [1u64, 2, 3] {
        let mut ratios = Vec::new();
        for rounds in [1_000usize, 10_000, 100_000] {
            let spec = GeneratorSpec::bad_family(seed, rounds, None).unwrap();
            let (trace, set) = bad_family_instance(&spec).unwrap();
            let diag =
                run(&LearnerConfig::new(Variant::Diag, set.clone()), &trace).unwrap();
            let ogd = run(&LearnerConfig::new(Variant::Ogd, set.clone()), &trace).unwrap();
            ratios.push(ogd.regret / diag.regret);
        }
        let monotone = ratios[0] < ratios[1] && ratios[1] < ratios[2];
        ok &= monotone;
        detail.push_str(&format!(
            "seed {seed}: {:.2} -> {:.2} -> {:.2}; ",
            ratios[0], ratios[1], ratios[2]
        ));
    }
    Criterion {
        id: 9,
        desc: "global-rate regret grows relative to per-coordinate on the blocked family",
        ok,
        detail,
    }
    .report();
}

#[test]
fn criterion_10_sum_and_leader_inequalities() {
    let mut rng = SplitMix64::new(0xACCE_AAAA);
    let mut worst_sum = f64::NEG_INFINITY;
    for _ in 0..100_000 {
        let n = 1 + rng.below(100);
        let x = Vector::new(
            (0..n)
                .map(|_| {
                    if rng.next_f64() < 0.15 {
                        0.0
                    } else {
                        rng.uniform(0.0, 10.0)
                    }
                })
                .collect(),
        )
        .unwrap();
        let (lhs, rhs) = sqrt_sum_inequality(&x).unwrap();
        worst_sum = worst_sum.max(lhs - rhs);
    }

    let mut worst_btl = f64::NEG_INFINITY;
    let mut worst_btrl = f64::NEG_INFINITY;
    for k in 0..10_000u64 {
        let mut rng = SplitMix64::new(0xACCE_B000 + k);
        let n = 1 + rng.below(4);
        let rounds = 1 + rng.below(25);
        let set = random_box(&mut rng, n);
        let trace = uniform_trace(&mut rng, n, rounds);
        let rows = trace.materialize();
        let mut prefix = Vector::zeros(n);
        let mut btl = 0.0;
        for g in &rows {
            prefix.add_assign(g);
            btl += g.dot(&set.linear_minimizer(&prefix));
        }
        let hindsight_point = set.linear_minimizer(&prefix);
        let hindsight: f64 = rows.iter().map(|g| g.dot(&hindsight_point)).sum();
        worst_btl = worst_btl.max(btl - hindsight);

        let config = LearnerConfig::new(Variant::Diag, set.clone());
        let audit = audited_run(&config, &trace);
        let comparator_loss = prefix.dot(&hindsight_point);
        worst_btrl = worst_btrl
            .max(audit.next_play_loss - comparator_loss - audit.r1t_at_comparator);
    }
    let ok = worst_sum <= 1e-9 && worst_btl <= 1e-9 && worst_btrl <= 1e-6;
    Criterion {
        id: 10,
        desc: "prefix-sum inequality and leader/regularized-leader inequalities",
        ok,
        detail: format!(
            "sum {worst_sum:.2e}, leader {worst_btl:.2e}, regularized {worst_btrl:.2e}"
        ),
    }
    .report();
}
