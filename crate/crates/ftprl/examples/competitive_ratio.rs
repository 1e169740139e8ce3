//! Competitive-ratio verification: the adaptive scheme's tracked bound stays
//! within sqrt(2) of the best fixed regularization chosen in hindsight, on
//! boxes (diagonal family) and the unit sphere (constant family).
//!
//! ```bash
//! cargo run --example competitive_ratio
//! ```

use ftprl::*;

fn main() {
    let sqrt2 = std::f64::consts::SQRT_2;
    println!("guarantee: kappa <= sqrt(2) = {sqrt2:.6}");
    println!();

    println!("diagonal scheme on boxes:");
    for seed in 0..5u64 {
        let mut rng = SplitMix64::new(seed);
        let n = 2 + rng.below(5);
        let set = FeasibleSet::box_set(
            Vector::new((0..n).map(|_| -rng.uniform(0.2, 1.5)).collect()).unwrap(),
            Vector::new((0..n).map(|_| rng.uniform(0.2, 1.5)).collect()).unwrap(),
        )
        .unwrap();
        let trace = GradientTrace::from_rows(
            (0..200)
                .map(|_| {
                    Vector::new((0..n).map(|_| rng.uniform(-1.0, 1.0)).collect()).unwrap()
                })
                .collect(),
        )
        .unwrap();
        let report = run(&LearnerConfig::new(Variant::Diag, set), &trace).unwrap();
        println!(
            "  n={n}: tracked {:.3} post-hoc {:.3} kappa {:.4}",
            report.tracked_bound_br, report.posthoc_bound, report.kappa
        );
        assert!(report.kappa <= sqrt2 + 1e-6);
    }

    println!("constant scheme on the unit sphere:");
    for seed in 10..15u64 {
        let mut rng = SplitMix64::new(seed);
        let n = 2 + rng.below(5);
        let set = FeasibleSet::l2_ball(n, 1.0).unwrap();
        let trace = GradientTrace::from_rows(
            (0..200)
                .map(|_| {
                    Vector::new((0..n).map(|_| rng.uniform(-1.0, 1.0)).collect()).unwrap()
                })
                .collect(),
        )
        .unwrap();
        let report = run(&LearnerConfig::new(Variant::Const, set), &trace).unwrap();
        println!(
            "  n={n}: tracked {:.3} post-hoc {:.3} kappa {:.4}",
            report.tracked_bound_br, report.posthoc_bound, report.kappa
        );
        assert!(report.kappa <= sqrt2 + 1e-6);
    }

    println!();
    println!("box-approximation ratios beta (competitiveness on general sets):");
    for (name, set) in [
        ("box".to_string(), FeasibleSet::box_set(
            Vector::new(vec![-1.0, -1.0]).unwrap(),
            Vector::new(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap()),
        ("L2 ball, n=4".to_string(), FeasibleSet::l2_ball(4, 1.0).unwrap()),
        (
            "ellipsoid diag(1,2)".to_string(),
            FeasibleSet::transformed_ball(SymPd::from_diag(&[1.0, 2.0]).unwrap(), 2.0)
                .unwrap(),
        ),
    ] {
        println!("  {name}: beta = {:.4}", box_approximation_ratio(&set).unwrap());
    }
}
