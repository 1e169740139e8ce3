//! Minimal end-to-end run: a per-coordinate learner on a box, fed a random
//! gradient trace, reporting realized regret against the tracked and
//! post-hoc bounds.
//!
//! ```bash
//! cargo run --example run_experiment
//! ```

use ftprl::*;

fn main() {
    let n = 4;
    let set = FeasibleSet::box_set(
        Vector::new(vec![-0.5; n]).unwrap(),
        Vector::new(vec![0.5; n]).unwrap(),
    )
    .unwrap();

    let spec = GeneratorSpec::random_sphere(7, n, 500).unwrap();
    let trace = spec.generate();

    let config = LearnerConfig::new(Variant::Diag, set);
    let report = run(&config, &trace).unwrap();

    println!("learner          : {}", report.learner);
    println!("rounds           : {}", report.rounds);
    println!("cumulative loss  : {:.4}", report.cumulative_loss);
    println!("comparator loss  : {:.4}", report.comparator_loss);
    println!("regret           : {:.4}", report.regret);
    println!("tracked bound    : {:.4}", report.tracked_bound_br);
    println!("closed-form bound: {:.4}", report.closed_form_bound);
    println!("post-hoc bound   : {:.4}", report.posthoc_bound);
    println!("kappa            : {:.4}", report.kappa);
    println!();
    println!("full JSON report:");
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
