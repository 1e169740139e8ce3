//! The blocked instance family where a global learning rate provably pays:
//! each coordinate is active in only one block of rounds, so a global
//! schedule has already shrunk its steps before late coordinates wake up,
//! while per-coordinate regularization reacts instantly.
//!
//! The regret ratio grows with the horizon.
//!
//! ```bash
//! cargo run --release --example blocked_adversary
//! ```

use ftprl::*;

fn main() {
    println!(
        "{:>8} {:>7} {:>12} {:>12} {:>8}",
        "T", "coords", "ogd regret", "diag regret", "ratio"
    );
    for seed in [1u64, 2] {
        println!("--- seed {seed}");
        for rounds in [1_000usize, 10_000, 100_000] {
            let spec = GeneratorSpec::bad_family(seed, rounds, None).unwrap();
            let (trace, set) = bad_family_instance(&spec).unwrap();
            let diag =
                run(&LearnerConfig::new(Variant::Diag, set.clone()), &trace).unwrap();
            let ogd = run(&LearnerConfig::new(Variant::Ogd, set.clone()), &trace).unwrap();
            println!(
                "{:>8} {:>7} {:>12.1} {:>12.1} {:>8.2}",
                rounds,
                spec.n,
                ogd.regret,
                diag.regret,
                ogd.regret / diag.regret
            );
        }
    }
    println!();
    println!("the gradient-descent baseline can also run fixed or 1/sqrt(t) schedules:");
    let spec = GeneratorSpec::bad_family(1, 10_000, None).unwrap();
    let (trace, set) = bad_family_instance(&spec).unwrap();
    for (label, schedule) in [
        ("adaptive global", OgdSchedule::AdaptiveGlobal),
        ("constant 0.05", OgdSchedule::Constant(0.05)),
        ("0.5 / sqrt(t)", OgdSchedule::InvSqrtRound(0.5)),
    ] {
        let config =
            LearnerConfig::new(Variant::Ogd, set.clone()).with_ogd_schedule(schedule);
        let report = run(&config, &trace).unwrap();
        println!("  ogd {label:<16} regret {:>10.1}", report.regret);
    }
}
