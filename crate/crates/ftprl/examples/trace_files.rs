//! Trace files: generate a gradient trace, write it as CSV, read it back,
//! run a learner on it, and stream a per-round CSV for plotting.
//!
//! ```bash
//! cargo run --example trace_files
//! ```

use ftprl::*;
use std::io::Write;

fn main() {
    let dir = std::env::temp_dir().join("ftprl_trace_demo");
    std::fs::create_dir_all(&dir).unwrap();
    let trace_path = dir.join("heavy_tail.csv");
    let rounds_path = dir.join("per_round.csv");

    let spec = GeneratorSpec::heavy_tail(3, 6, 400, 1.2).unwrap();
    write_trace(&spec.generate(), &trace_path).unwrap();
    println!("wrote {}", trace_path.display());

    let trace = read_trace(&trace_path).unwrap();
    println!("read back: n={} T={}", trace.n(), trace.rounds());

    let set = FeasibleSet::box_set(
        Vector::new(vec![-0.5; 6]).unwrap(),
        Vector::new(vec![0.5; 6]).unwrap(),
    )
    .unwrap();
    let config = LearnerConfig::new(Variant::Diag, set.clone());

    let mut csv = std::io::BufWriter::new(std::fs::File::create(&rounds_path).unwrap());
    writeln!(csv, "t,loss,regret,B_R").unwrap();
    let mut g_prefix = Vector::zeros(6);
    let outcome = run_trace(&config, &trace, |view| {
        g_prefix.add_assign(view.g);
        if view.t % 20 == 0 {
            let comparator = set.linear_minimizer(&g_prefix);
            let regret = view.cumulative_loss - g_prefix.dot(&comparator);
            writeln!(
                csv,
                "{},{:.6},{:.6},{:.6}",
                view.t,
                view.loss,
                regret,
                view.tracker.value()
            )
            .unwrap();
        }
    })
    .unwrap();
    csv.flush().unwrap();
    println!("wrote {}", rounds_path.display());
    println!();
    println!(
        "final: regret {:.3}, tracked bound {:.3}, kappa {:.3}",
        outcome.report.regret, outcome.report.tracked_bound_br, outcome.report.kappa
    );
    println!();
    println!("the same flow through the CLI:");
    println!("  ftprl gen --generator 'heavytail:alpha=1.2;n=6' --seed 3 --rounds 400 --out trace.csv");
    println!("  ftprl run --learner diag --set 'box:-0.5..0.5,...' --trace trace.csv \\");
    println!("            --per-round-csv rounds.csv --sample-every 20");
}
