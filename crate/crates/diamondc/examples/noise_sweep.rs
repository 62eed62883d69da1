//! Full reproduction sweep: both GHZ experiments over the evaluation grid
//! (depolarization 0..1e-3, coherence 0.1..100 s), written as CSV. This is
//! what `diamondc experiment --name ghz-swap --exact` produces.
//!
//! Run with: cargo run --release -p diamondc --example noise_sweep

use diamondc::experiments::{run_experiment, ExperimentName, ExperimentSpec};

fn main() {
    for name in [ExperimentName::GhzSwap, ExperimentName::GhzDirect] {
        let spec = ExperimentSpec {
            name,
            grid: ExperimentSpec::default_grid(),
            shots: 0,
            exact: true,
            seed: 0,
        };
        let out = run_experiment(&spec).unwrap();
        println!("=== {} (exact expectations) ===", out.experiment);
        print!("{}", out.to_csv());
        println!();
    }
}
