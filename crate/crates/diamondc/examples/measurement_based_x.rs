//! Measurement-based X: flip a carbon conditioned on the electron readout,
//! using the branch-skip pattern in the emitted assembly. Prints the 2x2
//! confusion matrix over 1000 shots per preparation.
//!
//! Run with: cargo run -p diamondc --example measurement_based_x

use diamondc::experiments::{run_experiment, ExperimentName, ExperimentSpec};

fn main() {
    let spec = ExperimentSpec {
        name: ExperimentName::MeasX,
        grid: vec![(0.0, None)],
        shots: 1000,
        exact: false,
        seed: 7,
    };
    let out = run_experiment(&spec).unwrap();
    println!("confusion matrix (1000 shots each, zero noise):");
    println!("{:>12} {:>8} {:>8}", "", "carbon +1", "carbon -1");
    let conf = &out.details["confusion"];
    for prep in ["prep_zero", "prep_one"] {
        println!(
            "{:>12} {:>9} {:>8}",
            prep, conf[prep]["plus"], conf[prep]["minus"]
        );
    }
    for row in &out.rows {
        println!(
            "{}: carbon expectation {:+.3}",
            row.variant, row.expectation
        );
    }
}
