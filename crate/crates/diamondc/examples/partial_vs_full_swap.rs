//! The swap comparison: read out a 4-carbon GHZ state with full swaps
//! (general compiler) vs partial swaps (diamond-optimized) and sweep
//! depolarization and decoherence noise. The logical value is the product of
//! the four carbon readouts and should stay near +1.
//!
//! Run with: cargo run -p diamondc --example partial_vs_full_swap

use diamondc::experiments::{
    compile_for_experiment, ghz_source, run_experiment, ExperimentName, ExperimentSpec,
};
use diamondc::passes::PipelineConfig;
use diamondc::simulator::{scheduled_duration, DurationTable};
use diamondc::topology::{QubitId, TopologyConfig};

fn main() {
    // Gate-count and duration comparison of the two compilations.
    let topo = TopologyConfig::new(1, 5).unwrap();
    let measured: Vec<QubitId> = (1..=4).map(QubitId).collect();
    let durations = DurationTable::default();
    for (label, cfg) in [
        ("full swaps (baseline)", PipelineConfig::baseline()),
        ("partial swaps        ", PipelineConfig::optimized()),
    ] {
        let program = compile_for_experiment(&ghz_source(0), &topo, &cfg, &measured, None).unwrap();
        let crots = program
            .instructions
            .iter()
            .filter(|op| {
                matches!(
                    op,
                    diamondc::codegen::AsmOp::CRot { .. }
                        | diamondc::codegen::AsmOp::QGateDir { .. }
                )
            })
            .count();
        println!(
            "{label}: {:3} instructions, {crots:2} conditional carbon pulses, {:.1} ms scheduled",
            program.instructions.len(),
            scheduled_duration(&program, &durations) * 1e3
        );
    }

    // Mini noise sweep (exact expectations, no sampling error).
    let spec = ExperimentSpec {
        name: ExperimentName::GhzSwap,
        grid: vec![(0.0, Some(100.0)), (5e-4, Some(1.0)), (1e-3, Some(0.1))],
        shots: 0,
        exact: true,
        seed: 1,
    };
    let out = run_experiment(&spec).unwrap();
    println!("\np_depol  T_coh   variant       logical <Z Z Z Z>");
    for row in &out.rows {
        println!(
            "{:<8} {:<6} {:<13} {:+.6}",
            row.p_depol,
            row.t_coh.map_or("inf".into(), |t| t.to_string()),
            row.variant,
            row.expectation
        );
    }
}
