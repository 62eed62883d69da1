//! Direct carbon control vs electron-preserving DDrf: apply an even number
//! of X gates to each carbon of a GHZ state and compare how the two
//! decompositions hold up under noise. Direct control halves the time per
//! rotation by parking the electron in |1>, which liveness analysis permits
//! here because the electron has just been measured.
//!
//! Run with: cargo run -p diamondc --example direct_vs_ddrf

use diamondc::experiments::{
    compile_for_experiment, ghz_source, run_experiment, ExperimentName, ExperimentSpec,
};
use diamondc::passes::PipelineConfig;
use diamondc::simulator::{scheduled_duration, DurationTable};
use diamondc::topology::{QubitId, TopologyConfig};

fn main() {
    let topo = TopologyConfig::new(1, 5).unwrap();
    let measured: Vec<QubitId> = (1..=4).map(QubitId).collect();
    let durations = DurationTable::default();
    let source = ghz_source(4); // four X gates per carbon
    for (label, cfg) in [
        ("DDrf only     ", PipelineConfig::ddrf_only()),
        ("direct control", PipelineConfig::optimized()),
    ] {
        let program = compile_for_experiment(&source, &topo, &cfg, &measured, None).unwrap();
        println!(
            "{label}: {:.1} ms scheduled",
            scheduled_duration(&program, &durations) * 1e3
        );
    }

    let spec = ExperimentSpec {
        name: ExperimentName::GhzDirect,
        grid: vec![(0.0, Some(100.0)), (5e-4, Some(1.0)), (1e-3, Some(0.1))],
        shots: 0,
        exact: true,
        seed: 1,
    };
    let out = run_experiment(&spec).unwrap();
    println!("\np_depol  T_coh   variant  logical <Z Z Z Z>");
    for row in &out.rows {
        println!(
            "{:<8} {:<6} {:<8} {:+.6}",
            row.p_depol,
            row.t_coh.map_or("inf".into(), |t| t.to_string()),
            row.variant,
            row.expectation
        );
    }
}
