//! Walk a small circuit through every compiler pass and print what each
//! stage produces: lowering, init/measure routing, electron liveness,
//! carbon-control and swap selection, diagnostics, and final assembly.
//!
//! Run with: cargo run -p diamondc --example compile_pipeline

use diamondc::circuit::parse_circuit;
use diamondc::codegen::{disassemble, emit};
use diamondc::passes::{
    analyze_electron_liveness, insert_diagnostics, lower_to_native, route_init_measure,
    select_carbon_control, select_swaps, swap_decisions, DiagnosticsConfig, PipelineConfig,
};
use diamondc::topology::{QubitId, TopologyConfig};

const SOURCE: &str = "\
qubits 3
creg m
init q1
h q1
measure q0 -> m
rx q2 0.7
h q2
measure q2 -> m";

fn main() {
    let circuit = parse_circuit(SOURCE).unwrap();
    let topology = TopologyConfig::new(1, 3).unwrap();
    let config = PipelineConfig::optimized();

    let lowered = lower_to_native(&circuit, &topology).unwrap();
    println!("[1] lowered: {} native ops", lowered.instrs.len());

    let routed = route_init_measure(&lowered);
    println!(
        "[2] routed:  {} ops (carbon init/measure now swap placeholders)",
        routed.instrs.len()
    );

    let liveness = analyze_electron_liveness(&routed);
    println!("[3] electron liveness (position: flag [conditions]):");
    for (i, instr) in routed.instrs.iter().enumerate() {
        let flag = liveness.electron_irrelevant(i, QubitId(0));
        let just = liveness.justification(i, QubitId(0));
        println!(
            "    {i:2} {:<60} {} {:?}",
            format!("{:?}", instr.op),
            flag,
            just
        );
    }

    let decisions = swap_decisions(&routed, &liveness, &config);
    println!("[4] swap decisions: {decisions:?}");

    let controlled = select_carbon_control(&routed, &liveness, &config, &decisions);
    let swapped = select_swaps(&controlled, &decisions).unwrap();
    println!(
        "[5] after selection: {} ops, {} conditional carbon pulses",
        swapped.instrs.len(),
        swapped.crot_block_count()
    );

    let with_diag = insert_diagnostics(&swapped, &DiagnosticsConfig::full()).unwrap();
    let program = emit(&with_diag).unwrap();
    println!("[6] assembly:\n{}", disassemble(&program));
}
