//! State tomography: wrap a compiled circuit in the classical repetition
//! loop (counter registers, label, backward branch) and confirm via
//! instruction telemetry that the body executed exactly R times, storing one
//! result per measured qubit per iteration.
//!
//! Run with: cargo run -p diamondc --example tomography_loop

use diamondc::circuit::parse_circuit;
use diamondc::codegen::{disassemble, emit_tomography, TomographySpec};
use diamondc::passes::{compile, DiagnosticsConfig, PipelineConfig};
use diamondc::simulator::{run, DurationTable, NoiseParams};
use diamondc::topology::{QubitId, TopologyConfig};

fn main() {
    let source = "\
qubits 2
creg MeasureResultRegister0
creg MeasureResultRegister1
h q0
cx q0 q1
measure q0 -> MeasureResultRegister0
measure q1 -> MeasureResultRegister1";
    let topology = TopologyConfig::new(1, 2).unwrap();
    let circuit = parse_circuit(source).unwrap();
    let native = compile(
        &circuit,
        &topology,
        &PipelineConfig::optimized(),
        &DiagnosticsConfig::disabled(),
    )
    .unwrap();
    let spec = TomographySpec {
        repetitions: 1000,
        measured_qubits: vec![QubitId(0), QubitId(1)],
    };
    let program = emit_tomography(&native, &spec).unwrap();

    let text = disassemble(&program);
    println!("--- loop frame ---");
    for line in text.lines().take(6) {
        println!("{line}");
    }
    println!("...");
    for line in text
        .lines()
        .rev()
        .take(2)
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
    {
        println!("{line}");
    }

    let result = run(
        &program,
        &NoiseParams::noiseless(),
        &DurationTable::default(),
        42,
        1,
    )
    .unwrap();
    let stored: usize = result.shot_records.iter().map(|s| s.len()).sum();
    println!("\nstored results: {stored} (expected 2000)");
    // The loop label is a Nop; count executions of the first body
    // instruction after it.
    let label_pc = program
        .instructions
        .iter()
        .position(|op| matches!(op, diamondc::codegen::AsmOp::Label { name } if name == "Repeat"))
        .unwrap();
    println!(
        "body executions: {} (expected 1000)",
        result.instruction_counts[label_pc + 1]
    );
    println!(
        "Bell correlation of stored pairs: <r0 r1> = {:+.3}",
        result.logical_expectation.unwrap()
    );
}
