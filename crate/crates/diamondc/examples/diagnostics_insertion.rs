//! System diagnostics: the calibration sequence prepended to every program
//! (Larmor and Rabi frequency checks, electron before carbon) and the charge
//! resonance check bracketing the algorithm body.
//!
//! Run with: cargo run -p diamondc --example diagnostics_insertion

use diamondc::circuit::parse_circuit;
use diamondc::codegen::{disassemble, emit};
use diamondc::native::DiagnosticKind;
use diamondc::passes::{compile, DiagnosticsConfig, PipelineConfig};
use diamondc::topology::TopologyConfig;

fn main() {
    let circuit = parse_circuit("qubits 2\nh q0\ncx q0 q1").unwrap();
    let topology = TopologyConfig::new(1, 2).unwrap();

    let native = compile(
        &circuit,
        &topology,
        &PipelineConfig::optimized(),
        &DiagnosticsConfig::full(),
    )
    .unwrap();
    let program = emit(&native).unwrap();
    println!("--- with full diagnostics ---\n{}", disassemble(&program));

    // Dependency checking: carbon calibrations cannot run without the
    // electron frequencies being known.
    let bad = DiagnosticsConfig {
        enabled: true,
        include: [DiagnosticKind::RabiCheckCarbon].into_iter().collect(),
    };
    let err = compile(&circuit, &topology, &PipelineConfig::optimized(), &bad).unwrap_err();
    println!("dependency violation: {err}");

    // Electron-only subsets are fine.
    let subset = DiagnosticsConfig {
        enabled: true,
        include: [
            DiagnosticKind::LarmorElectron,
            DiagnosticKind::RabiCheckElectron,
        ]
        .into_iter()
        .collect(),
    };
    let native = compile(&circuit, &topology, &PipelineConfig::optimized(), &subset).unwrap();
    let program = emit(&native).unwrap();
    println!("--- electron-only subset ---");
    for line in disassemble(&program).lines().take(4) {
        println!("{line}");
    }
}
