//! Compile the teleported CNOT between carbons on two NV nodes and verify
//! the output state: with the control in |+> and the target in |0>, the two
//! carbons must end in the Bell state (|00> + |11>)/sqrt(2).
//!
//! Run with: cargo run -p diamondc --example teleported_cnot

use diamondc::circuit::parse_circuit;
use diamondc::codegen::{disassemble, emit};
use diamondc::experiments::{telecnot_fidelity, TELECNOT_SOURCE};
use diamondc::passes::{compile, DiagnosticsConfig, PipelineConfig};
use diamondc::simulator::{run_exact, DurationTable, NoiseParams};
use diamondc::topology::TopologyConfig;

fn main() {
    let topology = TopologyConfig::new(2, 2).unwrap();
    let circuit = parse_circuit(TELECNOT_SOURCE).unwrap();
    let native = compile(
        &circuit,
        &topology,
        &PipelineConfig::optimized(),
        &DiagnosticsConfig::disabled(),
    )
    .unwrap();
    let program = emit(&native).unwrap();

    let asm = disassemble(&program);
    let entangles = asm.lines().filter(|l| l.starts_with("entangle")).count();
    let measures = asm.lines().filter(|l| l.starts_with("meas")).count();
    println!("template uses {entangles} entangle, {measures} electron measurements");
    println!("--- assembly ---\n{asm}");

    let run = run_exact(
        &program,
        &NoiseParams::noiseless(),
        &DurationTable::default(),
    )
    .unwrap();
    let f = telecnot_fidelity(&run).unwrap();
    println!("noiseless fidelity vs (|00>+|11>)/sqrt(2): {f:.12}");

    let state = run.final_density_matrix.unwrap().to_cmat();
    let carbons = state.partial_trace(4, &[1, 3]);
    println!("two-carbon density matrix (real parts):");
    for i in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|j| format!("{:+.3}", carbons[(i, j)].re))
            .collect();
        println!("  [{}]", row.join(" "));
    }

    let noisy = run_exact(
        &program,
        &NoiseParams {
            p_depol: 1e-3,
            t_coh: Some(1.0),
        },
        &DurationTable::default(),
    )
    .unwrap();
    println!(
        "fidelity at p=1e-3, T=1s: {:.6}",
        telecnot_fidelity(&noisy).unwrap()
    );
}
