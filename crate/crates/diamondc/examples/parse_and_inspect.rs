//! Parse a circuit from the text format, validate it against a topology,
//! and show the canonical serialization round-trip.
//!
//! Run with: cargo run -p diamondc --example parse_and_inspect

use diamondc::circuit::{parse_circuit, serialize_circuit, validate};
use diamondc::topology::TopologyConfig;

const SOURCE: &str = "\
# prepare a Bell pair between the electron and a carbon, then
# conditionally flip a second carbon
qubits 3
creg m
init q1
h q0
cx q0 q1
measure q0 -> m
x q2 if m < 0";

fn main() {
    let circuit = parse_circuit(SOURCE).expect("source parses");
    println!(
        "parsed {} instructions over {} qubits",
        circuit.instructions.len(),
        circuit.num_qubits
    );

    let topology = TopologyConfig::new(1, 3).unwrap();
    let issues = validate(&circuit, &topology);
    println!("validation issues: {}", issues.len());

    let canonical = serialize_circuit(&circuit);
    println!("--- canonical form ---\n{canonical}");
    let reparsed = parse_circuit(&canonical).expect("canonical form reparses");
    assert_eq!(reparsed, circuit);
    println!("--- round trip: identical ---");

    // Errors carry positions:
    let err = parse_circuit("qubits 1\nbadgate q0").unwrap_err();
    println!("error example: {err}");
}
