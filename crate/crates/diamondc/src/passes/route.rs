//! Init/measure routing: carbons cannot be initialized or measured directly,
//! so carbon initialization becomes electron initialization plus a swap, and
//! carbon measurement becomes a swap onto the electron followed by an
//! electron readout. The swap kind (full vs partial/init) is decided later by
//! `select_swaps`; here we only place the placeholders and the paired
//! electron operations.

use crate::native::{MeasBasis, NativeCircuit, NativeInstr, NativeOp};

pub fn route_init_measure(circuit: &NativeCircuit) -> NativeCircuit {
    let topo = circuit.topology;
    let mut out = NativeCircuit::new(topo, circuit.num_qubits);
    out.registers = circuit.registers.clone();
    for instr in &circuit.instrs {
        let cond = instr.condition.clone();
        match &instr.op {
            NativeOp::Measure { q, register } => {
                if topo.is_electron(*q) {
                    out.push_conditioned(
                        NativeOp::MeasE {
                            e: *q,
                            register: register.clone(),
                        },
                        cond,
                    );
                } else {
                    let e = topo.electron_of(topo.node_of(*q).unwrap()).unwrap();
                    out.push_conditioned(
                        NativeOp::SwapMeasure {
                            e,
                            c: *q,
                            register: register.clone(),
                            basis: MeasBasis::Z,
                        },
                        cond.clone(),
                    );
                    out.push_conditioned(
                        NativeOp::MeasE {
                            e,
                            register: register.clone(),
                        },
                        cond,
                    );
                }
            }
            NativeOp::Init { q } => {
                if topo.is_electron(*q) {
                    out.push_conditioned(NativeOp::InitE { e: *q }, cond);
                } else {
                    let e = topo.electron_of(topo.node_of(*q).unwrap()).unwrap();
                    out.push_conditioned(NativeOp::InitE { e }, cond.clone());
                    out.push_conditioned(NativeOp::SwapInit { e, c: *q }, cond);
                }
            }
            op => out.instrs.push(NativeInstr::conditioned(op.clone(), cond)),
        }
    }
    out
}
