//! Resolution of pending carbon unitaries: DDrf (electron-preserving, two
//! conditional pulses) where the electron state matters, direct control (one
//! pulse with the electron parked in |1>) where liveness says it does not.

use super::blocks;
use super::liveness::LivenessInfo;
use super::swaps::SwapDecisionAt;
use super::PipelineConfig;
use crate::native::{NativeCircuit, NativeOp};
use std::collections::BTreeSet;

/// Route-stream indices of basis-change gates that `select_swaps` will fold
/// into a partial-swap readout; `select_carbon_control` must leave them
/// untouched.
pub fn consumed_indices(decisions: &[SwapDecisionAt]) -> BTreeSet<usize> {
    let mut set = BTreeSet::new();
    for d in decisions {
        for k in 1..=d.consumed {
            set.insert(d.pos - k);
        }
    }
    set
}

pub fn select_carbon_control(
    circuit: &NativeCircuit,
    liveness: &LivenessInfo,
    config: &PipelineConfig,
    decisions: &[SwapDecisionAt],
) -> NativeCircuit {
    let skip = consumed_indices(decisions);
    let topo = circuit.topology;
    let mut out = NativeCircuit::new(topo, circuit.num_qubits);
    out.registers = circuit.registers.clone();
    for (i, instr) in circuit.instrs.iter().enumerate() {
        match &instr.op {
            NativeOp::CarbonUnitary { c, gate } if !skip.contains(&i) => {
                let e = topo.electron_of(topo.node_of(*c).unwrap()).unwrap();
                let use_direct = config.direct_control && liveness.electron_irrelevant(i, e);
                let ops = if use_direct {
                    blocks::carbon_unitary_direct(e, *c, gate)
                } else {
                    blocks::carbon_unitary_ddrf(e, *c, gate)
                };
                for op in ops {
                    out.push_conditioned(op, instr.condition.clone());
                }
            }
            op => out.push_conditioned(op.clone(), instr.condition.clone()),
        }
    }
    out
}
