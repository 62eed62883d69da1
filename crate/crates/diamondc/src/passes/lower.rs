//! Lowering from the abstract circuit onto NV-native operations.
//!
//! Single-qubit electron gates become ZYZ pulse sequences; single-qubit
//! carbon gates become placeholders resolved later (DDrf vs direct control).
//! Two-qubit gates route through the node electron: a carbon-controlled CX
//! onto the electron is rewritten by Hadamard conjugation, carbon-carbon
//! gates swap the control onto the electron first, and inter-node CX becomes
//! the teleported-CNOT template (one Entangle, two measurements, two
//! classically conditioned corrections).

use super::blocks;
use crate::circuit::{validate, Circuit, Condition, GateKind};
use crate::native::{Axis, MeasBasis, NativeCircuit, NativeOp};
use crate::topology::{QubitId, TopologyConfig};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("circuit failed validation:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<String>),
    #[error("instruction {instruction}: unroutable gate: {reason}")]
    Unroutable { instruction: usize, reason: String },
    #[error(
        "instruction {instruction}: classically conditioned inter-node gates are not supported"
    )]
    UnsupportedConditional { instruction: usize },
    #[error("diagnostics configuration error: {0}")]
    Diagnostics(String),
}

/// Lower a validated circuit to the native set plus placeholders.
pub fn lower_to_native(
    circuit: &Circuit,
    topology: &TopologyConfig,
) -> Result<NativeCircuit, CompileError> {
    let issues = validate(circuit, topology);
    if !issues.is_empty() {
        return Err(CompileError::Validation(
            issues.iter().map(|i| i.to_string()).collect(),
        ));
    }
    let mut out = NativeCircuit::new(*topology, circuit.num_qubits);
    for reg in &circuit.classical_registers {
        out.declare_register(reg);
    }
    for (idx, ins) in circuit.instructions.iter().enumerate() {
        let cond = ins.condition.clone();
        match ins.kind {
            GateKind::Measure => {
                push_all(
                    &mut out,
                    vec![NativeOp::Measure {
                        q: ins.qubits[0],
                        register: ins
                            .register
                            .clone()
                            .expect("validated measure has a register"),
                    }],
                    &cond,
                );
            }
            GateKind::Init => {
                push_all(&mut out, vec![NativeOp::Init { q: ins.qubits[0] }], &cond);
            }
            kind if kind.num_qubits() == 1 => {
                let q = ins.qubits[0];
                let ops = if topology.is_electron(q) {
                    blocks::electron_unitary(q, &kind)
                } else {
                    vec![NativeOp::CarbonUnitary { c: q, gate: kind }]
                };
                push_all(&mut out, ops, &cond);
            }
            kind => {
                lower_two_qubit(
                    &mut out,
                    idx,
                    &kind,
                    ins.qubits[0],
                    ins.qubits[1],
                    &cond,
                    topology,
                )?;
            }
        }
    }
    Ok(out)
}

fn push_all(out: &mut NativeCircuit, ops: Vec<NativeOp>, cond: &Option<Condition>) {
    for op in ops {
        out.push_conditioned(op, cond.clone());
    }
}

fn lower_two_qubit(
    out: &mut NativeCircuit,
    idx: usize,
    kind: &GateKind,
    a: QubitId,
    b: QubitId,
    cond: &Option<Condition>,
    topo: &TopologyConfig,
) -> Result<(), CompileError> {
    let node_a = topo.node_of(a).unwrap();
    let node_b = topo.node_of(b).unwrap();
    if node_a == node_b {
        let ops = lower_intranode(kind, a, b, topo).ok_or_else(|| CompileError::Unroutable {
            instruction: idx,
            reason: format!(
                "{} {} {} cannot be realized within node {}",
                kind.mnemonic(),
                a,
                b,
                node_a
            ),
        })?;
        push_all(out, ops, cond);
        return Ok(());
    }
    // Inter-node: both operands must be carbons so the electrons are free to
    // carry the entanglement protocol.
    if topo.is_electron(a) || topo.is_electron(b) {
        return Err(CompileError::Unroutable {
            instruction: idx,
            reason: format!(
                "inter-node {} with an electron operand has no free communication path",
                kind.mnemonic()
            ),
        });
    }
    if cond.is_some() {
        return Err(CompileError::UnsupportedConditional { instruction: idx });
    }
    match kind {
        GateKind::Cx => teleported_cx(out, a, b, topo),
        GateKind::Cz => {
            // CZ = (I ⊗ H_target) CX (I ⊗ H_target)
            out.push(NativeOp::CarbonUnitary {
                c: b,
                gate: GateKind::H,
            });
            teleported_cx(out, a, b, topo);
            out.push(NativeOp::CarbonUnitary {
                c: b,
                gate: GateKind::H,
            });
        }
        GateKind::CRot(theta) => {
            // Controlled-Rx(theta) from two CX and half-angle target pulses.
            teleported_cx(out, a, b, topo);
            out.push(NativeOp::CarbonUnitary {
                c: b,
                gate: GateKind::Rx(-theta / 2.0),
            });
            teleported_cx(out, a, b, topo);
            out.push(NativeOp::CarbonUnitary {
                c: b,
                gate: GateKind::Rx(theta / 2.0),
            });
        }
        GateKind::Swap => {
            teleported_cx(out, a, b, topo);
            teleported_cx(out, b, a, topo);
            teleported_cx(out, a, b, topo);
        }
        _ => unreachable!("two-qubit lowering called on a 1-qubit kind"),
    }
    Ok(())
}

/// Native sequence for a two-qubit gate whose operands share a node.
fn lower_intranode(
    kind: &GateKind,
    a: QubitId,
    b: QubitId,
    topo: &TopologyConfig,
) -> Option<Vec<NativeOp>> {
    let e_a = topo.is_electron(a);
    let e_b = topo.is_electron(b);
    let electron = topo.electron_of(topo.node_of(a).unwrap()).unwrap();
    let ops = match kind {
        GateKind::Cx => {
            if e_a {
                blocks::cx_e_to_c(a, b)
            } else if e_b {
                hadamard_reversal(b, a)
            } else {
                // carbon-carbon: swap the control onto the electron first.
                let mut ops = blocks::full_swap(electron, a);
                ops.extend(blocks::cx_e_to_c(electron, b));
                ops.extend(blocks::full_swap(electron, a));
                ops
            }
        }
        GateKind::Cz => {
            // CZ is symmetric, so either electron operand works directly.
            if e_a {
                blocks::cz_ec(a, b)
            } else if e_b {
                blocks::cz_ec(b, a)
            } else {
                let mut ops = blocks::full_swap(electron, a);
                ops.extend(blocks::cz_ec(electron, b));
                ops.extend(blocks::full_swap(electron, a));
                ops
            }
        }
        GateKind::CRot(theta) => {
            if e_a {
                vec![NativeOp::CRot {
                    e: a,
                    c: b,
                    axis: Axis::X,
                    theta: *theta,
                }]
            } else if e_b {
                // Reverse-direction controlled rotation via the ABBA pattern.
                // The echo rotations must anticommute with X, so rotate about
                // y and map the result onto the x axis with frame updates.
                let half_pi = std::f64::consts::FRAC_PI_2;
                let mut ops = vec![NativeOp::RzE {
                    e: b,
                    theta: half_pi,
                }];
                ops.extend(blocks::cx_c_to_e(b, a));
                ops.push(NativeOp::RotE {
                    e: b,
                    axis: Axis::Y,
                    theta: -theta / 2.0,
                });
                ops.extend(blocks::cx_c_to_e(b, a));
                ops.push(NativeOp::RotE {
                    e: b,
                    axis: Axis::Y,
                    theta: theta / 2.0,
                });
                ops.push(NativeOp::RzE {
                    e: b,
                    theta: -half_pi,
                });
                ops
            } else {
                let mut ops = blocks::full_swap(electron, a);
                ops.push(NativeOp::CRot {
                    e: electron,
                    c: b,
                    axis: Axis::X,
                    theta: *theta,
                });
                ops.extend(blocks::full_swap(electron, a));
                ops
            }
        }
        GateKind::Swap => {
            if e_a {
                blocks::full_swap(a, b)
            } else if e_b {
                blocks::full_swap(b, a)
            } else {
                let mut ops = blocks::full_swap(electron, a);
                ops.extend(blocks::full_swap(electron, b));
                ops.extend(blocks::full_swap(electron, a));
                ops
            }
        }
        _ => return None,
    };
    Some(ops)
}

/// Control-direction reversal: CX with a carbon control and the electron
/// target, realized by Hadamard conjugation of the native CX on both qubits.
pub fn hadamard_reversal(e: QubitId, c: QubitId) -> Vec<NativeOp> {
    let mut ops = blocks::h_electron(e);
    ops.push(NativeOp::CarbonUnitary {
        c,
        gate: GateKind::H,
    });
    ops.extend(blocks::cx_e_to_c(e, c));
    ops.push(NativeOp::CarbonUnitary {
        c,
        gate: GateKind::H,
    });
    ops.extend(blocks::h_electron(e));
    ops
}

/// Teleported CNOT between carbons on different nodes: consumes one Bell
/// pair, measures both electrons, and applies two conditioned corrections.
fn teleported_cx(
    out: &mut NativeCircuit,
    control: QubitId,
    target: QubitId,
    topo: &TopologyConfig,
) {
    let e0 = topo.electron_of(topo.node_of(control).unwrap()).unwrap();
    let e1 = topo.electron_of(topo.node_of(target).unwrap()).unwrap();
    let m0 = out.fresh_register("tcnot_m");
    let m1 = out.fresh_register("tcnot_m");
    out.push(NativeOp::Entangle { e1: e0, e2: e1 });
    // Copy the control's Z value onto the local Bell half.
    for op in blocks::cx_c_to_e(e0, control) {
        out.push(op);
    }
    out.push(NativeOp::MeasE {
        e: e0,
        register: m0.clone(),
    });
    // Outcome -1 means the remote Bell half is bit-flipped relative to the
    // control copy.
    out.push_conditioned(
        NativeOp::RotE {
            e: e1,
            axis: Axis::X,
            theta: std::f64::consts::PI,
        },
        Some(Condition {
            register: m0,
            cmp: crate::circuit::Cmp::Lt,
            threshold: 0,
        }),
    );
    for op in blocks::cx_e_to_c(e1, target) {
        out.push(op);
    }
    // Disentangle the remote electron with an X-basis readout.
    for op in blocks::h_electron(e1) {
        out.push(op);
    }
    out.push(NativeOp::MeasE {
        e: e1,
        register: m1.clone(),
    });
    out.push_conditioned(
        NativeOp::RzC {
            c: control,
            theta: std::f64::consts::PI,
        },
        Some(Condition {
            register: m1,
            cmp: crate::circuit::Cmp::Lt,
            threshold: 0,
        }),
    );
}

/// Count structural features of the teleported template (used by tests and
/// the compile report).
pub fn count_ops(circuit: &NativeCircuit) -> (usize, usize, usize) {
    let mut entangles = 0;
    let mut measures = 0;
    let mut conditioned = 0;
    for i in &circuit.instrs {
        match i.op {
            NativeOp::Entangle { .. } => entangles += 1,
            NativeOp::MeasE { .. } | NativeOp::Measure { .. } => measures += 1,
            _ => {}
        }
        if i.condition.is_some() {
            conditioned += 1;
        }
    }
    (entangles, measures, conditioned)
}

/// Default basis annotation used when building swap placeholders.
pub const DEFAULT_BASIS: MeasBasis = MeasBasis::Z;
