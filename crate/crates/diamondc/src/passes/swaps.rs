//! Swap selection: resolves carbon init/measure placeholders into full swaps
//! or the cheaper diamond-specific alternatives, and detects the measurement
//! basis from preceding basis-change gates.

use super::blocks;
use super::liveness::LivenessInfo;
use super::lower::CompileError;
use super::PipelineConfig;
use crate::circuit::GateKind;
use crate::native::{MeasBasis, NativeCircuit, NativeInstr, NativeOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapKind {
    FullSwap,
    PartialSwapX,
    PartialSwapY,
    PartialSwapZ,
    InitSwap,
}

/// One resolved swap placeholder, positioned in the routed stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapDecisionAt {
    /// Index of the placeholder in the circuit handed to `swap_decisions`.
    pub pos: usize,
    pub kind: SwapKind,
    /// Basis annotation for measurement swaps (carries the Y sign).
    pub basis: MeasBasis,
    /// Number of immediately preceding basis-change gates folded into the
    /// readout (0, 1 or 2).
    pub consumed: usize,
}

/// Detect the measurement basis of the carbon measurement placeholder at
/// `pos` from strictly adjacent preceding gates on the same carbon:
/// a Hadamard means X, a phase gate followed by a Hadamard means Y (the sign
/// records whether the phase gate was S or S†), anything else means Z.
/// Returns the basis and how many gates the annotation would consume.
pub fn detect_measurement_basis(circuit: &NativeCircuit, pos: usize) -> (MeasBasis, usize) {
    let carbon = match circuit.instrs.get(pos).map(|i| &i.op) {
        Some(NativeOp::SwapMeasure { c, .. }) => *c,
        _ => return (MeasBasis::Z, 0),
    };
    if circuit.instrs[pos].condition.is_some() {
        return (MeasBasis::Z, 0);
    }
    let unconditioned_gate = |idx: usize| -> Option<GateKind> {
        let instr = circuit.instrs.get(idx)?;
        if instr.condition.is_some() {
            return None;
        }
        match &instr.op {
            NativeOp::CarbonUnitary { c, gate } if *c == carbon => Some(*gate),
            _ => None,
        }
    };
    if pos == 0 {
        return (MeasBasis::Z, 0);
    }
    match unconditioned_gate(pos - 1) {
        Some(GateKind::H) => {
            if pos >= 2 {
                match unconditioned_gate(pos - 2) {
                    Some(GateKind::Sdg) => return (MeasBasis::YPlus, 2),
                    Some(GateKind::S) => return (MeasBasis::YMinus, 2),
                    _ => {}
                }
            }
            (MeasBasis::X, 1)
        }
        _ => (MeasBasis::Z, 0),
    }
}

/// Resolve every swap placeholder against liveness and the pipeline config.
pub fn swap_decisions(
    circuit: &NativeCircuit,
    liveness: &LivenessInfo,
    config: &PipelineConfig,
) -> Vec<SwapDecisionAt> {
    let mut out = Vec::new();
    for (i, instr) in circuit.instrs.iter().enumerate() {
        match &instr.op {
            NativeOp::SwapMeasure { e, .. } => {
                if config.partial_swaps && liveness.electron_irrelevant(i, *e) {
                    let (basis, consumed) = detect_measurement_basis(circuit, i);
                    let kind = match basis {
                        MeasBasis::Z => SwapKind::PartialSwapZ,
                        MeasBasis::X => SwapKind::PartialSwapX,
                        MeasBasis::YPlus | MeasBasis::YMinus => SwapKind::PartialSwapY,
                    };
                    out.push(SwapDecisionAt {
                        pos: i,
                        kind,
                        basis,
                        consumed,
                    });
                } else {
                    out.push(SwapDecisionAt {
                        pos: i,
                        kind: SwapKind::FullSwap,
                        basis: MeasBasis::Z,
                        consumed: 0,
                    });
                }
            }
            NativeOp::SwapInit { e, .. } => {
                let kind = if config.partial_swaps && liveness.electron_irrelevant(i, *e) {
                    SwapKind::InitSwap
                } else {
                    SwapKind::FullSwap
                };
                out.push(SwapDecisionAt {
                    pos: i,
                    kind,
                    basis: MeasBasis::Z,
                    consumed: 0,
                });
            }
            _ => {}
        }
    }
    out
}

/// Expand the placeholders according to the decisions (which must be in
/// placeholder stream order, as produced by `swap_decisions`; positions may
/// have shifted since, so pairing is ordinal).
pub fn select_swaps(
    circuit: &NativeCircuit,
    decisions: &[SwapDecisionAt],
) -> Result<NativeCircuit, CompileError> {
    let mut out = NativeCircuit::new(circuit.topology, circuit.num_qubits);
    out.registers = circuit.registers.clone();
    let mut next_decision = 0usize;
    let mut i = 0usize;
    let instrs = &circuit.instrs;
    while i < instrs.len() {
        let instr = &instrs[i];
        match &instr.op {
            NativeOp::SwapMeasure { e, c, register, .. } => {
                let d = take_decision(decisions, &mut next_decision, i)?;
                let cond = instr.condition.clone();
                // The paired electron readout follows immediately.
                let meas_ok = matches!(
                    instrs.get(i + 1).map(|x| &x.op),
                    Some(NativeOp::MeasE { e: me, .. }) if me == e
                );
                if !meas_ok {
                    return Err(internal("swap-measure placeholder without paired MeasE"));
                }
                match d.kind {
                    SwapKind::FullSwap => {
                        for op in blocks::full_swap(*e, *c) {
                            out.push_conditioned(op, cond.clone());
                        }
                        out.push_conditioned(
                            NativeOp::MeasE {
                                e: *e,
                                register: register.clone(),
                            },
                            cond.clone(),
                        );
                        // Restore: the electron state was parked on the carbon;
                        // swap back so later electron uses see the original
                        // state and the carbon holds the collapsed outcome.
                        for op in blocks::full_swap(*e, *c) {
                            out.push_conditioned(op, cond.clone());
                        }
                    }
                    SwapKind::PartialSwapX | SwapKind::PartialSwapY | SwapKind::PartialSwapZ => {
                        // Fold in the consumed basis-change gates.
                        for _ in 0..d.consumed {
                            match out.instrs.pop().map(|x| x.op) {
                                Some(NativeOp::CarbonUnitary { .. }) => {}
                                _ => {
                                    return Err(internal(
                                        "basis-change gate expected before partial swap",
                                    ))
                                }
                            }
                        }
                        for op in blocks::partial_swap_measure(*e, *c, d.basis) {
                            out.push_conditioned(op, cond.clone());
                        }
                        out.push_conditioned(
                            NativeOp::MeasE {
                                e: *e,
                                register: register.clone(),
                            },
                            cond.clone(),
                        );
                    }
                    SwapKind::InitSwap => {
                        return Err(internal("init swap decision attached to a measurement"));
                    }
                }
                i += 2; // placeholder + MeasE
            }
            NativeOp::SwapInit { e, c } => {
                let d = take_decision(decisions, &mut next_decision, i)?;
                let cond = instr.condition.clone();
                let ops = match d.kind {
                    SwapKind::InitSwap => blocks::init_swap_remainder(*e, *c),
                    SwapKind::FullSwap => blocks::full_swap(*e, *c),
                    _ => return Err(internal("measurement swap decision attached to an init")),
                };
                for op in ops {
                    out.push_conditioned(op, cond.clone());
                }
                i += 1;
            }
            op => {
                out.instrs.push(NativeInstr::conditioned(
                    op.clone(),
                    instr.condition.clone(),
                ));
                i += 1;
            }
        }
    }
    if next_decision != decisions.len() {
        return Err(internal("unconsumed swap decisions"));
    }
    Ok(out)
}

fn take_decision<'a>(
    decisions: &'a [SwapDecisionAt],
    next: &mut usize,
    _pos: usize,
) -> Result<&'a SwapDecisionAt, CompileError> {
    let d = decisions
        .get(*next)
        .ok_or_else(|| internal("missing swap decision for placeholder"))?;
    *next += 1;
    Ok(d)
}

fn internal(msg: &str) -> CompileError {
    CompileError::Unroutable {
        instruction: usize::MAX,
        reason: format!("internal: {msg}"),
    }
}
