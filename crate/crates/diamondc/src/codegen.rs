//! Assembly emission: the final compiler stage. Produces a flat program of
//! quantum mnemonics plus classical register operations, branches and labels,
//! in a line-oriented text format that round-trips exactly.
//!
//! Instruction set (one per line, `#` comments, angles in signed integer
//! microradians):
//!
//! ```text
//! .topology nodes=N,per_node=M      directive (metadata)
//! .qubits N                         directive (metadata)
//! qgatee   qE <x|y|z> ANGLE         electron rotation (z = frame update)
//! qgatec   qC <x|y|z> ANGLE         unconditional carbon rotation
//! crot     qE qC <x|y> ANGLE        decoupled conditional carbon rotation
//! qgatedir qE qC <x|y> ANGLE        direct conditional carbon rotation
//! inite    qE                       electron initialization
//! meas     qE REG                   electron readout: +1/-1 into REG
//! entangle qE qE'                   Bell pair between node electrons
//! larmor_e qE | rabi_e qE | larmor_c qC | rabi_c qC | crc qE
//! LDi   IMM REG
//! ST    REG                         append REG to the result log
//! ADDi  REG IMM
//! BR    REG CMP (IMM|REG) LABEL     jump to LABEL when the comparison holds
//! label LABEL
//! ```

use crate::circuit::Cmp;
use crate::native::{Axis, DiagnosticKind, NativeCircuit, NativeOp};
use crate::topology::{QubitId, TopologyConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MICRORAD: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsmAxis {
    X,
    Y,
    Z,
}

impl AsmAxis {
    pub fn letter(&self) -> char {
        match self {
            AsmAxis::X => 'x',
            AsmAxis::Y => 'y',
            AsmAxis::Z => 'z',
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "x" | "X" => Some(AsmAxis::X),
            "y" | "Y" => Some(AsmAxis::Y),
            "z" | "Z" => Some(AsmAxis::Z),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BrRhs {
    Imm(i64),
    Reg(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AsmOp {
    QGateE {
        q: usize,
        axis: AsmAxis,
        angle_urad: i64,
    },
    QGateC {
        q: usize,
        axis: AsmAxis,
        angle_urad: i64,
    },
    CRot {
        e: usize,
        c: usize,
        axis: AsmAxis,
        angle_urad: i64,
    },
    QGateDir {
        e: usize,
        c: usize,
        axis: AsmAxis,
        angle_urad: i64,
    },
    InitE {
        q: usize,
    },
    Meas {
        q: usize,
        register: String,
    },
    Entangle {
        e1: usize,
        e2: usize,
    },
    Diag {
        kind: DiagnosticKind,
        q: usize,
    },
    Ldi {
        value: i64,
        register: String,
    },
    St {
        register: String,
    },
    Addi {
        register: String,
        value: i64,
    },
    Br {
        register: String,
        cmp: Cmp,
        rhs: BrRhs,
        label: String,
    },
    Label {
        name: String,
    },
}

impl AsmOp {
    pub fn is_quantum(&self) -> bool {
        !matches!(
            self,
            AsmOp::Ldi { .. }
                | AsmOp::St { .. }
                | AsmOp::Addi { .. }
                | AsmOp::Br { .. }
                | AsmOp::Label { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramMeta {
    pub topology: TopologyConfig,
    pub num_qubits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Program {
    pub meta: ProgramMeta,
    pub instructions: Vec<AsmOp>,
    /// Every register name the program touches, sorted (derived at assembly).
    pub registers: Vec<String>,
}

#[derive(Debug, Error)]
pub enum AsmError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("unresolved label `{0}`")]
    UnresolvedLabel(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("register `{0}` is read but never written")]
    UndeclaredRegister(String),
    #[error("missing `.topology` directive")]
    MissingTopology,
    #[error("unresolved placeholder in native circuit: {0}")]
    UnresolvedPlaceholder(String),
    #[error("tomography: {0}")]
    Tomography(String),
}

pub fn to_microradians(theta: f64) -> i64 {
    (theta * MICRORAD).round() as i64
}

pub fn from_microradians(angle: i64) -> f64 {
    angle as f64 / MICRORAD
}

// ── Emission ─────────────────────────────────────────────────────────────────

struct Emitter {
    out: Vec<AsmOp>,
    next_label: usize,
}

impl Emitter {
    fn fresh_label(&mut self) -> String {
        let l = format!("skip{}", self.next_label);
        self.next_label += 1;
        l
    }
}

fn native_to_asm(op: &NativeOp) -> Result<AsmOp, AsmError> {
    let axis = |a: Axis| match a {
        Axis::X => AsmAxis::X,
        Axis::Y => AsmAxis::Y,
    };
    Ok(match op {
        NativeOp::RotE { e, axis: a, theta } => AsmOp::QGateE {
            q: e.0,
            axis: axis(*a),
            angle_urad: to_microradians(*theta),
        },
        NativeOp::RzE { e, theta } => AsmOp::QGateE {
            q: e.0,
            axis: AsmAxis::Z,
            angle_urad: to_microradians(*theta),
        },
        NativeOp::CRot {
            e,
            c,
            axis: a,
            theta,
        } => AsmOp::CRot {
            e: e.0,
            c: c.0,
            axis: axis(*a),
            angle_urad: to_microradians(*theta),
        },
        NativeOp::RzC { c, theta } => AsmOp::QGateC {
            q: c.0,
            axis: AsmAxis::Z,
            angle_urad: to_microradians(*theta),
        },
        NativeOp::DirectRotC {
            e,
            c,
            axis: a,
            theta,
        } => AsmOp::QGateDir {
            e: e.0,
            c: c.0,
            axis: axis(*a),
            angle_urad: to_microradians(*theta),
        },
        NativeOp::InitE { e } => AsmOp::InitE { q: e.0 },
        NativeOp::MeasE { e, register } => AsmOp::Meas {
            q: e.0,
            register: register.clone(),
        },
        NativeOp::Entangle { e1, e2 } => AsmOp::Entangle { e1: e1.0, e2: e2.0 },
        NativeOp::Diagnostic { kind, qubit } => AsmOp::Diag {
            kind: *kind,
            q: qubit.0,
        },
        other => return Err(AsmError::UnresolvedPlaceholder(format!("{other:?}"))),
    })
}

/// Emit a fully lowered native circuit as an assembly program. Consecutive
/// instructions sharing the same condition are folded under one branch guard.
pub fn emit(native: &NativeCircuit) -> Result<Program, AsmError> {
    let mut em = Emitter {
        out: Vec::new(),
        next_label: 0,
    };
    let mut i = 0usize;
    while i < native.instrs.len() {
        let cond = native.instrs[i].condition.clone();
        let mut j = i;
        while j < native.instrs.len() && native.instrs[j].condition == cond {
            j += 1;
        }
        match cond {
            None => {
                for instr in &native.instrs[i..j] {
                    em.out.push(native_to_asm(&instr.op)?);
                }
            }
            Some(c) => {
                // The guard skips the block exactly when the source condition
                // fails.
                let label = em.fresh_label();
                em.out.push(AsmOp::Br {
                    register: c.register.clone(),
                    cmp: c.cmp.negate(),
                    rhs: BrRhs::Imm(c.threshold),
                    label: label.clone(),
                });
                for instr in &native.instrs[i..j] {
                    em.out.push(native_to_asm(&instr.op)?);
                }
                em.out.push(AsmOp::Label { name: label });
            }
        }
        i = j;
    }
    let meta = ProgramMeta {
        topology: native.topology,
        num_qubits: native.num_qubits,
    };
    Ok(finish_program(meta, em.out))
}

/// Guard a single already-emitted gate expansion behind a condition. Exposed
/// for tests and for hand-assembled programs; `emit` uses the same pattern.
pub fn emit_conditional(
    gate_expansion: Vec<AsmOp>,
    register: &str,
    cmp: Cmp,
    threshold: i64,
    fresh: usize,
) -> Vec<AsmOp> {
    let label = format!("skip{fresh}");
    let mut out = vec![AsmOp::Br {
        register: register.to_string(),
        cmp: cmp.negate(),
        rhs: BrRhs::Imm(threshold),
        label: label.clone(),
    }];
    out.extend(gate_expansion);
    out.push(AsmOp::Label { name: label });
    out
}

/// Repetition counts and readout targets for a tomography loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TomographySpec {
    pub repetitions: u32,
    pub measured_qubits: Vec<QubitId>,
}

pub const REPETITION_COUNTER: &str = "RepetitionCounter";
pub const REPETITION_AMOUNT: &str = "RepetitionAmount";

pub fn result_register(k: usize) -> String {
    format!("MeasureResultRegister{k}")
}

/// Wrap an emitted body in the state-tomography loop: counter init, loop
/// label, body, one readout + store per measured qubit, counter increment,
/// backward branch. The body must already contain the per-qubit measurements
/// into `MeasureResultRegisterK` (the compile driver appends them at the
/// source level so carbon readouts get routed properly); this pass inserts
/// the `ST` after each one and builds the loop frame.
pub fn emit_tomography(native: &NativeCircuit, spec: &TomographySpec) -> Result<Program, AsmError> {
    if spec.repetitions == 0 {
        return Err(AsmError::Tomography("repetition count must be >= 1".into()));
    }
    if spec.measured_qubits.is_empty() {
        return Err(AsmError::Tomography("no measured qubits".into()));
    }
    for q in &spec.measured_qubits {
        if !native.topology.contains(*q) {
            return Err(AsmError::Tomography(format!("{q} is outside the topology")));
        }
    }
    let body = emit(native)?;
    let mut with_stores = Vec::new();
    for op in body.instructions {
        let store = match &op {
            AsmOp::Meas { register, .. } if register.starts_with("MeasureResultRegister") => {
                Some(AsmOp::St {
                    register: register.clone(),
                })
            }
            _ => None,
        };
        with_stores.push(op);
        if let Some(st) = store {
            with_stores.push(st);
        }
    }
    Ok(finish_program(
        body.meta,
        loop_frame(with_stores, spec.repetitions),
    ))
}

/// Bare repetition loop around an emitted body, with no result stores. Used
/// when a repetition count is requested without designated readout qubits
/// (the loop skeleton still runs the body R times).
pub fn emit_repetition_loop(native: &NativeCircuit, repetitions: u32) -> Result<Program, AsmError> {
    if repetitions == 0 {
        return Err(AsmError::Tomography("repetition count must be >= 1".into()));
    }
    let body = emit(native)?;
    Ok(finish_program(
        body.meta,
        loop_frame(body.instructions, repetitions),
    ))
}

fn loop_frame(body: Vec<AsmOp>, repetitions: u32) -> Vec<AsmOp> {
    let mut out = Vec::with_capacity(body.len() + 5);
    out.push(AsmOp::Ldi {
        value: 0,
        register: REPETITION_COUNTER.into(),
    });
    out.push(AsmOp::Ldi {
        value: i64::from(repetitions),
        register: REPETITION_AMOUNT.into(),
    });
    out.push(AsmOp::Label {
        name: "Repeat".into(),
    });
    out.extend(body);
    out.push(AsmOp::Addi {
        register: REPETITION_COUNTER.into(),
        value: 1,
    });
    out.push(AsmOp::Br {
        register: REPETITION_COUNTER.into(),
        cmp: Cmp::Lt,
        rhs: BrRhs::Reg(REPETITION_AMOUNT.into()),
        label: "Repeat".into(),
    });
    out
}

fn collect_registers(instructions: &[AsmOp]) -> Vec<String> {
    let mut regs: Vec<String> = Vec::new();
    let mut push = |r: &str| {
        if !regs.iter().any(|x| x == r) {
            regs.push(r.to_string());
        }
    };
    for op in instructions {
        match op {
            AsmOp::Meas { register, .. }
            | AsmOp::Ldi { register, .. }
            | AsmOp::St { register }
            | AsmOp::Addi { register, .. } => push(register),
            AsmOp::Br { register, rhs, .. } => {
                push(register);
                if let BrRhs::Reg(r) = rhs {
                    push(r);
                }
            }
            _ => {}
        }
    }
    regs.sort();
    regs
}

fn finish_program(meta: ProgramMeta, instructions: Vec<AsmOp>) -> Program {
    let registers = collect_registers(&instructions);
    Program {
        meta,
        instructions,
        registers,
    }
}

// ── Text format ──────────────────────────────────────────────────────────────

pub fn disassemble(program: &Program) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        ".topology nodes={},per_node={}\n",
        program.meta.topology.num_nodes, program.meta.topology.qubits_per_node
    ));
    out.push_str(&format!(".qubits {}\n", program.meta.num_qubits));
    for op in &program.instructions {
        let line = match op {
            AsmOp::QGateE {
                q,
                axis,
                angle_urad,
            } => {
                format!("qgatee q{q} {} {angle_urad}", axis.letter())
            }
            AsmOp::QGateC {
                q,
                axis,
                angle_urad,
            } => {
                format!("qgatec q{q} {} {angle_urad}", axis.letter())
            }
            AsmOp::CRot {
                e,
                c,
                axis,
                angle_urad,
            } => {
                format!("crot q{e} q{c} {} {angle_urad}", axis.letter())
            }
            AsmOp::QGateDir {
                e,
                c,
                axis,
                angle_urad,
            } => {
                format!("qgatedir q{e} q{c} {} {angle_urad}", axis.letter())
            }
            AsmOp::InitE { q } => format!("inite q{q}"),
            AsmOp::Meas { q, register } => format!("meas q{q} {register}"),
            AsmOp::Entangle { e1, e2 } => format!("entangle q{e1} q{e2}"),
            AsmOp::Diag { kind, q } => format!("{} q{q}", kind.mnemonic()),
            AsmOp::Ldi { value, register } => format!("LDi {value} {register}"),
            AsmOp::St { register } => format!("ST {register}"),
            AsmOp::Addi { register, value } => format!("ADDi {register} {value}"),
            AsmOp::Br {
                register,
                cmp,
                rhs,
                label,
            } => {
                let rhs = match rhs {
                    BrRhs::Imm(v) => v.to_string(),
                    BrRhs::Reg(r) => r.clone(),
                };
                format!("BR {register} {} {rhs} {label}", cmp.token())
            }
            AsmOp::Label { name } => format!("label {name}"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn assemble(text: &str) -> Result<Program, AsmError> {
    let mut topology: Option<TopologyConfig> = None;
    let mut num_qubits: Option<usize> = None;
    let mut instructions = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stripped = match raw.find('#') {
            Some(idx) => &raw[..idx],
            None => raw,
        };
        let toks: Vec<&str> = stripped.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let err = |msg: String| AsmError::Parse(line, msg);
        let qubit = |tok: &str| -> Result<usize, AsmError> {
            tok.strip_prefix('q')
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| {
                    AsmError::Parse(line, format!("expected qubit operand, got `{tok}`"))
                })
        };
        let angle = |tok: &str| -> Result<i64, AsmError> {
            tok.parse()
                .map_err(|_| AsmError::Parse(line, format!("bad microradian angle `{tok}`")))
        };
        let imm = |tok: &str| -> Result<i64, AsmError> {
            tok.parse()
                .map_err(|_| AsmError::Parse(line, format!("bad immediate `{tok}`")))
        };
        let need = |n: usize| -> Result<(), AsmError> {
            if toks.len() != n {
                Err(AsmError::Parse(
                    line,
                    format!("`{}` expects {} operand(s)", toks[0], n - 1),
                ))
            } else {
                Ok(())
            }
        };
        match toks[0] {
            ".topology" => {
                need(2)?;
                topology = Some(
                    TopologyConfig::parse_flag(toks[1])
                        .map_err(|e| err(format!("bad topology: {e}")))?,
                );
            }
            ".qubits" => {
                need(2)?;
                num_qubits = Some(
                    toks[1]
                        .parse()
                        .map_err(|_| err(format!("bad qubit count `{}`", toks[1])))?,
                );
            }
            "qgatee" | "qgatec" => {
                need(4)?;
                let q = qubit(toks[1])?;
                let axis = AsmAxis::parse(toks[2])
                    .ok_or_else(|| err(format!("bad axis `{}`", toks[2])))?;
                let angle_urad = angle(toks[3])?;
                instructions.push(if toks[0] == "qgatee" {
                    AsmOp::QGateE {
                        q,
                        axis,
                        angle_urad,
                    }
                } else {
                    AsmOp::QGateC {
                        q,
                        axis,
                        angle_urad,
                    }
                });
            }
            "crot" | "qgatedir" => {
                need(5)?;
                let e = qubit(toks[1])?;
                let c = qubit(toks[2])?;
                let axis = AsmAxis::parse(toks[3])
                    .ok_or_else(|| err(format!("bad axis `{}`", toks[3])))?;
                if axis == AsmAxis::Z {
                    return Err(err("conditional rotations must be about x or y".into()));
                }
                let angle_urad = angle(toks[4])?;
                instructions.push(if toks[0] == "crot" {
                    AsmOp::CRot {
                        e,
                        c,
                        axis,
                        angle_urad,
                    }
                } else {
                    AsmOp::QGateDir {
                        e,
                        c,
                        axis,
                        angle_urad,
                    }
                });
            }
            "inite" => {
                need(2)?;
                instructions.push(AsmOp::InitE { q: qubit(toks[1])? });
            }
            "meas" => {
                need(3)?;
                instructions.push(AsmOp::Meas {
                    q: qubit(toks[1])?,
                    register: toks[2].into(),
                });
            }
            "entangle" => {
                need(3)?;
                instructions.push(AsmOp::Entangle {
                    e1: qubit(toks[1])?,
                    e2: qubit(toks[2])?,
                });
            }
            "larmor_e" | "rabi_e" | "larmor_c" | "rabi_c" | "crc" => {
                need(2)?;
                let kind = match toks[0] {
                    "larmor_e" => DiagnosticKind::LarmorElectron,
                    "rabi_e" => DiagnosticKind::RabiCheckElectron,
                    "larmor_c" => DiagnosticKind::LarmorCarbon,
                    "rabi_c" => DiagnosticKind::RabiCheckCarbon,
                    _ => DiagnosticKind::Crc,
                };
                instructions.push(AsmOp::Diag {
                    kind,
                    q: qubit(toks[1])?,
                });
            }
            "LDi" => {
                need(3)?;
                instructions.push(AsmOp::Ldi {
                    value: imm(toks[1])?,
                    register: toks[2].into(),
                });
            }
            "ST" => {
                need(2)?;
                instructions.push(AsmOp::St {
                    register: toks[1].into(),
                });
            }
            "ADDi" => {
                need(3)?;
                instructions.push(AsmOp::Addi {
                    register: toks[1].into(),
                    value: imm(toks[2])?,
                });
            }
            "BR" => {
                need(5)?;
                let cmp = Cmp::parse(toks[2])
                    .ok_or_else(|| err(format!("bad comparison `{}`", toks[2])))?;
                let rhs = match toks[3].parse::<i64>() {
                    Ok(v) => BrRhs::Imm(v),
                    Err(_) => BrRhs::Reg(toks[3].into()),
                };
                instructions.push(AsmOp::Br {
                    register: toks[1].into(),
                    cmp,
                    rhs,
                    label: toks[4].into(),
                });
            }
            "label" => {
                need(2)?;
                instructions.push(AsmOp::Label {
                    name: toks[1].into(),
                });
            }
            other => return Err(err(format!("unknown mnemonic `{other}`"))),
        }
    }
    let topology = topology.ok_or(AsmError::MissingTopology)?;
    let num_qubits = num_qubits.unwrap_or_else(|| topology.total_qubits());
    let program = finish_program(
        ProgramMeta {
            topology,
            num_qubits,
        },
        instructions,
    );
    validate_program(&program)?;
    Ok(program)
}

/// Structural checks: labels resolve and are unique; registers that are read
/// (`ST`, `BR`) are written somewhere (`meas`, `LDi`, `ADDi`).
pub fn validate_program(program: &Program) -> Result<(), AsmError> {
    let mut labels = std::collections::BTreeSet::new();
    for op in &program.instructions {
        if let AsmOp::Label { name } = op {
            if !labels.insert(name.clone()) {
                return Err(AsmError::DuplicateLabel(name.clone()));
            }
        }
    }
    let mut written = std::collections::BTreeSet::new();
    for op in &program.instructions {
        match op {
            AsmOp::Meas { register, .. }
            | AsmOp::Ldi { register, .. }
            | AsmOp::Addi { register, .. } => {
                written.insert(register.clone());
            }
            _ => {}
        }
    }
    for op in &program.instructions {
        match op {
            AsmOp::Br {
                register,
                rhs,
                label,
                ..
            } => {
                if !labels.contains(label) {
                    return Err(AsmError::UnresolvedLabel(label.clone()));
                }
                if !written.contains(register) {
                    return Err(AsmError::UndeclaredRegister(register.clone()));
                }
                if let BrRhs::Reg(r) = rhs {
                    if !written.contains(r) {
                        return Err(AsmError::UndeclaredRegister(r.clone()));
                    }
                }
            }
            AsmOp::St { register } if !written.contains(register) => {
                return Err(AsmError::UndeclaredRegister(register.clone()));
            }
            _ => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::passes::{compile, DiagnosticsConfig, PipelineConfig};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn topo(nodes: usize, per: usize) -> TopologyConfig {
        TopologyConfig::new(nodes, per).unwrap()
    }

    #[test]
    fn microradian_rounding() {
        assert_eq!(to_microradians(FRAC_PI_2), 1_570_796);
        assert_eq!(to_microradians(PI), 3_141_593);
        assert_eq!(to_microradians(-PI), -3_141_593);
    }

    #[test]
    fn emit_formats_native_gates() {
        let mut native = NativeCircuit::new(topo(1, 2), 2);
        native.push(NativeOp::RotE {
            e: QubitId(0),
            axis: Axis::X,
            theta: FRAC_PI_2,
        });
        native.push(NativeOp::CRot {
            e: QubitId(0),
            c: QubitId(1),
            axis: Axis::X,
            theta: FRAC_PI_2,
        });
        let program = emit(&native).unwrap();
        let text = disassemble(&program);
        assert!(text.contains("qgatee q0 x 1570796"));
        assert!(text.contains("crot q0 q1 x 1570796"));
    }

    #[test]
    fn emit_rejects_unresolved_placeholders() {
        let mut native = NativeCircuit::new(topo(1, 2), 2);
        native.push(NativeOp::CarbonUnitary {
            c: QubitId(1),
            gate: crate::circuit::GateKind::X,
        });
        assert!(matches!(
            emit(&native),
            Err(AsmError::UnresolvedPlaceholder(_))
        ));
    }

    #[test]
    fn conditional_gate_gets_inverted_guard() {
        // Source condition "apply when m < 0" must emit a skip branch taken
        // when m >= 0.
        let c = parse_circuit("qubits 2\ncreg m\nmeasure q0 -> m\nx q0 if m < 0").unwrap();
        let native = compile(
            &c,
            &topo(1, 2),
            &PipelineConfig::optimized(),
            &DiagnosticsConfig::disabled(),
        )
        .unwrap();
        let program = emit(&native).unwrap();
        let text = disassemble(&program);
        assert!(text.contains("BR m >= 0 skip0"), "got:\n{text}");
        assert!(text.contains("label skip0"));
    }

    #[test]
    fn skip_when_negative_guard_sense() {
        // "Apply when m >= 0" reproduces the skip-when-negative pattern.
        let ops = emit_conditional(
            vec![AsmOp::QGateE {
                q: 0,
                axis: AsmAxis::X,
                angle_urad: 3_141_593,
            }],
            "MeasurementRegister",
            Cmp::Ge,
            0,
            0,
        );
        let program = finish_program(
            ProgramMeta {
                topology: topo(1, 1),
                num_qubits: 1,
            },
            ops,
        );
        let text = disassemble(&program);
        assert!(text.contains("BR MeasurementRegister < 0 skip0"));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[lines.len() - 1], "label skip0");
    }

    #[test]
    fn tomography_loop_structure() {
        let c = parse_circuit(
            "qubits 2\ncreg MeasureResultRegister0\nh q0\nmeasure q0 -> MeasureResultRegister0",
        )
        .unwrap();
        let native = compile(
            &c,
            &topo(1, 2),
            &PipelineConfig::optimized(),
            &DiagnosticsConfig::disabled(),
        )
        .unwrap();
        let spec = TomographySpec {
            repetitions: 1000,
            measured_qubits: vec![QubitId(0)],
        };
        let program = emit_tomography(&native, &spec).unwrap();
        let text = disassemble(&program);
        assert!(text.contains("LDi 0 RepetitionCounter"));
        assert!(text.contains("LDi 1000 RepetitionAmount"));
        assert!(text.contains("label Repeat"));
        assert!(text.contains("ST MeasureResultRegister0"));
        assert!(text.contains("ADDi RepetitionCounter 1"));
        assert!(text.contains("BR RepetitionCounter < RepetitionAmount Repeat"));
    }

    #[test]
    fn tomography_rejects_zero_reps_and_bad_qubits() {
        let native = NativeCircuit::new(topo(1, 2), 2);
        let zero = TomographySpec {
            repetitions: 0,
            measured_qubits: vec![QubitId(0)],
        };
        assert!(emit_tomography(&native, &zero).is_err());
        let oob = TomographySpec {
            repetitions: 5,
            measured_qubits: vec![QubitId(7)],
        };
        assert!(emit_tomography(&native, &oob).is_err());
    }

    #[test]
    fn assembly_round_trip_identity() {
        let c = parse_circuit(
            "qubits 2\ncreg m\ninit q1\nh q0\ncx q0 q1\nmeasure q0 -> m\nx q1 if m < 0\nmeasure q1 -> m",
        )
        .unwrap();
        let native = compile(
            &c,
            &topo(1, 2),
            &PipelineConfig::optimized(),
            &DiagnosticsConfig::full(),
        )
        .unwrap();
        let program = emit(&native).unwrap();
        let text = disassemble(&program);
        let back = assemble(&text).unwrap();
        assert_eq!(back, program);
        // And the text itself is a fixed point.
        assert_eq!(disassemble(&back), text);
    }

    #[test]
    fn unresolved_label_is_rejected() {
        let text = ".topology nodes=1,per_node=2\nLDi 0 x\nBR x < 0 nowhere";
        match assemble(text) {
            Err(AsmError::UnresolvedLabel(l)) => assert_eq!(l, "nowhere"),
            other => panic!("expected unresolved label, got {other:?}"),
        }
    }

    #[test]
    fn read_before_write_register_is_rejected() {
        let text = ".topology nodes=1,per_node=2\nST ghost";
        assert!(matches!(
            assemble(text),
            Err(AsmError::UndeclaredRegister(_))
        ));
    }

    #[test]
    fn unknown_mnemonic_is_rejected() {
        let text = ".topology nodes=1,per_node=2\nfrobnicate q0";
        assert!(matches!(assemble(text), Err(AsmError::Parse(2, _))));
    }
}
