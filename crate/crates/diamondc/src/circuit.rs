//! Hardware-agnostic circuit representation and its line-oriented text format.
//!
//! The format is deliberately small: one instruction per line, a `qubits N`
//! header, `creg NAME` declarations, `measure qI -> NAME`, and an optional
//! `if NAME CMP INT` suffix for classically conditioned gates. Mnemonics are
//! case-insensitive and `#` starts a comment.

use crate::linalg::{self, CMat};
use crate::topology::{QubitId, TopologyConfig};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Cx,
    Cz,
    /// Controlled rotation: applies Rx(angle) to the target when the control
    /// is |1>.
    CRot(f64),
    Swap,
    Measure,
    Init,
}

impl GateKind {
    pub fn mnemonic(&self) -> &'static str {
        match self {
            GateKind::I => "i",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::Rx(_) => "rx",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::CRot(_) => "crot",
            GateKind::Swap => "swap",
            GateKind::Measure => "measure",
            GateKind::Init => "init",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            GateKind::Rx(a) | GateKind::Ry(a) | GateKind::Rz(a) | GateKind::CRot(a) => Some(*a),
            _ => None,
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            GateKind::Cx | GateKind::Cz | GateKind::CRot(_) | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn is_unitary_gate(&self) -> bool {
        !matches!(self, GateKind::Measure | GateKind::Init)
    }

    /// 2x2 matrix for single-qubit gates.
    pub fn matrix_1q(&self) -> Option<CMat> {
        let m = match self {
            GateKind::I => CMat::identity(2),
            GateKind::X => linalg::pauli_x(),
            GateKind::Y => linalg::pauli_y(),
            GateKind::Z => linalg::pauli_z(),
            GateKind::H => linalg::hadamard(),
            GateKind::S => CMat::from_rows(&[
                &[linalg::ONE, linalg::ZERO],
                &[linalg::ZERO, num_complex::Complex64::new(0.0, 1.0)],
            ]),
            GateKind::Sdg => CMat::from_rows(&[
                &[linalg::ONE, linalg::ZERO],
                &[linalg::ZERO, num_complex::Complex64::new(0.0, -1.0)],
            ]),
            GateKind::Rx(a) => linalg::rot_x(*a),
            GateKind::Ry(a) => linalg::rot_y(*a),
            GateKind::Rz(a) => linalg::rot_z(*a),
            _ => return None,
        };
        Some(m)
    }

    /// 4x4 matrix for two-qubit gates. Basis index is
    /// `first_operand_bit * 2 + second_operand_bit`.
    pub fn matrix_2q(&self) -> Option<CMat> {
        let embed_controlled = |u: CMat| {
            let mut m = CMat::identity(4);
            for i in 0..2 {
                for j in 0..2 {
                    m[(2 + i, 2 + j)] = u[(i, j)];
                }
            }
            m[(2, 2)] = u[(0, 0)];
            m[(2, 3)] = u[(0, 1)];
            m[(3, 2)] = u[(1, 0)];
            m[(3, 3)] = u[(1, 1)];
            m
        };
        let m = match self {
            GateKind::Cx => embed_controlled(linalg::pauli_x()),
            GateKind::Cz => embed_controlled(linalg::pauli_z()),
            GateKind::CRot(a) => embed_controlled(linalg::rot_x(*a)),
            GateKind::Swap => {
                let mut m = CMat::zeros(4);
                m[(0, 0)] = linalg::ONE;
                m[(1, 2)] = linalg::ONE;
                m[(2, 1)] = linalg::ONE;
                m[(3, 3)] = linalg::ONE;
                m
            }
            _ => return None,
        };
        Some(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Cmp {
    pub fn token(&self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Ne => "!=",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }

    pub fn parse(s: &str) -> Option<Cmp> {
        Some(match s {
            "<" => Cmp::Lt,
            "<=" => Cmp::Le,
            "=" | "==" => Cmp::Eq,
            "!=" => Cmp::Ne,
            ">=" => Cmp::Ge,
            ">" => Cmp::Gt,
            _ => return None,
        })
    }

    pub fn eval(&self, lhs: i64, rhs: i64) -> bool {
        match self {
            Cmp::Lt => lhs < rhs,
            Cmp::Le => lhs <= rhs,
            Cmp::Eq => lhs == rhs,
            Cmp::Ne => lhs != rhs,
            Cmp::Ge => lhs >= rhs,
            Cmp::Gt => lhs > rhs,
        }
    }

    /// The comparison that is true exactly when `self` is false. Used to turn
    /// "apply when" conditions into skip branches.
    pub fn negate(&self) -> Cmp {
        match self {
            Cmp::Lt => Cmp::Ge,
            Cmp::Le => Cmp::Gt,
            Cmp::Eq => Cmp::Ne,
            Cmp::Ne => Cmp::Eq,
            Cmp::Ge => Cmp::Lt,
            Cmp::Gt => Cmp::Le,
        }
    }
}

/// `apply this instruction only when <register> <cmp> <threshold>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub register: String,
    pub cmp: Cmp,
    pub threshold: i64,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "if {} {} {}",
            self.register,
            self.cmp.token(),
            self.threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub kind: GateKind,
    pub qubits: Vec<QubitId>,
    /// Destination register for `Measure`.
    pub register: Option<String>,
    pub condition: Option<Condition>,
}

impl Instruction {
    pub fn gate(kind: GateKind, qubits: Vec<QubitId>) -> Self {
        Instruction {
            kind,
            qubits,
            register: None,
            condition: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub classical_registers: Vec<String>,
    pub instructions: Vec<Instruction>,
}

/// Map an angle into (-2pi, 2pi], the period of the underlying rotation
/// matrices (rotations are 4pi-periodic as matrices; shifting by 4pi is
/// exactly the identity, so this normalization preserves the unitary).
pub fn normalize_angle(a: f64) -> f64 {
    if !a.is_finite() {
        return a;
    }
    let period = 2.0 * TAU;
    let mut x = a % period;
    if x <= -TAU {
        x += period;
    } else if x > TAU {
        x -= period;
    }
    x
}

// ── Parsing ──────────────────────────────────────────────────────────────────

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

struct Tok<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let mut toks = Vec::new();
    let mut col = 0usize;
    for part in line.split_inclusive(char::is_whitespace) {
        let trimmed = part.trim_end_matches(char::is_whitespace);
        if !trimmed.is_empty() {
            if trimmed.starts_with('#') {
                break;
            }
            toks.push(Tok {
                text: trimmed,
                col: col + 1,
            });
        }
        col += part.chars().count();
    }
    toks
}

fn parse_qubit(tok: &Tok<'_>, line: usize, num_qubits: usize) -> Result<QubitId, ParseError> {
    let err = |message: String| ParseError {
        line,
        col: tok.col,
        message,
    };
    let rest = tok.text.strip_prefix(['q', 'Q']).ok_or_else(|| {
        err(format!(
            "expected qubit operand like `q0`, found `{}`",
            tok.text
        ))
    })?;
    let idx: usize = rest
        .parse()
        .map_err(|_| err(format!("bad qubit index in `{}`", tok.text)))?;
    if idx >= num_qubits {
        return Err(err(format!(
            "qubit index {idx} out of declared range (qubits {num_qubits})"
        )));
    }
    Ok(QubitId(idx))
}

fn is_register_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parse circuit source text. Any failure is reported with line and column.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut circuit: Option<Circuit> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        let head = toks[0].text.to_ascii_lowercase();
        let err_at = |col: usize, message: String| ParseError { line, col, message };
        if circuit.is_none() {
            if head != "qubits" {
                return Err(err_at(
                    toks[0].col,
                    format!("expected `qubits N` header, found `{}`", toks[0].text),
                ));
            }
            if toks.len() != 2 {
                return Err(err_at(
                    toks[0].col,
                    "`qubits` takes exactly one count".into(),
                ));
            }
            let n: usize = toks[1]
                .text
                .parse()
                .map_err(|_| err_at(toks[1].col, format!("bad qubit count `{}`", toks[1].text)))?;
            if n == 0 {
                return Err(err_at(
                    toks[1].col,
                    "circuit must declare at least one qubit".into(),
                ));
            }
            circuit = Some(Circuit {
                num_qubits: n,
                classical_registers: Vec::new(),
                instructions: Vec::new(),
            });
            continue;
        }
        let c = circuit.as_mut().unwrap();
        match head.as_str() {
            "qubits" => {
                return Err(err_at(toks[0].col, "duplicate `qubits` header".into()));
            }
            "creg" => {
                if toks.len() != 2 || !is_register_name(toks[1].text) {
                    return Err(err_at(
                        toks[0].col,
                        "`creg` takes exactly one register name".into(),
                    ));
                }
                let name = toks[1].text.to_string();
                if c.classical_registers.contains(&name) {
                    return Err(err_at(
                        toks[1].col,
                        format!("register `{name}` already declared"),
                    ));
                }
                c.classical_registers.push(name);
            }
            "measure" => {
                // measure qI -> NAME [if ...]
                if toks.len() < 4 || toks[2].text != "->" {
                    return Err(err_at(
                        toks[0].col,
                        "expected `measure q<i> -> NAME`".into(),
                    ));
                }
                let q = parse_qubit(&toks[1], line, c.num_qubits)?;
                let reg = toks[3].text.to_string();
                if !is_register_name(&reg) {
                    return Err(err_at(toks[3].col, format!("bad register name `{reg}`")));
                }
                if !c.classical_registers.contains(&reg) {
                    return Err(err_at(
                        toks[3].col,
                        format!("measure into undeclared register `{reg}`"),
                    ));
                }
                let condition = parse_condition_suffix(&toks[4..], line, c)?;
                c.instructions.push(Instruction {
                    kind: GateKind::Measure,
                    qubits: vec![q],
                    register: Some(reg),
                    condition,
                });
            }
            _ => {
                let (kind, needs_angle) = match head.as_str() {
                    "i" | "id" => (GateKind::I, false),
                    "x" => (GateKind::X, false),
                    "y" => (GateKind::Y, false),
                    "z" => (GateKind::Z, false),
                    "h" => (GateKind::H, false),
                    "s" => (GateKind::S, false),
                    "sdg" => (GateKind::Sdg, false),
                    "rx" => (GateKind::Rx(0.0), true),
                    "ry" => (GateKind::Ry(0.0), true),
                    "rz" => (GateKind::Rz(0.0), true),
                    "cx" | "cnot" => (GateKind::Cx, false),
                    "cz" => (GateKind::Cz, false),
                    "crot" => (GateKind::CRot(0.0), true),
                    "swap" => (GateKind::Swap, false),
                    "init" => (GateKind::Init, false),
                    other => {
                        return Err(err_at(toks[0].col, format!("unknown gate `{other}`")));
                    }
                };
                let nq = kind.num_qubits();
                let mut pos = 1usize;
                let mut qubits = Vec::with_capacity(nq);
                for _ in 0..nq {
                    let tok = toks.get(pos).ok_or_else(|| {
                        err_at(
                            toks[0].col,
                            format!("`{head}` expects {nq} qubit operand(s)"),
                        )
                    })?;
                    qubits.push(parse_qubit(tok, line, c.num_qubits)?);
                    pos += 1;
                }
                if nq == 2 && qubits[0] == qubits[1] {
                    return Err(err_at(
                        toks[pos - 1].col,
                        format!("`{head}` operands must be distinct"),
                    ));
                }
                let kind = if needs_angle {
                    let tok = toks.get(pos).ok_or_else(|| {
                        err_at(toks[0].col, format!("`{head}` expects an angle in radians"))
                    })?;
                    let angle: f64 = tok
                        .text
                        .parse()
                        .map_err(|_| err_at(tok.col, format!("bad angle `{}`", tok.text)))?;
                    if !angle.is_finite() {
                        return Err(err_at(tok.col, "angle must be finite".into()));
                    }
                    pos += 1;
                    let a = normalize_angle(angle);
                    match kind {
                        GateKind::Rx(_) => GateKind::Rx(a),
                        GateKind::Ry(_) => GateKind::Ry(a),
                        GateKind::Rz(_) => GateKind::Rz(a),
                        GateKind::CRot(_) => GateKind::CRot(a),
                        _ => unreachable!(),
                    }
                } else {
                    kind
                };
                let condition = parse_condition_suffix(&toks[pos..], line, c)?;
                c.instructions.push(Instruction {
                    kind,
                    qubits,
                    register: None,
                    condition,
                });
            }
        }
    }
    circuit.ok_or(ParseError {
        line: 1,
        col: 1,
        message: "empty input: expected `qubits N` header".into(),
    })
}

fn parse_condition_suffix(
    toks: &[Tok<'_>],
    line: usize,
    circuit: &Circuit,
) -> Result<Option<Condition>, ParseError> {
    if toks.is_empty() {
        return Ok(None);
    }
    let err_at = |col: usize, message: String| ParseError { line, col, message };
    if !toks[0].text.eq_ignore_ascii_case("if") {
        return Err(err_at(
            toks[0].col,
            format!("unexpected trailing token `{}`", toks[0].text),
        ));
    }
    if toks.len() != 4 {
        return Err(err_at(toks[0].col, "expected `if NAME CMP INT`".into()));
    }
    let reg = toks[1].text.to_string();
    if !circuit.classical_registers.contains(&reg) {
        return Err(err_at(
            toks[1].col,
            format!("condition on undeclared register `{reg}`"),
        ));
    }
    let cmp = Cmp::parse(toks[2].text)
        .ok_or_else(|| err_at(toks[2].col, format!("bad comparison `{}`", toks[2].text)))?;
    let threshold: i64 = toks[3]
        .text
        .parse()
        .map_err(|_| err_at(toks[3].col, format!("bad threshold `{}`", toks[3].text)))?;
    Ok(Some(Condition {
        register: reg,
        cmp,
        threshold,
    }))
}

// ── Serialization ────────────────────────────────────────────────────────────

/// Canonical text form; `parse_circuit(serialize_circuit(c)) == c`.
pub fn serialize_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(&format!("qubits {}\n", c.num_qubits));
    for reg in &c.classical_registers {
        out.push_str(&format!("creg {reg}\n"));
    }
    for ins in &c.instructions {
        let mut lineout = String::new();
        if ins.kind == GateKind::Measure {
            lineout.push_str(&format!(
                "measure {} -> {}",
                ins.qubits[0],
                ins.register.as_deref().unwrap_or("?")
            ));
        } else {
            lineout.push_str(ins.kind.mnemonic());
            for q in &ins.qubits {
                lineout.push_str(&format!(" {q}"));
            }
            if let Some(a) = ins.kind.angle() {
                lineout.push_str(&format!(" {a}"));
            }
        }
        if let Some(cond) = &ins.condition {
            lineout.push_str(&format!(" {cond}"));
        }
        out.push_str(&lineout);
        out.push('\n');
    }
    // Drop the trailing newline so short programs print tight.
    if out.ends_with('\n') {
        out.pop();
    }
    out
}

// ── Validation ───────────────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationIssue {
    /// Index into `instructions`, or None for circuit-level problems.
    pub instruction: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.instruction {
            Some(i) => write!(f, "instruction {i}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// Structural checks against the circuit's own declarations and a topology.
/// An empty result means the circuit is well-formed and fits the hardware.
pub fn validate(circuit: &Circuit, config: &TopologyConfig) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    if circuit.num_qubits > config.total_qubits() {
        issues.push(ValidationIssue {
            instruction: None,
            message: format!(
                "circuit declares {} qubits but topology has only {}",
                circuit.num_qubits,
                config.total_qubits()
            ),
        });
    }
    for (i, ins) in circuit.instructions.iter().enumerate() {
        let expect = ins.kind.num_qubits();
        if ins.qubits.len() != expect {
            issues.push(ValidationIssue {
                instruction: Some(i),
                message: format!(
                    "{} expects {expect} qubit(s), found {}",
                    ins.kind.mnemonic(),
                    ins.qubits.len()
                ),
            });
            continue;
        }
        if expect == 2 && ins.qubits[0] == ins.qubits[1] {
            issues.push(ValidationIssue {
                instruction: Some(i),
                message: format!("{} operands must be distinct", ins.kind.mnemonic()),
            });
        }
        for q in &ins.qubits {
            if q.0 >= circuit.num_qubits {
                issues.push(ValidationIssue {
                    instruction: Some(i),
                    message: format!("{q} exceeds declared qubit count {}", circuit.num_qubits),
                });
            } else if !config.contains(*q) {
                issues.push(ValidationIssue {
                    instruction: Some(i),
                    message: format!(
                        "{q} is outside the topology ({} qubits)",
                        config.total_qubits()
                    ),
                });
            }
        }
        if let Some(a) = ins.kind.angle() {
            if !(a > -TAU - 1e-12 && a <= TAU + 1e-12) {
                issues.push(ValidationIssue {
                    instruction: Some(i),
                    message: format!("angle {a} outside normalized range (-2pi, 2pi]"),
                });
            }
        }
        if ins.kind == GateKind::Measure {
            match &ins.register {
                Some(r) if circuit.classical_registers.contains(r) => {}
                Some(r) => issues.push(ValidationIssue {
                    instruction: Some(i),
                    message: format!("measure into undeclared register `{r}`"),
                }),
                None => issues.push(ValidationIssue {
                    instruction: Some(i),
                    message: "measure requires a destination register".into(),
                }),
            }
        }
        if let Some(cond) = &ins.condition {
            if !circuit.classical_registers.contains(&cond.register) {
                issues.push(ValidationIssue {
                    instruction: Some(i),
                    message: format!("condition on undeclared register `{}`", cond.register),
                });
            }
        }
    }
    issues
}

pub fn angle_matrix_preserved(original: f64, normalized: f64) -> bool {
    linalg::rot_x(original).max_abs_diff(&linalg::rot_x(normalized)) < 1e-9
}
