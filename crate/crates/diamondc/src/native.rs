//! The NV-native intermediate representation.
//!
//! After lowering, a circuit contains only operations the hardware can
//! execute — electron rotations, electron-conditioned carbon rotations,
//! electron init/measure, inter-node entanglement — plus two kinds of
//! placeholder that later passes resolve: unexpanded single-qubit carbon
//! unitaries (DDrf vs direct control) and unexpanded carbon init/measure
//! swaps (full vs partial).
//!
//! Conditional execution is structural here (`condition` on an instruction);
//! branch instructions only appear at assembly emission.

use crate::circuit::{Condition, GateKind};
use crate::topology::{QubitId, TopologyConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn letter(&self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DiagnosticKind {
    LarmorElectron,
    RabiCheckElectron,
    LarmorCarbon,
    RabiCheckCarbon,
    Crc,
}

impl DiagnosticKind {
    pub fn mnemonic(&self) -> &'static str {
        match self {
            DiagnosticKind::LarmorElectron => "larmor_e",
            DiagnosticKind::RabiCheckElectron => "rabi_e",
            DiagnosticKind::LarmorCarbon => "larmor_c",
            DiagnosticKind::RabiCheckCarbon => "rabi_c",
            DiagnosticKind::Crc => "crc",
        }
    }
}

/// Why a carbon measurement swap was annotated with a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasBasis {
    /// Plain Z measurement.
    Z,
    /// A Hadamard preceded the measurement and was consumed.
    X,
    /// `Sdg; H` preceded the measurement: measures +Y.
    YPlus,
    /// `S; H` preceded the measurement: measures -Y.
    YMinus,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NativeOp {
    /// Electron rotation about x or y (a physical microwave pulse).
    RotE { e: QubitId, axis: Axis, theta: f64 },
    /// Electron z rotation (zero-duration frame update).
    RzE { e: QubitId, theta: f64 },
    /// Electron-state-selective carbon rotation under dynamical decoupling:
    /// applies R_axis(theta) on the carbon when the electron is |1>, identity
    /// when it is |0>, preserving electron coherence.
    CRot {
        e: QubitId,
        c: QubitId,
        axis: Axis,
        theta: f64,
    },
    /// Carbon z rotation (zero-duration frame update).
    RzC { c: QubitId, theta: f64 },
    /// Undecoupled (fast) selective carbon rotation. Requires the electron
    /// parked in |1>; only emitted where liveness says the electron state is
    /// irrelevant.
    DirectRotC {
        e: QubitId,
        c: QubitId,
        axis: Axis,
        theta: f64,
    },
    /// Electron initialization to |0>.
    InitE { e: QubitId },
    /// Electron Z measurement; writes +1 (|0>) or -1 (|1>) into `register`.
    MeasE { e: QubitId, register: String },
    /// Ideal Bell-pair creation between two node electrons.
    Entangle { e1: QubitId, e2: QubitId },
    Diagnostic {
        kind: DiagnosticKind,
        qubit: QubitId,
    },

    // ── Pre-routing markers (resolved by route_init_measure) ──
    /// Measurement of any qubit, before init/measure routing has decided how
    /// to realize it.
    Measure { q: QubitId, register: String },
    /// Initialization of any qubit, before routing.
    Init { q: QubitId },

    // ── Placeholders consumed by later passes ──
    /// Pending single-qubit carbon unitary; `gate` is a 1-qubit unitary kind.
    CarbonUnitary { c: QubitId, gate: GateKind },
    /// Pending carbon-measurement routing; resolves to a full swap sandwich
    /// or a partial-swap readout before the paired MeasE that follows it.
    SwapMeasure {
        e: QubitId,
        c: QubitId,
        register: String,
        basis: MeasBasis,
    },
    /// Pending carbon-initialization routing; the preceding InitE is already
    /// in the stream. Resolves to a full swap or the cheaper init swap.
    SwapInit { e: QubitId, c: QubitId },
}

impl NativeOp {
    pub fn is_placeholder(&self) -> bool {
        matches!(
            self,
            NativeOp::CarbonUnitary { .. }
                | NativeOp::SwapMeasure { .. }
                | NativeOp::SwapInit { .. }
        )
    }

    /// Does this op touch the given electron qubit?
    pub fn touches_electron(&self, e: QubitId) -> bool {
        match self {
            NativeOp::RotE { e: q, .. } | NativeOp::RzE { e: q, .. } | NativeOp::InitE { e: q } => {
                *q == e
            }
            NativeOp::MeasE { e: q, .. } => *q == e,
            NativeOp::Measure { q, .. } | NativeOp::Init { q } => *q == e,
            NativeOp::CRot { e: q, .. }
            | NativeOp::DirectRotC { e: q, .. }
            | NativeOp::SwapMeasure { e: q, .. }
            | NativeOp::SwapInit { e: q, .. } => *q == e,
            NativeOp::Entangle { e1, e2 } => *e1 == e || *e2 == e,
            NativeOp::RzC { .. } | NativeOp::Diagnostic { .. } | NativeOp::CarbonUnitary { .. } => {
                false
            }
        }
    }

    pub fn qubits(&self) -> Vec<QubitId> {
        match self {
            NativeOp::RotE { e, .. } | NativeOp::RzE { e, .. } | NativeOp::InitE { e } => vec![*e],
            NativeOp::MeasE { e, .. } => vec![*e],
            NativeOp::Measure { q, .. } | NativeOp::Init { q } => vec![*q],
            NativeOp::RzC { c, .. } | NativeOp::CarbonUnitary { c, .. } => vec![*c],
            NativeOp::CRot { e, c, .. }
            | NativeOp::DirectRotC { e, c, .. }
            | NativeOp::SwapMeasure { e, c, .. }
            | NativeOp::SwapInit { e, c } => vec![*e, *c],
            NativeOp::Entangle { e1, e2 } => vec![*e1, *e2],
            NativeOp::Diagnostic { qubit, .. } => vec![*qubit],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NativeInstr {
    pub op: NativeOp,
    pub condition: Option<Condition>,
}

impl NativeInstr {
    pub fn new(op: NativeOp) -> Self {
        NativeInstr {
            op,
            condition: None,
        }
    }

    pub fn conditioned(op: NativeOp, condition: Option<Condition>) -> Self {
        NativeInstr { op, condition }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NativeCircuit {
    pub topology: TopologyConfig,
    pub num_qubits: usize,
    pub registers: Vec<String>,
    pub instrs: Vec<NativeInstr>,
}

impl NativeCircuit {
    pub fn new(topology: TopologyConfig, num_qubits: usize) -> Self {
        NativeCircuit {
            topology,
            num_qubits,
            registers: Vec::new(),
            instrs: Vec::new(),
        }
    }

    pub fn declare_register(&mut self, name: &str) {
        if !self.registers.iter().any(|r| r == name) {
            self.registers.push(name.to_string());
        }
    }

    /// Allocate a compiler-internal register with the given prefix.
    pub fn fresh_register(&mut self, prefix: &str) -> String {
        let mut k = 0usize;
        loop {
            let name = format!("{prefix}{k}");
            if !self.registers.iter().any(|r| r == &name) {
                self.registers.push(name.clone());
                return name;
            }
            k += 1;
        }
    }

    pub fn push(&mut self, op: NativeOp) {
        self.instrs.push(NativeInstr::new(op));
    }

    pub fn push_conditioned(&mut self, op: NativeOp, condition: Option<Condition>) {
        self.instrs.push(NativeInstr::conditioned(op, condition));
    }

    pub fn has_placeholders(&self) -> bool {
        self.instrs.iter().any(|i| i.op.is_placeholder())
    }

    /// Count of electron-conditioned carbon pulse blocks (CRot + direct),
    /// the expensive resource the swap optimizations trade in.
    pub fn crot_block_count(&self) -> usize {
        self.instrs
            .iter()
            .filter(|i| matches!(i.op, NativeOp::CRot { .. } | NativeOp::DirectRotC { .. }))
            .count()
    }
}
