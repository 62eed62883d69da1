//! Density-matrix execution of emitted assembly with depolarization and idle
//! decoherence noise, classical registers, and branching.
//!
//! Noise model: every physical quantum instruction applies its ideal channel,
//! then single-qubit depolarization with probability `p_depol` on each
//! involved qubit, then idle decoherence (exponential decay toward the
//! maximally mixed state) on every non-involved qubit for the instruction's
//! duration. Zero-duration frame updates and diagnostics are bookkeeping, not
//! pulses, and are exempt from noise; runs record that exemption in their
//! metadata.

pub mod density;

use crate::circuit::Cmp;
use crate::codegen::{from_microradians, AsmOp, BrRhs, Program};
use crate::linalg;
use crate::native::{Axis, NativeCircuit, NativeOp};
use crate::topology::TopologyConfig;
use density::{rotation_matrix, DensityMatrix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("instruction {0}: {1}")]
    Role(usize, String),
    #[error("branch to unresolved label `{0}`")]
    UnresolvedLabel(String),
    #[error("register overflow on `{0}`")]
    RegisterOverflow(String),
    #[error("instruction budget exhausted; probable infinite loop")]
    InfiniteLoop,
    #[error("exact mode: more than {0} measurement events on one path")]
    BranchExplosion(usize),
    #[error("qubit count {0} exceeds the simulator cap of {1}")]
    TooManyQubits(usize, usize),
    #[error("invalid noise parameters: {0}")]
    BadNoise(String),
    #[error("physicality violation at instruction {0}: {1}")]
    Physicality(usize, String),
}

pub const MAX_QUBITS: usize = 12;
pub const MAX_EXACT_MEASUREMENTS: usize = 16;
const INSTRUCTION_BUDGET: u64 = 100_000_000;

/// Per-instruction depolarization probability and idle coherence time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p_depol: f64,
    /// `None` disables idle decoherence (infinite coherence time).
    pub t_coh: Option<f64>,
}

impl NoiseParams {
    pub fn noiseless() -> Self {
        NoiseParams {
            p_depol: 0.0,
            t_coh: None,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.p_depol) {
            return Err(SimError::BadNoise(format!(
                "p_depol {} not in [0, 1]",
                self.p_depol
            )));
        }
        if let Some(t) = self.t_coh {
            if t <= 0.0 || t.is_nan() {
                return Err(SimError::BadNoise(format!("t_coh {t} must be positive")));
            }
        }
        Ok(())
    }
}

/// Scheduled durations per mnemonic, in seconds. Electron pulses are fast
/// (100 ns); carbon pulses slow (1 ms); z rotations and diagnostics cost
/// nothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DurationTable {
    pub qgatee: f64,
    pub qgatec: f64,
    pub crot: f64,
    pub qgatedir: f64,
    pub inite: f64,
    pub meas: f64,
    pub entangle: f64,
}

impl Default for DurationTable {
    fn default() -> Self {
        DurationTable {
            qgatee: 100e-9,
            qgatec: 1e-3,
            crot: 1e-3,
            qgatedir: 1e-3,
            inite: 10e-6,
            meas: 10e-6,
            entangle: 1e-3,
        }
    }
}

impl DurationTable {
    pub fn duration_of(&self, op: &AsmOp) -> f64 {
        match op {
            AsmOp::QGateE { axis, .. } => {
                if *axis == crate::codegen::AsmAxis::Z {
                    0.0
                } else {
                    self.qgatee
                }
            }
            AsmOp::QGateC { axis, .. } => {
                if *axis == crate::codegen::AsmAxis::Z {
                    0.0
                } else {
                    self.qgatec
                }
            }
            AsmOp::CRot { .. } => self.crot,
            AsmOp::QGateDir { .. } => self.qgatedir,
            AsmOp::InitE { .. } => self.inite,
            AsmOp::Meas { .. } => self.meas,
            AsmOp::Entangle { .. } => self.entangle,
            // Diagnostics model calibration, not computation; classical
            // instructions are free.
            AsmOp::Diag { .. } => 0.0,
            _ => 0.0,
        }
    }

    /// FNV-1a hash of the table values, recorded in run metadata so results
    /// are self-describing.
    pub fn hash(&self) -> String {
        let s =
            format!(
            "qgatee={:e};qgatec={:e};crot={:e};qgatedir={:e};inite={:e};meas={:e};entangle={:e}",
            self.qgatee, self.qgatec, self.crot, self.qgatedir, self.inite, self.meas, self.entangle
        );
        let mut h: u64 = 0xcbf29ce484222325;
        for b in s.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

/// Total sequential duration of a program (one pass, loops not unrolled).
pub fn scheduled_duration(program: &Program, durations: &DurationTable) -> f64 {
    program
        .instructions
        .iter()
        .map(|op| durations.duration_of(op))
        .sum()
}

// ── Internal instruction stream ──────────────────────────────────────────────

#[derive(Debug, Clone)]
enum Step {
    Rot {
        q: usize,
        axis: char,
        theta: f64,
    },
    CondRot {
        e: usize,
        c: usize,
        axis: char,
        theta: f64,
    },
    InitE {
        q: usize,
    },
    Meas {
        q: usize,
        register: String,
    },
    Entangle {
        a: usize,
        b: usize,
    },
    Diag,
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
        target: usize,
    },
    Nop,
}

#[derive(Debug, Clone)]
struct SimInstr {
    step: Step,
    guard: Option<(String, Cmp, i64)>,
    duration: f64,
    /// Qubits the instruction physically drives (noise targets).
    involved: Vec<usize>,
    /// Physical pulse (depolarization applies) vs bookkeeping.
    physical: bool,
}

struct SimProgram {
    n_qubits: usize,
    instrs: Vec<SimInstr>,
}

fn check_roles(topo: &TopologyConfig, idx: usize, op: &AsmOp) -> Result<(), SimError> {
    let electron = |q: usize, what: &str| -> Result<(), SimError> {
        if !topo.is_electron(crate::topology::QubitId(q)) {
            return Err(SimError::Role(
                idx,
                format!("{what} requires an electron, got q{q}"),
            ));
        }
        Ok(())
    };
    let carbon = |q: usize, what: &str| -> Result<(), SimError> {
        if !topo.is_carbon(crate::topology::QubitId(q)) {
            return Err(SimError::Role(
                idx,
                format!("{what} requires a carbon, got q{q}"),
            ));
        }
        Ok(())
    };
    match op {
        AsmOp::QGateE { q, .. } => electron(*q, "qgatee"),
        AsmOp::QGateC { q, .. } => carbon(*q, "qgatec"),
        AsmOp::CRot { e, c, .. } | AsmOp::QGateDir { e, c, .. } => {
            electron(*e, "conditional rotation control")?;
            carbon(*c, "conditional rotation target")?;
            let same_node = topo.node_of(crate::topology::QubitId(*e))
                == topo.node_of(crate::topology::QubitId(*c));
            if !same_node {
                return Err(SimError::Role(
                    idx,
                    "conditional rotation spans nodes".into(),
                ));
            }
            Ok(())
        }
        AsmOp::InitE { q } => electron(*q, "inite"),
        AsmOp::Meas { q, .. } => electron(*q, "meas"),
        AsmOp::Entangle { e1, e2 } => {
            electron(*e1, "entangle")?;
            electron(*e2, "entangle")?;
            if topo.node_of(crate::topology::QubitId(*e1))
                == topo.node_of(crate::topology::QubitId(*e2))
            {
                return Err(SimError::Role(
                    idx,
                    "entangle requires distinct nodes".into(),
                ));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn build_sim_program(program: &Program, durations: &DurationTable) -> Result<SimProgram, SimError> {
    let n = program.meta.num_qubits.max(1);
    if n > MAX_QUBITS {
        return Err(SimError::TooManyQubits(n, MAX_QUBITS));
    }
    let mut labels = BTreeMap::new();
    for (i, op) in program.instructions.iter().enumerate() {
        if let AsmOp::Label { name } = op {
            labels.insert(name.clone(), i);
        }
    }
    let mut instrs = Vec::with_capacity(program.instructions.len());
    for (i, op) in program.instructions.iter().enumerate() {
        check_roles(&program.meta.topology, i, op)?;
        let duration = durations.duration_of(op);
        let (step, involved, physical) = match op {
            AsmOp::QGateE {
                q,
                axis,
                angle_urad,
            }
            | AsmOp::QGateC {
                q,
                axis,
                angle_urad,
            } => {
                let physical = *axis != crate::codegen::AsmAxis::Z;
                (
                    Step::Rot {
                        q: *q,
                        axis: axis.letter(),
                        theta: from_microradians(*angle_urad),
                    },
                    vec![*q],
                    physical,
                )
            }
            AsmOp::CRot {
                e,
                c,
                axis,
                angle_urad,
            }
            | AsmOp::QGateDir {
                e,
                c,
                axis,
                angle_urad,
            } => (
                Step::CondRot {
                    e: *e,
                    c: *c,
                    axis: axis.letter(),
                    theta: from_microradians(*angle_urad),
                },
                vec![*e, *c],
                true,
            ),
            AsmOp::InitE { q } => (Step::InitE { q: *q }, vec![*q], true),
            AsmOp::Meas { q, register } => (
                Step::Meas {
                    q: *q,
                    register: register.clone(),
                },
                vec![*q],
                true,
            ),
            AsmOp::Entangle { e1, e2 } => (Step::Entangle { a: *e1, b: *e2 }, vec![*e1, *e2], true),
            AsmOp::Diag { .. } => (Step::Diag, vec![], false),
            AsmOp::Ldi { value, register } => (
                Step::Ldi {
                    value: *value,
                    register: register.clone(),
                },
                vec![],
                false,
            ),
            AsmOp::St { register } => (
                Step::St {
                    register: register.clone(),
                },
                vec![],
                false,
            ),
            AsmOp::Addi { register, value } => (
                Step::Addi {
                    register: register.clone(),
                    value: *value,
                },
                vec![],
                false,
            ),
            AsmOp::Br {
                register,
                cmp,
                rhs,
                label,
            } => {
                let target = *labels
                    .get(label)
                    .ok_or_else(|| SimError::UnresolvedLabel(label.clone()))?;
                (
                    Step::Br {
                        register: register.clone(),
                        cmp: *cmp,
                        rhs: rhs.clone(),
                        target,
                    },
                    vec![],
                    false,
                )
            }
            AsmOp::Label { .. } => (Step::Nop, vec![], false),
        };
        instrs.push(SimInstr {
            step,
            guard: None,
            duration,
            involved,
            physical,
        });
    }
    Ok(SimProgram {
        n_qubits: n,
        instrs,
    })
}

/// Build the internal stream directly from a native circuit at full f64
/// angle precision (no microradian quantization). Used for exact semantic
/// checks; conditions become guards instead of branch instructions.
fn build_from_native(
    native: &NativeCircuit,
    durations: &DurationTable,
) -> Result<SimProgram, SimError> {
    let n = native.num_qubits.max(1);
    if n > MAX_QUBITS {
        return Err(SimError::TooManyQubits(n, MAX_QUBITS));
    }
    let mut instrs = Vec::with_capacity(native.instrs.len());
    for (i, instr) in native.instrs.iter().enumerate() {
        let guard = instr
            .condition
            .as_ref()
            .map(|c| (c.register.clone(), c.cmp, c.threshold));
        let axis_char = |a: Axis| a.letter();
        let (step, involved, physical, duration) = match &instr.op {
            NativeOp::RotE { e, axis, theta } => (
                Step::Rot {
                    q: e.0,
                    axis: axis_char(*axis),
                    theta: *theta,
                },
                vec![e.0],
                true,
                durations.qgatee,
            ),
            NativeOp::RzE { e, theta } => (
                Step::Rot {
                    q: e.0,
                    axis: 'z',
                    theta: *theta,
                },
                vec![e.0],
                false,
                0.0,
            ),
            NativeOp::RzC { c, theta } => (
                Step::Rot {
                    q: c.0,
                    axis: 'z',
                    theta: *theta,
                },
                vec![c.0],
                false,
                0.0,
            ),
            NativeOp::CRot { e, c, axis, theta } => (
                Step::CondRot {
                    e: e.0,
                    c: c.0,
                    axis: axis_char(*axis),
                    theta: *theta,
                },
                vec![e.0, c.0],
                true,
                durations.crot,
            ),
            NativeOp::DirectRotC { e, c, axis, theta } => (
                Step::CondRot {
                    e: e.0,
                    c: c.0,
                    axis: axis_char(*axis),
                    theta: *theta,
                },
                vec![e.0, c.0],
                true,
                durations.qgatedir,
            ),
            NativeOp::InitE { e } => (Step::InitE { q: e.0 }, vec![e.0], true, durations.inite),
            NativeOp::MeasE { e, register } => (
                Step::Meas {
                    q: e.0,
                    register: register.clone(),
                },
                vec![e.0],
                true,
                durations.meas,
            ),
            NativeOp::Entangle { e1, e2 } => (
                Step::Entangle { a: e1.0, b: e2.0 },
                vec![e1.0, e2.0],
                true,
                durations.entangle,
            ),
            NativeOp::Diagnostic { .. } => (Step::Diag, vec![], false, 0.0),
            other => {
                return Err(SimError::Role(
                    i,
                    format!("unresolved placeholder {other:?}"),
                ));
            }
        };
        instrs.push(SimInstr {
            step,
            guard,
            duration,
            involved,
            physical,
        });
    }
    Ok(SimProgram {
        n_qubits: n,
        instrs,
    })
}

// ── Results ──────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathResult {
    pub probability: f64,
    /// Ordered measurement outcomes (register name, +1/-1).
    pub outcomes: Vec<(String, i8)>,
    pub registers: BTreeMap<String, i64>,
    /// Values appended by ST, in order.
    pub stored: Vec<(String, i8)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResult {
    pub version: u32,
    pub seed: u64,
    pub shots: u64,
    pub exact: bool,
    pub noise: NoiseParams,
    pub durations: DurationTable,
    pub duration_table_hash: String,
    pub topology: TopologyConfig,
    pub compiler_version: String,
    pub noise_exemptions: Vec<String>,
    /// Mean stored value per register (sampled: over shots; exact: weighted
    /// over paths).
    pub expectations: BTreeMap<String, f64>,
    /// Mean over shots/paths of the product of all stored values.
    pub logical_expectation: Option<f64>,
    /// Per-shot stored values (sampled mode).
    pub shot_records: Vec<Vec<(String, i8)>>,
    /// Per-shot ordered measurement outcomes (sampled mode).
    pub shot_outcomes: Vec<Vec<(String, i8)>>,
    /// Enumerated outcome paths (exact mode).
    pub paths: Vec<PathResult>,
    pub instruction_counts: Vec<u64>,
    /// Probability-weighted final state (exact mode only).
    pub final_density_matrix: Option<SerializedState>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SerializedState {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SerializedState {
    pub fn from_cmat(m: &linalg::CMat) -> Self {
        SerializedState {
            dim: m.dim,
            re: m.data.iter().map(|c| c.re).collect(),
            im: m.data.iter().map(|c| c.im).collect(),
        }
    }

    pub fn to_cmat(&self) -> linalg::CMat {
        linalg::CMat {
            dim: self.dim,
            data: self
                .re
                .iter()
                .zip(self.im.iter())
                .map(|(r, i)| num_complex::Complex64::new(*r, *i))
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: u64,
    pub shots: u64,
    pub exact: bool,
    /// Verify trace/Hermiticity/positivity of the state after every
    /// instruction (within 1e-9).
    pub check_physicality: bool,
    /// Capture the final density matrix (exact mode).
    pub capture_final_state: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 0,
            shots: 1,
            exact: false,
            check_physicality: false,
            capture_final_state: false,
        }
    }
}

// ── Execution ────────────────────────────────────────────────────────────────

struct Machine {
    rho: DensityMatrix,
    registers: BTreeMap<String, i64>,
    stored: Vec<(String, i8)>,
    outcomes: Vec<(String, i8)>,
    pc: usize,
    executed: u64,
}

impl Machine {
    fn fresh(n_qubits: usize, registers: &[String]) -> Self {
        Machine {
            rho: DensityMatrix::ground(n_qubits),
            registers: registers.iter().map(|r| (r.clone(), 0i64)).collect(),
            stored: Vec::new(),
            outcomes: Vec::new(),
            pc: 0,
            executed: 0,
        }
    }

    fn reg(&self, name: &str) -> i64 {
        *self.registers.get(name).unwrap_or(&0)
    }
}

struct Engine<'a> {
    program: &'a SimProgram,
    noise: NoiseParams,
    check_physicality: bool,
    counts: Vec<u64>,
}

enum StepOutcome {
    Continue,
    Jump(usize),
    /// Measurement requiring a decision: (qubit, register, p_zero).
    Measure(usize, String, f64),
}

impl<'a> Engine<'a> {
    fn new(program: &'a SimProgram, noise: NoiseParams, check_physicality: bool) -> Self {
        Engine {
            program,
            noise,
            check_physicality,
            counts: vec![0; program.instrs.len()],
        }
    }

    fn guard_passes(&self, m: &Machine, instr: &SimInstr) -> bool {
        match &instr.guard {
            None => true,
            Some((reg, cmp, threshold)) => cmp.eval(m.reg(reg), *threshold),
        }
    }

    fn apply_noise(&self, m: &mut Machine, instr: &SimInstr) {
        if instr.physical && self.noise.p_depol > 0.0 {
            for &q in &instr.involved {
                m.rho.depolarize(q, self.noise.p_depol);
            }
        }
        if let Some(t) = self.noise.t_coh {
            if instr.duration > 0.0 {
                let lambda = 1.0 - (-instr.duration / t).exp();
                for q in 0..self.program.n_qubits {
                    if !instr.involved.contains(&q) {
                        m.rho.mix_toward_maximal(q, lambda);
                    }
                }
            }
        }
    }

    fn check_state(&self, m: &Machine, pc: usize) -> Result<(), SimError> {
        if !self.check_physicality {
            return Ok(());
        }
        let tr = m.rho.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(SimError::Physicality(pc, format!("trace {tr}")));
        }
        let cm = m.rho.to_cmat();
        if !cm.is_hermitian(1e-9) {
            return Err(SimError::Physicality(pc, "not Hermitian".into()));
        }
        if !linalg::is_positive_semidefinite(&cm, 1e-9) {
            return Err(SimError::Physicality(pc, "negative eigenvalue".into()));
        }
        Ok(())
    }

    /// Execute one instruction up to (but excluding) measurement resolution.
    fn pre_step(&mut self, m: &mut Machine, pc: usize) -> Result<StepOutcome, SimError> {
        let instr = &self.program.instrs[pc];
        if !self.guard_passes(m, instr) {
            return Ok(StepOutcome::Continue);
        }
        self.counts[pc] += 1;
        m.executed += 1;
        if m.executed > INSTRUCTION_BUDGET {
            return Err(SimError::InfiniteLoop);
        }
        match &instr.step {
            Step::Rot { q, axis, theta } => {
                m.rho.apply_1q(*q, &rotation_matrix(*axis, *theta));
            }
            Step::CondRot { e, c, axis, theta } => {
                m.rho
                    .apply_controlled(*e, *c, &rotation_matrix(*axis, *theta));
            }
            Step::InitE { q } => m.rho.reset(*q),
            Step::Entangle { a, b } => m.rho.bell_reset(*a, *b),
            Step::Diag | Step::Nop => {}
            Step::Ldi { value, register } => {
                m.registers.insert(register.clone(), *value);
            }
            Step::St { register } => {
                let v = m.reg(register);
                let v8 = if v >= 0 { 1i8 } else { -1i8 };
                m.stored.push((register.clone(), v8));
            }
            Step::Addi { register, value } => {
                let v = m
                    .reg(register)
                    .checked_add(*value)
                    .ok_or_else(|| SimError::RegisterOverflow(register.clone()))?;
                m.registers.insert(register.clone(), v);
            }
            Step::Br {
                register,
                cmp,
                rhs,
                target,
            } => {
                let rhs_v = match rhs {
                    BrRhs::Imm(v) => *v,
                    BrRhs::Reg(r) => m.reg(r),
                };
                if cmp.eval(m.reg(register), rhs_v) {
                    return Ok(StepOutcome::Jump(*target));
                }
            }
            Step::Meas { q, register } => {
                let p0 = m.rho.prob_zero(*q).clamp(0.0, 1.0);
                return Ok(StepOutcome::Measure(*q, register.clone(), p0));
            }
        }
        self.apply_noise(m, instr);
        self.check_state(m, pc)?;
        Ok(StepOutcome::Continue)
    }

    /// Collapse a pending measurement to the chosen outcome.
    fn resolve_measurement(
        &mut self,
        m: &mut Machine,
        pc: usize,
        q: usize,
        register: &str,
        zero: bool,
    ) -> Result<(), SimError> {
        m.rho.project(q, zero);
        let value: i8 = if zero { 1 } else { -1 };
        m.registers.insert(register.to_string(), i64::from(value));
        m.outcomes.push((register.to_string(), value));
        let instr = &self.program.instrs[pc];
        self.apply_noise(m, instr);
        self.check_state(m, pc)?;
        Ok(())
    }
}

fn result_shell(
    program: &Program,
    noise: NoiseParams,
    durations: &DurationTable,
    opts: &RunOptions,
) -> RunResult {
    RunResult {
        version: 1,
        seed: opts.seed,
        shots: opts.shots,
        exact: opts.exact,
        noise,
        durations: *durations,
        duration_table_hash: durations.hash(),
        topology: program.meta.topology,
        compiler_version: env!("CARGO_PKG_VERSION").to_string(),
        noise_exemptions: vec!["diagnostics".into(), "frame_updates".into()],
        expectations: BTreeMap::new(),
        logical_expectation: None,
        shot_records: Vec::new(),
        shot_outcomes: Vec::new(),
        paths: Vec::new(),
        instruction_counts: Vec::new(),
        final_density_matrix: None,
    }
}

/// Sampled execution: `shots` independent runs with a shared seeded RNG.
pub fn run(
    program: &Program,
    noise: &NoiseParams,
    durations: &DurationTable,
    seed: u64,
    shots: u64,
) -> Result<RunResult, SimError> {
    run_with_options(
        program,
        noise,
        durations,
        &RunOptions {
            seed,
            shots,
            ..RunOptions::default()
        },
    )
}

pub fn run_with_options(
    program: &Program,
    noise: &NoiseParams,
    durations: &DurationTable,
    opts: &RunOptions,
) -> Result<RunResult, SimError> {
    noise.validate()?;
    let sim = build_sim_program(program, durations)?;
    let mut result = result_shell(program, *noise, durations, opts);
    if opts.exact {
        run_exact_inner(&sim, &program.registers, *noise, opts, &mut result)?;
    } else {
        run_sampled(&sim, &program.registers, *noise, opts, &mut result)?;
    }
    Ok(result)
}

/// Exact execution: enumerate all measurement branch paths with their
/// probabilities; expectations are the shots -> infinity limit of `run`.
pub fn run_exact(
    program: &Program,
    noise: &NoiseParams,
    durations: &DurationTable,
) -> Result<RunResult, SimError> {
    run_with_options(
        program,
        noise,
        durations,
        &RunOptions {
            exact: true,
            capture_final_state: true,
            ..RunOptions::default()
        },
    )
}

/// Exact execution of a native circuit at f64 angle precision (used by the
/// semantics-preservation checks, bypassing microradian quantization).
pub fn run_native_exact(
    native: &NativeCircuit,
    noise: &NoiseParams,
    durations: &DurationTable,
) -> Result<RunResult, SimError> {
    noise.validate()?;
    let sim = build_from_native(native, durations)?;
    let opts = RunOptions {
        exact: true,
        capture_final_state: true,
        ..RunOptions::default()
    };
    let program_meta = Program {
        meta: crate::codegen::ProgramMeta {
            topology: native.topology,
            num_qubits: native.num_qubits,
        },
        instructions: Vec::new(),
        registers: native.registers.clone(),
    };
    let mut result = result_shell(&program_meta, *noise, durations, &opts);
    run_exact_inner(&sim, &native.registers, *noise, &opts, &mut result)?;
    Ok(result)
}

fn run_sampled(
    sim: &SimProgram,
    registers: &[String],
    noise: NoiseParams,
    opts: &RunOptions,
    result: &mut RunResult,
) -> Result<(), SimError> {
    let mut engine = Engine::new(sim, noise, opts.check_physicality);
    let mut rng = StdRng::seed_from_u64(opts.seed);
    for _ in 0..opts.shots {
        let mut m = Machine::fresh(sim.n_qubits, registers);
        while m.pc < sim.instrs.len() {
            let pc = m.pc;
            match engine.pre_step(&mut m, pc)? {
                StepOutcome::Continue => m.pc += 1,
                StepOutcome::Jump(target) => m.pc = target,
                StepOutcome::Measure(q, register, p0) => {
                    let zero = if p0 < 1e-12 {
                        false
                    } else if p0 > 1.0 - 1e-12 {
                        true
                    } else {
                        rng.gen::<f64>() < p0
                    };
                    engine.resolve_measurement(&mut m, pc, q, &register, zero)?;
                    m.pc += 1;
                }
            }
        }
        result.shot_records.push(m.stored);
        result.shot_outcomes.push(m.outcomes);
    }
    result.instruction_counts = engine.counts;
    // Aggregate.
    let mut sums: BTreeMap<String, (f64, u64)> = BTreeMap::new();
    let mut logical_sum = 0.0f64;
    let mut logical_n = 0u64;
    for (shot, outcomes) in result.shot_records.iter().zip(result.shot_outcomes.iter()) {
        if !shot.is_empty() {
            let prod: i64 = shot.iter().map(|(_, v)| i64::from(*v)).product();
            logical_sum += prod as f64;
            logical_n += 1;
        }
        for (reg, v) in shot {
            let e = sums.entry(reg.clone()).or_insert((0.0, 0));
            e.0 += f64::from(*v);
            e.1 += 1;
        }
        for (reg, v) in outcomes {
            if !shot.iter().any(|(r, _)| r == reg) {
                let e = sums.entry(reg.clone()).or_insert((0.0, 0));
                e.0 += f64::from(*v);
                e.1 += 1;
            }
        }
    }
    result.expectations = sums
        .into_iter()
        .map(|(r, (s, n))| (r, s / n as f64))
        .collect();
    result.logical_expectation = if logical_n > 0 {
        Some(logical_sum / logical_n as f64)
    } else {
        None
    };
    Ok(())
}

fn run_exact_inner(
    sim: &SimProgram,
    registers: &[String],
    noise: NoiseParams,
    opts: &RunOptions,
    result: &mut RunResult,
) -> Result<(), SimError> {
    let mut engine = Engine::new(sim, noise, opts.check_physicality);
    let mut paths: Vec<PathResult> = Vec::new();
    let mut final_state: Option<linalg::CMat> = None;
    // Work stack of (machine, accumulated probability).
    let mut stack = vec![(Machine::fresh(sim.n_qubits, registers), 1.0f64)];
    while let Some((mut m, mut prob)) = stack.pop() {
        loop {
            if m.pc >= sim.instrs.len() {
                if opts.capture_final_state {
                    let weighted = m
                        .rho
                        .to_cmat()
                        .scale(num_complex::Complex64::new(prob, 0.0));
                    final_state = Some(match final_state.take() {
                        Some(acc) => acc.add(&weighted),
                        None => weighted,
                    });
                }
                paths.push(PathResult {
                    probability: prob,
                    outcomes: m.outcomes.clone(),
                    registers: m.registers.clone(),
                    stored: m.stored.clone(),
                });
                break;
            }
            let pc = m.pc;
            match engine.pre_step(&mut m, pc)? {
                StepOutcome::Continue => m.pc += 1,
                StepOutcome::Jump(target) => m.pc = target,
                StepOutcome::Measure(q, register, p0) => {
                    if m.outcomes.len() >= MAX_EXACT_MEASUREMENTS {
                        return Err(SimError::BranchExplosion(MAX_EXACT_MEASUREMENTS));
                    }
                    let p1 = (1.0 - p0).clamp(0.0, 1.0);
                    // Fork the minus branch if it has weight.
                    if p1 > 1e-15 && p0 > 1e-15 {
                        let mut fork = Machine {
                            rho: m.rho.clone(),
                            registers: m.registers.clone(),
                            stored: m.stored.clone(),
                            outcomes: m.outcomes.clone(),
                            pc: m.pc,
                            executed: m.executed,
                        };
                        engine.resolve_measurement(&mut fork, pc, q, &register, false)?;
                        fork.pc += 1;
                        stack.push((fork, prob * p1));
                        engine.resolve_measurement(&mut m, pc, q, &register, true)?;
                        prob *= p0;
                        m.pc += 1;
                    } else {
                        let zero = p0 >= p1;
                        engine.resolve_measurement(&mut m, pc, q, &register, zero)?;
                        prob *= if zero { p0 } else { p1 };
                        m.pc += 1;
                    }
                }
            }
        }
    }
    // Deterministic path order independent of stack traversal.
    paths.sort_by(|a, b| a.outcomes.cmp(&b.outcomes));
    result.instruction_counts = engine.counts;
    let mut sums: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    let mut logical_sum = 0.0f64;
    let mut logical_w = 0.0f64;
    for p in &paths {
        if !p.stored.is_empty() {
            let prod: i64 = p.stored.iter().map(|(_, v)| i64::from(*v)).product();
            logical_sum += p.probability * prod as f64;
            logical_w += p.probability;
        }
        for (reg, v) in &p.stored {
            let e = sums.entry(reg.clone()).or_insert((0.0, 0.0));
            e.0 += p.probability * f64::from(*v);
            e.1 += p.probability;
        }
        // Registers written by measurements contribute even without ST.
        for (reg, v) in &p.outcomes {
            if !p.stored.iter().any(|(r, _)| r == reg) {
                let e = sums.entry(reg.clone()).or_insert((0.0, 0.0));
                e.0 += p.probability * f64::from(*v);
                e.1 += p.probability;
            }
        }
    }
    result.expectations = sums
        .into_iter()
        .filter(|(_, (_, w))| *w > 0.0)
        .map(|(r, (s, w))| (r, s / w))
        .collect();
    result.logical_expectation = if logical_w > 1e-12 {
        Some(logical_sum / logical_w)
    } else {
        None
    };
    result.final_density_matrix = final_state.map(|m| SerializedState::from_cmat(&m));
    result.paths = paths;
    Ok(())
}

/// Exact expectation of the product of measurement outcomes written to the
/// given registers (weighted over paths).
pub fn product_expectation(result: &RunResult, registers: &[String]) -> Option<f64> {
    if result.paths.is_empty() {
        // Sampled mode: average over shots.
        if result.shot_records.is_empty() {
            return None;
        }
        let mut sum = 0.0;
        let mut n = 0u64;
        for shot in &result.shot_records {
            let mut prod = 1i64;
            let mut found = 0;
            for (reg, v) in shot {
                if registers.contains(reg) {
                    prod *= i64::from(*v);
                    found += 1;
                }
            }
            if found == registers.len() {
                sum += prod as f64;
                n += 1;
            }
        }
        return if n > 0 { Some(sum / n as f64) } else { None };
    }
    let mut sum = 0.0;
    let mut w = 0.0;
    for p in &result.paths {
        let mut prod = 1i64;
        let mut found = 0;
        for reg in registers {
            if let Some((_, v)) = p.outcomes.iter().rev().find(|(r, _)| r == reg) {
                prod *= i64::from(*v);
                found += 1;
            }
        }
        if found == registers.len() {
            sum += p.probability * prod as f64;
            w += p.probability;
        }
    }
    if w > 1e-12 {
        Some(sum / w)
    } else {
        None
    }
}
