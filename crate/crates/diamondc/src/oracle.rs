//! Brute-force reference implementations used by tests: dense unitary
//! construction for native sequences, Choi-matrix channel equivalence with
//! discarded qubits, and exact outcome distributions for source circuits.
//!
//! Everything here is written independently of the compiler and simulator:
//! matrices are built by explicit embedding and multiplied densely, so a bug
//! in the production code paths cannot hide behind shared helpers.

use crate::circuit::{Circuit, GateKind};
use crate::linalg::{self, CMat, C64, ONE, ZERO};
use crate::native::{Axis, NativeInstr, NativeOp};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("sequence contains a non-unitary operation ({0})")]
    NonUnitary(String),
    #[error("sequence contains a conditioned instruction; unitary_of requires straight-line code")]
    Conditioned,
    #[error("qubit count {0} exceeds the oracle's brute-force cap of {1}")]
    TooManyQubits(usize, usize),
    #[error("resulting matrix is not unitary within tolerance")]
    NotUnitary,
    #[error("dimension mismatch")]
    DimensionMismatch,
}

const MAX_UNITARY_QUBITS: usize = 6;
const MAX_CHANNEL_QUBITS: usize = 5;

// ── Embedding helpers ────────────────────────────────────────────────────────

/// Embed a 2x2 matrix acting on qubit `q` (little-endian bit convention).
pub fn embed_1q(m: &CMat, q: usize, n: usize) -> CMat {
    assert_eq!(m.dim, 2);
    let dim = 1usize << n;
    let mask = !(1usize << q);
    let mut out = CMat::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            if i & mask == j & mask {
                out[(i, j)] = m[((i >> q) & 1, (j >> q) & 1)];
            }
        }
    }
    out
}

/// Embed a 4x4 matrix whose basis index is `first_bit * 2 + second_bit`.
pub fn embed_2q(m: &CMat, first: usize, second: usize, n: usize) -> CMat {
    assert_eq!(m.dim, 4);
    assert_ne!(first, second);
    let dim = 1usize << n;
    let mask = !((1usize << first) | (1usize << second));
    let mut out = CMat::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            if i & mask == j & mask {
                let bi = ((i >> first) & 1) * 2 + ((i >> second) & 1);
                let bj = ((j >> first) & 1) * 2 + ((j >> second) & 1);
                out[(i, j)] = m[(bi, bj)];
            }
        }
    }
    out
}

/// Controlled single-qubit unitary: applies `m` on `target` when `control`
/// reads `control_value`.
pub fn embed_controlled(
    m: &CMat,
    control: usize,
    control_value: u8,
    target: usize,
    n: usize,
) -> CMat {
    assert_eq!(m.dim, 2);
    let dim = 1usize << n;
    let mask = !(1usize << target);
    let mut out = CMat::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            if i & mask != j & mask {
                continue;
            }
            let ctrl = ((i >> control) & 1) as u8;
            if ctrl == control_value {
                out[(i, j)] = m[((i >> target) & 1, (j >> target) & 1)];
            } else if i == j {
                out[(i, j)] = ONE;
            }
        }
    }
    out
}

/// Dense unitary of a single native operation, or None for non-unitary ops.
pub fn native_op_unitary(op: &NativeOp, n: usize) -> Result<CMat, OracleError> {
    let axis_mat = |axis: Axis, theta: f64| linalg::rot_axis(axis.letter(), theta);
    match op {
        NativeOp::RotE { e, axis, theta } => Ok(embed_1q(&axis_mat(*axis, *theta), e.0, n)),
        NativeOp::RzE { e, theta } => Ok(embed_1q(&linalg::rot_z(*theta), e.0, n)),
        NativeOp::RzC { c, theta } => Ok(embed_1q(&linalg::rot_z(*theta), c.0, n)),
        NativeOp::CRot { e, c, axis, theta } | NativeOp::DirectRotC { e, c, axis, theta } => {
            Ok(embed_controlled(&axis_mat(*axis, *theta), e.0, 1, c.0, n))
        }
        NativeOp::CarbonUnitary { c, gate } => {
            let m = gate
                .matrix_1q()
                .ok_or_else(|| OracleError::NonUnitary(format!("{gate:?}")))?;
            Ok(embed_1q(&m, c.0, n))
        }
        NativeOp::Diagnostic { .. } => Ok(CMat::identity(1 << n)),
        other => Err(OracleError::NonUnitary(format!("{other:?}"))),
    }
}

/// Product of the gate matrices of a measurement-free native sequence,
/// in execution order. Fails on conditions, measurements, inits, entangles.
pub fn unitary_of(instrs: &[NativeInstr], n: usize) -> Result<CMat, OracleError> {
    if n > MAX_UNITARY_QUBITS {
        return Err(OracleError::TooManyQubits(n, MAX_UNITARY_QUBITS));
    }
    let mut u = CMat::identity(1 << n);
    for instr in instrs {
        if instr.condition.is_some() {
            return Err(OracleError::Conditioned);
        }
        let g = native_op_unitary(&instr.op, n)?;
        u = g.mul(&u);
    }
    if !u.is_unitary(1e-9) {
        return Err(OracleError::NotUnitary);
    }
    Ok(u)
}

// ── Channels and Choi matrices ───────────────────────────────────────────────

/// One step of a CPTP map, applied by linearity to arbitrary matrices so that
/// Choi matrices can be assembled from matrix units.
#[derive(Clone)]
pub enum ChannelStep {
    Unitary(CMat),
    /// Reset one qubit to |0>.
    Reset(usize),
    /// Discard both qubits and install a fresh |Phi+> Bell pair.
    BellReset(usize, usize),
    /// Copy the Z value of `src` onto ancilla `anc` (assumed |0>) and dephase,
    /// modeling "measure src and remember the outcome in anc".
    RecordZ {
        src: usize,
        anc: usize,
    },
}

pub fn apply_step(m: &CMat, step: &ChannelStep, n: usize) -> CMat {
    match step {
        ChannelStep::Unitary(u) => u.mul(m).mul(&u.adjoint()),
        ChannelStep::Reset(q) => {
            let k0 = CMat::from_rows(&[&[ONE, ZERO], &[ZERO, ZERO]]);
            let k1 = CMat::from_rows(&[&[ZERO, ONE], &[ZERO, ZERO]]);
            let k0f = embed_1q(&k0, *q, n);
            let k1f = embed_1q(&k1, *q, n);
            k0f.mul(m)
                .mul(&k0f.adjoint())
                .add(&k1f.mul(m).mul(&k1f.adjoint()))
        }
        ChannelStep::BellReset(q1, q2) => {
            // Kraus {|Phi+><ij|}: discard the pair, install the Bell state.
            let dim = 1usize << n;
            let mut out = CMat::zeros(dim);
            let pair_mask = (1usize << q1) | (1usize << q2);
            for i in 0..dim {
                for j in 0..dim {
                    if i & pair_mask != 0 || j & pair_mask != 0 {
                        continue;
                    }
                    // Accumulate Tr_pair over matching outer indices.
                    let mut acc = ZERO;
                    for b1 in 0..2usize {
                        for b2 in 0..2usize {
                            let add = (b1 << q1) | (b2 << q2);
                            acc += m[(i | add, j | add)];
                        }
                    }
                    if acc == ZERO {
                        continue;
                    }
                    // Place acc * |Phi+><Phi+| on the pair.
                    let half = C64::new(0.5, 0.0);
                    for &a in &[0usize, pair_mask] {
                        for &b in &[0usize, pair_mask] {
                            out[(i | a, j | b)] += acc * half;
                        }
                    }
                }
            }
            out
        }
        ChannelStep::RecordZ { src, anc } => {
            let cx = embed_controlled(&linalg::pauli_x(), *src, 1, *anc, n);
            let copied = cx.mul(m).mul(&cx.adjoint());
            let z = embed_1q(&linalg::pauli_z(), *anc, n);
            copied
                .add(&z.mul(&copied).mul(&z))
                .scale(C64::new(0.5, 0.0))
        }
    }
}

/// Translate a straight-line native sequence into channel steps.
/// Measurements are rejected; tests model readout with `RecordZ` explicitly.
pub fn native_channel_steps(
    instrs: &[NativeInstr],
    n: usize,
) -> Result<Vec<ChannelStep>, OracleError> {
    let mut steps = Vec::new();
    for instr in instrs {
        if instr.condition.is_some() {
            return Err(OracleError::Conditioned);
        }
        match &instr.op {
            NativeOp::InitE { e } => steps.push(ChannelStep::Reset(e.0)),
            NativeOp::Entangle { e1, e2 } => steps.push(ChannelStep::BellReset(e1.0, e2.0)),
            NativeOp::MeasE { .. } => {
                return Err(OracleError::NonUnitary("MeasE".into()));
            }
            op => steps.push(ChannelStep::Unitary(native_op_unitary(op, n)?)),
        }
    }
    Ok(steps)
}

/// Choi matrix of a channel on `n` qubits, with the qubits in `fixed` driven
/// by the given computational-basis inputs instead of being Choi inputs, and
/// the output qubits in `discard` traced out.
///
/// Index layout of the result: (kept output qubits) ⊗ (reference copies of
/// the free input qubits), reference in the low bits.
pub fn choi_matrix(
    steps: &[ChannelStep],
    n: usize,
    fixed: &[(usize, u8)],
    discard: &[usize],
) -> Result<CMat, OracleError> {
    if n > MAX_CHANNEL_QUBITS {
        return Err(OracleError::TooManyQubits(n, MAX_CHANNEL_QUBITS));
    }
    let fixed_qubits: Vec<usize> = fixed.iter().map(|(q, _)| *q).collect();
    let free: Vec<usize> = (0..n).filter(|q| !fixed_qubits.contains(q)).collect();
    let r = free.len();
    let rdim = 1usize << r;
    let keep: Vec<usize> = (0..n).filter(|q| !discard.contains(q)).collect();
    let kdim = 1usize << keep.len();
    let mut choi = CMat::zeros(kdim * rdim);
    let fixed_bits: usize = fixed.iter().map(|(q, b)| (usize::from(*b)) << *q).sum();
    let expand_free = |small: usize| -> usize {
        let mut full = 0usize;
        for (pos, q) in free.iter().enumerate() {
            if (small >> pos) & 1 == 1 {
                full |= 1 << q;
            }
        }
        full
    };
    for i in 0..rdim {
        for j in 0..rdim {
            // Input matrix unit |fixed,i><fixed,j|.
            let mut m = CMat::zeros(1 << n);
            m[(fixed_bits | expand_free(i), fixed_bits | expand_free(j))] = ONE;
            for step in steps {
                m = apply_step(&m, step, n);
            }
            let kept = m.partial_trace(n, &keep);
            for a in 0..kdim {
                for b in 0..kdim {
                    choi[(a * rdim + i, b * rdim + j)] += kept[(a, b)];
                }
            }
        }
    }
    Ok(choi)
}

/// Trace-norm distance between the (discard-reduced, fixed-input) Choi
/// matrices of two channels over the same qubit register.
pub fn channel_distance(
    steps_a: &[ChannelStep],
    steps_b: &[ChannelStep],
    n: usize,
    fixed: &[(usize, u8)],
    discard: &[usize],
) -> Result<f64, OracleError> {
    let ja = choi_matrix(steps_a, n, fixed, discard)?;
    let jb = choi_matrix(steps_b, n, fixed, discard)?;
    if ja.dim != jb.dim {
        return Err(OracleError::DimensionMismatch);
    }
    Ok(linalg::trace_norm_hermitian(&ja.sub(&jb)))
}

/// True iff the two channels agree within `tol` in trace norm after fixing
/// inputs and discarding outputs as requested.
pub fn channel_equivalence(
    steps_a: &[ChannelStep],
    steps_b: &[ChannelStep],
    n: usize,
    fixed: &[(usize, u8)],
    discard: &[usize],
    tol: f64,
) -> Result<bool, OracleError> {
    Ok(channel_distance(steps_a, steps_b, n, fixed, discard)? < tol)
}

// ── Source-level exact distributions ─────────────────────────────────────────

/// Exact outcome distribution of a source circuit, by full branch enumeration
/// on density matrices. Keys are the ordered measurement outcomes (+1/-1) of
/// every executed measurement instruction.
pub fn brute_force_distribution(circuit: &Circuit) -> Result<BTreeMap<Vec<i8>, f64>, OracleError> {
    if circuit.num_qubits > MAX_CHANNEL_QUBITS {
        return Err(OracleError::TooManyQubits(
            circuit.num_qubits,
            MAX_CHANNEL_QUBITS,
        ));
    }
    let n = circuit.num_qubits;
    let dim = 1usize << n;
    let mut rho0 = CMat::zeros(dim);
    rho0[(0, 0)] = ONE;
    let mut dist = BTreeMap::new();
    let registers: BTreeMap<String, i64> = circuit
        .classical_registers
        .iter()
        .map(|r| (r.clone(), 0))
        .collect();
    walk(circuit, 0, rho0, registers, Vec::new(), 1.0, &mut dist);
    Ok(dist)
}

fn walk(
    circuit: &Circuit,
    pc: usize,
    mut rho: CMat,
    mut registers: BTreeMap<String, i64>,
    outcomes: Vec<i8>,
    weight: f64,
    dist: &mut BTreeMap<Vec<i8>, f64>,
) {
    let n = circuit.num_qubits;
    for (idx, ins) in circuit.instructions.iter().enumerate().skip(pc) {
        if let Some(cond) = &ins.condition {
            let v = *registers.get(&cond.register).unwrap_or(&0);
            if !cond.cmp.eval(v, cond.threshold) {
                continue;
            }
        }
        match ins.kind {
            GateKind::Measure => {
                let q = ins.qubits[0].0;
                let (p0, rho0, rho1) = project_z(&rho, q, n);
                let p1 = 1.0 - p0;
                for (p, branch_rho, value) in [(p0, rho0, 1i8), (p1, rho1, -1i8)] {
                    if p < 1e-15 {
                        continue;
                    }
                    let mut regs = registers.clone();
                    if let Some(r) = &ins.register {
                        regs.insert(r.clone(), i64::from(value));
                    }
                    let mut outs = outcomes.clone();
                    outs.push(value);
                    walk(circuit, idx + 1, branch_rho, regs, outs, weight * p, dist);
                }
                return;
            }
            GateKind::Init => {
                rho = apply_step(&rho, &ChannelStep::Reset(ins.qubits[0].0), n);
            }
            _ => {
                let u = if ins.kind.num_qubits() == 1 {
                    embed_1q(&ins.kind.matrix_1q().unwrap(), ins.qubits[0].0, n)
                } else {
                    embed_2q(
                        &ins.kind.matrix_2q().unwrap(),
                        ins.qubits[0].0,
                        ins.qubits[1].0,
                        n,
                    )
                };
                rho = u.mul(&rho).mul(&u.adjoint());
            }
        }
        // registers only change at measurements; nothing to do here
        let _ = &mut registers;
    }
    *dist.entry(outcomes).or_insert(0.0) += weight;
}

/// Project a density matrix on qubit `q` in Z: returns (p0, normalized rho
/// given outcome |0>, normalized rho given outcome |1>).
fn project_z(rho: &CMat, q: usize, n: usize) -> (f64, CMat, CMat) {
    let dim = 1usize << n;
    let mut p0 = 0.0;
    for i in 0..dim {
        if (i >> q) & 1 == 0 {
            p0 += rho[(i, i)].re;
        }
    }
    let mut rho0 = CMat::zeros(dim);
    let mut rho1 = CMat::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let (bi, bj) = ((i >> q) & 1, (j >> q) & 1);
            if bi == 0 && bj == 0 {
                rho0[(i, j)] = rho[(i, j)];
            } else if bi == 1 && bj == 1 {
                rho1[(i, j)] = rho[(i, j)];
            }
        }
    }
    let p0c = p0.clamp(0.0, 1.0);
    let p1c = (1.0 - p0).clamp(0.0, 1.0);
    if p0c > 1e-15 {
        rho0 = rho0.scale(C64::new(1.0 / p0c, 0.0));
    }
    if p1c > 1e-15 {
        rho1 = rho1.scale(C64::new(1.0 / p1c, 0.0));
    }
    (p0c, rho0, rho1)
}

/// Total variation distance between two outcome distributions.
pub fn total_variation(a: &BTreeMap<Vec<i8>, f64>, b: &BTreeMap<Vec<i8>, f64>) -> f64 {
    let mut keys: Vec<&Vec<i8>> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|k| (a.get(*k).unwrap_or(&0.0) - b.get(*k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
        / 2.0
}
