//! Electron liveness: decides, per electron and per instruction position,
//! whether the electron's incoming state may be sacrificed. A position is
//! flagged when any of four conditions holds:
//!
//!  1. no operations have touched that electron since the start,
//!  2. nothing has touched it since its last measurement,
//!  3. it is never touched again and is not currently holding live data
//!     (its last event was a measurement or an initialization, or there was
//!     no event at all),
//!  4. the next thing to happen to it is an initialization.
//!
//! Swap placeholders are classified by the shape of their eventual expansion:
//! a partial-swap readout begins with an electron re-initialization and ends
//! with the electron measurement, so it anchors conditions 2 and 4 for its
//! neighbors; a full-swap sandwich preserves the electron and therefore acts
//! as an ordinary operation. Which expansion a placeholder gets depends on
//! its own flag, so the table is computed to a fixpoint, downgrading
//! placeholders that resolve to full swaps until the classification is
//! self-consistent. Conditioned instructions are treated conservatively: an
//! operation under any branch counts as an operation and never anchors a
//! condition.

use super::PipelineConfig;
use crate::native::{NativeCircuit, NativeOp};
use crate::topology::QubitId;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LivenessEntry {
    pub irrelevant: bool,
    /// Which of the four conditions fired (1-based, ascending).
    pub conditions: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct LivenessInfo {
    /// `entries[pos][electron_index]`.
    pub entries: Vec<BTreeMap<usize, LivenessEntry>>,
}

impl LivenessInfo {
    pub fn electron_irrelevant(&self, pos: usize, e: QubitId) -> bool {
        self.entries
            .get(pos)
            .and_then(|m| m.get(&e.0))
            .map(|entry| entry.irrelevant)
            .unwrap_or(false)
    }

    pub fn justification(&self, pos: usize, e: QubitId) -> &[u8] {
        self.entries
            .get(pos)
            .and_then(|m| m.get(&e.0))
            .map(|entry| entry.conditions.as_slice())
            .unwrap_or(&[])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ev {
    None,
    Op,
    Meas,
    Init,
}

/// Liveness under the default (fully optimized) pipeline configuration.
pub fn analyze_electron_liveness(circuit: &NativeCircuit) -> LivenessInfo {
    analyze_with_config(circuit, &PipelineConfig::optimized())
}

pub fn analyze_with_config(circuit: &NativeCircuit, config: &PipelineConfig) -> LivenessInfo {
    let electrons: Vec<usize> = (0..circuit.topology.num_nodes)
        .map(|node| circuit.topology.electron_of(node).unwrap().0)
        .collect();
    // Optimism per instruction: true where a SwapMeasure may still expand to
    // the partial-swap readout. Starts enabled only if the config allows
    // partial swaps at all.
    let mut optimistic: Vec<bool> = circuit
        .instrs
        .iter()
        .map(|i| config.partial_swaps && matches!(i.op, NativeOp::SwapMeasure { .. }))
        .collect();
    loop {
        let table = compute_table(circuit, &electrons, &optimistic);
        let mut changed = false;
        for (i, instr) in circuit.instrs.iter().enumerate() {
            if let NativeOp::SwapMeasure { e, .. } = instr.op {
                if optimistic[i] && !table[i][&e.0].irrelevant {
                    optimistic[i] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return LivenessInfo { entries: table };
        }
    }
}

fn compute_table(
    circuit: &NativeCircuit,
    electrons: &[usize],
    optimistic: &[bool],
) -> Vec<BTreeMap<usize, LivenessEntry>> {
    let n = circuit.instrs.len();
    let mut table: Vec<BTreeMap<usize, LivenessEntry>> = vec![BTreeMap::new(); n];
    // Right-to-left so that forward scans can use already-resolved entries.
    for i in (0..n).rev() {
        for &e in electrons {
            let eq = QubitId(e);
            // Pair-aware exclusion window around position i.
            let (back_end, fwd_start) = match circuit.instrs[i].op {
                // A measure placeholder is paired with the MeasE after it.
                NativeOp::SwapMeasure { .. } => (i, i + 2),
                // An init placeholder is paired with the InitE before it.
                NativeOp::SwapInit { .. } => (i.saturating_sub(1), i + 1),
                _ => (i, i + 1),
            };
            let (any_back, last_back) = scan_back(circuit, back_end, eq, optimistic);
            let first_fwd = scan_fwd(circuit, fwd_start, eq, optimistic, &table);
            let cond1 = !any_back;
            let cond2 = last_back == Ev::Meas;
            let cond3 = first_fwd == Ev::None && (cond1 || cond2 || last_back == Ev::Init);
            let cond4 = first_fwd == Ev::Init;
            let mut conditions = Vec::new();
            for (idx, fired) in [cond1, cond2, cond3, cond4].iter().enumerate() {
                if *fired {
                    conditions.push(idx as u8 + 1);
                }
            }
            table[i].insert(
                e,
                LivenessEntry {
                    irrelevant: !conditions.is_empty(),
                    conditions,
                },
            );
        }
    }
    table
}

/// Classify what instruction `j` does to electron `e` as seen from a later
/// position scanning backwards.
fn back_event(circuit: &NativeCircuit, j: usize, e: QubitId, optimistic: &[bool]) -> Ev {
    let instr = &circuit.instrs[j];
    if !instr.op.touches_electron(e) {
        return Ev::None;
    }
    if instr.condition.is_some() {
        return Ev::Op;
    }
    match &instr.op {
        NativeOp::MeasE { .. } => {
            // A MeasE paired with a partial-swap placeholder is the last
            // electron event of the expansion; paired with a full-swap
            // sandwich it is followed by the restoring swap.
            if j > 0 {
                if let NativeOp::SwapMeasure { e: pe, .. } = &circuit.instrs[j - 1].op {
                    if *pe == e {
                        return if optimistic[j - 1] { Ev::Meas } else { Ev::Op };
                    }
                }
            }
            Ev::Meas
        }
        NativeOp::InitE { .. } => Ev::Init,
        _ => Ev::Op,
    }
}

fn scan_back(circuit: &NativeCircuit, end: usize, e: QubitId, optimistic: &[bool]) -> (bool, Ev) {
    for j in (0..end).rev() {
        let ev = back_event(circuit, j, e, optimistic);
        if ev != Ev::None {
            return (true, ev);
        }
    }
    (false, Ev::None)
}

/// First electron event at or after `from`, classified by its leading edge.
fn scan_fwd(
    circuit: &NativeCircuit,
    from: usize,
    e: QubitId,
    optimistic: &[bool],
    table: &[BTreeMap<usize, LivenessEntry>],
) -> Ev {
    for j in from..circuit.instrs.len() {
        let instr = &circuit.instrs[j];
        if !instr.op.touches_electron(e) {
            continue;
        }
        if instr.condition.is_some() {
            return Ev::Op;
        }
        return match &instr.op {
            NativeOp::InitE { .. } => Ev::Init,
            NativeOp::SwapMeasure { e: pe, .. } => {
                // A partial-swap readout re-initializes the electron before
                // using it; a full-swap sandwich reads it.
                if *pe == e
                    && optimistic[j]
                    && table[j].get(&e.0).map(|t| t.irrelevant) == Some(true)
                {
                    Ev::Init
                } else {
                    Ev::Op
                }
            }
            _ => Ev::Op,
        };
    }
    Ev::None
}
