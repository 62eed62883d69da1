//! Randomized circuit generation for property tests, the acceptance suite
//! and the examples. Circuits are always parser-valid: initializations only
//! as leading state preparation, conditions only on registers that an
//! earlier measurement can have written.

use crate::circuit::{Circuit, Cmp, Condition, GateKind, Instruction};
use crate::topology::QubitId;
use rand::rngs::StdRng;
use rand::Rng;

pub struct GenConfig {
    pub num_qubits: usize,
    pub max_gates: usize,
    pub max_measurements: usize,
    pub allow_conditions: bool,
    /// Restrict rotation angles to exact microradian multiples so circuits
    /// survive assembly round-trips bit-exactly.
    pub microradian_angles: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            num_qubits: 3,
            max_gates: 12,
            max_measurements: 3,
            allow_conditions: true,
            microradian_angles: false,
        }
    }
}

pub fn random_circuit(rng: &mut StdRng, cfg: &GenConfig) -> Circuit {
    let n = cfg.num_qubits;
    let registers: Vec<String> = (0..cfg.max_measurements.max(1))
        .map(|k| format!("r{k}"))
        .collect();
    let mut instructions = Vec::new();
    // Leading initializations on a random subset.
    for q in 0..n {
        if rng.gen_bool(0.3) {
            instructions.push(Instruction::gate(GateKind::Init, vec![QubitId(q)]));
        }
    }
    let mut measured = 0usize;
    let mut any_measurement = false;
    let len = rng.gen_range(1..=cfg.max_gates);
    for _ in 0..len {
        let q1 = QubitId(rng.gen_range(0..n));
        let angle = |rng: &mut StdRng| {
            if cfg.microradian_angles {
                rng.gen_range(-3_141_592i64..=3_141_592) as f64 / 1e6
            } else {
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)
            }
        };
        let choice = rng.gen_range(0..10);
        let mut ins = match choice {
            0..=4 => {
                let kind = match rng.gen_range(0..10) {
                    0 => GateKind::I,
                    1 => GateKind::X,
                    2 => GateKind::Y,
                    3 => GateKind::Z,
                    4 => GateKind::H,
                    5 => GateKind::S,
                    6 => GateKind::Sdg,
                    7 => GateKind::Rx(angle(rng)),
                    8 => GateKind::Ry(angle(rng)),
                    _ => GateKind::Rz(angle(rng)),
                };
                Instruction::gate(kind, vec![q1])
            }
            5..=7 if n > 1 => {
                let mut q2 = QubitId(rng.gen_range(0..n));
                while q2 == q1 {
                    q2 = QubitId(rng.gen_range(0..n));
                }
                let kind = match rng.gen_range(0..4) {
                    0 => GateKind::Cx,
                    1 => GateKind::Cz,
                    2 => GateKind::CRot(angle(rng)),
                    _ => GateKind::Swap,
                };
                Instruction::gate(kind, vec![q1, q2])
            }
            _ if measured < cfg.max_measurements => {
                measured += 1;
                any_measurement = true;
                Instruction {
                    kind: GateKind::Measure,
                    qubits: vec![q1],
                    register: Some(registers[measured - 1].clone()),
                    condition: None,
                }
            }
            _ => Instruction::gate(GateKind::H, vec![q1]),
        };
        // Occasionally condition a unitary gate on an earlier measurement.
        if cfg.allow_conditions
            && any_measurement
            && ins.kind.is_unitary_gate()
            && rng.gen_bool(0.2)
        {
            let reg = registers[rng.gen_range(0..measured)].clone();
            let cmp = match rng.gen_range(0..6) {
                0 => Cmp::Lt,
                1 => Cmp::Le,
                2 => Cmp::Eq,
                3 => Cmp::Ne,
                4 => Cmp::Ge,
                _ => Cmp::Gt,
            };
            ins.condition = Some(Condition {
                register: reg,
                cmp,
                threshold: *[-1i64, 0, 1].get(rng.gen_range(0..3)).unwrap(),
            });
        }
        instructions.push(ins);
    }
    Circuit {
        num_qubits: n,
        classical_registers: registers,
        instructions,
    }
}
