//! System diagnostics insertion: Larmor/Rabi calibrations and the charge
//! resonance check. Calibrations are ordering-constrained (the electron
//! frequency tests gate everything else); the CRC destroys all stored qubit
//! state, so it runs only before and after the algorithm body, never inside.

use super::lower::CompileError;
use crate::native::{DiagnosticKind, NativeCircuit, NativeInstr, NativeOp};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosticsConfig {
    pub enabled: bool,
    pub include: BTreeSet<DiagnosticKind>,
}

impl DiagnosticsConfig {
    pub fn disabled() -> Self {
        DiagnosticsConfig {
            enabled: false,
            include: BTreeSet::new(),
        }
    }

    pub fn full() -> Self {
        DiagnosticsConfig {
            enabled: true,
            include: [
                DiagnosticKind::LarmorElectron,
                DiagnosticKind::RabiCheckElectron,
                DiagnosticKind::LarmorCarbon,
                DiagnosticKind::RabiCheckCarbon,
                DiagnosticKind::Crc,
            ]
            .into_iter()
            .collect(),
        }
    }

    fn check_dependencies(&self) -> Result<(), CompileError> {
        use DiagnosticKind::*;
        let has = |k: DiagnosticKind| self.include.contains(&k);
        if has(RabiCheckElectron) && !has(LarmorElectron) {
            return Err(CompileError::Diagnostics(
                "RabiCheckElectron requires LarmorElectron (the frequency must be known to rotate the electron)".into(),
            ));
        }
        if (has(LarmorCarbon) || has(RabiCheckCarbon))
            && !(has(LarmorElectron) && has(RabiCheckElectron))
        {
            return Err(CompileError::Diagnostics(
                "carbon diagnostics depend on the electron diagnostics".into(),
            ));
        }
        if has(RabiCheckCarbon) && !has(LarmorCarbon) {
            return Err(CompileError::Diagnostics(
                "RabiCheckCarbon requires LarmorCarbon".into(),
            ));
        }
        Ok(())
    }
}

/// Prepend the configured calibration sequence (in the canonical order) and
/// bracket the body with CRCs, per node.
pub fn insert_diagnostics(
    circuit: &NativeCircuit,
    config: &DiagnosticsConfig,
) -> Result<NativeCircuit, CompileError> {
    if !config.enabled || config.include.is_empty() {
        return Ok(circuit.clone());
    }
    config.check_dependencies()?;
    let topo = circuit.topology;
    let mut out = NativeCircuit::new(topo, circuit.num_qubits);
    out.registers = circuit.registers.clone();
    use DiagnosticKind::*;
    for node in 0..topo.num_nodes {
        let e = topo.electron_of(node).unwrap();
        let carbon = topo.carbons_of(node).unwrap().first().copied();
        for kind in [
            LarmorElectron,
            RabiCheckElectron,
            LarmorCarbon,
            RabiCheckCarbon,
            Crc,
        ] {
            if !config.include.contains(&kind) {
                continue;
            }
            let qubit = match kind {
                LarmorCarbon | RabiCheckCarbon => match carbon {
                    Some(c) => c,
                    None => continue, // node without carbons
                },
                _ => e,
            };
            out.push(NativeOp::Diagnostic { kind, qubit });
        }
    }
    for instr in &circuit.instrs {
        out.instrs.push(NativeInstr::conditioned(
            instr.op.clone(),
            instr.condition.clone(),
        ));
    }
    if config.include.contains(&Crc) {
        for node in 0..topo.num_nodes {
            let e = topo.electron_of(node).unwrap();
            out.push(NativeOp::Diagnostic {
                kind: Crc,
                qubit: e,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::topology::{QubitId, TopologyConfig};

    fn body() -> NativeCircuit {
        let topo = TopologyConfig::new(1, 3).unwrap();
        let mut c = NativeCircuit::new(topo, 3);
        c.push(NativeOp::RotE {
            e: QubitId(0),
            axis: crate::native::Axis::X,
            theta: 0.5,
        });
        c.push(NativeOp::CarbonUnitary {
            c: QubitId(1),
            gate: GateKind::X,
        });
        c
    }

    fn kinds(c: &NativeCircuit) -> Vec<Option<DiagnosticKind>> {
        c.instrs
            .iter()
            .map(|i| match i.op {
                NativeOp::Diagnostic { kind, .. } => Some(kind),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn full_set_brackets_body_in_canonical_order() {
        use DiagnosticKind::*;
        let out = insert_diagnostics(&body(), &DiagnosticsConfig::full()).unwrap();
        let ks = kinds(&out);
        assert_eq!(
            &ks[..5],
            &[
                Some(LarmorElectron),
                Some(RabiCheckElectron),
                Some(LarmorCarbon),
                Some(RabiCheckCarbon),
                Some(Crc)
            ]
        );
        assert_eq!(ks[ks.len() - 1], Some(Crc));
        // Exactly two CRCs, nothing between the body's first and last
        // instruction.
        let crc_count = ks.iter().filter(|k| **k == Some(Crc)).count();
        assert_eq!(crc_count, 2);
        assert!(ks[5..ks.len() - 1].iter().all(|k| k.is_none()));
    }

    #[test]
    fn disabled_leaves_body_unchanged() {
        let b = body();
        let out = insert_diagnostics(&b, &DiagnosticsConfig::disabled()).unwrap();
        assert_eq!(out.instrs, b.instrs);
    }

    #[test]
    fn carbon_only_request_is_a_dependency_error() {
        let cfg = DiagnosticsConfig {
            enabled: true,
            include: [DiagnosticKind::RabiCheckCarbon].into_iter().collect(),
        };
        let err = insert_diagnostics(&body(), &cfg).unwrap_err();
        assert!(err.to_string().contains("electron diagnostics"));
    }

    #[test]
    fn rabi_without_larmor_is_an_error() {
        let cfg = DiagnosticsConfig {
            enabled: true,
            include: [DiagnosticKind::RabiCheckElectron].into_iter().collect(),
        };
        assert!(insert_diagnostics(&body(), &cfg).is_err());
    }

    #[test]
    fn electron_subset_is_allowed() {
        use DiagnosticKind::*;
        let cfg = DiagnosticsConfig {
            enabled: true,
            include: [LarmorElectron, RabiCheckElectron].into_iter().collect(),
        };
        let out = insert_diagnostics(&body(), &cfg).unwrap();
        let ks = kinds(&out);
        assert_eq!(&ks[..2], &[Some(LarmorElectron), Some(RabiCheckElectron)]);
    }
}
