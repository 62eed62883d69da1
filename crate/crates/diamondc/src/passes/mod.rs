//! Hardware-aware compiler passes for diamond NV centers.
//!
//! Fixed pipeline order:
//! lower_to_native -> route_init_measure -> analyze_electron_liveness ->
//! select_carbon_control -> select_swaps -> insert_diagnostics.

pub mod blocks;
pub mod carbon_control;
pub mod diagnostics;
pub mod liveness;
pub mod lower;
pub mod route;
pub mod swaps;

pub use carbon_control::select_carbon_control;
pub use diagnostics::{insert_diagnostics, DiagnosticsConfig};
pub use liveness::{analyze_electron_liveness, LivenessInfo};
pub use lower::{lower_to_native, CompileError};
pub use route::route_init_measure;
pub use swaps::{detect_measurement_basis, select_swaps, swap_decisions, SwapKind};

use crate::circuit::Circuit;
use crate::native::NativeCircuit;
use crate::topology::TopologyConfig;

/// Which diamond-specific optimizations the pipeline may use.
///
/// Direct carbon control relies on the same classification machinery as the
/// partial swaps (a direct pulse may be justified by an upcoming partial-swap
/// re-initialization), so enabling it without partial swaps is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub partial_swaps: bool,
    pub direct_control: bool,
}

impl PipelineConfig {
    /// All diamond optimizations on (the default).
    pub fn optimized() -> Self {
        PipelineConfig {
            partial_swaps: true,
            direct_control: true,
        }
    }

    /// The general-compiler baseline: DDrf and full swaps everywhere.
    pub fn baseline() -> Self {
        PipelineConfig {
            partial_swaps: false,
            direct_control: false,
        }
    }

    /// Partial swaps allowed but carbon rotations always electron-preserving.
    pub fn ddrf_only() -> Self {
        PipelineConfig {
            partial_swaps: true,
            direct_control: false,
        }
    }

    pub fn new(partial_swaps: bool, direct_control: bool) -> Result<Self, CompileError> {
        if direct_control && !partial_swaps {
            return Err(CompileError::Diagnostics(
                "direct carbon control requires partial swaps to be enabled".into(),
            ));
        }
        Ok(PipelineConfig {
            partial_swaps,
            direct_control,
        })
    }
}

/// Run the full pass pipeline on a source circuit.
pub fn compile(
    circuit: &Circuit,
    topology: &TopologyConfig,
    config: &PipelineConfig,
    diag: &DiagnosticsConfig,
) -> Result<NativeCircuit, CompileError> {
    let lowered = lower::lower_to_native(circuit, topology)?;
    let routed = route::route_init_measure(&lowered);
    let live = liveness::analyze_with_config(&routed, config);
    let decisions = swaps::swap_decisions(&routed, &live, config);
    let controlled = carbon_control::select_carbon_control(&routed, &live, config, &decisions);
    let swapped = swaps::select_swaps(&controlled, &decisions)?;
    diagnostics::insert_diagnostics(&swapped, diag)
}
