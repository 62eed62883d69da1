//! NV-center layout: every node hosts one electron (qubit 0 of the node) plus
//! carbon nuclear spins in a star around it. Qubits are numbered with a flat
//! global index, so a qubit's role and node follow from simple arithmetic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Global flat qubit index across all NV nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QubitId(pub usize);

impl QubitId {
    pub fn index(&self) -> usize {
        self.0
    }
}

impl std::fmt::Display for QubitId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "q{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QubitRole {
    Electron,
    Carbon,
}

/// Node count and (uniform) qubits per node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyConfig {
    pub num_nodes: usize,
    pub qubits_per_node: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("qubit q{0} is outside the topology ({1} qubits total)")]
    QubitOutOfRange(usize, usize),
    #[error("node {0} is outside the topology ({1} nodes)")]
    NodeOutOfRange(usize, usize),
    #[error("invalid topology: num_nodes and qubits_per_node must be >= 1")]
    Degenerate,
}

impl TopologyConfig {
    pub fn new(num_nodes: usize, qubits_per_node: usize) -> Result<Self, TopologyError> {
        if num_nodes == 0 || qubits_per_node == 0 {
            return Err(TopologyError::Degenerate);
        }
        Ok(TopologyConfig {
            num_nodes,
            qubits_per_node,
        })
    }

    pub fn total_qubits(&self) -> usize {
        self.num_nodes * self.qubits_per_node
    }

    pub fn contains(&self, q: QubitId) -> bool {
        q.0 < self.total_qubits()
    }

    /// Electron iff the flat index is a multiple of the node size.
    pub fn qubit_role(&self, q: QubitId) -> Result<QubitRole, TopologyError> {
        if !self.contains(q) {
            return Err(TopologyError::QubitOutOfRange(q.0, self.total_qubits()));
        }
        if q.0.is_multiple_of(self.qubits_per_node) {
            Ok(QubitRole::Electron)
        } else {
            Ok(QubitRole::Carbon)
        }
    }

    pub fn is_electron(&self, q: QubitId) -> bool {
        self.qubit_role(q) == Ok(QubitRole::Electron)
    }

    pub fn is_carbon(&self, q: QubitId) -> bool {
        self.qubit_role(q) == Ok(QubitRole::Carbon)
    }

    pub fn node_of(&self, q: QubitId) -> Result<usize, TopologyError> {
        if !self.contains(q) {
            return Err(TopologyError::QubitOutOfRange(q.0, self.total_qubits()));
        }
        Ok(q.0 / self.qubits_per_node)
    }

    pub fn electron_of(&self, node: usize) -> Result<QubitId, TopologyError> {
        if node >= self.num_nodes {
            return Err(TopologyError::NodeOutOfRange(node, self.num_nodes));
        }
        Ok(QubitId(node * self.qubits_per_node))
    }

    /// Carbons of a node in ascending index order.
    pub fn carbons_of(&self, node: usize) -> Result<Vec<QubitId>, TopologyError> {
        let e = self.electron_of(node)?;
        Ok((1..self.qubits_per_node)
            .map(|k| QubitId(e.0 + k))
            .collect())
    }

    /// Parse the CLI/config form `nodes=N,per_node=M`.
    pub fn parse_flag(s: &str) -> Result<Self, String> {
        let mut nodes = None;
        let mut per_node = None;
        for part in s.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("bad topology component `{part}` (expected key=value)"))?;
            let v: usize = value
                .trim()
                .parse()
                .map_err(|_| format!("bad topology value `{value}`"))?;
            match key.trim() {
                "nodes" => nodes = Some(v),
                "per_node" => per_node = Some(v),
                other => return Err(format!("unknown topology key `{other}`")),
            }
        }
        let (n, m) = (
            nodes.ok_or("missing `nodes=` in topology")?,
            per_node.ok_or("missing `per_node=` in topology")?,
        );
        TopologyConfig::new(n, m).map_err(|e| e.to_string())
    }
}
