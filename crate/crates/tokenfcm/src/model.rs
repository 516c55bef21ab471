//! The risk graph: design-risk nodes joined by weighted, delayed causal arcs.
//!
//! A [`RiskModel`] is plain data — it can hold structural mistakes so that
//! [`validate_model`] can report all of them at once. The simulation engine
//! refuses models whose validation report is non-empty.

use std::fmt;

use thiserror::Error;

/// Identifier of a risk node. Rendered as `DR<id>` everywhere the tool
/// labels nodes (reports, error messages).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DR{}", self.0)
    }
}

/// A design risk: one node of the cognitive map.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskNode {
    pub id: NodeId,
    pub name: String,
    /// Static risk index (RPN). May lie outside [0, 1]; the first threshold
    /// application during simulation pulls node values into range.
    pub initial_value: f64,
}

/// Directed causal influence between two risks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausalArc {
    pub source: NodeId,
    pub target: NodeId,
    /// Influence strength in [-1, 1].
    pub weight: f64,
    /// Propagation delay in minutes; must be a positive multiple of the
    /// simulation step.
    pub delay_min: u32,
}

/// Immutable-by-convention risk graph. Node order defines the column order
/// of simulation traces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RiskModel {
    pub nodes: Vec<RiskNode>,
    pub arcs: Vec<CausalArc>,
}

impl RiskModel {
    pub fn new(nodes: Vec<RiskNode>, arcs: Vec<CausalArc>) -> Self {
        Self { nodes, arcs }
    }

    /// Position of `id` in the node list (the trace column), if present.
    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn node_ids(&self) -> Vec<NodeId> {
        self.nodes.iter().map(|n| n.id).collect()
    }

    /// The stored per-node initial values, in node order.
    pub fn initial_values(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.initial_value).collect()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

/// One problem found by [`validate_model`].
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    DuplicateNodeId(NodeId),
    DanglingEndpoint { source: NodeId, target: NodeId, missing: NodeId },
    SelfLoop(NodeId),
    DuplicateArc { source: NodeId, target: NodeId },
    ZeroDelay { source: NodeId, target: NodeId },
    DelayNotMultipleOfStep { source: NodeId, target: NodeId, delay_min: u32, step_min: u32 },
    WeightOutOfRange { source: NodeId, target: NodeId, weight: f64 },
    NonFiniteInitialValue { node: NodeId, value: f64 },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DuplicateNodeId(id) => write!(f, "node id {id} appears more than once"),
            Self::DanglingEndpoint { source, target, missing } => {
                write!(f, "arc {source} -> {target} references unknown node {missing}")
            }
            Self::SelfLoop(id) => write!(f, "arc {id} -> {id} is a self-loop"),
            Self::DuplicateArc { source, target } => {
                write!(f, "arc {source} -> {target} appears more than once")
            }
            Self::ZeroDelay { source, target } => {
                write!(f, "arc {source} -> {target} has zero delay")
            }
            Self::DelayNotMultipleOfStep { source, target, delay_min, step_min } => write!(
                f,
                "arc {source} -> {target} delay {delay_min} min is not a multiple of the {step_min} min step"
            ),
            Self::WeightOutOfRange { source, target, weight } => {
                write!(f, "arc {source} -> {target} weight {weight} lies outside [-1, 1]")
            }
            Self::NonFiniteInitialValue { node, value } => {
                write!(f, "node {node} has non-finite initial value {value}")
            }
        }
    }
}

/// Checks a model against the structural rules and a simulation step.
///
/// An empty report means the model is simulatable with that step. `step_min`
/// must be positive (caller contract).
pub fn validate_model(model: &RiskModel, step_min: u32) -> Vec<ValidationIssue> {
    assert!(step_min > 0, "simulation step must be positive");
    let mut issues = Vec::new();

    for (i, node) in model.nodes.iter().enumerate() {
        if model.nodes[..i].iter().any(|n| n.id == node.id) {
            issues.push(ValidationIssue::DuplicateNodeId(node.id));
        }
        if !node.initial_value.is_finite() {
            issues.push(ValidationIssue::NonFiniteInitialValue {
                node: node.id,
                value: node.initial_value,
            });
        }
    }

    for (i, arc) in model.arcs.iter().enumerate() {
        for endpoint in [arc.source, arc.target] {
            if model.index_of(endpoint).is_none() {
                issues.push(ValidationIssue::DanglingEndpoint {
                    source: arc.source,
                    target: arc.target,
                    missing: endpoint,
                });
            }
        }
        if arc.source == arc.target {
            issues.push(ValidationIssue::SelfLoop(arc.source));
        }
        if model.arcs[..i]
            .iter()
            .any(|a| a.source == arc.source && a.target == arc.target)
        {
            issues.push(ValidationIssue::DuplicateArc {
                source: arc.source,
                target: arc.target,
            });
        }
        if arc.delay_min == 0 {
            issues.push(ValidationIssue::ZeroDelay {
                source: arc.source,
                target: arc.target,
            });
        } else if arc.delay_min % step_min != 0 {
            issues.push(ValidationIssue::DelayNotMultipleOfStep {
                source: arc.source,
                target: arc.target,
                delay_min: arc.delay_min,
                step_min,
            });
        }
        if !arc.weight.is_finite() || arc.weight.abs() > 1.0 {
            issues.push(ValidationIssue::WeightOutOfRange {
                source: arc.source,
                target: arc.target,
                weight: arc.weight,
            });
        }
    }

    issues
}

/// Arcs touching `node`, split into (incoming, outgoing); each side is
/// sorted by the id of the node at the far end.
pub fn adjacency(
    model: &RiskModel,
    node: NodeId,
) -> Result<(Vec<&CausalArc>, Vec<&CausalArc>), ModelError> {
    if model.index_of(node).is_none() {
        return Err(ModelError::UnknownNode(node));
    }
    let mut incoming: Vec<&CausalArc> = model.arcs.iter().filter(|a| a.target == node).collect();
    let mut outgoing: Vec<&CausalArc> = model.arcs.iter().filter(|a| a.source == node).collect();
    incoming.sort_by_key(|a| a.source);
    outgoing.sort_by_key(|a| a.target);
    Ok((incoming, outgoing))
}
