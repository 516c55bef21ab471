//! Fixed-step token scheduler.
//!
//! Every activated node emits one token per outgoing arc; the token carries a
//! snapshot of the emitter's value and travels for the arc's delay. Arrivals
//! re-activate the target, which folds all tokens arriving in the same step
//! into a single threshold update `Ã = f(A + Σ wᵢ·vᵢ)`. The loop:
//!
//! * step 0 — the initial active set (all nodes by default) emits; the trace
//!   records the raw initial values, untouched by the threshold;
//! * each later step — due tokens arrive, each freshly activated node updates
//!   once, the trace records the post-update values, and the just-activated
//!   nodes emit their own tokens before deactivating.
//!
//! A token emitted by an activation at step `k` therefore arrives at step
//! `k + delay/t`. Tokens reaching a node with no outgoing arcs are absorbed
//! after the update. The run always covers the full horizon; steady-state
//! policy lives in [`crate::analysis`].
//!
//! Tokens are scheduled into per-step arrival buckets rather than having
//! their remaining delay decremented each step; arrival times and payloads
//! are identical, and per-step cost stays proportional to traffic.

use thiserror::Error;

use crate::model::{validate_model, NodeId, RiskModel, ValidationIssue};

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("model failed validation: {}", issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidModel { issues: Vec<ValidationIssue> },
    #[error("model has {nodes} nodes but {values} initial values were given")]
    ValueCountMismatch { nodes: usize, values: usize },
    #[error("initial value for node {node} is not finite")]
    NonFiniteInitial { node: NodeId },
    #[error("threshold input is not finite")]
    NonFiniteInput,
    #[error("simulation step must be positive")]
    ZeroStep,
    #[error("horizon {horizon_min} min is shorter than one step ({step_min} min)")]
    HorizonTooShort { horizon_min: u32, step_min: u32 },
    #[error("horizon {horizon_min} min is not a multiple of the {step_min} min step")]
    HorizonNotMultipleOfStep { horizon_min: u32, step_min: u32 },
    #[error("initial activation names unknown node {0}")]
    UnknownSeed(NodeId),
}

/// Bounding function applied at every node update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdKind {
    /// `1 / (1 + e^{-x})` — the standard choice.
    #[default]
    Sigmoid,
    /// `(1 + tanh x) / 2`, a steeper map onto the unit interval.
    TanhUnit,
    /// `min(1, max(0, x))`.
    Clamp,
}

impl ThresholdKind {
    /// Applies the threshold, rejecting non-finite input.
    pub fn apply(self, x: f64) -> Result<f64, EngineError> {
        if !x.is_finite() {
            return Err(EngineError::NonFiniteInput);
        }
        Ok(self.eval(x))
    }

    /// Infallible core; callers guarantee a finite argument.
    pub(crate) fn eval(self, x: f64) -> f64 {
        match self {
            Self::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            Self::TanhUnit => 0.5 * (1.0 + x.tanh()),
            Self::Clamp => x.clamp(0.0, 1.0),
        }
    }
}

/// Step size, horizon, and threshold selection for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub step_min: u32,
    pub horizon_min: u32,
    pub threshold: ThresholdKind,
}

impl SimulationConfig {
    pub fn new(step_min: u32, horizon_min: u32) -> Self {
        Self {
            step_min,
            horizon_min,
            threshold: ThresholdKind::default(),
        }
    }

    pub fn with_threshold(mut self, threshold: ThresholdKind) -> Self {
        self.threshold = threshold;
        self
    }

    pub(crate) fn validate(&self) -> Result<usize, EngineError> {
        if self.step_min == 0 {
            return Err(EngineError::ZeroStep);
        }
        if self.horizon_min < self.step_min {
            return Err(EngineError::HorizonTooShort {
                horizon_min: self.horizon_min,
                step_min: self.step_min,
            });
        }
        if !self.horizon_min.is_multiple_of(self.step_min) {
            return Err(EngineError::HorizonNotMultipleOfStep {
                horizon_min: self.horizon_min,
                step_min: self.step_min,
            });
        }
        Ok((self.horizon_min / self.step_min) as usize)
    }
}

/// Mobile activation record travelling along one arc.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub token_id: u64,
    /// Node that emitted the token.
    pub source: NodeId,
    /// Snapshot of the source's value at emission; never updated in flight.
    pub value: f64,
    /// Weight of the arc being traversed.
    pub weight: f64,
    /// Minutes until arrival; exactly 0 when delivered.
    pub remaining_min: u32,
}

/// Time-indexed record of a run: one row of node values per step, plus the
/// per-step activation sets.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub step_min: u32,
    pub node_ids: Vec<NodeId>,
    pub node_names: Vec<String>,
    /// `rows[k][j]` — value of node `j` at minute `k · step_min`. Row 0 holds
    /// the raw initial values (no threshold applied).
    pub rows: Vec<Vec<f64>>,
    /// `activations[k]` — ids of nodes activated during step `k`, sorted.
    /// Entry 0 is the initial active set.
    pub activations: Vec<Vec<NodeId>>,
}

impl SimulationTrace {
    /// Minute stamp of row `k`.
    pub fn time_min(&self, row: usize) -> u32 {
        row as u32 * self.step_min
    }

    pub fn final_row(&self) -> &[f64] {
        self.rows.last().expect("a trace always has a time-0 row")
    }
}

/// One node update: `threshold(current + Σ weight·value)` over all tokens
/// arriving this step.
///
/// Panics if `arrivals` is empty — a node without arrivals is not activated,
/// so calling this for it is a scheduler bug.
pub fn activate_update(
    current: f64,
    arrivals: &[Token],
    threshold: ThresholdKind,
) -> Result<f64, EngineError> {
    assert!(
        !arrivals.is_empty(),
        "activate_update called without any arrived tokens"
    );
    let mut sum = current;
    for token in arrivals {
        sum += token.weight * token.value;
    }
    threshold.apply(sum)
}

/// Runs the token loop with every node activated at step 0.
pub fn simulate(
    model: &RiskModel,
    initial: &[f64],
    config: &SimulationConfig,
) -> Result<SimulationTrace, EngineError> {
    let all: Vec<NodeId> = model.node_ids();
    simulate_with_initial_activation(model, initial, &all, config)
}

/// Runs the token loop with a caller-chosen initial active set.
///
/// The default entry point activates everything at step 0; restricting the
/// seed set reproduces single-wave walkthroughs and lets partial activation
/// studies reuse the same scheduler. Nodes outside the seed set still hold
/// their initial values and participate normally once a token reaches them.
pub fn simulate_with_initial_activation(
    model: &RiskModel,
    initial: &[f64],
    seeds: &[NodeId],
    config: &SimulationConfig,
) -> Result<SimulationTrace, EngineError> {
    let steps = config.validate()?;
    let issues = validate_model(model, config.step_min);
    if !issues.is_empty() {
        return Err(EngineError::InvalidModel { issues });
    }
    let n = model.nodes.len();
    if initial.len() != n {
        return Err(EngineError::ValueCountMismatch {
            nodes: n,
            values: initial.len(),
        });
    }
    for (node, &value) in model.nodes.iter().zip(initial) {
        if !value.is_finite() {
            return Err(EngineError::NonFiniteInitial { node: node.id });
        }
    }

    // Outgoing arcs per node index, as (target index, weight, delay steps),
    // sorted by target id for deterministic token numbering.
    let mut outgoing: Vec<Vec<(usize, f64, usize)>> = vec![Vec::new(); n];
    for arc in &model.arcs {
        let source = model.index_of(arc.source).expect("validated endpoint");
        let target = model.index_of(arc.target).expect("validated endpoint");
        outgoing[source].push((target, arc.weight, (arc.delay_min / config.step_min) as usize));
    }
    for (index, list) in outgoing.iter_mut().enumerate() {
        let _ = index;
        list.sort_by_key(|&(target, _, _)| model.nodes[target].id);
    }

    let mut active: Vec<usize> = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let index = model
            .index_of(*seed)
            .ok_or(EngineError::UnknownSeed(*seed))?;
        if !active.contains(&index) {
            active.push(index);
        }
    }
    active.sort_unstable();

    let mut values = initial.to_vec();
    let mut rows = Vec::with_capacity(steps + 1);
    rows.push(values.clone());
    let mut activations = Vec::with_capacity(steps + 1);
    activations.push(sorted_ids(model, &active));

    // arrival step -> deliveries of (target index, token)
    let mut buckets: Vec<Vec<(usize, Token)>> = vec![Vec::new(); steps + 1];
    let mut next_token_id: u64 = 0;
    let mut emit = |step: usize,
                    active: &[usize],
                    values: &[f64],
                    buckets: &mut Vec<Vec<(usize, Token)>>| {
        for &source in active {
            for &(target, weight, delay_steps) in &outgoing[source] {
                let token_id = next_token_id;
                next_token_id += 1;
                let arrival = step + delay_steps;
                if arrival <= steps {
                    buckets[arrival].push((
                        target,
                        Token {
                            token_id,
                            source: model.nodes[source].id,
                            value: values[source],
                            weight,
                            remaining_min: delay_steps as u32 * config.step_min,
                        },
                    ));
                }
            }
        }
    };

    emit(0, &active, &values, &mut buckets);

    let mut arrivals: Vec<Vec<Token>> = vec![Vec::new(); n];
    for step in 1..=steps {
        for (target, mut token) in buckets[step].drain(..) {
            token.remaining_min = 0;
            arrivals[target].push(token);
        }
        active = (0..n).filter(|&i| !arrivals[i].is_empty()).collect();
        for &i in &active {
            arrivals[i].sort_by(|a, b| a.source.cmp(&b.source).then(a.token_id.cmp(&b.token_id)));
            values[i] = activate_update(values[i], &arrivals[i], config.threshold)?;
            arrivals[i].clear();
        }
        rows.push(values.clone());
        activations.push(sorted_ids(model, &active));
        emit(step, &active, &values, &mut buckets);
    }

    Ok(SimulationTrace {
        step_min: config.step_min,
        node_ids: model.node_ids(),
        node_names: model.nodes.iter().map(|n| n.name.clone()).collect(),
        rows,
        activations,
    })
}

fn sorted_ids(model: &RiskModel, indices: &[usize]) -> Vec<NodeId> {
    let mut ids: Vec<NodeId> = indices.iter().map(|&i| model.nodes[i].id).collect();
    ids.sort_unstable();
    ids
}
