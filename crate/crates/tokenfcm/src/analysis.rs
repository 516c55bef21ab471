//! Post-run interpretation: tail classification, dynamic risk priorities,
//! per-node impact studies, and the two baselines used for cross-checks
//! (synchronous map iteration and hazard indices from expert scores).

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{SimulationConfig, SimulationTrace};
use crate::model::{validate_model, NodeId, RiskModel, RiskNode, ValidationIssue};
use crate::EngineError;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("epsilon must be a positive finite number, got {epsilon}")]
    BadEpsilon { epsilon: f64 },
    #[error(
        "cycle search up to period {max_period} needs at least {} rows, trace has {rows}",
        2 * max_period
    )]
    TraceTooShort { max_period: usize, rows: usize },
    #[error("trace does not settle into a fixed point or cycle")]
    NotConverged,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("duplicate entry for node {0}")]
    DuplicateNode(NodeId),
    #[error("{what}: expected {expected} values, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Long-run behaviour of a trace tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SteadyState {
    /// Values repeat within tolerance from `onset_min` onward.
    Fixed { onset_min: u32 },
    /// Values repeat with the given period (in steps) from `onset_min` onward.
    Cycle { period: usize, onset_min: u32 },
    NotConverged,
}

/// Shared tail classifier: `close(a, b)` compares rows `a` and `b`.
///
/// Fixed points are preferred over cycles, and among cycles the smallest
/// period wins; a period-`p` certificate requires the final `2p` rows to
/// repeat, and the onset is pushed back as far as the pattern holds.
fn classify_tail(
    rows: usize,
    step_min: u32,
    max_period: usize,
    close: impl Fn(usize, usize) -> bool,
) -> Result<SteadyState, AnalysisError> {
    if rows == 0 {
        return Err(AnalysisError::TraceTooShort {
            max_period,
            rows: 0,
        });
    }
    if 2 * max_period > rows {
        return Err(AnalysisError::TraceTooShort { max_period, rows });
    }
    let time_of = |row: usize| row as u32 * step_min;

    let last = rows - 1;
    let mut start = last;
    while start > 0 && close(start - 1, last) {
        start -= 1;
    }
    if rows == 1 || start <= rows - 2 {
        return Ok(SteadyState::Fixed {
            onset_min: time_of(start),
        });
    }

    for period in 2..=max_period {
        let window = rows - 2 * period;
        if (window..rows - period).all(|k| close(k, k + period)) {
            let mut start = window;
            while start > 0 && close(start - 1, start - 1 + period) {
                start -= 1;
            }
            return Ok(SteadyState::Cycle {
                period,
                onset_min: time_of(start),
            });
        }
    }
    Ok(SteadyState::NotConverged)
}

fn check_epsilon(epsilon: f64) -> Result<(), AnalysisError> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(AnalysisError::BadEpsilon { epsilon })
    }
}

/// Classifies the whole trace: all nodes must repeat together.
pub fn detect_steady_state(
    trace: &SimulationTrace,
    epsilon: f64,
    max_period: usize,
) -> Result<SteadyState, AnalysisError> {
    check_epsilon(epsilon)?;
    let rows = &trace.rows;
    classify_tail(rows.len(), trace.step_min, max_period, |a, b| {
        rows[a]
            .iter()
            .zip(&rows[b])
            .all(|(x, y)| (x - y).abs() <= epsilon)
    })
}

/// Classifies a single node's history, ignoring the others.
pub fn column_steady_state(
    trace: &SimulationTrace,
    node: NodeId,
    epsilon: f64,
    max_period: usize,
) -> Result<SteadyState, AnalysisError> {
    check_epsilon(epsilon)?;
    let column = trace
        .node_ids
        .iter()
        .position(|id| *id == node)
        .ok_or(AnalysisError::UnknownNode(node))?;
    let rows = &trace.rows;
    classify_tail(rows.len(), trace.step_min, max_period, |a, b| {
        (rows[a][column] - rows[b][column]).abs() <= epsilon
    })
}

/// Dynamic risk priority numbers: the settled value per node.
///
/// A fixed point reports the final row; a limit cycle reports the mean over
/// one period of the tail; a non-convergent trace has no meaningful summary
/// and is an error.
pub fn compute_drpn(
    trace: &SimulationTrace,
    epsilon: f64,
    max_period: usize,
) -> Result<Vec<f64>, AnalysisError> {
    match detect_steady_state(trace, epsilon, max_period)? {
        SteadyState::Fixed { .. } => Ok(trace.final_row().to_vec()),
        SteadyState::Cycle { period, .. } => {
            let n = trace.node_ids.len();
            let tail = &trace.rows[trace.rows.len() - period..];
            Ok((0..n)
                .map(|j| tail.iter().map(|row| row[j]).sum::<f64>() / period as f64)
                .collect())
        }
        SteadyState::NotConverged => Err(AnalysisError::NotConverged),
    }
}

/// Runs the map with only `focus` holding its risk value (all other nodes
/// start at zero) and returns the settled vector — the system-wide footprint
/// of that one risk source.
///
/// The cycle-search bound is clamped to half the trace length so short
/// horizons remain analysable.
pub fn independent_activation(
    model: &RiskModel,
    rpns: &[f64],
    focus: NodeId,
    config: &SimulationConfig,
    epsilon: f64,
    max_period: usize,
) -> Result<Vec<f64>, AnalysisError> {
    let n = model.nodes.len();
    if rpns.len() != n {
        return Err(AnalysisError::LengthMismatch {
            what: "risk values",
            expected: n,
            got: rpns.len(),
        });
    }
    let focus_index = model
        .index_of(focus)
        .ok_or(AnalysisError::UnknownNode(focus))?;
    let mut initial = vec![0.0; n];
    initial[focus_index] = rpns[focus_index];
    let trace = crate::engine::simulate(model, &initial, config)?;
    let effective = max_period.min(trace.rows.len() / 2);
    compute_drpn(&trace, epsilon, effective)
}

/// One [`independent_activation`] per node; row `i` is the settled vector
/// when node `i` alone is energised. Runs are independent, so they execute
/// in parallel.
pub fn impact_matrix(
    model: &RiskModel,
    rpns: &[f64],
    config: &SimulationConfig,
    epsilon: f64,
    max_period: usize,
) -> Result<Vec<Vec<f64>>, AnalysisError> {
    model
        .node_ids()
        .into_par_iter()
        .map(|id| independent_activation(model, rpns, id, config, epsilon, max_period))
        .collect()
}

/// For each activation row, the other node that settles highest — the place
/// where this risk source lands hardest. Ties break toward the smaller id.
///
/// Panics if the matrix shape does not match `ids` (caller bug).
pub fn most_impacted(matrix: &[Vec<f64>], ids: &[NodeId]) -> Vec<NodeId> {
    assert_eq!(matrix.len(), ids.len(), "impact matrix row count");
    matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), ids.len(), "impact matrix row width");
            let mut best: Option<(f64, NodeId)> = None;
            for (j, &value) in row.iter().enumerate() {
                if j == i {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bv, bid)) => value > bv || (value == bv && ids[j] < bid),
                };
                if better {
                    best = Some((value, ids[j]));
                }
            }
            best.expect("a model with one node has no impact targets").1
        })
        .collect()
}

/// Synchronous baseline: every node updates from the previous row each step,
/// `Cᵢ ← f(Cᵢ + Σ wⱼᵢ·Cⱼ)`, with arc delays ignored entirely.
///
/// When every arc's delay equals the step length, the token scheduler
/// delivers exactly one previous-row snapshot per arc per step, so both
/// iterations perform the same arithmetic and the traces match bit for bit —
/// except that a node with no incoming arcs is squashed here every step but
/// never re-activated by tokens.
pub fn classic_fcm_iterate(
    model: &RiskModel,
    initial: &[f64],
    config: &SimulationConfig,
) -> Result<SimulationTrace, EngineError> {
    let steps = config.validate()?;
    // Delay rules don't apply to a delay-free iteration.
    let issues: Vec<ValidationIssue> = validate_model(model, config.step_min)
        .into_iter()
        .filter(|issue| {
            !matches!(
                issue,
                ValidationIssue::DelayNotMultipleOfStep { .. } | ValidationIssue::ZeroDelay { .. }
            )
        })
        .collect();
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

    // Incoming arcs per node index, sorted by source id: the same fold order
    // the token scheduler uses for same-step arrivals.
    let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for arc in &model.arcs {
        let source = model.index_of(arc.source).expect("validated endpoint");
        let target = model.index_of(arc.target).expect("validated endpoint");
        incoming[target].push((source, arc.weight));
    }
    for list in &mut incoming {
        list.sort_by_key(|&(source, _)| model.nodes[source].id);
    }

    let mut ids = model.node_ids();
    ids.sort_unstable();
    let mut values = initial.to_vec();
    let mut rows = Vec::with_capacity(steps + 1);
    rows.push(values.clone());
    let mut activations = vec![ids.clone()];
    for _ in 1..=steps {
        let prev = values.clone();
        for i in 0..n {
            let mut sum = prev[i];
            for &(source, weight) in &incoming[i] {
                sum += weight * prev[source];
            }
            values[i] = config.threshold.apply(sum)?;
        }
        rows.push(values.clone());
        activations.push(ids.clone());
    }

    Ok(SimulationTrace {
        step_min: config.step_min,
        node_ids: model.node_ids(),
        node_names: model.nodes.iter().map(|n| n.name.clone()).collect(),
        rows,
        activations,
    })
}

/// Expert scores for one failure mode, grouped by subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct FmeaInput {
    pub node: NodeId,
    pub group: String,
    pub occurrence: f64,
    pub severity: f64,
    pub detection: f64,
}

/// Hazard indices derived from one [`FmeaInput`].
#[derive(Debug, Clone, PartialEq)]
pub struct FmeaEntry {
    pub node: NodeId,
    pub group: String,
    /// `e^(O+S+D)` — standalone hazard of the mode.
    pub direct_hazard: f64,
    /// Direct hazard plus the weighted hazards of the modes influencing it.
    pub adjusted_hazard: f64,
}

/// Result of [`fmea_hazards`]: per-mode indices plus per-group totals.
#[derive(Debug, Clone, PartialEq)]
pub struct FmeaReport {
    pub entries: Vec<FmeaEntry>,
    /// `(group label, summed adjusted hazard)` in first-appearance order.
    pub group_totals: Vec<(String, f64)>,
}

/// Computes per-mode hazard indices and per-group totals.
///
/// `influences` lists, for a target mode, the modes acting on it with their
/// causal weights: the adjusted hazard adds `weight × direct hazard` for each
/// influencer. Group totals sum adjusted hazards in first-appearance order.
pub fn fmea_hazards(
    inputs: &[FmeaInput],
    influences: &[(NodeId, Vec<(NodeId, f64)>)],
) -> Result<FmeaReport, AnalysisError> {
    let mut direct: Vec<(NodeId, f64)> = Vec::with_capacity(inputs.len());
    for input in inputs {
        if direct.iter().any(|(id, _)| *id == input.node) {
            return Err(AnalysisError::DuplicateNode(input.node));
        }
        let sum = input.occurrence + input.severity + input.detection;
        direct.push((input.node, sum.exp()));
    }
    let hazard_of = |id: NodeId| -> Result<f64, AnalysisError> {
        direct
            .iter()
            .find(|(node, _)| *node == id)
            .map(|&(_, h)| h)
            .ok_or(AnalysisError::UnknownNode(id))
    };

    let mut entries = Vec::with_capacity(inputs.len());
    for (input, &(_, own)) in inputs.iter().zip(&direct) {
        let mut adjusted = own;
        if let Some((_, list)) = influences.iter().find(|(target, _)| *target == input.node) {
            for &(influencer, weight) in list {
                adjusted += weight * hazard_of(influencer)?;
            }
        }
        entries.push(FmeaEntry {
            node: input.node,
            group: input.group.clone(),
            direct_hazard: own,
            adjusted_hazard: adjusted,
        });
    }
    for (target, _) in influences {
        hazard_of(*target)?;
    }

    let mut group_totals: Vec<(String, f64)> = Vec::new();
    for entry in &entries {
        match group_totals.iter_mut().find(|(label, _)| *label == entry.group) {
            Some((_, total)) => *total += entry.adjusted_hazard,
            None => group_totals.push((entry.group.clone(), entry.adjusted_hazard)),
        }
    }
    Ok(FmeaReport {
        entries,
        group_totals,
    })
}

/// One line of the final decision table.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRow {
    pub node: NodeId,
    pub name: String,
    pub rpn: f64,
    pub drpn: f64,
    pub most_impacted: NodeId,
}

/// Decision table plus both priority orderings (highest value first, ties by
/// node id).
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTable {
    pub rows: Vec<DecisionRow>,
    pub rpn_ranking: Vec<NodeId>,
    pub drpn_ranking: Vec<NodeId>,
}

/// Assembles the decision table from per-node results.
pub fn build_report(
    nodes: &[RiskNode],
    rpns: &[f64],
    drpns: &[f64],
    most_impacted: &[NodeId],
) -> Result<DecisionTable, AnalysisError> {
    let check = |what: &'static str, got: usize| -> Result<(), AnalysisError> {
        if got == nodes.len() {
            Ok(())
        } else {
            Err(AnalysisError::LengthMismatch {
                what,
                expected: nodes.len(),
                got,
            })
        }
    };
    check("static risk values", rpns.len())?;
    check("dynamic risk values", drpns.len())?;
    check("impact targets", most_impacted.len())?;

    let rows = nodes
        .iter()
        .enumerate()
        .map(|(i, node)| DecisionRow {
            node: node.id,
            name: node.name.clone(),
            rpn: rpns[i],
            drpn: drpns[i],
            most_impacted: most_impacted[i],
        })
        .collect();
    Ok(DecisionTable {
        rows,
        rpn_ranking: rank(nodes, rpns),
        drpn_ranking: rank(nodes, drpns),
    })
}

fn rank(nodes: &[RiskNode], values: &[f64]) -> Vec<NodeId> {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .total_cmp(&values[a])
            .then(nodes[a].id.cmp(&nodes[b].id))
    });
    order.into_iter().map(|i| nodes[i].id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{simulate, ThresholdKind};
    use crate::model::CausalArc;
    use crate::testutil::{diesel_model, DIESEL_ARCS, DIESEL_RPNS};

    fn trace_of(rows: Vec<Vec<f64>>, step_min: u32) -> SimulationTrace {
        let n = rows.first().map_or(0, Vec::len);
        SimulationTrace {
            step_min,
            node_ids: (1..=n as u32).map(NodeId).collect(),
            node_names: (1..=n).map(|i| format!("n{i}")).collect(),
            rows,
            activations: Vec::new(),
        }
    }

    #[test]
    fn constant_trace_is_fixed_from_the_start() {
        let trace = trace_of(vec![vec![0.3, 0.7]; 5], 2);
        assert_eq!(
            detect_steady_state(&trace, 1e-6, 2).unwrap(),
            SteadyState::Fixed { onset_min: 0 }
        );
    }

    #[test]
    fn fixed_onset_is_the_first_settled_row() {
        let rows = vec![vec![0.0], vec![5.0], vec![5.00002], vec![5.0]];
        let trace = trace_of(rows, 10);
        assert_eq!(
            detect_steady_state(&trace, 1e-3, 2).unwrap(),
            SteadyState::Fixed { onset_min: 10 }
        );
        // With a tighter tolerance only the final two rows agree... in fact
        // row 2 differs from row 3 by 2e-5 > 1e-6, so nothing repeats.
        assert_eq!(
            detect_steady_state(&trace, 1e-6, 2).unwrap(),
            SteadyState::NotConverged
        );
    }

    #[test]
    fn alternation_is_a_period_two_cycle() {
        let rows = (0..6)
            .map(|k| vec![if k % 2 == 0 { 0.2 } else { 0.8 }])
            .collect();
        let trace = trace_of(rows, 5);
        assert_eq!(
            detect_steady_state(&trace, 1e-6, 3).unwrap(),
            SteadyState::Cycle {
                period: 2,
                onset_min: 0
            }
        );
    }

    #[test]
    fn smallest_period_wins_over_multiples() {
        // Period 2 pattern entered after one transient row; a period-4
        // reading would also fit, but 2 is reported.
        let rows = vec![
            vec![0.9],
            vec![0.1],
            vec![0.5],
            vec![0.1],
            vec![0.5],
            vec![0.1],
            vec![0.5],
            vec![0.1],
            vec![0.5],
        ];
        let trace = trace_of(rows, 1);
        assert_eq!(
            detect_steady_state(&trace, 1e-9, 4).unwrap(),
            SteadyState::Cycle {
                period: 2,
                onset_min: 1
            }
        );
    }

    #[test]
    fn drifting_trace_does_not_converge() {
        let rows = (0..8).map(|k| vec![k as f64 * 0.05]).collect();
        let trace = trace_of(rows, 1);
        assert_eq!(
            detect_steady_state(&trace, 1e-6, 3).unwrap(),
            SteadyState::NotConverged
        );
        assert_eq!(
            compute_drpn(&trace, 1e-6, 3).unwrap_err(),
            AnalysisError::NotConverged
        );
    }

    #[test]
    fn short_traces_and_bad_epsilon_are_rejected() {
        let trace = trace_of(vec![vec![0.0]; 6], 1);
        assert_eq!(
            detect_steady_state(&trace, 1e-6, 4).unwrap_err(),
            AnalysisError::TraceTooShort {
                max_period: 4,
                rows: 6
            }
        );
        assert_eq!(
            detect_steady_state(&trace, 0.0, 2).unwrap_err(),
            AnalysisError::BadEpsilon { epsilon: 0.0 }
        );
        assert!(detect_steady_state(&trace, f64::NAN, 2).is_err());
    }

    #[test]
    fn column_classification_separates_mixed_tails() {
        // Node 1 settles, node 2 keeps flipping: the joint trace cycles, but
        // per-column views tell them apart.
        let rows = (0..8)
            .map(|k| vec![0.4, if k % 2 == 0 { 0.1 } else { 0.9 }])
            .collect();
        let trace = trace_of(rows, 2);
        assert_eq!(
            column_steady_state(&trace, NodeId(1), 1e-6, 4).unwrap(),
            SteadyState::Fixed { onset_min: 0 }
        );
        assert_eq!(
            column_steady_state(&trace, NodeId(2), 1e-6, 4).unwrap(),
            SteadyState::Cycle {
                period: 2,
                onset_min: 0
            }
        );
        assert_eq!(
            column_steady_state(&trace, NodeId(9), 1e-6, 4).unwrap_err(),
            AnalysisError::UnknownNode(NodeId(9))
        );
    }

    #[test]
    fn drpn_of_a_cycle_is_the_period_mean() {
        let rows = (0..6)
            .map(|k| vec![if k % 2 == 0 { 0.2 } else { 0.8 }, 0.5])
            .collect();
        let trace = trace_of(rows, 1);
        let drpn = compute_drpn(&trace, 1e-9, 2).unwrap();
        assert_eq!(drpn, vec![0.5, 0.5]);
    }

    #[test]
    fn drpn_of_a_fixed_point_is_the_final_row() {
        let model = diesel_model();
        let trace = simulate(
            &model,
            &model.initial_values(),
            &SimulationConfig::new(2, 50),
        )
        .unwrap();
        let drpn = compute_drpn(&trace, 1e-6, 12).unwrap();
        assert_eq!(drpn, trace.final_row());
        assert!(drpn.iter().all(|v| *v > 0.0 && *v < 1.0));
    }

    #[test]
    fn token_run_with_step_long_delays_matches_classic_iteration() {
        // Same arcs as the diesel model but every delay equal to the step:
        // the scheduler must reproduce the synchronous iteration bit for bit.
        let mut model = diesel_model();
        model.arcs = DIESEL_ARCS
            .iter()
            .map(|&(source, target, weight, _)| CausalArc {
                source: NodeId(source),
                target: NodeId(target),
                weight,
                delay_min: 2,
            })
            .collect();
        let initial = model.initial_values();
        let config = SimulationConfig::new(2, 30).with_threshold(ThresholdKind::Sigmoid);
        let token = simulate(&model, &initial, &config).unwrap();
        let classic = classic_fcm_iterate(&model, &initial, &config).unwrap();
        assert_eq!(token, classic);
    }

    #[test]
    fn classic_iteration_squashes_sourceless_nodes() {
        // A node with no incoming arcs is inert under token dynamics but is
        // still passed through the threshold by the synchronous baseline.
        let model = RiskModel::new(
            vec![
                RiskNode {
                    id: NodeId(1),
                    name: "isolated".into(),
                    initial_value: 0.6,
                },
                RiskNode {
                    id: NodeId(2),
                    name: "fed".into(),
                    initial_value: 0.2,
                },
            ],
            vec![CausalArc {
                source: NodeId(1),
                target: NodeId(2),
                weight: 0.5,
                delay_min: 1,
            }],
        );
        let config = SimulationConfig::new(1, 2);
        let classic = classic_fcm_iterate(&model, &[0.6, 0.2], &config).unwrap();
        let squashed = 1.0 / (1.0 + (-0.6f64).exp());
        assert_eq!(classic.rows[1][0], squashed);
        let token = simulate(&model, &[0.6, 0.2], &config).unwrap();
        assert_eq!(token.rows[1][0], 0.6);
    }

    #[test]
    fn independent_activation_settles_for_every_diesel_node() {
        let model = diesel_model();
        let config = SimulationConfig::new(2, 50);
        let matrix = impact_matrix(&model, &DIESEL_RPNS, &config, 1e-6, 20).unwrap();
        assert_eq!(matrix.len(), 6);
        for (i, row) in matrix.iter().enumerate() {
            assert_eq!(row.len(), 6);
            let solo = independent_activation(
                &model,
                &DIESEL_RPNS,
                NodeId(i as u32 + 1),
                &config,
                1e-6,
                20,
            )
            .unwrap();
            assert_eq!(*row, solo);
        }
    }

    #[test]
    fn independent_activation_checks_its_inputs() {
        let model = diesel_model();
        let config = SimulationConfig::new(2, 50);
        assert_eq!(
            independent_activation(&model, &[0.1], NodeId(1), &config, 1e-6, 20).unwrap_err(),
            AnalysisError::LengthMismatch {
                what: "risk values",
                expected: 6,
                got: 1
            }
        );
        assert_eq!(
            independent_activation(&model, &DIESEL_RPNS, NodeId(42), &config, 1e-6, 20)
                .unwrap_err(),
            AnalysisError::UnknownNode(NodeId(42))
        );
    }

    #[test]
    fn most_impacted_skips_self_and_breaks_ties_low() {
        let ids = [NodeId(1), NodeId(2), NodeId(3)];
        let matrix = vec![
            vec![0.9, 0.7, 0.7], // tie between 2 and 3 -> 2
            vec![0.1, 0.9, 0.4], // self excluded -> 3? no: 0.1 vs 0.4 -> 3
            vec![0.5, 0.6, 0.9],
        ];
        assert_eq!(
            most_impacted(&matrix, &ids),
            vec![NodeId(2), NodeId(3), NodeId(2)]
        );
    }

    type InfluenceLists = Vec<(NodeId, Vec<(NodeId, f64)>)>;

    fn diesel_fmea() -> (Vec<FmeaInput>, InfluenceLists) {
        let row = |node: u32, group: &str, o: f64, s: f64, d: f64| FmeaInput {
            node: NodeId(node),
            group: group.into(),
            occurrence: o,
            severity: s,
            detection: d,
        };
        let inputs = vec![
            row(1, "Fuel supply", -0.4, 0.5, 0.75),
            row(2, "Fuel supply", 0.75, 0.9, -0.6),
            row(4, "Fuel supply", 0.15, -1.5, -1.25),
            row(5, "Transmission", -1.25, -0.45, -0.05),
            row(3, "Transmission", 0.1, -1.55, -0.55),
            row(6, "Transmission", 0.25, 0.2, -1.5),
        ];
        let influences = vec![
            (NodeId(1), vec![(NodeId(2), 0.6), (NodeId(6), 0.4)]),
            (NodeId(2), vec![(NodeId(1), 0.8), (NodeId(3), 0.4)]),
            (NodeId(4), vec![(NodeId(2), 0.8), (NodeId(3), 0.8), (NodeId(5), 0.4)]),
            (NodeId(5), vec![(NodeId(1), 0.2), (NodeId(4), 0.6)]),
            (NodeId(3), vec![(NodeId(4), 0.4)]),
            (NodeId(6), vec![(NodeId(5), 0.6)]),
        ];
        (inputs, influences)
    }

    #[test]
    fn hazard_indices_match_the_diesel_worked_example() {
        let (inputs, influences) = diesel_fmea();
        let report = fmea_hazards(&inputs, &influences).unwrap();
        let (entries, groups) = (report.entries, report.group_totals);

        let expected = [
            (1, 2.3396, 4.1942),
            (2, 2.8577, 4.7835),
            (4, 0.0743, 2.5382),
            (5, 0.1738, 0.6863),
            (3, 0.1353, 0.1650),
            (6, 0.3499, 0.4542),
        ];
        for (entry, &(id, direct, adjusted)) in entries.iter().zip(&expected) {
            assert_eq!(entry.node, NodeId(id));
            assert!(
                (entry.direct_hazard - direct).abs() < 1e-3,
                "direct hazard of {}: {}",
                entry.node,
                entry.direct_hazard
            );
            assert!(
                (entry.adjusted_hazard - adjusted).abs() < 1e-3,
                "adjusted hazard of {}: {}",
                entry.node,
                entry.adjusted_hazard
            );
        }
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].0, "Fuel supply");
        assert!((groups[0].1 - 11.5159).abs() < 1e-3);
        assert_eq!(groups[1].0, "Transmission");
        assert!((groups[1].1 - 1.3055).abs() < 1e-3);
    }

    #[test]
    fn hazard_inputs_are_cross_checked() {
        let (inputs, mut influences) = diesel_fmea();
        influences[0].1.push((NodeId(9), 0.5));
        assert_eq!(
            fmea_hazards(&inputs, &influences).unwrap_err(),
            AnalysisError::UnknownNode(NodeId(9))
        );

        let (inputs, influences) = diesel_fmea();
        let mut doubled = inputs.clone();
        doubled.push(inputs[0].clone());
        assert_eq!(
            fmea_hazards(&doubled, &influences).unwrap_err(),
            AnalysisError::DuplicateNode(NodeId(1))
        );
    }

    #[test]
    fn report_orders_both_rankings_by_value() {
        let model = diesel_model();
        let drpns = [0.8, 0.9, 0.7, 0.95, 0.82, 0.76];
        let most = vec![NodeId(2); 6];
        let table = build_report(&model.nodes, &DIESEL_RPNS, &drpns, &most).unwrap();

        let ids = |list: &[NodeId]| list.iter().map(|id| id.0).collect::<Vec<_>>();
        assert_eq!(ids(&table.rpn_ranking), vec![2, 1, 6, 5, 3, 4]);
        assert_eq!(ids(&table.drpn_ranking), vec![4, 2, 5, 1, 6, 3]);
        assert_eq!(table.rows.len(), 6);
        assert_eq!(table.rows[0].name, "Inlet valve failure");
        assert!(matches!(
            build_report(&model.nodes, &DIESEL_RPNS[..3], &drpns, &most).unwrap_err(),
            AnalysisError::LengthMismatch { what: "static risk values", .. }
        ));
    }
}
