//! Model documents and text output.
//!
//! A model file is TOML with the following sections:
//!
//! ```toml
//! [scale]                         # optional, half_range defaults to 2
//! half_range = 2
//!
//! [weights]                       # required when any node uses tallies
//! occurrence = 0.5
//! severity = 0.35
//! detection = 0.15
//!
//! [simulation]                    # optional; CLI flags may override
//! step_min = 2
//! horizon_min = 50
//!
//! [[nodes]]                       # direct initial value…
//! id = 1
//! name = "Inlet valve failure"
//! initial = -0.1118
//!
//! [[nodes]]                       # …or expert tally arrays (2t+1 slots,
//! id = 2                          # lowest grade first)
//! name = "Piston failure"
//! occurrence = [1, 2, 3, 9, 5]
//! severity = [0, 1, 5, 9, 5]
//! detection = [3, 8, 7, 2, 0]
//!
//! [[arcs]]
//! source = 1
//! target = 2
//! weight = 0.8
//! delay_min = 2
//!
//! [[groups]]                      # optional, used for hazard totals
//! label = "Fuel supply"
//! members = [1, 2]
//! ```
//!
//! Parsing separates syntax errors (reported with the offending line) from
//! semantic problems, which are collected so one pass reports everything.

use serde::Deserialize;
use thiserror::Error;

use crate::analysis::{DecisionTable, SteadyState};
use crate::engine::SimulationTrace;
use crate::linguistic::{
    compute_rpn, ExpertTally, LinguisticError, LinguisticScale, RiskIndexWeights,
};
use crate::model::{validate_model, CausalArc, NodeId, RiskModel, RiskNode};

#[derive(Debug, Error, PartialEq)]
pub enum IoError {
    #[error("model file is not valid TOML: {0}")]
    Syntax(String),
    #[error("model document rejected:\n  - {}", issues.join("\n  - "))]
    Invalid { issues: Vec<String> },
    #[error(transparent)]
    Linguistic(#[from] LinguisticError),
}

/// How a node's starting value is given.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeInit {
    /// Risk value stated directly.
    Direct(f64),
    /// Expert tallies; the value is computed during [`ModelDocument::prepare`].
    Tallies {
        occurrence: ExpertTally,
        severity: ExpertTally,
        detection: ExpertTally,
    },
}

/// One node as written in the document.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub id: NodeId,
    pub name: String,
    pub init: NodeInit,
}

/// Named subsystem used for hazard totals.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    pub label: String,
    pub members: Vec<NodeId>,
}

/// Step and horizon as written in the document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationSettings {
    pub step_min: u32,
    pub horizon_min: u32,
}

/// Fully typed model file. Section and entry order is preserved, so
/// `parse → serialize` round-trips a document exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub scale: LinguisticScale,
    pub weights: Option<RiskIndexWeights>,
    pub simulation: Option<SimulationSettings>,
    pub nodes: Vec<NodeSpec>,
    pub arcs: Vec<CausalArc>,
    pub groups: Vec<GroupSpec>,
}

// Serde mirror of the on-disk shape; semantic checks happen afterwards so
// they can all be reported together.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    scale: Option<RawScale>,
    weights: Option<RawWeights>,
    simulation: Option<RawSimulation>,
    #[serde(default)]
    nodes: Vec<RawNode>,
    #[serde(default)]
    arcs: Vec<RawArc>,
    #[serde(default)]
    groups: Vec<RawGroup>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScale {
    half_range: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    occurrence: f64,
    severity: f64,
    detection: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    step_min: u32,
    horizon_min: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: u32,
    name: String,
    initial: Option<f64>,
    occurrence: Option<Vec<u32>>,
    severity: Option<Vec<u32>>,
    detection: Option<Vec<u32>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArc {
    source: u32,
    target: u32,
    weight: f64,
    delay_min: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    label: String,
    members: Vec<u32>,
}

/// Parses model-file text into a typed document.
///
/// Syntax problems fail fast with the TOML diagnostic; semantic problems are
/// gathered into a single [`IoError::Invalid`] listing every issue found.
pub fn parse_model_file(text: &str) -> Result<ModelDocument, IoError> {
    let raw: RawDocument =
        toml::from_str(text).map_err(|err| IoError::Syntax(err.to_string()))?;
    let mut issues: Vec<String> = Vec::new();

    let scale = match raw.scale {
        Some(s) => LinguisticScale::new(s.half_range).unwrap_or_else(|err| {
            issues.push(format!("[scale]: {err}"));
            LinguisticScale::new(2).expect("2 is a valid half range")
        }),
        None => LinguisticScale::new(2).expect("2 is a valid half range"),
    };

    let weights_given = raw.weights.is_some();
    let weights = match raw.weights {
        Some(w) => match RiskIndexWeights::new(w.occurrence, w.severity, w.detection) {
            Ok(weights) => Some(weights),
            Err(err) => {
                issues.push(format!("[weights]: {err}"));
                None
            }
        },
        None => None,
    };

    let simulation = raw.simulation.map(|sim| {
        if sim.step_min == 0 {
            issues.push("[simulation]: step_min must be positive".into());
        } else {
            if sim.horizon_min < sim.step_min {
                issues.push("[simulation]: horizon_min is shorter than one step".into());
            }
            if sim.horizon_min % sim.step_min != 0 {
                issues.push("[simulation]: horizon_min must be a multiple of step_min".into());
            }
        }
        SimulationSettings {
            step_min: sim.step_min,
            horizon_min: sim.horizon_min,
        }
    });

    if raw.nodes.is_empty() {
        issues.push("model requires at least one node".into());
    }
    let mut any_tallies = false;
    let mut nodes: Vec<NodeSpec> = Vec::with_capacity(raw.nodes.len());
    for node in &raw.nodes {
        let label = format!("node {}", node.id);
        if node.name.trim().is_empty() {
            issues.push(format!("{label}: name must not be empty"));
        }
        let tally_fields = [&node.occurrence, &node.severity, &node.detection];
        let given = tally_fields.iter().filter(|f| f.is_some()).count();
        let init = match (node.initial, given) {
            (Some(value), 0) => {
                if !value.is_finite() {
                    issues.push(format!("{label}: initial value must be finite"));
                }
                Some(NodeInit::Direct(value))
            }
            (None, 3) => {
                any_tallies = true;
                let mut build = |counts: &Option<Vec<u32>>, what: &str| {
                    ExpertTally::new(scale, counts.clone().expect("checked above"))
                        .map_err(|err| issues.push(format!("{label}: {what} tally: {err}")))
                        .ok()
                };
                let occurrence = build(&node.occurrence, "occurrence");
                let severity = build(&node.severity, "severity");
                let detection = build(&node.detection, "detection");
                match (occurrence, severity, detection) {
                    (Some(occurrence), Some(severity), Some(detection)) => {
                        Some(NodeInit::Tallies {
                            occurrence,
                            severity,
                            detection,
                        })
                    }
                    _ => None,
                }
            }
            (Some(_), _) => {
                issues.push(format!(
                    "{label}: give either `initial` or the three tally arrays, not both"
                ));
                None
            }
            (None, 0) => {
                issues.push(format!(
                    "{label}: needs either `initial` or the three tally arrays"
                ));
                None
            }
            (None, _) => {
                issues.push(format!(
                    "{label}: expert tallies need all three arrays (occurrence, severity, detection)"
                ));
                None
            }
        };
        nodes.push(NodeSpec {
            id: NodeId(node.id),
            name: node.name.clone(),
            // Placeholder on error; the document is rejected anyway.
            init: init.unwrap_or(NodeInit::Direct(0.0)),
        });
    }
    if any_tallies && !weights_given {
        issues.push("tally-based nodes need a [weights] section".into());
    }

    let arcs: Vec<CausalArc> = raw
        .arcs
        .iter()
        .map(|arc| CausalArc {
            source: NodeId(arc.source),
            target: NodeId(arc.target),
            weight: arc.weight,
            delay_min: arc.delay_min,
        })
        .collect();

    // Structural checks (ids, endpoints, weights, delays) run on a throwaway
    // model; initial values are irrelevant to them.
    let provisional = RiskModel::new(
        nodes
            .iter()
            .map(|spec| RiskNode {
                id: spec.id,
                name: spec.name.clone(),
                initial_value: 0.0,
            })
            .collect(),
        arcs.clone(),
    );
    let step_for_checks = simulation.as_ref().map_or(1, |sim| sim.step_min.max(1));
    for issue in validate_model(&provisional, step_for_checks) {
        issues.push(issue.to_string());
    }

    let mut groups: Vec<GroupSpec> = Vec::with_capacity(raw.groups.len());
    for group in &raw.groups {
        if group.label.trim().is_empty() {
            issues.push("group labels must not be empty".into());
        }
        if groups.iter().any(|g| g.label == group.label) {
            issues.push(format!("duplicate group label '{}'", group.label));
        }
        if group.members.is_empty() {
            issues.push(format!("group '{}' has no members", group.label));
        }
        for member in &group.members {
            if !nodes.iter().any(|n| n.id == NodeId(*member)) {
                issues.push(format!(
                    "group '{}' references unknown node {}",
                    group.label,
                    NodeId(*member)
                ));
            }
        }
        groups.push(GroupSpec {
            label: group.label.clone(),
            members: group.members.iter().map(|&id| NodeId(id)).collect(),
        });
    }

    if issues.is_empty() {
        Ok(ModelDocument {
            scale,
            weights,
            simulation,
            nodes,
            arcs,
            groups,
        })
    } else {
        Err(IoError::Invalid { issues })
    }
}

/// A document resolved into runnable pieces: tally nodes carry their
/// computed risk value as the model's initial value.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedCase {
    pub model: RiskModel,
    /// Original tallies per node (document order), for score-based analyses.
    pub tallies: Vec<Option<(ExpertTally, ExpertTally, ExpertTally)>>,
    pub groups: Vec<GroupSpec>,
    pub scale: LinguisticScale,
    pub weights: Option<RiskIndexWeights>,
    pub simulation: Option<SimulationSettings>,
}

impl ModelDocument {
    /// Resolves tallies into risk values and builds the runnable model.
    pub fn prepare(&self) -> Result<PreparedCase, IoError> {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut tallies = Vec::with_capacity(self.nodes.len());
        for spec in &self.nodes {
            let initial_value = match &spec.init {
                NodeInit::Direct(value) => {
                    tallies.push(None);
                    *value
                }
                NodeInit::Tallies {
                    occurrence,
                    severity,
                    detection,
                } => {
                    let weights = self.weights.as_ref().ok_or_else(|| IoError::Invalid {
                        issues: vec!["tally-based nodes need a [weights] section".into()],
                    })?;
                    tallies.push(Some((
                        occurrence.clone(),
                        severity.clone(),
                        detection.clone(),
                    )));
                    compute_rpn(occurrence, severity, detection, weights, self.scale)?
                }
            };
            nodes.push(RiskNode {
                id: spec.id,
                name: spec.name.clone(),
                initial_value,
            });
        }
        Ok(PreparedCase {
            model: RiskModel::new(nodes, self.arcs.clone()),
            tallies,
            groups: self.groups.clone(),
            scale: self.scale,
            weights: self.weights,
            simulation: self.simulation,
        })
    }
}

/// Writes a document back to TOML in section order, preserving node and arc
/// order. `parse_model_file(serialize_model(doc))` reproduces `doc` exactly.
pub fn serialize_model(doc: &ModelDocument) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    let _ = writeln!(out, "[scale]");
    let _ = writeln!(out, "half_range = {}", doc.scale.half_range());

    if let Some(weights) = &doc.weights {
        let _ = writeln!(out, "\n[weights]");
        let _ = writeln!(out, "occurrence = {}", toml_float(weights.occurrence()));
        let _ = writeln!(out, "severity = {}", toml_float(weights.severity()));
        let _ = writeln!(out, "detection = {}", toml_float(weights.detection()));
    }

    if let Some(sim) = &doc.simulation {
        let _ = writeln!(out, "\n[simulation]");
        let _ = writeln!(out, "step_min = {}", sim.step_min);
        let _ = writeln!(out, "horizon_min = {}", sim.horizon_min);
    }

    for node in &doc.nodes {
        let _ = writeln!(out, "\n[[nodes]]");
        let _ = writeln!(out, "id = {}", node.id.0);
        let _ = writeln!(out, "name = {}", toml_string(&node.name));
        match &node.init {
            NodeInit::Direct(value) => {
                let _ = writeln!(out, "initial = {}", toml_float(*value));
            }
            NodeInit::Tallies {
                occurrence,
                severity,
                detection,
            } => {
                let _ = writeln!(out, "occurrence = {}", toml_counts(occurrence.counts()));
                let _ = writeln!(out, "severity = {}", toml_counts(severity.counts()));
                let _ = writeln!(out, "detection = {}", toml_counts(detection.counts()));
            }
        }
    }

    for arc in &doc.arcs {
        let _ = writeln!(out, "\n[[arcs]]");
        let _ = writeln!(out, "source = {}", arc.source.0);
        let _ = writeln!(out, "target = {}", arc.target.0);
        let _ = writeln!(out, "weight = {}", toml_float(arc.weight));
        let _ = writeln!(out, "delay_min = {}", arc.delay_min);
    }

    for group in &doc.groups {
        let _ = writeln!(out, "\n[[groups]]");
        let _ = writeln!(out, "label = {}", toml_string(&group.label));
        let members: Vec<String> = group.members.iter().map(|m| m.0.to_string()).collect();
        let _ = writeln!(out, "members = [{}]", members.join(", "));
    }

    out
}

fn toml_float(value: f64) -> String {
    // TOML floats need a decimal point; Rust's shortest-roundtrip Display
    // drops it for whole numbers.
    if value == value.trunc() && value.abs() < 1e15 {
        format!("{value:.1}")
    } else {
        format!("{value}")
    }
}

fn toml_counts(counts: &[u32]) -> String {
    let parts: Vec<String> = counts.iter().map(u32::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn toml_string(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Formats a value with six significant digits, trailing zeros trimmed.
pub fn fmt_sig6(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    if !(-4..=5).contains(&magnitude) {
        let formatted = format!("{value:.5e}");
        let (mantissa, exponent) = formatted
            .split_once('e')
            .expect("exponential format always contains 'e'");
        return format!("{}e{}", trim_zeros(mantissa), exponent);
    }
    let decimals = (5 - magnitude).max(0) as usize;
    trim_zeros(&format!("{value:.decimals$}"))
}

fn trim_zeros(text: &str) -> String {
    if !text.contains('.') {
        return text.to_string();
    }
    text.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Renders a trace as CSV: a `time` column in minutes, one column per node,
/// values at six significant digits.
pub fn emit_trace_csv(trace: &SimulationTrace) -> String {
    let mut out = String::from("time");
    for name in &trace.node_names {
        out.push(',');
        out.push_str(&csv_field(name));
    }
    out.push('\n');
    for (row_index, row) in trace.rows.iter().enumerate() {
        out.push_str(&trace.time_min(row_index).to_string());
        for value in row {
            out.push(',');
            out.push_str(&fmt_sig6(*value));
        }
        out.push('\n');
    }
    out
}

/// Renders the human-readable analysis report.
///
/// The decision table lists one line per node; a node without a settled
/// value (non-convergent run) shows `n/a` in the DRPN column, and the DRPN
/// ranking is suppressed in that case.
pub fn render_report(
    steady: &SteadyState,
    table: &DecisionTable,
    impact: Option<(&[NodeId], &[Vec<f64>])>,
) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    let _ = writeln!(out, "steady state: {}", steady_label(steady));
    let _ = writeln!(out);
    let _ = writeln!(out, "node | failure mode | RPN | DRPN | most impacted");
    for row in &table.rows {
        let drpn = if row.drpn.is_finite() {
            fmt_sig6(row.drpn)
        } else {
            "n/a".to_string()
        };
        let _ = writeln!(
            out,
            "{} | {} | {} | {} | {}",
            row.node,
            row.name,
            fmt_sig6(row.rpn),
            drpn,
            row.most_impacted
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "ranking by RPN:  {}", ranking_line(&table.rpn_ranking));
    if table.rows.iter().all(|row| row.drpn.is_finite()) {
        let _ = writeln!(out, "ranking by DRPN: {}", ranking_line(&table.drpn_ranking));
    } else {
        let _ = writeln!(out, "ranking by DRPN: n/a (no steady state)");
    }

    if let Some((ids, matrix)) = impact {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "independent activation (row: activated node, columns: settled values)"
        );
        let header: Vec<String> = ids.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "activated | {}", header.join(" | "));
        for (i, row) in matrix.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| fmt_sig6(*v)).collect();
            let _ = writeln!(out, "{} | {}", ids[i], cells.join(" | "));
        }
    }
    out
}

fn steady_label(steady: &SteadyState) -> String {
    match steady {
        SteadyState::Fixed { onset_min } => format!("fixed point from minute {onset_min}"),
        SteadyState::Cycle { period, onset_min } => {
            format!("limit cycle of period {period} steps from minute {onset_min}")
        }
        SteadyState::NotConverged => "no steady state within the horizon".to_string(),
    }
}

fn ranking_line(ids: &[NodeId]) -> String {
    ids.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" > ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::build_report;
    use crate::testutil::{diesel_model, DIESEL_RPNS};

    const SAMPLE: &str = r#"
[scale]
half_range = 2

[weights]
occurrence = 0.5
severity = 0.35
detection = 0.15

[simulation]
step_min = 2
horizon_min = 50

[[nodes]]
id = 1
name = "Inlet valve failure"
initial = -0.1118

[[nodes]]
id = 2
name = "Piston failure"
occurrence = [1, 2, 3, 9, 5]
severity = [0, 1, 5, 9, 5]
detection = [3, 8, 7, 2, 0]

[[arcs]]
source = 1
target = 2
weight = 0.8
delay_min = 2

[[groups]]
label = "Fuel supply"
members = [1, 2]
"#;

    #[test]
    fn parses_a_complete_document() {
        let doc = parse_model_file(SAMPLE).unwrap();
        assert_eq!(doc.scale.half_range(), 2);
        assert!(doc.weights.is_some());
        assert_eq!(
            doc.simulation,
            Some(SimulationSettings {
                step_min: 2,
                horizon_min: 50
            })
        );
        assert_eq!(doc.nodes.len(), 2);
        assert_eq!(doc.nodes[0].init, NodeInit::Direct(-0.1118));
        assert!(matches!(doc.nodes[1].init, NodeInit::Tallies { .. }));
        assert_eq!(doc.arcs.len(), 1);
        assert_eq!(doc.groups[0].members, vec![NodeId(1), NodeId(2)]);
    }

    #[test]
    fn scale_defaults_to_two_when_absent() {
        let doc = parse_model_file(
            "[[nodes]]\nid = 1\nname = \"a\"\ninitial = 0.5\n",
        )
        .unwrap();
        assert_eq!(doc.scale.half_range(), 2);
        assert!(doc.weights.is_none());
        assert!(doc.simulation.is_none());
    }

    #[test]
    fn syntax_errors_fail_fast_with_the_toml_diagnostic() {
        let err = parse_model_file("[scale\nhalf_range = 2").unwrap_err();
        assert!(matches!(err, IoError::Syntax(_)));
        let err = parse_model_file("[[nodes]]\nid = 1\nname = \"a\"\nbogus = 3\n").unwrap_err();
        assert!(matches!(err, IoError::Syntax(_)), "unknown keys are syntax-level");
    }

    #[test]
    fn semantic_problems_are_collected_together() {
        let text = r#"
[simulation]
step_min = 4
horizon_min = 10

[[nodes]]
id = 1
name = "a"
initial = 0.1

[[nodes]]
id = 1
name = "b"
occurrence = [1, 0, 0, 0, 0]
severity = [1, 0, 0, 0, 0]
detection = [1, 0, 0]

[[nodes]]
id = 3
name = ""

[[arcs]]
source = 1
target = 9
weight = 1.5
delay_min = 0
"#;
        let err = parse_model_file(text).unwrap_err();
        let IoError::Invalid { issues } = err else {
            panic!("expected collected issues, got {err:?}")
        };
        let text = issues.join("\n");
        for needle in [
            "horizon_min must be a multiple",
            "detection tally",
            "tally-based nodes need a [weights] section",
            "name must not be empty",
            "needs either `initial` or the three tally arrays",
            "appears more than once",
            "unknown node",
            "weight",
            "delay",
        ] {
            assert!(text.contains(needle), "missing '{needle}' in:\n{text}");
        }
    }

    #[test]
    fn both_init_styles_on_one_node_are_rejected() {
        let text = r#"
[weights]
occurrence = 0.5
severity = 0.35
detection = 0.15

[[nodes]]
id = 1
name = "a"
initial = 0.2
occurrence = [1, 0, 0, 0, 0]
severity = [1, 0, 0, 0, 0]
detection = [1, 0, 0, 0, 0]
"#;
        let err = parse_model_file(text).unwrap_err();
        let IoError::Invalid { issues } = err else {
            panic!("expected collected issues")
        };
        assert!(issues.iter().any(|i| i.contains("not both")), "{issues:?}");
    }

    #[test]
    fn serialization_round_trips_exactly() {
        let doc = parse_model_file(SAMPLE).unwrap();
        let text = serialize_model(&doc);
        let reparsed = parse_model_file(&text).unwrap();
        assert_eq!(doc, reparsed);
    }

    #[test]
    fn prepare_resolves_tallies_into_risk_values() {
        let doc = parse_model_file(SAMPLE).unwrap();
        let case = doc.prepare().unwrap();
        assert_eq!(case.model.nodes[0].initial_value, -0.1118);
        let weights = doc.weights.as_ref().unwrap();
        let NodeInit::Tallies {
            occurrence,
            severity,
            detection,
        } = &doc.nodes[1].init
        else {
            panic!("node 2 uses tallies")
        };
        let expected =
            compute_rpn(occurrence, severity, detection, weights, doc.scale).unwrap();
        assert_eq!(case.model.nodes[1].initial_value, expected);
        assert!(case.tallies[0].is_none() && case.tallies[1].is_some());
    }

    #[test]
    fn six_significant_digit_formatting() {
        let cases = [
            (0.0, "0"),
            (0.5, "0.5"),
            (-0.1118, "-0.1118"),
            (0.0417, "0.0417"),
            (-1.339, "-1.339"),
            (-1.5745, "-1.5745"),
            (0.8476578943596476, "0.847658"),
            (123.4567891, "123.457"),
            (-2.0, "-2"),
            (0.00001, "1e-5"),
            (1234567.0, "1.23457e6"),
        ];
        for (value, expected) in cases {
            assert_eq!(fmt_sig6(value), expected, "formatting {value}");
        }
    }

    #[test]
    fn trace_csv_starts_with_the_raw_initial_row() {
        let model = diesel_model();
        let trace = crate::engine::simulate(
            &model,
            &model.initial_values(),
            &crate::engine::SimulationConfig::new(2, 4),
        )
        .unwrap();
        let csv = emit_trace_csv(&trace);
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("time,Inlet valve failure,Piston failure,"));
        assert_eq!(
            lines.next().unwrap(),
            "0,-0.1118,0.0417,-1.339,-1.5745,-1.3381,-0.8696"
        );
        assert_eq!(csv.lines().count(), 1 + trace.rows.len());
    }

    #[test]
    fn csv_quotes_awkward_node_names() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn report_lists_rows_and_rankings() {
        let model = diesel_model();
        let drpns = [0.8477, 0.9264, 0.7564, 0.9418, 0.8265, 0.7821];
        let most = vec![NodeId(4), NodeId(4), NodeId(4), NodeId(2), NodeId(4), NodeId(4)];
        let table = build_report(&model.nodes, &DIESEL_RPNS, &drpns, &most).unwrap();
        let text = render_report(&SteadyState::Fixed { onset_min: 40 }, &table, None);
        assert!(text.contains("steady state: fixed point from minute 40"));
        assert!(text.contains("DR2 | Piston failure | 0.0417 | 0.9264 | DR4"));
        assert!(text.contains("ranking by RPN:  DR2 > DR1 > DR6 > DR5 > DR3 > DR4"));
        assert!(text.contains("ranking by DRPN: DR4 > DR2 > DR1 > DR5 > DR6 > DR3"));
    }

    #[test]
    fn report_marks_non_convergence() {
        let model = diesel_model();
        let drpns = [f64::NAN; 6];
        let most = vec![NodeId(2); 6];
        let table = build_report(&model.nodes, &DIESEL_RPNS, &drpns, &most).unwrap();
        let text = render_report(&SteadyState::NotConverged, &table, None);
        assert!(text.contains("no steady state within the horizon"));
        assert!(text.contains("| n/a |"));
        assert!(text.contains("ranking by DRPN: n/a"));
    }
}
