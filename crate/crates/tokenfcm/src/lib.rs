//! Token-driven fuzzy cognitive map (FCM) risk assessment.
//!
//! The crate covers the full pipeline for dynamic design-risk analysis:
//!
//! 1. [`linguistic`] — multi-expert opinion tallies on a symmetric linguistic
//!    scale are converted into probabilistic term distributions and collapsed
//!    into scalar risk priority numbers (RPN).
//! 2. [`model`] — the risk graph: nodes for design risks, weighted causal
//!    arcs with per-arc propagation delays, and validation against a
//!    simulation step.
//! 3. [`engine`] — the token scheduler. Node activations emit tokens that
//!    carry a value snapshot along each outgoing arc; a token's arrival
//!    re-activates its target, which folds all same-step arrivals into one
//!    threshold update.
//! 4. [`analysis`] — steady-state/limit-cycle classification of traces,
//!    dynamic RPN extraction, independent-activation impact matrices, a
//!    classic (delay-free) FCM baseline, and FMEA hazard indices.
//! 5. [`io`] — the TOML model-file grammar, trace CSV export, and plain-text
//!    reports. The `tokenfcm` binary wires these into a CLI.

pub mod analysis;
pub mod engine;
pub mod io;
pub mod linguistic;
pub mod model;

pub use analysis::{
    build_report, classic_fcm_iterate, compute_drpn, detect_steady_state, fmea_hazards,
    impact_matrix, independent_activation, most_impacted, AnalysisError, DecisionRow,
    DecisionTable, FmeaEntry, FmeaInput, FmeaReport, SteadyState,
};
pub use engine::{
    activate_update, simulate, simulate_with_initial_activation, EngineError, SimulationConfig,
    SimulationTrace, ThresholdKind, Token,
};
pub use linguistic::{
    compute_rpn, weighted_product, ExpertTally, LinguisticError, LinguisticScale,
    RiskIndexWeights, TermDistribution,
};
pub use model::{adjacency, validate_model, CausalArc, ModelError, NodeId, RiskModel, RiskNode};
