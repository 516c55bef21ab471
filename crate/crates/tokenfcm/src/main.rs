//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage or input problems, 2 when a run
//! finishes without settling into a steady state.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use tokenfcm::io::{
    emit_trace_csv, fmt_sig6, parse_model_file, render_report, serialize_model, GroupSpec,
    ModelDocument, NodeInit, NodeSpec, PreparedCase, SimulationSettings,
};
use tokenfcm::{
    build_report, classic_fcm_iterate, compute_drpn, detect_steady_state, fmea_hazards,
    impact_matrix, most_impacted, simulate, AnalysisError, ExpertTally, FmeaInput,
    LinguisticScale, NodeId, RiskIndexWeights, SimulationConfig, SimulationTrace, SteadyState,
    TermDistribution, ThresholdKind,
};

#[derive(Parser)]
#[command(
    name = "tokenfcm",
    version,
    about = "Token-driven fuzzy risk maps: simulation, steady states, and priorities"
)]
struct Cli {
    /// Tolerance for steady-state detection.
    #[arg(long, global = true, default_value_t = 1e-6)]
    epsilon: f64,

    /// Largest cycle period (in steps) searched for.
    #[arg(long, global = true, default_value_t = 20)]
    max_period: usize,

    /// Bounding function applied at every node update.
    #[arg(long, global = true, value_enum, default_value_t = ThresholdArg::Sigmoid)]
    threshold: ThresholdArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ThresholdArg {
    Sigmoid,
    TanhUnit,
    Clamp,
}

impl From<ThresholdArg> for ThresholdKind {
    fn from(arg: ThresholdArg) -> Self {
        match arg {
            ThresholdArg::Sigmoid => ThresholdKind::Sigmoid,
            ThresholdArg::TanhUnit => ThresholdKind::TanhUnit,
            ThresholdArg::Clamp => ThresholdKind::Clamp,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a template model file to get started.
    Init { path: PathBuf },

    /// Check a model file and report every problem found.
    Validate { model: PathBuf },

    /// Run the token simulation and emit the trace as CSV.
    Simulate {
        model: PathBuf,
        /// Step length in minutes (overrides the model file).
        #[arg(long)]
        step: Option<u32>,
        /// Horizon in minutes (overrides the model file).
        #[arg(long)]
        horizon: Option<u32>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        trace: Option<PathBuf>,
    },

    /// Classify the steady state and print the decision report.
    Analyze {
        model: PathBuf,
        /// Include the full independent-activation impact matrix.
        #[arg(long)]
        independent: bool,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        step: Option<u32>,
        #[arg(long)]
        horizon: Option<u32>,
    },

    /// Cross-check the token run against baseline methods.
    Compare {
        model: PathBuf,
        /// Compare settled values against the delay-free iteration (default).
        #[arg(long)]
        no_delay: bool,
        /// Compute score-based hazard indices from the expert tallies.
        #[arg(long)]
        fmea: bool,
        #[arg(long)]
        step: Option<u32>,
        #[arg(long)]
        horizon: Option<u32>,
    },
}

type CliError = Box<dyn std::error::Error>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let threshold = cli.threshold.into();
    match cli.command {
        Command::Init { path } => init(&path),
        Command::Validate { model } => validate(&model),
        Command::Simulate {
            model,
            step,
            horizon,
            trace,
        } => simulate_cmd(&model, step, horizon, trace.as_deref(), threshold),
        Command::Analyze {
            model,
            independent,
            report,
            step,
            horizon,
        } => analyze_cmd(
            &model,
            independent,
            report.as_deref(),
            step,
            horizon,
            threshold,
            cli.epsilon,
            cli.max_period,
        ),
        Command::Compare {
            model,
            no_delay,
            fmea,
            step,
            horizon,
        } => compare_cmd(
            &model,
            no_delay,
            fmea,
            step,
            horizon,
            threshold,
            cli.epsilon,
            cli.max_period,
        ),
    }
}

fn load(path: &Path) -> Result<PreparedCase, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|err| format!("cannot read {}: {err}", path.display()))?;
    Ok(parse_model_file(&text)?.prepare()?)
}

fn resolve_config(
    case: &PreparedCase,
    step: Option<u32>,
    horizon: Option<u32>,
    threshold: ThresholdKind,
) -> Result<SimulationConfig, CliError> {
    let step_min = step
        .or(case.simulation.map(|sim| sim.step_min))
        .ok_or("no step length: pass --step or add a [simulation] section")?;
    let horizon_min = horizon
        .or(case.simulation.map(|sim| sim.horizon_min))
        .ok_or("no horizon: pass --horizon or add a [simulation] section")?;
    Ok(SimulationConfig {
        step_min,
        horizon_min,
        threshold,
    })
}

/// Cycle search cannot look farther back than half the trace.
fn clamp_period(max_period: usize, trace: &SimulationTrace) -> usize {
    max_period.min(trace.rows.len() / 2)
}

fn init(path: &Path) -> Result<ExitCode, CliError> {
    if path.exists() {
        return Err(format!("{} already exists; refusing to overwrite", path.display()).into());
    }
    let text = format!(
        "# Risk model template. Replace the placeholder failure modes with your own.\n\
         # Node values come either from a direct `initial` risk value or from\n\
         # expert tally arrays (lowest linguistic grade first).\n\n{}",
        serialize_model(&template())
    );
    fs::write(path, text).map_err(|err| format!("cannot write {}: {err}", path.display()))?;
    println!("wrote model template to {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn template() -> ModelDocument {
    let scale = LinguisticScale::new(2).expect("2 is a valid half range");
    let tally = |counts: [u32; 5]| {
        ExpertTally::new(scale, counts.to_vec()).expect("template tallies are well formed")
    };
    ModelDocument {
        scale,
        weights: Some(
            RiskIndexWeights::new(0.5, 0.35, 0.15).expect("template weights are well formed"),
        ),
        simulation: Some(SimulationSettings {
            step_min: 5,
            horizon_min: 100,
        }),
        nodes: vec![
            NodeSpec {
                id: NodeId(1),
                name: "Pump cavitation".into(),
                init: NodeInit::Tallies {
                    occurrence: tally([2, 6, 8, 3, 1]),
                    severity: tally([0, 4, 9, 5, 2]),
                    detection: tally([1, 5, 9, 4, 1]),
                },
            },
            NodeSpec {
                id: NodeId(2),
                name: "Seal wear".into(),
                init: NodeInit::Direct(0.25),
            },
            NodeSpec {
                id: NodeId(3),
                name: "Bearing overheat".into(),
                init: NodeInit::Direct(-0.4),
            },
        ],
        arcs: vec![
            tokenfcm::CausalArc {
                source: NodeId(1),
                target: NodeId(2),
                weight: 0.6,
                delay_min: 5,
            },
            tokenfcm::CausalArc {
                source: NodeId(2),
                target: NodeId(3),
                weight: 0.5,
                delay_min: 10,
            },
            tokenfcm::CausalArc {
                source: NodeId(3),
                target: NodeId(1),
                weight: -0.3,
                delay_min: 15,
            },
        ],
        groups: vec![
            GroupSpec {
                label: "Hydraulics".into(),
                members: vec![NodeId(1), NodeId(2)],
            },
            GroupSpec {
                label: "Drivetrain".into(),
                members: vec![NodeId(3)],
            },
        ],
    }
}

fn validate(path: &Path) -> Result<ExitCode, CliError> {
    let case = load(path)?;
    let simulation = case
        .simulation
        .map(|sim| format!(", {} min steps over {} min", sim.step_min, sim.horizon_min))
        .unwrap_or_default();
    println!(
        "model OK: {} nodes, {} arcs, {} groups{}",
        case.model.nodes.len(),
        case.model.arcs.len(),
        case.groups.len(),
        simulation
    );
    Ok(ExitCode::SUCCESS)
}

fn simulate_cmd(
    path: &Path,
    step: Option<u32>,
    horizon: Option<u32>,
    trace_path: Option<&Path>,
    threshold: ThresholdKind,
) -> Result<ExitCode, CliError> {
    let case = load(path)?;
    let config = resolve_config(&case, step, horizon, threshold)?;
    let trace = simulate(&case.model, &case.model.initial_values(), &config)?;
    let csv = emit_trace_csv(&trace);
    match trace_path {
        Some(out) => {
            fs::write(out, csv)
                .map_err(|err| format!("cannot write {}: {err}", out.display()))?;
            println!(
                "wrote trace with {} rows ({} min steps) to {}",
                trace.rows.len(),
                config.step_min,
                out.display()
            );
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn analyze_cmd(
    path: &Path,
    independent: bool,
    report_path: Option<&Path>,
    step: Option<u32>,
    horizon: Option<u32>,
    threshold: ThresholdKind,
    epsilon: f64,
    max_period: usize,
) -> Result<ExitCode, CliError> {
    let case = load(path)?;
    let config = resolve_config(&case, step, horizon, threshold)?;
    let rpns = case.model.initial_values();
    let trace = simulate(&case.model, &rpns, &config)?;
    let steady = detect_steady_state(&trace, epsilon, clamp_period(max_period, &trace))?;
    if steady == SteadyState::NotConverged {
        println!("steady state: no steady state within the horizon");
        println!("no settled risk values; rerun with a longer --horizon");
        return Ok(ExitCode::from(2));
    }
    let drpns = compute_drpn(&trace, epsilon, clamp_period(max_period, &trace))?;
    let matrix = match impact_matrix(&case.model, &rpns, &config, epsilon, max_period) {
        Ok(matrix) => matrix,
        Err(AnalysisError::NotConverged) => {
            println!("steady state: {}", steady_summary(&steady));
            println!("an independent activation run did not settle; rerun with a longer --horizon");
            return Ok(ExitCode::from(2));
        }
        Err(err) => return Err(err.into()),
    };
    let ids = case.model.node_ids();
    let most = most_impacted(&matrix, &ids);
    let table = build_report(&case.model.nodes, &rpns, &drpns, &most)?;
    let impact = independent.then_some((ids.as_slice(), matrix.as_slice()));
    let text = render_report(&steady, &table, impact);
    print!("{text}");
    if let Some(out) = report_path {
        fs::write(out, &text).map_err(|err| format!("cannot write {}: {err}", out.display()))?;
        println!("wrote report to {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn steady_summary(steady: &SteadyState) -> String {
    match steady {
        SteadyState::Fixed { onset_min } => format!("fixed point from minute {onset_min}"),
        SteadyState::Cycle { period, onset_min } => {
            format!("limit cycle of period {period} steps from minute {onset_min}")
        }
        SteadyState::NotConverged => "no steady state within the horizon".to_string(),
    }
}

#[allow(clippy::too_many_arguments)]
fn compare_cmd(
    path: &Path,
    no_delay: bool,
    fmea: bool,
    step: Option<u32>,
    horizon: Option<u32>,
    threshold: ThresholdKind,
    epsilon: f64,
    max_period: usize,
) -> Result<ExitCode, CliError> {
    let case = load(path)?;
    let run_no_delay = no_delay || !fmea;
    let mut exit = ExitCode::SUCCESS;

    if run_no_delay {
        let config = resolve_config(&case, step, horizon, threshold)?;
        let rpns = case.model.initial_values();
        let token_trace = simulate(&case.model, &rpns, &config)?;
        let classic_trace = classic_fcm_iterate(&case.model, &rpns, &config)?;
        let token = settled(&token_trace, epsilon, max_period);
        let classic = settled(&classic_trace, epsilon, max_period);
        if token.is_none() || classic.is_none() {
            exit = ExitCode::from(2);
        }

        println!("settled values: delay-aware tokens vs delay-free iteration");
        println!("node | failure mode | with delays | delay-free | difference");
        for (i, node) in case.model.nodes.iter().enumerate() {
            let cell = |values: &Option<Vec<f64>>| {
                values
                    .as_ref()
                    .map_or("n/a".to_string(), |v| fmt_sig6(v[i]))
            };
            let difference = match (&token, &classic) {
                (Some(t), Some(c)) => fmt_sig6(t[i] - c[i]),
                _ => "n/a".to_string(),
            };
            println!(
                "{} | {} | {} | {} | {}",
                node.id,
                node.name,
                cell(&token),
                cell(&classic),
                difference
            );
        }
        if exit != ExitCode::SUCCESS {
            println!("(n/a: run did not settle within the horizon)");
        }
    }

    if fmea {
        if run_no_delay {
            println!();
        }
        let report = score_based_hazards(&case)?;
        println!("score-based hazard indices");
        println!("node | group | direct hazard | adjusted hazard");
        for entry in &report.entries {
            println!(
                "{} | {} | {} | {}",
                entry.node,
                entry.group,
                fmt_sig6(entry.direct_hazard),
                fmt_sig6(entry.adjusted_hazard)
            );
        }
        println!();
        println!("group | total hazard");
        for (label, total) in &report.group_totals {
            println!("{} | {}", label, fmt_sig6(*total));
        }
    }

    Ok(exit)
}

fn settled(trace: &SimulationTrace, epsilon: f64, max_period: usize) -> Option<Vec<f64>> {
    compute_drpn(trace, epsilon, clamp_period(max_period, trace)).ok()
}

/// Defuzzifies per-node tallies into scores and folds in the causal arcs as
/// influence weights.
fn score_based_hazards(case: &PreparedCase) -> Result<tokenfcm::FmeaReport, CliError> {
    if case.groups.is_empty() {
        return Err("score-based hazards need a [[groups]] section covering every node".into());
    }
    let mut inputs = Vec::with_capacity(case.model.nodes.len());
    for (node, tallies) in case.model.nodes.iter().zip(&case.tallies) {
        let Some((occurrence, severity, detection)) = tallies else {
            return Err(format!(
                "score-based hazards need expert tallies for every node; {} has a direct value",
                node.id
            )
            .into());
        };
        let group = case
            .groups
            .iter()
            .find(|group| group.members.contains(&node.id))
            .ok_or_else(|| format!("{} is not a member of any group", node.id))?;
        let score = |tally: &ExpertTally| -> Result<f64, CliError> {
            Ok(TermDistribution::from_tally(tally, case.scale)?.defuzzify())
        };
        inputs.push(FmeaInput {
            node: node.id,
            group: group.label.clone(),
            occurrence: score(occurrence)?,
            severity: score(severity)?,
            detection: score(detection)?,
        });
    }
    let influences: Vec<(NodeId, Vec<(NodeId, f64)>)> = case
        .model
        .nodes
        .iter()
        .map(|node| {
            let incoming = case
                .model
                .arcs
                .iter()
                .filter(|arc| arc.target == node.id)
                .map(|arc| (arc.source, arc.weight))
                .collect();
            (node.id, incoming)
        })
        .collect();
    Ok(fmea_hazards(&inputs, &influences)?)
}
