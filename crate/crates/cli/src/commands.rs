//! The four commands behind the `robustrate` binary.
//!
//! Data goes to files (or standard output for scenario reports);
//! diagnostics go to standard error. Numeric CSV fields use 17
//! significant digits so output files round-trip and diff exactly.
//!
//! Exit codes returned from here: 0 success, 2 engine ran out of
//! iterations (the output file is still written, rows carry
//! `converged=false`). Input problems (exit 1) and internal failures
//! (exit 3) surface as [`CliError`] values instead.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use robustrate_core::engine::{initialize, run, RunResult};
use robustrate_core::evaluate::{attack_sweep, Method, SweepReport};
use robustrate_core::graph::VoteGraph;
use robustrate_core::ingest::{load_votes, Sidecar};
use robustrate_core::rating::{max_credibility_score, score_all};
use robustrate_core::simulate::{gen_scenario1, gen_scenario2, AttackPlan, Mode};
use robustrate_core::{EngineError, EvalError, IngestError};

use crate::config::{ConfigError, RunConfig};

/// A command failure with a definite exit code. Non-convergence is not an
/// error — commands return exit code 2 through their `Ok` value.
#[derive(Debug, Error)]
pub enum CliError {
    /// Problems in what the user handed us: files, flags, config. Exit 1.
    #[error("{0}")]
    Input(String),
    /// Bugs and environment failures: I/O on outputs, impossible states.
    /// Exit 3.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            // A mismatch can only come from wiring two runs together wrong.
            EngineError::DimensionMismatch => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Engine(inner) => inner.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

/// 17 significant digits: enough for exact f64 round trips, so repeated
/// runs diff byte-identically.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn load_nonempty(input: &Path, cfg: &RunConfig) -> Result<(VoteGraph, Sidecar), CliError> {
    let (graph, sidecar) = load_votes(input, &cfg.level_mapping())?;
    if graph.total_votes() == 0 {
        return Err(CliError::Input(format!(
            "no votes in {}",
            input.display()
        )));
    }
    Ok((graph, sidecar))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>, CliError> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?)
}

/// `rate`: rate every list of a vote file and write one CSV row per list.
pub fn cmd_rate(input: &Path, output: &Path, cfg: &RunConfig) -> Result<u8, CliError> {
    let (graph, sidecar) = load_nonempty(input, cfg)?;
    let result = run(&graph, &cfg.engine_params())?;
    let scores = score_all(&graph, &result.rho, cfg.p_exponent);

    let mut w = csv_writer(output)?;
    w.write_record([
        "list_id",
        "max_credibility_level",
        "weighted_score",
        "average_score",
        "majority_level",
        "iterations",
        "converged",
    ])?;
    for score in &scores {
        debug_assert!(!score.no_data, "ingested lists always carry votes");
        w.write_record([
            sidecar.lists[score.list].as_str(),
            &score.max_credibility_level.to_string(),
            &fmt_float(score.weighted_score),
            &fmt_float(score.average_score),
            &score.majority_level.to_string(),
            &result.iterations.to_string(),
            if result.converged { "true" } else { "false" },
        ])?;
    }
    w.flush()?;

    report_convergence("rate", &result);
    Ok(if result.converged { 0 } else { 2 })
}

/// `sweep`: inject a growing collusion attack and write the RMS score
/// movement of every method per attack fraction.
pub fn cmd_sweep(
    input: &Path,
    output: &Path,
    mode: Mode,
    fractions: &str,
    cfg: &RunConfig,
) -> Result<u8, CliError> {
    let (graph, _) = load_nonempty(input, cfg)?;
    let fractions = parse_fractions(fractions)?;
    let plan = match mode {
        Mode::Promotion => AttackPlan::promotion(0.0, cfg.levels),
        Mode::Demotion => AttackPlan::demotion(0.0),
    };
    let methods = [Method::Ours, Method::Averaging, Method::Majority]
        .into_iter()
        .collect();

    // The sweep computes its own clean baselines; this extra run only
    // recovers the convergence flag, which the report does not carry.
    let clean = run(&graph, &cfg.engine_params())?;
    let report = attack_sweep(
        &graph,
        &plan,
        &fractions,
        &methods,
        &cfg.engine_params(),
        cfg.score_method,
        cfg.seed,
    )?;
    if report.target_count == 0 {
        eprintln!(
            "warning: no list matches the {} target rule; every RMS value is zero",
            mode_name(mode)
        );
    }
    write_sweep(output, &report)?;

    report_convergence("sweep (clean run)", &clean);
    Ok(if clean.converged { 0 } else { 2 })
}

fn write_sweep(output: &Path, report: &SweepReport) -> Result<(), CliError> {
    let mut w = csv_writer(output)?;
    w.write_record([
        "fraction",
        "rms_ours",
        "rms_averaging",
        "rms_majority",
        "target_count",
    ])?;
    for (idx, &fraction) in report.fractions.iter().enumerate() {
        w.write_record([
            &fmt_float(fraction),
            &fmt_float(report.rms_by_method[&Method::Ours][idx]),
            &fmt_float(report.rms_by_method[&Method::Averaging][idx]),
            &fmt_float(report.rms_by_method[&Method::Majority][idx]),
            &report.target_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `scenario`: generate a named fixture, run the engine, and print the
/// credibility matrix with per-list winners.
pub fn cmd_scenario(name: &str, output: Option<&Path>, cfg: &RunConfig) -> Result<u8, CliError> {
    let graph = match name {
        "scenario1" => gen_scenario1(),
        "scenario2" => gen_scenario2(cfg.seed),
        _ => {
            return Err(CliError::Input(format!(
                "unknown scenario {name:?} (expected scenario1 or scenario2)"
            )));
        }
    };
    let result = run(&graph, &cfg.engine_params())?;
    let report = render_scenario_report(name, &graph, &result);

    let mut stdout = std::io::stdout().lock();
    stdout.write_all(report.as_bytes())?;
    stdout.flush()?;
    if let Some(path) = output {
        std::fs::write(path, report.as_bytes())?;
    }
    Ok(if result.converged { 0 } else { 2 })
}

fn render_scenario_report(name: &str, graph: &VoteGraph, result: &RunResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario {name}: {} voters, {} lists",
        graph.num_voters(),
        graph.num_lists()
    );
    let _ = writeln!(
        out,
        "converged {}, iterations {}, residual {:e}",
        result.converged, result.iterations, result.final_residual
    );
    if name == "scenario2" {
        // The count-based start on the contested list, before any trust
        // feedback.
        let start = initialize(graph);
        let l = graph.num_lists() - 1;
        let cells: Vec<String> = (0..graph.items_in(l))
            .map(|i| format!("{:.4}", start.get(l, i)))
            .collect();
        let _ = writeln!(out, "initial L{} credibilities: {}", l + 1, cells.join(" "));
    }
    let _ = writeln!(out, "credibility matrix (rows lists, columns levels):");
    for l in 0..graph.num_lists() {
        let cells: Vec<String> = (0..graph.items_in(l))
            .map(|i| format!("{:.4}", result.rho.get(l, i)))
            .collect();
        let winner = max_credibility_score(result.rho.list(l))
            .map(|level| level.to_string())
            .unwrap_or_else(|_| "none".to_string());
        let _ = writeln!(out, "L{}  {}  winner {}", l + 1, cells.join(" "), winner);
    }
    out
}

/// `export`: re-emit a loaded vote file as normalized `user,item,level`
/// rows, plus optional identifier sidecar tables.
pub fn cmd_export(
    input: &Path,
    output: &Path,
    voters_sidecar: Option<&Path>,
    lists_sidecar: Option<&Path>,
    cfg: &RunConfig,
) -> Result<u8, CliError> {
    let (graph, sidecar) = load_nonempty(input, cfg)?;

    let mut w = csv_writer(output)?;
    w.write_record(["user", "item", "level"])?;
    for voter in 0..graph.num_voters() {
        for &(list, item) in graph.votes_by(voter) {
            w.write_record([
                sidecar.voters[voter].as_str(),
                sidecar.lists[list].as_str(),
                &(item + 1).to_string(),
            ])?;
        }
    }
    w.flush()?;

    if let Some(path) = voters_sidecar {
        write_sidecar(path, &sidecar.voters)?;
    }
    if let Some(path) = lists_sidecar {
        write_sidecar(path, &sidecar.lists)?;
    }
    Ok(0)
}

fn write_sidecar(path: &Path, table: &[String]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(["internal_index", "external_id"])?;
    for (idx, id) in table.iter().enumerate() {
        w.write_record([&idx.to_string(), id.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_fractions(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("unparsable fraction {:?}", part.trim())))
        })
        .collect()
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Promotion => "promotion",
        Mode::Demotion => "demotion",
    }
}

fn report_convergence(what: &str, result: &RunResult) {
    if result.converged {
        eprintln!(
            "{what}: converged in {} iterations, residual {:e}, line-search activations {}",
            result.iterations, result.final_residual, result.line_search_activations
        );
    } else {
        eprintln!(
            "warning: {what}: no convergence within {} iterations (residual {:e}); results are the last iterate",
            result.iterations, result.final_residual
        );
    }
}
