//! RMS robustness measurement: how far each rating method moves under a
//! collusion attack of growing size.
//!
//! The harness rates the clean graph once per method, then re-rates after
//! injecting each attack fraction and reports the root-mean-square score
//! difference across *all* comparable lists — non-target lists count too,
//! because under credibility weighting an attack shifts trust globally and
//! the baselines' zero movement there is part of the comparison.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::engine::{run, EngineError};
use crate::graph::VoteGraph;
use crate::state::EngineParams;
use crate::rating::{average_baseline, credibility_score, majority_baseline, ScoreMethod};
use crate::simulate::{inject_attack, select_targets, AttackPlan, Mode};

/// Errors from the evaluation harness.
#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    /// No list is comparable (all no-data); RMS is undefined.
    #[error("no comparable lists; RMS is undefined")]
    EmptyComparison,
    /// Sweep fractions must be strictly ascending and start at 0.
    #[error("attack fractions must be strictly ascending and start at 0")]
    BadFractions,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A rating method under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    /// Engine credibilities aggregated by the configured score.
    Ours,
    Averaging,
    Majority,
}

impl Method {
    /// Stable lowercase name used in reports and CSV columns.
    pub fn name(self) -> &'static str {
        match self {
            Method::Ours => "ours",
            Method::Averaging => "averaging",
            Method::Majority => "majority",
        }
    }
}

/// Attack-sweep outcome: one RMS series per method, aligned with the
/// fraction grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub mode: Mode,
    /// The attack fractions, ascending from 0.
    pub fractions: Vec<f64>,
    /// RMS per method, same length as `fractions`; entry 0 is always 0.
    pub rms_by_method: BTreeMap<Method, Vec<f64>>,
    /// How many lists the plan targeted.
    pub target_count: usize,
}

/// Root-mean-square difference between two aligned score vectors.
/// Callers exclude no-data lists from both sides first.
pub fn rms_diff(before: &[f64], after: &[f64]) -> Result<f64, EvalError> {
    assert_eq!(before.len(), after.len(), "score vectors must align");
    if before.is_empty() {
        return Err(EvalError::EmptyComparison);
    }
    let sum: f64 = before
        .iter()
        .zip(after)
        .map(|(b, a)| (a - b) * (a - b))
        .sum();
    Ok((sum / before.len() as f64).sqrt())
}

/// Scores every comparable list (`lists`) of `graph` with one method.
fn method_scores(
    graph: &VoteGraph,
    lists: &[usize],
    method: Method,
    params: &EngineParams,
    score: ScoreMethod,
) -> Result<Vec<f64>, EvalError> {
    match method {
        Method::Ours => {
            let result = run(graph, params)?;
            lists
                .iter()
                .map(|&l| {
                    credibility_score(result.rho.list(l), score, params.p_exponent)
                        .map_err(|_| EvalError::EmptyComparison)
                })
                .collect()
        }
        Method::Averaging => Ok(lists
            .iter()
            .map(|&l| average_baseline(graph, l).expect("list voted in clean graph"))
            .collect()),
        Method::Majority => Ok(lists
            .iter()
            .map(|&l| majority_baseline(graph, l).expect("list voted in clean graph") as f64)
            .collect()),
    }
}

/// Runs the full attack sweep.
///
/// Targets are selected once on the clean graph, as an attacker reading
/// today's scores would. For each fraction the attack is injected fresh
/// (per-fraction seed = `seed` + fraction index) and every requested
/// method is re-scored against its own clean baseline. RMS runs over all
/// lists voted in the clean graph.
pub fn attack_sweep(
    graph: &VoteGraph,
    plan_template: &AttackPlan,
    fractions: &[f64],
    methods: &BTreeSet<Method>,
    params: &EngineParams,
    score: ScoreMethod,
    seed: u64,
) -> Result<SweepReport, EvalError> {
    if fractions.first() != Some(&0.0) || fractions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::BadFractions);
    }
    let lists: Vec<usize> = (0..graph.num_lists())
        .filter(|&l| graph.has_votes(l))
        .collect();
    if lists.is_empty() {
        return Err(EvalError::EmptyComparison);
    }
    let targets = select_targets(graph, plan_template);

    let mut before: BTreeMap<Method, Vec<f64>> = BTreeMap::new();
    for &m in methods {
        before.insert(m, method_scores(graph, &lists, m, params, score)?);
    }

    let mut rms_by_method: BTreeMap<Method, Vec<f64>> =
        methods.iter().map(|&m| (m, Vec::new())).collect();
    for (idx, &fraction) in fractions.iter().enumerate() {
        let plan = AttackPlan {
            fraction,
            ..*plan_template
        };
        let attacked = inject_attack(graph, &plan, &targets, seed.wrapping_add(idx as u64));
        for &m in methods {
            let after = method_scores(&attacked, &lists, m, params, score)?;
            rms_by_method
                .get_mut(&m)
                .expect("method present")
                .push(rms_diff(&before[&m], &after)?);
        }
    }

    Ok(SweepReport {
        mode: plan_template.mode,
        fractions: fractions.to_vec(),
        rms_by_method,
        target_count: targets.len(),
    })
}
