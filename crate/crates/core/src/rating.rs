//! Converting converged credibilities into rating scores, plus the two
//! baseline raters (averaging, majority) the robustness harness compares
//! against.
//!
//! Levels are one-based throughout this module: item `i` of a list is
//! rating level `i + 1`. Nothing upstream of here ever interprets that
//! ordering.

use thiserror::Error;

use crate::graph::VoteGraph;
use crate::state::CredibilityState;

/// A list carried no votes (or an all-zero credibility vector), so no
/// score exists. Surfaced as an error/flag, never as a sentinel value.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("list has no votes; no score available")]
pub struct NoData;

/// Which credibility-derived score a pipeline reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreMethod {
    /// [`weighted_score`] with the configured exponent p.
    #[default]
    Weighted,
    /// [`max_credibility_score`], as a level-valued score.
    MaxCredibility,
}

/// The selected credibility score on the common level scale.
pub fn credibility_score(rho_l: &[f64], method: ScoreMethod, p: f64) -> Result<f64, NoData> {
    match method {
        ScoreMethod::Weighted => weighted_score(rho_l, p),
        ScoreMethod::MaxCredibility => max_credibility_score(rho_l).map(|level| level as f64),
    }
}

/// All scores for one list. The numeric fields are meaningless when
/// `no_data` is set; consumers must branch on the flag.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingScore {
    pub list: usize,
    /// Level with the highest credibility (ties toward the lowest level).
    pub max_credibility_level: usize,
    /// Credibility-weighted level average `R = Σ ρ^p·i / Σ ρ^p`.
    pub weighted_score: f64,
    /// Plain arithmetic mean of the voted levels.
    pub average_score: f64,
    /// Most-voted level (ties toward the lowest level).
    pub majority_level: usize,
    pub no_data: bool,
}

/// The level whose credibility is highest; ties break toward the lowest
/// level. Errors on an all-zero vector.
pub fn max_credibility_score(rho_l: &[f64]) -> Result<usize, NoData> {
    let mut best_item = 0;
    let mut best = 0.0;
    for (i, &v) in rho_l.iter().enumerate() {
        // Strictly-greater keeps the lowest level on ties.
        if v > best {
            best = v;
            best_item = i;
        }
    }
    if best == 0.0 {
        return Err(NoData);
    }
    Ok(best_item + 1)
}

/// Credibility-weighted score `R = Σ_i ρ_li^p · i / Σ_j ρ_lj^p` over
/// one-based levels. Invariant under positive rescaling of `rho_l`; tends
/// to [`max_credibility_score`] as `p` grows.
pub fn weighted_score(rho_l: &[f64], p: f64) -> Result<f64, NoData> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &v) in rho_l.iter().enumerate() {
        let w = v.powf(p);
        num += w * (i + 1) as f64;
        den += w;
    }
    if den == 0.0 {
        return Err(NoData);
    }
    Ok(num / den)
}

/// Arithmetic mean of the levels voted on list `l`. Integer accumulation,
/// so recomputing from raw counts reproduces it exactly.
pub fn average_baseline(graph: &VoteGraph, list: usize) -> Result<f64, NoData> {
    let votes = graph.votes_on(list);
    if votes == 0 {
        return Err(NoData);
    }
    let mut level_sum: u64 = 0;
    for i in 0..graph.items_in(list) {
        level_sum += ((i + 1) * graph.count(list, i)) as u64;
    }
    Ok(level_sum as f64 / votes as f64)
}

/// The most-voted level on list `l`; ties break toward the lowest level.
pub fn majority_baseline(graph: &VoteGraph, list: usize) -> Result<usize, NoData> {
    if graph.votes_on(list) == 0 {
        return Err(NoData);
    }
    let mut best_level = 0;
    let mut best_count = 0;
    for i in 0..graph.items_in(list) {
        let c = graph.count(list, i);
        if c > best_count {
            best_count = c;
            best_level = i + 1;
        }
    }
    Ok(best_level)
}

/// Bundles every score for one list; lists without votes come back flagged
/// `no_data` with zeroed numeric fields.
pub fn score_list(
    graph: &VoteGraph,
    rho: &CredibilityState,
    list: usize,
    p: f64,
) -> RatingScore {
    if !graph.has_votes(list) || rho.is_no_data(list) {
        return RatingScore {
            list,
            max_credibility_level: 0,
            weighted_score: 0.0,
            average_score: 0.0,
            majority_level: 0,
            no_data: true,
        };
    }
    RatingScore {
        list,
        max_credibility_level: max_credibility_score(rho.list(list))
            .expect("voted list has positive credibility"),
        weighted_score: weighted_score(rho.list(list), p)
            .expect("voted list has positive credibility"),
        average_score: average_baseline(graph, list).expect("list has votes"),
        majority_level: majority_baseline(graph, list).expect("list has votes"),
        no_data: false,
    }
}

/// [`score_list`] across every list of the graph.
pub fn score_all(graph: &VoteGraph, rho: &CredibilityState, p: f64) -> Vec<RatingScore> {
    (0..graph.num_lists())
        .map(|l| score_list(graph, rho, l, p))
        .collect()
}
