//! The iterative credibility/trust fixed point.
//!
//! Starting from vote-count credibilities, the engine alternates two maps
//! until the credibility state stops moving:
//!
//! * trust:       `t[r]  = Σ rho[l][i]` over the cells voter `r` chose;
//! * credibility: `rho'[l][i] = (Σ_{r→li} t[r]^α) / ‖…‖₂` per voted list.
//!
//! The iteration ascends the objective `F(ρ) = Σ_r T_r(ρ)^{α+1}` on the
//! product of per-list unit spheres; each credibility update lands on the
//! normalized gradient, which is the fixed-point condition. A line-search
//! safeguard backs the ascent step off to an interior stationary point if
//! one ever appears between the current state and the proposed one. For the
//! power weighting `x^α` the 1-D section is convex with nonnegative slope
//! at 0, so the safeguard provably never fires — it is kept because the
//! termination argument is stated in terms of the safeguarded step, and the
//! activation count it reports is a cheap sanity signal.
//!
//! Determinism: all accumulations run in a fixed order (voters ascending
//! within a cell, lists then items for norms), so identical inputs produce
//! bit-identical states.

use thiserror::Error;

use crate::graph::VoteGraph;
use crate::state::{CredibilityState, EngineParams, ParamError, TrustState};

/// Bracket tolerance for the golden-section search over the step length.
const LINE_SEARCH_TOL: f64 = 1e-12;
/// Step lengths closer than this to 0 or 1 are treated as boundary hits
/// (no interior stationary point).
const LINE_SEARCH_BOUNDARY: f64 = 1e-9;

/// Errors raised by the engine.
#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    /// A state object does not match the graph's shape.
    #[error("state dimensions do not match the graph")]
    DimensionMismatch,
    /// Every voter of a voted list has zero trust, so the credibility
    /// update cannot be normalized. This cannot arise from `run`'s own
    /// count-based start — voted cells keep strictly positive credibility
    /// through every iteration — but hand-built trust values can reach it.
    #[error("every voter on list {list} has zero trust; credibility update is degenerate")]
    AllZeroTrustOnList { list: usize },
    #[error(transparent)]
    InvalidParams(#[from] ParamError),
}

/// What to do when a voted list's credibility update hits an all-zero
/// trust denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroTrustPolicy {
    /// Surface [`EngineError::AllZeroTrustOnList`]. Degenerate inputs should
    /// be visible, not papered over.
    #[default]
    Error,
    /// Substitute the affected list's count-based starting credibilities.
    CountFallback,
}

/// Outcome of a full engine run.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// Final credibility state (converged when `converged` is set).
    pub rho: CredibilityState,
    /// Trust of the final state.
    pub trust: TrustState,
    /// Safeguarded steps performed.
    pub iterations: usize,
    /// `F(ρ)` before the first step and after every step; never decreasing
    /// beyond float noise.
    pub objective_trace: Vec<f64>,
    /// `‖ρ^(n+1) − ρ^(n)‖₂` of the last step; `< ε` iff `converged`.
    pub final_residual: f64,
    /// How many steps the line-search safeguard shortened. Expected 0 for
    /// the power weighting; a nonzero count flags numerically unusual runs.
    pub line_search_activations: usize,
    /// False when the iteration cap was reached first; the fields above
    /// then describe the partial state.
    pub converged: bool,
}

fn check_rho_shape(graph: &VoteGraph, rho: &CredibilityState) -> Result<(), EngineError> {
    if rho.num_lists() != graph.num_lists() {
        return Err(EngineError::DimensionMismatch);
    }
    for l in 0..graph.num_lists() {
        if rho.list(l).len() != graph.items_in(l) {
            return Err(EngineError::DimensionMismatch);
        }
    }
    Ok(())
}

/// Normalizes raw per-list vectors onto the unit sphere, zeroing unvoted
/// lists. `fallback` supplies substitute rows for voted lists whose raw
/// vector is all zero; without it such a list is an error.
fn normalize_per_list(
    graph: &VoteGraph,
    mut raw: Vec<Vec<f64>>,
    fallback: Option<&CredibilityState>,
) -> Result<CredibilityState, EngineError> {
    let mut no_data = vec![false; graph.num_lists()];
    for (l, row) in raw.iter_mut().enumerate() {
        if !graph.has_votes(l) {
            row.iter_mut().for_each(|x| *x = 0.0);
            no_data[l] = true;
            continue;
        }
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            match fallback {
                Some(init) => row.copy_from_slice(init.list(l)),
                None => return Err(EngineError::AllZeroTrustOnList { list: l }),
            }
        } else {
            row.iter_mut().for_each(|x| *x /= norm);
        }
    }
    Ok(CredibilityState::new(raw, no_data))
}

/// Count-based starting credibilities: each voted list's vote counts,
/// normalized to unit 2-norm. Unvoted lists are all-zero and flagged.
pub fn initialize(graph: &VoteGraph) -> CredibilityState {
    let counts: Vec<Vec<f64>> = (0..graph.num_lists())
        .map(|l| {
            (0..graph.items_in(l))
                .map(|i| graph.count(l, i) as f64)
                .collect()
        })
        .collect();
    normalize_per_list(graph, counts, None)
        .expect("voted lists have positive vote counts")
}

/// Per-voter sums of `rho` over each voter's chosen cells, in ascending
/// list order. Shared by the trust update and the line-search section.
fn vote_sums(graph: &VoteGraph, rho: &CredibilityState) -> Vec<f64> {
    // Folded from +0.0 explicitly: f64's `Sum` starts at -0.0, which would
    // stamp a negative zero on every empty sum.
    (0..graph.num_voters())
        .map(|r| {
            graph
                .votes_by(r)
                .iter()
                .fold(0.0, |acc, &(l, i)| acc + rho.get(l, i))
        })
        .collect()
}

/// Trust update: `t[r] = Σ rho[l][i]` over the cells voter `r` chose.
/// Voters with no votes get trust 0.
pub fn update_trust(graph: &VoteGraph, rho: &CredibilityState) -> Result<TrustState, EngineError> {
    check_rho_shape(graph, rho)?;
    Ok(TrustState::new(vote_sums(graph, rho)))
}

/// Raw (unnormalized) credibility masses: `Σ_{r→li} t[r]^α` per cell,
/// voters in ascending order.
fn trust_mass(graph: &VoteGraph, trust: &TrustState, alpha: f64) -> Vec<Vec<f64>> {
    // Explicit +0.0 fold for the same reason as in `vote_sums`: unvoted
    // cells must carry a plain zero, not `Sum`'s -0.0 identity.
    (0..graph.num_lists())
        .map(|l| {
            (0..graph.items_in(l))
                .map(|i| {
                    graph
                        .cell(l, i)
                        .iter()
                        .fold(0.0, |acc, &r| acc + trust.get(r).powf(alpha))
                })
                .collect()
        })
        .collect()
}

pub(crate) fn update_credibility_with(
    graph: &VoteGraph,
    trust: &TrustState,
    alpha: f64,
    fallback: Option<&CredibilityState>,
) -> Result<CredibilityState, EngineError> {
    if trust.num_voters() != graph.num_voters() {
        return Err(EngineError::DimensionMismatch);
    }
    let raw = trust_mass(graph, trust, alpha);
    normalize_per_list(graph, raw, fallback)
}

/// Credibility update: `rho'[l][i] = (Σ_{r→li} t[r]^α) / ‖…‖₂` per voted
/// list, leaving unvoted lists all-zero. With every trust equal to 1 this
/// reproduces [`initialize`] exactly.
pub fn update_credibility(
    graph: &VoteGraph,
    trust: &TrustState,
    alpha: f64,
) -> Result<CredibilityState, EngineError> {
    update_credibility_with(graph, trust, alpha, None)
}

/// The objective `F(ρ) = Σ_r T_r(ρ)^{α+1}` the iteration ascends.
/// Accepts any nonnegative state, normalized or not.
pub fn objective(graph: &VoteGraph, rho: &CredibilityState, alpha: f64) -> f64 {
    vote_sums(graph, rho)
        .into_iter()
        .fold(0.0, |acc, t| acc + t.powf(alpha + 1.0))
}

/// Gradient of [`objective`]: `∂F/∂ρ_li = (α+1) Σ_{r→li} T_r(ρ)^α`.
/// Nonnegative everywhere; cells nobody voted for get 0.
pub fn gradient(graph: &VoteGraph, rho: &CredibilityState, alpha: f64) -> Vec<Vec<f64>> {
    let trust = TrustState::new(vote_sums(graph, rho));
    let mut mass = trust_mass(graph, &trust, alpha);
    for row in &mut mass {
        for g in row {
            *g *= alpha + 1.0;
        }
    }
    mass
}

/// `‖a − b‖₂` over the voted lists of `graph`, lists then items order.
pub fn residual_norm(graph: &VoteGraph, a: &CredibilityState, b: &CredibilityState) -> f64 {
    let mut sum = 0.0;
    for l in 0..graph.num_lists() {
        if !graph.has_votes(l) {
            continue;
        }
        for i in 0..graph.items_in(l) {
            let d = a.get(l, i) - b.get(l, i);
            sum += d * d;
        }
    }
    sum.sqrt()
}

/// Safeguarded step from `rho` toward the proposed `rho_star`.
///
/// Examines the 1-D section `f(t) = F(ρ + t(ρ* − ρ))` on `[0, 1]` by
/// golden-section maximization. If the maximizer is interior — a
/// stationary point strictly between the states — the step stops there
/// and renormalizes per list; the returned flag is `true`. Otherwise
/// `rho_star` passes through unchanged (`false`). Trust is linear in the
/// state, so `f` is evaluated from two per-voter sums, never by rebuilding
/// states.
pub fn line_search_step(
    graph: &VoteGraph,
    rho: &CredibilityState,
    rho_star: &CredibilityState,
    alpha: f64,
) -> (CredibilityState, bool) {
    // Direction h = rho_star - rho over voted lists.
    let mut h = CredibilityState::zeros(graph);
    let mut h_norm2 = 0.0;
    for l in 0..graph.num_lists() {
        if !graph.has_votes(l) {
            continue;
        }
        for i in 0..graph.items_in(l) {
            let d = rho_star.get(l, i) - rho.get(l, i);
            h.list_mut(l)[i] = d;
            h_norm2 += d * d;
        }
    }
    if h_norm2 == 0.0 {
        return (rho.clone(), false);
    }

    // T_r(ρ + t·h) = a_r + t·b_r.
    let a = vote_sums(graph, rho);
    let b = vote_sums(graph, &h);
    let exponent = alpha + 1.0;
    // Both endpoints have nonnegative trust, so the interpolant is too;
    // clamp away the odd negative ulp before the fractional power.
    let f = |t: f64| -> f64 {
        a.iter()
            .zip(&b)
            .map(|(&ar, &br)| (ar + t * br).max(0.0).powf(exponent))
            .sum::<f64>()
    };

    // Golden-section maximization on [0, 1].
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > LINE_SEARCH_TOL {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let t_hat = 0.5 * (lo + hi);

    // A genuine interior maximum beats both endpoints by a real margin.
    // Near the fixed point the section is flat to float precision and the
    // bracketing comparisons run on ulp noise, parking t̂ at an arbitrary
    // interior value — that is not a stationary point, so the proposal
    // passes through.
    let f_end = f(0.0).max(f(1.0));
    let interior = t_hat > LINE_SEARCH_BOUNDARY
        && t_hat < 1.0 - LINE_SEARCH_BOUNDARY
        && f(t_hat) > f_end * (1.0 + 1e-12);
    if !interior {
        return (rho_star.clone(), false);
    }

    // Interior stationary point: stop there and renormalize per list.
    let stepped: Vec<Vec<f64>> = (0..graph.num_lists())
        .map(|l| {
            (0..graph.items_in(l))
                .map(|i| rho.get(l, i) + t_hat * h.get(l, i))
                .collect()
        })
        .collect();
    let state = normalize_per_list(graph, stepped, Some(rho))
        .expect("fallback supplied, normalization cannot fail");
    (state, true)
}

/// Runs the full iteration with the default [`ZeroTrustPolicy::Error`].
pub fn run(graph: &VoteGraph, params: &EngineParams) -> Result<RunResult, EngineError> {
    run_with_policy(graph, params, ZeroTrustPolicy::Error)
}

/// Runs the full iteration: count-based start, then safeguarded
/// trust/credibility updates until the state moves less than ε or the
/// iteration cap is hit. Hitting the cap is not an error — the partial
/// result comes back with `converged = false`.
pub fn run_with_policy(
    graph: &VoteGraph,
    params: &EngineParams,
    policy: ZeroTrustPolicy,
) -> Result<RunResult, EngineError> {
    params.validate()?;
    let init = initialize(graph);
    let fallback = match policy {
        ZeroTrustPolicy::Error => None,
        ZeroTrustPolicy::CountFallback => Some(init.clone()),
    };

    let mut rho = init;
    let mut trace = vec![objective(graph, &rho, params.alpha)];
    let mut activations = 0;
    let mut final_residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    for n in 1..=params.max_iters {
        let trust = update_trust(graph, &rho)?;
        let rho_star = update_credibility_with(graph, &trust, params.alpha, fallback.as_ref())?;
        let (next, activated) = line_search_step(graph, &rho, &rho_star, params.alpha);
        if activated {
            activations += 1;
        }
        final_residual = residual_norm(graph, &rho, &next);
        trace.push(objective(graph, &next, params.alpha));
        rho = next;
        iterations = n;
        if final_residual < params.epsilon {
            converged = true;
            break;
        }
    }

    let trust = update_trust(graph, &rho)?;
    Ok(RunResult {
        rho,
        trust,
        iterations,
        objective_trace: trace,
        final_residual,
        line_search_activations: activations,
        converged,
    })
}
