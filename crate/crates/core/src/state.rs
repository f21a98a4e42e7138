//! Engine state: per-list credibility vectors, per-voter trust, parameters.

use thiserror::Error;

use crate::graph::VoteGraph;

/// Invalid [`EngineParams`] field values.
#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("alpha must be >= 1 (got {0})")]
    Alpha(f64),
    #[error("epsilon must be > 0 (got {0})")]
    Epsilon(f64),
    #[error("max_iters must be >= 1")]
    MaxIters,
    #[error("p_exponent must be >= 1 (got {0})")]
    PExponent(f64),
}

/// Tunables of the iterative engine and the score aggregation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineParams {
    /// Discrimination exponent α applied to trust in the credibility update.
    /// Larger values penalize dissent from community sentiment more strongly.
    pub alpha: f64,
    /// Termination threshold ε on the credibility change 2-norm per iteration.
    pub epsilon: f64,
    /// Iteration cap; hitting it yields a result flagged as not converged.
    pub max_iters: usize,
    /// Exponent p of the weighted rating score.
    pub p_exponent: f64,
}

impl Default for EngineParams {
    /// α = 2, ε = 1e-9, 200 iterations, p = 2. Well-behaved inputs converge
    /// in a few dozen iterations, so the cap leaves generous headroom.
    fn default() -> Self {
        Self {
            alpha: 2.0,
            epsilon: 1e-9,
            max_iters: 200,
            p_exponent: 2.0,
        }
    }
}

impl EngineParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.alpha < 1.0 || self.alpha.is_nan() {
            return Err(ParamError::Alpha(self.alpha));
        }
        if self.epsilon <= 0.0 || self.epsilon.is_nan() {
            return Err(ParamError::Epsilon(self.epsilon));
        }
        if self.max_iters < 1 {
            return Err(ParamError::MaxIters);
        }
        if self.p_exponent < 1.0 || self.p_exponent.is_nan() {
            return Err(ParamError::PExponent(self.p_exponent));
        }
        Ok(())
    }
}

/// Per-list credibility vectors ρ.
///
/// `rho[l][i]` is the community-approval weight of item `i` on list `l`.
/// Every list that received votes is kept on the unit sphere (2-norm 1);
/// lists without votes stay all-zero and are flagged `no_data`.
#[derive(Debug, Clone, PartialEq)]
pub struct CredibilityState {
    rho: Vec<Vec<f64>>,
    no_data: Vec<bool>,
}

impl CredibilityState {
    pub fn new(rho: Vec<Vec<f64>>, no_data: Vec<bool>) -> Self {
        assert_eq!(rho.len(), no_data.len(), "one flag per list");
        Self { rho, no_data }
    }

    /// All-zero state shaped like `graph`, with unvoted lists flagged.
    pub fn zeros(graph: &VoteGraph) -> Self {
        let rho = (0..graph.num_lists())
            .map(|l| vec![0.0; graph.items_in(l)])
            .collect();
        let no_data = (0..graph.num_lists()).map(|l| !graph.has_votes(l)).collect();
        Self { rho, no_data }
    }

    pub fn num_lists(&self) -> usize {
        self.rho.len()
    }

    pub fn list(&self, l: usize) -> &[f64] {
        &self.rho[l]
    }

    pub fn list_mut(&mut self, l: usize) -> &mut [f64] {
        &mut self.rho[l]
    }

    pub fn get(&self, l: usize, i: usize) -> f64 {
        self.rho[l][i]
    }

    /// Whether list `l` carried no votes (all-zero credibility by construction).
    pub fn is_no_data(&self, l: usize) -> bool {
        self.no_data[l]
    }

    /// 2-norm of list `l`'s credibility vector.
    pub fn list_norm(&self, l: usize) -> f64 {
        self.rho[l].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Flat view in (list, item) order; the engine's canonical residual order.
    pub fn iter_all(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rho
            .iter()
            .enumerate()
            .flat_map(|(l, row)| row.iter().enumerate().map(move |(i, &v)| (l, i, v)))
    }
}

/// Per-voter trustworthiness T.
///
/// `t[r]` is the sum of the credibilities of every item voter `r` chose —
/// a measure of concurrence with community sentiment. Bounded by the number
/// of lists the voter voted on, since each credibility is at most 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustState {
    t: Vec<f64>,
}

impl TrustState {
    pub fn new(t: Vec<f64>) -> Self {
        Self { t }
    }

    pub fn num_voters(&self) -> usize {
        self.t.len()
    }

    pub fn get(&self, voter: usize) -> f64 {
        self.t[voter]
    }

    pub fn values(&self) -> &[f64] {
        &self.t
    }
}
