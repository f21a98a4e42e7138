//! A collusion-resistant rating engine.
//!
//! Most aggregate rating schemes — averages, majority counts — weigh every
//! voter equally, which makes them cheap to manipulate: a block of
//! coordinated accounts moves the average by exactly its size. This crate
//! rates by consensus instead. Each voter places one vote per list
//! (a level on a 1..n scale, modelled as one item out of n); the engine
//! then alternates between two updates until they agree with each other:
//!
//! * a voter's **trust** is the sum of the credibilities of the items it
//!   voted for — voters who side with the consensus earn trust;
//! * an item's **credibility** is the sum of its voters' trust raised to a
//!   power `alpha`, renormalised per list — items backed by trusted voters
//!   gain credibility.
//!
//! With `alpha > 1` the fixed point concentrates credibility on the levels
//! honest (consistent) voters pick and drains trust from voters whose
//! choices scatter, so a colluding bloc must outnumber the honest
//! consensus by far more than it would under averaging. The iteration is
//! a projected gradient ascent on an explicit objective, which gives
//! monotone convergence diagnostics and a cheap stationarity check.
//!
//! The crate is organised around the engine:
//!
//! * [`graph`] — the immutable bipartite vote graph ([`VoteGraph`]);
//! * [`state`] — credibility/trust vectors and engine parameters;
//! * [`engine`] — the iteration itself ([`engine::run`]);
//! * [`rating`] — turning converged credibilities into scores, plus the
//!   averaging/majority baselines;
//! * [`simulate`] — reference scenarios, synthetic corpora, and vote
//!   injection for robustness studies;
//! * [`evaluate`] — attack sweeps comparing methods by RMS score error;
//! * [`ingest`] — loading external rating files.
//!
//! Everything is deterministic: identical inputs (including seeds) produce
//! bit-identical outputs, regardless of platform.

pub mod engine;
pub mod evaluate;
pub mod graph;
pub mod ingest;
pub mod rating;
pub mod simulate;
pub mod state;

pub use engine::{EngineError, RunResult, ZeroTrustPolicy};
pub use evaluate::{EvalError, Method, SweepReport};
pub use graph::{GraphError, VoteGraph};
pub use ingest::{IngestError, LevelMapping, Sidecar};
pub use rating::{RatingScore, ScoreMethod};
pub use simulate::{AttackPlan, ColluderHistory, Mode};
pub use state::{CredibilityState, EngineParams, ParamError, TrustState};
