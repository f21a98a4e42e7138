//! Loading external rating files into a [`VoteGraph`].
//!
//! Input is comma-separated text with columns `user, item, rating` and an
//! optional trailing `timestamp`; a header row is detected by a
//! non-numeric first field and skipped. External identifiers are arbitrary
//! strings; they are densely re-indexed in first-seen order and the
//! mapping is returned alongside the graph so results can be reported in
//! the caller's identifier space.
//!
//! Ratings arrive on an arbitrary numeric scale and are mapped onto the
//! engine's 1..n level scale by an explicit [`LevelMapping`] — no silent
//! rescaling ever happens.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::graph::{GraphError, VoteGraph};

/// Errors raised while loading votes.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("rating {value} is outside the source scale [{min}, {max}]")]
    OutOfScaleRating { value: f64, min: f64, max: f64 },
    /// Duplicate `(user, item)` rows can only be resolved when a timestamp
    /// column is present (last one wins); otherwise the core graph's
    /// one-vote rule fails the load.
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid level mapping: {0}")]
    BadMapping(String),
    #[error("cannot read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv parse error: {0}")]
    Csv(#[from] csv::Error),
}

/// Affine map from a source rating scale onto the 1..n level scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelMapping {
    pub source_min: f64,
    pub source_max: f64,
    /// Granularity of the source scale; documents how many distinct source
    /// values exist and validates the scale, but any in-range value maps.
    pub source_step: f64,
    pub target_levels: usize,
}

impl LevelMapping {
    /// The identity scale: source values 1..=levels map to themselves.
    pub fn identity(levels: usize) -> Self {
        Self {
            source_min: 1.0,
            source_max: levels as f64,
            source_step: 1.0,
            target_levels: levels,
        }
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if !(self.source_min.is_finite() && self.source_max.is_finite()) {
            return Err(IngestError::BadMapping("scale bounds must be finite".into()));
        }
        if self.source_min >= self.source_max {
            return Err(IngestError::BadMapping(format!(
                "source_min {} must be below source_max {}",
                self.source_min, self.source_max
            )));
        }
        if self.source_step <= 0.0 || self.source_step.is_nan() {
            return Err(IngestError::BadMapping(format!(
                "source_step {} must be positive",
                self.source_step
            )));
        }
        if self.target_levels < 2 {
            return Err(IngestError::BadMapping(
                "target_levels must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// Maps one raw rating onto a one-based level: affine onto `[1, n]`, then
/// rounded half-up. Monotone in `raw`; the scale endpoints hit levels 1
/// and n exactly.
pub fn map_level(raw: f64, mapping: &LevelMapping) -> Result<usize, IngestError> {
    if !raw.is_finite() || raw < mapping.source_min || raw > mapping.source_max {
        return Err(IngestError::OutOfScaleRating {
            value: raw,
            min: mapping.source_min,
            max: mapping.source_max,
        });
    }
    let n = mapping.target_levels as f64;
    let affine = 1.0
        + (raw - mapping.source_min) / (mapping.source_max - mapping.source_min) * (n - 1.0);
    let level = (affine + 0.5).floor() as usize;
    Ok(level.clamp(1, mapping.target_levels))
}

/// Internal-to-external identifier tables for voters and lists, indexed by
/// the dense internal ids used in the graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sidecar {
    pub voters: Vec<String>,
    pub lists: Vec<String>,
}

fn intern(table: &mut HashMap<String, usize>, order: &mut Vec<String>, key: &str) -> usize {
    if let Some(&idx) = table.get(key) {
        return idx;
    }
    let idx = order.len();
    table.insert(key.to_owned(), idx);
    order.push(key.to_owned());
    idx
}

/// Loads a vote file. Every surviving row becomes one edge; when the file
/// has a timestamp column, duplicate `(user, item)` rows collapse to the
/// one with the greatest timestamp (ties: the later row). Row numbers in
/// errors are 1-based file positions, counting a header row.
pub fn load_votes(
    path: impl AsRef<Path>,
    mapping: &LevelMapping,
) -> Result<(VoteGraph, Sidecar), IngestError> {
    mapping.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;

    // Candidate rows per (voter, list): (item, timestamp, file row);
    // timestamps resolve duplicates after the whole file is read.
    type Candidates = HashMap<(usize, usize), Vec<(usize, Option<i64>, usize)>>;

    let mut voter_ids: HashMap<String, usize> = HashMap::new();
    let mut list_ids: HashMap<String, usize> = HashMap::new();
    let mut sidecar = Sidecar::default();
    let mut votes: Candidates = HashMap::new();

    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record?;
        // Header convention: a non-numeric first field on the first row.
        if idx == 0 && record.get(0).map(|f| f.parse::<f64>().is_err()).unwrap_or(true) {
            continue;
        }
        if record.len() < 3 || record.len() > 4 {
            return Err(IngestError::MalformedRow {
                row,
                reason: format!("expected 3 or 4 columns, found {}", record.len()),
            });
        }
        let user = record.get(0).unwrap_or_default();
        let item = record.get(1).unwrap_or_default();
        if user.is_empty() || item.is_empty() {
            return Err(IngestError::MalformedRow {
                row,
                reason: "empty identifier field".into(),
            });
        }
        let rating: f64 = record
            .get(2)
            .unwrap_or_default()
            .parse()
            .map_err(|_| IngestError::MalformedRow {
                row,
                reason: format!("unparsable rating {:?}", record.get(2).unwrap_or_default()),
            })?;
        let timestamp: Option<i64> = match record.get(3) {
            Some(f) => Some(f.parse().map_err(|_| IngestError::MalformedRow {
                row,
                reason: format!("unparsable timestamp {f:?}"),
            })?),
            None => None,
        };
        let level = map_level(rating, mapping)?;
        let voter = intern(&mut voter_ids, &mut sidecar.voters, user);
        let list = intern(&mut list_ids, &mut sidecar.lists, item);
        votes
            .entry((voter, list))
            .or_default()
            .push((level - 1, timestamp, row));
    }

    // Resolve duplicates: a fully-timestamped group keeps its latest row
    // (ties broken by file order); a group missing any timestamp has
    // nothing to arbitrate by, so both rows pass through and the graph
    // builder reports the duplicate.
    let mut edges: Vec<(usize, usize, usize)> = Vec::with_capacity(votes.len());
    for (&(voter, list), rows) in &votes {
        if rows.len() > 1 && rows.iter().all(|&(_, ts, _)| ts.is_some()) {
            let &(item, _, _) = rows
                .iter()
                .max_by_key(|&&(_, ts, row)| (ts, row))
                .expect("non-empty group");
            edges.push((voter, list, item));
        } else {
            edges.extend(rows.iter().map(|&(item, _, _)| (voter, list, item)));
        }
    }
    edges.sort_unstable();

    let graph = VoteGraph::build(
        sidecar.voters.len(),
        vec![mapping.target_levels; sidecar.lists.len()],
        edges,
    )?;
    Ok((graph, sidecar))
}
