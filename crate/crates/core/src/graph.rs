//! The vote graph: which voter chose which rating level on which list.
//!
//! A *list* is one election — the set of rating levels available for one
//! product. A voter casts at most one vote per list. The graph is immutable
//! after construction and keeps both directions of the relation indexed:
//! `(list, item) -> voters` for the credibility update and
//! `voter -> (list, item)` for the trust update.

use thiserror::Error;

/// Errors raised while assembling a [`VoteGraph`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    /// A voter appears twice on the same list. One choice per election;
    /// silently keeping either vote would mask a data bug upstream.
    #[error("voter {voter} votes more than once on list {list}")]
    DuplicateVote { voter: usize, list: usize },
    /// An edge references a voter, list, or item outside the declared shape.
    #[error("edge ({voter}, {list}, {item}) is out of range for this graph")]
    IndexOutOfRange {
        voter: usize,
        list: usize,
        item: usize,
    },
}

/// Immutable bipartite vote relation between voters and (list, item) cells.
///
/// Indices are dense and zero-based throughout. Rating *levels* are the
/// one-based names of items (`level = item + 1`); only the rating module
/// ever interprets that ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteGraph {
    num_voters: usize,
    items_per_list: Vec<usize>,
    /// `by_list_item[l][i]` = voters who chose item `i` on list `l`, ascending.
    by_list_item: Vec<Vec<Vec<usize>>>,
    /// `by_voter[r]` = the `(list, item)` cells voter `r` chose, ascending by list.
    by_voter: Vec<Vec<(usize, usize)>>,
    /// Cached vote count per list (`m_l`).
    votes_per_list: Vec<usize>,
}

impl VoteGraph {
    /// Builds a graph with the given shape from `(voter, list, item)` edges.
    ///
    /// Rejects duplicate `(voter, list)` pairs and out-of-range indices.
    /// Edge order does not matter; both indexes come out sorted so that
    /// downstream accumulation order is well defined.
    pub fn build(
        num_voters: usize,
        items_per_list: Vec<usize>,
        edges: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self, GraphError> {
        let num_lists = items_per_list.len();
        let mut by_list_item: Vec<Vec<Vec<usize>>> = items_per_list
            .iter()
            .map(|&n| vec![Vec::new(); n])
            .collect();
        let mut by_voter: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_voters];
        let mut votes_per_list = vec![0usize; num_lists];

        for (voter, list, item) in edges {
            if voter >= num_voters || list >= num_lists || item >= items_per_list[list] {
                return Err(GraphError::IndexOutOfRange { voter, list, item });
            }
            if by_voter[voter].iter().any(|&(l, _)| l == list) {
                return Err(GraphError::DuplicateVote { voter, list });
            }
            by_list_item[list][item].push(voter);
            by_voter[voter].push((list, item));
            votes_per_list[list] += 1;
        }
        for cell in by_list_item.iter_mut().flatten() {
            cell.sort_unstable();
        }
        for votes in &mut by_voter {
            votes.sort_unstable();
        }
        Ok(Self {
            num_voters,
            items_per_list,
            by_list_item,
            by_voter,
            votes_per_list,
        })
    }

    pub fn num_voters(&self) -> usize {
        self.num_voters
    }

    pub fn num_lists(&self) -> usize {
        self.items_per_list.len()
    }

    /// Number of items (rating levels) on list `l`.
    pub fn items_in(&self, list: usize) -> usize {
        self.items_per_list[list]
    }

    pub fn items_per_list(&self) -> &[usize] {
        &self.items_per_list
    }

    /// The voters who chose item `i` on list `l`, in ascending order.
    pub fn voters_for(&self, list: usize, item: usize) -> Result<&[usize], GraphError> {
        if list >= self.num_lists() || item >= self.items_per_list[list] {
            return Err(GraphError::IndexOutOfRange {
                voter: 0,
                list,
                item,
            });
        }
        Ok(&self.by_list_item[list][item])
    }

    /// Infallible [`Self::voters_for`] for in-range indices; the engine's
    /// hot loops only ever walk the graph's own shape.
    pub(crate) fn cell(&self, list: usize, item: usize) -> &[usize] {
        &self.by_list_item[list][item]
    }

    /// The `(list, item)` cells voter `r` chose, ascending by list index.
    pub fn votes_by(&self, voter: usize) -> &[(usize, usize)] {
        &self.by_voter[voter]
    }

    /// Total votes cast on list `l` (`m_l`).
    pub fn votes_on(&self, list: usize) -> usize {
        self.votes_per_list[list]
    }

    /// Whether list `l` received at least one vote. Lists without votes are
    /// carried through every computation as explicit "no data".
    pub fn has_votes(&self, list: usize) -> bool {
        self.votes_per_list[list] > 0
    }

    /// Vote count of item `i` on list `l`.
    pub fn count(&self, list: usize, item: usize) -> usize {
        self.by_list_item[list][item].len()
    }

    pub fn total_votes(&self) -> usize {
        self.votes_per_list.iter().sum()
    }

    /// All edges as `(voter, list, item)`, ordered by voter then list.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.by_voter
            .iter()
            .enumerate()
            .flat_map(|(r, votes)| votes.iter().map(move |&(l, i)| (r, l, i)))
    }
}
