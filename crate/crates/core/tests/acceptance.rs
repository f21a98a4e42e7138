//! Release acceptance gate.
//!
//! One test per criterion, each ending in a single verdict line of the form
//! `[acceptance] criterion NN (label): PASS|FAIL` (visible under
//! `--nocapture`, or in the captured output of a failing run). A criterion
//! fails loudly with every recorded violation; nothing here is allowed to
//! soften a bound to make a run pass.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robustrate_core::engine::{
    gradient, initialize, line_search_step, objective, residual_norm, run, update_credibility,
    update_trust,
};
use robustrate_core::evaluate::attack_sweep;
use robustrate_core::rating::{average_baseline, majority_baseline, max_credibility_score, score_all};
use robustrate_core::simulate::{
    gen_scenario1, gen_scenario2, gen_scenario3_corpus, AttackPlan, SCENARIO2_REFERENCE_SEED,
};
use robustrate_core::{CredibilityState, EngineParams, Method, ScoreMethod, VoteGraph};

/// Violation collector for one criterion. Records every failed check (the
/// first few verbatim, the rest counted), prints the verdict line, and
/// panics with the details when anything failed.
struct Criterion {
    number: u32,
    label: &'static str,
    details: Vec<String>,
    suppressed: usize,
}

const DETAIL_CAP: usize = 8;

impl Criterion {
    fn new(number: u32, label: &'static str) -> Self {
        Self {
            number,
            label,
            details: Vec::new(),
            suppressed: 0,
        }
    }

    /// Records a violation when `ok` is false; returns `ok` so callers can
    /// bail out of long loops early.
    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) -> bool {
        if !ok {
            if self.details.len() < DETAIL_CAP {
                self.details.push(detail());
            } else {
                self.suppressed += 1;
            }
        }
        ok
    }

    fn failed(&self) -> bool {
        !self.details.is_empty()
    }

    fn finish(mut self) {
        let verdict = if self.failed() { "FAIL" } else { "PASS" };
        println!(
            "[acceptance] criterion {:02} ({}): {}",
            self.number, self.label, verdict
        );
        if self.failed() {
            if self.suppressed > 0 {
                self.details
                    .push(format!("... and {} more violations", self.suppressed));
            }
            panic!(
                "criterion {:02} ({}) failed:\n  {}",
                self.number,
                self.label,
                self.details.join("\n  ")
            );
        }
    }
}

/// Deterministic small instance for the bulk criteria: at most 6 voters,
/// 3 lists, and 4 items per list, with α drawn from {1, 1.5, 2, 3}. The raw
/// edge list comes back alongside the graph so oracles can recount from
/// scratch instead of trusting the graph's internals.
fn small_instance(seed: u64) -> (VoteGraph, f64, Vec<(usize, usize, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let voters = rng.gen_range(1..=6);
    let num_lists = rng.gen_range(1..=3);
    let items: Vec<usize> = (0..num_lists).map(|_| rng.gen_range(1..=4)).collect();
    let mut edges = Vec::new();
    for r in 0..voters {
        for (l, &n) in items.iter().enumerate() {
            if rng.gen_bool(0.8) {
                edges.push((r, l, rng.gen_range(0..n)));
            }
        }
    }
    let graph = VoteGraph::build(voters, items, edges.clone())
        .expect("at most one vote per voter per list by construction");
    let alpha = *[1.0, 1.5, 2.0, 3.0].choose(&mut rng).unwrap();
    (graph, alpha, edges)
}

/// Params used by the bulk criteria: instance-specific α, huge iteration
/// budget. Some α = 1 draws have a degenerate fixed point — an update
/// multiplier of exactly 1 along one direction — where the state converges
/// algebraically instead of geometrically; the worst draw needs ~8·10⁵
/// iterations to push the residual under 1e-9. The graphs are a handful of
/// edges, so even that budget is milliseconds.
fn bulk_params(alpha: f64) -> EngineParams {
    EngineParams {
        alpha,
        max_iters: 2_000_000,
        ..EngineParams::default()
    }
}

#[test]
fn criterion_01_scenario1_credibility_matrix() {
    let mut c = Criterion::new(1, "scenario-1 credibility matrix");

    // Expected fixed point, lists by items. Λ6 is the interesting one: the
    // raw majority level I1 ends up at 0.20 while I2 carries 0.98.
    const EXPECTED: [[f64; 5]; 6] = [
        [0.99, 0.11, 0.00, 0.00, 0.00],
        [0.08, 0.99, 0.09, 0.00, 0.00],
        [0.00, 0.03, 0.08, 1.00, 0.00],
        [0.11, 0.00, 0.99, 0.00, 0.00],
        [0.11, 0.99, 0.00, 0.00, 0.00],
        [0.20, 0.98, 0.00, 0.00, 0.00],
    ];

    let g = gen_scenario1();
    let start = Instant::now();
    let result = run(&g, &EngineParams::default()).expect("fixture runs clean");
    let elapsed = start.elapsed();

    c.check(result.converged, || "run did not converge".into());
    c.check(result.iterations <= 40, || {
        format!("took {} iterations, budget 40", result.iterations)
    });
    for (l, row) in EXPECTED.iter().enumerate() {
        for (i, &want) in row.iter().enumerate() {
            let got = result.rho.get(l, i);
            c.check((got - want).abs() <= 0.01, || {
                format!("Λ{} I{}: got {got:.4}, want {want} ± 0.01", l + 1, i + 1)
            });
        }
    }
    c.check(elapsed < Duration::from_secs(1), || {
        format!("runtime {elapsed:?}, budget 1s")
    });
    c.finish();
}

#[test]
fn criterion_02_scenario2_collusion_resistance() {
    let mut c = Criterion::new(2, "scenario-2 collusion resistance");

    let g = gen_scenario2(SCENARIO2_REFERENCE_SEED);
    let last = g.num_lists() - 1;

    // Starting credibilities on the contested list are analytic:
    // (15, 45) / √(15² + 45²) on I1 and I5.
    let init = initialize(&g);
    let want_i1 = 15.0 / 2250.0_f64.sqrt();
    let want_i5 = 45.0 / 2250.0_f64.sqrt();
    c.check((init.get(last, 0) - 0.3162).abs() <= 0.001, || {
        format!("initial I1 {:.4}, want 0.3162 ± 0.001", init.get(last, 0))
    });
    c.check((init.get(last, 4) - 0.9486).abs() <= 0.001, || {
        format!("initial I5 {:.4}, want 0.9486 ± 0.001", init.get(last, 4))
    });
    c.check((init.get(last, 0) - want_i1).abs() <= 1e-12, || {
        format!("initial I1 {:.15} off the analytic {want_i1:.15}", init.get(last, 0))
    });
    c.check((init.get(last, 4) - want_i5).abs() <= 1e-12, || {
        format!("initial I5 {:.15} off the analytic {want_i5:.15}", init.get(last, 4))
    });

    let start = Instant::now();
    let result = run(&g, &EngineParams::default()).expect("fixture runs clean");
    let elapsed = start.elapsed();

    c.check(result.converged, || "run did not converge".into());
    let i1 = result.rho.get(last, 0);
    let i5 = result.rho.get(last, 4);
    c.check(i1 > 0.9, || format!("final I1 {i1:.4}, want > 0.9"));
    c.check(i5 < 0.35, || format!("final I5 {i5:.4}, want < 0.35"));
    c.check((i1 - 0.9586).abs() <= 0.05, || {
        format!("final I1 {i1:.4}, want 0.9586 ± 0.05")
    });
    c.check((i5 - 0.2846).abs() <= 0.05, || {
        format!("final I5 {i5:.4}, want 0.2846 ± 0.05")
    });

    // The honest minority's level must win despite the 3:1 colluder majority.
    let winner = max_credibility_score(result.rho.list(last)).expect("list has votes");
    c.check(winner == 1, || format!("winner level {winner}, want 1"));

    c.check(elapsed < Duration::from_secs(1), || {
        format!("runtime {elapsed:?}, budget 1s")
    });
    c.finish();
}

#[test]
fn criterion_03_iteration_budget_across_tolerances() {
    let mut c = Criterion::new(3, "iteration budget across tolerances");

    let fixtures = [
        ("scenario1", gen_scenario1()),
        ("scenario2", gen_scenario2(SCENARIO2_REFERENCE_SEED)),
    ];
    for (name, g) in &fixtures {
        for epsilon in [1e-6, 1e-9, 1e-12] {
            let params = EngineParams {
                epsilon,
                ..EngineParams::default()
            };
            let result = run(g, &params).expect("fixture runs clean");
            c.check(result.converged && result.iterations <= 100, || {
                format!(
                    "{name} at ε = {epsilon:e}: {} iterations, converged {}",
                    result.iterations, result.converged
                )
            });
        }
    }
    c.finish();
}

#[test]
fn criterion_04_constraints_hold_every_iteration() {
    let mut c = Criterion::new(4, "per-iteration constraint preservation");

    // Replays exactly the loop `run` performs, checking the state after
    // initialization and after every safeguarded step.
    fn state_ok(
        c: &mut Criterion,
        g: &VoteGraph,
        rho: &CredibilityState,
        seed: u64,
        step: usize,
    ) -> bool {
        let mut ok = true;
        for l in 0..g.num_lists() {
            if !g.has_votes(l) {
                continue;
            }
            let norm = rho.list_norm(l);
            ok &= c.check((norm - 1.0).abs() <= 1e-9 && !norm.is_nan(), || {
                format!("seed {seed} step {step} Λ{}: norm {norm:.12}", l + 1)
            });
            for (i, &v) in rho.list(l).iter().enumerate() {
                ok &= c.check(v >= 0.0, || {
                    format!("seed {seed} step {step} Λ{} I{}: credibility {v:e}", l + 1, i + 1)
                });
            }
        }
        ok
    }

    'instances: for seed in 0..1000 {
        let (g, alpha, _) = small_instance(seed);
        let mut rho = initialize(&g);
        if !state_ok(&mut c, &g, &rho, seed, 0) {
            break;
        }
        for step in 1..=2_000_000usize {
            let trust = update_trust(&g, &rho).expect("count-based start keeps trust positive");
            for (r, &t) in trust.values().iter().enumerate() {
                if !c.check(t >= 0.0, || {
                    format!("seed {seed} step {step} voter {r}: trust {t:e}")
                }) {
                    break 'instances;
                }
            }
            let rho_star =
                update_credibility(&g, &trust, alpha).expect("positive trust keeps mass positive");
            let (next, _) = line_search_step(&g, &rho, &rho_star, alpha);
            if !state_ok(&mut c, &g, &next, seed, step) {
                break 'instances;
            }
            let moved = residual_norm(&g, &rho, &next);
            rho = next;
            if moved < 1e-9 {
                break;
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_05_monotone_objective_and_stationarity() {
    let mut c = Criterion::new(5, "monotone objective and stationarity");

    for seed in 0..1000 {
        let (g, alpha, _) = small_instance(seed);
        let params = bulk_params(alpha);
        let result = run(&g, &params).expect("small instances run clean");
        c.check(result.converged, || {
            format!("seed {seed}: not converged within {}", params.max_iters)
        });

        for (step, w) in result.objective_trace.windows(2).enumerate() {
            // Slack scales with the objective: consecutive values are
            // computed from different states, so each carries its own
            // rounding noise.
            let slack = 1e-12 * w[0].abs().max(1.0);
            c.check(w[1] >= w[0] - slack, || {
                format!(
                    "seed {seed}: objective drops at step {}: {:.17e} -> {:.17e}",
                    step + 1,
                    w[0],
                    w[1]
                )
            });
        }

        // Stationarity: applying one exact update to the terminal state
        // must barely move it.
        let trust = update_trust(&g, &result.rho).expect("terminal trust is positive");
        let image = update_credibility(&g, &trust, alpha).expect("terminal mass is positive");
        let station = residual_norm(&g, &result.rho, &image);
        c.check(station < 10.0 * params.epsilon, || {
            format!(
                "seed {seed}: stationarity residual {station:e}, bound {:e}",
                10.0 * params.epsilon
            )
        });
    }
    c.finish();
}

#[test]
fn criterion_06_gradient_versus_finite_differences() {
    let mut c = Criterion::new(6, "gradient versus finite differences");

    fn fd_cell(g: &VoteGraph, rho: &CredibilityState, alpha: f64, l: usize, i: usize) -> f64 {
        const H: f64 = 1e-6;
        let mut plus = rho.clone();
        plus.list_mut(l)[i] += H;
        let mut minus = rho.clone();
        minus.list_mut(l)[i] -= H;
        (objective(g, &plus, alpha) - objective(g, &minus, alpha)) / (2.0 * H)
    }

    fn compare(c: &mut Criterion, g: &VoteGraph, rho: &CredibilityState, alpha: f64, seed: u64) {
        let analytic = gradient(g, rho, alpha);
        for (l, row) in analytic.iter().enumerate() {
            for (i, &a) in row.iter().enumerate() {
                let fd = fd_cell(g, rho, alpha, l, i);
                let rel = (a - fd).abs() / fd.abs().max(1e-9);
                c.check(rel < 1e-5, || {
                    format!(
                        "seed {seed} Λ{} I{}: analytic {a:.12e}, fd {fd:.12e}, rel {rel:e}",
                        l + 1,
                        i + 1
                    )
                });
            }
        }
    }

    for seed in 0..100 {
        let (g, alpha, _) = small_instance(seed);
        // Count-based starting state…
        compare(&mut c, &g, &initialize(&g), alpha, seed);
        // …and a generic positive state, unnormalized on purpose: the
        // gradient identity does not depend on the unit-sphere constraint.
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
        let mut generic = CredibilityState::zeros(&g);
        for l in 0..g.num_lists() {
            if !g.has_votes(l) {
                continue;
            }
            for v in generic.list_mut(l) {
                *v = rng.gen_range(0.1..1.0);
            }
        }
        compare(&mut c, &g, &generic, alpha, seed);
    }
    c.finish();
}

#[test]
fn criterion_07_attack_sweep_robustness_ordering() {
    let mut c = Criterion::new(7, "attack-sweep robustness ordering");

    const CORPUS_SEED: u64 = 7;
    let corpus = gen_scenario3_corpus(CORPUS_SEED);
    let fractions: Vec<f64> = (0..=8).map(|k| k as f64 * 0.25).collect();
    let methods = [Method::Ours, Method::Averaging, Method::Majority].into();
    // The clean corpus needs a couple hundred iterations at ε = 1e-9.
    let params = EngineParams {
        max_iters: 500,
        ..EngineParams::default()
    };

    let start = Instant::now();
    for (name, plan) in [
        ("promotion", AttackPlan::promotion(0.0, 10)),
        ("demotion", AttackPlan::demotion(0.0)),
    ] {
        let report = attack_sweep(
            &corpus,
            &plan,
            &fractions,
            &methods,
            &params,
            ScoreMethod::Weighted,
            CORPUS_SEED,
        )
        .expect("corpus sweep runs clean");
        c.check(report.target_count == 20, || {
            format!("{name}: {} targets, want the 20 planted lists", report.target_count)
        });

        let ours = &report.rms_by_method[&Method::Ours];
        let avg = &report.rms_by_method[&Method::Averaging];
        let maj = &report.rms_by_method[&Method::Majority];
        let maj_max = maj.iter().cloned().fold(0.0, f64::max);

        for k in 1..fractions.len() {
            let f = fractions[k];
            c.check(maj[k] >= avg[k] && avg[k] >= ours[k], || {
                format!(
                    "{name} fraction {f}: ordering broken: majority {:.4}, averaging {:.4}, ours {:.4}",
                    maj[k], avg[k], ours[k]
                )
            });
            // Majority saturates immediately and stays at its ceiling.
            c.check((maj[k] - maj_max).abs() <= 1e-9 * maj_max, || {
                format!("{name} fraction {f}: majority {:.6} below its flat max {maj_max:.6}", maj[k])
            });
            c.check(avg[k] > avg[k - 1], || {
                format!(
                    "{name} fraction {f}: averaging not strictly increasing: {:.6} after {:.6}",
                    avg[k],
                    avg[k - 1]
                )
            });
            c.check(ours[k] < 0.2 * maj_max, || {
                format!(
                    "{name} fraction {f}: ours {:.4} not under 20% of majority max {maj_max:.4}",
                    ours[k]
                )
            });
        }
    }
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(120), || {
        format!("runtime {elapsed:?}, budget 2min")
    });
    c.finish();
}

#[test]
fn criterion_08_item_label_permutation_invariance() {
    let mut c = Criterion::new(8, "item-label permutation invariance");

    let mut cases: Vec<(String, VoteGraph, f64)> = vec![
        ("scenario1".into(), gen_scenario1(), 2.0),
        (
            "scenario2".into(),
            gen_scenario2(SCENARIO2_REFERENCE_SEED),
            2.0,
        ),
    ];
    for seed in 0..100 {
        let (g, alpha, _) = small_instance(seed);
        cases.push((format!("instance {seed}"), g, alpha));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x8a0c);
    for (name, g, alpha) in &cases {
        let perms: Vec<Vec<usize>> = (0..g.num_lists())
            .map(|l| {
                let mut p: Vec<usize> = (0..g.items_in(l)).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let relabeled: Vec<(usize, usize, usize)> =
            g.edges().map(|(r, l, i)| (r, l, perms[l][i])).collect();
        let pg = VoteGraph::build(g.num_voters(), g.items_per_list().to_vec(), relabeled)
            .expect("permutation keeps votes distinct");

        let params = bulk_params(*alpha);
        let a = run(g, &params).expect("original runs clean");
        let b = run(&pg, &params).expect("relabeled runs clean");

        c.check(a.converged && b.converged, || {
            format!("{name}: convergence differs or missing")
        });
        for (l, perm) in perms.iter().enumerate() {
            for (i, &pi) in perm.iter().enumerate() {
                let orig = a.rho.get(l, i);
                let moved = b.rho.get(l, pi);
                c.check((orig - moved).abs() <= 1e-12, || {
                    format!(
                        "{name} Λ{} I{}: {orig:.15} became {moved:.15} after relabeling",
                        l + 1,
                        i + 1
                    )
                });
            }
        }
        for r in 0..g.num_voters() {
            let d = (a.trust.get(r) - b.trust.get(r)).abs();
            c.check(d <= 1e-12, || {
                format!("{name} voter {r}: trust moved by {d:e} under relabeling")
            });
        }
    }
    c.finish();
}

#[test]
fn criterion_09_baseline_score_recomputation() {
    let mut c = Criterion::new(9, "baseline score recomputation");

    for seed in 0..1000 {
        let (g, _, edges) = small_instance(seed);
        let scores = score_all(&g, &initialize(&g), 2.0);

        for (l, score) in scores.iter().enumerate() {
            // Recount from the raw edge list; the graph is not consulted.
            let mut counts = vec![0usize; g.items_in(l)];
            let mut level_sum: u64 = 0;
            let mut total: u64 = 0;
            for &(_, el, i) in edges.iter().filter(|&&(_, el, _)| el == l) {
                debug_assert_eq!(el, l);
                counts[i] += 1;
                level_sum += (i + 1) as u64;
                total += 1;
            }

            if total == 0 {
                c.check(average_baseline(&g, l).is_err(), || {
                    format!("seed {seed} Λ{}: average on an unvoted list", l + 1)
                });
                c.check(majority_baseline(&g, l).is_err(), || {
                    format!("seed {seed} Λ{}: majority on an unvoted list", l + 1)
                });
                c.check(score.no_data, || {
                    format!("seed {seed} Λ{}: unvoted list not flagged", l + 1)
                });
                continue;
            }

            // Integer sums divide exactly once in f64, so equality is exact.
            let want_avg = level_sum as f64 / total as f64;
            let mut want_majority = 0;
            let mut best = 0;
            for (i, &n) in counts.iter().enumerate() {
                if n > best {
                    best = n;
                    want_majority = i + 1;
                }
            }

            let got_avg = average_baseline(&g, l).expect("voted list");
            c.check(got_avg == want_avg, || {
                format!("seed {seed} Λ{}: average {got_avg:.17e} != {want_avg:.17e}", l + 1)
            });
            let got_majority = majority_baseline(&g, l).expect("voted list");
            c.check(got_majority == want_majority, || {
                format!("seed {seed} Λ{}: majority {got_majority} != {want_majority}", l + 1)
            });
            c.check(score.average_score == want_avg, || {
                format!("seed {seed} Λ{}: scored average disagrees", l + 1)
            });
            c.check(score.majority_level == want_majority, || {
                format!("seed {seed} Λ{}: scored majority disagrees", l + 1)
            });
        }
    }
    c.finish();
}
