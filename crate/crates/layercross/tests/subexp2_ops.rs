//! Operation-level tests of the recursive 2-layer solver: lifting counts,
//! the exact base case against an independent enumeration oracle, the guess
//! stream on hand-checked fixtures, the pendant knapsack, sub-instance
//! audits, and drawing recombination.

use std::collections::BTreeSet;

use layercross::graph::{Drawing, Instance, LayeredGraph, VertexId};
use layercross::sample;
use layercross::subexp2::{
    build_subinstances, combine_drawings, enumerate_guesses, lift_to_extended, lift_with_budget,
    pendant_knapsack, solve_extended, ExtendedInstance, Mode, Solve2Config, Solve2Stats,
};

/// Independent decision oracle for extended instances: enumerate every
/// drawing, keep the valid ones, take the weighted minimum.
fn extended_oracle(ei: &ExtendedInstance) -> Option<(u64, Drawing)> {
    fn perms(items: &[VertexId]) -> Vec<Vec<VertexId>> {
        if items.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for (i, &v) in items.iter().enumerate() {
            let mut rest = items.to_vec();
            rest.remove(i);
            for mut p in perms(&rest) {
                p.insert(0, v);
                out.push(p);
            }
        }
        out
    }
    let mut best: Option<(u64, Drawing)> = None;
    for o1 in perms(ei.graph.layer(1)) {
        for o2 in perms(ei.graph.layer(2)) {
            let d = Drawing::new(vec![o1.clone(), o2]);
            if !ei.drawing_valid(&d) {
                continue;
            }
            let c = ei.count(&d).unwrap();
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                best = Some((c, d));
            }
        }
    }
    best
}

fn oracle_decides(ei: &ExtendedInstance) -> bool {
    extended_oracle(ei).is_some_and(|(min, _)| min <= ei.k)
}

#[test]
fn lift_counts_match_the_guess_space() {
    // A single edge admits one endpoint guess per budget.
    let g1 = LayeredGraph::try_new(2, vec![0, 1, 2], vec![(1, 2, 1)]).unwrap();
    let lifts = lift_to_extended(&Instance::new(g1, 3));
    assert_eq!(lifts.len(), 4, "1 * 1 * (k+1) guesses");
    // P3 with two layer-1 vertices: two ordered pairs per budget.
    let g2 = LayeredGraph::try_new(2, vec![0, 1, 1, 2], vec![(1, 3, 1), (2, 3, 1)]).unwrap();
    let lifts = lift_to_extended(&Instance::new(g2, 2));
    assert_eq!(lifts.len(), 2 * 3);
    for ei in &lifts {
        assert!(ei.validate().is_ok());
        assert_eq!(ei.mode, Mode::Normal);
    }
}

#[test]
fn lift_preserves_yes_instances() {
    // For a yes-instance, at least one lifted extended instance is a yes.
    let mut rng = sample::rng(0x5e01);
    let cfg = Solve2Config::default();
    for _ in 0..25 {
        let g = sample::connected_graph(&mut rng, 2, 4, 2);
        use rand::Rng;
        let k = rng.gen_range(0..=3);
        let inst = Instance::new(g, k);
        let lifted = lift_with_budget(&inst, k);
        let any_yes = lifted.iter().any(oracle_decides);
        let mut stats = Solve2Stats::default();
        let direct = lifted
            .iter()
            .any(|ei| solve_extended(ei, 0, &cfg, &mut stats).is_some());
        assert_eq!(any_yes, direct);
    }
}

#[test]
fn base_case_matches_extended_oracle() {
    let mut rng = sample::rng(0x5e02);
    let cfg = Solve2Config::default(); // threshold keeps everything in the base case
    let mut stats = Solve2Stats::default();
    let mut checked = 0;
    while checked < 60 {
        let g = sample::connected_graph(&mut rng, 2, 4, 2);
        use rand::Rng;
        let k = rng.gen_range(0..=3);
        for ei in lift_with_budget(&Instance::new(g.clone(), k), k)
            .into_iter()
            .take(3)
        {
            let got = solve_extended(&ei, 0, &cfg, &mut stats);
            let want = oracle_decides(&ei);
            assert_eq!(got.is_some(), want, "base case disagreed with the oracle");
            if let Some(d) = got {
                assert!(ei.accepts(&d));
            }
        }
        checked += 1;
    }
    assert!(stats.base_case_calls > 0);
    assert_eq!(
        stats.recursive_calls, 0,
        "default threshold covers k <= 4*sqrt(k*)"
    );
}

/// A weighted extended fixture: the forced crossing between weighted edges
/// on opposite boundary endpoints counts zero, so k = 1 suffices for an
/// extended complete-bipartite core.
#[test]
fn base_case_weighted_fixture() {
    // Layers: 1 -> {1, 2}, 2 -> {3, 4, 5, 6}; boundary (1,5), (2,6);
    // weighted (1,4) and (2,3) hang on opposite boundary endpoints.
    let g = LayeredGraph::try_new(
        2,
        vec![0, 1, 1, 2, 2, 2, 2],
        vec![
            (1, 3, 1),
            (1, 4, 2),
            (2, 3, 2),
            (2, 4, 1),
            (1, 5, 1),
            (2, 6, 1),
        ],
    )
    .unwrap();
    let leftbound = g.find_edge(VertexId(1), VertexId(5)).unwrap();
    let rightbound = g.find_edge(VertexId(2), VertexId(6)).unwrap();
    let weighted = [
        (g.find_edge(VertexId(1), VertexId(4)).unwrap(), 2u64),
        (g.find_edge(VertexId(2), VertexId(3)).unwrap(), 2u64),
    ]
    .into_iter()
    .collect();
    let ei = ExtendedInstance {
        graph: g,
        weighted,
        leftbound,
        rightbound,
        mode: Mode::Normal,
        left_ext_bnd: BTreeSet::new(),
        right_ext_bnd: BTreeSet::new(),
        chains: [Vec::new(), Vec::new()],
        k: 1,
        k_star: 16,
    };
    assert!(ei.validate().is_ok(), "{:?}", ei.validate());
    let (min, _) = extended_oracle(&ei).unwrap();
    assert_eq!(
        min, 1,
        "the weighted pair is excepted; one crossing remains"
    );
    let cfg = Solve2Config::default();
    let mut stats = Solve2Stats::default();
    let d = solve_extended(&ei, 0, &cfg, &mut stats).expect("yes at k = 1");
    assert!(ei.accepts(&d));
    let mut zero = ei.clone();
    zero.k = 0;
    assert!(solve_extended(&zero, 0, &cfg, &mut stats).is_none());
}

/// An elaborate-mode fixture: the extended boundary must stay consecutive.
#[test]
fn base_case_elaborate_fixture() {
    let g = LayeredGraph::try_new(
        2,
        vec![0, 1, 1, 1, 2, 2],
        vec![(1, 4, 1), (2, 4, 1), (3, 5, 1), (1, 5, 1), (3, 4, 1)],
    )
    .unwrap();
    let leftbound = g.find_edge(VertexId(1), VertexId(4)).unwrap();
    let rightbound = g.find_edge(VertexId(3), VertexId(5)).unwrap();
    let ei = ExtendedInstance {
        graph: g,
        weighted: Default::default(),
        leftbound,
        rightbound,
        mode: Mode::Elaborate,
        left_ext_bnd: [VertexId(1), VertexId(2)].into_iter().collect(),
        right_ext_bnd: [VertexId(3)].into_iter().collect(),
        chains: [
            vec![vec![VertexId(1), VertexId(2), VertexId(3)]],
            Vec::new(),
        ],
        k: 2,
        k_star: 16,
    };
    assert!(ei.validate().is_ok(), "{:?}", ei.validate());
    let want = extended_oracle(&ei);
    let cfg = Solve2Config::default();
    let mut stats = Solve2Stats::default();
    let got = solve_extended(&ei, 0, &cfg, &mut stats);
    assert_eq!(got.is_some(), want.is_some_and(|(m, _)| m <= ei.k));
    if let Some(d) = got {
        assert!(ei.accepts(&d));
    }
}

#[test]
fn knapsack_examples_and_subset_oracle() {
    let items = [(VertexId(1), 1), (VertexId(2), 1), (VertexId(3), 1)];
    let (l, r) = pendant_knapsack(&items, (2, 1)).expect("a 2/1 split exists");
    assert_eq!(l.len(), 2);
    assert_eq!(r.len(), 1);
    assert!(pendant_knapsack(&[(VertexId(1), 2)], (1, 1)).is_none());
    // Random multiplicities against exhaustive subset enumeration.
    let mut rng = sample::rng(0x5e03);
    use rand::Rng;
    for _ in 0..200 {
        let n = rng.gen_range(0..=10usize);
        let items: Vec<(VertexId, u64)> = (0..n)
            .map(|i| (VertexId(i as u32 + 1), rng.gen_range(1..=4)))
            .collect();
        let total: u64 = items.iter().map(|(_, m)| m).sum();
        let left = rng.gen_range(0..=total);
        let got = pendant_knapsack(&items, (left, total - left));
        let feasible = (0u32..1 << n).any(|mask| {
            let sum: u64 = items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, (_, m))| m)
                .sum();
            sum == left
        });
        assert_eq!(got.is_some(), feasible);
        if let Some((l, r)) = got {
            let sum = |vs: &[VertexId]| -> u64 {
                vs.iter()
                    .map(|v| items.iter().find(|(w, _)| w == v).unwrap().1)
                    .sum()
            };
            assert_eq!(sum(&l), left);
            assert_eq!(sum(&r), total - left);
        }
    }
}

fn lifted_fixture(edges: &[(u32, u32)], layers: &[u8], k: u64) -> ExtendedInstance {
    let mut layer_of = vec![0u8];
    layer_of.extend_from_slice(layers);
    let g = LayeredGraph::try_new(2, layer_of, edges.iter().map(|&(u, v)| (u, v, 1)).collect())
        .unwrap();
    let inst = Instance {
        graph: g,
        k,
        k_star: 16,
    };
    lift_with_budget(&inst, k).into_iter().next().unwrap()
}

#[test]
fn guess_stream_contains_the_middle_separator_on_p6() {
    // Path on six vertices; with budget 1 the stream must offer the two
    // central path edges as a separator pair.
    let ei = lifted_fixture(
        &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 6)],
        &[1, 2, 1, 2, 1, 2],
        1,
    );
    let g = &ei.graph;
    let mid1 = g.find_edge(VertexId(2), VertexId(3)).unwrap();
    let mid2 = g.find_edge(VertexId(3), VertexId(4)).unwrap();
    let guesses = enumerate_guesses(&ei);
    assert!(!guesses.is_empty());
    assert!(
        guesses.iter().any(|gu| gu.lsep == mid1 && gu.rsep == mid2),
        "central edge pair missing from the stream"
    );
}

/// Labels of every guess partition the vertices, with multiple labels only
/// on separator endpoints, and the budget split always balances.
#[test]
fn guess_stream_invariants() {
    let ei = lifted_fixture(&[(1, 3), (1, 4), (2, 3), (2, 4)], &[1, 1, 2, 2], 2);
    let guesses = enumerate_guesses(&ei);
    assert!(!guesses.is_empty());
    for gu in guesses.iter().take(500) {
        assert_eq!(gu.k_current + gu.k_left + gu.k_right, ei.k);
        let sep_eps: BTreeSet<VertexId> = [gu.lsep, gu.rsep]
            .iter()
            .flat_map(|&e| ei.graph.edge(e).endpoints())
            .collect();
        for v in ei.graph.vertices() {
            let l = gu.labels[v.index()];
            let count = [
                l.contains(layercross::subexp2::Label::L),
                l.contains(layercross::subexp2::Label::M),
                l.contains(layercross::subexp2::Label::R),
            ]
            .iter()
            .filter(|&&b| b)
            .count();
            assert!(count >= 1, "vertex {v} unlabeled");
            if count > 1 {
                assert!(sep_eps.contains(&v), "multi-label off the separator");
            }
        }
    }
}

#[test]
fn empty_stream_at_budget_zero() {
    let ei = lifted_fixture(&[(1, 2)], &[1, 2], 0);
    assert!(enumerate_guesses(&ei).is_empty());
}

/// For working guesses, the sub-instances validate, crossing edges turn
/// into weighted stubs, and the recombined drawing recounts exactly when
/// both sides are solved to their split budgets.
#[test]
fn subinstances_and_recombination_audit() {
    let ei = lifted_fixture(&[(1, 3), (1, 4), (2, 3), (2, 4)], &[1, 1, 2, 2], 1);
    let cfg = Solve2Config::default();
    let mut stats = Solve2Stats::default();
    let mut audited = 0;
    let mut recombined = 0;
    for gu in enumerate_guesses(&ei) {
        let Ok((left, right, left_old, right_old)) = build_subinstances(&ei, &gu) else {
            continue;
        };
        assert!(left.validate().is_ok());
        assert!(right.validate().is_ok());
        assert_eq!(left.k, gu.k_left);
        assert_eq!(right.k, gu.k_right);
        audited += 1;
        // Crossing edges with one labeled-left endpoint become weighted
        // stubs in the left instance.
        if !gu.cross_lsep.is_empty() {
            assert!(
                !left.weighted.is_empty() || !right.weighted.is_empty(),
                "a crossing edge must leave a weighted stub"
            );
        }
        let (Some(dl), Some(dr)) = (
            solve_extended(&left, 1, &cfg, &mut stats),
            solve_extended(&right, 1, &cfg, &mut stats),
        ) else {
            continue;
        };
        let combined = combine_drawings(&ei, &gu, (&dl, &left_old), (&dr, &right_old));
        recombined += 1;
        if ei.accepts(&combined) {
            // The accounting identity holds when the recount accepts.
            let total = ei.count(&combined).unwrap();
            let lc = left.count(&dl).unwrap();
            let rc = right.count(&dr).unwrap();
            assert!(total <= gu.k_current + lc + rc);
            return; // one fully verified recombination is the fixture's point
        }
    }
    assert!(audited > 0, "no guess produced valid sub-instances");
    assert!(recombined > 0, "no guess recombined");
}

/// The weighted red/blue budget: in an optimal drawing with c crossings,
/// edges crossed more than sqrt(c) times carry at most 2*sqrt(c) total
/// multiplicity. This is the subset-pigeonhole statement in its equivalent
/// counting form.
#[test]
fn blue_edge_pigeonhole() {
    let mut rng = sample::rng(0x5e04);
    let mut checked = 0;
    while checked < 40 {
        let g = sample::connected_graph(&mut rng, 2, 4, 3);
        let (min, d) = layercross::brute::brute_min(
            &g,
            None,
            None,
            &layercross::brute::BruteConfig::default(),
        )
        .unwrap();
        if min == 0 {
            continue;
        }
        let pos = d.positions(&g);
        let s = {
            let mut r = (min as f64).sqrt() as u64;
            while r * r > min {
                r -= 1;
            }
            while (r + 1) * (r + 1) <= min {
                r += 1;
            }
            r
        };
        let mut red_weight = 0u64;
        for (i, e) in g.edges().iter().enumerate() {
            let crossed = g
                .edges()
                .iter()
                .enumerate()
                .filter(|(j, f)| {
                    *j != i
                        && g.layer_of(e.u) == g.layer_of(f.u)
                        && layercross::graph::edges_cross(e, f, &pos)
                })
                .count() as u64;
            if crossed > s {
                red_weight += e.mult;
            }
        }
        assert!(
            red_weight <= 2 * s,
            "red multiplicity {red_weight} exceeds 2*sqrt({min})"
        );
        checked += 1;
    }
}

/// Stress the recursive path itself: with a tiny threshold constant the
/// separator machinery must reproduce the brute decisions.
#[test]
fn recursion_matches_oracle_on_fixtures() {
    let cfg = Solve2Config {
        base_c: 1,
        ..Default::default()
    };
    // K_{2,3} has minimum 3: recursion fires for budgets above sqrt(k*).
    let g = LayeredGraph::try_new(
        2,
        vec![0, 1, 1, 2, 2, 2],
        vec![
            (1, 3, 1),
            (1, 4, 1),
            (1, 5, 1),
            (2, 3, 1),
            (2, 4, 1),
            (2, 5, 1),
        ],
    )
    .unwrap();
    for k in [2u64, 3, 4] {
        let inst = Instance {
            graph: g.clone(),
            k,
            k_star: 9,
        };
        let mut stats = Solve2Stats::default();
        let mut any = false;
        for ei in lift_with_budget(&inst, k) {
            if let Some(d) = solve_extended(&ei, 0, &cfg, &mut stats) {
                assert!(ei.accepts(&d));
                any = true;
                break;
            }
        }
        assert_eq!(any, k >= 3, "K23 has minimum 3");
        // The base case covers k*k <= base_c^2 * k_star = 9, so only the
        // k = 4 run exercises the separator recursion.
        if k == 4 {
            assert!(stats.recursive_calls > 0);
        }
    }
}

/// Shared-endpoint separators: a complete bipartite core with pendant
/// fringe on one side forces the pendant-blueprint labeling when the two
/// separator edges meet in the bottom vertex.
#[test]
fn shared_bottom_pendant_blueprints() {
    // K22 on {1,2} x {3,4} plus pendants 5,6 on vertex 1.
    let g = LayeredGraph::try_new(
        2,
        vec![0, 1, 1, 2, 2, 2, 2],
        vec![
            (1, 3, 1),
            (1, 4, 1),
            (2, 3, 1),
            (2, 4, 1),
            (1, 5, 1),
            (1, 6, 1),
        ],
    )
    .unwrap();
    let cfg = Solve2Config {
        base_c: 0,
        ..Default::default()
    };
    for k in [0u64, 1, 2] {
        let inst = Instance {
            graph: g.clone(),
            k,
            k_star: k.max(1),
        };
        let mut stats = Solve2Stats::default();
        let mut got = false;
        for ei in lift_with_budget(&inst, k) {
            if let Some(d) = solve_extended(&ei, 0, &cfg, &mut stats) {
                assert!(ei.accepts(&d));
                got = true;
                break;
            }
        }
        // The pendants draw free, so the K22 core fixes the minimum at 1.
        assert_eq!(got, k >= 1);
        if k >= 1 {
            assert!(stats.recursive_calls > 0, "base_c = 0 forces recursion");
        }
    }
    // The stream on a lifted instance contains shared-bottom separators.
    let inst = Instance {
        graph: g,
        k: 1,
        k_star: 1,
    };
    let ei = lift_with_budget(&inst, 1).into_iter().next().unwrap();
    let shared = enumerate_guesses(&ei).into_iter().any(|gu| {
        let le = ei.graph.edge(gu.lsep);
        let re = ei.graph.edge(gu.rsep);
        let bottom = |e: &layercross::Edge| {
            if ei.graph.layer_of(e.u) == 1 {
                e.u
            } else {
                e.v
            }
        };
        gu.lsep != gu.rsep && bottom(le) == bottom(re)
    });
    assert!(shared, "expected shared-bottom separator guesses");
}
