//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured numbers. Tolerances are exact (zero) unless a bound is
//! stated inline.

use std::collections::HashSet;

use layercross::brute::{brute_decide, brute_min, BruteConfig};
use layercross::gadgets::{
    build_eth5, build_nokern4, build_s, df_brute_intervals, df_solve, encode_alphabet,
    restrictive_drawing, yes_drawing, DfInstance, GadgetParams,
};
use layercross::graph::{
    count_crossings, count_crossings_pairwise, Drawing, Instance, LayeredGraph, VertexId,
};
use layercross::kernel2::{kernelize2, Kernel2Outcome};
use layercross::kernel3::{final_bounds, kernelize3, Kernel3Outcome, KernelMode};
use layercross::planarity::crossing_free;
use layercross::sample;
use layercross::subexp2::{lift_with_budget, solve2, Solve2Config, Solve2Outcome, Solve2Stats};

/// Criterion 1: solve2 equals brute_min in decision and minimum on 200
/// seeded random connected instances with layers of at most 5 vertices and
/// budgets 0..=4.
#[test]
fn criterion_1_two_layer_oracle_equivalence() {
    let mut rng = sample::rng(0xACCE5501);
    let cfg = Solve2Config::default();
    let mut checked = 0;
    while checked < 200 {
        let graph = sample::connected_graph(&mut rng, 2, 5, 3);
        use rand::Rng;
        let k = rng.gen_range(0..=4);
        let inst = Instance::new(graph, k);
        let (min, _) = brute_min(&inst.graph, None, None, &BruteConfig::default()).unwrap();
        let mut stats = Solve2Stats::default();
        match solve2(&inst, &cfg, &mut stats).unwrap() {
            Solve2Outcome::Yes { min: got, drawing } => {
                assert!(
                    min <= k,
                    "instance {checked}: claimed yes, oracle min {min} > {k}"
                );
                assert_eq!(got, min, "instance {checked}: minimum mismatch");
                let recount = count_crossings(&inst.graph, &drawing).unwrap().total;
                assert_eq!(recount, min, "instance {checked}: witness recount");
            }
            Solve2Outcome::No => {
                assert!(
                    min > k,
                    "instance {checked}: claimed no, oracle min {min} <= {k}"
                );
            }
        }
        checked += 1;
    }
    println!("criterion 1: pass - solve2 matched brute_min on {checked} instances");
}

/// Criterion 2: both kernelizations preserve the brute-force decision on
/// 100 seeded instances each; zero mismatches.
#[test]
fn criterion_2_kernel_safety() {
    let mut rng = sample::rng(0xACCE5502);
    let cfg = BruteConfig::default();
    let mut checked2 = 0;
    while checked2 < 100 {
        let graph = sample::connected_graph(&mut rng, 2, 6, 3);
        if graph.n() > 12 {
            continue;
        }
        use rand::Rng;
        let k = rng.gen_range(0..=3);
        let inst = Instance::new(graph, k);
        let before = brute_decide(&inst, None, &cfg).unwrap().is_some();
        let after = match kernelize2(&inst).unwrap() {
            Kernel2Outcome::DecidedYes { .. } => true,
            Kernel2Outcome::DecidedNo => false,
            Kernel2Outcome::Kernelized { instance, .. } => {
                assert!(instance.graph.n() <= inst.graph.n(), "kernel grew");
                assert!(instance.graph.m() <= inst.graph.m(), "kernel grew");
                brute_decide(&instance, None, &cfg).unwrap().is_some()
            }
        };
        assert_eq!(before, after, "2-layer kernel changed the decision");
        checked2 += 1;
    }
    let mut checked3 = 0;
    while checked3 < 100 {
        let graph = sample::random_graph(&mut rng, 3, 4, 0.4);
        if graph.n() > 12 {
            continue;
        }
        use rand::Rng;
        let k = rng.gen_range(0..=2);
        let inst = Instance::new(graph, k);
        let before = brute_decide(&inst, None, &cfg).unwrap().is_some();
        let after = match kernelize3(&inst, KernelMode::Scheduled).unwrap() {
            Kernel3Outcome::DecidedYes { .. } => true,
            Kernel3Outcome::DecidedNo => false,
            Kernel3Outcome::Kernelized { instance, .. } => {
                brute_decide(&instance, None, &cfg).unwrap().is_some()
            }
        };
        assert_eq!(before, after, "3-layer kernel changed the decision");
        checked3 += 1;
    }
    println!(
        "criterion 2: pass - decisions preserved on {checked2} two-layer and {checked3} three-layer instances"
    );
}

/// Criterion 3: every non-decided 3-layer kernel output satisfies the final
/// size rule's bounds.
#[test]
fn criterion_3_kernel_size_bound() {
    let mut rng = sample::rng(0xACCE5503);
    let mut outputs = 0;
    for _ in 0..100 {
        let graph = sample::random_graph(&mut rng, 3, 4, 0.4);
        use rand::Rng;
        let k = rng.gen_range(0..=2);
        let inst = Instance::new(graph, k);
        if let Kernel3Outcome::Kernelized { instance, .. } =
            kernelize3(&inst, KernelMode::Scheduled).unwrap()
        {
            let (vmax, emax) = final_bounds(instance.k);
            assert!((instance.graph.n() as u128) <= vmax);
            assert!((instance.graph.m() as u128) <= emax);
            outputs += 1;
        }
    }
    println!("criterion 3: pass - {outputs} kernel outputs within the size bounds");
}

/// Criterion 4: restrictive drawings count exactly 14l-2 for k in {2,4,8}
/// and every symbol, independent of the pendant-bundle size.
#[test]
fn criterion_4_restrictive_counts() {
    let mut total = 0;
    for (k, want) in [(2u64, 26u64), (4, 40), (8, 54)] {
        for p in [Some(5), None] {
            let params = GadgetParams::new(k, p).unwrap();
            for i in 1..=k as usize {
                let (built, claimed) = restrictive_drawing(i, &params).unwrap();
                assert_eq!(claimed, want);
                let got = count_crossings(&built.graph, &built.drawing).unwrap().total;
                assert_eq!(got, want, "k={k} i={i} p={:?}", p);
                total += 1;
            }
        }
    }
    println!("criterion 4: pass - {total} restrictive drawings counted 26/40/54 exactly");
}

/// Criterion 5: seeded Disjoint Factors yes-instances with k = 2 give a
/// 104-crossing combined drawing, a 4-layer drawing within 155, and a
/// 5-layer drawing within 104 with clean outer gaps.
#[test]
fn criterion_5_yes_instance_drawings() {
    let mut rng = sample::rng(0xACCE5505);
    use rand::Rng;
    let params = GadgetParams::new(2, Some(5)).unwrap();
    let mut built = 0;
    while built < 5 {
        let len = rng.gen_range(4..=8);
        let symbols: Vec<usize> = (0..len).map(|_| rng.gen_range(0..2)).collect();
        let inst = DfInstance::new(symbols, 2).unwrap();
        let Some(witness) = df_solve(&inst).unwrap() else {
            continue;
        };
        let yd = yes_drawing(&inst, &params, &witness).unwrap();
        let report = count_crossings(&yd.graph, &yd.drawing).unwrap();
        assert_eq!(report.total, 104, "combined drawing must count 2k(14l-2)");
        assert_eq!(report.per_gap[3 - 1], 0, "collector edges must not cross");
        let nk = build_nokern4(&inst, &params, Some(&witness)).unwrap();
        assert_eq!(nk.instance.k, 155);
        let nk_count = count_crossings(&nk.instance.graph, nk.witness_drawing.as_ref().unwrap())
            .unwrap()
            .total;
        assert!(nk_count <= 155, "4-layer drawing exceeds its budget");
        assert_eq!(nk_count, 153, "regression: the built drawing's exact count");
        let e5 = build_eth5(&inst, &params, Some(&witness)).unwrap();
        assert_eq!(e5.instance.k, 104);
        let report =
            count_crossings(&e5.instance.graph, e5.witness_drawing.as_ref().unwrap()).unwrap();
        assert!(report.total <= 104);
        assert_eq!(report.per_gap[2], 0, "layer-3/4 crossings must vanish");
        assert_eq!(report.per_gap[3], 0, "layer-4/5 crossings must vanish");
        built += 1;
    }
    println!("criterion 5: pass - {built} seeded yes-instances drew within budget");
}

/// Every clause of the separator definition, checked literally on an
/// extended drawing.
fn separator_exists(graph: &LayeredGraph, d: &Drawing, k: u64) -> bool {
    let pos = d.positions(graph);
    let m = graph.m();
    let crossings: Vec<(usize, usize)> = {
        let mut v = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let (a, b) = (
                    graph.edge(layercross::EdgeId(i)),
                    graph.edge(layercross::EdgeId(j)),
                );
                if layercross::graph::edges_cross(a, b, &pos) {
                    v.push((i, j));
                }
            }
        }
        v
    };
    let cross_count =
        |e: usize| crossings.iter().filter(|&&(a, b)| a == e || b == e).count() as u64;
    let left_of = |e: usize, f: usize| {
        // every endpoint of e at most f's, one strictly
        let (a, b) = (
            graph.edge(layercross::EdgeId(e)),
            graph.edge(layercross::EdgeId(f)),
        );
        let (a1, a2) = (pos[a.u.index()], pos[a.v.index()]);
        let (b1, b2) = (pos[b.u.index()], pos[b.v.index()]);
        a1 <= b1 && a2 <= b2 && (a1 < b1 || a2 < b2)
    };
    for lsep in 0..m {
        'rs: for rsep in 0..m {
            if lsep == rsep || !left_of(lsep, rsep) {
                continue;
            }
            let blue = |e: usize| cross_count(e) * cross_count(e) <= k;
            if !blue(lsep) || !blue(rsep) {
                continue;
            }
            if crossings
                .iter()
                .any(|&(a, b)| (a == lsep && b == rsep) || (a == rsep && b == lsep))
            {
                continue;
            }
            // Crossings strictly left of lsep / right of rsep.
            let left_cross = crossings
                .iter()
                .filter(|&&(a, b)| left_of(a, lsep) && left_of(b, lsep))
                .count() as u64;
            let right_cross = crossings
                .iter()
                .filter(|&&(a, b)| left_of(rsep, a) && left_of(rsep, b))
                .count() as u64;
            if 2 * left_cross > k || 2 * right_cross > k {
                continue;
            }
            // Mid sets per layer.
            let le = graph.edge(layercross::EdgeId(lsep));
            let re = graph.edge(layercross::EdgeId(rsep));
            for layer in 1..=2u8 {
                let (l_end, r_end) = (
                    if graph.layer_of(le.u) == layer {
                        le.u
                    } else {
                        le.v
                    },
                    if graph.layer_of(re.u) == layer {
                        re.u
                    } else {
                        re.v
                    },
                );
                let mid = graph
                    .layer(layer)
                    .iter()
                    .filter(|v| {
                        pos[l_end.index()] <= pos[v.index()] && pos[v.index()] <= pos[r_end.index()]
                    })
                    .count() as u64;
                if mid >= 2 && (mid - 2) * (mid - 2) >= 16 * k {
                    continue 'rs;
                }
            }
            // Middle edges.
            let in_mid = |v: VertexId| {
                let layer = graph.layer_of(v);
                let (l_end, r_end) = (
                    if graph.layer_of(le.u) == layer {
                        le.u
                    } else {
                        le.v
                    },
                    if graph.layer_of(re.u) == layer {
                        re.u
                    } else {
                        re.v
                    },
                );
                pos[l_end.index()] <= pos[v.index()] && pos[v.index()] <= pos[r_end.index()]
            };
            let middle = (0..m)
                .filter(|&e| e != lsep && e != rsep)
                .filter(|&e| {
                    let f = graph.edge(layercross::EdgeId(e));
                    in_mid(f.u) && in_mid(f.v)
                })
                .count() as u64;
            if middle * middle > 4 * k {
                continue;
            }
            let crossing_edges: HashSet<usize> = crossings
                .iter()
                .filter(|&&(a, b)| a == lsep || b == lsep || a == rsep || b == rsep)
                .flat_map(|&(a, b)| [a, b])
                .filter(|&e| e != lsep && e != rsep)
                .collect();
            if (crossing_edges.len() * crossing_edges.len()) as u64 > 4 * k {
                continue;
            }
            return true;
        }
    }
    false
}

/// Criterion 6: on a tiny corpus of minimal yes-instances, every optimal
/// drawing admits a separator satisfying all definition clauses.
#[test]
fn criterion_6_separator_existence_audit() {
    let mut rng = sample::rng(0xACCE5506);
    let mut audited_instances = 0;
    let mut audited_drawings = 0;
    while audited_instances < 25 {
        let graph = sample::connected_graph(&mut rng, 2, 4, 3);
        if graph.n() > 8 {
            continue;
        }
        let (min, _) = brute_min(&graph, None, None, &BruteConfig::default()).unwrap();
        if min == 0 {
            continue;
        }
        let k = min; // the instance is k-minimal for its own minimum
        let inst = Instance::new(graph.clone(), k);
        let lifts = lift_with_budget(&inst, k);
        let mut optima: Vec<Drawing> = Vec::new();
        enumerate_drawings(&graph, &mut |d| {
            if count_crossings(&graph, d).unwrap().total == min {
                optima.push(d.clone());
            }
        });
        assert!(!optima.is_empty());
        for opt in optima {
            // Pick the lift whose guard edges pin this drawing's extremes.
            let l1 = opt.order(1);
            let (first, last) = (l1[0], *l1.last().unwrap());
            let ei = lifts
                .iter()
                .find(|ei| {
                    ei.graph.edge(ei.leftbound).touches(first)
                        && ei.graph.edge(ei.rightbound).touches(last)
                })
                .expect("a lift exists for every extreme pair");
            let mut orders = opt.orders.clone();
            let n = graph.n() as u32;
            orders[1].insert(0, VertexId(n + 1));
            orders[1].push(VertexId(n + 2));
            let ext = Drawing::new(orders);
            assert!(
                separator_exists(&ei.graph, &ext, k),
                "no separator for an optimal drawing (n={}, k={k})",
                graph.n()
            );
            audited_drawings += 1;
        }
        audited_instances += 1;
    }
    println!(
        "criterion 6: pass - separators found for {audited_drawings} optimal drawings over {audited_instances} minimal instances"
    );
}

fn enumerate_drawings(graph: &LayeredGraph, f: &mut impl FnMut(&Drawing)) {
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
    for o1 in perms(graph.layer(1)) {
        for o2 in perms(graph.layer(2)) {
            f(&Drawing::new(vec![o1.clone(), o2]));
        }
    }
}

/// Criterion 7: the inversion counter equals the pairwise oracle on 1000
/// random pairs, and complete bipartite drawings count C(m,2)*C(n,2).
#[test]
fn criterion_7_counting_correctness() {
    let mut rng = sample::rng(0xACCE5507);
    for i in 0..1000 {
        let graph = if i % 3 == 0 {
            let g = sample::random_graph(&mut rng, if i % 2 == 0 { 2 } else { 3 }, 6, 0.5);
            sample::with_random_multiplicities(&mut rng, &g, 3)
        } else {
            sample::random_graph(&mut rng, 2 + (i % 4) as u8 % 3, 6, 0.5)
        };
        let d = sample::random_drawing(&mut rng, &graph);
        let fast = count_crossings(&graph, &d).unwrap();
        let slow = count_crossings_pairwise(&graph, &d).unwrap();
        assert_eq!(fast.total, slow.total, "pair {i}");
        assert_eq!(fast.per_gap, slow.per_gap, "pair {i}");
    }
    for m in 1..=4u32 {
        for n in 1..=4u32 {
            let mut layer_of = vec![0u8];
            layer_of.extend(std::iter::repeat_n(1, m as usize));
            layer_of.extend(std::iter::repeat_n(2, n as usize));
            let mut edges = Vec::new();
            for u in 1..=m {
                for v in m + 1..=m + n {
                    edges.push((u, v, 1));
                }
            }
            let g = LayeredGraph::try_new(2, layer_of, edges).unwrap();
            let want = (m as u64 * (m as u64 - 1) / 2) * (n as u64 * (n as u64 - 1) / 2);
            for _ in 0..20 {
                let d = sample::random_drawing(&mut rng, &g);
                assert_eq!(count_crossings(&g, &d).unwrap().total, want, "K{m},{n}");
            }
        }
    }
    println!("criterion 7: pass - 1000 random pairs agreed; complete bipartite counts exact");
}

/// Criterion 8: crossing-free testing agrees with permutation enumeration
/// on every tree with at most 9 vertices and on 100 random 3-layer graphs.
#[test]
fn criterion_8_planarity_correctness() {
    // All unlabeled trees up to 9 vertices, via canonical tree hashing over
    // labeled trees from their degree codes.
    let mut tree_count = 0usize;
    for n in 1..=9usize {
        let mut seen: HashSet<String> = HashSet::new();
        if n == 1 {
            tree_count += 1; // a single vertex is trivially crossing-free
            continue;
        }
        for_each_labeled_tree(n, &mut |edges| {
            let canon = canonical_tree_code(n, edges);
            if !seen.insert(canon) {
                return;
            }
            tree_count += 1;
            // A tree 2-colors uniquely.
            let mut layer_of = vec![0u8; n + 1];
            layer_of[1] = 1;
            let mut adj = vec![Vec::new(); n + 1];
            for &(a, b) in edges {
                adj[a].push(b);
                adj[b].push(a);
            }
            let mut stack = vec![1usize];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if layer_of[w] == 0 {
                        layer_of[w] = 3 - layer_of[v];
                        stack.push(w);
                    }
                }
            }
            let g = LayeredGraph::try_new(
                2,
                layer_of.clone(),
                edges
                    .iter()
                    .map(|&(a, b)| (a as u32, b as u32, 1))
                    .collect(),
            )
            .expect("a 2-colored tree is a valid 2-layer graph");
            let fast = crossing_free(&g).unwrap().is_some();
            let (min, _) = brute_min(&g, None, None, &BruteConfig::default()).unwrap();
            assert_eq!(fast, min == 0, "tree with {n} vertices, edges {edges:?}");
        });
    }
    let mut rng = sample::rng(0xACCE5508);
    let mut random_checked = 0;
    while random_checked < 100 {
        let g = sample::random_graph(&mut rng, 3, 4, 0.4);
        let fast = crossing_free(&g).unwrap();
        let (min, _) = brute_min(&g, None, None, &BruteConfig::default()).unwrap();
        assert_eq!(fast.is_some(), min == 0);
        if let Some(d) = fast {
            assert_eq!(count_crossings(&g, &d).unwrap().total, 0);
        }
        random_checked += 1;
    }
    println!(
        "criterion 8: pass - {tree_count} trees and {random_checked} random 3-layer graphs agreed"
    );
}

/// Labeled trees on `1..=n` from iterated attachment codes: vertex `i`
/// attaches to one of `1..i`. This covers every labeled tree shape at least
/// once (increasing trees), which is enough to hit every unlabeled tree.
fn for_each_labeled_tree(n: usize, f: &mut impl FnMut(&Vec<(usize, usize)>)) {
    fn rec(
        n: usize,
        next: usize,
        edges: &mut Vec<(usize, usize)>,
        f: &mut impl FnMut(&Vec<(usize, usize)>),
    ) {
        if next > n {
            f(edges);
            return;
        }
        for parent in 1..next {
            edges.push((parent, next));
            rec(n, next + 1, edges, f);
            edges.pop();
        }
    }
    if n == 1 {
        f(&Vec::new());
        return;
    }
    rec(n, 2, &mut Vec::new(), f);
}

/// AHU canonical code of a free tree (rooted at its centroid set).
fn canonical_tree_code(n: usize, edges: &Vec<(usize, usize)>) -> String {
    let mut adj = vec![Vec::new(); n + 1];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    fn code(v: usize, parent: usize, adj: &Vec<Vec<usize>>) -> String {
        let mut subs: Vec<String> = adj[v]
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| code(w, v, adj))
            .collect();
        subs.sort();
        format!("({})", subs.concat())
    }
    // Centroids: remove leaves repeatedly.
    let mut degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut removed = vec![false; n + 1];
    let mut remaining = n;
    let mut frontier: Vec<usize> = (1..=n).filter(|&v| degree[v] <= 1).collect();
    while remaining > 2 {
        let mut next = Vec::new();
        for &v in &frontier {
            if removed[v] {
                continue;
            }
            removed[v] = true;
            remaining -= 1;
            for &w in &adj[v] {
                if !removed[w] {
                    degree[w] -= 1;
                    if degree[w] <= 1 {
                        next.push(w);
                    }
                }
            }
        }
        frontier = next;
    }
    let centroids: Vec<usize> = (1..=n).filter(|&v| !removed[v]).collect();
    let mut codes: Vec<String> = centroids.iter().map(|&c| code(c, 0, &adj)).collect();
    codes.sort();
    codes.concat()
}

/// Criterion 9: alphabet encodings are balanced, distinct, and
/// reversal-distinct for every k up to 64.
#[test]
fn criterion_9_encoding_properties() {
    for k in 1..=64u64 {
        let enc = encode_alphabet(k).unwrap();
        assert_eq!(enc.len(), k as usize);
        let ell = enc[0].len() / 2;
        let set: HashSet<&String> = enc.iter().collect();
        assert_eq!(set.len(), enc.len(), "k={k}: encodings must be distinct");
        for s in &enc {
            assert_eq!(s.chars().filter(|&c| c == '0').count(), ell, "k={k}");
            assert_eq!(s.chars().filter(|&c| c == '1').count(), ell, "k={k}");
            assert!(s.starts_with('0') && s.ends_with('1'), "k={k}");
            let rev: String = s.chars().rev().collect();
            assert!(!set.contains(&rev), "k={k}: reversal collision");
        }
    }
    println!("criterion 9: pass - encoding invariants hold for k = 1..=64");
}

/// Criterion 10: the dynamic program agrees with the independent
/// interval-family brute force on every string with |s| <= 10, k <= 3.
#[test]
fn criterion_10_df_exhaustive_agreement() {
    let mut checked = 0u64;
    for k in 1..=3usize {
        for len in 0..=10usize {
            let mut symbols = vec![0usize; len];
            loop {
                let inst = DfInstance::new(symbols.clone(), k).unwrap();
                let dp = df_solve(&inst).unwrap();
                let brute = df_brute_intervals(&inst);
                assert_eq!(
                    dp.is_some(),
                    brute,
                    "k={k} s={symbols:?}: solver and interval brute disagree"
                );
                if let Some(w) = dp {
                    assert!(inst.witness_valid(&w));
                }
                checked += 1;
                if !next_base_k(&mut symbols, k) {
                    break;
                }
            }
        }
    }
    // Sanity floor so a generator bug cannot silently shrink the corpus.
    assert!(checked > 90_000, "checked {checked} strings");
    println!("criterion 10: pass - {checked} strings agreed with the interval brute force");
}

/// Advances a base-k counter; false on wrap-around.
fn next_base_k(digits: &mut [usize], k: usize) -> bool {
    for i in (0..digits.len()).rev() {
        if digits[i] + 1 < k {
            digits[i] += 1;
            for d in &mut digits[i + 1..] {
                *d = 0;
            }
            return true;
        }
    }
    false
}

/// Used by criterion 4/5 fixtures elsewhere; kept here so the suite also
/// exercises the per-symbol builders directly.
#[test]
fn symbol_gadget_shape_counts() {
    for k in [2u64, 4, 8] {
        let params = GadgetParams::new(k, Some(5)).unwrap();
        for i in 1..=k as usize {
            let s = build_s(i, &params).unwrap();
            assert_eq!(count_crossings(&s.graph, &s.drawing).unwrap().total, 0);
        }
    }
}
