//! Seeded random instance generation. Test suites and the oracle corpora
//! are built on these; everything is deterministic given the seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Drawing, Instance, LayeredGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected layered graph: a random spanning tree across consecutive
/// layers plus `extra` additional random edges (when available).
pub fn connected_graph(
    rng: &mut ChaCha8Rng,
    h: u8,
    max_per_layer: usize,
    extra: usize,
) -> LayeredGraph {
    loop {
        let sizes: Vec<usize> = (0..h).map(|_| rng.gen_range(1..=max_per_layer)).collect();
        let n: usize = sizes.iter().sum();
        let mut layer_of = vec![0u8; n + 1];
        let mut by_layer: Vec<Vec<u32>> = vec![Vec::new(); h as usize + 1];
        {
            let mut v = 1u32;
            for (li, &s) in sizes.iter().enumerate() {
                for _ in 0..s {
                    layer_of[v as usize] = li as u8 + 1;
                    by_layer[li + 1].push(v);
                    v += 1;
                }
            }
        }
        // Spanning tree: repeatedly attach a random unattached vertex to a
        // random attached vertex on an adjacent layer.
        let mut edges: Vec<(u32, u32, u64)> = Vec::new();
        let mut present: std::collections::HashSet<(u32, u32)> = std::collections::HashSet::new();
        let start = rng.gen_range(1..=n as u32);
        let mut attached = vec![false; n + 1];
        attached[start as usize] = true;
        let mut attached_count = 1;
        let mut ok = true;
        while attached_count < n {
            let frontier: Vec<u32> = (1..=n as u32)
                .filter(|&v| !attached[v as usize])
                .filter(|&v| {
                    (1..=n as u32).any(|w| {
                        attached[w as usize]
                            && layer_of[w as usize].abs_diff(layer_of[v as usize]) == 1
                    })
                })
                .collect();
            if frontier.is_empty() {
                ok = false;
                break;
            }
            let v = frontier[rng.gen_range(0..frontier.len())];
            let nbrs: Vec<u32> = (1..=n as u32)
                .filter(|&w| {
                    attached[w as usize] && layer_of[w as usize].abs_diff(layer_of[v as usize]) == 1
                })
                .collect();
            let w = nbrs[rng.gen_range(0..nbrs.len())];
            present.insert((v.min(w), v.max(w)));
            edges.push((v.min(w), v.max(w), 1));
            attached[v as usize] = true;
            attached_count += 1;
        }
        if !ok {
            continue;
        }
        // Extra edges between random adjacent-layer pairs.
        for _ in 0..extra {
            let gap = rng.gen_range(1..h);
            let (lo, hi) = (&by_layer[gap as usize], &by_layer[gap as usize + 1]);
            if lo.is_empty() || hi.is_empty() {
                continue;
            }
            let u = lo[rng.gen_range(0..lo.len())];
            let v = hi[rng.gen_range(0..hi.len())];
            if present.insert((u.min(v), u.max(v))) {
                edges.push((u.min(v), u.max(v), 1));
            }
        }
        if let Ok(g) = LayeredGraph::try_new(h, layer_of, edges) {
            return g;
        }
    }
}

/// Random graph (not necessarily connected): per-gap edges kept with
/// probability `p`, then isolated-layer repair by rejection.
pub fn random_graph(rng: &mut ChaCha8Rng, h: u8, max_per_layer: usize, p: f64) -> LayeredGraph {
    loop {
        let sizes: Vec<usize> = (0..h).map(|_| rng.gen_range(1..=max_per_layer)).collect();
        let n: usize = sizes.iter().sum();
        let mut layer_of = vec![0u8; n + 1];
        let mut by_layer: Vec<Vec<u32>> = vec![Vec::new(); h as usize + 1];
        let mut v = 1u32;
        for (li, &s) in sizes.iter().enumerate() {
            for _ in 0..s {
                layer_of[v as usize] = li as u8 + 1;
                by_layer[li + 1].push(v);
                v += 1;
            }
        }
        let mut edges = Vec::new();
        for gap in 1..h {
            for &u in &by_layer[gap as usize] {
                for &w in &by_layer[gap as usize + 1] {
                    if rng.gen_bool(p) {
                        edges.push((u, w, 1));
                    }
                }
            }
        }
        if let Ok(g) = LayeredGraph::try_new(h, layer_of, edges) {
            return g;
        }
    }
}

/// Random instance with a random budget in `0..=max_k`.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    h: u8,
    max_per_layer: usize,
    extra: usize,
    max_k: u64,
) -> Instance {
    let g = connected_graph(rng, h, max_per_layer, extra);
    let k = rng.gen_range(0..=max_k);
    Instance::new(g, k)
}

/// Uniformly random drawing of `graph`.
pub fn random_drawing(rng: &mut ChaCha8Rng, graph: &LayeredGraph) -> Drawing {
    let mut d = Drawing::natural(graph);
    for ord in &mut d.orders {
        // Fisher-Yates.
        for i in (1..ord.len()).rev() {
            let j = rng.gen_range(0..=i);
            ord.swap(i, j);
        }
    }
    d
}

/// Assigns random multiplicities in `1..=max_mult` to a fraction of edges.
pub fn with_random_multiplicities(
    rng: &mut ChaCha8Rng,
    graph: &LayeredGraph,
    max_mult: u64,
) -> LayeredGraph {
    let layer_of: Vec<u8> = std::iter::once(0)
        .chain(graph.vertices().map(|v| graph.layer_of(v)))
        .collect();
    let edges: Vec<(u32, u32, u64)> = graph
        .edges()
        .iter()
        .map(|e| (e.u.0, e.v.0, rng.gen_range(1..=max_mult)))
        .collect();
    LayeredGraph::try_new(graph.h(), layer_of, edges).unwrap()
}
