//! Exhaustive exact solvers. These serve both as standalone solvers for tiny
//! inputs and as ground truth for every other module's tests.

use thiserror::Error;

use crate::graph::{count_crossings, Drawing, Instance, LayeredGraph, VertexId};
use crate::kernel3::{self, Kernel3Outcome, KernelMode};
use crate::planarity::OrderConstraints;

pub const DEFAULT_MAX_DRAWINGS: u64 = 10_000_000;
pub const DEFAULT_MAX_NODES: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BruteError {
    #[error("enumeration space of {0} drawings exceeds the limit {1}")]
    EnumerationLimit(u128, u64),
    #[error("no drawing is compatible with the supplied constraints")]
    Unsatisfiable,
    #[error("branch-and-bound search node limit {0} exceeded")]
    SearchNodeLimit(u64),
    #[error("operation requires a 3-layer instance, got {0} layers")]
    NotThreeLayers(u8),
    #[error("kernelization rejected the instance: {0}")]
    Kernel(String),
}

#[derive(Clone, Copy, Debug)]
pub struct BruteConfig {
    pub max_drawings: u64,
    pub jobs: usize,
}

impl Default for BruteConfig {
    fn default() -> Self {
        BruteConfig {
            max_drawings: DEFAULT_MAX_DRAWINGS,
            jobs: 1,
        }
    }
}

/// Lexicographic next-permutation over vertex ids. Returns false when the
/// sequence was the last one (and leaves it sorted ascending again).
fn next_permutation(vs: &mut [VertexId]) -> bool {
    if vs.len() < 2 {
        return false;
    }
    let mut i = vs.len() - 1;
    while i > 0 && vs[i - 1] >= vs[i] {
        i -= 1;
    }
    if i == 0 {
        vs.sort();
        return false;
    }
    let mut j = vs.len() - 1;
    while vs[j] <= vs[i - 1] {
        j -= 1;
    }
    vs.swap(i - 1, j);
    vs[i..].reverse();
    true
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Enumerates all drawings in lexicographic order (last layer fastest),
/// calling `f` until it returns false.
fn for_each_drawing(graph: &LayeredGraph, mut f: impl FnMut(&Drawing) -> bool) {
    let mut drawing = Drawing::natural(graph);
    loop {
        if !f(&drawing) {
            return;
        }
        // Odometer step: advance the last layer; carry leftwards.
        let mut l = drawing.orders.len();
        loop {
            if l == 0 {
                return;
            }
            if next_permutation(&mut drawing.orders[l - 1]) {
                break;
            }
            l -= 1;
        }
    }
}

fn space_size(graph: &LayeredGraph) -> u128 {
    (1..=graph.h())
        .map(|l| factorial(graph.layer(l).len()))
        .product()
}

/// Exact minimum over all constraint-compatible drawings by exhaustive
/// enumeration. With `cap`, stops at the first drawing counting `<= cap`.
/// The witness is the lexicographically first drawing achieving the returned
/// value (first layer most significant, layers enumerated ascending by id).
pub fn brute_min(
    graph: &LayeredGraph,
    constraints: Option<&OrderConstraints>,
    cap: Option<u64>,
    cfg: &BruteConfig,
) -> Result<(u64, Drawing), BruteError> {
    let space = space_size(graph);
    if space > cfg.max_drawings as u128 {
        return Err(BruteError::EnumerationLimit(space, cfg.max_drawings));
    }
    if cfg.jobs > 1 {
        return brute_min_parallel(graph, constraints, cfg);
    }
    let mut best: Option<(u64, Drawing)> = None;
    for_each_drawing(graph, |d| {
        if let Some(oc) = constraints {
            if !oc.satisfied_by(graph, d) {
                return true;
            }
        }
        let total = count_crossings(graph, d)
            .expect("enumerated drawing is valid")
            .total;
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, d.clone()));
        }
        if let Some(c) = cap {
            if total <= c {
                return false;
            }
        } else if total == 0 {
            return false;
        }
        true
    });
    best.ok_or(BruteError::Unsatisfiable)
}

/// Multi-worker variant: splits the first layer's permutation space by rank.
/// The reported minimum is schedule-independent; ties resolve to the lowest
/// chunk rank, so results stay reproducible here too.
fn brute_min_parallel(
    graph: &LayeredGraph,
    constraints: Option<&OrderConstraints>,
    cfg: &BruteConfig,
) -> Result<(u64, Drawing), BruteError> {
    // Enumerate first-layer permutations up front; workers own disjoint chunks.
    let mut first_orders = Vec::new();
    let mut ord = graph.layer(1).to_vec();
    loop {
        first_orders.push(ord.clone());
        if !next_permutation(&mut ord) {
            break;
        }
    }
    let chunk = first_orders.len().div_ceil(cfg.jobs.max(1));
    let results: Vec<Option<(u64, usize, Drawing)>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (ci, orders) in first_orders.chunks(chunk).enumerate() {
            handles.push(scope.spawn(move || {
                let mut best: Option<(u64, usize, Drawing)> = None;
                for first in orders {
                    restricted_enumeration(graph, first, constraints, &mut best, ci);
                }
                best
            }));
        }
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    results
        .into_iter()
        .flatten()
        .min_by_key(|(total, rank, _)| (*total, *rank))
        .map(|(total, _, d)| (total, d))
        .ok_or(BruteError::Unsatisfiable)
}

fn restricted_enumeration(
    graph: &LayeredGraph,
    first: &[VertexId],
    constraints: Option<&OrderConstraints>,
    best: &mut Option<(u64, usize, Drawing)>,
    rank: usize,
) {
    let mut drawing = Drawing::natural(graph);
    drawing.orders[0] = first.to_vec();
    loop {
        let pass = constraints.is_none_or(|oc| oc.satisfied_by(graph, &drawing));
        if pass {
            let total = count_crossings(graph, &drawing).unwrap().total;
            if best.as_ref().is_none_or(|(b, _, _)| total < *b) {
                *best = Some((total, rank, drawing.clone()));
            }
        }
        let mut l = drawing.orders.len();
        loop {
            if l <= 1 {
                return;
            }
            if next_permutation(&mut drawing.orders[l - 1]) {
                break;
            }
            l -= 1;
        }
    }
}

/// Decision with witness: yes iff some constraint-compatible drawing has at
/// most `inst.k` crossings.
pub fn brute_decide(
    inst: &Instance,
    constraints: Option<&OrderConstraints>,
    cfg: &BruteConfig,
) -> Result<Option<Drawing>, BruteError> {
    match brute_min(&inst.graph, constraints, Some(inst.k), cfg) {
        Ok((min, d)) => Ok((min <= inst.k).then_some(d)),
        Err(e) => Err(e),
    }
}

/// Result of the kernelize-then-search 3-layer solver.
#[derive(Clone, Debug)]
pub enum Solve3Outcome {
    /// Yes, with the minimum and a witness drawing of `searched`, which is
    /// the kernelized instance actually searched (equal to the input when no
    /// reduction fired).
    Yes {
        min: u64,
        drawing: Drawing,
        searched: Instance,
    },
    No,
}

/// Exact 3-layer decision: kernelize, then branch-and-bound over layer
/// orders (vertices inserted left to right, partial counts pruned against
/// the budget and the best complete drawing so far).
pub fn solve3_exact(inst: &Instance, max_nodes: u64) -> Result<Solve3Outcome, BruteError> {
    if inst.graph.h() != 3 {
        return Err(BruteError::NotThreeLayers(inst.graph.h()));
    }
    let kernel = kernel3::kernelize3(inst, KernelMode::Scheduled)
        .map_err(|e| BruteError::Kernel(e.to_string()))?;
    match kernel {
        Kernel3Outcome::DecidedYes { witness } => Ok(Solve3Outcome::Yes {
            min: 0,
            drawing: witness.unwrap_or_else(|| Drawing::natural(&inst.graph)),
            searched: inst.clone(),
        }),
        Kernel3Outcome::DecidedNo => Ok(Solve3Outcome::No),
        Kernel3Outcome::Kernelized { instance, .. } => {
            let (min, drawing) = branch_and_bound(&instance.graph, instance.k, max_nodes)?;
            if min <= instance.k {
                Ok(Solve3Outcome::Yes {
                    min,
                    drawing,
                    searched: instance,
                })
            } else {
                Ok(Solve3Outcome::No)
            }
        }
    }
}

/// Branch-and-bound over layered drawings (the kernel may shrink an
/// instance to two layers). Layer 1 is enumerated outright; the others grow
/// left to right with the fixed-crossings lower bound.
fn branch_and_bound(
    graph: &LayeredGraph,
    k: u64,
    max_nodes: u64,
) -> Result<(u64, Drawing), BruteError> {
    struct Ctx<'a> {
        graph: &'a LayeredGraph,
        nodes: u64,
        max_nodes: u64,
        best: Option<(u64, Drawing)>,
        /// Partial costs above this are pruned; tightens as solutions appear.
        bound: Option<u64>,
        done: bool,
    }

    // Crossing increment when appending `v` to the partial upper order given
    // the full lower order: pairs (e of placed, f of v) with lower positions
    // inverted. Precomputed per (placed, v) on the fly; graphs here are tiny.
    fn added_crossings(
        graph: &LayeredGraph,
        lower_pos: &[Option<u32>],
        placed: &[VertexId],
        v: VertexId,
        lower_layer: u8,
    ) -> u64 {
        let mut v_edges: Vec<(u32, u64)> = Vec::new();
        for e in graph.edges() {
            if graph.layer_of(e.u) == lower_layer && e.v == v {
                if let Some(p) = lower_pos[e.u.index()] {
                    v_edges.push((p, e.mult));
                }
            }
        }
        let mut total = 0;
        for w in placed {
            for e in graph.edges() {
                if graph.layer_of(e.u) == lower_layer && e.v == *w {
                    if let Some(p) = lower_pos[e.u.index()] {
                        for &(q, mult) in &v_edges {
                            if q < p {
                                total += mult * e.mult;
                            }
                        }
                    }
                }
            }
        }
        total
    }

    fn grow_layer(
        ctx: &mut Ctx<'_>,
        layer: u8,
        placed: &mut Vec<VertexId>,
        remaining: &mut Vec<VertexId>,
        cost: u64,
        lower_pos: &[Option<u32>],
        orders: &mut Vec<Vec<VertexId>>,
    ) -> Result<(), BruteError> {
        ctx.nodes += 1;
        if ctx.nodes > ctx.max_nodes {
            return Err(BruteError::SearchNodeLimit(ctx.max_nodes));
        }
        if ctx.done || ctx.bound.is_some_and(|b| cost > b) {
            return Ok(());
        }
        if remaining.is_empty() {
            orders[layer as usize - 1] = placed.clone();
            if layer == 2 && ctx.graph.h() >= 3 {
                let mut pos = vec![None; ctx.graph.n() + 1];
                for (i, v) in placed.iter().enumerate() {
                    pos[v.index()] = Some(i as u32);
                }
                let mut rem3 = ctx.graph.layer(3).to_vec();
                let mut placed3 = Vec::new();
                grow_layer(ctx, 3, &mut placed3, &mut rem3, cost, &pos, orders)?;
            } else {
                let d = Drawing::new(orders.clone());
                debug_assert_eq!(count_crossings(ctx.graph, &d).unwrap().total, cost);
                if ctx.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                    ctx.best = Some((cost, d));
                    ctx.bound = Some(cost.saturating_sub(1));
                    if cost == 0 {
                        ctx.done = true;
                    }
                }
            }
            return Ok(());
        }
        for i in 0..remaining.len() {
            let v = remaining[i];
            let add = added_crossings(ctx.graph, lower_pos, placed, v, layer - 1);
            let cost2 = cost + add;
            if ctx.bound.is_some_and(|b| cost2 > b) {
                continue;
            }
            remaining.remove(i);
            placed.push(v);
            grow_layer(ctx, layer, placed, remaining, cost2, lower_pos, orders)?;
            placed.pop();
            remaining.insert(i, v);
            if ctx.done {
                break;
            }
        }
        Ok(())
    }

    let mut ctx = Ctx {
        graph,
        nodes: 0,
        max_nodes,
        best: None,
        bound: Some(k),
        done: false,
    };
    let mut first = graph.layer(1).to_vec();
    loop {
        let mut orders = vec![Vec::new(); graph.h() as usize];
        orders[0] = first.clone();
        let mut pos = vec![None; graph.n() + 1];
        for (i, v) in first.iter().enumerate() {
            pos[v.index()] = Some(i as u32);
        }
        let mut rem2 = graph.layer(2).to_vec();
        let mut placed2 = Vec::new();
        grow_layer(&mut ctx, 2, &mut placed2, &mut rem2, 0, &pos, &mut orders)?;
        if ctx.done || !next_permutation(&mut first) {
            break;
        }
    }
    match ctx.best {
        Some((min, d)) => Ok((min, d)),
        // Bound never met: the true minimum exceeds the budget.
        None => Ok((k + 1, Drawing::natural(graph))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LayeredGraph;

    fn k_mn(m: u32, n: u32) -> LayeredGraph {
        let mut layer_of = vec![0u8];
        layer_of.extend(std::iter::repeat_n(1, m as usize));
        layer_of.extend(std::iter::repeat_n(2, n as usize));
        let mut edges = Vec::new();
        for u in 1..=m {
            for v in m + 1..=m + n {
                edges.push((u, v, 1));
            }
        }
        LayeredGraph::try_new(2, layer_of, edges).unwrap()
    }

    #[test]
    fn caterpillar_minimum_is_zero() {
        let g = LayeredGraph::try_new(
            2,
            vec![0, 1, 2, 1, 2],
            vec![(1, 2, 1), (2, 3, 1), (3, 4, 1)],
        )
        .unwrap();
        let (min, d) = brute_min(&g, None, None, &BruteConfig::default()).unwrap();
        assert_eq!(min, 0);
        assert_eq!(count_crossings(&g, &d).unwrap().total, 0);
    }

    #[test]
    fn k22_minimum_is_one() {
        let (min, _) = brute_min(&k_mn(2, 2), None, None, &BruteConfig::default()).unwrap();
        assert_eq!(min, 1);
    }

    #[test]
    fn k33_minimum_is_nine() {
        let (min, _) = brute_min(&k_mn(3, 3), None, None, &BruteConfig::default()).unwrap();
        assert_eq!(min, 9);
    }

    #[test]
    fn decide_monotone_in_k() {
        let g = k_mn(2, 2);
        let no = brute_decide(&Instance::new(g.clone(), 0), None, &BruteConfig::default()).unwrap();
        assert!(no.is_none());
        let yes = brute_decide(&Instance::new(g, 1), None, &BruteConfig::default()).unwrap();
        assert!(yes.is_some());
    }

    #[test]
    fn witness_is_lexicographically_first_optimal() {
        let g = k_mn(2, 2);
        let (_, d) = brute_min(&g, None, None, &BruteConfig::default()).unwrap();
        // All drawings of K22 count 1, so the witness is the natural one.
        assert_eq!(d, Drawing::natural(&g));
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = k_mn(3, 3);
        let seq = brute_min(&g, None, None, &BruteConfig::default()).unwrap();
        let par = brute_min(
            &g,
            None,
            None,
            &BruteConfig {
                jobs: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(seq.0, par.0);
    }
}
